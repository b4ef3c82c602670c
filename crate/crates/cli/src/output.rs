use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// A file written under `<path>.partial` and renamed on commit; dropped
/// uncommitted, the partial file is removed.
pub struct AtomicFile {
    target: PathBuf,
    partial: PathBuf,
    writer: Option<BufWriter<File>>,
}

impl AtomicFile {
    pub fn create(target: &Path) -> Result<Self> {
        let mut partial = target.as_os_str().to_owned();
        partial.push(".partial");
        let partial = PathBuf::from(partial);
        let f = File::create(&partial).with_context(|| format!("creating {}", partial.display()))?;
        Ok(AtomicFile {
            target: target.to_path_buf(),
            partial,
            writer: Some(BufWriter::new(f)),
        })
    }

    pub fn writer(&mut self) -> &mut BufWriter<File> {
        self.writer.as_mut().expect("not committed")
    }

    pub fn commit(mut self) -> Result<PathBuf> {
        let mut w = self.writer.take().expect("not committed");
        w.flush()?;
        drop(w);
        std::fs::rename(&self.partial, &self.target)
            .with_context(|| format!("renaming to {}", self.target.display()))?;
        Ok(self.target.clone())
    }
}

impl Drop for AtomicFile {
    fn drop(&mut self) {
        if self.writer.take().is_some() {
            let _ = std::fs::remove_file(&self.partial);
        }
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

#[derive(Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a [String],
    config_digest: &'a str,
    version: &'a str,
    inputs: Vec<FileEntry>,
    outputs: Vec<FileEntry>,
    wall_time_seconds: f64,
    shards: usize,
}

/// Collects inputs and outputs of one run for `<output>.manifest.json`.
pub struct RunManifest {
    started: Instant,
    command: Vec<String>,
    config_digest: String,
    shards: usize,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(config_digest: &str, shards: usize) -> Self {
        RunManifest {
            started: Instant::now(),
            command: std::env::args().collect(),
            config_digest: config_digest.to_string(),
            shards,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_path_buf());
    }

    pub fn output(&mut self, p: PathBuf) {
        self.outputs.push(p);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let entries = |ps: &[PathBuf]| -> Result<Vec<FileEntry>> {
            ps.iter()
                .map(|p| {
                    Ok(FileEntry {
                        path: p.display().to_string(),
                        sha256: file_digest(p)?,
                    })
                })
                .collect()
        };
        let m = Manifest {
            command: &self.command,
            config_digest: &self.config_digest,
            version: env!("CARGO_PKG_VERSION"),
            inputs: entries(&self.inputs)?,
            outputs: entries(&self.outputs)?,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            shards: self.shards,
        };
        let mut f = AtomicFile::create(path)?;
        serde_json::to_writer_pretty(f.writer(), &m)?;
        writeln!(f.writer())?;
        f.commit()?;
        Ok(())
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

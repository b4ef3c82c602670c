use std::path::Path;
use std::process::{Command, Output};

fn twistsha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistsha"))
        .args(args)
        .env_remove("TWISTSHA_SHARDS")
        .env_remove("TWISTSHA_MEMORY_BUDGET")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn no_partials(dir: &Path) {
    for e in std::fs::read_dir(dir).unwrap() {
        let name = e.unwrap().file_name().into_string().unwrap();
        assert!(!name.ends_with(".partial"), "{name} left behind");
    }
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn theta_dump_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.bin"), path(dir.path(), "b.bin"));
    assert_eq!(code(&twistsha(&["theta", "--curve", "A", "--limit", "5000", "--out", &a])), 0);
    assert_eq!(code(&twistsha(&["--shards", "3", "theta", "--curve", "A", "--limit", "5000", "--out", &b])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{a}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["shards"].as_u64().unwrap() >= 1);
    no_partials(dir.path());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x.bin");
    assert_eq!(code(&twistsha(&["theta", "--curve", "Q", "--limit", "10", "--out", &out])), 2);
    assert_eq!(code(&twistsha(&["theta", "--curve", "A", "--limit", "0", "--out", &out])), 2);
    assert_eq!(code(&twistsha(&["theta", "--curve", "B", "--variant", "3", "--limit", "10", "--out", &out])), 2);
    assert_eq!(code(&twistsha(&["sha", "--curve", "A", "--d", "6"])), 2);
    assert_eq!(code(&twistsha(&["descent", "--d", "6"])), 2);
    assert_eq!(code(&twistsha(&["family", "--n", "5", "--p", "2", "--d", "9..3"])), 2);
    no_partials(dir.path());
}

#[test]
fn memory_budget_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x.bin");
    let r = twistsha(&["--memory-budget", "1000", "theta", "--curve", "A", "--limit", "100000", "--out", &out]);
    assert_eq!(code(&r), 4);
    assert!(!Path::new(&out).exists());
    no_partials(dir.path());
}

#[test]
fn vanishing_l_is_an_error() {
    assert_eq!(code(&twistsha(&["analytic", "--model", "0,0,1,-1,0", "--digits", "8"])), 1);
}

#[test]
fn analytic_report() {
    let r = twistsha(&["analytic", "--model", "0,0,0,-1,0"]);
    assert_eq!(code(&r), 0);
    let text = stdout(&r);
    assert!(text.contains("conductor   32"));
    assert!(text.contains("sha         1 (certified: true)"));
}

#[test]
fn single_twist() {
    let r = twistsha(&["sha", "--curve", "C", "--d", "1"]);
    assert_eq!(code(&r), 0);
    assert!(stdout(&r).contains("sha=1"));
}

#[test]
fn scan_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let scan = path(dir.path(), "scan.csv");
    let r = twistsha(&["sha", "--curve", "B", "--limit", "3000", "--out", &scan, "--l-values", "--cross-check-every", "50"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(&scan).unwrap();
    assert!(text.starts_with("d,a,sha,cfin,lvalue\n"));
    let stats_dir = path(dir.path(), "stats");
    let r = twistsha(&["stats", "all", "--in", &scan, "--curve", "B", "--out-dir", &stats_dir]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let sd = Path::new(&stats_dir);
    for (file, header) in [
        ("freq_k.csv", "X,k,count"),
        ("cl.csv", "X,p,F_p,F,ratio"),
        ("delaunay.csv", "T,M,N,f,g,fstar"),
        ("hist.csv", "bin_left,count"),
    ] {
        let body = std::fs::read_to_string(sd.join(file)).unwrap();
        assert_eq!(body.lines().next(), Some(header), "{file}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sd.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
    no_partials(dir.path());
    no_partials(sd);
}

#[test]
fn descent_range_skips_ineligible_d() {
    let r = twistsha(&["descent", "--d", "70..75"]);
    assert_eq!(code(&r), 0);
    let text = stdout(&r);
    let ds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ds, ["71", "73"]);
    assert!(text.lines().nth(2).unwrap().starts_with("73,"));
}

#[test]
fn family_single_row() {
    let r = twistsha(&["family", "--n", "5", "--p", "2", "--d", "1"]);
    assert_eq!(code(&r), 0);
    assert!(stdout(&r).contains("5,2,68024256,1,9,36,9,144"));
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.toml");
    std::fs::write(&cfg, "shards = 2\n").unwrap();
    let out = path(dir.path(), "t.bin");
    let r = Command::new(env!("CARGO_BIN_EXE_twistsha"))
        .args(["--config", &cfg, "theta", "--curve", "D", "--limit", "1000", "--out", &out])
        .env("TWISTSHA_SHARDS", "5")
        .output()
        .unwrap();
    assert_eq!(code(&r), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["shards"], 2);
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_ne!(code(&twistsha(&["--config", &cfg, "descent", "--d", "1"])), 0);
}

mod config;
mod output;

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use shatwist::arith::{CurveLabel, FactoredInt};
use shatwist::curves::{CurveInvariants, WeierstrassModel};
use shatwist::descent::{selmer_batch, write_descent_csv, SelmerResult};
use shatwist::family::{write_family_csv, FamilyContext, FamilyRow};
use shatwist::lvalue::{l_value_for, sha_quotient, GUARD_DIGITS};
use shatwist::precision::MAX_DIGITS;
use shatwist::stats::{
    delaunay_means, histogram, write_cl, write_delaunay, write_freq_k, write_hist, HistogramSpec, StatSeries,
    DEFAULT_K_MAX, DEFAULT_PRIMES,
};
use shatwist::theta::{builtin_spec, theta_batch_with, write_dump, BatchOptions};
use shatwist::twists::{scan, scan_single, write_scan_csv, CrossCheck, ScanOptions, TwistRecord};
use shatwist::Error;

use config::Settings;
use output::{manifest_path, AtomicFile, RunManifest};

#[derive(Parser)]
#[command(name = "twistsha", version, about = "Analytic orders of Ш for quadratic twists")]
struct Cli {
    /// TOML file with shards, memory_budget, window, digits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (also TWISTSHA_SHARDS).
    #[arg(long, global = true)]
    shards: Option<usize>,
    /// Memory budget in bytes (also TWISTSHA_MEMORY_BUDGET).
    #[arg(long, global = true)]
    memory_budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump theta coefficients a(1..=limit) in the THET format.
    Theta {
        #[arg(long)]
        curve: CurveLabel,
        /// Theta variant for curve A (1 or 2).
        #[arg(long)]
        variant: Option<u8>,
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// |Ш| for one twist, or a scan CSV up to a limit.
    Sha {
        #[arg(long)]
        curve: CurveLabel,
        #[arg(long, conflicts_with = "limit")]
        d: Option<u64>,
        #[arg(long, requires = "out")]
        limit: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include L(E_d,1) in the CSV.
        #[arg(long)]
        l_values: bool,
        /// Confirm every n-th record against the analytic quotient.
        #[arg(long)]
        cross_check_every: Option<u64>,
    },
    /// |Ш(E_i^d)| for the isogeny family E_1(n,p), …, E_4(n,p).
    Family {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
        /// A single d or an inclusive range a..b.
        #[arg(long)]
        d: String,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Allow more than 10⁹ series terms.
        #[arg(long)]
        allow_huge: bool,
    },
    /// Counting statistics from a scan CSV.
    Stats {
        which: StatsKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        curve: CurveLabel,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Last checkpoint; defaults to the largest d in the input.
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u64,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_PRIMES)]
        primes: Vec<u64>,
        #[arg(long, value_enum, default_value = "sha")]
        normalization: NormKind,
        /// Skip the (log T)^{5/8} factor for B and D.
        #[arg(long)]
        no_log_correction: bool,
    },
    /// Two-isogeny Selmer dimensions for twists of E_1(5,2).
    Descent {
        /// A single d or an inclusive range a..b (ineligible d are skipped).
        #[arg(long)]
        d: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// L(E,1) and the analytic order of Ш for a Weierstrass model.
    Analytic {
        /// a1,a2,a3,a4,a6
        #[arg(long, allow_hyphen_values = true)]
        model: String,
        #[arg(long)]
        digits: Option<u32>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsKind {
    Freq,
    Cl,
    Delaunay,
    Hist,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormKind {
    /// log L normalized by log log d.
    Ks,
    /// log(|Ш|/√d) with the curve's μ and σ².
    Sha,
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::InvalidArgument(format!("bad d range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let d = s.trim().parse().map_err(|_| bad())?;
            (d, d)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad().into());
    }
    Ok((lo, hi))
}

fn with_out<F>(out: &Path, manifest: &mut RunManifest, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let mut f = AtomicFile::create(out)?;
    body(f.writer())?;
    manifest.output(f.commit()?);
    Ok(())
}

fn cmd_theta(s: &Settings, curve: CurveLabel, variant: Option<u8>, limit: u64, out: &Path) -> Result<()> {
    if limit == 0 {
        bail!(Error::InvalidArgument("--limit must be positive".into()));
    }
    let spec = builtin_spec(curve, variant)?;
    let opts = BatchOptions {
        shards: s.shards,
        memory_budget: s.memory_budget,
    };
    let table = theta_batch_with(&spec, limit, &opts)?;
    // the second theta series of A is labelled 'a'
    let label = match (curve, variant) {
        (CurveLabel::A, Some(2)) => b'a',
        _ => curve.as_byte(),
    };
    let mut m = RunManifest::new(&s.config_digest, s.shards);
    with_out(out, &mut m, |w| Ok(write_dump(w, label, &table)?))?;
    m.write(&manifest_path(out))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sha(
    s: &Settings,
    curve: CurveLabel,
    d: Option<u64>,
    limit: Option<u64>,
    out: Option<&Path>,
    l_values: bool,
    cross_check_every: Option<u64>,
) -> Result<()> {
    if let Some(d) = d {
        let r = scan_single(curve, d)?;
        let k = (r.sha as f64).sqrt().round() as u64;
        if r.sha == 0 {
            println!("{curve} d={d} a={} L=0", r.a);
        } else {
            println!("{curve} d={d} a={} sha={} ({k}^2)", r.a, r.sha);
        }
        return Ok(());
    }
    let (Some(limit), Some(out)) = (limit, out) else {
        bail!(Error::InvalidArgument("give --d, or --limit with --out".into()));
    };
    if limit == 0 {
        bail!(Error::InvalidArgument("--limit must be positive".into()));
    }
    let mut opts = ScanOptions::new(limit);
    opts.shards = s.shards;
    opts.with_l_values = l_values;
    if let Some(w) = s.window {
        opts.window = w;
    }
    if let Some(every) = cross_check_every {
        opts.cross_check = Some(CrossCheck {
            digits: s.digits.unwrap_or(8),
            every,
            max_d: limit,
        });
    }
    let mut m = RunManifest::new(&s.config_digest, s.shards);
    let mut count = 0;
    with_out(out, &mut m, |w| {
        count = write_scan_csv(w, scan(curve, opts)?)?;
        Ok(())
    })?;
    eprintln!("{count} records");
    m.write(&manifest_path(out))
}

fn cmd_family(
    s: &Settings,
    n: u32,
    p: i64,
    range: &str,
    digits: Option<u32>,
    out: Option<&Path>,
    allow_huge: bool,
) -> Result<()> {
    let (lo, hi) = parse_range(range)?;
    let digits = digits.or(s.digits).unwrap_or(8);
    let mut ctx = FamilyContext::new(n, p)?;
    ctx.allow_huge = allow_huge;
    let mut rows: Vec<FamilyRow> = Vec::new();
    let mut vanishing = 0;
    for d in lo..=hi {
        let f = FactoredInt::factor(d)?;
        if !f.is_squarefree() || f.primes().any(|q| ctx.base.bad_primes().contains(&q)) {
            continue;
        }
        match ctx.row(d, digits) {
            Ok(row) => {
                if let Some(bad) = row.sha.iter().find(|a| !a.certified) {
                    bail!(Error::Certification { raw: bad.raw_quotient });
                }
                eprintln!("d = {d}: {}", row.csv_row(n, p));
                rows.push(row);
            }
            Err(Error::VanishingL { .. }) => vanishing += 1,
            Err(e) => return Err(e.into()),
        }
    }
    eprintln!("{} rows, {vanishing} d with L(E_d,1) = 0", rows.len());
    match out {
        Some(out) => {
            let mut m = RunManifest::new(&s.config_digest, s.shards);
            with_out(out, &mut m, |w| Ok(write_family_csv(w, n, p, &rows)?))?;
            m.write(&manifest_path(out))
        }
        None => Ok(write_family_csv(std::io::stdout().lock(), n, p, &rows)?),
    }
}

fn read_scan(path: &Path) -> Result<Vec<TwistRecord>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != TwistRecord::CSV_HEADER {
                bail!(Error::Format(format!("{} is not a scan CSV", path.display())));
            }
            continue;
        }
        if !line.trim().is_empty() {
            out.push(TwistRecord::parse_csv_row(&line)?);
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_stats(
    s: &Settings,
    which: StatsKind,
    input: &Path,
    curve: CurveLabel,
    out_dir: &Path,
    limit: Option<u64>,
    k_max: u64,
    primes: &[u64],
    norm: NormKind,
    log_correction: bool,
) -> Result<()> {
    let records = read_scan(input)?;
    let limit = limit.or(records.last().map(|r| r.d)).ok_or(Error::Empty)?;
    std::fs::create_dir_all(out_dir)?;
    let mut m = RunManifest::new(&s.config_digest, s.shards);
    m.input(input);
    let wants = |k: StatsKind| which == k || which == StatsKind::All;
    let mut series = StatSeries::new(curve, limit, primes)?;
    for r in records.iter().take_while(|r| r.d <= limit) {
        series.accumulate(r)?;
    }
    if wants(StatsKind::Freq) {
        with_out(&out_dir.join("freq_k.csv"), &mut m, |w| Ok(write_freq_k(w, &series, k_max)?))?;
    }
    if wants(StatsKind::Cl) {
        with_out(&out_dir.join("cl.csv"), &mut m, |w| Ok(write_cl(w, &series)?))?;
    }
    if wants(StatsKind::Delaunay) {
        let rows = delaunay_means(&series, log_correction);
        with_out(&out_dir.join("delaunay.csv"), &mut m, |w| Ok(write_delaunay(w, &rows)?))?;
    }
    if wants(StatsKind::Hist) {
        let spec = match norm {
            NormKind::Ks => HistogramSpec::keating_snaith(),
            NormKind::Sha => HistogramSpec::sha_rs(curve),
        };
        let h = histogram(records.iter().take_while(|r| r.d <= limit), &spec);
        eprintln!(
            "histogram: {} values, {} below, {} above, {} excluded",
            h.values(),
            h.below,
            h.above,
            h.excluded
        );
        with_out(&out_dir.join("hist.csv"), &mut m, |w| Ok(write_hist(w, &h)?))?;
    }
    m.write(&out_dir.join("manifest.json"))
}

fn cmd_descent(s: &Settings, range: &str, out: Option<&Path>) -> Result<()> {
    let (lo, hi) = parse_range(range)?;
    let ds: Vec<u64> = if lo == hi {
        vec![lo]
    } else {
        let mut v = Vec::new();
        for d in lo..=hi {
            let f = FactoredInt::factor(d)?;
            if f.is_squarefree() && [2, 3, 19, 29, 643].iter().all(|q| d % q != 0) {
                v.push(d);
            }
        }
        v
    };
    let pool = rayon_pool(s.shards)?;
    let rows: Vec<SelmerResult> = pool.install(|| selmer_batch(&ds))?;
    match out {
        Some(out) => {
            let mut m = RunManifest::new(&s.config_digest, s.shards);
            with_out(out, &mut m, |w| Ok(write_descent_csv(w, &rows)?))?;
            m.write(&manifest_path(out))
        }
        None => Ok(write_descent_csv(std::io::stdout().lock(), &rows)?),
    }
}

fn rayon_pool(shards: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(shards).build()?)
}

fn cmd_analytic(s: &Settings, model: &str, digits: Option<u32>) -> Result<()> {
    let digits = digits.or(s.digits).unwrap_or(10);
    let m = WeierstrassModel::parse(model)?;
    let inv = CurveInvariants::compute(&m, (digits + GUARD_DIGITS).min(MAX_DIGITS))?;
    let l = l_value_for(&inv, digits)?;
    println!("model       {}", inv.minimal_model);
    println!("conductor   {}", inv.conductor);
    println!("torsion     {}", inv.torsion_order);
    println!("tamagawa    {}", inv.c_fin);
    println!("omega       {:.*}", digits as usize, inv.omega.to_f64());
    println!("root sign   {:+}", l.root_sign);
    println!("L(E,1)      {:.*}", digits as usize, l.value.to_f64());
    println!("terms       {}", l.terms_used);
    let sha = sha_quotient(&l, &inv)?;
    println!("sha raw     {:.*}", digits as usize, sha.raw_quotient);
    println!("sha         {} (certified: {})", sha.rounded, sha.certified);
    sha.require_certified()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let s = Settings::resolve(cli.config.as_deref(), cli.shards, cli.memory_budget)?;
    match cli.command {
        Command::Theta {
            curve,
            variant,
            limit,
            out,
        } => cmd_theta(&s, curve, variant, limit, &out),
        Command::Sha {
            curve,
            d,
            limit,
            out,
            l_values,
            cross_check_every,
        } => cmd_sha(&s, curve, d, limit, out.as_deref(), l_values, cross_check_every),
        Command::Family {
            n,
            p,
            d,
            digits,
            out,
            allow_huge,
        } => cmd_family(&s, n, p, &d, digits, out.as_deref(), allow_huge),
        Command::Stats {
            which,
            input,
            curve,
            out_dir,
            limit,
            k_max,
            primes,
            normalization,
            no_log_correction,
        } => cmd_stats(
            &s,
            which,
            &input,
            curve,
            &out_dir,
            limit,
            k_max,
            &primes,
            normalization,
            !no_log_correction,
        ),
        Command::Descent { d, out } => cmd_descent(&s, &d, out.as_deref()),
        Command::Analytic { model, digits } => cmd_analytic(&s, &model, digits),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Certification { .. } | Error::CrossCheck { .. } => 3,
                Error::Memory { .. } | Error::Capacity { .. } => 4,
                Error::InvalidArgument(_)
                | Error::UnknownVariant { .. }
                | Error::NotEligible { .. }
                | Error::Contract(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

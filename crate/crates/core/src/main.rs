// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use mlpa::chain::{mori_params, sample_chain, sample_conditioned_chain_half, spacings, ConditionedStep};
use mlpa::crp::{
    aldous_splitting_pmf, beta_splitting_pmf, check_crp_params, conditioned_merger_pmf, merger_pmf, nested_scheme,
    sample_joint_k_v_half, write_nested_jsonl, MergerKernelQuery,
};
use mlpa::harness::{criterion_name, run_suite, SuiteConfig};
use mlpa::special::exact_kn_pmf;
use mlpa::tree::{grow_tree, max_scaled_degree, scaled_degrees, write_tree_csv};
use mlpa::{AlphaTheta, Error, RngStream};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "mlpa", version, about = "Mittag-Leffler chains, nested restaurant schemes and preferential attachment")]
struct Cli {
    /// Worker threads; 0 lets the runtime choose.
    #[arg(long, env = "MLPA_JOBS", global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Grow beta-recursive trees and emit scaled degree vectors.
    Tree {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Emit scaled degrees of vertices 0..=r.
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Vertices considered by the max-degree column.
        #[arg(long, default_value_t = 50)]
        r_cap: usize,
        /// Also dump replicate 0 as `vertex,parent,degree` CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Sample Mittag-Leffler chain paths and their spacings.
    Chain {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        /// Use the tree-limit parameters alpha = 1/(2+beta), theta = 1 - 2 alpha.
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["alpha", "theta"])]
        beta: Option<f64>,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the nested restaurant scheme; one JSON line per replicate and level.
    Nested {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a kernel or block-count pmf as CSV.
    Pmf {
        #[arg(long, value_enum)]
        kernel: Kernel,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        /// Block count for kernels.
        #[arg(long)]
        b: Option<usize>,
        /// Sample size for `kn`.
        #[arg(long)]
        n: Option<usize>,
        /// Aldous' parameter for `aldous`; `inf` is accepted.
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constructions conditioned on the local time `T_0 = t`.
    Condhalf {
        #[arg(long)]
        t: f64,
        /// Chain steps.
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Stable index; anything other than 1/2 uses the rejection step.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Use the rejection step even at alpha = 1/2.
        #[arg(long)]
        rejection: bool,
        /// Instead of the chain, sample `(K_{n,1}, V_1)` for this `n` (alpha = 1/2 only).
        #[arg(long)]
        joint_n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long)]
        seed: u64,
        /// Runs per significance check.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        /// Override every Monte Carlo sample count.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 100)]
        calibration_trials: usize,
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u32>>,
        /// JSON report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV summary path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kernel {
    Merger,
    ConditionedMerger,
    BetaSplitting,
    Aldous,
    Kn,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) => Failure::Usage(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn need<T>(v: Option<T>, flag: &str, kernel: &str) -> Res<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for {kernel}")))
}

fn positive(v: usize, flag: &str) -> Res<()> {
    if v == 0 {
        return Err(usage(format!("--{flag} must be at least 1")));
    }
    Ok(())
}

fn seed_or_default(seed: Option<u64>) -> u64 {
    let s = seed.unwrap_or(DEFAULT_SEED);
    eprintln!("seed: {s}");
    s
}

/// Writes `bytes` to `path` through a temporary file in the same directory, or to stdout.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Res<()> {
    match path {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(p).map_err(|e| Failure::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}

fn replicates<T: Send>(
    seed: u64,
    reps: usize,
    f: impl Fn(&mut RngStream) -> mlpa::Result<T> + Sync,
) -> Res<Vec<T>> {
    Ok((0..reps)
        .into_par_iter()
        .map(|i| f(&mut RngStream::new(seed, i as u64)))
        .collect::<mlpa::Result<Vec<T>>>()?)
}

fn csv_line(buf: &mut Vec<u8>, fields: impl IntoIterator<Item = String>) {
    let line: Vec<String> = fields.into_iter().collect();
    buf.extend_from_slice(line.join(",").as_bytes());
    buf.push(b'\n');
}

fn json_line(buf: &mut Vec<u8>, v: &serde_json::Value) -> Res<()> {
    serde_json::to_writer(&mut *buf, v).map_err(|e| Failure::Runtime(e.to_string()))?;
    buf.push(b'\n');
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_tree(beta: f64, n: usize, reps: usize, r: usize, r_cap: usize, dump: Option<PathBuf>, seed: Option<u64>, o: Output) -> Res<()> {
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(usage(format!("--beta must exceed -1, got {beta}")));
    }
    positive(n, "n")?;
    positive(reps, "reps")?;
    if r > n {
        return Err(usage(format!("--r = {r} exceeds --n = {n}")));
    }
    let seed = seed_or_default(seed);
    let rows = replicates(seed, reps, |rng| {
        let t = grow_tree(beta, n, rng)?;
        let s = scaled_degrees(&t, r)?;
        let m = max_scaled_degree(&t, r_cap);
        Ok((s, m, t))
    })?;
    let mut buf = Vec::new();
    if o.format == Format::Csv {
        csv_line(&mut buf, (0..=r).map(|i| format!("d{i}")).chain(["max_scaled".to_string()]));
    }
    for (i, (s, m, _)) in rows.iter().enumerate() {
        match o.format {
            Format::Csv => csv_line(&mut buf, s.iter().map(|x| x.to_string()).chain([m.to_string()])),
            Format::Json => json_line(&mut buf, &json!({ "replicate": i, "scaled": s, "max_scaled": m, "r_cap": r_cap }))?,
        }
    }
    if let Some(path) = dump {
        let mut tree_csv = Vec::new();
        write_tree_csv(&mut tree_csv, &rows[0].2)?;
        emit(Some(&path), &tree_csv)?;
    }
    emit(o.out.as_deref(), &buf)
}

#[allow(clippy::too_many_arguments)]
fn cmd_chain(alpha: Option<f64>, theta: Option<f64>, beta: Option<f64>, r: usize, reps: usize, seed: Option<u64>, o: Output) -> Res<()> {
    let params = match (beta, alpha, theta) {
        (Some(b), _, _) => mori_params(b)?,
        (None, Some(a), Some(t)) => AlphaTheta::new(a, t)?,
        _ => return Err(usage("give --alpha and --theta, or --beta")),
    };
    positive(reps, "reps")?;
    let seed = seed_or_default(seed);
    let paths = replicates(seed, reps, |rng| sample_chain(params, r, rng))?;
    let mut buf = Vec::new();
    if o.format == Format::Csv {
        csv_line(&mut buf, (0..=r).map(|j| format!("v{j}")).chain((0..=r).map(|j| format!("xi{j}"))));
    }
    for (i, p) in paths.iter().enumerate() {
        let xi = spacings(p).xi;
        match o.format {
            Format::Csv => csv_line(&mut buf, p.values.iter().chain(xi.iter()).map(|x| x.to_string())),
            Format::Json => json_line(
                &mut buf,
                &json!({ "replicate": i, "alpha": params.alpha(), "theta": params.theta(), "values": p.values, "betas": p.betas, "xi": xi }),
            )?,
        }
    }
    emit(o.out.as_deref(), &buf)
}

#[allow(clippy::too_many_arguments)]
fn cmd_nested(alpha: f64, theta: f64, r: usize, n: usize, reps: usize, seed: Option<u64>, out: Option<PathBuf>) -> Res<()> {
    check_crp_params(alpha, theta)?;
    positive(r, "r")?;
    positive(n, "n")?;
    positive(reps, "reps")?;
    let seed = seed_or_default(seed);
    let recs = replicates(seed, reps, |rng| nested_scheme(alpha, theta, r, n, rng))?;
    let mut buf = Vec::new();
    for (i, rec) in recs.iter().enumerate() {
        write_nested_jsonl(&mut buf, i, rec)?;
    }
    emit(out.as_deref(), &buf)
}

#[allow(clippy::too_many_arguments)]
fn cmd_pmf(kernel: Kernel, alpha: Option<f64>, theta: Option<f64>, b: Option<usize>, n: Option<usize>, beta: Option<f64>, out: Option<PathBuf>) -> Res<()> {
    let mut rows: Vec<(usize, f64)> = Vec::new();
    let label;
    match kernel {
        Kernel::Merger | Kernel::ConditionedMerger => {
            let name = if kernel == Kernel::Merger { "merger" } else { "conditioned-merger" };
            let (a, t, b) = (need(alpha, "alpha", name)?, need(theta, "theta", name)?, need(b, "b", name)?);
            MergerKernelQuery::new(a, t, b, 0)?;
            label = "ell";
            if kernel == Kernel::Merger {
                for l in 0..=b {
                    rows.push((l, merger_pmf(MergerKernelQuery::new(a, t, b, l)?)));
                }
            } else {
                if b < 2 {
                    return Err(usage("conditioned-merger needs --b >= 2"));
                }
                for l in 2..=b {
                    rows.push((l, conditioned_merger_pmf(MergerKernelQuery::new(a, t, b, l)?)?));
                }
            }
        }
        Kernel::BetaSplitting => {
            let (a, b) = (need(alpha, "alpha", "beta-splitting")?, need(b, "b", "beta-splitting")?);
            label = "ell";
            for l in 1..b.max(1) {
                rows.push((l, beta_splitting_pmf(a, b, l)?));
            }
            if b < 2 {
                beta_splitting_pmf(a, b, 1)?;
            }
        }
        Kernel::Aldous => {
            let (be, b) = (need(beta, "beta", "aldous")?, need(b, "b", "aldous")?);
            label = "ell";
            if b < 2 {
                aldous_splitting_pmf(be, b, 1)?;
            }
            for l in 1..b.max(1) {
                rows.push((l, aldous_splitting_pmf(be, b, l)?));
            }
        }
        Kernel::Kn => {
            let (a, t, n) = (need(alpha, "alpha", "kn")?, need(theta, "theta", "kn")?, need(n, "n", "kn")?);
            positive(n, "n")?;
            label = "k";
            let p = exact_kn_pmf(a, t, n)?;
            rows.extend(p.into_iter().enumerate().skip(1));
        }
    }
    let mut buf = Vec::new();
    csv_line(&mut buf, [label.to_string(), "p".to_string()]);
    for (i, p) in rows {
        csv_line(&mut buf, [i.to_string(), p.to_string()]);
    }
    emit(out.as_deref(), &buf)
}

#[allow(clippy::too_many_arguments)]
fn cmd_condhalf(t: f64, r: usize, reps: usize, alpha: f64, rejection: bool, joint_n: Option<usize>, seed: Option<u64>, o: Output) -> Res<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(usage(format!("--t must be positive and finite, got {t}")));
    }
    AlphaTheta::new(alpha, 0.0)?;
    positive(reps, "reps")?;
    let half = alpha == 0.5;
    let mut buf = Vec::new();
    if let Some(n) = joint_n {
        positive(n, "joint-n")?;
        if !half {
            return Err(usage("--joint-n requires --alpha 0.5"));
        }
        let seed = seed_or_default(seed);
        let kv = replicates(seed, reps, |rng| sample_joint_k_v_half(n, t, rng))?;
        if o.format == Format::Csv {
            csv_line(&mut buf, ["k".to_string(), "v".to_string()]);
        }
        for (i, (k, v)) in kv.into_iter().enumerate() {
            match o.format {
                Format::Csv => csv_line(&mut buf, [k.to_string(), v.to_string()]),
                Format::Json => json_line(&mut buf, &json!({ "replicate": i, "k": k, "v": v }))?,
            }
        }
        return emit(o.out.as_deref(), &buf);
    }
    positive(r, "r")?;
    let seed = seed_or_default(seed);
    let exact = half && !rejection;
    let first = if exact { None } else { Some(ConditionedStep::new(alpha, t)?) };
    let chains = replicates(seed, reps, |rng| {
        if exact {
            let c = sample_conditioned_chain_half(t, r, rng)?;
            return Ok((c.tvalues, c.vratios));
        }
        let mut tv = vec![t];
        let mut vv = Vec::with_capacity(r);
        for k in 0..r {
            let (s, v) = if k == 0 {
                first.as_ref().expect("built above").sample(rng)?
            } else {
                ConditionedStep::new(alpha, tv[k])?.sample(rng)?
            };
            tv.push(s);
            vv.push(v);
        }
        Ok((tv, vv))
    })?;
    if o.format == Format::Csv {
        csv_line(&mut buf, (0..=r).map(|k| format!("t{k}")).chain((1..=r).map(|k| format!("v{k}"))));
    }
    for (i, (tv, vv)) in chains.iter().enumerate() {
        match o.format {
            Format::Csv => csv_line(&mut buf, tv.iter().chain(vv.iter()).map(|x| x.to_string())),
            Format::Json => json_line(&mut buf, &json!({ "replicate": i, "alpha": alpha, "t": tv, "v": vv }))?,
        }
    }
    emit(o.out.as_deref(), &buf)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: String,
    seed: u64,
    seeds: usize,
    samples: Option<usize>,
    calibration_trials: usize,
    criteria: Option<Vec<u32>>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Res<ExitCode> {
    let cfg = SuiteConfig { suite, seed, seeds, level: 0.01, pass_rate: 0.95, samples, calibration_trials, criteria };
    cfg.validate()?;
    let report = run_suite(&cfg)?;
    for c in &report.checks {
        eprintln!(
            "criterion {:>2} {:<34} {:<44} {:?}",
            c.criterion,
            criterion_name(c.criterion).unwrap_or("?"),
            c.name,
            c.status
        );
    }
    let json = report.canonical_json()?;
    if let Some(path) = csv {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        emit(Some(&path), &buf)?;
    }
    emit(out.as_deref(), json.as_bytes())?;
    Ok(if report.failures() > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn dispatch(cmd: Command) -> Res<ExitCode> {
    match cmd {
        Command::Tree { beta, n, reps, r, r_cap, dump, seed, output } => cmd_tree(beta, n, reps, r, r_cap, dump, seed, output)?,
        Command::Chain { alpha, theta, beta, r, reps, seed, output } => cmd_chain(alpha, theta, beta, r, reps, seed, output)?,
        Command::Nested { alpha, theta, r, n, reps, seed, out } => cmd_nested(alpha, theta, r, n, reps, seed, out)?,
        Command::Pmf { kernel, alpha, theta, b, n, beta, out } => cmd_pmf(kernel, alpha, theta, b, n, beta, out)?,
        Command::Condhalf { t, r, reps, alpha, rejection, joint_n, seed, output } => {
            cmd_condhalf(t, r, reps, alpha, rejection, joint_n, seed, output)?
        }
        Command::Verify { suite, seed, seeds, samples, calibration_trials, criteria, out, csv } => {
            return cmd_verify(suite, seed, seeds, samples, calibration_trials, criteria, out, csv)
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: cannot configure {} workers: {e}", cli.jobs);
            return ExitCode::from(1);
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

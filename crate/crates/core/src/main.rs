//! `qel`: command-line front end to the checker suites.
//!
//! Exit codes: 0 success, 1 a check failed, 2 configuration or input error,
//! 3 the explorer flagged a candidate counterexample.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qel_core::lab::{
    explore_conjecture, markov_characterizations, replay_exploration, trotter_sequence, ConjectureKind, Ensemble,
    ExploreConfig, ExploreDump, Meta, TrotterResult, Verdict, DEFAULT_T_SAMPLES,
};
use qel_core::report::{self, Format};
use qel_core::states::{markov_state, MarkovSpecJson};
use qel_core::suite::{self, Checker, Instance, SuiteConfig, SuiteReport};
use qel_core::{tol, MultipartiteState};

const SEED_ENV: &str = "QEL_SEED";

#[derive(Parser)]
#[command(name = "qel", version, about = "Numerical checks of quantum entropy inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checker suites over seeded random instances.
    Check(CheckArgs),
    /// Build a Markov state from a JSON spec and report its residuals.
    Markov(MarkovArgs),
    /// Lie-Trotter sequence study.
    Trotter(TrotterArgs),
    /// Search for counterexamples to an open conjecture.
    Explore(ExploreArgs),
    /// Re-evaluate a dumped instance.
    Replay {
        file: PathBuf,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Subsystem dims, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 2, 2])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Master seed; the QEL_SEED environment variable overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = tol::INEQ)]
    tol: f64,
    /// Regularization weight of the maximally mixed state.
    #[arg(long, default_value_t = tol::DEFAULT_EPS)]
    eps: f64,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv; inferred from the --out extension when omitted.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    /// Comma-separated checker names, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: Common,
    /// Fixed α for the dw-* checkers.
    #[arg(long)]
    alpha: Option<f64>,
    /// Petz sample points for the markov checker.
    #[arg(long, value_delimiter = ',')]
    t_samples: Option<Vec<f64>>,
    /// Largest Trotter index.
    #[arg(long, default_value_t = 64)]
    nmax: u64,
    /// Replay a dumped instance instead of running a suite.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct MarkovArgs {
    spec: PathBuf,
    #[arg(long, value_delimiter = ',')]
    t_samples: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrotterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 64)]
    nmax: u64,
    /// Run on a single state file instead of random trials.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    /// stronger-mono, ptrace-petz, cmi-petz or trotter-monotone.
    kind: String,
    #[command(flatten)]
    common: Common,
    /// random or markov.
    #[arg(long, default_value = "random")]
    ensemble: String,
    /// Largest n for trotter-monotone.
    #[arg(long, default_value_t = 16)]
    nmax: u64,
}

/// Failure carrying its exit code.
struct Exit(u8, String);

impl Exit {
    fn config(msg: impl std::fmt::Display) -> Self {
        Exit(2, msg.to_string())
    }
}

impl From<qel_core::Error> for Exit {
    fn from(e: qel_core::Error) -> Self {
        Exit::config(e)
    }
}

type Outcome = Result<u8, Exit>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Markov(args) => cmd_markov(args),
        Command::Trotter(args) => cmd_trotter(args),
        Command::Explore(args) => cmd_explore(args),
        Command::Replay { file } => cmd_replay(&file),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn seed(common: &Common) -> Result<u64, Exit> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Exit::config(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(common.seed),
    }
}

fn format(common: &Common) -> Result<Format, Exit> {
    if let Some(f) = &common.format {
        return Ok(f.parse()?);
    }
    let csv = common
        .out
        .as_ref()
        .and_then(|p| p.extension())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if csv { Format::Csv } else { Format::Json })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Exit> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Exit::config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `<out>.worst.json`, or `qel.worst.json` when the report goes to stdout.
fn worst_path(out: Option<&Path>) -> PathBuf {
    let mut name = out
        .map(|p| p.as_os_str().to_owned())
        .unwrap_or_else(|| "qel".into());
    name.push(".worst.json");
    PathBuf::from(name)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Exit> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Exit::config(e))?;
    s.push('\n');
    Ok(s)
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::config(format!("cannot read {}: {e}", path.display())))
}

fn suite_config(checkers: Vec<Checker>, common: &Common) -> Result<SuiteConfig, Exit> {
    let mut cfg = SuiteConfig::new(checkers, &common.dims, common.trials, seed(common)?);
    cfg.tolerance = common.tol;
    cfg.eps = common.eps;
    Ok(cfg)
}

/// Runs `cfg`, writes the report, dumps the worst failing instance.
fn run_and_report(cfg: &SuiteConfig, common: &Common) -> Outcome {
    let report = suite::run_suite(cfg)?;
    write_report(&report, common, common.out.as_deref())?;
    finish(&report, cfg, common)
}

fn write_report(report: &SuiteReport, common: &Common, out: Option<&Path>) -> Result<(), Exit> {
    let text = report::render(format(common)?, report.records.iter().map(|(c, v)| (c.name(), v)))?;
    write_out(out, &text)
}

/// Summary lines on stderr; exit 1 with a worst-instance dump on failure.
fn finish(report: &SuiteReport, cfg: &SuiteConfig, common: &Common) -> Outcome {
    for s in &report.summaries {
        eprintln!("{s}");
    }
    for e in &report.errors {
        eprintln!("error in {} trial {}: {}", e.checker, e.trial, e.message);
    }
    let min = report
        .summaries
        .iter()
        .map(|s| s.min_slack)
        .fold(f64::INFINITY, f64::min);
    let total = report.records.len();
    let passed = report.verdicts().filter(|v| v.pass()).count();
    eprintln!("summary: {passed}/{total} passed, min slack {min:+.3e}");
    match report.worst_failure() {
        None => Ok(0),
        Some((checker, trial)) => {
            let path = worst_path(common.out.as_deref());
            let inst = suite::generate(checker, cfg, trial)?;
            write_out(Some(&path), &inst.to_json()?)?;
            eprintln!("worst failure: {checker} trial {trial}, dumped to {}", path.display());
            Ok(1)
        }
    }
}

fn cmd_check(args: CheckArgs) -> Outcome {
    if let Some(file) = &args.replay {
        return cmd_replay(file);
    }
    let mut cfg = suite_config(suite::parse_suite(&args.suite)?, &args.common)?;
    cfg.alpha = args.alpha;
    cfg.n_max = args.nmax;
    if let Some(t) = args.t_samples {
        cfg.t_samples = t;
    }
    run_and_report(&cfg, &args.common)
}

#[derive(Serialize)]
struct MarkovReport {
    dims: Vec<usize>,
    blocks: usize,
    verdict: Verdict,
}

fn cmd_markov(args: MarkovArgs) -> Outcome {
    let text = read(&args.spec)?;
    let json: MarkovSpecJson =
        serde_json::from_str(&text).map_err(|e| Exit::config(format!("malformed spec: {e}")))?;
    let spec = json.build()?;
    let state = markov_state(&spec)?;
    let t = args.t_samples.unwrap_or_else(|| DEFAULT_T_SAMPLES.to_vec());
    let ssa = qel_core::lab::check_ssa_strengthened(&state, tol::INEQ)?;
    let distance = ssa.quantities.get("omega_trace_distance").copied().unwrap_or(f64::NAN);
    let check = markov_characterizations(&state, &t)?.with("omega_trace_distance", distance);
    let check = check.with_meta(Meta::dims(state.dims()));
    let pass = check.pass;
    for (k, v) in &check.quantities {
        eprintln!("{k:<22} {v:.3e}");
    }
    let out = MarkovReport {
        dims: state.dims().to_vec(),
        blocks: spec.blocks().len(),
        verdict: check.into(),
    };
    write_out(args.out.as_deref(), &to_json(&out)?)?;
    Ok(if pass { 0 } else { 1 })
}

fn print_trotter_table(label: &str, res: &TrotterResult, tolerance: f64) {
    println!("# {label}  Tr Omega = {:.15}", res.trace_omega);
    println!("{:>6} {:>20} {:>14}", "n", "t_n", "t_n - Tr Omega");
    for (n, t) in res.n_values.iter().zip(&res.t_values) {
        let flag = if *t > 1.0 + tolerance { "  exceeds 1" } else { "" };
        println!("{n:>6} {t:>20.15} {:>14.6e}{flag}", t - res.trace_omega);
    }
}

/// Prints an `(n, t_n, t_n − Tr Ω)` table per trial; the structured report
/// is written only with `--out`.
fn cmd_trotter(args: TrotterArgs) -> Outcome {
    let common = &args.common;
    if args.nmax == 0 {
        return Err(Exit::config("--nmax must be ≥ 1"));
    }
    let Some(path) = &args.state else {
        let mut cfg = suite_config(vec![Checker::Trotter], common)?;
        cfg.n_max = args.nmax;
        let report = suite::run_suite(&cfg)?;
        for (_, v) in &report.records {
            if let Verdict::Trotter(res) = v {
                print_trotter_table(&format!("trial {}", res.meta.trial.unwrap_or(0)), res, cfg.tolerance);
            }
        }
        if common.out.is_some() {
            write_report(&report, common, common.out.as_deref())?;
        }
        return finish(&report, &cfg, common);
    };
    let json = serde_json::from_str(&read(path)?).map_err(|e| Exit::config(format!("malformed state: {e}")))?;
    let state = MultipartiteState::from_json(&json)?;
    let res = trotter_sequence(&state, &suite::power_grid(args.nmax), common.tol)?;
    print_trotter_table(&path.display().to_string(), &res, common.tol);
    let pass = res.pass;
    if let Some(out) = &common.out {
        let verdict: Verdict = res.into();
        write_out(Some(out), &report::render(format(common)?, [("trotter", &verdict)])?)?;
    }
    Ok(if pass { 0 } else { 1 })
}

fn cmd_explore(args: ExploreArgs) -> Outcome {
    let kind: ConjectureKind = args.kind.parse()?;
    let ensemble: Ensemble = args.ensemble.parse()?;
    let common = &args.common;
    let mut cfg = ExploreConfig::new(kind, common.trials, &common.dims, seed(common)?);
    cfg.ensemble = ensemble;
    cfg.eps = common.eps;
    cfg.tolerance = common.tol;
    cfg.n_max = args.nmax;
    let ex = explore_conjecture(&cfg)?;
    write_out(common.out.as_deref(), &to_json(&ex)?)?;
    eprintln!(
        "{kind}: {} completed, {} failed, min slack {:+.3e}, mean {:+.3e}, max {:+.3e}",
        ex.completed, ex.failed, ex.min_slack, ex.mean_slack, ex.max_slack
    );
    let peak = ex.histogram.counts.iter().copied().max().unwrap_or(0).max(1);
    for (i, count) in ex.histogram.counts.iter().enumerate() {
        let bar = "#".repeat((40 * count / peak) as usize);
        eprintln!("  [{:+.3e}, {:+.3e}) {count:>7} {bar}", ex.histogram.edges[i], ex.histogram.edges[i + 1]);
    }
    if let Some(worst) = &ex.worst {
        let path = worst_path(common.out.as_deref());
        let dump = ExploreDump {
            config: cfg.clone(),
            instance: worst.clone(),
        };
        write_out(Some(&path), &to_json(&dump)?)?;
        eprintln!("worst trial {} dumped to {}", worst.trial, path.display());
    }
    if ex.candidates.is_empty() {
        Ok(0)
    } else {
        eprintln!("{} candidate counterexample(s) below {:.1e}", ex.candidates.len(), -10.0 * cfg.tolerance);
        Ok(3)
    }
}

fn cmd_replay(file: &Path) -> Outcome {
    let text = read(file)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Exit::config(format!("malformed instance: {e}")))?;
    if value.get("checker").is_some() {
        let inst = Instance::from_json(&text)?;
        let verdict = suite::evaluate(&inst)?;
        print!("{}", report::to_json([(inst.checker.as_str(), &verdict)])?);
        eprintln!("{} trial {}: slack {:+.3e}, pass {}", inst.checker, inst.trial, verdict.slack(), verdict.pass());
        Ok(if verdict.pass() { 0 } else { 1 })
    } else if value.get("config").is_some() {
        let dump: ExploreDump =
            serde_json::from_value(value).map_err(|e| Exit::config(format!("malformed dump: {e}")))?;
        let slack = replay_exploration(&dump)?;
        println!("{}", serde_json::json!({ "kind": dump.config.kind, "trial": dump.instance.trial, "slack": slack }));
        let flagged = slack < -10.0 * dump.config.tolerance;
        Ok(if flagged { 3 } else { 0 })
    } else {
        Err(Exit::config("file is neither a suite instance nor an exploration dump"))
    }
}

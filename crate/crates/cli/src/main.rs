use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use causal_design::bench::{
    self, ExperimentConfig, ExperimentOutput, LearnerKind, Strategy, SymbolicBatch,
};
use causal_design::design::{greedy_design, GreedyResult, MiUtility};
use causal_design::graph::InterventionFamily;
use causal_design::posterior::{dag_bootstrap_with, TargetFunctional, UniformPrior};
use causal_design::sem::{Dataset, NoiseModel};
use causal_design::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "causal-design", version, about = "Budgeted experimental design for causal structure learning")]
struct Cli {
    /// Suppress the human-readable summary on stdout.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation study described by a TOML or JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Recommend the next batch of interventions for a dataset.
    DesignNext {
        /// CSV with columns x0..x{p-1} and target.
        #[arg(long)]
        data: PathBuf,
        /// `singles` or an explicit list such as `{0};{1,2}`.
        #[arg(long)]
        family: String,
        /// `full`, `edge:i,j`, `orient:i,j`, `desc:i` or `parents:i`.
        #[arg(long)]
        functional: String,
        /// Samples in the batch.
        #[arg(long)]
        nb: usize,
        /// Distinct targets in the batch; unlimited when omitted.
        #[arg(long)]
        k: Option<usize>,
        /// Bootstrap resamples.
        #[arg(long, default_value_t = 20)]
        t: usize,
        /// Synthetic datasets per ensemble member.
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = LearnerArg::Auto)]
        learner: LearnerArg,
        /// Treat every noise variance as known and equal to this value.
        #[arg(long)]
        noise_variance: Option<f64>,
        /// Write the design, estimate and trace as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-candidate utility trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Regenerate the data behind one of the fixed scenarios.
    Replicate {
        #[arg(value_enum)]
        name: Scenario,
        #[arg(long)]
        out: PathBuf,
        /// Replicates for the stochastic scenarios.
        #[arg(long, default_value_t = 50)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerArg {
    Auto,
    Exhaustive,
    HillClimb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Bisection,
    Boxplot,
    ErCurves,
    Counterexample,
    Consistency,
}

/// A failure with its exit code: 1 for runtime and data problems, 2 for
/// usage and configuration problems.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
    fn runtime(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidConfig(_)
            | Error::InvalidBudget(_)
            | Error::InvalidFamily(_)
            | Error::NodeOutOfRange { .. }
            | Error::TooManyNodes { .. }
            | Error::Cycle { .. }
            | Error::InvalidGraph(_)
            | Error::NotConservative { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Simulate { config, out, seed, threads } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = ExperimentConfig::from_str_any(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let output = with_threads(threads, || bench::run_experiment(&cfg))??;
            bench::write_outputs(&output, &out)?;
            say(quiet, &summary_table(&output));
            Ok(())
        }
        Command::DesignNext { data, family, functional, nb, k, t, m, seed, learner, noise_variance, out, trace, threads } => {
            let f: TargetFunctional = functional.parse().map_err(|e: Error| Failure::usage(e.to_string()))?;
            let noise = match noise_variance {
                Some(v) if v > 0.0 && v.is_finite() => NoiseModel::Known(v),
                Some(v) => return Err(Failure::usage(format!("noise variance must be positive, got {v}"))),
                None => NoiseModel::Estimated,
            };
            if t == 0 || m == 0 {
                return Err(Failure::usage("--t and --m must be at least 1"));
            }
            let dataset = read_dataset(&data)?;
            let p = dataset.p();
            let family = InterventionFamily::parse_spec(&family, p)?;
            f.validate(p)?;
            let kind = match learner {
                LearnerArg::Auto => LearnerKind::Auto,
                LearnerArg::Exhaustive => LearnerKind::Exhaustive,
                LearnerArg::HillClimb => LearnerKind::HillClimb,
            };
            let result = with_threads(threads, || -> causal_design::Result<(f64, GreedyResult)> {
                let learner = bench::make_learner(kind, p, noise)?;
                let ens = dag_bootstrap_with(&dataset, t, learner.as_ref(), seed, noise, &UniformPrior)?;
                let u = MiUtility::new(&ens, f, m, seed);
                Ok((u.prior_entropy(), greedy_design(&u, nb, &family, k)?))
            })??;
            let (prior_entropy, greedy) = result;
            if let Some(path) = out {
                let report = DesignReport {
                    design: &greedy.design,
                    prior_entropy,
                    utility: greedy.estimate.value,
                    std_error: greedy.estimate.std_error,
                    trace: &greedy.trace,
                };
                write_file(&path, serde_json::to_string_pretty(&report).expect("serialisable") + "\n")?;
            }
            if let Some(path) = trace {
                write_file(&path, trace_csv(&greedy))?;
            }
            say(quiet, &design_table(prior_entropy, &greedy));
            Ok(())
        }
        Command::Replicate { name, out, replicates, seed, threads } => {
            if replicates == 0 {
                return Err(Failure::usage("--replicates must be at least 1"));
            }
            fs::create_dir_all(&out)?;
            let text = with_threads(threads, || replicate(name, &out, replicates, seed))??;
            say(quiet, &text);
            Ok(())
        }
    }
}

fn say(quiet: bool, text: &str) {
    if !quiet {
        print!("{text}");
    }
}

fn write_file(path: &Path, contents: String) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Failure::usage("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::runtime(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    if threads == Some(0) {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    Ok(f())
}

/// Empty files and header-only files are data failures (exit 1); malformed
/// files are schema violations (exit 2).
fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Failure::runtime(format!("cannot read {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(Failure::runtime(format!("{} is empty", path.display())));
    }
    let data = Dataset::read_csv(text.as_bytes()).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    if data.is_empty() {
        return Err(Failure::runtime(format!("{} has no data rows", path.display())));
    }
    Ok(data)
}

#[derive(Serialize)]
struct DesignReport<'a> {
    design: &'a causal_design::sem::Design,
    prior_entropy: f64,
    utility: f64,
    std_error: f64,
    trace: &'a [causal_design::design::TraceEntry],
}

fn design_table(prior_entropy: f64, g: &GreedyResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "prior entropy: {prior_entropy:.6} bits");
    let _ = writeln!(s, "estimated utility: {:.6} ± {:.6} bits", g.estimate.value, g.estimate.std_error);
    let _ = writeln!(s, "recommended design:");
    for (t, c) in g.design.iter() {
        let _ = writeln!(s, "  {t}\t{c}");
    }
    let _ = writeln!(s, "trace (step, target, count, utility, se):");
    for e in &g.trace {
        let _ = writeln!(s, "  {}\t{}\t{}\t{:.6}\t{:.6}", e.step, e.target, e.count, e.value, e.std_error);
    }
    s
}

fn trace_csv(g: &GreedyResult) -> String {
    let mut s = String::from("step,target,count,value,std_error\n");
    for e in &g.trace {
        let _ = writeln!(s, "{},{},{},{:?},{:?}", e.step, e.target.encode(), e.count, e.value, e.std_error);
    }
    s
}

fn summary_table(out: &ExperimentOutput) -> String {
    let mut s = String::from("strategy\tbatch\tn\tmean\tq1\tmedian\tq3\n");
    for r in &out.summary {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
            r.strategy.name(),
            r.batch,
            r.n,
            r.mean,
            r.q1,
            r.median,
            r.q3
        );
    }
    s
}

fn symbolic_table(title: &str, run: &[SymbolicBatch]) -> String {
    let mut s = format!("{title}\n");
    for b in run {
        let scores: Vec<String> = b
            .scores
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{{{}}}:{}", i + 1, fmt_score(*v)))
            .collect();
        let _ = writeln!(
            s,
            "  batch {}: select {}  entropy {} bits  scores ({})",
            b.batch,
            b.selected.label_one_based(),
            fmt_score(b.entropy),
            scores.join(", ")
        );
    }
    s
}

fn fmt_score(v: f64) -> String {
    if v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.4}")
    }
}

fn json_file<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_file(path, serde_json::to_string_pretty(value).expect("serialisable") + "\n")
}

fn replicate(name: Scenario, out: &Path, replicates: usize, seed: u64) -> CliResult<String> {
    match name {
        Scenario::Bisection => {
            let run = bench::bisection_demo(15, 15)?;
            json_file(&out.join("bisection.json"), &run)?;
            Ok(symbolic_table("chain p=15, one intervention per batch, infinite samples (1-based labels)", &run))
        }
        Scenario::Counterexample => {
            let r = bench::counterexample_repro(5)?;
            json_file(&out.join("counterexample.json"), &r)?;
            Ok(symbolic_table("edge-orientation utility (1-based labels)", &r.meek)
                + &symbolic_table("infinite-sample entropy utility (1-based labels)", &r.infinite))
        }
        Scenario::Boxplot => {
            let cfg = bench::boxplot_config(replicates, seed);
            let output = bench::run_experiment(&cfg)?;
            bench::write_outputs(&output, out)?;
            let (wins, losses) = paired(&output, Strategy::Abcd, Strategy::Random);
            Ok(summary_table(&output)
                + &format!("abcd beats random in {wins} of {} untied replicates, sign test p = {:.3e}\n", wins + losses, bench::sign_test(wins, losses)))
        }
        Scenario::ErCurves => {
            let mut text = String::new();
            for b in 1..=3 {
                let cfg = bench::er_curves_config(b, replicates, seed);
                let output = bench::run_experiment(&cfg)?;
                bench::write_outputs(&output, &out.join(format!("b{b}")))?;
                let _ = writeln!(text, "B = {b}");
                text += &summary_table(&output);
            }
            Ok(text)
        }
        Scenario::Consistency => {
            let cfg = bench::consistency_config(4, 25, 8, replicates, seed);
            let chain = bench::run_experiment(&cfg)?;
            bench::write_outputs(&chain, &out.join("chain"))?;
            let above = chain.results.iter().filter(|r| r.truth_mass.last().is_some_and(|&m| m > 0.95)).count();
            let meek = bench::run_experiment(&bench::meek_plateau_config(400, 6, replicates, seed))?;
            bench::write_outputs(&meek, &out.join("meek-plateau"))?;
            let finals: Vec<f64> = meek.results.iter().filter_map(|r| r.truth_mass.last().copied()).collect();
            let mean = finals.iter().sum::<f64>() / finals.len() as f64;
            Ok(format!(
                "chain p=4: mass on the true DAG > 0.95 after batch 8 in {above} of {replicates} replicates\n\
                 edge-orientation strategy on the four-node counterexample: mean final mass on the true DAG {mean:.4}\n"
            ))
        }
    }
}

/// Replicates where `a` ends with a strictly larger (smaller) entropy reduction than `b`.
fn paired(out: &ExperimentOutput, a: Strategy, b: Strategy) -> (usize, usize) {
    let red = |s: Strategy| -> Vec<f64> {
        out.results.iter().filter(|r| r.strategy == s).map(|r| r.entropy_reduction).collect()
    };
    let (x, y) = (red(a), red(b));
    let wins = x.iter().zip(&y).filter(|(p, q)| p > q).count();
    let losses = x.iter().zip(&y).filter(|(p, q)| p < q).count();
    (wins, losses)
}

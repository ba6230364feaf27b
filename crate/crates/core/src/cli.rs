//! The `rhsec` experiment driver.
//!
//! Every subcommand reads its inputs from flags, an optional `--config`
//! JSON file, and built-in defaults, in that order of precedence. Results go
//! to `--out` (stdout by default) as CSV or JSON; a one-line human summary
//! goes to stderr. All randomness derives from `--seed` (default
//! [`DEFAULT_SEED`]): Monte Carlo shard `k` uses stream `k` of the seed, and
//! learning trial `k` likewise uses stream `k`.
//!
//! Exit codes: 0 success, 2 usage, 3 malformed input file, 4 parameter out
//! of range, 5 I/O failure.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::dist::{DistributionSpec, HorizonDistribution};
use crate::error::Error;
use crate::learn::{self, SampleBudget};
use crate::meta::{self, PerformanceProfile, ProfileFn};
use crate::sim::{self, StockPolicy};
use crate::solver;
use crate::strategy::{self, MixtureSpec, Strategy, StrategySpec};

/// Seed used when neither `--seed` nor the config file sets one.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "rhsec",
    version,
    about = "Secretary problems with a random horizon: solve, learn, simulate"
)]
pub struct ExperimentConfig {
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with default parameter values (flags take precedence).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write a tidy CSV sweep for plotting (learn, avgcase, meta).
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Exact success probability of a strategy, threshold or mixture.
    Eval {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, conflicts_with_all = ["threshold", "mixture"])]
        strategy: Option<PathBuf>,
        #[arg(long, conflicts_with = "mixture")]
        threshold: Option<usize>,
        #[arg(long)]
        mixture: Option<PathBuf>,
    },
    /// Optimal strategy, θ(p), K* and the single-threshold approximation.
    Solve {
        #[arg(long)]
        dist: PathBuf,
    },
    /// Minimax threshold mixture for N ≤ n̄ (or E[N] ≤ μ̄).
    Minimax {
        #[arg(long, conflicts_with = "mubar")]
        nbar: Option<usize>,
        #[arg(long)]
        mubar: Option<f64>,
        /// Evaluate the mixture on this distribution.
        #[arg(long)]
        dist: Option<PathBuf>,
    },
    /// Learn a strategy from samples and score it against the optimum.
    Learn {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Known tail horizon T; when absent T is estimated from samples.
        #[arg(long)]
        t: Option<usize>,
        /// Fixed sample count (overrides the bound).
        #[arg(long)]
        m: Option<usize>,
        /// Epsilon values for the --plot sweep.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
    },
    /// Monte Carlo of a strategy or stock policy.
    Simulate {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, conflicts_with_all = ["strategy", "policy"])]
        threshold: Option<usize>,
        #[arg(long, conflicts_with = "policy")]
        strategy: Option<PathBuf>,
        /// accept-first | classical | minimax | sqrt | non-best
        #[arg(long)]
        policy: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Stock policies against the adaptive adversary.
    Adversary {
        #[arg(long)]
        n: Option<usize>,
        /// Policies to test (default: classical,minimax,sqrt).
        #[arg(long, value_delimiter = ',')]
        policy: Option<Vec<String>>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Fraction of random p on the n-simplex where q^(⌈n/e²⌉) scores ≤ ε.
    Avgcase {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        draws: Option<u64>,
        /// Values of n for the --plot sweep.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
    },
    /// Horizon-randomization mixture for a black-box performance profile.
    Meta {
        /// identity | uniform-max | exp-max | table:<file>
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        c0: Option<f64>,
        #[arg(long)]
        nlo: Option<usize>,
        #[arg(long)]
        nhi: Option<usize>,
    },
    /// Two-point hard instances for learning from samples.
    Lowerbound {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

/// Values a `--config` file may provide.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub trials: Option<u64>,
    pub draws: Option<u64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub n: Option<usize>,
    pub nbar: Option<usize>,
    pub profile: Option<String>,
    pub c0: Option<f64>,
    pub nlo: Option<usize>,
    pub nhi: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Malformed(String),
    Range(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Malformed(_) => 3,
            CliError::Range(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Range(m) => write!(f, "out of range: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. } => CliError::Range(e.to_string()),
            Error::InvalidDistribution(_) | Error::InvalidStrategy(_) => {
                CliError::Malformed(e.to_string())
            }
            Error::DoubleAccept { .. } => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Header plus rows, every cell already rendered.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub summary: String,
    pub plot: Option<Table>,
    pub default_format: Format,
}

fn cell<T: Display>(v: T) -> String {
    v.to_string()
}

fn io_err(path: &Path, e: impl Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

pub fn load_distribution(path: &Path) -> CliResult<HorizonDistribution> {
    let spec: DistributionSpec = read_json(path)?;
    spec.build().map_err(|e| match e {
        Error::OutOfRange { .. } => CliError::Range(format!("{}: {e}", path.display())),
        other => CliError::Malformed(format!("{}: {other}", path.display())),
    })
}

fn load_strategy(path: &Path, n: usize) -> CliResult<Strategy> {
    let spec: StrategySpec = read_json(path)?;
    spec.build(n)
        .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TableFile {
    Plain(Vec<f64>),
    Ranged { start: usize, values: Vec<f64> },
}

fn load_profile(name: &str) -> CliResult<ProfileFn> {
    if let Some(path) = name.strip_prefix("table:") {
        let t: TableFile = read_json(Path::new(path))?;
        return Ok(match t {
            TableFile::Plain(values) => ProfileFn::Table { start: 1, values },
            TableFile::Ranged { start, values } => ProfileFn::Table { start, values },
        });
    }
    ProfileFn::by_name(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown profile `{name}` (expected identity, uniform-max, exp-max or table:<file>)"
        ))
    })
}

fn q_string(q: &Strategy) -> String {
    q.values().iter().map(cell).collect::<Vec<_>>().join(";")
}

/// Parameters after applying flag > file > default precedence.
struct Resolved {
    seed: u64,
    file: FileConfig,
}

impl Resolved {
    fn pick<T: Copy>(&self, flag: Option<T>, file: Option<T>, default: T) -> T {
        flag.or(file).unwrap_or(default)
    }
}

/// Runs one subcommand and returns its report without writing anything.
pub fn run(config: &ExperimentConfig) -> CliResult<Report> {
    let file = match &config.config {
        Some(path) => read_json::<FileConfig>(path)?,
        None => FileConfig::default(),
    };
    let r = Resolved {
        seed: config.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        file,
    };
    match &config.command {
        Command::Eval {
            dist,
            strategy,
            threshold,
            mixture,
        } => cmd_eval(dist, strategy.as_deref(), *threshold, mixture.as_deref()),
        Command::Solve { dist } => cmd_solve(dist),
        Command::Minimax { nbar, mubar, dist } => {
            cmd_minimax(nbar.or(r.file.nbar), *mubar, dist.as_deref())
        }
        Command::Learn {
            dist,
            epsilon,
            delta,
            trials,
            t,
            m,
            sweep,
        } => {
            let eps = r.pick(*epsilon, r.file.epsilon, 0.1);
            let del = r.pick(*delta, r.file.delta, 0.1);
            let tr = r.pick(*trials, r.file.trials, 200);
            cmd_learn(
                &r,
                dist,
                eps,
                del,
                tr,
                *t,
                *m,
                sweep.as_deref(),
                config.plot.is_some(),
            )
        }
        Command::Simulate {
            dist,
            threshold,
            strategy,
            policy,
            trials,
        } => {
            let tr = r.pick(*trials, r.file.trials, 100_000);
            cmd_simulate(
                &r,
                dist,
                *threshold,
                strategy.as_deref(),
                policy.as_deref(),
                tr,
            )
        }
        Command::Adversary { n, policy, trials } => {
            let n = r.pick(*n, r.file.n, 100);
            let tr = r.pick(*trials, r.file.trials, 100_000);
            cmd_adversary(&r, n, policy.as_deref(), tr)
        }
        Command::Avgcase {
            n,
            epsilon,
            draws,
            sweep,
        } => {
            let n = r.pick(*n, r.file.n, 100);
            let eps = r.pick(*epsilon, r.file.epsilon, 0.03);
            let d = r.pick(*draws, r.file.draws, 10_000);
            cmd_avgcase(&r, n, eps, d, sweep.as_deref())
        }
        Command::Meta {
            profile,
            c0,
            nlo,
            nhi,
        } => {
            let prof = profile
                .clone()
                .or_else(|| r.file.profile.clone())
                .unwrap_or_else(|| "identity".into());
            let c0 = r.pick(*c0, r.file.c0, 1.0);
            let nlo = r.pick(*nlo, r.file.nlo, 1);
            let nhi = r.pick(*nhi, r.file.nhi, 100);
            cmd_meta(&prof, c0, nlo, nhi)
        }
        Command::Lowerbound { n, epsilon } => {
            let n = r.pick(*n, r.file.n, 200);
            let eps = r.pick(*epsilon, r.file.epsilon, 0.02);
            cmd_lowerbound(n, eps)
        }
    }
    .map(|mut rep| {
        if let Value::Object(map) = &mut rep.json {
            map.insert(
                "metadata".into(),
                json!({
                    "command": command_name(&config.command),
                    "seed": r.seed,
                    "version": env!("CARGO_PKG_VERSION"),
                }),
            );
        }
        if let Some(fmt) = r.file.format {
            rep.default_format = fmt;
        }
        rep
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Solve { .. } => "solve",
        Command::Minimax { .. } => "minimax",
        Command::Learn { .. } => "learn",
        Command::Simulate { .. } => "simulate",
        Command::Adversary { .. } => "adversary",
        Command::Avgcase { .. } => "avgcase",
        Command::Meta { .. } => "meta",
        Command::Lowerbound { .. } => "lowerbound",
    }
}

fn cmd_eval(
    dist: &Path,
    strategy: Option<&Path>,
    threshold: Option<usize>,
    mixture: Option<&Path>,
) -> CliResult<Report> {
    let p = load_distribution(dist)?;
    let n = p.len();
    let (kind, value, pform) = if let Some(path) = mixture {
        let mix = read_json::<MixtureSpec>(path)?
            .build()
            .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        (
            "mixture",
            strategy::mixture_success_probability(&p, &mix),
            None,
        )
    } else {
        let q = match (strategy, threshold) {
            (Some(path), _) => load_strategy(path, n)?,
            (None, Some(l)) => Strategy::single_threshold(l, n.max(l))?,
            (None, None) => {
                return Err(CliError::Usage(
                    "eval needs one of --strategy, --threshold or --mixture".into(),
                ))
            }
        };
        (
            "strategy",
            strategy::success_probability(&p, &q),
            Some(strategy::success_probability_pform(&p, &q)),
        )
    };
    let th = solver::theta(&p);
    let mut table = Table::new(&["kind", "value", "value_pform", "theta"]);
    table.push(vec![
        kind.into(),
        cell(value),
        pform.map(cell).unwrap_or_default(),
        cell(th.theta),
    ]);
    Ok(Report {
        json: json!({ "kind": kind, "value": value, "value_pform": pform, "theta": th.theta }),
        table,
        summary: format!("A(p, {kind}) = {value:.6}"),
        plot: None,
        default_format: Format::Json,
    })
}

fn cmd_solve(dist: &Path) -> CliResult<Report> {
    let p = load_distribution(dist)?;
    let sol = solver::solve_optimal(&p);
    let th = solver::theta(&p);
    let (_, cutoff, tv) = solver::single_threshold_approx_detail(&p);
    let (best_l, best_v) = solver::best_single_threshold(&p);
    let mut table = Table::new(&[
        "value",
        "theta",
        "k_star",
        "threshold",
        "threshold_value",
        "best_threshold",
        "best_threshold_value",
        "q_opt",
    ]);
    table.push(vec![
        cell(sol.value),
        cell(th.theta),
        cell(th.k_star),
        cell(cutoff),
        cell(tv),
        cell(best_l),
        cell(best_v),
        q_string(&sol.q_opt),
    ]);
    Ok(Report {
        json: json!({
            "q_opt": sol.q_opt.values(),
            "value": sol.value,
            "theta": th.theta,
            "k_star": th.k_star,
            "threshold": cutoff,
            "threshold_value": tv,
            "best_threshold": best_l,
            "best_threshold_value": best_v,
        }),
        table,
        summary: format!(
            "optimal value {:.6}, theta {:.6} (K* = {}), threshold {} gets {:.6}",
            sol.value, th.theta, th.k_star, cutoff, tv
        ),
        plot: None,
        default_format: Format::Json,
    })
}

fn cmd_minimax(nbar: Option<usize>, mubar: Option<f64>, dist: Option<&Path>) -> CliResult<Report> {
    let (n, guarantee) = match (nbar, mubar) {
        (_, Some(mu)) => (
            solver::expected_bound_support(mu)?,
            solver::expected_bound_guarantee(mu)?,
        ),
        (Some(n), None) => {
            if n == 0 {
                return Err(CliError::Range("nbar must be >= 1".into()));
            }
            (n, solver::minimax_value(n))
        }
        (None, None) => return Err(CliError::Usage("minimax needs --nbar or --mubar".into())),
    };
    let mix = solver::minimax_mixture(n)?;
    let rate = match dist {
        Some(path) => Some(strategy::mixture_success_probability(
            &load_distribution(path)?,
            &mix,
        )),
        None => None,
    };
    let mut table = Table::new(&["l", "weight"]);
    for (i, w) in mix.weights().iter().enumerate() {
        table.push(vec![cell(i + 1), cell(w)]);
    }
    Ok(Report {
        json: json!({
            "n": n,
            "weights": mix.weights(),
            "guarantee": guarantee,
            "rate": rate,
        }),
        table,
        summary: match rate {
            Some(v) => {
                format!("mixture over {n} thresholds: guarantee {guarantee:.6}, rate {v:.6}")
            }
            None => format!("mixture over {n} thresholds: guarantee {guarantee:.6}"),
        },
        plot: None,
        default_format: Format::Json,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_learn(
    r: &Resolved,
    dist: &Path,
    epsilon: f64,
    delta: f64,
    trials: u64,
    t: Option<usize>,
    m: Option<usize>,
    sweep: Option<&[f64]>,
    want_plot: bool,
) -> CliResult<Report> {
    let p = load_distribution(dist)?;
    if trials == 0 {
        return Err(CliError::Range("trials must be >= 1".into()));
    }
    let budget_for = |eps: f64| -> CliResult<SampleBudget> {
        Ok(match (m, t) {
            (Some(m), _) => SampleBudget::Fixed(m),
            (None, Some(t)) => SampleBudget::Fixed(learn::sample_size_bound(eps, delta, t)?),
            (None, None) => SampleBudget::EstimatedTail,
        })
    };
    let rows = learn::learning_trials(&p, epsilon, delta, trials, budget_for(epsilon)?, r.seed)?;
    let mut table = Table::new(&["trial", "m", "value_hat", "value_opt", "gap", "pass"]);
    for row in &rows {
        table.push(vec![
            cell(row.trial),
            cell(row.m),
            cell(row.value_hat),
            cell(row.value_opt),
            cell(row.gap),
            cell(row.pass),
        ]);
    }
    let pass_rate = rows.iter().filter(|x| x.pass).count() as f64 / rows.len() as f64;
    let plot = if want_plot {
        let mut pt = Table::new(&["epsilon", "m", "pass_rate"]);
        for &eps in sweep.unwrap_or(&[epsilon]) {
            let res = learn::learning_trials(&p, eps, delta, trials, budget_for(eps)?, r.seed)?;
            let rate = res.iter().filter(|x| x.pass).count() as f64 / res.len() as f64;
            let mean_m = res.iter().map(|x| x.m as f64).sum::<f64>() / res.len() as f64;
            pt.push(vec![cell(eps), cell(mean_m), cell(rate)]);
        }
        Some(pt)
    } else {
        None
    };
    Ok(Report {
        json: json!({ "epsilon": epsilon, "delta": delta, "pass_rate": pass_rate, "trials": rows }),
        table,
        summary: format!(
            "{trials} trials, eps {epsilon}: {:.1}% within eps of the optimum",
            100.0 * pass_rate
        ),
        plot,
        default_format: Format::Csv,
    })
}

fn cmd_simulate(
    r: &Resolved,
    dist: &Path,
    threshold: Option<usize>,
    strategy: Option<&Path>,
    policy: Option<&str>,
    trials: u64,
) -> CliResult<Report> {
    let p = load_distribution(dist)?;
    let n = p.len();
    let (label, stats, exact) = if let Some(name) = policy {
        let pol = StockPolicy::by_name(name, n)?;
        let stats = sim::simulate_custom(&p, &pol, trials, r.seed)?;
        let exact = match &pol {
            StockPolicy::Randomized(r) => strategy::mixture_success_probability(&p, r.mixture()),
            StockPolicy::Strategy(s) => strategy::success_probability(&p, s.strategy()),
            StockPolicy::AcceptFirst(_) => p.lambda_sequence().get(1),
            StockPolicy::NonBest(_) => 0.0,
            StockPolicy::Skip(s) => strategy::success_probability(
                &p,
                &Strategy::single_threshold(s.k + 1, n.max(s.k + 1))?,
            ),
        };
        let exact = Some(exact);
        (name.to_string(), stats, exact)
    } else {
        let q = match (threshold, strategy) {
            (Some(l), _) => Strategy::single_threshold(l, n.max(l))?,
            (None, Some(path)) => load_strategy(path, n)?,
            (None, None) => {
                return Err(CliError::Usage(
                    "simulate needs --threshold, --strategy or --policy".into(),
                ))
            }
        };
        let stats = sim::simulate(&p, &q, trials, r.seed)?;
        (
            "strategy".to_string(),
            stats,
            Some(strategy::success_probability(&p, &q)),
        )
    };
    let within = exact.map(|e| stats.within(e, 4.0));
    let mut table = Table::new(&[
        "policy",
        "trials",
        "successes",
        "rate",
        "stderr",
        "exact",
        "within_4se",
    ]);
    table.push(vec![
        label.clone(),
        cell(stats.trials),
        cell(stats.successes),
        cell(stats.rate),
        cell(stats.stderr),
        exact.map(cell).unwrap_or_default(),
        within.map(cell).unwrap_or_default(),
    ]);
    Ok(Report {
        json: json!({
            "policy": label,
            "trials": stats.trials,
            "successes": stats.successes,
            "rate": stats.rate,
            "stderr": stats.stderr,
            "exact": exact,
            "within_4se": within,
        }),
        table,
        summary: format!("{label}: rate {:.5} ± {:.5}", stats.rate, stats.stderr),
        plot: None,
        default_format: Format::Csv,
    })
}

fn cmd_adversary(
    r: &Resolved,
    n: usize,
    policies: Option<&[String]>,
    trials: u64,
) -> CliResult<Report> {
    let default = [
        "classical".to_string(),
        "minimax".to_string(),
        "sqrt".to_string(),
    ];
    let names = policies.unwrap_or(&default);
    let bound = 1.0 / (n as f64).sqrt();
    let mut table = Table::new(&["n", "policy", "trials", "rate", "stderr", "bound", "pass"]);
    let mut rows = Vec::new();
    for name in names {
        let pol = StockPolicy::by_name(name, n)?;
        let s = sim::adversary_game(n, &pol, trials, r.seed)?;
        let pass = s.rate <= bound + 4.0 * s.stderr;
        table.push(vec![
            cell(n),
            name.clone(),
            cell(trials),
            cell(s.rate),
            cell(s.stderr),
            cell(bound),
            cell(pass),
        ]);
        rows.push(json!({ "policy": name, "rate": s.rate, "stderr": s.stderr, "pass": pass }));
    }
    let all = table.rows.iter().all(|row| row[6] == "true");
    Ok(Report {
        json: json!({ "n": n, "bound": bound, "trials": trials, "results": rows }),
        table,
        summary: format!(
            "adversary n={n}: {} policies, bound 1/sqrt(n) = {bound:.4}, {}",
            names.len(),
            if all { "all within" } else { "BOUND EXCEEDED" }
        ),
        plot: None,
        default_format: Format::Csv,
    })
}

fn cmd_avgcase(
    r: &Resolved,
    n: usize,
    eps: f64,
    draws: u64,
    sweep: Option<&[usize]>,
) -> CliResult<Report> {
    let res = sim::average_case_experiment(n, eps, draws, r.seed)?;
    let mut table = Table::new(&[
        "n",
        "epsilon",
        "draws",
        "l_star",
        "fraction_below",
        "mean_value",
        "stderr_mean",
        "uniform_value",
    ]);
    table.push(vec![
        cell(res.n),
        cell(res.epsilon),
        cell(res.draws),
        cell(res.l_star),
        cell(res.fraction_below),
        cell(res.mean_value),
        cell(res.stderr_mean),
        cell(res.uniform_value),
    ]);
    let plot = match sweep {
        Some(ns) => {
            let mut pt = Table::new(&["n", "epsilon", "fraction_below"]);
            for &k in ns {
                let x = sim::average_case_experiment(k, eps, draws, r.seed)?;
                pt.push(vec![cell(k), cell(eps), cell(x.fraction_below)]);
            }
            Some(pt)
        }
        None => {
            let mut pt = Table::new(&["n", "epsilon", "fraction_below"]);
            pt.push(vec![cell(n), cell(eps), cell(res.fraction_below)]);
            Some(pt)
        }
    };
    Ok(Report {
        json: serde_json::to_value(res).expect("plain struct serializes"),
        table,
        summary: format!(
            "n={n}: {:.4} of {draws} draws at or below {eps}; mean {:.4}",
            res.fraction_below, res.mean_value
        ),
        plot,
        default_format: Format::Csv,
    })
}

fn cmd_meta(profile: &str, c0: f64, nlo: usize, nhi: usize) -> CliResult<Report> {
    let prof = PerformanceProfile::new(c0, load_profile(profile)?)?;
    let mix = meta::meta_mixture(&prof, nlo, nhi)?;
    let log_bound = meta::meta_log_bound(&prof, nlo, nhi)?;
    let mut table = Table::new(&["n", "expected_performance", "guarantee"]);
    let mut max_dev: f64 = 0.0;
    for n in nlo..=nhi {
        let v = meta::meta_expected_performance(&mix, &prof, n)?;
        max_dev = max_dev.max((v - mix.guarantee).abs());
        table.push(vec![cell(n), cell(v), cell(mix.guarantee)]);
    }
    Ok(Report {
        json: json!({
            "profile": profile,
            "c0": c0,
            "n_lo": nlo,
            "n_hi": nhi,
            "weights": mix.weights,
            "guarantee": mix.guarantee,
            "log_bound": log_bound,
            "max_deviation": max_dev,
        }),
        plot: Some(table.clone()),
        table,
        summary: format!(
            "guarantee {:.6} (log bound {:.6}), flat to {max_dev:.1e} over [{nlo}, {nhi}]",
            mix.guarantee, log_bound
        ),
        default_format: Format::Json,
    })
}

fn cmd_lowerbound(n: usize, eps: f64) -> CliResult<Report> {
    let inst = learn::hard_instance_lb(n, eps)?;
    let sep = learn::separation_check(&inst, eps);
    let mut table = Table::new(&[
        "n",
        "epsilon",
        "s_star",
        "a_n",
        "min_samples",
        "loss_plus_on_minus",
        "loss_minus_on_plus",
        "separated",
    ]);
    table.push(vec![
        cell(n),
        cell(eps),
        cell(inst.s_star),
        cell(inst.a_n),
        cell(inst.min_samples),
        cell(sep.loss_plus_rule_on_minus),
        cell(sep.loss_minus_rule_on_plus),
        cell(sep.separated),
    ]);
    Ok(Report {
        json: json!({
            "n": n,
            "epsilon": eps,
            "s_star": inst.s_star,
            "a_n": inst.a_n,
            "min_samples": inst.min_samples,
            "loss_plus_on_minus": sep.loss_plus_rule_on_minus,
            "loss_minus_on_plus": sep.loss_minus_rule_on_plus,
            "separated": sep.separated,
            "p_plus": inst.p_plus.to_spec(),
            "p_minus": inst.p_minus.to_spec(),
        }),
        table,
        summary: format!(
            "s*_{n} = {:.6}; at eps {eps} at least {:.0} samples are needed",
            inst.s_star, inst.min_samples
        ),
        plot: None,
        default_format: Format::Json,
    })
}

/// Writes `table` as CSV (header row, LF line endings).
pub fn write_csv<W: Write>(table: &Table, w: W) -> std::io::Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wtr.write_record(&table.headers)?;
    for row in &table.rows {
        wtr.write_record(row)?;
    }
    wtr.flush()
}

/// Writes a tidy plotting table to `path`.
pub fn emit_plotdata(table: &Table, path: &Path) -> CliResult<()> {
    let f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    write_csv(table, f).map_err(|e| io_err(path, e))
}

fn render(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("json value serializes");
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&report.table, &mut buf).expect("writing to memory");
            buf
        }
    }
}

/// Runs a parsed configuration, writing all artifacts. Returns the exit code.
pub fn execute(config: &ExperimentConfig) -> CliResult<()> {
    let report = run(config)?;
    let format = config.format.unwrap_or(report.default_format);
    let bytes = render(&report, format);
    match &config.out {
        Some(path) => fs::write(path, &bytes).map_err(|e| io_err(path, e))?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
    }
    if let Some(path) = &config.plot {
        match &report.plot {
            Some(t) => emit_plotdata(t, path)?,
            None => {
                return Err(CliError::Usage(format!(
                    "--plot is not supported by `{}`",
                    command_name(&config.command)
                )))
            }
        }
    }
    eprintln!("{}", report.summary);
    Ok(())
}

/// Entry point for the binary: parses `args`, runs, and maps failures to
/// exit codes with a one-line diagnostic on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match ExperimentConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("rhsec: {}", line.trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rhsec: {e}");
            e.exit_code()
        }
    }
}

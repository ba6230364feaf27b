//! Monte Carlo of the actual arrival process.
//!
//! Each episode draws `N ~ p`, shuffles the values `1..=N`, and shows the
//! decision maker the arrivals one at a time. Success means the accepted
//! value is `N`, checked against the realized permutation; nothing here
//! uses the closed forms, so the simulator is an independent check on them.
//!
//! Trials are split into shards of [`SHARD_SIZE`]; shard `k` draws from
//! stream `k` of the master seed, so results do not depend on the thread
//! count.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::HorizonDistribution;
use crate::error::{Error, Result};
use crate::rng::{shards, stream_rng, SimRng, SHARD_SIZE};
use crate::solver::solve_optimal;
use crate::strategy::{success_probability_lambda, Strategy, ThresholdMixture};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimStats {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub stderr: f64,
}

impl SimStats {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let rate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let stderr = if trials == 0 {
            0.0
        } else {
            (rate * (1.0 - rate) / trials as f64).sqrt()
        };
        Self {
            trials,
            successes,
            rate,
            stderr,
        }
    }

    /// `|rate - target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.rate - target).abs() <= k * self.stderr
    }
}

/// One realized episode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeTrace {
    pub n_realized: usize,
    pub pick_time: Option<usize>,
    pub success: bool,
    /// `R_1..R_N` when requested (1 = best so far).
    pub relative_ranks: Option<Vec<usize>>,
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::range("trials", "must be >= 1"));
    }
    Ok(())
}

fn permutation(n: usize, rng: &mut SimRng) -> Vec<usize> {
    let mut values: Vec<usize> = (1..=n).collect();
    values.shuffle(rng);
    values
}

fn sharded<F>(trials: u64, seed: u64, f: F) -> Result<u64>
where
    F: Fn(&mut SimRng, u64) -> Result<u64> + Sync,
{
    shards(trials)
        .into_par_iter()
        .map(|(idx, len)| f(&mut stream_rng(seed, idx), len))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Empirical success rate of `Str(q)` against `N ~ p`.
pub fn simulate(p: &HorizonDistribution, q: &Strategy, trials: u64, seed: u64) -> Result<SimStats> {
    check_trials(trials)?;
    let sampler = p.sampler();
    let wins = sharded(trials, seed, |rng, len| {
        let mut wins = 0;
        for _ in 0..len {
            let n = sampler.sample(rng);
            let values = permutation(n, rng);
            let mut best = 0;
            for (idx, &x) in values.iter().enumerate() {
                if x > best {
                    best = x;
                    let u: f64 = rng.random();
                    if u < q.q(idx + 1) {
                        wins += u64::from(x == n);
                        break;
                    }
                }
            }
        }
        Ok(wins)
    })?;
    Ok(SimStats::from_counts(wins, trials))
}

/// What a rank-feedback policy sees at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub t: usize,
    /// Rank of arrival `t` among the first `t` (1 = best so far).
    pub relative_rank: usize,
    /// Time of an earlier acceptance, if any.
    pub accepted: Option<usize>,
}

/// A decision rule driven by relative ranks only.
///
/// The harness keeps calling [`decide`](RankPolicy::decide) after an
/// acceptance; returning `true` again is reported as
/// [`Error::DoubleAccept`].
pub trait RankPolicy: Clone + Send + Sync {
    fn name(&self) -> String;

    /// Start of an episode; randomized policies draw their internal state here.
    fn reset(&mut self, _rng: &mut SimRng) {}

    fn decide(&mut self, obs: &Observation, rng: &mut SimRng) -> bool;
}

/// Fenwick tree over values `1..=n`, for relative ranks in `O(log n)`.
struct RankCounter {
    tree: Vec<u32>,
}

impl RankCounter {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn insert(&mut self, mut v: usize) {
        while v < self.tree.len() {
            self.tree[v] += 1;
            v += v & v.wrapping_neg();
        }
    }

    /// Number of inserted values `≤ v`.
    fn count_le(&self, mut v: usize) -> usize {
        let mut s = 0;
        while v > 0 {
            s += self.tree[v] as usize;
            v &= v - 1;
        }
        s
    }
}

/// Plays one episode on a fixed arrival order. Arrivals stop after
/// `horizon(…)` items; `horizon` is consulted once per step with the
/// current time and the pick so far and returns the total length once it
/// is fixed, which lets the adversary commit to `N` mid-episode.
fn play<P: RankPolicy>(
    values: &[usize],
    policy: &mut P,
    rng: &mut SimRng,
    record: bool,
    mut horizon: impl FnMut(usize, Option<usize>) -> Option<usize>,
) -> Result<EpisodeTrace> {
    policy.reset(rng);
    let mut counter = RankCounter::new(values.len());
    let mut pick: Option<usize> = None;
    let mut ranks = record.then(Vec::new);
    let mut n_final = None;
    for (idx, &x) in values.iter().enumerate() {
        let t = idx + 1;
        if let Some(n) = n_final {
            if t > n {
                break;
            }
        }
        counter.insert(x);
        let relative_rank = t - counter.count_le(x) + 1;
        if let Some(r) = ranks.as_mut() {
            r.push(relative_rank);
        }
        let obs = Observation {
            t,
            relative_rank,
            accepted: pick,
        };
        if policy.decide(&obs, rng) {
            if let Some(first) = pick {
                return Err(Error::DoubleAccept { first, t });
            }
            pick = Some(t);
        }
        if n_final.is_none() {
            n_final = horizon(t, pick);
        }
    }
    let n = n_final.unwrap_or(values.len());
    let max_pos = values[..n]
        .iter()
        .enumerate()
        .max_by_key(|(_, &v)| v)
        .map(|(i, _)| i + 1);
    Ok(EpisodeTrace {
        n_realized: n,
        pick_time: pick,
        success: pick.is_some() && pick == max_pos,
        relative_ranks: ranks,
    })
}

/// One episode with `N ~ p`.
pub fn run_episode<P: RankPolicy>(
    p: &HorizonDistribution,
    policy: &mut P,
    rng: &mut SimRng,
    record_ranks: bool,
) -> Result<EpisodeTrace> {
    let n = p.sampler().sample(rng);
    let values = permutation(n, rng);
    play(&values, policy, rng, record_ranks, |_, _| Some(n))
}

/// Empirical success rate of an arbitrary rank-feedback policy.
pub fn simulate_custom<P: RankPolicy>(
    p: &HorizonDistribution,
    policy: &P,
    trials: u64,
    seed: u64,
) -> Result<SimStats> {
    check_trials(trials)?;
    let sampler = p.sampler();
    let wins = sharded(trials, seed, |rng, len| {
        let mut policy = policy.clone();
        let mut wins = 0;
        for _ in 0..len {
            let n = sampler.sample(rng);
            let values = permutation(n, rng);
            wins += u64::from(play(&values, &mut policy, rng, false, |_, _| Some(n))?.success);
        }
        Ok(wins)
    })?;
    Ok(SimStats::from_counts(wins, trials))
}

/// `⌊√n⌋`.
pub fn adversary_rounds(n: usize) -> usize {
    let mut k = (n as f64).sqrt() as usize;
    while k * k > n {
        k -= 1;
    }
    while (k + 1) * (k + 1) <= n {
        k += 1;
    }
    k
}

/// The adaptive adversary: watch the first `k = ⌊√n⌋` arrivals; if the
/// policy has picked by then the horizon is `n`, otherwise it ends right
/// after arrival `k+1` (capped at `n`).
pub fn adversary_game<P: RankPolicy>(
    n: usize,
    policy: &P,
    trials: u64,
    seed: u64,
) -> Result<SimStats> {
    if n == 0 {
        return Err(Error::range("n", "must be >= 1"));
    }
    check_trials(trials)?;
    let k = adversary_rounds(n);
    let wins = sharded(trials, seed, |rng, len| {
        let mut policy = policy.clone();
        let mut wins = 0;
        for _ in 0..len {
            let values = permutation(n, rng);
            let trace = play(&values, &mut policy, rng, false, |t, pick| {
                (t >= k).then(|| if pick.is_some() { n } else { (k + 1).min(n) })
            })?;
            wins += u64::from(trace.success);
        }
        Ok(wins)
    })?;
    Ok(SimStats::from_counts(wins, trials))
}

/// Takes the first arrival.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptFirst;

impl RankPolicy for AcceptFirst {
    fn name(&self) -> String {
        "accept-first".into()
    }
    fn decide(&mut self, obs: &Observation, _rng: &mut SimRng) -> bool {
        obs.t == 1
    }
}

/// `Str(q)` as a rank policy: take a best-so-far arrival at time `t` with
/// probability `q_t`.
#[derive(Debug, Clone)]
pub struct StrategyPolicy {
    q: Strategy,
    label: String,
}

impl StrategyPolicy {
    pub fn new(q: Strategy) -> Self {
        Self {
            q,
            label: "q-strategy".into(),
        }
    }

    /// Optimal rule for a horizon known to be exactly `n`.
    pub fn classical(n: usize) -> Result<Self> {
        let q = solve_optimal(&HorizonDistribution::delta(n)?).q_opt;
        Ok(Self {
            q,
            label: format!("classical-threshold({n})"),
        })
    }

    pub fn strategy(&self) -> &Strategy {
        &self.q
    }
}

impl RankPolicy for StrategyPolicy {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn decide(&mut self, obs: &Observation, rng: &mut SimRng) -> bool {
        if obs.accepted.is_some() || obs.relative_rank != 1 {
            return false;
        }
        let qt = self.q.q(obs.t);
        qt >= 1.0 || (qt > 0.0 && rng.random::<f64>() < qt)
    }
}

/// Draws `l` from a threshold mixture per episode, then plays `q^(l)`.
#[derive(Debug, Clone)]
pub struct RandomizedThreshold {
    mix: ThresholdMixture,
    l: usize,
}

impl RandomizedThreshold {
    pub fn new(mix: ThresholdMixture) -> Self {
        Self { mix, l: 1 }
    }

    pub fn mixture(&self) -> &ThresholdMixture {
        &self.mix
    }
}

impl RankPolicy for RandomizedThreshold {
    fn name(&self) -> String {
        format!("randomized-threshold({})", self.mix.weights().len())
    }
    fn reset(&mut self, rng: &mut SimRng) {
        self.l = self.mix.sample(rng);
    }
    fn decide(&mut self, obs: &Observation, _rng: &mut SimRng) -> bool {
        obs.accepted.is_none() && obs.relative_rank == 1 && obs.t >= self.l
    }
}

/// Takes the first best-so-far arrival after time `k`.
#[derive(Debug, Clone, Copy)]
pub struct SkipThreshold {
    pub k: usize,
}

impl RankPolicy for SkipThreshold {
    fn name(&self) -> String {
        format!("skip({})", self.k)
    }
    fn decide(&mut self, obs: &Observation, _rng: &mut SimRng) -> bool {
        obs.accepted.is_none() && obs.relative_rank == 1 && obs.t > self.k
    }
}

/// Takes the first arrival that is *not* best so far; can never win.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonBestPicker;

impl RankPolicy for NonBestPicker {
    fn name(&self) -> String {
        "non-best".into()
    }
    fn decide(&mut self, obs: &Observation, _rng: &mut SimRng) -> bool {
        obs.accepted.is_none() && obs.relative_rank > 1
    }
}

/// Wraps a closure `(observation, rng) -> accept`.
#[derive(Clone)]
pub struct FnPolicy<F> {
    label: String,
    f: F,
}

impl<F> FnPolicy<F>
where
    F: Fn(&Observation, &mut SimRng) -> bool + Clone + Send + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self {
            label: label.into(),
            f,
        }
    }
}

impl<F> RankPolicy for FnPolicy<F>
where
    F: Fn(&Observation, &mut SimRng) -> bool + Clone + Send + Sync,
{
    fn name(&self) -> String {
        self.label.clone()
    }
    fn decide(&mut self, obs: &Observation, rng: &mut SimRng) -> bool {
        (self.f)(obs, rng)
    }
}

/// The stock policies by name, for drivers that pick one at run time.
#[derive(Debug, Clone)]
pub enum StockPolicy {
    AcceptFirst(AcceptFirst),
    Strategy(StrategyPolicy),
    Randomized(RandomizedThreshold),
    Skip(SkipThreshold),
    NonBest(NonBestPicker),
}

impl StockPolicy {
    /// `accept-first`, `classical`, `minimax`, `sqrt` or `non-best`, tuned
    /// for horizon bound `n`.
    pub fn by_name(name: &str, n: usize) -> Result<Self> {
        Ok(match name {
            "accept-first" => StockPolicy::AcceptFirst(AcceptFirst),
            "classical" => StockPolicy::Strategy(StrategyPolicy::classical(n)?),
            "minimax" => StockPolicy::Randomized(RandomizedThreshold::new(
                crate::solver::minimax_mixture(n)?,
            )),
            "sqrt" => StockPolicy::Skip(SkipThreshold {
                k: adversary_rounds(n),
            }),
            "non-best" => StockPolicy::NonBest(NonBestPicker),
            other => {
                return Err(Error::range(
                    "policy",
                    format!(
                        "unknown policy `{other}` (expected accept-first, classical, minimax, sqrt, non-best)"
                    ),
                ))
            }
        })
    }

    pub const NAMES: [&'static str; 5] =
        ["accept-first", "classical", "minimax", "sqrt", "non-best"];
}

impl RankPolicy for StockPolicy {
    fn name(&self) -> String {
        match self {
            StockPolicy::AcceptFirst(p) => p.name(),
            StockPolicy::Strategy(p) => p.name(),
            StockPolicy::Randomized(p) => p.name(),
            StockPolicy::Skip(p) => p.name(),
            StockPolicy::NonBest(p) => p.name(),
        }
    }
    fn reset(&mut self, rng: &mut SimRng) {
        match self {
            StockPolicy::AcceptFirst(p) => p.reset(rng),
            StockPolicy::Strategy(p) => p.reset(rng),
            StockPolicy::Randomized(p) => p.reset(rng),
            StockPolicy::Skip(p) => p.reset(rng),
            StockPolicy::NonBest(p) => p.reset(rng),
        }
    }
    fn decide(&mut self, obs: &Observation, rng: &mut SimRng) -> bool {
        match self {
            StockPolicy::AcceptFirst(p) => p.decide(obs, rng),
            StockPolicy::Strategy(p) => p.decide(obs, rng),
            StockPolicy::Randomized(p) => p.decide(obs, rng),
            StockPolicy::Skip(p) => p.decide(obs, rng),
            StockPolicy::NonBest(p) => p.decide(obs, rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvgCaseResult {
    pub n: usize,
    pub epsilon: f64,
    pub draws: u64,
    /// `l* = ⌈n/e²⌉`.
    pub l_star: usize,
    /// Fraction of draws with `A(p, q^(l*)) ≤ ε`.
    pub fraction_below: f64,
    pub mean_value: f64,
    pub stderr_mean: f64,
    /// `A(uniform(n), q^(l*))`, the expectation of the draw values.
    pub uniform_value: f64,
}

/// `⌈n/e²⌉`.
pub fn average_case_threshold(n: usize) -> usize {
    ((n as f64 / std::f64::consts::E.powi(2)).ceil() as usize).max(1)
}

/// Draws `p ~ Uniform(Δ^(n))` and evaluates the fixed threshold
/// `q^(⌈n/e²⌉)` exactly on each draw.
pub fn average_case_experiment(
    n: usize,
    epsilon: f64,
    draws: u64,
    seed: u64,
) -> Result<AvgCaseResult> {
    if n == 0 {
        return Err(Error::range("n", "must be >= 1"));
    }
    let cap = 2.0 / std::f64::consts::E.powi(2);
    if !(epsilon > 0.0 && epsilon < cap) {
        return Err(Error::range(
            "epsilon",
            format!("need 0 < epsilon < 2/e^2, got {epsilon}"),
        ));
    }
    if draws == 0 {
        return Err(Error::range("draws", "must be >= 1"));
    }
    let l_star = average_case_threshold(n);
    let q = Strategy::single_threshold(l_star, n.max(l_star))?;
    let parts: Vec<(u64, f64, f64)> = shards(draws)
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = stream_rng(seed, idx);
            let mut below = 0;
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let p = HorizonDistribution::sample_dirichlet_uniform_with(n, &mut rng)?;
                let a = success_probability_lambda(&p.lambda_sequence(), &q);
                below += u64::from(a <= epsilon);
                s += a;
                s2 += a * a;
            }
            Ok((below, s, s2))
        })
        .collect::<Result<_>>()?;
    let below: u64 = parts.iter().map(|x| x.0).sum();
    let s: f64 = parts.iter().map(|x| x.1).sum();
    let s2: f64 = parts.iter().map(|x| x.2).sum();
    let d = draws as f64;
    let mean = s / d;
    let var = if draws > 1 {
        ((s2 - d * mean * mean) / (d - 1.0)).max(0.0)
    } else {
        0.0
    };
    let uniform = HorizonDistribution::uniform(n)?;
    Ok(AvgCaseResult {
        n,
        epsilon,
        draws,
        l_star,
        fraction_below: below as f64 / d,
        mean_value: mean,
        stderr_mean: (var / d).sqrt(),
        uniform_value: success_probability_lambda(&uniform.lambda_sequence(), &q),
    })
}

/// Number of trials per shard, re-exported for callers that size runs.
pub const TRIALS_PER_SHARD: u64 = SHARD_SIZE;

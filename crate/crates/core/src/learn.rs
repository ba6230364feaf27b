//! Learning a strategy from samples of the horizon.
//!
//! The learner never estimates `p` itself. It coarsens the support onto the
//! geometric grid `I(ρ) = {⌈ρ^l⌉ : l ≥ 0}`, estimates `i·λ_i` only at the
//! grid points, interpolates linearly inside each block, and runs the
//! backward solver on the estimate.

use rayon::prelude::*;

use crate::dist::HorizonDistribution;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::solver::{backward_solve, solve_optimal};
use crate::strategy::{success_probability, Strategy};

/// The grid `I(ρ)` truncated at a cap, as a strictly increasing list
/// `I(ρ,1) = 1 < I(ρ,2) < …`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockedIndexSet {
    rho: f64,
    indices: Vec<usize>,
}

impl BlockedIndexSet {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `I(ρ,1), I(ρ,2), …`.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `I(ρ,l)` with `I(ρ,0) = 0`.
    pub fn get(&self, l: usize) -> usize {
        if l == 0 {
            0
        } else {
            self.indices[l - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn last(&self) -> usize {
        *self.indices.last().expect("grid always contains 1")
    }

    /// Block number `l` (one-based) containing index `i`, i.e. the `l` with
    /// `I(ρ,l-1) < i ≤ I(ρ,l)`. `None` past the last grid point.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        if i == 0 {
            return None;
        }
        let pos = self.indices.partition_point(|&v| v < i);
        (pos < self.indices.len()).then_some(pos + 1)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::range("rho", format!("need rho > 1, got {rho}")));
    }
    Ok(())
}

/// Walks `⌈ρ^l⌉` for `l = 0, 1, …`, deduplicating, until `stop` says so.
fn grid_until(rho: f64, mut stop: impl FnMut(usize) -> bool) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut l: i32 = 0;
    loop {
        let x = rho.powi(l).ceil();
        // x ≥ usize::MAX or inf: nothing representable lies beyond
        if x >= usize::MAX as f64 {
            break;
        }
        let v = x as usize;
        if out.last() != Some(&v) {
            if stop(v) {
                break;
            }
            out.push(v);
        }
        l = match l.checked_add(1) {
            Some(next) => next,
            None => break,
        };
    }
    out
}

/// Distinct values of `⌈ρ^l⌉` not exceeding `cap`.
pub fn block_indices(rho: f64, cap: usize) -> Result<BlockedIndexSet> {
    check_rho(rho)?;
    if cap == 0 {
        return Err(Error::range("cap", "must be >= 1"));
    }
    Ok(BlockedIndexSet {
        rho,
        indices: grid_until(rho, |v| v > cap),
    })
}

/// Shortest prefix of `I(ρ)` whose last element is at least `target`.
pub fn block_indices_covering(rho: f64, target: usize) -> Result<BlockedIndexSet> {
    check_rho(rho)?;
    let mut done = false;
    let indices = grid_until(rho, |v| {
        if done {
            return true;
        }
        done = v >= target;
        false
    });
    Ok(BlockedIndexSet { rho, indices })
}

/// `Block(p, ρ)`: each block's mass moved to its right endpoint. The result
/// has length equal to the first grid point `≥ n`.
pub fn block_distribution(p: &HorizonDistribution, rho: f64) -> Result<HorizonDistribution> {
    let grid = block_indices_covering(rho, p.len())?;
    let mut out = vec![0.0; grid.last()];
    for l in 1..=grid.len() {
        let lo = grid.get(l - 1);
        let hi = grid.get(l);
        out[hi - 1] = (lo + 1..=hi.min(p.len())).map(|j| p.prob(j)).sum();
    }
    Ok(HorizonDistribution::from_normalized(out))
}

/// `m` iid horizons and the seed that produced them, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub samples: Vec<usize>,
    pub seed: Option<u64>,
}

impl SampleBatch {
    /// Wraps externally collected horizons.
    pub fn new(samples: Vec<usize>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::range("m", "sample batch is empty"));
        }
        if samples.contains(&0) {
            return Err(Error::range("samples", "horizons must be >= 1"));
        }
        Ok(Self {
            samples,
            seed: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max(&self) -> usize {
        self.samples.iter().copied().max().unwrap_or(0)
    }
}

/// `m` iid draws from `p` by inverse CDF, reproducible from `seed`.
pub fn draw_samples(p: &HorizonDistribution, m: usize, seed: u64) -> Result<SampleBatch> {
    if m == 0 {
        return Err(Error::range("m", "need at least one sample"));
    }
    let sampler = p.sampler();
    let mut rng = stream_rng(seed, 0);
    Ok(SampleBatch {
        samples: (0..m).map(|_| sampler.sample(&mut rng)).collect(),
        seed: Some(seed),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnOutput {
    /// Learned rule on `[1, N_max]`; past `N_max` it accepts (`q_i = 1`).
    pub q_hat: Strategy,
    /// `G_1..G_{N_max}`.
    pub g: Vec<f64>,
    pub n_max: usize,
    pub l_max: usize,
    /// Empirical blocked distribution on `[1, N_max]`.
    pub p_hat: HorizonDistribution,
    pub grid: BlockedIndexSet,
}

/// The block-based learner.
pub fn algorithm1(batch: &SampleBatch, epsilon: f64) -> Result<LearnOutput> {
    if batch.is_empty() {
        return Err(Error::range("m", "sample batch is empty"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::range(
            "epsilon",
            format!("need 0 < epsilon <= 1, got {epsilon}"),
        ));
    }
    let rho = 1.0 + epsilon / 4.0;
    let grid = block_indices_covering(rho, batch.max())?;
    let l_max = grid.len();
    let n_max = grid.last();

    let mut counts = vec![0usize; l_max];
    for &s in &batch.samples {
        let l = grid.block_of(s).expect("grid covers the sample maximum");
        counts[l - 1] += 1;
    }
    let m = batch.len() as f64;
    let mut p_hat = vec![0.0; n_max];
    for (l, &c) in counts.iter().enumerate() {
        p_hat[grid.get(l + 1) - 1] = c as f64 / m;
    }

    // λ at grid points, then G_i = i·λ_{I(ρ,l)} on each block
    let mut lam_at = vec![0.0; l_max];
    let mut acc = 0.0;
    for l in (1..=l_max).rev() {
        let k = grid.get(l);
        acc += p_hat[k - 1] / k as f64;
        lam_at[l - 1] = acc;
    }
    let mut g = vec![0.0; n_max];
    for l in 1..=l_max {
        for i in grid.get(l - 1) + 1..=grid.get(l) {
            g[i - 1] = i as f64 * lam_at[l - 1];
        }
    }
    let (q_hat, _) = backward_solve(&g);
    Ok(LearnOutput {
        q_hat,
        g,
        n_max,
        l_max,
        p_hat: HorizonDistribution::from_normalized(p_hat),
        grid,
    })
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::range(name, format!("need 0 < {name} < 1, got {v}")));
    }
    Ok(())
}

/// Sample count sufficient for an `ε`-suboptimal rule with probability
/// `1-δ`, given `P[N > T] ≤ ε/12`.
pub fn sample_size_bound(epsilon: f64, delta: f64, t: usize) -> Result<usize> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    if t == 0 {
        return Err(Error::range("T", "must be >= 1"));
    }
    let m = if t == 1 {
        18.0 / epsilon * (2.0 / delta).ln()
    } else {
        let a = 18.0 / epsilon * (50.0 * (t as f64).ln() / (epsilon * delta)).ln();
        let b = 1.0 / (2.0 * epsilon * epsilon) * (1200.0 / (epsilon * epsilon * delta)).ln();
        a.max(b)
    };
    Ok(m.ceil() as usize)
}

/// Smallest `T ≥ 1` with `P[N > T] ≤ ε/12`.
pub fn tail_horizon(p: &HorizonDistribution, epsilon: f64) -> usize {
    let budget = epsilon / 12.0;
    let mut tail = 1.0;
    for (idx, pi) in p.probs().iter().enumerate() {
        tail -= pi;
        if tail <= budget {
            return idx + 1;
        }
    }
    p.len().max(1)
}

/// Size of the first-phase batch used to estimate `T` when it is unknown.
pub fn horizon_estimate_size(epsilon: f64, delta: f64) -> Result<usize> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    Ok((12.0 / epsilon * (2.0 / delta).ln()).ceil() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhaseOutput {
    pub learned: LearnOutput,
    /// Estimated `T` (largest first-phase sample).
    pub t_hat: usize,
    pub m1: usize,
    pub m2: usize,
}

/// Learner for an unknown tail horizon: a first batch of
/// `⌈(12/ε) ln(2/δ)⌉` draws sets `T` to its maximum, then a fresh batch of
/// `sample_size_bound(ε, δ/2, T)` draws feeds [`algorithm1`]. Both phases
/// spend `δ/2` of the failure budget.
pub fn algorithm1_estimated_horizon(
    p: &HorizonDistribution,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<TwoPhaseOutput> {
    let m1 = horizon_estimate_size(epsilon, delta)?;
    let sampler = p.sampler();
    let mut rng = stream_rng(seed, 0);
    let t_hat = (0..m1).map(|_| sampler.sample(&mut rng)).max().unwrap_or(1);
    let m2 = sample_size_bound(epsilon, delta / 2.0, t_hat)?;
    let mut rng = stream_rng(seed, 1);
    let batch = SampleBatch {
        samples: (0..m2).map(|_| sampler.sample(&mut rng)).collect(),
        seed: Some(seed),
    };
    Ok(TwoPhaseOutput {
        learned: algorithm1(&batch, epsilon)?,
        t_hat,
        m1,
        m2,
    })
}

/// One seeded run of the learner against a known `p`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LearnTrial {
    pub trial: u64,
    pub m: usize,
    pub value_hat: f64,
    pub value_opt: f64,
    pub gap: f64,
    pub pass: bool,
}

/// How the per-trial sample size is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleBudget {
    /// `T` from the true tail of `p`, `m = sample_size_bound(ε, δ, T)`.
    KnownTail,
    /// Two-phase estimate of `T` as in [`algorithm1_estimated_horizon`].
    EstimatedTail,
    /// A fixed `m`.
    Fixed(usize),
}

/// Runs `trials` independent learners (trial `k` uses stream `k` of
/// `seed`), scoring each against `sup_q A(p,q)`. Parallel, but the result
/// does not depend on the thread count.
pub fn learning_trials(
    p: &HorizonDistribution,
    epsilon: f64,
    delta: f64,
    trials: u64,
    budget: SampleBudget,
    seed: u64,
) -> Result<Vec<LearnTrial>> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let value_opt = solve_optimal(p).value;
    let known_m = match budget {
        SampleBudget::KnownTail => {
            Some(sample_size_bound(epsilon, delta, tail_horizon(p, epsilon))?)
        }
        SampleBudget::Fixed(0) => return Err(Error::range("m", "need at least one sample")),
        SampleBudget::Fixed(m) => Some(m),
        SampleBudget::EstimatedTail => None,
    };
    let sampler = p.sampler();
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (q_hat, m) = match known_m {
                Some(m) => {
                    let mut rng = stream_rng(seed, trial);
                    let batch = SampleBatch {
                        samples: (0..m).map(|_| sampler.sample(&mut rng)).collect(),
                        seed: Some(seed),
                    };
                    (algorithm1(&batch, epsilon)?.q_hat, m)
                }
                None => {
                    let trial_seed = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
                    let out = algorithm1_estimated_horizon(p, epsilon, delta, trial_seed)?;
                    (out.learned.q_hat, out.m1 + out.m2)
                }
            };
            let value_hat = success_probability(p, &q_hat);
            let gap = value_opt - value_hat;
            Ok(LearnTrial {
                trial,
                m,
                value_hat,
                value_opt,
                gap,
                pass: gap <= epsilon,
            })
        })
        .collect()
}

/// The two-point instances `w^(n, s* ± ε)` on `{1, n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstances {
    pub p_plus: HorizonDistribution,
    pub p_minus: HorizonDistribution,
    /// `s*_n = (A_n - 1/n)/(1 + A_n - 1/n)`, where the optimal `q_1` flips.
    pub s_star: f64,
    /// `A_n = sup_q A(δ^(n), q)`.
    pub a_n: f64,
    /// Sample count below which no learner is `ε/3`-suboptimal on both
    /// instances with probability `2/3`: `(s* - ε)/(9ε²)`.
    pub min_samples: f64,
}

/// `w^(n,s)`: mass `s` at 1 and `1-s` at `n`.
pub fn two_point(n: usize, s: f64) -> Result<HorizonDistribution> {
    if n < 2 {
        return Err(Error::range("n", "two-point instance needs n >= 2"));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::range("s", format!("need 0 <= s <= 1, got {s}")));
    }
    let mut probs = vec![0.0; n];
    probs[0] = s;
    probs[n - 1] = 1.0 - s;
    HorizonDistribution::new(probs)
}

/// `s*_n` and `A_n` for `n ≥ 3`.
pub fn switching_point(n: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::range("n", "need n >= 3"));
    }
    let a_n = solve_optimal(&HorizonDistribution::delta(n)?).value;
    let d = a_n - 1.0 / n as f64;
    Ok((d / (1.0 + d), a_n))
}

pub fn hard_instance_lb(n: usize, epsilon: f64) -> Result<HardInstances> {
    let (s_star, a_n) = switching_point(n)?;
    if !(epsilon > 0.0 && epsilon < s_star.min(1.0 - s_star)) {
        return Err(Error::range(
            "epsilon",
            format!(
                "need 0 < epsilon < {}, got {epsilon}",
                s_star.min(1.0 - s_star)
            ),
        ));
    }
    Ok(HardInstances {
        p_plus: two_point(n, s_star + epsilon)?,
        p_minus: two_point(n, s_star - epsilon)?,
        s_star,
        a_n,
        min_samples: (s_star - epsilon) / (9.0 * epsilon * epsilon),
    })
}

/// Outcome of cross-evaluating the optimal rule of each hard instance on
/// the other one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    /// `A*(p-) - A(p-, q*_+)`.
    pub loss_plus_rule_on_minus: f64,
    /// `A*(p+) - A(p+, q*_-)`.
    pub loss_minus_rule_on_plus: f64,
    /// Both losses exceed `ε/3`.
    pub separated: bool,
}

pub fn separation_check(inst: &HardInstances, epsilon: f64) -> Separation {
    let plus = solve_optimal(&inst.p_plus);
    let minus = solve_optimal(&inst.p_minus);
    let a = minus.value - success_probability(&inst.p_minus, &plus.q_opt);
    let b = plus.value - success_probability(&inst.p_plus, &minus.q_opt);
    Separation {
        loss_plus_rule_on_minus: a,
        loss_minus_rule_on_plus: b,
        separated: a > epsilon / 3.0 && b > epsilon / 3.0,
    }
}

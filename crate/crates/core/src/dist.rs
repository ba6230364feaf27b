//! Distributions of the random horizon `N` and the λ-sequence derived from
//! them.
//!
//! A [`HorizonDistribution`] is a finite probability vector `p_1..p_n`
//! (stored zero-based). Everything a stopping strategy can achieve against
//! `p` depends on `p` only through
//!
//! ```text
//! λ_i(p) = Σ_{l ≥ i} p_l / l
//! ```
//!
//! which [`HorizonDistribution::lambda_sequence`] computes in one backward
//! pass.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, SimRng};

/// Tolerance on `Σ p_i = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// `H_n = Σ_{i ≤ n} 1/i`, summed in ascending order. `H_0 = 0`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// Finite-support distribution of the horizon `N` on `{1, …, n}`.
///
/// `n` is the declared length; trailing zero entries are kept so that
/// support indices survive round trips.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonDistribution {
    probs: Vec<f64>,
}

impl HorizonDistribution {
    /// Strict constructor: entries must be finite, non-negative and sum to one
    /// within [`NORMALIZATION_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_weights(&probs)?;
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes arbitrary non-negative weights. This is the only
    /// constructor that accepts inputs not already summing to one.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        validate_weights(weights)?;
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / sum).collect(),
        })
    }

    /// Internal constructor for vectors that are normalized by construction.
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!(validate_weights(&probs).is_ok());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        Self { probs }
    }

    /// Point mass at `n`.
    pub fn delta(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::range("n", "delta distribution needs n >= 1"));
        }
        let mut probs = vec![0.0; n];
        probs[n - 1] = 1.0;
        Ok(Self { probs })
    }

    /// The distribution on `[n]` against which no strategy beats `1/H_n`:
    /// `p_i = (1/H_n)/(i+1)` for `i < n` and `p_n = 1/H_n`.
    pub fn worst_case_pstar(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::range("n", "worst-case distribution needs n >= 1"));
        }
        let inv_h = 1.0 / harmonic(n);
        let mut probs: Vec<f64> = (1..n).map(|i| inv_h / (i + 1) as f64).collect();
        probs.push(inv_h);
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::range("n", "uniform distribution needs n >= 1"));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// Geometric pmf `(1-ρ) ρ^{k-1}`, `k = 1..n`, renormalized on `[n]`.
    pub fn geometric_truncated(rho: f64, n: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::range("rho", format!("need 0 < rho < 1, got {rho}")));
        }
        if n == 0 {
            return Err(Error::range("n", "truncation length must be >= 1"));
        }
        let weights: Vec<f64> = (0..n).map(|k| (1.0 - rho) * rho.powi(k as i32)).collect();
        Self::from_weights(&weights)
    }

    /// Poisson pmf at `k = 1..n` (the value 0 is not a horizon), renormalized.
    pub fn poisson_truncated(mu: f64, n: usize) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::range("mu", format!("need mu > 0, got {mu}")));
        }
        if n == 0 {
            return Err(Error::range("n", "truncation length must be >= 1"));
        }
        // log-space to stay finite for large mu and n
        let mut log_fact = 0.0;
        let mut logs = Vec::with_capacity(n);
        for k in 1..=n {
            log_fact += (k as f64).ln();
            logs.push(k as f64 * mu.ln() - mu - log_fact);
        }
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        Self::from_weights(&weights)
    }

    /// Convex combination `Σ_k w_k p^(k)`; the result has the length of the
    /// longest component.
    pub fn mixture(components: &[(f64, &HorizonDistribution)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution("empty mixture".into()));
        }
        let len = components.iter().map(|(_, d)| d.len()).max().unwrap_or(0);
        let mut weights = vec![0.0; len];
        for (w, d) in components {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "mixture weight {w} is not a non-negative number"
                )));
            }
            for (acc, p) in weights.iter_mut().zip(&d.probs) {
                *acc += w * p;
            }
        }
        Self::from_weights(&weights)
    }

    /// Flat Dirichlet draw on the `n`-simplex for a fixed seed.
    pub fn sample_dirichlet_uniform(n: usize, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, 0);
        Self::sample_dirichlet_uniform_with(n, &mut rng)
    }

    /// Flat Dirichlet draw: `n` independent unit exponentials, normalized.
    pub fn sample_dirichlet_uniform_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::range("n", "simplex dimension must be >= 1"));
        }
        loop {
            let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
            let sum: f64 = draws.iter().sum();
            if sum > 0.0 {
                return Ok(Self::from_normalized(
                    draws.into_iter().map(|x| x / sum).collect(),
                ));
            }
        }
    }

    /// Declared support bound `n`.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probabilities `p_1..p_n`, zero-based.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `p_i` for one-based `i`; zero outside the support.
    pub fn prob(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.probs.get(i - 1).copied().unwrap_or(0.0)
        }
    }

    /// Largest `i` with `p_i > 0`.
    pub fn support_max(&self) -> usize {
        self.probs
            .iter()
            .rposition(|&p| p > 0.0)
            .map_or(0, |i| i + 1)
    }

    /// `P[N > t]`.
    pub fn tail_mass(&self, t: usize) -> f64 {
        self.probs.iter().skip(t).sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// `λ_i = Σ_{l ≥ i} p_l / l` by a single backward pass.
    pub fn lambda_sequence(&self) -> LambdaSequence {
        let n = self.probs.len();
        let mut values = vec![0.0; n];
        let mut acc = 0.0;
        for i in (1..=n).rev() {
            acc += self.probs[i - 1] / i as f64;
            values[i - 1] = acc;
        }
        LambdaSequence { values }
    }

    /// Inverse-CDF sampler over the support.
    pub fn sampler(&self) -> HorizonSampler {
        HorizonSampler {
            index: WeightedIndex::new(&self.probs)
                .expect("validated distribution has positive total mass"),
        }
    }

    /// JSON form `{"probs": [...]}`.
    pub fn to_spec(&self) -> DistributionSpec {
        DistributionSpec::Probs {
            probs: self.probs.clone(),
        }
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution("no entries".into()));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
    {
        return Err(Error::InvalidDistribution(format!(
            "entry {} is {w}; entries must be finite and non-negative",
            i + 1
        )));
    }
    Ok(())
}

/// Draws horizons `N ~ p`.
#[derive(Debug, Clone)]
pub struct HorizonSampler {
    index: WeightedIndex<f64>,
}

impl HorizonSampler {
    /// One draw, as a one-based horizon.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng) + 1
    }
}

/// The sequence `λ_1 ≥ λ_2 ≥ … ≥ λ_n`, with `λ_i = 0` for `i > n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSequence {
    values: Vec<f64>,
}

impl LambdaSequence {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `λ_i` for one-based `i`.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        self.values.get(i - 1).copied().unwrap_or(0.0)
    }

    /// `i · λ_i` for `i = 1..n`.
    pub fn scaled(&self) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, l)| (i + 1) as f64 * l)
            .collect()
    }
}

/// On-disk description of a horizon distribution.
///
/// Either explicit probabilities (`{"probs": [...]}`, must already sum to
/// one), raw weights (`{"weights": [...]}`, normalized on load), or a named
/// family (`{"kind": "poisson", "n": 30, "param": 4.0}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSpec {
    Probs {
        probs: Vec<f64>,
    },
    Weights {
        weights: Vec<f64>,
    },
    Family {
        kind: FamilyKind,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Delta,
    Uniform,
    Pstar,
    Geometric,
    Poisson,
}

impl DistributionSpec {
    pub fn build(&self) -> Result<HorizonDistribution> {
        match self {
            DistributionSpec::Probs { probs } => HorizonDistribution::new(probs.clone()),
            DistributionSpec::Weights { weights } => HorizonDistribution::from_weights(weights),
            DistributionSpec::Family { kind, n, param } => {
                let need = |name: &'static str| {
                    param.ok_or_else(|| Error::range(name, "family requires `param`"))
                };
                match kind {
                    FamilyKind::Delta => HorizonDistribution::delta(*n),
                    FamilyKind::Uniform => HorizonDistribution::uniform(*n),
                    FamilyKind::Pstar => HorizonDistribution::worst_case_pstar(*n),
                    FamilyKind::Geometric => {
                        HorizonDistribution::geometric_truncated(need("rho")?, *n)
                    }
                    FamilyKind::Poisson => HorizonDistribution::poisson_truncated(need("mu")?, *n),
                }
            }
        }
    }
}

/// Convenience for code that already owns a generator.
pub fn dirichlet_draws(
    n: usize,
    count: usize,
    rng: &mut SimRng,
) -> Result<Vec<HorizonDistribution>> {
    (0..count)
        .map(|_| HorizonDistribution::sample_dirichlet_uniform_with(n, rng))
        .collect()
}

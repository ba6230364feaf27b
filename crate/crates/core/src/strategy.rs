//! Stopping strategies and their exact success probability.
//!
//! A [`Strategy`] is a vector `q` where `q_i` is the probability of accepting
//! the `i`-th arrival when it is the best so far and nothing has been
//! accepted yet. Against a horizon distribution `p` its success probability
//! is
//!
//! ```text
//! A(p, q) = Σ_i U_{i-1}(q) · q_i · λ_i(p),   U_i(q) = Π_{l ≤ i} (1 - q_l / l)
//! ```
//!
//! Indices past the stored length are evaluated as `q_i = 1`: once the
//! stored rule runs out, taking a best-so-far arrival can only help.

use serde::{Deserialize, Serialize};

use crate::dist::{HorizonDistribution, LambdaSequence, NORMALIZATION_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    q: Vec<f64>,
}

impl Strategy {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = q
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(Error::InvalidStrategy(format!(
                "q_{} = {v} is not in [0, 1]",
                i + 1
            )));
        }
        Ok(Self { q })
    }

    pub(crate) fn from_raw(q: Vec<f64>) -> Self {
        debug_assert!(q.iter().all(|v| (0.0..=1.0).contains(v)));
        Self { q }
    }

    /// `q^(l)`: reject the first `l-1` arrivals, then take the first
    /// best-so-far. Build it with `m ≥ n` when evaluating against a horizon
    /// bounded by `n`, otherwise the `q_i = 1` extension kicks in at `m+1`.
    pub fn single_threshold(l: usize, m: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::range("l", "threshold must be >= 1"));
        }
        Ok(Self {
            q: (1..=m).map(|i| if i >= l { 1.0 } else { 0.0 }).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    /// `q_i` for one-based `i`, with `q_i = 1` past the stored length.
    pub fn q(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        self.q.get(i - 1).copied().unwrap_or(1.0)
    }

    /// `U_0 = 1, U_1, …, U_m`.
    pub fn prefix_products(&self) -> Vec<f64> {
        let mut u = Vec::with_capacity(self.q.len() + 1);
        let mut acc = 1.0;
        u.push(acc);
        for (idx, qi) in self.q.iter().enumerate() {
            acc *= 1.0 - qi / (idx + 1) as f64;
            u.push(acc);
        }
        u
    }

    /// Smallest `l` with `q_l = 1` and `q_i = 0` before it, if `q` is a
    /// single-threshold rule (taking the extension into account).
    pub fn as_threshold(&self) -> Option<usize> {
        let first_one = self.q.iter().position(|&v| v == 1.0);
        let l = first_one.map_or(self.q.len() + 1, |i| i + 1);
        let ok = self
            .q
            .iter()
            .enumerate()
            .all(|(i, &v)| if i + 1 < l { v == 0.0 } else { v == 1.0 });
        ok.then_some(l)
    }

    pub fn to_spec(&self) -> StrategySpec {
        StrategySpec::Vector { q: self.q.clone() }
    }
}

/// `A(p, q)` in the λ-form, `O(n)`.
pub fn success_probability(p: &HorizonDistribution, q: &Strategy) -> f64 {
    success_probability_lambda(&p.lambda_sequence(), q)
}

/// `A(p, q)` for a precomputed λ-sequence.
pub fn success_probability_lambda(lambda: &LambdaSequence, q: &Strategy) -> f64 {
    let mut u = 1.0;
    let mut total = 0.0;
    for (idx, lam) in lambda.values().iter().enumerate() {
        let i = idx + 1;
        let qi = q.q(i);
        total += u * qi * lam;
        u *= 1.0 - qi / i as f64;
    }
    total
}

/// `A(p, q) = Σ_i p_i (1/i) Σ_{l ≤ i} U_{l-1} q_l`. Kept as an independent
/// cross-check of the λ-form.
pub fn success_probability_pform(p: &HorizonDistribution, q: &Strategy) -> f64 {
    let mut u = 1.0;
    let mut inner = 0.0;
    let mut total = 0.0;
    for (idx, pi) in p.probs().iter().enumerate() {
        let i = idx + 1;
        let qi = q.q(i);
        inner += u * qi;
        u *= 1.0 - qi / i as f64;
        total += pi * inner / i as f64;
    }
    total
}

/// `A(p, q^(l))` for every `l = 1..=n+1`, in `O(n)`.
///
/// With `q = q^(l)` the prefix products telescope to `U_{i-1} = (l-1)/(i-1)`
/// for `i ≥ l ≥ 2`, so `A(p, q^(l)) = (l-1) Σ_{i ≥ l} λ_i/(i-1)`; for `l = 1`
/// it is `λ_1`. Entry `l-1` of the result is `A(p, q^(l))`, and the last entry
/// (`l = n+1`, never accepting inside the support) is zero.
pub fn threshold_profile(lambda: &LambdaSequence) -> Vec<f64> {
    let n = lambda.len();
    let mut out = vec![0.0; n + 1];
    let mut suffix = 0.0;
    for l in (2..=n).rev() {
        suffix += lambda.get(l) / (l - 1) as f64;
        out[l - 1] = (l - 1) as f64 * suffix;
    }
    if n >= 1 {
        out[0] = lambda.get(1);
    }
    out
}

/// Distribution over single-threshold rules; `weights[l-1]` is the
/// probability of playing `q^(l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdMixture {
    weights: Vec<f64>,
}

impl ThresholdMixture {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("empty mixture".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidStrategy(
                "mixture weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidStrategy(format!(
                "mixture weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn point_mass(l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::range("l", "threshold must be >= 1"));
        }
        let mut w = vec![0.0; l];
        w[l - 1] = 1.0;
        Ok(Self { weights: w })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest threshold with positive weight.
    pub fn max_threshold(&self) -> usize {
        self.weights
            .iter()
            .rposition(|&w| w > 0.0)
            .map_or(0, |i| i + 1)
    }

    /// Draws a threshold `l` (one-based).
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i + 1;
            }
        }
        self.max_threshold().max(1)
    }

    pub fn to_spec(&self) -> MixtureSpec {
        MixtureSpec {
            weights: self.weights.clone(),
        }
    }
}

/// `Σ_l x_l · A(p, q^(l))`.
pub fn mixture_success_probability(p: &HorizonDistribution, mix: &ThresholdMixture) -> f64 {
    let profile = threshold_profile(&p.lambda_sequence());
    mix.weights
        .iter()
        .enumerate()
        .map(|(idx, w)| w * profile.get(idx).copied().unwrap_or(0.0))
        .sum()
}

/// On-disk strategy: `{"q": [...]}` or `{"kind": "threshold", "l": 3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategySpec {
    Vector { q: Vec<f64> },
    Threshold { kind: ThresholdTag, l: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdTag {
    Threshold,
}

impl StrategySpec {
    /// Builds the strategy; thresholds are materialized with length
    /// `max(n, l)` so they stay exact against horizons bounded by `n`.
    pub fn build(&self, n: usize) -> Result<Strategy> {
        match self {
            StrategySpec::Vector { q } => Strategy::new(q.clone()),
            StrategySpec::Threshold { l, .. } => Strategy::single_threshold(*l, n.max(*l)),
        }
    }
}

/// On-disk mixture: `{"weights": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub weights: Vec<f64>,
}

impl MixtureSpec {
    pub fn build(&self) -> Result<ThresholdMixture> {
        ThresholdMixture::new(self.weights.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn single_threshold_examples() {
        assert_eq!(
            Strategy::single_threshold(1, 3).unwrap().values(),
            &[1.0, 1.0, 1.0]
        );
        assert_eq!(
            Strategy::single_threshold(2, 3).unwrap().values(),
            &[0.0, 1.0, 1.0]
        );
        assert_eq!(
            Strategy::single_threshold(5, 3).unwrap().values(),
            &[0.0, 0.0, 0.0]
        );
        assert!(Strategy::single_threshold(0, 3).is_err());
    }

    #[test]
    fn prefix_product_examples() {
        let u = Strategy::new(vec![1.0; 3]).unwrap().prefix_products();
        assert_eq!(u, vec![1.0, 0.0, 0.0, 0.0]);
        let u = Strategy::new(vec![0.0, 1.0, 1.0])
            .unwrap()
            .prefix_products();
        assert!(close(u[2], 0.5) && close(u[3], 1.0 / 3.0) && u[1] == 1.0);
        let u = Strategy::new(vec![0.0; 3]).unwrap().prefix_products();
        assert_eq!(u, vec![1.0; 4]);
    }

    #[test]
    fn rejects_out_of_range_q() {
        assert!(Strategy::new(vec![1.2]).is_err());
        assert!(Strategy::new(vec![-0.1]).is_err());
        assert!(Strategy::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn success_probability_examples() {
        let p = HorizonDistribution::worst_case_pstar(2).unwrap();
        let q1 = Strategy::single_threshold(1, 2).unwrap();
        assert!(close(success_probability(&p, &q1), 2.0 / 3.0));

        let q2 = Strategy::single_threshold(2, 3).unwrap();
        let d3 = HorizonDistribution::delta(3).unwrap();
        assert!(close(success_probability(&d3, &q2), 0.5));

        let d4 = HorizonDistribution::delta(4).unwrap();
        let q2 = Strategy::single_threshold(2, 4).unwrap();
        assert!(close(success_probability(&d4, &q2), 11.0 / 24.0));

        let d1 = HorizonDistribution::delta(1).unwrap();
        let c = Strategy::new(vec![0.3]).unwrap();
        assert!(close(success_probability(&d1, &c), 0.3));
    }

    #[test]
    fn extension_accepts_past_stored_length() {
        let d3 = HorizonDistribution::delta(3).unwrap();
        let short = Strategy::new(vec![0.0]).unwrap();
        let full = Strategy::single_threshold(2, 3).unwrap();
        assert!(close(
            success_probability(&d3, &short),
            success_probability(&d3, &full)
        ));
    }

    #[test]
    fn pform_matches_lambda_form() {
        let p = HorizonDistribution::from_weights(&[0.1, 0.3, 0.0, 0.2, 0.4]).unwrap();
        let q = Strategy::new(vec![0.2, 0.9, 0.5, 0.0, 0.7]).unwrap();
        assert!(close(
            success_probability(&p, &q),
            success_probability_pform(&p, &q)
        ));
    }

    #[test]
    fn threshold_profile_matches_direct() {
        let p = HorizonDistribution::from_weights(&[0.1, 0.3, 0.0, 0.2, 0.4]).unwrap();
        let prof = threshold_profile(&p.lambda_sequence());
        for l in 1..=6 {
            let q = Strategy::single_threshold(l, 5).unwrap();
            let direct = if l == 6 {
                0.0
            } else {
                success_probability(&p, &q)
            };
            assert!(close(prof[l - 1], direct), "l={l}");
        }
    }

    #[test]
    fn mixture_examples() {
        let p = HorizonDistribution::from_weights(&[0.3, 0.7]).unwrap();
        let point = ThresholdMixture::point_mass(2).unwrap();
        let q2 = Strategy::single_threshold(2, 2).unwrap();
        assert!(close(
            mixture_success_probability(&p, &point),
            success_probability(&p, &q2)
        ));
        let half = ThresholdMixture::new(vec![0.5, 0.5]).unwrap();
        assert!(close(mixture_success_probability(&p, &half), 0.5));
        let p3 = HorizonDistribution::worst_case_pstar(3).unwrap();
        let mix = ThresholdMixture::new(vec![0.4, 0.4, 0.2]).unwrap();
        assert!(close(mixture_success_probability(&p3, &mix), 0.4));
    }

    #[test]
    fn as_threshold_detects_rules() {
        assert_eq!(
            Strategy::single_threshold(2, 4).unwrap().as_threshold(),
            Some(2)
        );
        assert_eq!(
            Strategy::new(vec![0.0, 0.0]).unwrap().as_threshold(),
            Some(3)
        );
        assert_eq!(
            Strategy::new(vec![0.0, 1.0, 0.0]).unwrap().as_threshold(),
            None
        );
    }

    #[test]
    fn spec_round_trip() {
        let s: StrategySpec = serde_json::from_str(r#"{"kind":"threshold","l":2}"#).unwrap();
        assert_eq!(s.build(4).unwrap().values(), &[0.0, 1.0, 1.0, 1.0]);
        let q = Strategy::new(vec![0.25, 1.0]).unwrap();
        let json = serde_json::to_string(&q.to_spec()).unwrap();
        let back: StrategySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build(2).unwrap(), q);
        assert!(serde_json::from_str::<StrategySpec>(r#"{"kind":"other","l":2}"#).is_err());
        let m: MixtureSpec = serde_json::from_str(r#"{"weights":[0.5,0.5]}"#).unwrap();
        assert!(m.build().is_ok());
    }
}

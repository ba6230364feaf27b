//! Randomizing the horizon handed to a black-box algorithm, and the hard
//! instances showing that the resulting `1/(1 + log)` guarantees are tight.
//!
//! A black box tuned for horizon `s` and run on a horizon-`n` instance is
//! assumed to earn `M(s,n) = c₀·f(s)/f(n)·1[s ≤ n]`. Feeding it a random
//! guess `s ~ x` with
//!
//! ```text
//! x_{n̲} = 1/Z,  x_s = (1 - f(s-1)/f(s))/Z,  Z = n̄ - n̲ + 1 - Σ_{i=n̲}^{n̄-1} f(i)/f(i+1)
//! ```
//!
//! earns exactly `c₀/Z` for every `n ∈ [n̲, n̄]`.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{harmonic, HorizonDistribution};
use crate::error::{Error, Result};
use crate::rng::{shards, stream_rng, SimRng};
use crate::sim::SimStats;

/// The scale function `f` of a performance profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ProfileFn {
    /// `f(i) = i` (e.g. secretary-type objectives).
    Identity,
    /// `f(i) = i/(i+1)`, the expected maximum of `i` uniforms.
    UniformMax,
    /// `f(i) = H_i`, the expected maximum of `i` unit exponentials.
    ExpMax,
    /// `f(start), f(start+1), …` listed explicitly.
    Table { start: usize, values: Vec<f64> },
}

impl ProfileFn {
    pub fn eval(&self, i: usize) -> Result<f64> {
        if i == 0 {
            return Err(Error::range("s", "profile index must be >= 1"));
        }
        Ok(match self {
            ProfileFn::Identity => i as f64,
            ProfileFn::UniformMax => i as f64 / (i + 1) as f64,
            ProfileFn::ExpMax => harmonic(i),
            ProfileFn::Table { start, values } => {
                if i < *start || i - start >= values.len() {
                    return Err(Error::range(
                        "s",
                        format!(
                            "index {i} outside table range [{start}, {}]",
                            start + values.len() - 1
                        ),
                    ));
                }
                values[i - start]
            }
        })
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "identity" => Some(ProfileFn::Identity),
            "uniform-max" => Some(ProfileFn::UniformMax),
            "exp-max" => Some(ProfileFn::ExpMax),
            _ => None,
        }
    }
}

/// `M(s,n) = c₀·f(s)/f(n)·1[s ≤ n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceProfile {
    pub c0: f64,
    pub f: ProfileFn,
}

/// Commonly quoted `c₀` for the single-sample prophet black box.
pub const PROPHET_C0: f64 = 0.745;

impl PerformanceProfile {
    pub fn new(c0: f64, f: ProfileFn) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::range("c0", format!("need c0 > 0, got {c0}")));
        }
        Ok(Self { c0, f })
    }

    pub fn performance(&self, s: usize, n: usize) -> Result<f64> {
        if s > n {
            return Ok(0.0);
        }
        Ok(self.c0 * self.f.eval(s)? / self.f.eval(n)?)
    }

    /// `f(n_lo..=n_hi)`, checking positivity and monotonicity.
    fn values_on(&self, n_lo: usize, n_hi: usize) -> Result<Vec<f64>> {
        let vals = (n_lo..=n_hi)
            .map(|i| self.f.eval(i))
            .collect::<Result<Vec<_>>>()?;
        if let Some(v) = vals.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::range(
                "f",
                format!("profile value {v} is not positive"),
            ));
        }
        if vals.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::range("f", "profile must be nondecreasing"));
        }
        Ok(vals)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaMixture {
    pub n_lo: usize,
    pub n_hi: usize,
    /// `x_s` for `s = n_lo..=n_hi`.
    pub weights: Vec<f64>,
    /// `c₀/Z`.
    pub guarantee: f64,
}

impl MetaMixture {
    pub fn weight(&self, s: usize) -> f64 {
        if s < self.n_lo || s > self.n_hi {
            0.0
        } else {
            self.weights[s - self.n_lo]
        }
    }

    /// Draws a horizon guess `s`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return self.n_lo + k;
            }
        }
        self.n_hi
    }
}

pub fn meta_mixture(profile: &PerformanceProfile, n_lo: usize, n_hi: usize) -> Result<MetaMixture> {
    if n_lo == 0 || n_lo > n_hi {
        return Err(Error::range(
            "n_lo",
            format!("need 1 <= n_lo <= n_hi, got ({n_lo}, {n_hi})"),
        ));
    }
    let f = profile.values_on(n_lo, n_hi)?;
    let ratio_sum: f64 = f.windows(2).map(|w| w[0] / w[1]).sum();
    let z = (n_hi - n_lo + 1) as f64 - ratio_sum;
    let mut weights = Vec::with_capacity(f.len());
    weights.push(1.0 / z);
    weights.extend(f.windows(2).map(|w| (1.0 - w[0] / w[1]) / z));
    Ok(MetaMixture {
        n_lo,
        n_hi,
        weights,
        guarantee: profile.c0 / z,
    })
}

/// `Σ_s x_s M(s,n)`.
pub fn meta_expected_performance(
    mix: &MetaMixture,
    profile: &PerformanceProfile,
    n: usize,
) -> Result<f64> {
    if n < mix.n_lo || n > mix.n_hi {
        return Err(Error::range(
            "n",
            format!("{n} outside [{}, {}]", mix.n_lo, mix.n_hi),
        ));
    }
    let fn_ = profile.f.eval(n)?;
    let mut total = 0.0;
    for s in mix.n_lo..=n {
        total += mix.weight(s) * profile.c0 * profile.f.eval(s)? / fn_;
    }
    Ok(total)
}

/// `c₀/(1 + ln(f(n̄)/f(n̲)))`, the closed-form floor for the guarantee.
pub fn meta_log_bound(profile: &PerformanceProfile, n_lo: usize, n_hi: usize) -> Result<f64> {
    Ok(profile.c0 / (1.0 + (profile.f.eval(n_hi)? / profile.f.eval(n_lo)?).ln()))
}

/// Deterministic values `a_1 ≤ … ≤ a_n` and the horizon law that makes every
/// stopping rule earn the same ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct NonIidInstance {
    pub a: Vec<f64>,
    pub p: HorizonDistribution,
    /// `c = (n - Σ a_i/a_{i+1})^{-1}`.
    pub value: f64,
}

pub fn non_iid_hard_instance(a: &[f64]) -> Result<NonIidInstance> {
    if a.is_empty() {
        return Err(Error::range("a", "sequence is empty"));
    }
    if a.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::range("a", "values must be positive"));
    }
    if a.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::range("a", "values must be nondecreasing"));
    }
    let n = a.len();
    let ratios: Vec<f64> = a.windows(2).map(|w| w[0] / w[1]).collect();
    let c = 1.0 / (n as f64 - ratios.iter().sum::<f64>());
    let mut w: Vec<f64> = ratios.iter().map(|r| 1.0 - r).collect();
    w.push(1.0);
    Ok(NonIidInstance {
        a: a.to_vec(),
        p: HorizonDistribution::from_weights(&w)?,
        value: c,
    })
}

/// `a_i = x^{(n-i)/(n-1)}`, rising geometrically from `x` to 1.
pub fn geometric_values(x: f64, n: usize) -> Result<Vec<f64>> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::range("x", format!("need 0 < x <= 1, got {x}")));
    }
    if n == 0 {
        return Err(Error::range("n", "must be >= 1"));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    Ok((1..=n)
        .map(|i| x.powf((n - i) as f64 / (n - 1) as f64))
        .collect())
}

/// `E[ E[X_τ 1[τ ≤ N] | N] / E[max_{i ≤ N} X_i | N] ]` for deterministic
/// values `a`, where `q_i = P[τ = i]`: `Σ_i Σ_{j ≥ i} (a_i/a_j) q_i p_j`.
pub fn ratio_objective(a: &[f64], p: &HorizonDistribution, q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, (ai, qi)) in a.iter().zip(q).enumerate() {
        for (j, aj) in a.iter().enumerate().skip(i) {
            total += ai / aj * qi * p.prob(j + 1);
        }
    }
    total
}

/// `h̄(z) = z^{-z/(2(z-1))} - z^{-1/(z-1)}`.
pub fn h_bar(z: f64) -> f64 {
    z.powf(-z / (2.0 * (z - 1.0))) - z.powf(-1.0 / (z - 1.0))
}

/// A discrete value distribution `G` with atoms at `θ_1 < … < θ_n`, chosen so
/// that the maximum of the first `k_i` iid draws lands in `(θ_{i-1}, θ_i]`
/// for every `i` simultaneously with probability at least `1 - ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProphetBlock {
    pub n: usize,
    pub k_cap: u64,
    pub thetas: Vec<f64>,
    /// `k_1 ≤ … ≤ k_n`.
    pub k: Vec<u64>,
    pub alpha: f64,
    /// `ln G(θ_i)` for `i = 0..=n` (`-∞` at `i = 0`).
    pub ln_g: Vec<f64>,
    pub xi: f64,
    /// `(n-1)(1 + h̄(K^{1/(n-1)}))`.
    pub xi_bound: f64,
}

/// Rounds `v` to the nearest integer when it is one up to floating error,
/// then takes the ceiling.
fn robust_ceil(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r
    } else {
        v.ceil()
    }
}

pub fn prophet_block_distribution(n: usize, k_cap: u64, thetas: &[f64]) -> Result<ProphetBlock> {
    if n < 2 {
        return Err(Error::range("n", "need n >= 2"));
    }
    if thetas.len() != n + 1 {
        return Err(Error::range(
            "thetas",
            format!("need n+1 = {} grid points, got {}", n + 1, thetas.len()),
        ));
    }
    if thetas.iter().any(|t| !t.is_finite()) || thetas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::range(
            "thetas",
            "grid must be finite and strictly increasing",
        ));
    }
    let m = (n - 1) as f64;
    let kf = k_cap as f64;
    let z = kf.powf(1.0 / m);
    if z.is_nan() || z < 2.0 - 1e-12 {
        return Err(Error::range(
            "K",
            format!("need K^(1/(n-1)) >= 2, got {z} (K = {k_cap}, n = {n})"),
        ));
    }
    let ln_alpha = -kf.ln() / (m * (z - 1.0));
    let k: Vec<u64> = (1..=n)
        .map(|i| {
            let v = robust_ceil(kf.powf((i - 1) as f64 / m));
            (v as u64).clamp(1, k_cap)
        })
        .collect();
    let mut ln_g = Vec::with_capacity(n + 1);
    ln_g.push(f64::NEG_INFINITY);
    ln_g.extend(k[..n - 1].iter().map(|&ki| ln_alpha / ki as f64));
    ln_g.push(0.0);

    // ξ = Σ_i 1 - (G(θ_i)^{k_i} - G(θ_{i-1})^{k_i})
    let xi: f64 = (1..=n)
        .map(|i| {
            let ki = k[i - 1] as f64;
            1.0 - ((ki * ln_g[i]).exp() - (ki * ln_g[i - 1]).exp())
        })
        .sum();
    let xi_bound = m * (1.0 + h_bar(z));
    assert!(
        xi <= xi_bound + 1e-12,
        "union-bound slack {xi} exceeds its guarantee {xi_bound}"
    );
    Ok(ProphetBlock {
        n,
        k_cap,
        thetas: thetas.to_vec(),
        k,
        alpha: ln_alpha.exp(),
        ln_g,
        xi,
        xi_bound,
    })
}

impl ProphetBlock {
    /// `G(θ_i)`.
    pub fn grid_cdf(&self) -> Vec<f64> {
        self.ln_g.iter().map(|l| l.exp()).collect()
    }

    /// The right-continuous step CDF `G(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let j = self.thetas.partition_point(|&t| t <= x);
        if j == 0 {
            0.0
        } else {
            self.ln_g[j - 1].exp()
        }
    }

    /// Atom index (1..=n) of the maximum of `m ≥ 1` fresh draws.
    fn max_index<R: Rng + ?Sized>(&self, m: u64, rng: &mut R) -> usize {
        let ln_u = rng.random::<f64>().ln();
        let mf = m as f64;
        // smallest j with G(θ_j)^m ≥ U; the last atom always qualifies
        1 + self.ln_g[1..].partition_point(|&lg| mf * lg < ln_u)
    }

    /// Frequency of the event `max_{j ≤ k_i} X_j ∈ (θ_{i-1}, θ_i]` for all `i`.
    pub fn union_event_rate(&self, trials: u64, seed: u64) -> Result<SimStats> {
        if trials == 0 {
            return Err(Error::range("trials", "must be >= 1"));
        }
        let hits: u64 = shards(trials)
            .into_par_iter()
            .map(|(idx, len)| {
                let mut rng = stream_rng(seed, idx);
                (0..len).filter(|_| self.union_event_once(&mut rng)).count() as u64
            })
            .sum();
        Ok(SimStats::from_counts(hits, trials))
    }

    fn union_event_once(&self, rng: &mut SimRng) -> bool {
        let mut seen = 0u64;
        let mut best = 0usize;
        for (i, &ki) in self.k.iter().enumerate() {
            if ki > seen {
                best = best.max(self.max_index(ki - seen, rng));
                seen = ki;
            }
            if best != i + 1 {
                return false;
            }
        }
        true
    }
}

/// The iid prophet instance built on `θ_l = x^{1 - l/n}` with the horizon on
/// `{k_1, …, k_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProphetInstance {
    pub x: f64,
    pub block: ProphetBlock,
    /// `P[N = k_l]`.
    pub p: Vec<f64>,
    /// `c = (1 + (n-1)(1 - x^{1/n}))^{-1}`.
    pub c: f64,
    /// `x^{-1/n}·c + ξ`, which no stopping rule can beat.
    pub bound: f64,
    /// `1/(1 + ln(1/x)) + ξ`, the large-`n` limit of the bound.
    pub target: f64,
}

pub fn prophet_instance(x: f64, n: usize, k_cap: u64) -> Result<ProphetInstance> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::range("x", format!("need 0 < x < 1, got {x}")));
    }
    let thetas: Vec<f64> = (0..=n).map(|l| x.powf(1.0 - l as f64 / n as f64)).collect();
    let block = prophet_block_distribution(n, k_cap, &thetas)?;
    let r = x.powf(1.0 / n as f64);
    let c = 1.0 / (1.0 + (n - 1) as f64 * (1.0 - r));
    let mut p = vec![c * (1.0 - r); n - 1];
    p.push(c);
    Ok(ProphetInstance {
        x,
        c,
        bound: c / r + block.xi,
        target: 1.0 / (1.0 + (1.0 / x).ln()) + block.xi,
        block,
        p,
    })
}

impl ProphetInstance {
    /// Exact ratio objective of "stop at the first `X_i ≥ θ_j`".
    pub fn threshold_ratio(&self, j: usize) -> f64 {
        let b = &self.block;
        assert!((1..=b.n).contains(&j));
        let g = b.grid_cdf();
        // E[X | X ≥ θ_j] and P[X ≥ θ_j]
        let tail = 1.0 - g[j - 1];
        let cond_mean: f64 = (j..=b.n)
            .map(|i| b.thetas[i] * (g[i] - g[i - 1]))
            .sum::<f64>()
            / tail;
        let mut total = 0.0;
        for (l, &pl) in self.p.iter().enumerate() {
            let kl = b.k[l] as f64;
            let num = cond_mean * (1.0 - (kl * b.ln_g[j - 1]).exp());
            let den: f64 = (1..=b.n)
                .map(|i| b.thetas[i] * ((kl * b.ln_g[i]).exp() - (kl * b.ln_g[i - 1]).exp()))
                .sum();
            total += pl * num / den;
        }
        total
    }

    /// Best threshold rule and its exact ratio.
    pub fn best_threshold(&self) -> (usize, f64) {
        (1..=self.block.n)
            .map(|j| (j, self.threshold_ratio(j)))
            .fold(
                (1, f64::NEG_INFINITY),
                |acc, v| if v.1 > acc.1 { v } else { acc },
            )
    }

    /// Monte Carlo estimate of [`threshold_ratio`](Self::threshold_ratio):
    /// per horizon value, the numerator and the prophet's expectation are
    /// estimated from `trials` episodes each, skipping rejected arrivals
    /// geometrically.
    pub fn threshold_ratio_mc(&self, j: usize, trials: u64, seed: u64) -> Result<f64> {
        if trials == 0 {
            return Err(Error::range("trials", "must be >= 1"));
        }
        let b = &self.block;
        if !(1..=b.n).contains(&j) {
            return Err(Error::range(
                "j",
                format!("threshold index must be in [1, {}]", b.n),
            ));
        }
        let g = b.grid_cdf();
        let tail = 1.0 - g[j - 1];
        let skip = Geometric::new(tail.clamp(f64::MIN_POSITIVE, 1.0))
            .map_err(|e| Error::range("threshold", e.to_string()))?;
        let per_l: Vec<f64> = (0..b.n)
            .into_par_iter()
            .map(|l| {
                let mut rng = stream_rng(seed, l as u64);
                let kl = b.k[l];
                let (mut num, mut den) = (0.0, 0.0);
                for _ in 0..trials {
                    // τ = 1 + number of rejected arrivals
                    let tau = skip.sample(&mut rng).saturating_add(1);
                    if tau <= kl {
                        let u: f64 = rng.random::<f64>() * tail + g[j - 1];
                        let idx = j + g[j..].partition_point(|&v| v < u).min(b.n - j);
                        num += b.thetas[idx];
                    }
                    den += b.thetas[b.max_index(kl, &mut rng)];
                }
                num / den
            })
            .collect();
        Ok(per_l.iter().zip(&self.p).map(|(r, p)| r * p).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn identity_small_example() {
        let prof = PerformanceProfile::new(1.0, ProfileFn::Identity).unwrap();
        let mix = meta_mixture(&prof, 1, 2).unwrap();
        assert!(close(mix.weights[0], 2.0 / 3.0) && close(mix.weights[1], 1.0 / 3.0));
        assert!(close(mix.guarantee, 2.0 / 3.0));
        for n in 1..=2 {
            assert!(close(
                meta_expected_performance(&mix, &prof, n).unwrap(),
                2.0 / 3.0
            ));
        }
        assert!(meta_expected_performance(&mix, &prof, 3).is_err());
    }

    #[test]
    fn point_mass_when_range_is_a_point() {
        let prof = PerformanceProfile::new(0.7, ProfileFn::ExpMax).unwrap();
        let mix = meta_mixture(&prof, 5, 5).unwrap();
        assert_eq!(mix.weights, vec![1.0]);
        assert!(close(mix.guarantee, 0.7));
        assert!(close(
            meta_expected_performance(&mix, &prof, 5).unwrap(),
            0.7
        ));
    }

    #[test]
    fn guarantee_beats_log_bound() {
        for f in [
            ProfileFn::Identity,
            ProfileFn::UniformMax,
            ProfileFn::ExpMax,
        ] {
            let prof = PerformanceProfile::new(PROPHET_C0, f).unwrap();
            for (lo, hi) in [(1, 10), (3, 300), (10, 11)] {
                let mix = meta_mixture(&prof, lo, hi).unwrap();
                assert!(mix.guarantee >= meta_log_bound(&prof, lo, hi).unwrap() - 1e-15);
                assert!((mix.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_profiles_are_validated() {
        let t = ProfileFn::Table {
            start: 2,
            values: vec![1.0, 2.0, 2.0],
        };
        let prof = PerformanceProfile::new(1.0, t).unwrap();
        assert!(meta_mixture(&prof, 2, 4).is_ok());
        assert!(meta_mixture(&prof, 1, 4).is_err());
        assert!(meta_mixture(&prof, 2, 5).is_err());
        let bad = PerformanceProfile::new(
            1.0,
            ProfileFn::Table {
                start: 1,
                values: vec![2.0, 1.0],
            },
        )
        .unwrap();
        assert!(meta_mixture(&bad, 1, 2).is_err());
        assert!(PerformanceProfile::new(0.0, ProfileFn::Identity).is_err());
        assert!(meta_mixture(&prof, 3, 2).is_err());
    }

    #[test]
    fn profile_json_round_trip() {
        let prof = PerformanceProfile::new(
            0.5,
            ProfileFn::Table {
                start: 1,
                values: vec![1.0, 1.5],
            },
        )
        .unwrap();
        let s = serde_json::to_string(&prof).unwrap();
        assert_eq!(
            serde_json::from_str::<PerformanceProfile>(&s).unwrap(),
            prof
        );
    }

    #[test]
    fn non_iid_examples() {
        let inst = non_iid_hard_instance(&geometric_values(1.0, 4).unwrap()).unwrap();
        assert!(close(inst.value, 1.0));
        assert_eq!(inst.p.probs(), &[0.0, 0.0, 0.0, 1.0]);
        let inst = non_iid_hard_instance(&[0.5, 1.0]).unwrap();
        assert!(close(inst.value, 2.0 / 3.0));
        assert!(close(inst.p.prob(1), 1.0 / 3.0) && close(inst.p.prob(2), 2.0 / 3.0));
        assert!(non_iid_hard_instance(&[1.0, 0.5]).is_err());
        assert!(non_iid_hard_instance(&[0.0, 0.5]).is_err());
    }

    #[test]
    fn h_bar_values() {
        // h̄(4) = 4^{-2/3} - 4^{-1/3}
        assert!(close(
            h_bar(4.0),
            4f64.powf(-2.0 / 3.0) - 4f64.powf(-1.0 / 3.0)
        ));
    }

    #[test]
    fn prophet_small_case() {
        let b = prophet_block_distribution(2, 4, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(b.k, vec![1, 4]);
        let alpha = 4f64.powf(-1.0 / 3.0);
        assert!(close(b.alpha, alpha));
        assert!(close(b.xi, 1.0 - alpha + alpha.powi(4)));
        assert!(b.xi <= b.xi_bound);
        assert_eq!(b.cdf(-1.0), 0.0);
        assert!(close(b.cdf(0.5), alpha));
        assert!(close(b.cdf(0.7), alpha));
        assert_eq!(b.cdf(1.0), 1.0);
    }

    #[test]
    fn prophet_preconditions() {
        assert!(prophet_block_distribution(3, 3, &[0.0, 0.1, 0.2, 0.3]).is_err());
        assert!(prophet_block_distribution(2, 4, &[0.0, 0.0, 1.0]).is_err());
        assert!(prophet_block_distribution(2, 4, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn prophet_union_event() {
        let b = prophet_block_distribution(3, 1_000_000, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let s = b.union_event_rate(20_000, 4).unwrap();
        assert!(s.rate >= 1.0 - b.xi - 4.0 * s.stderr, "{s:?} xi={}", b.xi);
    }

    #[test]
    fn prophet_threshold_rules_respect_bound() {
        let inst = prophet_instance(0.1, 3, 1_000_000).unwrap();
        let (j, best) = inst.best_threshold();
        assert!(best <= inst.bound, "best {best} bound {}", inst.bound);
        let mc = inst.threshold_ratio_mc(j, 20_000, 9).unwrap();
        assert!((mc - best).abs() < 0.02, "mc {mc} exact {best}");
    }
}

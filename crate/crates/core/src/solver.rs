//! Full-information and upper-bound solvers.
//!
//! With `p` known, the best `q` is found by backward induction on the
//! continuation values
//!
//! ```text
//! C_{n+1} = 0,   C_i = max_{q_i ∈ [0,1]} (q_i/i)·G_i + (1 - q_i/i)·C_{i+1}
//! ```
//!
//! with `G_i = i·λ_i(p)`. The objective is affine in `q_i`, so the optimum is
//! 0/1-valued. The same recursion with an estimated `G` drives the
//! sample-based learner.

use crate::dist::{harmonic, HorizonDistribution};
use crate::error::{Error, Result};
use crate::strategy::{success_probability, threshold_profile, Strategy, ThresholdMixture};

/// Slack allowed when asserting the `θ/e` sandwich in floating point.
const SANDWICH_TOL: f64 = 1e-12;

/// Two values of `i·λ_i` closer than this count as tied for `K*`.
const THETA_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub q_opt: Strategy,
    pub value: f64,
    /// `C_1, …, C_{n+1}`.
    pub continuation: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaResult {
    pub theta: f64,
    pub k_star: usize,
}

/// Maximizes `Σ_i U_{i-1}(q)(q_i/i)·G_i` over `q ∈ [0,1]^n`, accepting on
/// ties. Returns the 0/1 maximizer and `C_1..C_{n+1}`.
pub fn backward_solve(g: &[f64]) -> (Strategy, Vec<f64>) {
    let n = g.len();
    let mut c = vec![0.0; n + 1];
    let mut q = vec![0.0; n];
    for i in (1..=n).rev() {
        let next = c[i];
        let gi = g[i - 1];
        if gi >= next {
            q[i - 1] = 1.0;
            c[i - 1] = gi / i as f64 + (1.0 - 1.0 / i as f64) * next;
        } else {
            c[i - 1] = next;
        }
    }
    (Strategy::from_raw(q), c)
}

/// Surrogate objective `Σ_i U_{i-1}(q)(q_i/i)·G_i` over the length of `g`.
pub fn surrogate_value(g: &[f64], q: &Strategy) -> f64 {
    let mut u = 1.0;
    let mut total = 0.0;
    for (idx, gi) in g.iter().enumerate() {
        let i = (idx + 1) as f64;
        let qi = q.q(idx + 1);
        total += u * qi / i * gi;
        u *= 1.0 - qi / i;
    }
    total
}

/// Exact `sup_q A(p, q)` and a 0/1 maximizer.
pub fn solve_optimal(p: &HorizonDistribution) -> SolveResult {
    let g = p.lambda_sequence().scaled();
    let (q_opt, continuation) = backward_solve(&g);
    SolveResult {
        q_opt,
        value: continuation[0],
        continuation,
    }
}

/// `θ(p) = max_i i·λ_i(p)` and the smallest index attaining it.
pub fn theta(p: &HorizonDistribution) -> ThetaResult {
    let scaled = p.lambda_sequence().scaled();
    let max = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let k_star = scaled
        .iter()
        .position(|&v| v >= max - THETA_TIE_TOL)
        .map_or(1, |i| i + 1);
    ThetaResult { theta: max, k_star }
}

/// Classical cutoff for a horizon of exactly `k`: the smallest `s` with
/// `Σ_{i=s}^{k-1} 1/i ≤ 1`.
pub fn classical_cutoff(k: usize) -> usize {
    let mut s = k.max(1);
    let mut tail = 0.0;
    while s > 1 && tail + 1.0 / (s - 1) as f64 <= 1.0 {
        s -= 1;
        tail += 1.0 / s as f64;
    }
    s
}

/// The single-threshold rule built from `θ(p)`: play the classical
/// secretary cutoff for horizon `K*`. Returns the rule, its cutoff and
/// value. Panics if `θ/e ≤ value ≤ sup_q A(p, q)` fails, which would be a
/// bug.
pub fn single_threshold_approx(p: &HorizonDistribution) -> (Strategy, f64) {
    let (q, _, value) = single_threshold_approx_detail(p);
    (q, value)
}

pub fn single_threshold_approx_detail(p: &HorizonDistribution) -> (Strategy, usize, f64) {
    let t = theta(p);
    let cutoff = classical_cutoff(t.k_star);
    let q = Strategy::single_threshold(cutoff, p.len().max(cutoff)).expect("cutoff >= 1");
    let value = success_probability(p, &q);
    let opt = solve_optimal(p).value;
    assert!(
        t.theta / std::f64::consts::E <= value + SANDWICH_TOL,
        "theta/e = {} exceeds A(p, q) = {value} for cutoff {cutoff}",
        t.theta / std::f64::consts::E
    );
    assert!(
        value <= opt + SANDWICH_TOL,
        "single-threshold value {value} exceeds the optimum {opt}"
    );
    (q, cutoff, value)
}

/// Exhaustive scan of `A(p, q^(l))` for `l = 1..=n+1`; smallest maximizer.
pub fn best_single_threshold(p: &HorizonDistribution) -> (usize, f64) {
    let profile = threshold_profile(&p.lambda_sequence());
    let mut best = (1, f64::NEG_INFINITY);
    for (idx, &v) in profile.iter().enumerate() {
        if v > best.1 {
            best = (idx + 1, v);
        }
    }
    best
}

/// The mixture `x^(n̄)`: `x_1 = 1/(1+H_{n̄-1})`, `x_l = x_1/(l-1)` for
/// `2 ≤ l ≤ n̄`. Every `p` supported on `[n̄]` gets exactly `x_1`.
pub fn minimax_mixture(n_bar: usize) -> Result<ThresholdMixture> {
    if n_bar == 0 {
        return Err(Error::range("n_bar", "must be >= 1"));
    }
    let x1 = 1.0 / (1.0 + harmonic(n_bar - 1));
    let mut w = Vec::with_capacity(n_bar);
    w.push(x1);
    w.extend((2..=n_bar).map(|l| x1 / (l - 1) as f64));
    Ok(ThresholdMixture::from_raw(w))
}

/// Guaranteed value of [`minimax_mixture`] against any `p` on `[n̄]`.
pub fn minimax_value(n_bar: usize) -> f64 {
    1.0 / (1.0 + harmonic(n_bar.saturating_sub(1)))
}

/// Support size `⌈μ̄ ln μ̄⌉` used when only `E[N] ≤ μ̄` is known.
pub fn expected_bound_support(mu_bar: f64) -> Result<usize> {
    if !(mu_bar > 1.0 && mu_bar.is_finite()) {
        return Err(Error::range(
            "mu_bar",
            format!("need mu_bar > 1, got {mu_bar}"),
        ));
    }
    Ok(((mu_bar * mu_bar.ln()).ceil() as usize).max(1))
}

/// `x^(⌈μ̄ ln μ̄⌉)`.
pub fn minimax_mixture_expected_bound(mu_bar: f64) -> Result<ThresholdMixture> {
    minimax_mixture(expected_bound_support(mu_bar)?)
}

/// Pre-asymptotic guarantee `1/(2 + ln(n-1)) · (1 - μ̄/n)` for
/// `n = ⌈μ̄ ln μ̄⌉`, valid for every `p` with mean at most `μ̄`.
pub fn expected_bound_guarantee(mu_bar: f64) -> Result<f64> {
    let n = expected_bound_support(mu_bar)?;
    if n < 2 {
        return Ok(0.0);
    }
    Ok((1.0 - mu_bar / n as f64).max(0.0) / (2.0 + ((n - 1) as f64).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::mixture_success_probability;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn solve_delta_examples() {
        let r = solve_optimal(&HorizonDistribution::delta(4).unwrap());
        assert_eq!(r.q_opt.values(), &[0.0, 1.0, 1.0, 1.0]);
        assert!(close(r.value, 11.0 / 24.0));
        assert_eq!(r.continuation.len(), 5);
        assert_eq!(r.continuation[4], 0.0);

        let r = solve_optimal(&HorizonDistribution::delta(1).unwrap());
        assert_eq!(r.q_opt.values(), &[1.0]);
        assert!(close(r.value, 1.0));
    }

    #[test]
    fn solve_pstar_value() {
        let r = solve_optimal(&HorizonDistribution::worst_case_pstar(3).unwrap());
        assert!(close(r.value, 6.0 / 11.0));
    }

    #[test]
    fn delta_optimum_is_single_threshold() {
        for n in 1..40 {
            let r = solve_optimal(&HorizonDistribution::delta(n).unwrap());
            assert!(r.q_opt.as_threshold().is_some(), "n={n}");
        }
    }

    #[test]
    fn value_equals_success_probability_of_maximizer() {
        let p = HorizonDistribution::from_weights(&[0.2, 0.1, 0.0, 0.3, 0.4]).unwrap();
        let r = solve_optimal(&p);
        assert!(close(r.value, success_probability(&p, &r.q_opt)));
    }

    #[test]
    fn theta_examples() {
        let t = theta(&HorizonDistribution::delta(7).unwrap());
        assert!(close(t.theta, 1.0));
        assert_eq!(t.k_star, 7);
        let t = theta(&HorizonDistribution::worst_case_pstar(3).unwrap());
        assert!(close(t.theta, 6.0 / 11.0));
        assert_eq!(t.k_star, 1);
        let t = theta(&HorizonDistribution::delta(1).unwrap());
        assert_eq!((t.theta, t.k_star), (1.0, 1));
    }

    #[test]
    fn single_threshold_approx_examples() {
        let (_, v) = single_threshold_approx(&HorizonDistribution::delta(10).unwrap());
        assert!((1.0 / std::f64::consts::E..=1.0).contains(&v));
        let h5 = harmonic(5);
        let (_, v) = single_threshold_approx(&HorizonDistribution::worst_case_pstar(5).unwrap());
        assert!(v >= 1.0 / h5 / std::f64::consts::E && v <= 1.0 / h5 + 1e-12);
        let (q, v) = single_threshold_approx(&HorizonDistribution::delta(1).unwrap());
        assert_eq!(q.values(), &[1.0]);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn classical_cutoff_matches_delta_optimum() {
        assert_eq!(classical_cutoff(1), 1);
        assert_eq!(classical_cutoff(2), 1);
        assert_eq!(classical_cutoff(3), 2);
        for k in 1..200 {
            let r = solve_optimal(&HorizonDistribution::delta(k).unwrap());
            let l = r.q_opt.as_threshold().unwrap();
            let q = Strategy::single_threshold(classical_cutoff(k), k).unwrap();
            let v = success_probability(&HorizonDistribution::delta(k).unwrap(), &q);
            assert!((v - r.value).abs() < 1e-12, "k={k} l={l}");
        }
    }

    #[test]
    fn best_single_threshold_examples() {
        let (l, v) = best_single_threshold(&HorizonDistribution::delta(3).unwrap());
        assert_eq!(l, 2);
        assert!(close(v, 0.5));
        assert_eq!(
            best_single_threshold(&HorizonDistribution::delta(1).unwrap()),
            (1, 1.0)
        );
    }

    #[test]
    fn uniform_best_threshold_approaches_two_over_e_squared() {
        let n = 1000;
        let (l, v) = best_single_threshold(&HorizonDistribution::uniform(n).unwrap());
        let e2 = std::f64::consts::E.powi(2);
        assert!((v - 2.0 / e2).abs() <= 0.01, "value {v}");
        let target = (n as f64 / e2).ceil() as i64;
        assert!((l as i64 - target).abs() <= 2, "l={l} target={target}");
    }

    #[test]
    fn minimax_examples() {
        assert_eq!(minimax_mixture(2).unwrap().weights(), &[0.5, 0.5]);
        let w = minimax_mixture(3).unwrap();
        for (a, b) in w.weights().iter().zip([0.4, 0.4, 0.2]) {
            assert!(close(*a, b));
        }
        assert_eq!(minimax_mixture(1).unwrap().weights(), &[1.0]);
        assert!(minimax_mixture(0).is_err());
        let p = HorizonDistribution::from_weights(&[0.9, 0.1]).unwrap();
        assert!(close(
            mixture_success_probability(&p, &minimax_mixture(2).unwrap()),
            0.5
        ));
    }

    #[test]
    fn expected_bound_examples() {
        assert_eq!(expected_bound_support(std::f64::consts::E).unwrap(), 3);
        assert_eq!(expected_bound_support(10.0).unwrap(), 24);
        assert!(minimax_mixture_expected_bound(1.0).is_err());
        let mix = minimax_mixture_expected_bound(std::f64::consts::E).unwrap();
        assert_eq!(mix.weights().len(), 3);
        for mu in [3.0, 10.0, 50.0] {
            let mix = minimax_mixture_expected_bound(mu).unwrap();
            let p = HorizonDistribution::delta(mu as usize).unwrap();
            let v = mixture_success_probability(&p, &mix);
            assert!(v >= expected_bound_guarantee(mu).unwrap());
        }
    }

    #[test]
    fn surrogate_with_exact_g_is_success_probability() {
        let p = HorizonDistribution::from_weights(&[0.2, 0.1, 0.0, 0.3, 0.4]).unwrap();
        let q = Strategy::new(vec![0.3, 0.5, 0.2, 0.9, 0.1]).unwrap();
        let g = p.lambda_sequence().scaled();
        assert!(close(surrogate_value(&g, &q), success_probability(&p, &q)));
    }
}

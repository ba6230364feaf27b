//! Brute-force oracles and random generators shared by the integration tests.
//! Nothing here calls the closed forms under test.
#![allow(dead_code)]

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Success probability on one arrival order (`perm[t]` is the value at time
/// `t+1`, the maximum is `perm.len()`), averaging over the strategy's coins.
pub fn success_on_permutation(perm: &[usize], q: &[f64]) -> f64 {
    let n = perm.len();
    let mut alive = 1.0;
    let mut best = 0;
    let mut win = 0.0;
    for (t, &v) in perm.iter().enumerate() {
        if v > best {
            best = v;
            let qt = q.get(t).copied().unwrap_or(1.0);
            if v == n {
                win += alive * qt;
            }
            alive *= 1.0 - qt;
        }
    }
    win
}

/// `A(δ^(n), q)` by enumerating all `n!` orders.
pub fn brute_force_fixed(n: usize, q: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for perm in (1..=n).permutations(n) {
        total += success_on_permutation(&perm, q);
        count += 1;
    }
    total / count as f64
}

/// `A(p, q)` by enumerating the horizon and every order.
pub fn brute_force_success(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .enumerate()
        .filter(|(_, &pn)| pn > 0.0)
        .map(|(i, &pn)| pn * brute_force_fixed(i + 1, q))
        .sum()
}

/// Best deterministic rule: every `q ∈ {0,1}^n` against every order.
pub fn brute_force_optimum(p: &[f64]) -> f64 {
    let n = p.len();
    // per-horizon permutations are reused across the 2^n rules
    let perms: Vec<Vec<Vec<usize>>> = (1..=n).map(|k| (1..=k).permutations(k).collect()).collect();
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << n) {
        let q: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
        let v: f64 = p
            .iter()
            .enumerate()
            .filter(|(_, &pk)| pk > 0.0)
            .map(|(k, &pk)| {
                let ps = &perms[k];
                pk * ps
                    .iter()
                    .map(|pm| success_on_permutation(pm, &q))
                    .sum::<f64>()
                    / ps.len() as f64
            })
            .sum();
        best = best.max(v);
    }
    best
}

/// Uniform point of the simplex from sorted-uniform spacings.
pub fn random_simplex<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut p: Vec<f64> = cuts.windows(2).map(|w| w[1] - w[0]).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

pub fn random_q<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// `Σ_{i≤n} 1/i`, summed directly.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

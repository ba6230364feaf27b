//! Learn a near-optimal rule from i.i.d. samples of the horizon.

use random_horizon::dist::HorizonDistribution;
use random_horizon::learn::{
    algorithm1, algorithm1_estimated_horizon, draw_samples, learning_trials, sample_size_bound,
    tail_horizon, SampleBudget,
};
use random_horizon::solver::solve_optimal;
use random_horizon::success_probability;

fn main() -> random_horizon::Result<()> {
    let p = HorizonDistribution::geometric_truncated(0.98, 400)?;
    let (eps, delta) = (0.1, 0.1);
    let opt = solve_optimal(&p).value;

    let t = tail_horizon(&p, eps);
    let m = sample_size_bound(eps, delta, t)?;
    let out = algorithm1(&draw_samples(&p, m, 1)?, eps)?;
    println!("T = {t}, m = {m}: {} blocks up to {}", out.l_max, out.n_max);
    println!(
        "learned {:.5} vs optimal {opt:.5}",
        success_probability(&p, &out.q_hat)
    );

    let two = algorithm1_estimated_horizon(&p, eps, delta, 2)?;
    println!(
        "unknown T: estimated {} from {} draws, then {} draws; learned {:.5}",
        two.t_hat,
        two.m1,
        two.m2,
        success_probability(&p, &two.learned.q_hat)
    );

    println!("\nsmall fixed budgets (200 trials each):");
    for m in [5, 20, 80, 320] {
        let rows = learning_trials(&p, eps, delta, 200, SampleBudget::Fixed(m), 3)?;
        let pass = rows.iter().filter(|r| r.pass).count() as f64 / 200.0;
        let gap = rows.iter().map(|r| r.gap).sum::<f64>() / 200.0;
        println!("  m = {m:>4}: within ε {pass:>5.3}, mean gap {gap:.4}");
    }
    Ok(())
}

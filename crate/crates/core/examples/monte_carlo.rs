//! Simulate the arrival process and compare with the exact formulas,
//! including a hand-written rank policy.

use rand::Rng;
use random_horizon::dist::HorizonDistribution;
use random_horizon::sim::{simulate, simulate_custom, FnPolicy};
use random_horizon::solver::solve_optimal;
use random_horizon::{success_probability, Strategy};

fn main() -> random_horizon::Result<()> {
    let p = HorizonDistribution::poisson_truncated(20.0, 60)?;
    let trials = 200_000;

    let q = solve_optimal(&p).q_opt;
    let s = simulate(&p, &q, trials, 1)?;
    println!(
        "optimal rule: simulated {:.4} ± {:.4}, exact {:.4}",
        s.rate,
        s.stderr,
        success_probability(&p, &q)
    );

    let q = Strategy::single_threshold(4, 60)?;
    let s = simulate(&p, &q, trials, 2)?;
    println!(
        "threshold 4:  simulated {:.4} ± {:.4}, exact {:.4}",
        s.rate,
        s.stderr,
        success_probability(&p, &q)
    );

    // a coin-flipping rule: from time 5 on, take a best-so-far arrival w.p. 0.7
    let coin = FnPolicy::new("coin", |obs, rng| {
        obs.accepted.is_none() && obs.relative_rank == 1 && obs.t >= 5 && rng.random::<f64>() < 0.7
    });
    let s = simulate_custom(&p, &coin, trials, 3)?;
    let q = Strategy::new((1..=60).map(|t| if t >= 5 { 0.7 } else { 0.0 }).collect())?;
    println!(
        "coin rule:    simulated {:.4} ± {:.4}, exact {:.4}",
        s.rate,
        s.stderr,
        success_probability(&p, &q)
    );
    Ok(())
}

//! Known horizon law: the optimal rule, θ(p), and the single-threshold
//! approximation that always keeps a 1/e fraction of θ(p).

use random_horizon::dist::HorizonDistribution;
use random_horizon::solver::{
    best_single_threshold, single_threshold_approx_detail, solve_optimal, theta,
};

fn main() -> random_horizon::Result<()> {
    let cases = [
        ("delta(100)", HorizonDistribution::delta(100)?),
        ("uniform(100)", HorizonDistribution::uniform(100)?),
        ("pstar(100)", HorizonDistribution::worst_case_pstar(100)?),
        (
            "geometric(0.97, 200)",
            HorizonDistribution::geometric_truncated(0.97, 200)?,
        ),
        (
            "dirichlet(50)",
            HorizonDistribution::sample_dirichlet_uniform(50, 3)?,
        ),
    ];
    println!(
        "{:<22}{:>9}{:>9}{:>6}{:>8}{:>11}{:>8}{:>11}",
        "p", "optimum", "θ(p)", "K*", "cutoff", "its value", "best l", "its value"
    );
    for (name, p) in &cases {
        let sol = solve_optimal(p);
        let th = theta(p);
        let (_, cutoff, v) = single_threshold_approx_detail(p);
        let (l, bv) = best_single_threshold(p);
        println!(
            "{name:<22}{:>9.5}{:>9.5}{:>6}{:>8}{:>11.5}{:>8}{:>11.5}",
            sol.value, th.theta, th.k_star, cutoff, v, l, bv
        );
    }

    // the optimal rule accepts best-so-far arrivals on a union of intervals
    let p = HorizonDistribution::mixture(&[
        (0.6, &HorizonDistribution::delta(5)?),
        (0.4, &HorizonDistribution::delta(60)?),
    ])?;
    let q = solve_optimal(&p).q_opt;
    let accept: Vec<usize> = (1..=q.len()).filter(|&i| q.q(i) == 1.0).collect();
    println!(
        "\n0.6·δ(5) + 0.4·δ(60): accept at times {:?}..{:?} ({} of {})",
        accept.first(),
        accept.last(),
        accept.len(),
        q.len()
    );
    Ok(())
}

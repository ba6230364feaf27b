//! Only a bound on the horizon is known: the randomized threshold mixture
//! that earns exactly 1/(1+H_{n̄-1}) against every law on [1, n̄].

use random_horizon::dist::HorizonDistribution;
use random_horizon::solver::{
    expected_bound_guarantee, expected_bound_support, minimax_mixture, minimax_value,
};
use random_horizon::strategy::mixture_success_probability;

fn main() -> random_horizon::Result<()> {
    let nbar = 50;
    let mix = minimax_mixture(nbar)?;
    println!(
        "n̄ = {nbar}: guarantee {:.6}, x_1 = {:.4}, x_2 = {:.4}, x_50 = {:.5}",
        minimax_value(nbar),
        mix.weights()[0],
        mix.weights()[1],
        mix.weights()[49]
    );

    for (name, p) in [
        ("delta(1)", HorizonDistribution::delta(1)?),
        ("delta(50)", HorizonDistribution::delta(50)?),
        ("uniform(50)", HorizonDistribution::uniform(50)?),
        (
            "dirichlet(50)",
            HorizonDistribution::sample_dirichlet_uniform(50, 11)?,
        ),
    ] {
        println!("  {name:<14} {:.12}", mixture_success_probability(&p, &mix));
    }

    println!("\nguarantee vs n̄ (compare 1/ln n̄):");
    for nbar in [10, 100, 1_000, 10_000] {
        println!(
            "  {nbar:>6}  {:.5}  {:.5}",
            minimax_value(nbar),
            1.0 / (nbar as f64).ln()
        );
    }

    println!("\nonly E[N] ≤ μ̄ known:");
    for mu in [10.0, 100.0, 1000.0] {
        println!(
            "  μ̄ = {mu:>6}: support {:>6}, guarantee {:.5}",
            expected_bound_support(mu)?,
            expected_bound_guarantee(mu)?
        );
    }
    Ok(())
}

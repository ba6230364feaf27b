//! A single threshold at ⌈n/e²⌉ is good for almost every horizon law:
//! draw p uniformly from the simplex and look at the worst draws.

use random_horizon::sim::average_case_experiment;

fn main() -> random_horizon::Result<()> {
    println!(
        "{:>5}{:>6}{:>12}{:>12}{:>12}",
        "n", "l*", "frac ≤ .03", "mean A", "A(uniform)"
    );
    for n in [10, 30, 100, 300] {
        let r = average_case_experiment(n, 0.03, 5_000, 42)?;
        println!(
            "{n:>5}{:>6}{:>12}{:>12.5}{:>12.5}",
            r.l_star, r.fraction_below, r.mean_value, r.uniform_value
        );
    }
    println!("2/e² = {:.5}", 2.0 / std::f64::consts::E.powi(2));
    Ok(())
}

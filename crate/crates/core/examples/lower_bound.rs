//! Two nearby two-point horizon laws whose optimal rules differ: telling
//! them apart takes on the order of 1/ε² samples.

use random_horizon::learn::{hard_instance_lb, separation_check, switching_point};

fn main() -> random_horizon::Result<()> {
    for n in [10, 50, 200, 1000] {
        let (s, a) = switching_point(n)?;
        println!("n = {n:>4}: s* = {s:.5}, optimum at fixed n = {a:.5}");
    }
    println!("1/(1+e) = {:.5}\n", 1.0 / (1.0 + std::f64::consts::E));
    for eps in [0.05, 0.02, 0.01] {
        let inst = hard_instance_lb(200, eps)?;
        let sep = separation_check(&inst, eps);
        println!(
            "ε = {eps}: cross losses {:.4}/{:.4} (ε/3 = {:.4}), needs ≳ {:.0} samples",
            sep.loss_plus_rule_on_minus,
            sep.loss_minus_rule_on_plus,
            eps / 3.0,
            inst.min_samples
        );
    }
    Ok(())
}

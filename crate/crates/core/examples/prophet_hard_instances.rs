//! Hard instances for prophet-style objectives with a random horizon.

use random_horizon::meta::{geometric_values, non_iid_hard_instance, prophet_instance};

fn main() -> random_horizon::Result<()> {
    // deterministic values: every stopping time earns the same ratio
    for n in [10, 100, 2000] {
        let inst = non_iid_hard_instance(&geometric_values(0.1, n)?)?;
        println!("non-iid, x = 0.1, n = {n:>4}: ratio {:.5}", inst.value);
    }
    println!("limit 1/(1 + ln 10) = {:.5}\n", 1.0 / (1.0 + 10f64.ln()));

    // iid values from a block distribution
    let inst = prophet_instance(0.1, 4, 1 << 24)?;
    let b = &inst.block;
    println!(
        "iid, x = 0.1, n = 4, K = 2^24: k = {:?}, ξ = {:.4} (≤ {:.4})",
        b.k, b.xi, b.xi_bound
    );
    for j in 1..=b.n {
        println!(
            "  stop at first X ≥ θ_{j}: exact {:.4}, simulated {:.4}",
            inst.threshold_ratio(j),
            inst.threshold_ratio_mc(j, 20_000, j as u64)?
        );
    }
    let (j, best) = inst.best_threshold();
    println!("best threshold θ_{j}: {best:.4} ≤ bound {:.4}", inst.bound);
    Ok(())
}

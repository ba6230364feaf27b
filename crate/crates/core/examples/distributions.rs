//! Horizon distributions: families, λ-sequences, JSON specs and sampling.

use random_horizon::dist::{DistributionSpec, HorizonDistribution};
use random_horizon::rng::stream_rng;

fn main() -> random_horizon::Result<()> {
    let families = [
        ("delta(10)", HorizonDistribution::delta(10)?),
        ("uniform(10)", HorizonDistribution::uniform(10)?),
        ("pstar(10)", HorizonDistribution::worst_case_pstar(10)?),
        (
            "geometric(0.8, 10)",
            HorizonDistribution::geometric_truncated(0.8, 10)?,
        ),
        (
            "poisson(4, 10)",
            HorizonDistribution::poisson_truncated(4.0, 10)?,
        ),
    ];
    for (name, p) in &families {
        let lam = p.lambda_sequence();
        println!(
            "{name:<20} mean {:>6.3}  λ_1 {:.4}  max iλ_i {:.4}",
            p.mean(),
            lam.get(1),
            lam.scaled().iter().cloned().fold(0.0, f64::max)
        );
    }

    // the same distribution as a file would spell it
    let spec: DistributionSpec =
        serde_json::from_str(r#"{"kind":"geometric","n":10,"param":0.8}"#).unwrap();
    println!("\nfrom JSON: {:?}", spec.build()?.probs());
    println!(
        "as JSON:   {}",
        serde_json::to_string(&families[0].1.to_spec()).unwrap()
    );

    let p = HorizonDistribution::mixture(&[(0.5, &families[0].1), (0.5, &families[4].1)])?;
    let sampler = p.sampler();
    let mut rng = stream_rng(1, 0);
    let draws: Vec<usize> = (0..15).map(|_| sampler.sample(&mut rng)).collect();
    println!("\n15 draws from ½δ(10) + ½poisson: {draws:?}");

    let d = HorizonDistribution::sample_dirichlet_uniform(5, 7)?;
    println!("uniform point of the 5-simplex: {:.3?}", d.probs());
    Ok(())
}

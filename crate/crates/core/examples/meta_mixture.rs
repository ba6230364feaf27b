//! Turn any algorithm tuned for a known horizon into one for an unknown
//! horizon in [n̲, n̄] by guessing the horizon from a tailored mixture.

use random_horizon::meta::{
    meta_expected_performance, meta_log_bound, meta_mixture, PerformanceProfile, ProfileFn,
    PROPHET_C0,
};

fn main() -> random_horizon::Result<()> {
    let (lo, hi) = (1, 1000);
    for (label, c0, f) in [
        ("secretary (identity)", 1.0, ProfileFn::Identity),
        ("uniform values", PROPHET_C0, ProfileFn::UniformMax),
        ("exponential values", PROPHET_C0, ProfileFn::ExpMax),
    ] {
        let prof = PerformanceProfile::new(c0, f)?;
        let mix = meta_mixture(&prof, lo, hi)?;
        let at = |n| meta_expected_performance(&mix, &prof, n);
        println!(
            "{label:<22} guarantee {:.5} (log bound {:.5}); at n=1: {:.5}, n=500: {:.5}, n=1000: {:.5}",
            mix.guarantee,
            meta_log_bound(&prof, lo, hi)?,
            at(1)?,
            at(500)?,
            at(1000)?
        );
    }
    Ok(())
}

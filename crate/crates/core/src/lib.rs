//! Secretary problems with a random time horizon.
//!
//! The number of arrivals `N` is drawn from a distribution `p` independent of
//! the (uniformly random) arrival order. This crate evaluates and optimizes
//! stopping strategies against such horizons:
//!
//! - [`dist`]: horizon distributions and the λ-sequence `λ_i = Σ_{l≥i} p_l/l`;
//! - [`strategy`]: acceptance vectors `q`, exact success probability `A(p,q)`,
//!   threshold mixtures;
//! - [`solver`]: the optimal rule by backward induction, the `θ(p)/e`
//!   single-threshold approximation, the minimax mixture for `N ≤ n̄`;
//! - [`learn`]: learning a rule from samples of `N`, and the two-point
//!   instances that make learning hard;
//! - [`sim`]: a Monte Carlo of the arrival process, arbitrary rank policies,
//!   the adaptive adversary and the average-case experiment;
//! - [`meta`]: horizon randomization for black-box algorithms and prophet
//!   hard instances;
//! - [`cli`]: the `rhsec` experiment driver.
//!
//! ```
//! use random_horizon::{dist::HorizonDistribution, solver};
//!
//! let p = HorizonDistribution::worst_case_pstar(3)?;
//! let best = solver::solve_optimal(&p);
//! assert!((best.value - 6.0 / 11.0).abs() < 1e-12);
//! # Ok::<(), random_horizon::Error>(())
//! ```

pub mod cli;
pub mod dist;
mod error;
pub mod learn;
pub mod meta;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod strategy;

pub use dist::{harmonic, HorizonDistribution, LambdaSequence};
pub use error::{Error, Result};
pub use strategy::{success_probability, Strategy, ThresholdMixture};

//! Dividend valuation for spectrally negative Lévy surplus processes under a
//! mixed ratcheting-periodic strategy.
//!
//! The surplus earns premiums and suffers diffusion/claim losses; dividends are
//! paid two ways at once: a continuous stream whose rate ratchets once from
//! `c1` to `c1 + c2` the first time the surplus reaches a barrier `b`, and lump
//! payments that push the surplus down to a barrier `a` at the jump times of an
//! independent Poisson clock with rate `gamma`.
//!
//! The crate computes, in closed form via scale functions:
//! - the expected net present value of all dividends paid up to ruin,
//!   [`valuation::value`], split by region and by stream;
//! - the Laplace transform of the ruin time, [`ruin::laplace_ruin`];
//! - the degenerate single-strategy limits (periodic-only and ratcheting-only);
//!
//! and validates them against an independent Monte Carlo simulator of the
//! controlled surplus, [`montecarlo::estimate`]. Parameter studies and barrier
//! optimization live in [`studies`].

pub mod error;
pub mod models;
pub mod montecarlo;
pub mod ruin;
pub mod scale;
pub mod studies;
pub mod valuation;

mod pool;

pub use error::{LevyError, Result};
pub use models::{DrainedProcess, LevyModel, ModelKind};
pub use montecarlo::{
    estimate, estimate_pair, estimate_pair_with_workers, simulate_path, McEstimate, PathOutcome,
    SimConfig, Target,
};
pub use ruin::{laplace_ruin, laplace_ruin_ratchet_only, RuinTransform};
pub use scale::{Backend, BrownianRoots, Kernels, Rate, ScaleKit};
pub use studies::{
    optimize_a, optimize_b, sigma_profile, sweep, Axis, BStarReport, OptimumReport, Quantity,
    SigmaProfile, SweepFixed, SweepRow, SweepSpec,
};
pub use valuation::{
    value, value_lower, value_middle, value_periodic_only, value_ratchet_only, value_upper, Region,
    Strategy, ValuationResult,
};

//! Kloosterman partial-sum paths modulo odd prime powers.
//!
//! The crate evaluates full and partial normalized Kloosterman sums, builds
//! the polygonal paths through their prefix knots together with the step
//! approximation and its discrete Fourier coefficients, samples the limiting
//! random Fourier series, and provides the moment, bound, and
//! law-comparison diagnostics used to check the expected limit behaviour at
//! desk scale.
//!
//! Everything is deterministic: samplers are counter-based functions of
//! (seed, index) and every parallel reduction runs in a fixed order, so
//! results are bit-identical across thread counts.

pub mod bounds;
mod detsum;
mod dft;
pub mod error;
pub mod kloosterman;
pub mod limitlaw;
pub mod modarith;
pub mod path;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use kloosterman::{
    full_sum, partial_sums, salie_reference, BulkPartialSums, PartialSumSeries, SumContext,
};
pub use limitlaw::{
    limit_series_eval, sample_mu, sigma_subgaussian, truncated_surrogate, LimitSeriesSample,
    MuSampler,
};
pub use modarith::{e_q, inv_mod, units_iter, PrimePowerModulus, UnitResidue};
pub use path::{
    fourier_coeff, fourier_coeff_coprime, index_map, interval_between, step_approx, PathFunction,
    RationalTime, StepInterval,
};
pub use report::{LawComparisonReport, MomentReport, Report, SupReport};
pub use verify::{
    beta_parameter, compare_laws, ks_distance, log_gap_grid, moment, moment_batch,
    moment_report_for_pairs, sup_statistics, tightness_scan, PathMarginal, TightnessScanConfig,
};

pub use num_complex::Complex64;

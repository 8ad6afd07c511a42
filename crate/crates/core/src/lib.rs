//! Method of truncated moments for grouped exponential (and Pareto I) data.
//!
//! Observations are only known through counts per contiguous interval
//! `(c_{j-1}, c_j]`. The estimator matches the truncated mean of the ogive
//! over a fixed window `[t, T]` to the same functional of the linearized
//! exponential cdf and solves for the mean `theta` (the Pareto tail index is
//! `alpha = 1 / theta` after the log transform).
//!
//! Modules, bottom up:
//!
//! * [`grouped`]: boundaries, grouped samples, ogive, histogram, quantile.
//! * [`model`]: exponential / Pareto models and the linearized cdf.
//! * [`window`]: resolution of `(t, T)` against the cuts.
//! * [`mtum`]: the estimator, its solver and delta-method variance.
//! * [`mle`]: grouped maximum likelihood and Fisher information.
//! * [`efficiency`]: asymptotic relative efficiency tables.
//! * [`montecarlo`]: the seeded simulation study.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod efficiency;
pub mod error;
pub mod grouped;
pub mod mle;
pub mod model;
pub mod montecarlo;
pub mod mtum;
pub mod numeric;
pub mod window;

pub use efficiency::{are_mtum_vs_mle, are_table, AreTable, EfficiencyCell};
pub use error::{Error, Result};
pub use grouped::{group_raw, GroupBoundaries, GroupedSample};
pub use mle::{fisher_information, mle_estimate, ungrouped_mle_variance, MleEstimate, TailTerm};
pub use model::{ExponentialModel, ParetoModel};
pub use montecarlo::{run_study, RandomStream, SimulationConfig, SimulationReport};
pub use mtum::{
    asymptotic_variance, population_truncated_moment, sample_truncated_moment, solve,
    CovarianceMatrix, MtumEstimate, SolverKind, SolverOptions,
};
pub use window::{resolve_window, TruncationWindow};

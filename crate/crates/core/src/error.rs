use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure surfaced by the estimation pipeline.
///
/// The variant name doubles as the machine-readable error tag printed by the
/// CLI, see [`Error::name`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample contains no observations")]
    EmptySample,
    #[error("invalid group boundaries: {0}")]
    InvalidBoundaries(String),
    #[error("invalid group counts: {0}")]
    InvalidCounts(String),
    #[error("observation {0} is not strictly positive")]
    NonPositiveValue(f64),
    #[error("x = {x} lies beyond the last finite cut {last_cut}")]
    UndefinedBeyondLastCut { x: f64, last_cut: f64 },
    #[error("quantile level {level} falls on the flat segment of zero-count group {group}")]
    DegenerateInterval { level: f64, group: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value {y} is not above the Pareto threshold {x0}")]
    BelowThreshold { y: f64, x0: f64 },
    #[error("invalid truncation window: {0}")]
    InvalidWindow(String),
    #[error("right truncation point {right} exceeds the last finite cut {last_cut}")]
    WindowBeyondCuts { right: f64, last_cut: f64 },
    #[error("truncation points {left} and {right} lie in the same group; the parameter drops out")]
    NonIdentifiableWindow { left: f64, right: f64 },
    #[error("no empirical mass inside the truncation window")]
    EmptyWindow,
    #[error("sample truncated moment {mu} is outside the attainable range ({lower}, {upper})")]
    NoSolution { mu: f64, lower: f64, upper: f64 },
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("all observations fall in a single group; the likelihood has no interior maximum")]
    NonIdentifiable,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name, e.g. `"NonIdentifiableWindow"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptySample => "EmptySample",
            Error::InvalidBoundaries(_) => "InvalidBoundaries",
            Error::InvalidCounts(_) => "InvalidCounts",
            Error::NonPositiveValue(_) => "NonPositiveValue",
            Error::UndefinedBeyondLastCut { .. } => "UndefinedBeyondLastCut",
            Error::DegenerateInterval { .. } => "DegenerateInterval",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::BelowThreshold { .. } => "BelowThreshold",
            Error::InvalidWindow(_) => "InvalidWindow",
            Error::WindowBeyondCuts { .. } => "WindowBeyondCuts",
            Error::NonIdentifiableWindow { .. } => "NonIdentifiableWindow",
            Error::EmptyWindow => "EmptyWindow",
            Error::NoSolution { .. } => "NoSolution",
            Error::SolverFailure(_) => "SolverFailure",
            Error::NonIdentifiable => "NonIdentifiable",
            Error::Parse(_) => "Parse",
        }
    }

    /// Input errors (bad files, specs, arguments) as opposed to failures of
    /// the estimation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidBoundaries(_)
                | Error::InvalidCounts(_)
                | Error::NonPositiveValue(_)
                | Error::Parse(_)
                | Error::EmptySample
        )
    }
}

//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// An evaluation argument (usually a time) was outside the function domain.
    #[error("domain error: {what}")]
    Domain { what: String },

    /// The quadrature could not meet the requested tolerance within its
    /// subdivision budget. Carries the best estimate obtained.
    #[error("accuracy not attained in {context}: best estimate {best_estimate} (error bound {est_error})")]
    Accuracy {
        context: String,
        best_estimate: f64,
        est_error: f64,
    },

    /// A semi-infinite integral has a divergent tail (power exponent >= -1),
    /// or the truncation cap was hit under the `ErrorIfDivergent` policy.
    #[error("divergent integral{}: tail behaves like t^{tail_exponent}", match moment_order { Some(n) => format!(" for moment order {n}"), None => String::new() })]
    DivergentIntegral {
        moment_order: Option<usize>,
        tail_exponent: f64,
    },

    /// Shape statistics were requested from a moment set whose moments of
    /// order >= `from` are formally infinite.
    #[error("moments of order >= {from} are divergent; shape statistics undefined")]
    DivergentMoments { from: usize },

    /// The distribution has (numerically) zero variance or zero mass spread.
    #[error("degenerate distribution: {what}")]
    Degenerate { what: String },

    /// Reading or interpreting a tabulated-CDF file failed.
    #[error("tabulated distribution: {what}")]
    Tabulated { what: String },

    /// A distribution specification string could not be parsed.
    #[error("cannot parse distribution spec `{spec}`: {what}")]
    Spec { spec: String, what: String },
}

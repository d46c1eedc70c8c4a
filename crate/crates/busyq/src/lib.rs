//! Busy-period analysis of the M/G/∞ queue.
//!
//! The queue receives Poisson arrivals at rate λ and serves every customer
//! immediately; service times are i.i.d. with distribution function G and
//! mean α, giving traffic intensity ρ = λα. The busy period B is the maximal
//! interval during which at least one customer is present.
//!
//! The crate computes, for a catalog of service-time families:
//!
//! * raw busy-period moments E\[Bⁿ\] through closed forms and a derivative
//!   recurrence on the kernel transform, carried in log space so that values
//!   like E\[B⁸\] ≈ 10³⁵² at ρ = 100 are representable ([`moments`]);
//! * shape statistics — coefficient of variation, Pearson symmetry and
//!   kurtosis coefficients, which equal (1, 4, 9) for an exponential law
//!   ([`moments::shape_stats`]);
//! * the busy-period Laplace–Stieltjes transform, the CDF via a geometric
//!   convolution series, the β-family closed-form CDF and the heavy-traffic
//!   exponential approximation ([`transforms`]);
//! * an independent discrete-event Monte Carlo oracle ([`simulate`]);
//! * reproductions of the reference tables with embedded golden values and
//!   per-cell provenance ([`tables`]).

pub mod distributions;
pub mod error;
pub mod moments;
pub mod quadrature;
pub mod simulate;
pub mod special;
pub mod tables;
pub mod transforms;

pub use distributions::{QueueConfig, ServiceDistribution};
pub use error::{Error, Result};
pub use moments::{CDerivatives, MomentSet, ShapeStats};
pub use quadrature::{QuadratureResult, QuadratureSettings, TailPolicy};
pub use transforms::GridFunction;

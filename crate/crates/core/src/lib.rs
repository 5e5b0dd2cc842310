//! Distribution of the k-th strongest of M independent Rician links and the
//! performance of a k-th best selection-combining receiver.
//!
//! The channel power gain of link m is `Z_m = (ν_m + σ N1)² + (σ N2)²`, a
//! non-central chi-square variable with two degrees of freedom. The crate
//! provides:
//!
//! - [`specfun`]: Marcum-Q, Bessel I0, log-gamma, incomplete gamma and E1;
//! - [`evt`]: Gumbel-type limit law of the k-th maximum, its normalising
//!   constants, and the moderate-M Poisson form driven by `u(z)`;
//! - [`metrics`]: outage, average throughput, effective throughput and BEP;
//! - [`oracle`]: exact order-statistic CDF and seeded Monte Carlo sampling;
//! - [`acceptance`]: the seed-pinned validation suite.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod acceptance;
pub mod error;
pub mod evt;
pub mod metrics;
pub mod oracle;
pub mod quad;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type LinkEnsemble = evt::LinkEnsemble<f64>;
pub type NormConstants = evt::NormConstants<f64>;
pub type MetricParams = metrics::MetricParams<f64>;
pub type EmpiricalCdf = oracle::EmpiricalCdf<f64>;
pub type Accuracy = specfun::Accuracy<f64>;
pub use evt::OrderSelector;

//! Special functions behind the order-statistic laws: Marcum-Q, modified
//! Bessel I0, log-gamma, the integer-order regularized upper incomplete
//! gamma function and the exponential integral E1.
//!
//! Every routine is a pure function of its arguments. Tail quantities are
//! formed in the log domain and exponentiated last.

mod asymptotic;
mod bessel;
mod expint;
mod gamma;
mod marcum;

pub use asymptotic::{gaussian_q, gaussian_q_asymptotic, ln_marcum_q1_asymptotic, marcum_q1_asymptotic};
pub use bessel::{bessel_i0, bessel_i0e, log_bessel_i0};
pub use expint::{exp_integral_e1, exp_integral_e1_scaled};
pub use gamma::{ln_reg_upper_gamma, log_gamma, reg_lower_gamma, reg_upper_gamma};
pub use marcum::{
    ln_marcum_q1, ln_marcum_q1_complement, marcum_q1, marcum_q1_complement, marcum_q1_with,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Series accuracy controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy<T> {
    rel_tol: T,
    max_terms: usize,
}

impl<T: Real> Accuracy<T> {
    pub const MIN_TERMS: usize = 16;

    pub fn new(rel_tol: T, max_terms: usize) -> Result<Self> {
        if !(rel_tol > T::zero() && rel_tol < T::c(1e-3)) {
            return Err(Error::Invalid(format!(
                "rel_tol must lie in (0, 1e-3), got {rel_tol}"
            )));
        }
        if max_terms < Self::MIN_TERMS {
            return Err(Error::Invalid(format!(
                "max_terms must be at least {}, got {max_terms}",
                Self::MIN_TERMS
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> T {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl<T: Real> Default for Accuracy<T> {
    /// 1e-12 relative (or a few ulps for `f32`), 10 000 terms.
    fn default() -> Self {
        let floor = T::epsilon() * T::c(8.0);
        Self {
            rel_tol: T::c(1e-12).max(floor),
            max_terms: 10_000,
        }
    }
}

pub(crate) fn check_finite_nonneg<T: Real>(func: &'static str, name: &str, x: T) -> Result<()> {
    if !x.is_finite() || x < T::zero() {
        return crate::error::domain(func, format!("{name} must be finite and >= 0, got {x}"));
    }
    Ok(())
}

pub(crate) fn check_finite_pos<T: Real>(func: &'static str, name: &str, x: T) -> Result<()> {
    if !x.is_finite() || x <= T::zero() {
        return crate::error::domain(func, format!("{name} must be finite and > 0, got {x}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_invariants() {
        let acc = Accuracy::<f64>::default();
        assert_eq!(acc.rel_tol(), 1e-12);
        assert_eq!(acc.max_terms(), 10_000);
        assert!(Accuracy::<f32>::default().rel_tol() < 1e-3);
        assert!(Accuracy::new(0.0f64, 100).is_err());
        assert!(Accuracy::new(1e-3f64, 100).is_err());
        assert!(Accuracy::new(1e-8f64, 15).is_err());
        assert!(Accuracy::new(1e-8f64, 16).is_ok());
    }
}

//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn c(x: f64) -> Self {
        // f32/f64 conversions from f64 never fail
        Self::from_f64(x).unwrap()
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub(crate) fn ln_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Running `log(Σ exp(x_i))` that rescales when a larger term arrives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum<T> {
    shift: T,
    scaled: T,
}

impl<T: Real> LogSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            shift: T::neg_infinity(),
            scaled: T::zero(),
        }
    }

    pub(crate) fn push(&mut self, log_term: T) {
        if log_term == T::neg_infinity() {
            return;
        }
        if log_term > self.shift {
            self.scaled = self.scaled * (self.shift - log_term).exp() + T::one();
            self.shift = log_term;
        } else {
            self.scaled = self.scaled + (log_term - self.shift).exp();
        }
    }

    pub(crate) fn value(&self) -> T {
        if self.shift == T::neg_infinity() {
            T::neg_infinity()
        } else {
            self.shift + self.scaled.ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_matches_direct() {
        let xs = [-3.0f64, 0.5, 2.0, -700.0, 1.0];
        let mut acc = LogSum::new();
        for &x in &xs {
            acc.push(x);
        }
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((acc.value() - direct).abs() < 1e-14);
        assert_eq!(LogSum::<f64>::new().value(), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_add_exp_handles_infinities() {
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
        assert!((ln_add_exp(0.0f64, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((ln_add_exp(1000.0f64, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}

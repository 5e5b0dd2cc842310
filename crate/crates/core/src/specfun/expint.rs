use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{check_finite_pos, EULER_GAMMA};

const MAX_ITER: usize = 10_000;

fn series_e1<T: Real>(x: T) -> T {
    // -γ - ln x - Σ (-x)^n / (n n!)
    let mut sum = T::zero();
    let mut pow = T::one();
    for n in 1..200usize {
        let nf = T::from_usize_lossy(n);
        pow = pow * (-x) / nf;
        let term = pow / nf;
        sum = sum + term;
        if term.abs() < T::epsilon() * T::c(0.1) * sum.abs() {
            break;
        }
    }
    -T::c(EULER_GAMMA) - x.ln() - sum
}

fn cf_scaled_e1<T: Real>(x: T) -> Result<T> {
    // modified Lentz on e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
    let tiny = T::min_positive_value() / T::epsilon();
    let two = T::c(2.0);
    let mut b = x + T::one();
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let ifl = T::from_usize_lossy(i);
        let an = -ifl * ifl;
        b = b + two;
        d = T::one() / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h = h * del;
        if (del - T::one()).abs() <= T::epsilon() {
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        func: "exp_integral_e1",
        terms: MAX_ITER,
    })
}

/// Exponential integral E1(x) = ∫_x^∞ e^{-t}/t dt for x > 0.
///
/// Underflows to 0 for x beyond ~745 (f64); [`exp_integral_e1_scaled`]
/// stays representable.
pub fn exp_integral_e1<T: Real>(x: T) -> Result<T> {
    check_finite_pos("exp_integral_e1", "x", x)?;
    if x <= T::one() {
        Ok(series_e1(x))
    } else {
        Ok(cf_scaled_e1(x)? * (-x).exp())
    }
}

/// e^x · E1(x), accurate from tiny x up to 1e6 and beyond.
pub fn exp_integral_e1_scaled<T: Real>(x: T) -> Result<T> {
    check_finite_pos("exp_integral_e1", "x", x)?;
    if x <= T::one() {
        Ok(series_e1(x) * x.exp())
    } else {
        cf_scaled_e1(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_reference_points() {
        assert!((exp_integral_e1(1.0f64).unwrap() - 0.219_383_934_395_520_27).abs() < 1e-15);
        assert!((exp_integral_e1(0.1f64).unwrap() - 1.822_923_958_419_390_7).abs() < 1e-14);
    }

    #[test]
    fn scaled_large_argument() {
        let s = exp_integral_e1_scaled(1000.0f64).unwrap();
        assert!(s > 0.000_999 && s < 0.001);
        let s = exp_integral_e1_scaled(1e6f64).unwrap();
        assert!((s * 1e6 - (1.0 - 1e-6 + 2e-12)).abs() < 1e-14);
        assert_eq!(exp_integral_e1(1000.0f64).unwrap(), 0.0);
    }

    #[test]
    fn bracketing_on_log_grid() {
        for i in 0..=160 {
            let x = 10f64.powf(-2.0 + 8.0 * i as f64 / 160.0);
            let s = exp_integral_e1_scaled(x).unwrap();
            assert!(1.0 / (x + 1.0) < s && s < 1.0 / x, "x={x} s={s}");
        }
    }

    #[test]
    fn branches_agree_at_one() {
        let below = series_e1(1.0f64);
        let above = cf_scaled_e1(1.0f64).unwrap() * (-1.0f64).exp();
        assert!((below - above).abs() < 1e-15);
    }

    #[test]
    fn domain() {
        assert!(exp_integral_e1(0.0f64).is_err());
        assert!(exp_integral_e1_scaled(-2.0f64).is_err());
    }
}

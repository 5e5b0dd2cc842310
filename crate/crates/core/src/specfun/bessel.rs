use crate::error::Result;
use crate::scalar::Real;

use super::check_finite_nonneg;

const SERIES_LIMIT: f64 = 20.0;

/// log I0(x) for x >= 0. Power series below x = 20, Hankel expansion above.
pub fn log_bessel_i0<T: Real>(x: T) -> Result<T> {
    check_finite_nonneg("bessel_i0", "x", x)?;
    if x <= T::c(SERIES_LIMIT) {
        let q = x * x * T::c(0.25);
        let mut term = T::one();
        let mut sum = T::one();
        let mut m = 1usize;
        loop {
            let mf = T::from_usize_lossy(m);
            term = term * q / (mf * mf);
            sum = sum + term;
            if term <= sum * T::epsilon() * T::c(0.25) {
                break;
            }
            m += 1;
        }
        return Ok(sum.ln());
    }
    // e^x / sqrt(2πx) · Σ ((2m-1)!!)^2 / (m! (8x)^m)
    let eight_x = T::c(8.0) * x;
    let mut term = T::one();
    let mut sum = T::one();
    for m in 1..64usize {
        let odd = T::from_usize_lossy(2 * m - 1);
        let next = term * odd * odd / (T::from_usize_lossy(m) * eight_x);
        if next >= term {
            break;
        }
        term = next;
        sum = sum + term;
        if term <= sum * T::epsilon() * T::c(0.25) {
            break;
        }
    }
    Ok(x - T::c(0.5) * (T::TAU() * x).ln() + sum.ln())
}

/// Modified Bessel function of the first kind, order 0. Overflows to
/// infinity beyond x ≈ 713 (f64); use [`log_bessel_i0`] there.
pub fn bessel_i0<T: Real>(x: T) -> Result<T> {
    Ok(log_bessel_i0(x)?.exp())
}

/// Exponentially scaled e^{-x} I0(x).
pub fn bessel_i0e<T: Real>(x: T) -> Result<T> {
    Ok((log_bessel_i0(x)? - x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Σ (x/2)^{2m} / (m!)^2, term by term.
    fn power_series_oracle(x: f64) -> f64 {
        let q = x * x / 4.0;
        let (mut s, mut t) = (1.0, 1.0);
        for m in 1..400 {
            t *= q / (m as f64 * m as f64);
            s += t;
        }
        s
    }

    #[test]
    fn i0_examples() {
        assert_eq!(bessel_i0(0.0f64).unwrap(), 1.0);
        assert!((bessel_i0(1.0f64).unwrap() - 1.266_065_877_752_008_3).abs() < 1e-15);
        assert!((bessel_i0(1.0f64).unwrap() - power_series_oracle(1.0)).abs() < 1e-15);
    }

    #[test]
    fn i0_matches_series_oracle_across_branch_point() {
        for i in 1..=60 {
            let x = 0.5 * i as f64;
            let got = bessel_i0(x).unwrap();
            let want = power_series_oracle(x);
            assert!(((got - want) / want).abs() < 2e-14, "x={x} got={got} want={want}");
        }
    }

    #[test]
    fn log_i0_large_argument() {
        let x = 800.0f64;
        let got = log_bessel_i0(x).unwrap();
        assert!(got.is_finite());
        let leading = x - 0.5 * (2.0 * std::f64::consts::PI * x).ln();
        // first correction ln(1 + 1/(8x) + 9/(2 (8x)^2))
        let corr = (1.0 + 1.0 / (8.0 * x) + 9.0 / (2.0 * (8.0 * x).powi(2))).ln();
        assert!((got - leading - corr).abs() < 1e-9);
        assert!(bessel_i0(800.0f64).unwrap().is_infinite());
        assert!(bessel_i0e(800.0f64).unwrap() > 0.0);
    }

    #[test]
    fn i0_domain() {
        assert!(bessel_i0(-1.0f64).is_err());
        assert!(log_bessel_i0(f64::INFINITY).is_err());
    }
}

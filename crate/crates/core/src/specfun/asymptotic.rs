//! Large-argument approximations used only as cross-checks of the exact
//! routines. None of them carry an accuracy promise outside their regime.

use crate::error::Result;
use crate::scalar::Real;

use super::check_finite_pos;

/// Q1(α, β) ≈ (2παβ)^{-1/2} exp(−(β − α)²/2), meaningful for β ≫ α > 0.
pub fn marcum_q1_asymptotic<T: Real>(alpha: T, beta: T) -> Result<T> {
    check_finite_pos("marcum_q1_asymptotic", "alpha", alpha)?;
    check_finite_pos("marcum_q1_asymptotic", "beta", beta)?;
    let d = beta - alpha;
    Ok((T::TAU() * alpha * beta).sqrt().recip() * (-d * d * T::c(0.5)).exp())
}

/// ln of [`marcum_q1_asymptotic`], usable where the value underflows.
pub fn ln_marcum_q1_asymptotic<T: Real>(alpha: T, beta: T) -> Result<T> {
    check_finite_pos("ln_marcum_q1_asymptotic", "alpha", alpha)?;
    check_finite_pos("ln_marcum_q1_asymptotic", "beta", beta)?;
    let d = beta - alpha;
    Ok(-T::c(0.5) * (T::TAU() * alpha * beta).ln() - d * d * T::c(0.5))
}

/// Q(x) ≈ exp(−x²/2) / (x √(2π)), meaningful for large x.
pub fn gaussian_q_asymptotic<T: Real>(x: T) -> Result<T> {
    check_finite_pos("gaussian_q_asymptotic", "x", x)?;
    Ok((-x * x * T::c(0.5)).exp() / (x * T::TAU().sqrt()))
}

/// Gaussian tail Q(x) = ½ erfc(x/√2), through the incomplete gamma
/// identity erfc(y) = Γ(½, y²)/√π evaluated by continued fraction.
pub fn gaussian_q<T: Real>(x: T) -> T {
    let half = T::c(0.5);
    if x < T::zero() {
        return T::one() - gaussian_q(-x);
    }
    let y2 = x * x * half;
    if y2 < T::c(1.5) {
        // series for the lower incomplete gamma P(½, y²)
        let mut term = T::one() / half;
        let mut sum = term;
        let mut a = half;
        for _ in 0..500 {
            a = a + T::one();
            term = term * y2 / a;
            sum = sum + term;
            if term < sum * T::epsilon() {
                break;
            }
        }
        let p = sum * (-y2 + half * y2.ln()).exp() / T::PI().sqrt();
        return half * (T::one() - p);
    }
    // Lentz continued fraction for Γ(½, y²)
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = y2 + T::one() - half;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..500 {
        let ifl = T::from_usize_lossy(i);
        let an = -ifl * (ifl - half);
        b = b + T::c(2.0);
        d = (an * d + b).recip();
        c = b + an / c;
        let del = c * d;
        h = h * del;
        if (del - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    half * h * (-y2 + half * y2.ln()).exp() / T::PI().sqrt()
}

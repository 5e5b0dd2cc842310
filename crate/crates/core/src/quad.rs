//! Globally adaptive Gauss–Kronrod (7/15) quadrature and bracketed root
//! finding for monotone functions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_evals: usize,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::c(1e-8).max(T::epsilon() * T::c(64.0)),
            abs_tol: T::zero(),
            max_evals: 200_000,
        }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evals: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let half = T::c(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut k = fc * T::c(WGK[7]);
    let mut g = fc * T::c(WG[3]);
    for (i, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = radius * T::c(x);
        let pair = f(center - dx) + f(center + dx);
        k = k + T::c(w) * pair;
        if i % 2 == 1 {
            g = g + T::c(WG[i / 2]) * pair;
        }
    }
    let value = k * radius;
    let error = ((k - g) * radius).abs();
    Segment { a, b, value, error }
}

/// ∫_a^b f(x) dx to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite limits [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error: T::zero(),
            evals: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, cfg)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b);
    let mut evals = 15;
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);
    loop {
        if !total.is_finite() {
            return Err(Error::Quadrature(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                error: err,
                evals,
            });
        }
        if evals + 30 > cfg.max_evals {
            return Err(Error::Quadrature(format!(
                "tolerance {target:e} not met on [{a}, {b}] after {evals} evaluations (error {err:e})"
            )));
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = T::c(0.5) * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature(format!(
                "interval [{}, {}] cannot be subdivided further",
                worst.a, worst.b
            )));
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        evals += 30;
        total = total - worst.value + left.value + right.value;
        err = err - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
        // resum occasionally to keep the running totals honest
        if evals % 3000 == 15 {
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Solves `f(x) = target` on `[lo, hi]` for monotone `f` by bisection.
/// The bracket must straddle the target.
pub fn solve_monotone<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    target: T,
    mut lo: T,
    mut hi: T,
    x_tol: T,
) -> Result<T> {
    let f_lo = f(lo) - target;
    let f_hi = f(hi) - target;
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if (f_lo > T::zero()) == (f_hi > T::zero()) {
        return Err(Error::Invalid(format!(
            "root not bracketed on [{lo}, {hi}] for target {target}"
        )));
    }
    let increasing = f_hi > T::zero();
    for _ in 0..400 {
        let mid = T::c(0.5) * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let above = f(mid) - target > T::zero();
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(T::c(0.5) * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| 3.0 * x * x, 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_mass() {
        let cfg = QuadConfig::with_rel_tol(1e-12);
        let r = integrate(|x: f64| (-x * x / 2.0).exp(), -12.0, 12.0, &cfg).unwrap();
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate(|x: f64| x.exp(), 1.0, 0.0, &QuadConfig::default()).unwrap();
        assert!((r.value + (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let cfg = QuadConfig {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_evals: 45,
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &cfg);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }

    #[test]
    fn monotone_solver() {
        let x = solve_monotone(|x: f64| x * x * x, 2.0, 0.0, 5.0, 1e-14).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-13);
        let y = solve_monotone(|x: f64| (-x).exp(), 0.25, 0.0, 10.0, 1e-14).unwrap();
        assert!((y - 4f64.ln()).abs() < 1e-13);
        assert!(solve_monotone(|x: f64| x, 20.0, 0.0, 1.0, 1e-9).is_err());
    }
}

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::{log_bessel_i0, log_gamma, marcum_q1, reg_upper_gamma};

use super::{upper_gamma_inverse, KthMaxLaw, LawKind, LinkEnsemble, OrderSelector};

fn check_z<T: Real>(func: &'static str, z: T) -> Result<()> {
    if !(z.is_finite() && z > T::zero()) {
        return crate::error::domain(func, format!("z must be finite and > 0, got {z}"));
    }
    Ok(())
}

/// Density of (ν + σN1)² + (σN2)² at z > 0:
/// exp(−(z + ν²)/(2σ²)) I0(ν√z/σ²) / (2σ²).
pub fn link_density<T: Real>(nu: T, sigma: T, z: T) -> Result<T> {
    let two_s2 = T::c(2.0) * sigma * sigma;
    let ln_i0 = log_bessel_i0(nu * z.sqrt() / (sigma * sigma))?;
    Ok((-(z + nu * nu) / two_s2 + ln_i0).exp() / two_s2)
}

/// u(z) = Σ_m Q1(ν_m/σ_m, √z/σ_m): expected number of links above z.
pub fn finite_m_u<T: Real>(ensemble: &LinkEnsemble<T>, z: T) -> Result<T> {
    check_z("finite_m_u", z)?;
    let root = z.sqrt();
    let mut u = T::zero();
    for (nu, sigma, count) in ensemble.classes() {
        u = u + T::from_usize_lossy(count) * marcum_q1(nu / sigma, root / sigma)?;
    }
    Ok(u)
}

/// u′(z) = −Σ_m f_m(z).
pub fn finite_m_u_prime<T: Real>(ensemble: &LinkEnsemble<T>, z: T) -> Result<T> {
    check_z("finite_m_u_prime", z)?;
    let mut d = T::zero();
    for (nu, sigma, count) in ensemble.classes() {
        d = d - T::from_usize_lossy(count) * link_density(nu, sigma, z)?;
    }
    Ok(d)
}

/// Γ(k, u(z))/Γ(k).
pub fn finite_m_kth_max_cdf<T: Real>(
    ensemble: &LinkEnsemble<T>,
    k: OrderSelector,
    z: T,
) -> Result<T> {
    reg_upper_gamma(k.get(), finite_m_u(ensemble, z)?)
}

/// −u′(z) · u(z)^{k−1} e^{−u(z)} / Γ(k).
pub fn finite_m_kth_max_pdf<T: Real>(
    ensemble: &LinkEnsemble<T>,
    k: OrderSelector,
    z: T,
) -> Result<T> {
    let u = finite_m_u(ensemble, z)?;
    let du = finite_m_u_prime(ensemble, z)?;
    let kf = T::from_usize_lossy(k.get());
    if u == T::zero() {
        return Ok(if k.get() == 1 { -du } else { T::zero() });
    }
    let ln_kernel = (kf - T::one()) * u.ln() - u - log_gamma(kf)?;
    Ok(-du * ln_kernel.exp())
}

/// Moderate-M law of the k-th maximum built on u(z).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMLaw<T> {
    ensemble: LinkEnsemble<T>,
    k: OrderSelector,
}

impl<T: Real> FiniteMLaw<T> {
    pub fn new(ensemble: LinkEnsemble<T>, k: OrderSelector) -> Result<Self> {
        if k.get() > ensemble.m() {
            return Err(Error::Invalid(format!(
                "rank k = {} exceeds link count M = {}",
                k.get(),
                ensemble.m()
            )));
        }
        Ok(Self { ensemble, k })
    }

    pub fn ensemble(&self) -> &LinkEnsemble<T> {
        &self.ensemble
    }
}

impl<T: Real> KthMaxLaw<T> for FiniteMLaw<T> {
    fn cdf(&self, z: T) -> Result<T> {
        if z < T::zero() {
            return Ok(T::zero());
        }
        if z == T::zero() {
            // u(0⁺) = M leaves an atom Γ(k, M)/Γ(k) at the origin
            return reg_upper_gamma(self.k.get(), T::from_usize_lossy(self.ensemble.m()));
        }
        finite_m_kth_max_cdf(&self.ensemble, self.k, z)
    }

    fn pdf(&self, z: T) -> Result<T> {
        if z <= T::zero() {
            return Ok(T::zero());
        }
        finite_m_kth_max_pdf(&self.ensemble, self.k, z)
    }

    fn rank(&self) -> OrderSelector {
        self.k
    }

    fn kind(&self) -> LawKind {
        LawKind::FiniteM
    }

    fn quantile(&self, q: T) -> Result<T> {
        // u(z) = x where Γ(k, x)/Γ(k) = q; u falls from M at 0⁺ to 0
        let target = upper_gamma_inverse(self.k.get(), q)?;
        let m = T::from_usize_lossy(self.ensemble.m());
        if target >= m {
            return Ok(T::zero());
        }
        let u = |z: T| finite_m_u(&self.ensemble, z).unwrap_or(T::nan());
        let mut hi = T::one();
        for _ in 0..200 {
            if u(hi) < target {
                break;
            }
            hi = hi * T::c(2.0);
        }
        let tol = hi * T::epsilon() * T::c(16.0);
        let lo = hi * T::c(1e-300).max(T::min_positive_value());
        crate::quad::solve_monotone(u, target, lo, hi, tol)
    }
}

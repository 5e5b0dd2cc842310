use crate::error::{Error, Result};
use crate::scalar::{LogSum, Real};

use super::LinkEnsemble;

/// Scale `a_M`, location `b_M` and mixture weight `p` of the limit law,
/// together with the dominant amplitude ν̃ and its multiplicity M̃ when the
/// constants were derived from an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConstants<T> {
    a_m: T,
    b_m: T,
    p: T,
    dominant: Option<(T, usize)>,
}

impl<T: Real> NormConstants<T> {
    /// Constants given directly (for ordering studies and tests).
    pub fn from_parts(a_m: T, b_m: T, p: T) -> Result<Self> {
        if !(a_m.is_finite() && a_m > T::zero()) {
            return Err(Error::Invalid(format!("a_M must be finite and > 0, got {a_m}")));
        }
        if !b_m.is_finite() {
            return Err(Error::Invalid(format!("b_M must be finite, got {b_m}")));
        }
        if !(p.is_finite() && p > T::zero()) {
            return Err(Error::Invalid(format!("p must be finite and > 0, got {p}")));
        }
        Ok(Self {
            a_m,
            b_m,
            p,
            dominant: None,
        })
    }

    pub fn a_m(&self) -> T {
        self.a_m
    }

    pub fn b_m(&self) -> T {
        self.b_m
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn nu_tilde(&self) -> Option<T> {
        self.dominant.map(|d| d.0)
    }

    pub fn m_tilde(&self) -> Option<usize> {
        self.dominant.map(|d| d.1)
    }

    /// `(z − b_M)/a_M`.
    pub fn normalize(&self, z: T) -> T {
        (z - self.b_m) / self.a_m
    }

    pub fn denormalize(&self, y: T) -> T {
        self.a_m * y + self.b_m
    }
}

/// Largest amplitude present and the number of links carrying it.
pub fn select_nu_tilde<T: Real>(ensemble: &LinkEnsemble<T>) -> (T, usize) {
    ensemble
        .groups()
        .iter()
        .fold(None::<(T, usize)>, |best, g| match best {
            Some((nu, _)) if nu >= g.nu => best,
            _ => Some((g.nu, g.count)),
        })
        .expect("ensemble holds at least one group")
}

/// Normalising constants with ν̃ chosen as the largest amplitude.
pub fn norm_constants<T: Real>(ensemble: &LinkEnsemble<T>) -> Result<NormConstants<T>> {
    let (nu, _) = select_nu_tilde(ensemble);
    norm_constants_with_nu_tilde(ensemble, nu)
}

/// Normalising constants for a caller-chosen dominant amplitude, which must
/// be one of the ensemble's amplitudes.
pub fn norm_constants_with_nu_tilde<T: Real>(
    ensemble: &LinkEnsemble<T>,
    nu_tilde: T,
) -> Result<NormConstants<T>> {
    if ensemble.per_link_sigma().is_some() {
        return Err(Error::Invalid(
            "limit-law constants need a common sigma; per-link sigma is only supported by the finite-M law"
                .into(),
        ));
    }
    let m_tilde = ensemble
        .groups()
        .iter()
        .find(|g| g.nu == nu_tilde)
        .map(|g| g.count)
        .ok_or_else(|| Error::Invalid(format!("nu_tilde {nu_tilde} is not an amplitude of the ensemble")))?;
    if m_tilde < 3 {
        return Err(Error::Invalid(format!(
            "dominant group has M~ = {m_tilde} links; at least 3 are needed for log log M~ > 0"
        )));
    }

    let sigma = ensemble.sigma();
    let half = T::c(0.5);
    let sqrt2 = T::SQRT_2();
    let sigma2 = sigma * sigma;
    let a_m = T::c(2.0) * sigma2;
    let ln_m = T::from_usize_lossy(m_tilde).ln();
    let sqrt_ln_m = ln_m.sqrt();

    // ln(2√2 π ν̃/σ · exp(−ν̃²/σ²))
    let ln_pref = (T::c(2.0) * sqrt2 * T::PI() * nu_tilde / sigma).ln() - nu_tilde * nu_tilde / sigma2;
    let b_m = a_m
        * (ln_m - T::c(0.25) * ln_m.ln() + nu_tilde * sqrt2 / sigma * sqrt_ln_m - half * ln_pref);

    // the dominant group contributes exactly 1
    let mut others = LogSum::new();
    for g in ensemble.groups().iter().filter(|g| g.nu != nu_tilde) {
        let nu = g.nu;
        let ln_term = (T::from_usize_lossy(g.count) / T::from_usize_lossy(m_tilde)).ln()
            + half * (nu_tilde / nu).ln()
            - (nu * nu + nu_tilde * nu_tilde) / (T::c(2.0) * sigma2)
            + sqrt2 / sigma * (nu - nu_tilde) * sqrt_ln_m
            + nu * nu_tilde / sigma2;
        others.push(ln_term);
    }
    let rest = others.value().exp();
    let p = T::one() + rest;

    Ok(NormConstants {
        a_m,
        b_m,
        p,
        dominant: Some((nu_tilde, m_tilde)),
    })
}

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::{log_gamma, reg_upper_gamma};

use super::{upper_gamma_inverse, KthMaxLaw, LawKind, NormConstants, OrderSelector};

/// Γ(k, p·e^{-z})/Γ(k): limit CDF of the normalised k-th maximum.
pub fn normalized_kth_max_cdf<T: Real>(consts: &NormConstants<T>, k: OrderSelector, z: T) -> T {
    let ln_x = consts.p().ln() - z;
    if ln_x > T::c(700.0).min(T::max_value().ln() - T::one()) {
        return T::zero();
    }
    if z == T::infinity() {
        return T::one();
    }
    reg_upper_gamma(k.get(), ln_x.exp()).expect("argument is finite and non-negative")
}

/// d/dz of [`normalized_kth_max_cdf`]: (p e^{-z})^k exp(−p e^{-z}) / Γ(k).
pub fn normalized_kth_max_pdf<T: Real>(consts: &NormConstants<T>, k: OrderSelector, z: T) -> T {
    let ln_x = consts.p().ln() - z;
    if !ln_x.is_finite() {
        return T::zero();
    }
    let kf = T::from_usize_lossy(k.get());
    let ln_gk = log_gamma(kf).expect("k >= 1");
    let ln_pdf = kf * ln_x - ln_x.exp() - ln_gk;
    ln_pdf.exp()
}

/// CDF of the unnormalised k-th maximum: the limit CDF at (z − b_M)/a_M.
pub fn unnormalized_kth_max_cdf_asym<T: Real>(
    consts: &NormConstants<T>,
    k: OrderSelector,
    z: T,
) -> T {
    normalized_kth_max_cdf(consts, k, consts.normalize(z))
}

pub fn unnormalized_kth_max_pdf_asym<T: Real>(
    consts: &NormConstants<T>,
    k: OrderSelector,
    z: T,
) -> T {
    normalized_kth_max_pdf(consts, k, consts.normalize(z)) / consts.a_m()
}

/// MGF of the normalised limit law, Γ(k − t)/Γ(k), for t < k.
pub fn normalized_mgf<T: Real>(k: OrderSelector, t: T) -> Result<T> {
    let kf = T::from_usize_lossy(k.get());
    if !(t < kf) {
        return crate::error::domain("normalized_mgf", format!("t = {t} must be < k = {kf}"));
    }
    Ok((log_gamma(kf - t)? - log_gamma(kf)?).exp())
}

/// Limit law of the k-th maximum on the unnormalised axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticLaw<T> {
    consts: NormConstants<T>,
    k: OrderSelector,
}

impl<T: Real> AsymptoticLaw<T> {
    pub fn new(consts: NormConstants<T>, k: OrderSelector) -> Self {
        Self { consts, k }
    }

    pub fn constants(&self) -> &NormConstants<T> {
        &self.consts
    }

    /// Quantile of the normalised variable.
    pub fn normalized_quantile(&self, q: T) -> Result<T> {
        let x = upper_gamma_inverse(self.k.get(), q)?;
        if x <= T::zero() {
            return Err(Error::Invalid(format!("quantile {q} is at the upper end of the support")));
        }
        Ok(self.consts.p().ln() - x.ln())
    }
}

impl<T: Real> KthMaxLaw<T> for AsymptoticLaw<T> {
    fn cdf(&self, z: T) -> Result<T> {
        Ok(unnormalized_kth_max_cdf_asym(&self.consts, self.k, z))
    }

    fn pdf(&self, z: T) -> Result<T> {
        Ok(unnormalized_kth_max_pdf_asym(&self.consts, self.k, z))
    }

    fn rank(&self) -> OrderSelector {
        self.k
    }

    fn kind(&self) -> LawKind {
        LawKind::Asymptotic
    }

    fn quantile(&self, q: T) -> Result<T> {
        Ok(self.consts.denormalize(self.normalized_quantile(q)?))
    }
}

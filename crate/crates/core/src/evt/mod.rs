//! Extreme-value description of the k-th largest channel gain.
//!
//! Two laws are available for `Z_(M-k+1:M)`:
//!
//! - the Gumbel-type limit `Γ(k, p·e^{-z̃})/Γ(k)` of the normalised variable
//!   `z̃ = (z − b_M)/a_M` ([`AsymptoticLaw`]), driven by [`NormConstants`];
//! - the moderate-M Poisson form `Γ(k, u(z))/Γ(k)` with
//!   `u(z) = Σ_m Q1(ν_m/σ_m, √z/σ_m)` ([`FiniteMLaw`]).

mod constants;
mod ensemble;
mod finite_m;
mod limit;
mod ordering;

pub use constants::{norm_constants, norm_constants_with_nu_tilde, select_nu_tilde, NormConstants};
pub use ensemble::{LinkEnsemble, LinkGroup};
pub use finite_m::{
    finite_m_kth_max_cdf, finite_m_kth_max_pdf, finite_m_u, finite_m_u_prime, link_density,
    FiniteMLaw,
};
pub use limit::{
    normalized_kth_max_cdf, normalized_kth_max_pdf, normalized_mgf, unnormalized_kth_max_cdf_asym,
    unnormalized_kth_max_pdf_asym, AsymptoticLaw,
};
pub use ordering::{stochastic_order_check, OrderReport, OrderVerdict};

use crate::error::{Error, Result};
use crate::quad::solve_monotone;
use crate::scalar::Real;

/// Rank of the selected link: 1 is the strongest, `M` the weakest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderSelector(usize);

impl OrderSelector {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("rank k must be at least 1".into()));
        }
        Ok(Self(k))
    }

    /// Checks `k <= M` for a concrete ensemble size.
    pub fn for_links(k: usize, m: usize) -> Result<Self> {
        let sel = Self::new(k)?;
        if k > m {
            return Err(Error::Invalid(format!("rank k = {k} exceeds link count M = {m}")));
        }
        Ok(sel)
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Which description of the k-th maximum a computation used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LawKind {
    Asymptotic,
    FiniteM,
}

impl LawKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LawKind::Asymptotic => "asymptotic",
            LawKind::FiniteM => "finite_m",
        }
    }
}

/// Link count at which the moderate-M form stops being the default.
pub const FINITE_M_CUTOFF: usize = 200;

/// Default law for an ensemble of `m` links.
pub fn default_law_kind(m: usize) -> LawKind {
    if m < FINITE_M_CUTOFF {
        LawKind::FiniteM
    } else {
        LawKind::Asymptotic
    }
}

/// The chosen law for rank `k` of `ensemble`, boxed. The asymptotic law
/// needs [`norm_constants`] to be defined for the ensemble.
pub fn build_law<T: Real>(
    ensemble: &LinkEnsemble<T>,
    k: OrderSelector,
    kind: LawKind,
) -> Result<Box<dyn KthMaxLaw<T>>> {
    OrderSelector::for_links(k.get(), ensemble.m())?;
    Ok(match kind {
        LawKind::FiniteM => Box::new(FiniteMLaw::new(ensemble.clone(), k)?),
        LawKind::Asymptotic => Box::new(AsymptoticLaw::new(norm_constants(ensemble)?, k)),
    })
}

/// Distribution of the k-th maximum channel gain on the unnormalised axis.
pub trait KthMaxLaw<T: Real>: Sync {
    fn cdf(&self, z: T) -> Result<T>;
    fn pdf(&self, z: T) -> Result<T>;
    fn rank(&self) -> OrderSelector;
    fn kind(&self) -> LawKind;

    /// Smallest `z` with `cdf(z) >= q`, for `q` in (0, 1).
    fn quantile(&self, q: T) -> Result<T>;
}

/// `count` equally spaced points on `[q(lo), q(1 − lo)]` of `law`.
pub fn quantile_grid<T: Real, L: KthMaxLaw<T> + ?Sized>(
    law: &L,
    tail: T,
    count: usize,
) -> Result<Vec<T>> {
    if count < 2 {
        return Err(Error::Invalid("grid needs at least two points".into()));
    }
    let lo = law.quantile(tail)?;
    let hi = law.quantile(T::one() - tail)?;
    Ok(linspace(lo, hi, count))
}

pub fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    let step = (hi - lo) / T::from_usize_lossy(count.max(2) - 1);
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + step * T::from_usize_lossy(i)
            }
        })
        .collect()
}

/// x with Γ(k, x)/Γ(k) = q.
pub(crate) fn upper_gamma_inverse<T: Real>(k: usize, q: T) -> Result<T> {
    if !(q > T::zero() && q < T::one()) {
        return Err(Error::Invalid(format!("probability {q} outside (0, 1)")));
    }
    let f = |x: T| crate::specfun::reg_upper_gamma(k, x).unwrap_or(T::nan());
    let mut hi = T::from_usize_lossy(k).max(T::one());
    while f(hi) > q {
        hi = hi * T::c(2.0);
        if !hi.is_finite() {
            return Err(Error::Invalid(format!("cannot bracket gamma quantile {q}")));
        }
    }
    let tol = hi * T::epsilon() * T::c(4.0);
    solve_monotone(f, q, T::zero(), hi, tol)
}

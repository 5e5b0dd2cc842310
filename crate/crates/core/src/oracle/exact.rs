use crate::error::{Error, Result};
use crate::evt::{LinkEnsemble, OrderSelector};
use crate::scalar::Real;
use crate::specfun::marcum_q1;

pub const BRUTE_FORCE_MAX_LINKS: usize = 15;

fn exceedances<T: Real>(ensemble: &LinkEnsemble<T>, z: T) -> Result<Vec<T>> {
    if !(z.is_finite() && z > T::zero()) {
        return crate::error::domain("exact_kth_max_cdf", format!("z must be finite and > 0, got {z}"));
    }
    let root = z.sqrt();
    let mut qs = Vec::with_capacity(ensemble.m());
    for (nu, sigma, count) in ensemble.classes() {
        let q = marcum_q1(nu / sigma, root / sigma)?;
        qs.extend(std::iter::repeat_n(q, count));
    }
    Ok(qs)
}

fn check_rank(k: OrderSelector, m: usize) -> Result<()> {
    if k.get() > m {
        return Err(Error::Invalid(format!("rank k = {} exceeds link count M = {m}", k.get())));
    }
    Ok(())
}

/// P(at most k − 1 of the links exceed), given each link's exceedance
/// probability; Poisson-binomial DP truncated at k − 1 successes.
pub fn kth_max_cdf_from_exceedance<T: Real>(qs: &[T], k: OrderSelector) -> T {
    let k = k.get();
    let mut dist = vec![T::zero(); k];
    dist[0] = T::one();
    for &q in qs {
        let stay = T::one() - q;
        for j in (1..k).rev() {
            dist[j] = dist[j] * stay + dist[j - 1] * q;
        }
        dist[0] = dist[0] * stay;
    }
    dist.into_iter().sum()
}

/// Exact CDF of the k-th largest gain.
pub fn exact_kth_max_cdf<T: Real>(ensemble: &LinkEnsemble<T>, k: OrderSelector, z: T) -> Result<T> {
    check_rank(k, ensemble.m())?;
    Ok(kth_max_cdf_from_exceedance(&exceedances(ensemble, z)?, k))
}

/// Same quantity by enumerating every set of non-exceeding links of size
/// at least M − k + 1. Exponential in M; a check on the DP only.
pub fn brute_force_from_exceedance<T: Real>(qs: &[T], k: OrderSelector) -> Result<T> {
    let m = qs.len();
    if m > BRUTE_FORCE_MAX_LINKS {
        return Err(Error::Invalid(format!(
            "enumeration limited to M <= {BRUTE_FORCE_MAX_LINKS}, got {m}"
        )));
    }
    let need = (m + 1).saturating_sub(k.get());
    let mut total = T::zero();
    for mask in 0u32..(1u32 << m) {
        if (mask.count_ones() as usize) < need {
            continue;
        }
        let mut prod = T::one();
        for (i, &q) in qs.iter().enumerate() {
            prod = prod * if mask >> i & 1 == 1 { T::one() - q } else { q };
        }
        total = total + prod;
    }
    Ok(total)
}

pub fn brute_force_kth_max_cdf<T: Real>(
    ensemble: &LinkEnsemble<T>,
    k: OrderSelector,
    z: T,
) -> Result<T> {
    check_rank(k, ensemble.m())?;
    if ensemble.m() > BRUTE_FORCE_MAX_LINKS {
        return Err(Error::Invalid(format!(
            "enumeration limited to M <= {BRUTE_FORCE_MAX_LINKS}, got {}",
            ensemble.m()
        )));
    }
    brute_force_from_exceedance(&exceedances(ensemble, z)?, k)
}

use crate::error::{Error, Result};
use crate::scalar::{ln_add_exp, LogSum, Real};

use super::{check_finite_nonneg, Accuracy};

/// log Σ_{n>=0} Pois(n; outer) · P(N_inner <= n - shift), where N_inner is
/// Poisson(inner). Every term is positive, so no cancellation can occur.
fn ln_poisson_race<T: Real>(outer: T, inner: T, shift: usize, acc: &Accuracy<T>) -> Result<T> {
    let zero = T::zero();
    let ln_outer = outer.ln();
    let ln_inner = inner.ln();
    let ln_tol = acc.rel_tol().ln();
    let ln2 = T::LN_2();

    let mut ln_pmf_o = -outer;
    let mut ln_pmf_i = -inner;
    let mut ln_cdf_i = T::neg_infinity();
    let mut sum = LogSum::new();

    for n in 0..acc.max_terms() {
        if n > 0 {
            if outer == zero {
                break;
            }
            ln_pmf_o = ln_pmf_o + ln_outer - T::from_usize_lossy(n).ln();
        }
        if n >= shift {
            let j = n - shift;
            if j > 0 {
                ln_pmf_i = if inner == zero {
                    T::neg_infinity()
                } else {
                    ln_pmf_i + ln_inner - T::from_usize_lossy(j).ln()
                };
            }
            ln_cdf_i = ln_add_exp(ln_cdf_i, ln_pmf_i);
            sum.push(ln_pmf_o + ln_cdf_i);
        }
        if outer == zero {
            break;
        }
        // remaining outer mass bounds the tail once the pmf ratio is <= 1/2
        let n1 = T::from_usize_lossy(n + 1);
        if n1 + T::one() > outer + outer {
            let ln_next = ln_pmf_o + ln_outer - n1.ln();
            let total = sum.value();
            if total > T::neg_infinity() && ln_next + ln2 < total + ln_tol {
                return Ok(total.min(zero));
            }
        }
    }
    if outer == zero {
        return Ok(sum.value().min(zero));
    }
    Err(Error::Convergence {
        func: "marcum_q1",
        terms: acc.max_terms(),
    })
}

fn check_args<T: Real>(alpha: T, beta: T) -> Result<()> {
    check_finite_nonneg("marcum_q1", "alpha", alpha)?;
    check_finite_nonneg("marcum_q1", "beta", beta)
}

/// (ln Q1, ln(1 − Q1)), each accurate in its own tail.
fn ln_pair<T: Real>(alpha: T, beta: T, acc: &Accuracy<T>) -> Result<(T, T)> {
    check_args(alpha, beta)?;
    let half = T::c(0.5);
    let lam = half * alpha * alpha;
    let x = half * beta * beta;
    if beta >= alpha {
        // Q1 = P(N_x <= N_lam)
        let ln_q = ln_poisson_race(lam, x, 0, acc)?;
        Ok((ln_q, (-ln_q.exp()).ln_1p()))
    } else {
        // 1 - Q1 = P(N_lam < N_x)
        let ln_c = ln_poisson_race(x, lam, 1, acc)?;
        Ok(((-ln_c.exp()).ln_1p(), ln_c))
    }
}

/// First-order Marcum Q function Q1(α, β) with explicit accuracy controls.
pub fn marcum_q1_with<T: Real>(alpha: T, beta: T, acc: &Accuracy<T>) -> Result<T> {
    Ok(ln_pair(alpha, beta, acc)?.0.exp().min(T::one()))
}

/// First-order Marcum Q function Q1(α, β).
///
/// `1 − Q1(ν/σ, √z/σ)` is the CDF at `z` of `(ν + σN1)² + (σN2)²`.
pub fn marcum_q1<T: Real>(alpha: T, beta: T) -> Result<T> {
    marcum_q1_with(alpha, beta, &Accuracy::default())
}

/// 1 − Q1(α, β), accurate when Q1 is close to 1.
pub fn marcum_q1_complement<T: Real>(alpha: T, beta: T) -> Result<T> {
    Ok(ln_pair(alpha, beta, &Accuracy::default())?.1.exp().min(T::one()))
}

/// ln Q1(α, β); finite far below the smallest representable probability.
pub fn ln_marcum_q1<T: Real>(alpha: T, beta: T) -> Result<T> {
    Ok(ln_pair(alpha, beta, &Accuracy::default())?.0)
}

/// ln(1 − Q1(α, β)).
pub fn ln_marcum_q1_complement<T: Real>(alpha: T, beta: T) -> Result<T> {
    Ok(ln_pair(alpha, beta, &Accuracy::default())?.1)
}

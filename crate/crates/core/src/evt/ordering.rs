use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{normalized_kth_max_cdf, NormConstants, OrderSelector};

/// Outcome of comparing two limit laws that share `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderVerdict {
    /// The second law is stochastically larger on the whole grid.
    SecondDominates,
    FirstDominates,
    /// The affine condition changes sign; `index` is the first grid point
    /// whose sign differs from the first non-zero one.
    Crossing { index: usize },
}

impl OrderVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrderVerdict::SecondDominates => "second_dominates",
            OrderVerdict::FirstDominates => "first_dominates",
            OrderVerdict::Crossing { .. } => "crossing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport<T> {
    pub verdict: OrderVerdict,
    /// (z − b₁)/a₁ − (z − b₂)/a₂ at every grid point; >= 0 means the second
    /// law puts at least as much mass above z.
    pub margins: Vec<T>,
}

/// Stochastic ordering of two k-th maximum limit laws with equal `p`,
/// decided pointwise by (z − b₂)/a₂ <= (z − b₁)/a₁.
pub fn stochastic_order_check<T: Real>(
    first: &NormConstants<T>,
    second: &NormConstants<T>,
    grid: &[T],
) -> Result<OrderReport<T>> {
    if first.p() != second.p() {
        return Err(Error::MixtureMismatch(first.p().as_f64(), second.p().as_f64()));
    }
    if grid.is_empty() {
        return Err(Error::Invalid("ordering grid is empty".into()));
    }
    let margins: Vec<T> = grid
        .iter()
        .map(|&z| first.normalize(z) - second.normalize(z))
        .collect();
    let verdict = if margins.iter().all(|&m| m >= T::zero()) {
        OrderVerdict::SecondDominates
    } else if margins.iter().all(|&m| m <= T::zero()) {
        OrderVerdict::FirstDominates
    } else {
        let lead = margins
            .iter()
            .position(|&m| m != T::zero())
            .expect("mixed signs imply a non-zero margin");
        let positive = margins[lead] > T::zero();
        let index = margins
            .iter()
            .position(|&m| m != T::zero() && (m > T::zero()) != positive)
            .expect("mixed signs imply a sign change");
        OrderVerdict::Crossing { index }
    };

    // the affine condition implies CDF dominance for every rank; k = 1 suffices
    let k1 = OrderSelector::new(1).expect("1 is a valid rank");
    for &z in grid {
        let f1 = normalized_kth_max_cdf(first, k1, first.normalize(z));
        let f2 = normalized_kth_max_cdf(second, k1, second.normalize(z));
        let slack = T::epsilon() * T::c(16.0);
        match verdict {
            OrderVerdict::SecondDominates => assert!(f2 <= f1 + slack, "ordering violated at z = {z}"),
            OrderVerdict::FirstDominates => assert!(f1 <= f2 + slack, "ordering violated at z = {z}"),
            OrderVerdict::Crossing { .. } => {}
        }
    }
    Ok(OrderReport { verdict, margins })
}

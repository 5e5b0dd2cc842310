use crate::error::{Error, Result};
use crate::scalar::Real;

/// `count` links sharing the LOS amplitude `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGroup<T> {
    pub nu: T,
    pub count: usize,
}

impl<T> LinkGroup<T> {
    pub fn new(nu: T, count: usize) -> Self {
        Self { nu, count }
    }
}

/// Fading configuration of the M links: distinct LOS amplitudes with their
/// multiplicities, a common diffuse scale σ, and optionally one σ per link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkEnsemble<T> {
    groups: Vec<LinkGroup<T>>,
    sigma: T,
    per_link_sigma: Option<Vec<T>>,
}

impl<T: Real> LinkEnsemble<T> {
    pub fn new(groups: Vec<LinkGroup<T>>, sigma: T) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::Invalid("ensemble needs at least one group".into()));
        }
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(Error::Invalid(format!("sigma must be finite and > 0, got {sigma}")));
        }
        for (i, g) in groups.iter().enumerate() {
            if !(g.nu.is_finite() && g.nu > T::zero()) {
                return Err(Error::Invalid(format!(
                    "group {i}: nu must be finite and > 0, got {}",
                    g.nu
                )));
            }
            if g.count == 0 {
                return Err(Error::Invalid(format!("group {i}: count must be >= 1")));
            }
            if groups[..i].iter().any(|h| h.nu == g.nu) {
                return Err(Error::Invalid(format!("group {i}: duplicate nu {}", g.nu)));
            }
        }
        Ok(Self {
            groups,
            sigma,
            per_link_sigma: None,
        })
    }

    /// `m` links with identical amplitude `nu`.
    pub fn iid(nu: T, m: usize, sigma: T) -> Result<Self> {
        Self::new(vec![LinkGroup::new(nu, m)], sigma)
    }

    /// Per-link scales, listed group by group in the order of `groups`.
    pub fn with_per_link_sigma(mut self, sigmas: Vec<T>) -> Result<Self> {
        if sigmas.len() != self.m() {
            return Err(Error::Invalid(format!(
                "per_link_sigma has {} entries, expected M = {}",
                sigmas.len(),
                self.m()
            )));
        }
        if let Some(bad) = sigmas.iter().find(|s| !(s.is_finite() && **s > T::zero())) {
            return Err(Error::Invalid(format!("per-link sigma must be > 0, got {bad}")));
        }
        self.per_link_sigma = Some(sigmas);
        Ok(self)
    }

    pub fn groups(&self) -> &[LinkGroup<T>] {
        &self.groups
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn per_link_sigma(&self) -> Option<&[T]> {
        self.per_link_sigma.as_deref()
    }

    /// Total number of links M.
    pub fn m(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// Number of distinct amplitudes K.
    pub fn k_groups(&self) -> usize {
        self.groups.len()
    }

    /// The distinct amplitudes R_ν.
    pub fn amplitudes(&self) -> impl Iterator<Item = T> + '_ {
        self.groups.iter().map(|g| g.nu)
    }

    /// `(nu_m, sigma_m)` for every link, group by group.
    pub fn links(&self) -> Vec<(T, T)> {
        let mut out = Vec::with_capacity(self.m());
        for g in &self.groups {
            for _ in 0..g.count {
                out.push(g.nu);
            }
        }
        match &self.per_link_sigma {
            Some(s) => out.into_iter().zip(s.iter().copied()).collect(),
            None => out.into_iter().map(|nu| (nu, self.sigma)).collect(),
        }
    }

    /// Distinct `(nu, sigma, multiplicity)` classes; links sharing both
    /// parameters are merged so per-class work is done once.
    pub fn classes(&self) -> Vec<(T, T, usize)> {
        match &self.per_link_sigma {
            None => self
                .groups
                .iter()
                .map(|g| (g.nu, self.sigma, g.count))
                .collect(),
            Some(_) => {
                let mut out: Vec<(T, T, usize)> = Vec::new();
                for (nu, s) in self.links() {
                    match out.iter_mut().find(|c| c.0 == nu && c.1 == s) {
                        Some(c) => c.2 += 1,
                        None => out.push((nu, s, 1)),
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_links() {
        let e = LinkEnsemble::new(vec![LinkGroup::new(1.0, 3), LinkGroup::new(0.5, 2)], 2.0).unwrap();
        assert_eq!(e.m(), 5);
        assert_eq!(e.k_groups(), 2);
        assert_eq!(e.links()[3], (0.5, 2.0));
        assert_eq!(e.classes(), vec![(1.0, 2.0, 3), (0.5, 2.0, 2)]);
    }

    #[test]
    fn rejects_bad_groups() {
        assert!(LinkEnsemble::<f64>::new(vec![], 1.0).is_err());
        assert!(LinkEnsemble::new(vec![LinkGroup::new(0.0, 3)], 1.0).is_err());
        assert!(LinkEnsemble::new(vec![LinkGroup::new(1.0, 0)], 1.0).is_err());
        assert!(LinkEnsemble::new(vec![LinkGroup::new(1.0, 2), LinkGroup::new(1.0, 2)], 1.0).is_err());
        assert!(LinkEnsemble::iid(1.0, 4, -1.0).is_err());
    }

    #[test]
    fn per_link_sigma_length_checked() {
        let e = LinkEnsemble::iid(1.0, 3, 2.0).unwrap();
        assert!(e.clone().with_per_link_sigma(vec![1.0, 2.0]).is_err());
        assert!(e.clone().with_per_link_sigma(vec![1.0, 2.0, 0.0]).is_err());
        let e = e.with_per_link_sigma(vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(e.classes(), vec![(1.0, 1.0, 2), (1.0, 2.0, 1)]);
    }
}

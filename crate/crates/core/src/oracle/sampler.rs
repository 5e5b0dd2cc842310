use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evt::{LinkEnsemble, OrderSelector};
use crate::scalar::Real;

use super::EmpiricalCdf;

/// Trials per RNG stream. Chunk `i` always draws from stream `i` of the
/// seeded generator, so output does not depend on the thread count.
pub const CHUNK_SIZE: usize = 4096;

/// Identifies the generator, chunking rule and channel configuration.
pub fn config_digest<T: Real>(ensemble: &LinkEnsemble<T>, k: OrderSelector) -> String {
    let groups: Vec<String> = ensemble
        .groups()
        .iter()
        .map(|g| format!("{}x{}", g.nu, g.count))
        .collect();
    let mut s = format!(
        "kthmax-ecdf/v1;rng=chacha8;stream=chunk;chunk={CHUNK_SIZE};sigma={};groups={}",
        ensemble.sigma(),
        groups.join("|")
    );
    if let Some(ps) = ensemble.per_link_sigma() {
        let ps: Vec<String> = ps.iter().map(|s| s.to_string()).collect();
        s.push_str(&format!(";per_link_sigma={}", ps.join("|")));
    }
    s.push_str(&format!(";k={}", k.get()));
    s
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

#[inline]
fn draw<T: Real>(rng: &mut ChaCha8Rng, nu: T, sigma: T) -> T {
    let n1: f64 = rng.sample(StandardNormal);
    let n2: f64 = rng.sample(StandardNormal);
    let x = nu + sigma * T::c(n1);
    let y = sigma * T::c(n2);
    x * x + y * y
}

fn chunks(n: usize) -> impl IndexedParallelIterator<Item = (usize, usize)> {
    let count = n.div_ceil(CHUNK_SIZE);
    (0..count)
        .into_par_iter()
        .map(move |c| (c, CHUNK_SIZE.min(n - c * CHUNK_SIZE)))
}

/// The `kmax` largest gains of every trial, one sample vector per rank.
fn top_k_raw<T: Real>(ensemble: &LinkEnsemble<T>, kmax: usize, n: usize, seed: u64) -> Vec<Vec<T>> {
    let links = ensemble.links();
    let per_chunk: Vec<Vec<Vec<T>>> = chunks(n)
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut out = vec![Vec::with_capacity(len); kmax];
            let mut top = vec![T::neg_infinity(); kmax];
            for _ in 0..len {
                top.fill(T::neg_infinity());
                for &(nu, sigma) in &links {
                    let z = draw(&mut rng, nu, sigma);
                    if z > top[kmax - 1] {
                        // insertion into the descending top list
                        let mut i = kmax - 1;
                        while i > 0 && top[i - 1] < z {
                            top[i] = top[i - 1];
                            i -= 1;
                        }
                        top[i] = z;
                    }
                }
                for (r, v) in out.iter_mut().zip(&top) {
                    r.push(*v);
                }
            }
            out
        })
        .collect();
    let mut merged = vec![Vec::with_capacity(n); kmax];
    for chunk in per_chunk {
        for (m, c) in merged.iter_mut().zip(chunk) {
            m.extend(c);
        }
    }
    merged
}

fn check(ensemble_m: usize, kmax: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    if kmax == 0 || kmax > ensemble_m {
        return Err(Error::Invalid(format!(
            "rank {kmax} outside 1..={ensemble_m}"
        )));
    }
    Ok(())
}

/// Empirical law of the k-th largest gain over `n` seeded trials.
pub fn sample_kth_max<T: Real>(
    ensemble: &LinkEnsemble<T>,
    k: OrderSelector,
    n: usize,
    seed: u64,
) -> Result<EmpiricalCdf<T>> {
    check(ensemble.m(), k.get(), n)?;
    let samples = top_k_raw(ensemble, k.get(), n, seed).pop().expect("k >= 1");
    EmpiricalCdf::new(samples, seed, config_digest(ensemble, k))
}

/// Ranks 1..=kmax from the same trials (so rank r+1 never exceeds rank r
/// trial by trial). Entry r − 1 equals `sample_kth_max` at rank r.
pub fn sample_top_k<T: Real>(
    ensemble: &LinkEnsemble<T>,
    kmax: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<EmpiricalCdf<T>>> {
    check(ensemble.m(), kmax, n)?;
    top_k_raw(ensemble, kmax, n, seed)
        .into_iter()
        .enumerate()
        .map(|(r, s)| {
            let k = OrderSelector::new(r + 1)?;
            EmpiricalCdf::new(s, seed, config_digest(ensemble, k))
        })
        .collect()
}

/// `n` raw gains of a single link, in draw order.
pub fn sample_link<T: Real>(nu: T, sigma: T, n: usize, seed: u64) -> Vec<T> {
    let per_chunk: Vec<Vec<T>> = chunks(n)
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            (0..len).map(|_| draw(&mut rng, nu, sigma)).collect()
        })
        .collect();
    per_chunk.concat()
}

/// Unsorted k-th maxima, trial order preserved; for coupling checks.
#[cfg(test)]
pub(crate) fn trial_ranks<T: Real>(ensemble: &LinkEnsemble<T>, kmax: usize, n: usize, seed: u64) -> Vec<Vec<T>> {
    top_k_raw(ensemble, kmax, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evt::LinkGroup;
    use crate::specfun::marcum_q1;

    fn k(n: usize) -> OrderSelector {
        OrderSelector::new(n).unwrap()
    }

    #[test]
    fn per_link_mean_and_cdf() {
        let n = 1_000_000;
        let z = sample_link(1.0f64, 2.0, n, 7);
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - 9.0).abs() < 3.0 * (var / n as f64).sqrt(), "mean {mean}");
        let f = 1.0 - marcum_q1(0.5f64, 1.5).unwrap();
        let hit = z.iter().filter(|&&x| x <= 9.0).count() as f64 / n as f64;
        assert!((hit - f).abs() < 3.0 * (f * (1.0 - f) / n as f64).sqrt());
    }

    #[test]
    fn deterministic_across_thread_pools() {
        let e = LinkEnsemble::new(vec![LinkGroup::new(1.0, 5), LinkGroup::new(0.5, 5)], 2.0).unwrap();
        let a = sample_kth_max(&e, k(2), 10_000, 99).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_kth_max(&e, k(2), 10_000, 99).unwrap());
        assert_eq!(a, b);
        let c = sample_kth_max(&e, k(2), 10_000, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn top_k_shares_draws() {
        let e = LinkEnsemble::iid(1.0, 6, 2.0).unwrap();
        let all = sample_top_k(&e, 3, 5000, 3).unwrap();
        for r in 1..=3 {
            assert_eq!(all[r - 1], sample_kth_max(&e, k(r), 5000, 3).unwrap());
        }
        let raw = trial_ranks(&e, 3, 5000, 3);
        for t in 0..5000 {
            assert!(raw[0][t] >= raw[1][t] && raw[1][t] >= raw[2][t]);
        }
    }

    #[test]
    fn digest_records_generator_and_config() {
        let e = LinkEnsemble::new(vec![LinkGroup::new(1.0, 10), LinkGroup::new(0.5, 10)], 2.0).unwrap();
        assert_eq!(
            config_digest(&e, k(2)),
            "kthmax-ecdf/v1;rng=chacha8;stream=chunk;chunk=4096;sigma=2;groups=1x10|0.5x10;k=2"
        );
    }

    #[test]
    fn rejects_empty_and_oversized_rank() {
        let e = LinkEnsemble::iid(1.0, 2, 1.0).unwrap();
        assert!(sample_kth_max(&e, k(1), 0, 1).is_err());
        assert!(sample_kth_max(&e, k(3), 10, 1).is_err());
    }
}

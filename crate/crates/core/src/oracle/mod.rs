//! Ground truth for the k-th maximum: the exact order-statistic CDF of
//! independent, non-identical links and a seeded Monte Carlo sampler.

mod ecdf;
mod exact;
mod sampler;

pub use ecdf::{mc_metric, EmpiricalCdf, McMetric, FIXTURE_MAGIC};
pub use exact::{
    brute_force_from_exceedance, brute_force_kth_max_cdf, exact_kth_max_cdf,
    kth_max_cdf_from_exceedance, BRUTE_FORCE_MAX_LINKS,
};
pub use sampler::{config_digest, sample_kth_max, sample_link, sample_top_k, CHUNK_SIZE};

//! Experiment configuration, read from TOML.
//!
//! Every field has a default, so an empty file is a valid configuration
//! (i.i.d. ν = 1, σ = 2, M = 20, k = 1). Unknown keys are rejected.
//!
//! ```toml
//! k = [1, 2, 5]
//! mode = "both"          # asymptotic | finite_m | both; omitted: finite_m below M = 200
//! exact = true           # exact order-statistic column in `cdf`
//!
//! [ensemble]
//! sigma = 2.0
//! m = [20]               # one table block per link count
//! groups = [{ nu = 1.0, share = 1 }]   # links split by share; M must divide evenly
//! # per_link_sigma = [...]            # finite-M law and sampler only
//! # nu_tilde = 1.0                    # dominant amplitude override
//!
//! [metric]
//! which = ["rate"]       # outage | rate | eff_rate | bep
//! gamma_s = 1.0
//! z_th = 1.0
//! theta = 1.0
//! bep_c = 0.25
//! bep_rho = 0.25
//! eff_mode = "exact"     # exact | approx
//! series_terms = 4000
//!
//! [grid]                 # min/max/count, or quantile-based when min/max are absent
//! count = 512
//!
//! [mc]
//! samples = 100000       # 0 disables the Monte Carlo columns
//! seed = 2024
//!
//! [output]
//! format = "csv"         # csv | json
//! # path = "out.csv"     # stdout when absent
//! ```

use std::path::{Path, PathBuf};

use kthmax::evt::{norm_constants, norm_constants_with_nu_tilde, LawKind, LinkEnsemble, LinkGroup};
use kthmax::metrics::{EffMode, MetricParams};
use kthmax::NormConstants;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default = "yes")]
    pub exact: bool,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    /// Second ensemble, for `order`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble2: Option<EnsembleSpec>,
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Asymptotic,
    #[value(name = "finite_m")]
    FiniteM,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_m")]
    pub m: Vec<usize>,
    #[serde(default = "default_groups")]
    pub groups: Vec<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_link_sigma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_tilde: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub nu: f64,
    #[serde(default = "one")]
    pub share: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Outage,
    Rate,
    #[value(name = "eff_rate")]
    EffRate,
    Bep,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Outage => "outage",
            MetricKind::Rate => "rate",
            MetricKind::EffRate => "eff_rate",
            MetricKind::Bep => "bep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffModeSpec {
    Exact,
    Approx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(default = "default_which")]
    pub which: Vec<MetricKind>,
    #[serde(default = "unit")]
    pub gamma_s: f64,
    #[serde(default = "unit")]
    pub z_th: f64,
    #[serde(default = "unit")]
    pub theta: f64,
    #[serde(default = "quarter")]
    pub bep_c: f64,
    #[serde(default = "quarter")]
    pub bep_rho: f64,
    #[serde(default = "default_eff_mode")]
    pub eff_mode: EffModeSpec,
    #[serde(default = "default_series_terms")]
    pub series_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default = "default_count")]
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_k() -> Vec<usize> {
    vec![1]
}
fn yes() -> bool {
    true
}
fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn quarter() -> f64 {
    0.25
}
fn default_sigma() -> f64 {
    2.0
}
fn default_m() -> Vec<usize> {
    vec![20]
}
fn default_groups() -> Vec<GroupSpec> {
    vec![GroupSpec { nu: 1.0, share: 1 }]
}
fn default_which() -> Vec<MetricKind> {
    vec![MetricKind::Rate]
}
fn default_eff_mode() -> EffModeSpec {
    EffModeSpec::Exact
}
fn default_series_terms() -> usize {
    4000
}
fn default_count() -> usize {
    512
}
fn default_samples() -> usize {
    100_000
}
fn default_seed() -> u64 {
    2024
}
fn default_format() -> Format {
    Format::Csv
}

macro_rules! all_defaults {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                toml::from_str("").expect("every field has a default")
            }
        }
    )*};
}
all_defaults!(ExperimentConfig, EnsembleSpec, MetricSpec, GridSpec, McSpec, OutputSpec);

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    /// Checks every field that can be checked without building a law.
    pub fn validate(&self) -> CliResult<()> {
        if self.k.is_empty() {
            return Err(CliError::at("k", "at least one rank is needed"));
        }
        if let Some(i) = self.k.iter().position(|&k| k == 0) {
            return Err(CliError::at(&format!("k[{i}]"), "ranks start at 1"));
        }
        self.ensemble.validate("ensemble")?;
        if let Some(e) = &self.ensemble2 {
            e.validate("ensemble2")?;
        }
        let kmax = self.k_max();
        for (name, e) in std::iter::once(("ensemble", &self.ensemble)).chain(self.ensemble2.iter().map(|e| ("ensemble2", e))) {
            if let Some(&m) = e.m.iter().find(|&&m| m < kmax) {
                return Err(CliError::at(&format!("{name}.m"), format!("M = {m} is smaller than rank k = {kmax}")));
            }
        }
        self.metric.params()?;
        if self.metric.which.is_empty() {
            return Err(CliError::at("metric.which", "at least one metric is needed"));
        }
        if self.metric.series_terms == 0 {
            return Err(CliError::at("metric.series_terms", "must be > 0"));
        }
        self.grid.validate()?;
        if self.mc.samples != 0 && self.mc.samples < 100 {
            return Err(CliError::at("mc.samples", format!("use 0 (off) or at least 100, got {}", self.mc.samples)));
        }
        Ok(())
    }

    pub fn k_max(&self) -> usize {
        self.k.iter().copied().max().unwrap_or(1)
    }

    /// Laws to evaluate for an ensemble of `m` links.
    pub fn laws(&self, m: usize) -> Vec<LawKind> {
        match self.mode {
            Some(Mode::Asymptotic) => vec![LawKind::Asymptotic],
            Some(Mode::FiniteM) => vec![LawKind::FiniteM],
            Some(Mode::Both) => vec![LawKind::Asymptotic, LawKind::FiniteM],
            None => vec![kthmax::evt::default_law_kind(m)],
        }
    }
}

impl EnsembleSpec {
    fn validate(&self, at: &str) -> CliResult<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(CliError::at(&format!("{at}.sigma"), format!("must be finite and > 0, got {}", self.sigma)));
        }
        if self.m.is_empty() {
            return Err(CliError::at(&format!("{at}.m"), "at least one link count is needed"));
        }
        if self.groups.is_empty() {
            return Err(CliError::at(&format!("{at}.groups"), "at least one group is needed"));
        }
        for (i, g) in self.groups.iter().enumerate() {
            if !(g.nu.is_finite() && g.nu > 0.0) {
                return Err(CliError::at(&format!("{at}.groups[{i}].nu"), format!("must be finite and > 0, got {}", g.nu)));
            }
            if g.share == 0 {
                return Err(CliError::at(&format!("{at}.groups[{i}].share"), "must be >= 1"));
            }
        }
        let total = self.total_share();
        for (i, &m) in self.m.iter().enumerate() {
            if m == 0 || m % total != 0 {
                return Err(CliError::at(
                    &format!("{at}.m[{i}]"),
                    format!("M = {m} does not split into the group shares (total share {total})"),
                ));
            }
        }
        if let Some(s) = &self.per_link_sigma {
            if self.m.len() != 1 || s.len() != self.m[0] {
                return Err(CliError::at(
                    &format!("{at}.per_link_sigma"),
                    format!("needs exactly one link count and one entry per link, got {} entries", s.len()),
                ));
            }
        }
        if let Some(nu) = self.nu_tilde {
            if !self.groups.iter().any(|g| g.nu == nu) {
                return Err(CliError::at(&format!("{at}.nu_tilde"), format!("{nu} is not a group amplitude")));
            }
        }
        Ok(())
    }

    fn total_share(&self) -> usize {
        self.groups.iter().map(|g| g.share).sum()
    }

    /// The ensemble of `m` links (one of the configured link counts).
    pub fn build(&self, m: usize) -> CliResult<LinkEnsemble<f64>> {
        let total = self.total_share();
        let groups = self
            .groups
            .iter()
            .map(|g| LinkGroup::new(g.nu, m / total * g.share))
            .collect();
        let mut e = LinkEnsemble::new(groups, self.sigma)?;
        if let Some(s) = &self.per_link_sigma {
            e = e.with_per_link_sigma(s.clone())?;
        }
        Ok(e)
    }

    pub fn constants(&self, e: &LinkEnsemble<f64>) -> CliResult<NormConstants> {
        Ok(match self.nu_tilde {
            Some(nu) => norm_constants_with_nu_tilde(e, nu)?,
            None => norm_constants(e)?,
        })
    }
}

impl MetricSpec {
    pub fn params(&self) -> CliResult<MetricParams<f64>> {
        MetricParams::new(self.gamma_s, self.z_th, self.theta, self.bep_c, self.bep_rho)
            .map_err(|e| CliError::Validation(format!("metric: {e}")))
    }

    pub fn eff_mode(&self) -> EffMode {
        match self.eff_mode {
            EffModeSpec::Exact => EffMode::Exact,
            EffModeSpec::Approx => EffMode::HighSnrApprox,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> CliResult<()> {
        if self.count < 2 {
            return Err(CliError::at("grid.count", format!("needs at least 2 points, got {}", self.count)));
        }
        match (self.min, self.max) {
            (None, None) => Ok(()),
            (Some(lo), Some(hi)) if lo.is_finite() && hi.is_finite() && lo < hi => Ok(()),
            (Some(lo), Some(hi)) => Err(CliError::at("grid", format!("need finite min < max, got [{lo}, {hi}]"))),
            _ => Err(CliError::at("grid", "give both min and max, or neither for the quantile grid")),
        }
    }

    pub fn explicit(&self) -> Option<(f64, f64)> {
        self.min.zip(self.max)
    }
}

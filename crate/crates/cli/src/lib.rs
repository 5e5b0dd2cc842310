//! `kthmax` command line: figure presets, CDF tables and theory-vs-Monte
//! Carlo metric tables, written as CSV or JSON for external plotting.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use kthmax::acceptance::{Options, Profile};

use config::{ExperimentConfig, Format, MetricKind, Mode};
use error::{CliError, CliResult};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_SELFTEST: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "kthmax", version, about = "k-th maximum of Rician link gains: limit law, metrics, Monte Carlo checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML experiment configuration
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Start from a figure preset (see `preset list`)
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Monte Carlo seed
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Monte Carlo sample count; 0 turns sampling off
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Which law supplies the theory columns
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Output file (stdout by default)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// 10⁴ samples: the selftest quick profile, or a sample cap elsewhere
    #[arg(long, global = true)]
    pub quick: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CDF of the k-th maximum on a grid: limit law, finite-M law, exact and empirical
    Cdf,
    /// Outage, average rate, effective rate or BEP: theory against Monte Carlo
    Metric {
        /// Metrics to evaluate (overrides metric.which)
        #[arg(long, value_enum, value_delimiter = ',')]
        which: Vec<MetricKind>,
    },
    /// Stochastic ordering of the limit laws of `ensemble` and `ensemble2`
    Order,
    /// Run the seed-pinned acceptance suite; exit status 3 on any failure
    Selftest {
        /// Sampler fixture to check instead of the built-in one
        #[arg(long, value_name = "PATH")]
        fixture: Option<PathBuf>,
    },
    /// List the figure presets or print one as a config file
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum PresetAction {
    List,
    Dump { name: String },
}

impl Cli {
    fn reject(&self, cmd: &str, allowed: &[&str]) -> CliResult<()> {
        let given = [
            ("--config", self.config.is_some()),
            ("--preset", self.preset.is_some()),
            ("--seed", self.seed.is_some()),
            ("--samples", self.samples.is_some()),
            ("--mode", self.mode.is_some()),
            ("--out", self.out.is_some()),
            ("--format", self.format.is_some()),
            ("--quick", self.quick),
        ];
        match given.iter().find(|(flag, set)| *set && !allowed.contains(flag)) {
            Some((flag, _)) => Err(CliError::Validation(format!("{flag} does not apply to `{cmd}`"))),
            None => Ok(()),
        }
    }

    /// The configuration after presets/files and flag overrides.
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation("--config and --preset are mutually exclusive".into()))
            }
            (Some(path), None) => ExperimentConfig::load(path)?,
            (None, Some(name)) => preset(name)?.config(),
            (None, None) => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.mc.seed = seed;
        }
        match self.samples {
            Some(n) => cfg.mc.samples = n,
            None if self.quick => cfg.mc.samples = cfg.mc.samples.min(10_000),
            None => {}
        }
        if self.mode.is_some() {
            cfg.mode = self.mode;
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn preset(name: &str) -> CliResult<&'static presets::Preset> {
    presets::find(name).ok_or_else(|| {
        let names: Vec<&str> = presets::PRESETS.iter().map(|p| p.name).collect();
        CliError::Validation(format!("unknown preset `{name}` (known: {})", names.join(", ")))
    })
}

fn write_table(cfg: &ExperimentConfig, t: &output::Table) -> CliResult<()> {
    let mut buf = Vec::new();
    t.write(cfg.output.format, &mut buf)?;
    output::emit(cfg.output.path.as_deref(), &buf)
}

const RUN_FLAGS: [&str; 8] = [
    "--config", "--preset", "--seed", "--samples", "--mode", "--out", "--format", "--quick",
];

/// Runs one invocation and returns its exit status.
pub fn run(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Cdf => {
            cli.reject("cdf", &RUN_FLAGS)?;
            let cfg = cli.resolve()?;
            write_table(&cfg, &commands::cmd_cdf(&cfg)?)?;
            Ok(EXIT_OK)
        }
        Command::Metric { which } => {
            cli.reject("metric", &RUN_FLAGS)?;
            let cfg = cli.resolve()?;
            let which = if which.is_empty() { &cfg.metric.which } else { which };
            let report = commands::cmd_metric(&cfg, which)?;
            write_table(&cfg, &report.table)?;
            if report.failed_rows > 0 {
                eprintln!("error: {} row(s) could not be computed; see the status column", report.failed_rows);
                return Ok(EXIT_NUMERICAL);
            }
            Ok(EXIT_OK)
        }
        Command::Order => {
            cli.reject("order", &["--config", "--preset", "--mode", "--out", "--format"])?;
            let cfg = cli.resolve()?;
            let outcome = commands::cmd_order(&cfg)?;
            write_table(&cfg, &outcome.table)?;
            match outcome.verdict {
                kthmax::evt::OrderVerdict::Crossing { index } => eprintln!("verdict: crossing at grid index {index}"),
                v => eprintln!("verdict: {}", v.as_str()),
            }
            Ok(EXIT_OK)
        }
        Command::Selftest { fixture } => {
            cli.reject("selftest", &["--quick", "--out", "--format"])?;
            selftest(cli, fixture.as_ref())
        }
        Command::Preset { action } => match action {
            PresetAction::List => {
                cli.reject("preset list", &[])?;
                let mut out = String::new();
                for p in &presets::PRESETS {
                    out.push_str(&format!("{:<6}{}\n", p.name, p.summary));
                }
                output::emit(None, out.as_bytes())?;
                Ok(EXIT_OK)
            }
            PresetAction::Dump { name } => {
                cli.reject("preset dump", &["--out"])?;
                let p = preset(name)?;
                let text = format!("# kthmax preset {}: {}\n{}", p.name, p.summary, p.config().to_toml());
                output::emit(cli.out.as_deref(), text.as_bytes())?;
                Ok(EXIT_OK)
            }
        },
    }
}

fn selftest(cli: &Cli, fixture: Option<&PathBuf>) -> CliResult<u8> {
    let profile = if cli.quick { Profile::Quick } else { Profile::Full };
    let fixture = match fixture {
        Some(p) => Some(std::fs::read(p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let opts = Options { profile, fixture };
    // human-readable unless a machine format was asked for
    let text = cli.format.is_none();
    let results = commands::cmd_selftest(&opts, |r| {
        if text {
            let mut out = std::io::stdout().lock();
            let _ = write!(out, "{r}");
            let _ = out.flush();
        }
    });
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| format!("[{}] {}", r.id, r.name)).collect();
    if text {
        let summary = format!("{}/{} criteria passed\n", results.len() - failed.len(), results.len());
        match &cli.out {
            Some(path) => {
                let mut body = String::new();
                for r in &results {
                    body.push_str(&r.to_string());
                }
                body.push_str(&summary);
                output::emit(Some(path), body.as_bytes())?;
            }
            None => print!("{summary}"),
        }
    } else {
        let mut buf = Vec::new();
        commands::selftest_table(&results, profile).write(cli.format.expect("machine format"), &mut buf)?;
        output::emit(cli.out.as_deref(), &buf)?;
    }
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("selftest failed: {}", failed.join(", "));
        Ok(EXIT_SELFTEST)
    }
}

//! The six figure configurations: σ = 2 on every link. Figures 4–6 use
//! link counts that split exactly into the groups (21 and 42 for thirds,
//! 20 for quarters).

use crate::config::{EnsembleSpec, ExperimentConfig, GroupSpec, McSpec, MetricKind, Mode};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> ExperimentConfig,
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        (self.build)()
    }
}

pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "fig1",
        summary: "cdf: i.i.d. links, nu = 1, M = 20, k in {1, 2, 5}",
        build: fig1,
    },
    Preset {
        name: "fig2",
        summary: "cdf: nu = 1 on half the links, 0.5 on the rest, M = 20, k in {1, 2, 5}",
        build: fig2,
    },
    Preset {
        name: "fig3",
        summary: "cdf: thirds nu in {3, 1, 0.5}, M = 30, k in {1, 2, 5}",
        build: fig3,
    },
    Preset {
        name: "fig4",
        summary: "metric rate: thirds nu in {2, 1, 0.5}, M in {21, 42}, k = 1..5, gamma_s = 1",
        build: fig4,
    },
    Preset {
        name: "fig5",
        summary: "metric eff_rate: as fig4 with theta = 1",
        build: fig5,
    },
    Preset {
        name: "fig6",
        summary: "metric bep: nu = 1 on 3/4 of the links, 0.5 on 1/4, M = 20, C = rho = 0.25",
        build: fig6,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn ensemble(m: &[usize], groups: &[(f64, usize)]) -> EnsembleSpec {
    EnsembleSpec {
        m: m.to_vec(),
        groups: groups.iter().map(|&(nu, share)| GroupSpec { nu, share }).collect(),
        ..EnsembleSpec::default()
    }
}

fn cdf_figure(m: usize, groups: &[(f64, usize)]) -> ExperimentConfig {
    ExperimentConfig {
        k: vec![1, 2, 5],
        mode: Some(Mode::Both),
        ensemble: ensemble(&[m], groups),
        ..ExperimentConfig::default()
    }
}

fn metric_figure(m: &[usize], groups: &[(f64, usize)], which: MetricKind) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        k: (1..=5).collect(),
        mode: Some(Mode::Both),
        ensemble: ensemble(m, groups),
        mc: McSpec {
            samples: 1_000_000,
            ..McSpec::default()
        },
        ..ExperimentConfig::default()
    };
    c.metric.which = vec![which];
    c
}

const THIRDS: [(f64, usize); 3] = [(2.0, 1), (1.0, 1), (0.5, 1)];

fn fig1() -> ExperimentConfig {
    cdf_figure(20, &[(1.0, 1)])
}

fn fig2() -> ExperimentConfig {
    cdf_figure(20, &[(1.0, 1), (0.5, 1)])
}

fn fig3() -> ExperimentConfig {
    cdf_figure(30, &[(3.0, 1), (1.0, 1), (0.5, 1)])
}

fn fig4() -> ExperimentConfig {
    metric_figure(&[21, 42], &THIRDS, MetricKind::Rate)
}

fn fig5() -> ExperimentConfig {
    let mut c = metric_figure(&[21, 42], &THIRDS, MetricKind::EffRate);
    c.metric.theta = 1.0;
    c
}

fn fig6() -> ExperimentConfig {
    let mut c = metric_figure(&[20], &[(1.0, 3), (0.5, 1)], MetricKind::Bep);
    c.metric.bep_c = 0.25;
    c.metric.bep_rho = 0.25;
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_round_trip() {
        for p in &PRESETS {
            let c = p.config();
            c.validate().unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c, "{}", p.name);
        }
    }

    #[test]
    fn figure_parameters() {
        let f3 = find("fig3").unwrap().config();
        let e = f3.ensemble.build(30).unwrap();
        let groups: Vec<(f64, usize)> = e.groups().iter().map(|g| (g.nu, g.count)).collect();
        assert_eq!(groups, vec![(3.0, 10), (1.0, 10), (0.5, 10)]);
        assert_eq!(e.sigma(), 2.0);

        let f6 = find("fig6").unwrap().config();
        let e = f6.ensemble.build(20).unwrap();
        let groups: Vec<(f64, usize)> = e.groups().iter().map(|g| (g.nu, g.count)).collect();
        assert_eq!(groups, vec![(1.0, 15), (0.5, 5)]);
        assert_eq!((f6.metric.bep_c, f6.metric.bep_rho), (0.25, 0.25));

        let f4 = find("fig4").unwrap().config();
        assert_eq!(f4.ensemble.m, vec![21, 42]);
        assert_eq!(f4.k, vec![1, 2, 3, 4, 5]);
        assert!(find("fig7").is_none());
    }
}

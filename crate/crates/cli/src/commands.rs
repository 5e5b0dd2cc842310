use std::time::Duration;

use kthmax::acceptance::{self, CriterionResult, Options, Profile, CRITERIA};
use kthmax::evt::{
    linspace, normalized_kth_max_cdf, quantile_grid, stochastic_order_check, unnormalized_kth_max_cdf_asym,
    AsymptoticLaw, FiniteMLaw, KthMaxLaw, LawKind, LinkEnsemble, OrderVerdict,
};
use kthmax::metrics::{
    avg_bep, avg_bep_quadrature, avg_throughput, avg_throughput_quadrature, effective_throughput,
    outage_probability, outage_with_law, Method,
};
use kthmax::oracle::{exact_kth_max_cdf, mc_metric, sample_top_k, McMetric};
use kthmax::{EmpiricalCdf, NormConstants, OrderSelector};
use serde_json::json;

use crate::config::{ExperimentConfig, MetricKind};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

const GRID_TAIL: f64 = 1e-3;

struct Setup {
    m: usize,
    ensemble: LinkEnsemble<f64>,
    consts: Option<NormConstants>,
    laws: Vec<LawKind>,
    samples: Option<Vec<EmpiricalCdf>>,
}

fn setups(cfg: &ExperimentConfig) -> CliResult<Vec<Setup>> {
    cfg.ensemble
        .m
        .iter()
        .map(|&m| {
            let ensemble = cfg.ensemble.build(m)?;
            let laws = cfg.laws(m);
            let consts = if laws.contains(&LawKind::Asymptotic) {
                Some(cfg.ensemble.constants(&ensemble)?)
            } else {
                None
            };
            let samples = if cfg.mc.samples > 0 {
                Some(sample_top_k(&ensemble, cfg.k_max(), cfg.mc.samples, cfg.mc.seed)?)
            } else {
                None
            };
            Ok(Setup {
                m,
                ensemble,
                consts,
                laws,
                samples,
            })
        })
        .collect()
}

fn law_for(s: &Setup, kind: LawKind, k: OrderSelector) -> CliResult<Box<dyn KthMaxLaw<f64>>> {
    Ok(match kind {
        LawKind::FiniteM => Box::new(FiniteMLaw::new(s.ensemble.clone(), k)?),
        LawKind::Asymptotic => Box::new(AsymptoticLaw::new(s.consts.expect("constants built for asymptotic"), k)),
    })
}

fn grid(cfg: &ExperimentConfig, law: &dyn KthMaxLaw<f64>) -> CliResult<Vec<f64>> {
    if let Some((lo, hi)) = cfg.grid.explicit() {
        return Ok(linspace(lo, hi, cfg.grid.count));
    }
    let g = quantile_grid(law, GRID_TAIL, cfg.grid.count)?;
    // the gain is non-negative; a limit-law quantile may not be
    let lo = g[0].max(0.0);
    Ok(linspace(lo, g[g.len() - 1], cfg.grid.count))
}

fn mc_meta(t: &mut Table, cfg: &ExperimentConfig) {
    t.meta.insert("mc_samples".into(), json!(cfg.mc.samples));
    t.meta.insert("mc_seed".into(), json!(cfg.mc.seed));
}

/// One row per (M, k, grid point) with every requested curve.
pub fn cmd_cdf(cfg: &ExperimentConfig) -> CliResult<Table> {
    let setups = setups(cfg)?;
    let asym = setups.iter().any(|s| s.consts.is_some());
    let finite = setups.iter().any(|s| s.laws.contains(&LawKind::FiniteM));
    let mut cols = vec!["m", "k", "z"];
    if asym {
        cols.extend(["z_normalized", "theory_normalized", "theory_unnormalized"]);
    }
    if finite {
        cols.push("finite_m");
    }
    if cfg.exact {
        cols.push("exact");
    }
    if cfg.mc.samples > 0 {
        cols.push("empirical");
    }
    let mut t = Table::new("cdf", cols.into_iter().map(String::from).collect());
    mc_meta(&mut t, cfg);

    for s in &setups {
        for &k in &cfg.k {
            let rank = OrderSelector::for_links(k, s.m)?;
            let grid_law = if s.laws.contains(&LawKind::FiniteM) {
                LawKind::FiniteM
            } else {
                LawKind::Asymptotic
            };
            let fin = FiniteMLaw::new(s.ensemble.clone(), rank)?;
            let zs = grid(cfg, law_for(s, grid_law, rank)?.as_ref())?;
            for z in zs {
                let mut row: Vec<Cell> = vec![s.m.into(), k.into(), z.into()];
                if asym {
                    match &s.consts {
                        Some(c) => {
                            let zn = c.normalize(z);
                            row.push(zn.into());
                            row.push(normalized_kth_max_cdf(c, rank, zn).into());
                            row.push(unnormalized_kth_max_cdf_asym(c, rank, z).into());
                        }
                        None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
                    }
                }
                if finite {
                    row.push(if s.laws.contains(&LawKind::FiniteM) {
                        fin.cdf(z)?.into()
                    } else {
                        Cell::Empty
                    });
                }
                if cfg.exact {
                    let v = if z > 0.0 { exact_kth_max_cdf(&s.ensemble, rank, z)? } else { 0.0 };
                    row.push(v.into());
                }
                if let Some(tops) = &s.samples {
                    row.push(tops[k - 1].eval(z).into());
                }
                t.push(row);
            }
        }
    }
    Ok(t)
}

pub struct MetricReport {
    pub table: Table,
    /// Rows whose theory value could not be computed.
    pub failed_rows: usize,
}

fn theory(
    cfg: &ExperimentConfig,
    s: &Setup,
    which: MetricKind,
    kind: LawKind,
    k: OrderSelector,
) -> CliResult<(f64, Method, &'static str)> {
    let params = cfg.metric.params()?;
    let ok = "ok";
    if kind == LawKind::Asymptotic {
        let c = s.consts.as_ref().expect("constants built for asymptotic");
        match which {
            MetricKind::Outage => return Ok((outage_probability(c, k, &params), Method::ClosedForm, ok)),
            MetricKind::Rate => {
                let r = avg_throughput(c, k, &params, cfg.metric.series_terms)?;
                let status = match r.series {
                    Some(sr) if !sr.converged => "series_not_converged",
                    _ => ok,
                };
                return Ok((r.value, r.method, status));
            }
            MetricKind::Bep => {
                let r = avg_bep(c, k, &params);
                return Ok((r.value, Method::ClosedForm, if r.model_out_of_range { "model_out_of_range" } else { ok }));
            }
            MetricKind::EffRate => {}
        }
    }
    let law = law_for(s, kind, k)?;
    Ok(match which {
        MetricKind::Outage => (outage_with_law(law.as_ref(), &params)?, Method::ClosedForm, ok),
        MetricKind::Rate => (avg_throughput_quadrature(law.as_ref(), &params)?, Method::Quadrature, ok),
        MetricKind::EffRate => (
            effective_throughput(law.as_ref(), &params, cfg.metric.eff_mode())?,
            Method::Quadrature,
            ok,
        ),
        MetricKind::Bep => (avg_bep_quadrature(law.as_ref(), &params)?, Method::Quadrature, ok),
    })
}

/// Theory against Monte Carlo for each (metric, M, k, law).
pub fn cmd_metric(cfg: &ExperimentConfig, which: &[MetricKind]) -> CliResult<MetricReport> {
    let setups = setups(cfg)?;
    let params = cfg.metric.params()?;
    let mc = cfg.mc.samples > 0;
    let mut cols = vec!["metric", "m", "k", "law", "theory", "method"];
    if mc {
        cols.extend(["mc_estimate", "mc_stderr", "rel_diff"]);
    }
    cols.push("status");
    let mut t = Table::new("metric", cols.into_iter().map(String::from).collect());
    mc_meta(&mut t, cfg);
    t.meta.insert(
        "params".into(),
        json!({
            "gamma_s": params.gamma_s,
            "z_th": params.z_th,
            "theta": params.theta,
            "bep_c": params.bep_c,
            "bep_rho": params.bep_rho,
        }),
    );
    let mut failed_rows = 0;

    for &metric in which {
        let mc_kind = match metric {
            MetricKind::Outage => McMetric::Outage,
            MetricKind::Rate => McMetric::AvgRate,
            MetricKind::EffRate => McMetric::EffRate,
            MetricKind::Bep => McMetric::Bep,
        };
        for s in &setups {
            for &k in &cfg.k {
                let rank = OrderSelector::for_links(k, s.m)?;
                let estimate = match &s.samples {
                    Some(tops) => Some(mc_metric(&tops[k - 1], &params, mc_kind)?),
                    None => None,
                };
                for &kind in &s.laws {
                    let mut row: Vec<Cell> = vec![metric.as_str().into(), s.m.into(), k.into(), kind.as_str().into()];
                    let result = theory(cfg, s, metric, kind, rank);
                    match &result {
                        Ok((v, method, _)) => {
                            row.push((*v).into());
                            row.push(method.as_str().into());
                        }
                        Err(_) => row.extend([Cell::Empty, Cell::Empty]),
                    }
                    if let Some((est, se)) = estimate {
                        row.push(est.into());
                        row.push(se.into());
                        row.push(match &result {
                            Ok((v, ..)) if est != 0.0 => ((v - est).abs() / est.abs()).into(),
                            _ => Cell::Empty,
                        });
                    }
                    row.push(match result {
                        Ok((.., status)) => status.into(),
                        Err(e) => {
                            failed_rows += 1;
                            format!("error: {e}").into()
                        }
                    });
                    t.push(row);
                }
            }
        }
    }
    Ok(MetricReport { table: t, failed_rows })
}

pub struct OrderOutcome {
    pub table: Table,
    pub verdict: OrderVerdict,
}

/// Stochastic ordering of the limit laws of `ensemble` and `ensemble2`.
pub fn cmd_order(cfg: &ExperimentConfig) -> CliResult<OrderOutcome> {
    let second = cfg
        .ensemble2
        .as_ref()
        .ok_or_else(|| CliError::at("ensemble2", "order needs a second ensemble"))?;
    let mut consts = Vec::new();
    for (name, spec) in [("ensemble", &cfg.ensemble), ("ensemble2", second)] {
        let [m] = spec.m[..] else {
            return Err(CliError::at(&format!("{name}.m"), "order compares exactly one link count per ensemble"));
        };
        consts.push(spec.constants(&spec.build(m)?)?);
    }
    let (c1, c2) = (consts[0], consts[1]);

    let zs = match cfg.grid.explicit() {
        Some((lo, hi)) => linspace(lo, hi, cfg.grid.count),
        None => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &k in &cfg.k {
                let rank = OrderSelector::new(k)?;
                for c in [c1, c2] {
                    let law = AsymptoticLaw::new(c, rank);
                    lo = lo.min(law.quantile(GRID_TAIL)?);
                    hi = hi.max(law.quantile(1.0 - GRID_TAIL)?);
                }
            }
            linspace(lo, hi, cfg.grid.count)
        }
    };
    let report = stochastic_order_check(&c1, &c2, &zs)?;

    let mut cols = vec!["index".to_string(), "z".into(), "margin".into()];
    for &k in &cfg.k {
        cols.push(format!("cdf_first_k{k}"));
        cols.push(format!("cdf_second_k{k}"));
    }
    let mut t = Table::new("order", cols);
    for (i, (&z, &margin)) in zs.iter().zip(&report.margins).enumerate() {
        let mut row: Vec<Cell> = vec![i.into(), z.into(), margin.into()];
        for &k in &cfg.k {
            let rank = OrderSelector::new(k)?;
            row.push(unnormalized_kth_max_cdf_asym(&c1, rank, z).into());
            row.push(unnormalized_kth_max_cdf_asym(&c2, rank, z).into());
        }
        t.push(row);
    }
    t.meta.insert("verdict".into(), json!(report.verdict.as_str()));
    let idx = match report.verdict {
        OrderVerdict::Crossing { index } => Some(index),
        _ => None,
    };
    t.meta.insert("crossing_index".into(), json!(idx));
    for (key, c) in [("first", c1), ("second", c2)] {
        t.meta.insert(key.into(), json!({ "a_m": c.a_m(), "b_m": c.b_m(), "p": c.p() }));
    }
    Ok(OrderOutcome {
        table: t,
        verdict: report.verdict,
    })
}

/// Runs the acceptance suite, reporting each criterion as it finishes.
pub fn cmd_selftest(opts: &Options, mut on_result: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|c| {
            let r = acceptance::run(c.0, opts);
            on_result(&r);
            r
        })
        .collect()
}

pub fn selftest_table(results: &[CriterionResult], profile: Profile) -> Table {
    let cols = ["id", "criterion", "result", "elapsed_s", "budget_s", "detail"];
    let mut t = Table::new("selftest", cols.into_iter().map(String::from).collect());
    t.meta.insert(
        "profile".into(),
        json!(match profile {
            Profile::Full => "full",
            Profile::Quick => "quick",
        }),
    );
    for r in results {
        t.push(vec![
            (r.id as usize).into(),
            r.name.into(),
            if r.passed { "pass" } else { "fail" }.into(),
            secs(r.elapsed).into(),
            secs(r.budget).into(),
            r.detail.clone().into(),
        ]);
    }
    t
}

fn secs(d: Duration) -> f64 {
    (d.as_secs_f64() * 1000.0).round() / 1000.0
}

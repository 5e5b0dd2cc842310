//! Performance of the k-th best selection combiner: outage, average and
//! effective throughput, and average bit-error probability.
//!
//! Closed forms are tied to the asymptotic constants; the quadrature
//! variants take any [`KthMaxLaw`], so the moderate-M law can be used as
//! well.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::evt::{unnormalized_kth_max_cdf_asym, AsymptoticLaw, KthMaxLaw, NormConstants, OrderSelector};
use crate::quad::{integrate, QuadConfig};
use crate::scalar::Real;
use crate::specfun::{exp_integral_e1_scaled, log_gamma};

/// Receiver-side parameters, all on a linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams<T> {
    pub gamma_s: T,
    pub z_th: T,
    pub theta: T,
    pub bep_c: T,
    pub bep_rho: T,
}

impl<T: Real> MetricParams<T> {
    pub fn new(gamma_s: T, z_th: T, theta: T, bep_c: T, bep_rho: T) -> Result<Self> {
        let pos = |name: &str, v: T| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        pos("gamma_s", gamma_s)?;
        pos("z_th", z_th)?;
        pos("theta", theta)?;
        if !(bep_c > T::zero() && bep_c <= T::one()) {
            return Err(Error::Invalid(format!("bep_c must lie in (0, 1], got {bep_c}")));
        }
        // ρ = 0 is admitted: it is the degenerate "no SNR dependence" end
        if !(bep_rho.is_finite() && bep_rho >= T::zero()) {
            return Err(Error::Invalid(format!("bep_rho must be finite and >= 0, got {bep_rho}")));
        }
        Ok(Self {
            gamma_s,
            z_th,
            theta,
            bep_c,
            bep_rho,
        })
    }
}

/// Diagnostics of the alternating throughput series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesReport<T> {
    pub value: T,
    pub terms_used: usize,
    pub converged: bool,
    pub max_term_magnitude: T,
}

/// How a throughput figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate<T> {
    pub value: T,
    pub method: Method,
    pub series: Option<SeriesReport<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffMode {
    Exact,
    HighSnrApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BepReport<T> {
    pub value: T,
    /// The closed form exceeded C and was clipped.
    pub model_out_of_range: bool,
}

/// Probability that γ_s·Z falls to z_th or below, under the limit law.
pub fn outage_probability<T: Real>(
    consts: &NormConstants<T>,
    k: OrderSelector,
    params: &MetricParams<T>,
) -> T {
    unnormalized_kth_max_cdf_asym(consts, k, params.z_th / params.gamma_s)
}

pub fn outage_with_law<T: Real, L: KthMaxLaw<T> + ?Sized>(law: &L, params: &MetricParams<T>) -> Result<T> {
    law.cdf(params.z_th / params.gamma_s)
}

/// Largest (1 + γ_s b)/(γ_s a) for which the series is attempted at all.
pub const SERIES_GATE: f64 = 50.0;

// Largest max-term/|sum| ratio the alternating sum may lose to cancellation.
const CANCELLATION_LIMIT: f64 = 1e4;

/// Average throughput in bit/s/Hz from the alternating E1 series of the
/// limit law, summed term by term in log-magnitude form.
pub fn avg_throughput_series<T: Real>(
    consts: &NormConstants<T>,
    k: OrderSelector,
    params: &MetricParams<T>,
    cap: usize,
) -> SeriesReport<T> {
    let (a, b, p, g) = (consts.a_m(), consts.b_m(), consts.p(), params.gamma_s);
    let kf = T::from_usize_lossy(k.get());
    let ln_gk = log_gamma(kf).expect("k >= 1");
    let ln_ln2 = T::LN_2().ln();
    let ln_p = p.ln();
    let ceiling = T::c(700.0).min(T::c(0.98) * T::max_value().ln());

    let (mut sum, mut comp) = (T::zero(), T::zero());
    let mut max_mag = T::zero();
    let mut prev_mag = T::infinity();
    let mut terms_used = 0;
    let mut settled = false;
    let mut blown = false;
    for n in 0..cap.max(1) {
        let nf = T::from_usize_lossy(n);
        let m = kf + nf;
        let beta = m / (a * g);
        let ln_e1 = match exp_integral_e1_scaled(beta) {
            Ok(v) => v.ln(),
            Err(_) => {
                blown = true;
                break;
            }
        };
        let ln_fact = log_gamma(nf + T::one()).expect("n + 1 >= 1");
        let ln_mag = m * ln_p - ln_gk - ln_fact - m.ln() + m * b / a + ln_e1 - ln_ln2;
        if !(ln_mag <= ceiling) {
            blown = true;
            break;
        }
        let mag = ln_mag.exp();
        let term = if n % 2 == 0 { mag } else { -mag };
        // Neumaier summation
        let t = sum + term;
        comp = comp
            + if sum.abs() >= term.abs() {
                (sum - t) + term
            } else {
                (term - t) + sum
            };
        sum = t;
        terms_used = n + 1;
        max_mag = max_mag.max(mag);
        let value = sum + comp;
        if n > 0 && mag < prev_mag && mag <= T::c(1e-10) * value.abs() {
            settled = true;
            break;
        }
        prev_mag = mag;
    }
    let value = sum + comp;
    let converged = settled
        && !blown
        && value > T::zero()
        && max_mag <= T::c(CANCELLATION_LIMIT) * value.abs();
    SeriesReport {
        value,
        terms_used: terms_used.max(1),
        converged,
        max_term_magnitude: max_mag,
    }
}

// Integration window: central mass of the law, never below z = 0.
fn window<T: Real, L: KthMaxLaw<T> + ?Sized>(law: &L) -> Result<[T; 5]> {
    let tail = T::c(1e-9).max(T::epsilon() * T::c(64.0));
    let q = |x: T| law.quantile(x);
    let lo = q(tail)?.max(T::zero());
    let hi = q(T::one() - tail)?;
    let cuts = [q(T::c(1e-3))?, q(T::c(0.5))?, q(T::c(1.0 - 1e-3))?];
    let clamp = |x: T| x.max(lo).min(hi);
    Ok([lo, clamp(cuts[0]), clamp(cuts[1]), clamp(cuts[2]), hi])
}

/// ∫ g(z) pdf(z) dz over the law's central window, split at three quantiles,
/// plus g(0)·F(0) when the window reaches the origin.
pub fn expectation<T: Real, L, G>(law: &L, g: G, rel_tol: T) -> Result<T>
where
    L: KthMaxLaw<T> + ?Sized,
    G: Fn(T) -> T,
{
    let pts = window(law)?;
    expectation_on(law, g, &pts, rel_tol)
}

fn expectation_on<T: Real, L, G>(law: &L, g: G, pts: &[T], rel_tol: T) -> Result<T>
where
    L: KthMaxLaw<T> + ?Sized,
    G: Fn(T) -> T,
{
    let failed: Cell<Option<Error>> = Cell::new(None);
    let f = |z: T| match law.pdf(z) {
        Ok(d) => {
            if d == T::zero() {
                T::zero()
            } else {
                g(z) * d
            }
        }
        Err(e) => {
            failed.set(Some(e));
            T::zero()
        }
    };
    let cfg = QuadConfig::with_rel_tol(rel_tol);
    let mut total = T::zero();
    let mut f = f;
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let r = integrate(&mut f, w[0], w[1], &cfg)?;
            total = total + r.value;
        }
    }
    if let Some(e) = failed.take() {
        return Err(Error::Quadrature(format!("density evaluation failed: {e}")));
    }
    // mass at z <= 0 is held at the origin, where the gain is censored
    if pts[0] == T::zero() {
        let atom = law.cdf(T::zero())?;
        if atom > T::zero() {
            total = total + g(T::zero()) * atom;
        }
    }
    // the pieces were integrated separately; take the global tolerance from the sum
    Ok(total)
}

fn default_tol<T: Real>() -> T {
    QuadConfig::<T>::default().rel_tol
}

/// E[log2(1 + γ_s Z)] by adaptive quadrature against the law's density.
pub fn avg_throughput_quadrature<T: Real, L: KthMaxLaw<T> + ?Sized>(
    law: &L,
    params: &MetricParams<T>,
) -> Result<T> {
    let g = params.gamma_s;
    expectation(law, |z| (g * z).ln_1p() / T::LN_2(), default_tol())
}

/// Throughput under the limit law: the series when it is safe and
/// converges, quadrature otherwise.
pub fn avg_throughput<T: Real>(
    consts: &NormConstants<T>,
    k: OrderSelector,
    params: &MetricParams<T>,
    cap: usize,
) -> Result<RateEstimate<T>> {
    let g = params.gamma_s;
    let gate = (T::one() + g * consts.b_m()) / (g * consts.a_m());
    let series = if gate <= T::c(SERIES_GATE) {
        let r = avg_throughput_series(consts, k, params, cap);
        if r.converged {
            return Ok(RateEstimate {
                value: r.value,
                method: Method::Series,
                series: Some(r),
            });
        }
        Some(r)
    } else {
        None
    };
    let law = AsymptoticLaw::new(*consts, k);
    Ok(RateEstimate {
        value: avg_throughput_quadrature(&law, params)?,
        method: Method::Quadrature,
        series,
    })
}

/// −(1/θ) log2 E[(1 + γ_s Z)^{−θ}], or with (γ_s Z)^{−θ} in the
/// high-SNR approximation (a lower bound on the exact value).
pub fn effective_throughput<T: Real, L: KthMaxLaw<T> + ?Sized>(
    law: &L,
    params: &MetricParams<T>,
    mode: EffMode,
) -> Result<T> {
    let (g, th) = (params.gamma_s, params.theta);
    let inner = match mode {
        EffMode::Exact => expectation(law, |z| (-th * (g * z).ln_1p()).exp(), default_tol())?,
        EffMode::HighSnrApprox => {
            let mut pts = window(law)?;
            let floor = pts[4] * T::c(1e-9);
            for x in pts.iter_mut() {
                *x = x.max(floor);
            }
            let tail = T::c(1e-9).max(T::epsilon() * T::c(64.0));
            pts[0] = pts[0].max(law.quantile(tail)?);
            expectation_on(law, |z| (-th * (g * z).ln()).exp(), &pts, default_tol())?
        }
    };
    if !(inner > T::zero() && inner.is_finite()) {
        return Err(Error::Quadrature(format!("effective-throughput mean {inner} is not positive")));
    }
    Ok(-inner.log2() / th)
}

/// C·E[e^{−ρ γ_s Z}] in closed form through the limit-law MGF:
/// C·e^{−b s}·p^{−a s}·Γ(k + a s)/Γ(k) with s = ρ γ_s.
pub fn avg_bep<T: Real>(consts: &NormConstants<T>, k: OrderSelector, params: &MetricParams<T>) -> BepReport<T> {
    let c = params.bep_c;
    let s = params.bep_rho * params.gamma_s;
    if s == T::zero() {
        return BepReport {
            value: c,
            model_out_of_range: false,
        };
    }
    let kf = T::from_usize_lossy(k.get());
    let a_s = consts.a_m() * s;
    let ln_v = c.ln() - consts.b_m() * s - a_s * consts.p().ln() + log_gamma(kf + a_s).expect("positive")
        - log_gamma(kf).expect("k >= 1");
    let v = ln_v.exp();
    if v > c {
        BepReport {
            value: c,
            model_out_of_range: true,
        }
    } else {
        BepReport {
            value: v,
            model_out_of_range: false,
        }
    }
}

/// C·E[e^{−ρ γ_s Z}] by quadrature against any law.
pub fn avg_bep_quadrature<T: Real, L: KthMaxLaw<T> + ?Sized>(law: &L, params: &MetricParams<T>) -> Result<T> {
    let s = params.bep_rho * params.gamma_s;
    if s == T::zero() {
        return Ok(params.bep_c);
    }
    Ok(params.bep_c * expectation(law, |z| (-s * z).exp(), default_tol())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evt::{norm_constants, normalized_mgf, FiniteMLaw, LinkEnsemble, LinkGroup};

    fn k(n: usize) -> OrderSelector {
        OrderSelector::new(n).unwrap()
    }

    fn params(gamma_s: f64) -> MetricParams<f64> {
        MetricParams::new(gamma_s, 1.0, 1.0, 0.25, 0.25).unwrap()
    }

    fn fig4(m: usize) -> LinkEnsemble<f64> {
        let t = m / 3;
        LinkEnsemble::new(
            vec![LinkGroup::new(2.0, t), LinkGroup::new(1.0, t), LinkGroup::new(0.5, t)],
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(MetricParams::new(0.0, 1.0, 1.0, 0.5, 1.0).is_err());
        assert!(MetricParams::new(1.0, 1.0, 1.0, 1.5, 1.0).is_err());
        assert!(MetricParams::new(1.0, 1.0, 1.0, 0.5, -1.0).is_err());
        assert!(MetricParams::new(1.0, 1.0, 1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn outage_is_cdf_at_scaled_threshold() {
        let c = norm_constants(&fig4(21)).unwrap();
        let mut p = params(2.0);
        p.z_th = 30.0;
        assert_eq!(
            outage_probability(&c, k(2), &p),
            unnormalized_kth_max_cdf_asym(&c, k(2), 15.0)
        );
        p.z_th = 1e9;
        assert_eq!(outage_probability(&c, k(2), &p), 1.0);
    }

    #[test]
    fn series_matches_quadrature_on_small_location() {
        let c = NormConstants::from_parts(2.0, 1.0, 1.0).unwrap();
        let p = params(1.0);
        let s = avg_throughput_series(&c, k(1), &p, 500);
        assert!(s.converged, "{s:?}");
        let q = avg_throughput_quadrature(&AsymptoticLaw::new(c, k(1)), &p).unwrap();
        assert!(((s.value - q) / q).abs() < 1e-6, "series {} quad {q}", s.value);
        assert!(s.terms_used >= 1 && s.max_term_magnitude > 0.0);
    }

    #[test]
    fn series_agrees_where_converged() {
        for (a, b, pp) in [(2.0, 3.0, 1.4), (8.0, 10.0, 1.0), (1.0, 2.0, 0.7)] {
            let c = NormConstants::from_parts(a, b, pp).unwrap();
            for kk in 1..=4 {
                for g in [0.5, 1.0, 4.0] {
                    let p = params(g);
                    let s = avg_throughput_series(&c, k(kk), &p, 2000);
                    if s.converged {
                        let q = avg_throughput_quadrature(&AsymptoticLaw::new(c, k(kk)), &p).unwrap();
                        assert!(((s.value - q) / q).abs() < 1e-6, "a={a} b={b} k={kk} g={g}");
                    }
                }
            }
        }
    }

    #[test]
    fn series_vanishes_with_snr() {
        let c = NormConstants::from_parts(2.0, 1.0, 1.0).unwrap();
        let p = params(1e-4);
        let s = avg_throughput_series(&c, k(1), &p, 500);
        let q = avg_throughput_quadrature(&AsymptoticLaw::new(c, k(1)), &p).unwrap();
        assert!(q < 1e-3);
        assert!((s.value - q).abs() < 1e-6);
    }

    #[test]
    fn large_location_reports_non_convergence_and_falls_back() {
        let c = norm_constants(&fig4(21)).unwrap();
        let p = params(1.0);
        let s = avg_throughput_series(&c, k(1), &p, 10_000);
        assert!(!s.converged, "{s:?}");
        let r = avg_throughput(&c, k(1), &p, 10_000).unwrap();
        assert_eq!(r.method, Method::Quadrature);
        assert!(r.value.is_finite() && r.value > 0.0);
    }

    #[test]
    fn narrow_law_collapses_to_point_mass() {
        let c = NormConstants::from_parts(1e-6, 20.0, 1.0).unwrap();
        let p = params(1.5);
        let r = avg_throughput_quadrature(&AsymptoticLaw::new(c, k(1)), &p).unwrap();
        assert!((r - (1.0 + 1.5 * 20.0f64).log2()).abs() < 1e-5);
    }

    #[test]
    fn rate_decreases_with_rank() {
        let e = fig4(21);
        let c = norm_constants(&e).unwrap();
        let p = params(1.0);
        let mut prev = f64::INFINITY;
        for kk in 1..=5 {
            let asym = avg_throughput_quadrature(&AsymptoticLaw::new(c, k(kk)), &p).unwrap();
            let fin = avg_throughput_quadrature(&FiniteMLaw::new(e.clone(), k(kk)).unwrap(), &p).unwrap();
            assert!(asym < prev);
            prev = asym;
            assert!(fin.is_finite() && fin > 0.0);
        }
    }

    #[test]
    fn effective_throughput_limits() {
        let e = fig4(21);
        let law = FiniteMLaw::new(e, k(2)).unwrap();
        let mut p = params(1.0);
        p.theta = 1e-4;
        let eff = effective_throughput(&law, &p, EffMode::Exact).unwrap();
        let rate = avg_throughput_quadrature(&law, &p).unwrap();
        assert!((eff - rate).abs() < 1e-3, "eff {eff} rate {rate}");
        for g in [0.5, 1.0, 10.0] {
            let p = params(g);
            let ex = effective_throughput(&law, &p, EffMode::Exact).unwrap();
            let ap = effective_throughput(&law, &p, EffMode::HighSnrApprox).unwrap();
            assert!(ap <= ex, "g={g} approx {ap} exact {ex}");
        }
    }

    #[test]
    fn bep_closed_form_and_mgf_identity() {
        let c = norm_constants(&fig4(42)).unwrap();
        for kk in 1..=5 {
            for g in [0.01, 0.1, 1.0] {
                let p = params(g);
                let s = p.bep_rho * g;
                let r = avg_bep(&c, k(kk), &p);
                let via_mgf = p.bep_c
                    * (-c.b_m() * s).exp()
                    * c.p().powf(-c.a_m() * s)
                    * normalized_mgf(k(kk), -c.a_m() * s).unwrap();
                if !r.model_out_of_range {
                    assert!(((r.value - via_mgf) / via_mgf).abs() < 1e-12);
                }
            }
        }
        let mut p = params(1.0);
        p.bep_rho = 0.0;
        assert_eq!(avg_bep(&c, k(3), &p).value, 0.25);
    }

    #[test]
    fn bep_clips_when_model_exceeds_ceiling() {
        // b < 0 pushes C·e^{−bs}Γ(k+as)/Γ(k) above C
        let c = NormConstants::from_parts(2.0, -5.0, 1.0).unwrap();
        let r = avg_bep(&c, k(1), &params(1.0));
        assert!(r.model_out_of_range);
        assert_eq!(r.value, 0.25);
    }

    #[test]
    fn bep_quadrature_matches_closed_form_when_no_mass_below_zero() {
        // the closed form integrates over the whole real line; pick constants
        // whose limit law has negligible mass at z < 0
        let c = NormConstants::from_parts(2.0, 40.0, 1.3).unwrap();
        let mut p = params(1.0);
        p.bep_rho = 0.05;
        for kk in [1, 3, 5] {
            let cf = avg_bep(&c, k(kk), &p).value;
            let q = avg_bep_quadrature(&AsymptoticLaw::new(c, k(kk)), &p).unwrap();
            assert!(((cf - q) / cf).abs() < 1e-6, "k={kk} cf={cf} q={q}");
        }
    }
}

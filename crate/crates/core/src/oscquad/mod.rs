//! Adaptive quadrature for oscillatory integrands on bounded intervals, and
//! the classical size estimates for `∫ sin(rψ)`.
//!
//! The integrator seeds panels from the expected oscillation rate, grades
//! them geometrically toward both endpoints, then bisects the worst panels
//! (by the G7/K15 difference) until the summed error estimate meets the
//! tolerance. The panel budget is a hard limit: running out is an error
//! carrying the partial result.

mod fresnel;
pub mod rules;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use rules::gk15;

pub use fresnel::{fresnel_sin, fresnel_symmetric, FRESNEL_SERIES_LIMIT};

/// A real phase function with its first two derivatives.
pub trait Phase<T: Real>: Sync {
    fn eval(&self, x: T) -> T;
    fn d1(&self, x: T) -> T;
    fn d2(&self, x: T) -> T;
    fn label(&self) -> &str {
        "phase"
    }
}

/// A phase assembled from closures.
pub struct FnPhase<F, D1, D2> {
    pub label: String,
    pub eval: F,
    pub d1: D1,
    pub d2: D2,
}

impl<T, F, D1, D2> Phase<T> for FnPhase<F, D1, D2>
where
    T: Real,
    F: Fn(T) -> T + Sync,
    D1: Fn(T) -> T + Sync,
    D2: Fn(T) -> T + Sync,
{
    fn eval(&self, x: T) -> T {
        (self.eval)(x)
    }
    fn d1(&self, x: T) -> T {
        (self.d1)(x)
    }
    fn d2(&self, x: T) -> T {
        (self.d2)(x)
    }
    fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
    /// Endpoint grading stops once the outermost panel is narrower than
    /// `endpoint_inset·(b − a)`.
    pub endpoint_inset: f64,
    pub panels_per_wavelength: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_panels: 1 << 20,
            endpoint_inset: 1e-4,
            panels_per_wavelength: 8,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_owned()));
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_panels < 2 {
            return bad("max_panels must be at least 2");
        }
        if !(self.endpoint_inset > 0.0 && self.endpoint_inset <= 1e-3) {
            return bad("endpoint_inset must lie in (0, 1e-3]");
        }
        if self.panels_per_wavelength < 4 {
            return bad("panels_per_wavelength must be at least 4");
        }
        Ok(())
    }

    /// Allowed error for a given integral value.
    pub fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub err_estimate: T,
    pub panels_used: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    err: T,
}

struct Keyed(f64, usize);

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Keyed {
    // ties broken by index so the refinement order is reproducible
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

/// Uniform breakpoints on `[a, b]` sized for the oscillation rate, graded toward both ends.
pub fn seed_mesh<T: Real>(a: T, b: T, frequency_hint: f64, cfg: &QuadConfig) -> Result<Vec<T>> {
    let span = (b - a).to_f64_lossy();
    let n = (frequency_hint * span * cfg.panels_per_wavelength as f64 / (2.0 * PI))
        .ceil()
        .max(1.0);
    if n > cfg.max_panels as f64 {
        return Err(Error::BudgetExceeded {
            partial: f64::NAN,
            err_estimate: f64::INFINITY,
            max_panels: cfg.max_panels,
        });
    }
    let n = n as usize;
    let step = (b - a) / T::lit(n as f64);
    let mut pts: Vec<T> = (0..n).map(|i| a + step * T::lit(i as f64)).collect();
    pts.push(b);
    Ok(grade_ends(pts, cfg.endpoint_inset))
}

/// Inserts geometrically shrinking breakpoints inside the first and last panels.
pub fn grade_ends<T: Real>(mut pts: Vec<T>, inset: f64) -> Vec<T> {
    if pts.len() < 2 {
        return pts;
    }
    let a = pts[0];
    let b = pts[pts.len() - 1];
    let min_w = (b - a) * T::lit(inset);

    let mut head = Vec::new();
    let mut w = pts[1] - a;
    while w > min_w {
        w = w * T::lit(0.5);
        head.push(a + w);
    }
    let mut tail = Vec::new();
    let n = pts.len();
    let mut w = b - pts[n - 2];
    while w > min_w {
        w = w * T::lit(0.5);
        tail.push(b - w);
    }

    let last = pts.pop().unwrap();
    let mut out = Vec::with_capacity(pts.len() + head.len() + tail.len() + 1);
    out.push(pts[0]);
    out.extend(head.into_iter().rev());
    out.extend(pts.into_iter().skip(1));
    out.extend(tail);
    out.push(last);
    out
}

/// Integrates `f` over `[a, b]`; `frequency_hint` is the largest expected
/// phase rate (radians per unit length) and seeds the panel density.
pub fn integrate_oscillatory<T, F>(
    f: F,
    a: T,
    b: T,
    frequency_hint: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(format!(
            "integration interval [{}, {}] is empty or non-finite",
            a.to_f64_lossy(),
            b.to_f64_lossy()
        )));
    }
    if !(frequency_hint >= 0.0) || !frequency_hint.is_finite() {
        return Err(Error::Config("frequency_hint must be finite and >= 0".into()));
    }
    let mesh = seed_mesh(a, b, frequency_hint, cfg)?;
    integrate_on_mesh(f, &mesh, cfg)
}

/// Adaptive integration starting from caller-supplied breakpoints (sorted, at least two).
pub fn integrate_on_mesh<T, F>(f: F, mesh: &[T], cfg: &QuadConfig) -> Result<QuadResult<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if mesh.len() < 2 {
        return Err(Error::Config("mesh needs at least two breakpoints".into()));
    }
    if mesh.len() - 1 > cfg.max_panels {
        return Err(Error::BudgetExceeded {
            partial: f64::NAN,
            err_estimate: f64::INFINITY,
            max_panels: cfg.max_panels,
        });
    }

    let run = |a: T, b: T| -> Result<Panel<T>> {
        let est = gk15(&f, a, b).map_err(|at| Error::NonFiniteIntegrand {
            at: at.to_f64_lossy(),
        })?;
        Ok(Panel {
            a,
            b,
            value: est.kronrod,
            err: (est.kronrod - est.gauss).abs(),
        })
    };

    let mut panels: Vec<Panel<T>> = Vec::with_capacity(mesh.len() * 2);
    for w in mesh.windows(2) {
        if w[1] > w[0] {
            panels.push(run(w[0], w[1])?);
        }
    }
    if panels.is_empty() {
        return Err(Error::Config("mesh has zero length".into()));
    }

    let total = |ps: &[Panel<T>]| -> (f64, f64) {
        let mut v = 0.0;
        let mut e = 0.0;
        for p in ps {
            v += p.value.to_f64_lossy();
            e += p.err.to_f64_lossy();
        }
        (v, e)
    };

    let (mut value, mut err) = total(&panels);
    if err <= cfg.tolerance(value) {
        return Ok(finish(value, err, panels.len()));
    }

    let mut heap: BinaryHeap<Keyed> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| Keyed(p.err.to_f64_lossy(), i))
        .collect();
    // panels too narrow to split further; their error stays in the total
    let mut frozen = 0.0;
    let mut steps = 0usize;

    while err > cfg.tolerance(value) {
        let Some(Keyed(_, idx)) = heap.pop() else {
            break;
        };
        if panels.len() >= cfg.max_panels {
            return Err(Error::BudgetExceeded {
                partial: value,
                err_estimate: err,
                max_panels: cfg.max_panels,
            });
        }
        let old = panels[idx];
        let mid = old.a + (old.b - old.a) * T::lit(0.5);
        if !(mid > old.a && mid < old.b) {
            frozen += old.err.to_f64_lossy();
            continue;
        }
        let left = run(old.a, mid)?;
        let right = run(mid, old.b)?;
        panels[idx] = left;
        panels.push(right);
        heap.push(Keyed(left.err.to_f64_lossy(), idx));
        heap.push(Keyed(right.err.to_f64_lossy(), panels.len() - 1));

        value += (left.value + right.value - old.value).to_f64_lossy();
        err += (left.err + right.err - old.err).to_f64_lossy();
        steps += 1;
        if steps % 64 == 0 {
            // resum to keep the running totals free of drift
            (value, err) = total(&panels);
        }
        if heap.is_empty() && err > cfg.tolerance(value) {
            break;
        }
    }

    (value, err) = total(&panels);
    if err > cfg.tolerance(value) {
        return Err(Error::BudgetExceeded {
            partial: value,
            err_estimate: err.max(frozen),
            max_panels: cfg.max_panels,
        });
    }
    Ok(finish(value, err, panels.len()))
}

fn finish<T: Real>(value: f64, err: f64, panels_used: usize) -> QuadResult<T> {
    QuadResult {
        value: T::lit(value),
        err_estimate: T::lit(err),
        panels_used,
    }
}

/// `∫_a^b sin(r·ψ(x)) dx`, seeding panels from `r·max|ψ'|` sampled on the interval.
pub fn integrate_sin_phase<T: Real, P: Phase<T> + ?Sized>(
    phase: &P,
    r: T,
    a: T,
    b: T,
    cfg: &QuadConfig,
) -> Result<QuadResult<T>> {
    let samples = 256;
    let step = (b - a) / T::lit(samples as f64);
    let mut rate = 0.0f64;
    for i in 0..=samples {
        let x = a + step * T::lit(i as f64);
        let d = phase.d1(x).abs().to_f64_lossy();
        if d.is_finite() {
            rate = rate.max(d);
        }
    }
    let hint = r.to_f64_lossy().abs() * rate;
    integrate_oscillatory(|x| (r * phase.eval(x)).sin(), a, b, hint, cfg)
}

fn positive_pair<T: Real>(what: &'static str, r: T, lambda: T) -> Result<()> {
    for v in [r, lambda] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Domain {
                what,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// First-derivative van der Corput bound `2/(rλ)`, valid when `ψ` is monotone with `|ψ'| ≥ λ`.
pub fn vdc_bound_first<T: Real>(r: T, lambda: T) -> Result<T> {
    positive_pair("vdc_bound_first", r, lambda)?;
    Ok(T::lit(2.0) / (r * lambda))
}

/// Second-derivative van der Corput bound `6/√(rλ)`, valid when `|ψ''| ≥ λ`.
pub fn vdc_bound_second<T: Real>(r: T, lambda: T) -> Result<T> {
    positive_pair("vdc_bound_second", r, lambda)?;
    Ok(T::lit(6.0) / (r * lambda).sqrt())
}

/// Leading-order size `√π/√(rλ)` of `|∫ sin(rψ)|` when `ψ` has a nondegenerate
/// stationary point at which it vanishes and `λ = |ψ''|` there.
pub fn stationary_phase_magnitude<T: Real>(r: T, lambda: T) -> Result<T> {
    positive_pair("stationary_phase_magnitude", r, lambda)?;
    Ok((T::PI() / (r * lambda)).sqrt())
}

/// Outcome of checking one oscillatory integral against a van der Corput bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck<T> {
    pub integral: T,
    pub err_estimate: T,
    pub bound: T,
    pub holds: bool,
}

/// Which van der Corput estimate to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VdcOrder {
    First,
    Second,
}

/// Evaluates `|∫_a^b sin(rψ)|` and compares it with the requested bound for the given `λ`.
///
/// The hypotheses (`ψ` monotone with `|ψ'| ≥ λ`, or `|ψ''| ≥ λ`) are the caller's to ensure.
pub fn certify_vdc<T: Real, P: Phase<T> + ?Sized>(
    order: VdcOrder,
    phase: &P,
    r: T,
    lambda: T,
    a: T,
    b: T,
    cfg: &QuadConfig,
) -> Result<BoundCheck<T>> {
    let bound = match order {
        VdcOrder::First => vdc_bound_first(r, lambda)?,
        VdcOrder::Second => vdc_bound_second(r, lambda)?,
    };
    let q = integrate_sin_phase(phase, r, a, b, cfg)?;
    Ok(BoundCheck {
        integral: q.value,
        err_estimate: q.err_estimate,
        bound,
        holds: q.value.abs() <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_sine() {
        let cfg = QuadConfig::default();
        let q = integrate_oscillatory(|x: f64| (10.0 * x).sin(), 0.0, 1.0, 10.0, &cfg).unwrap();
        let exact = (1.0 - 10f64.cos()) / 10.0;
        assert!((q.value - 0.183907152907645245).abs() < 1e-12);
        assert!((q.value - exact).abs() <= cfg.tolerance(exact));
        assert!(q.err_estimate <= cfg.tolerance(q.value));
    }

    #[test]
    fn zero_integrand() {
        let q = integrate_oscillatory(|_x: f64| 0.0, 0.0, 1.0, 0.0, &QuadConfig::default()).unwrap();
        assert_eq!(q.value, 0.0);
        assert_eq!(q.err_estimate, 0.0);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let cfg = QuadConfig {
            max_panels: 40,
            ..QuadConfig::default()
        };
        let err = integrate_oscillatory(|x: f64| (x * 1e4).sin() / x.sqrt(), 0.0, 1.0, 1.0, &cfg);
        match err {
            Err(Error::BudgetExceeded { partial, .. }) => assert!(partial.is_finite()),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_reports_abscissa() {
        let r = integrate_oscillatory(
            |x: f64| if x > 0.75 { f64::INFINITY } else { x },
            0.0,
            1.0,
            0.0,
            &QuadConfig::default(),
        );
        match r {
            Err(Error::NonFiniteIntegrand { at }) => assert!(at > 0.75),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_inputs() {
        let cfg = QuadConfig::default();
        assert!(integrate_oscillatory(|x: f64| x, 1.0, 0.0, 0.0, &cfg).is_err());
        let bad = QuadConfig {
            panels_per_wavelength: 3,
            ..cfg
        };
        assert!(integrate_oscillatory(|x: f64| x, 0.0, 1.0, 0.0, &bad).is_err());
        let bad = QuadConfig {
            endpoint_inset: 0.01,
            ..cfg
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn grading_adds_breakpoints_at_both_ends() {
        let mesh = grade_ends(vec![0.0, 0.5, 1.0], 1e-3);
        assert!(mesh.windows(2).all(|w| w[0] < w[1]));
        assert!(mesh[1] < 1e-3 * 2.0);
        assert!(1.0 - mesh[mesh.len() - 2] < 2e-3);
    }

    #[test]
    fn bound_formulas() {
        assert!((vdc_bound_first(10.0_f64, 1.0).unwrap() - 0.2).abs() < 1e-16);
        assert_eq!(vdc_bound_first(1.0, 2.0).unwrap(), 1.0);
        assert_eq!(vdc_bound_second(36.0, 1.0).unwrap(), 1.0);
        assert!((vdc_bound_second(100.0_f64, 4.0).unwrap() - 0.3).abs() < 1e-16);
        assert!((stationary_phase_magnitude(std::f64::consts::PI, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((stationary_phase_magnitude(100.0_f64, 0.25).unwrap() - 0.354490770181103205).abs() < 1e-15);
        for (r, l) in [(0.0, 1.0), (1.0, -1.0), (f64::NAN, 1.0)] {
            assert!(vdc_bound_first(r, l).is_err());
            assert!(vdc_bound_second(r, l).is_err());
            assert!(stationary_phase_magnitude(r, l).is_err());
        }
    }

    #[test]
    fn linear_phase_respects_first_bound() {
        let phase = FnPhase {
            label: "x".into(),
            eval: |x: f64| x,
            d1: |_| 1.0,
            d2: |_| 0.0,
        };
        let c = certify_vdc(VdcOrder::First, &phase, 10.0, 1.0, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!(c.holds);
        assert!((c.integral - 0.18390715290764524).abs() < 1e-12);
        assert!((c.bound - 0.2).abs() < 1e-16);
    }

    #[test]
    fn deterministic_results() {
        let cfg = QuadConfig::default();
        let f = |x: f64| (300.0 * x * x).cos() * (1.0 - x).sqrt();
        let a = integrate_oscillatory(f, 0.0, 1.0, 600.0, &cfg).unwrap();
        let b = integrate_oscillatory(f, 0.0, 1.0, 600.0, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.panels_used, b.panels_used);
    }
}

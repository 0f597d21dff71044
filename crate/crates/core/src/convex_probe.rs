//! Decay envelopes of general convex bodies described by two graphs.
//!
//! A body is the region between a concave upper graph and a convex lower
//! graph over `[x₀, x₁]`. Its transform is sliced vertically, exactly as for
//! the `l^p` balls, and the measured envelope is compared with `C₁/√ν` where
//! `ν` is the minimum boundary curvature.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decay::{published_lower_constant, upper_constant, MAX_FAILED_FRACTION};
use crate::error::{Error, Result};
use crate::fourier::Method;
use crate::lpgeom::graph_curvature;
use crate::oscquad::{grade_ends, integrate_on_mesh, seed_mesh, QuadConfig};
use crate::scalar::sin_over;
use crate::{Frequency, PExponent};

/// Grid size used by [`conjecture_scan`] to locate the flattest point.
pub const CURVATURE_GRID: usize = 4096;

/// One boundary arc `y = g(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Graph {
    /// `y = sign·b·(1 − |x/a|^q)^{1/q}`.
    Superellipse { a: f64, b: f64, q: f64, sign: f64 },
    /// `y = Σ c_k x^k`.
    Poly(Vec<f64>),
}

impl Graph {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Graph::Superellipse { a, b, q, sign } => {
                let u = (x / a).abs().min(1.0);
                sign * b * (-(q * u.ln()).exp_m1()).powf(1.0 / q)
            }
            Graph::Poly(c) => c.iter().rev().fold(0.0, |acc, &k| acc * x + k),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match self {
            Graph::Superellipse { a, b, q, sign } => {
                let u = (x / a).abs();
                let rest = -(q * u.ln()).exp_m1();
                let g1 = -u.powf(q - 1.0) * rest.powf(1.0 / q - 1.0);
                sign * b / a * g1 * x.signum()
            }
            Graph::Poly(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &v)| acc * x + k as f64 * v),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match self {
            Graph::Superellipse { a, b, q, sign } => {
                let u = (x / a).abs();
                let rest = -(q * u.ln()).exp_m1();
                let g2 = -(q - 1.0) * u.powf(q - 2.0) * rest.powf(1.0 / q - 2.0);
                sign * b / (a * a) * g2
            }
            Graph::Poly(c) => c
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, &v)| acc * x + (k * (k - 1)) as f64 * v),
        }
    }
}

/// Shape parameters as they appear in body-definition files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum BodyKind {
    Lp { p: f64 },
    Ellipse { a: f64, b: f64 },
    Superellipse { a: f64, b: f64, q: f64 },
    CustomPolyCoeffs {
        upper: Vec<f64>,
        lower: Vec<f64>,
        x_range: [f64; 2],
    },
}

/// `{ "label": .., "kind": .., "params": {..} }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub label: String,
    #[serde(flatten)]
    pub kind: BodyKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    pub label: String,
    pub x_range: (f64, f64),
    pub upper: Graph,
    pub lower: Graph,
    /// Invariant under `(x, y) → (−x, −y)`; the transform is then real.
    pub centrally_symmetric: bool,
    /// Invariant under at least one coordinate reflection.
    pub reflection_symmetric: bool,
}

impl ConvexBody {
    pub fn superellipse(a: f64, b: f64, q: f64) -> Result<Self> {
        for (what, v) in [("semi-axis a", a), ("semi-axis b", b)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain { what, value: v });
            }
        }
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::Domain {
                what: "superellipse exponent",
                value: q,
            });
        }
        Ok(Self {
            label: format!("superellipse(a={a}, b={b}, q={q})"),
            x_range: (-a, a),
            upper: Graph::Superellipse { a, b, q, sign: 1.0 },
            lower: Graph::Superellipse { a, b, q, sign: -1.0 },
            centrally_symmetric: true,
            reflection_symmetric: true,
        })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        let mut body = Self::superellipse(a, b, 2.0)?;
        body.label = format!("ellipse(a={a}, b={b})");
        Ok(body)
    }

    pub fn disk() -> Self {
        let mut body = Self::ellipse(1.0, 1.0).expect("unit disk");
        body.label = "disk".into();
        body
    }

    pub fn lp(p: PExponent) -> Self {
        let mut body = Self::superellipse(1.0, 1.0, p.get()).expect("valid exponent");
        body.label = format!("lp(p={})", p.get());
        body
    }

    /// Body between two polynomial graphs; rejected unless it is closed and convex.
    pub fn poly(upper: Vec<f64>, lower: Vec<f64>, x_range: (f64, f64)) -> Result<Self> {
        let (x0, x1) = x_range;
        if !(x1 > x0) || !x0.is_finite() || !x1.is_finite() {
            return Err(Error::Config(format!("invalid x range [{x0}, {x1}]")));
        }
        if upper.is_empty() || lower.is_empty() || upper.iter().chain(&lower).any(|c| !c.is_finite()) {
            return Err(Error::Config("polynomial coefficients must be finite and non-empty".into()));
        }
        let symmetric_range = (x0 + x1).abs() <= 1e-12 * (x1 - x0);
        let len = upper.len().max(lower.len());
        let coef = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let mirrored = (0..len).all(|k| coef(&lower, k) == -coef(&upper, k));
        let even = (0..len).all(|k| k % 2 == 0 || (coef(&upper, k) == 0.0 && coef(&lower, k) == 0.0));
        // lower(x) = −upper(−x)
        let central = (0..len).all(|k| {
            let s = if k % 2 == 0 { -1.0 } else { 1.0 };
            coef(&lower, k) == s * coef(&upper, k)
        });
        let body = Self {
            label: "custom-poly".into(),
            x_range,
            upper: Graph::Poly(upper),
            lower: Graph::Poly(lower),
            centrally_symmetric: central && symmetric_range,
            reflection_symmetric: mirrored || (even && symmetric_range),
        };
        body.validate()?;
        Ok(body)
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        let mut body = match &spec.kind {
            BodyKind::Lp { p } => Self::lp(PExponent::new(*p)?),
            BodyKind::Ellipse { a, b } => Self::ellipse(*a, *b)?,
            BodyKind::Superellipse { a, b, q } => Self::superellipse(*a, *b, *q)?,
            BodyKind::CustomPolyCoeffs { upper, lower, x_range } => {
                Self::poly(upper.clone(), lower.clone(), (x_range[0], x_range[1]))?
            }
        };
        if !spec.label.is_empty() {
            body.label = spec.label.clone();
        }
        Ok(body)
    }

    /// Checks closure at the endpoints, ordering of the arcs and convexity on a sample grid.
    pub fn validate(&self) -> Result<()> {
        let (x0, x1) = self.x_range;
        let scale = 1.0 + self.upper.eval(0.5 * (x0 + x1)).abs();
        for x in [x0, x1] {
            let gap = self.upper.eval(x) - self.lower.eval(x);
            if gap.abs() > 1e-9 * scale {
                return Err(Error::Config(format!("arcs do not meet at x = {x} (gap {gap})")));
            }
        }
        let n = 256;
        for i in 0..n {
            let x = x0 + (x1 - x0) * (i as f64 + 0.5) / n as f64;
            if self.upper.eval(x) <= self.lower.eval(x) {
                return Err(Error::Config(format!("upper arc not above lower arc at x = {x}")));
            }
            if self.upper.d2(x) > 0.0 || self.lower.d2(x) < 0.0 {
                return Err(Error::Config(format!("body is not convex at x = {x}")));
            }
        }
        Ok(())
    }

    /// Angular range that covers every `|χ̂|` value up to symmetry.
    pub fn theta_range(&self) -> (f64, f64) {
        if self.reflection_symmetric {
            (0.0, FRAC_PI_2)
        } else {
            (0.0, PI)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcSide {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureMin {
    pub nu: f64,
    pub x: f64,
    pub y: f64,
    pub arc: ArcSide,
    /// Direction of the outward normal at the minimiser.
    pub normal_angle: f64,
}

fn curvature_at(g: &Graph, x: f64) -> Result<f64> {
    let k = graph_curvature(g.d1(x), g.d2(x));
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::NonFinite { what: "curvature", at: x })
    }
}

/// Minimum boundary curvature over both arcs: midpoint grid of `grid_n`
/// abscissae, then a golden-section pass around the best cell.
pub fn body_curvature_min(body: &ConvexBody, grid_n: usize) -> Result<CurvatureMin> {
    if grid_n < 1000 {
        return Err(Error::Config(format!("curvature grid {grid_n} < 1000")));
    }
    let (x0, x1) = body.x_range;
    let h = (x1 - x0) / grid_n as f64;
    let mut best = (f64::INFINITY, 0usize, ArcSide::Upper);
    for (side, g) in [(ArcSide::Upper, &body.upper), (ArcSide::Lower, &body.lower)] {
        for i in 0..grid_n {
            let k = curvature_at(g, x0 + (i as f64 + 0.5) * h)?;
            if k < best.0 {
                best = (k, i, side);
            }
        }
    }
    let (_, i, side) = best;
    let g = match side {
        ArcSide::Upper => &body.upper,
        ArcSide::Lower => &body.lower,
    };
    let mid = x0 + (i as f64 + 0.5) * h;
    let mut lo = (mid - h).max(x0 + 0.25 * h);
    let mut hi = (mid + h).min(x1 - 0.25 * h);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (curvature_at(g, c)?, curvature_at(g, d)?);
    for _ in 0..80 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = curvature_at(g, c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = curvature_at(g, d)?;
        }
    }
    let (mut x, mut nu) = if fc <= fd { (c, fc) } else { (d, fd) };
    if best.0 < nu {
        x = mid;
        nu = best.0;
    }
    let slope = g.d1(x);
    let normal_angle = match side {
        ArcSide::Upper => (1.0f64).atan2(-slope),
        ArcSide::Lower => (-1.0f64).atan2(slope),
    };
    Ok(CurvatureMin {
        nu,
        x,
        y: g.eval(x),
        arc: side,
        normal_angle,
    })
}

/// Transform of a body indicator: real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BodyTransform {
    pub value: f64,
    pub imag: f64,
    pub err_estimate: f64,
    pub method: Method,
    pub panels_used: usize,
}

impl BodyTransform {
    pub fn magnitude(&self) -> f64 {
        self.value.hypot(self.imag)
    }
}

/// `χ̂_K(ω)` by vertical slicing in the variable `x = mid − half·cos t`,
/// which keeps slices near vertical tangents smooth.
pub fn chi_hat_body(body: &ConvexBody, omega: Frequency, cfg: &QuadConfig) -> Result<BodyTransform> {
    cfg.validate()?;
    if !omega.is_finite() {
        return Err(Error::Domain {
            what: "frequency",
            value: omega.r,
        });
    }
    let (alpha, beta) = (omega.alpha, omega.beta);
    let (x0, x1) = body.x_range;
    let mid = 0.5 * (x0 + x1);
    let half = 0.5 * (x1 - x0);

    // Oscillation rate in t, sampled.
    let samples = 512;
    let mut rate: f64 = 0.0;
    for i in 0..=samples {
        let t = PI * i as f64 / samples as f64;
        let s = t.sin();
        if s == 0.0 {
            continue;
        }
        let x = mid - half * t.cos();
        let slopes = body.upper.d1(x).abs() + body.lower.d1(x).abs();
        let v = half * s * (alpha.abs() + beta.abs() * slopes);
        if v.is_finite() {
            rate = rate.max(v);
        }
    }
    let mut mesh = seed_mesh(0.0, PI, rate, cfg)?;
    if x0 < 0.0 && x1 > 0.0 {
        // Arcs may lose smoothness on the vertical axis.
        let t0 = (mid / half).clamp(-1.0, 1.0).acos();
        mesh.push(t0);
        mesh.sort_by(f64::total_cmp);
        mesh.dedup();
    }
    let mesh = grade_ends(mesh, cfg.endpoint_inset);

    let slice = |t: f64| {
        let x = mid - half * t.cos();
        let (u, l) = (body.upper.eval(x), body.lower.eval(x));
        let w = (u - l).max(0.0);
        let c = 0.5 * (u + l);
        let amp = sin_over(beta, 0.5 * w) * half * t.sin() / PI;
        (amp, alpha * x + beta * c)
    };
    let re = integrate_on_mesh(
        |t: f64| {
            let (amp, ph) = slice(t);
            amp * ph.cos()
        },
        &mesh,
        cfg,
    )?;
    let (imag, im_err, im_panels) = if body.centrally_symmetric {
        (0.0, 0.0, 0)
    } else {
        let im = integrate_on_mesh(
            |t: f64| {
                let (amp, ph) = slice(t);
                -amp * ph.sin()
            },
            &mesh,
            cfg,
        )?;
        (im.value, im.err_estimate, im.panels_used)
    };
    Ok(BodyTransform {
        value: re.value,
        imag,
        err_estimate: re.err_estimate + im_err,
        method: if omega.r == 0.0 {
            Method::ZeroFrequency
        } else {
            Method::ReductionX
        },
        panels_used: re.panels_used + im_panels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BodySample {
    pub r: f64,
    pub theta: f64,
    pub scaled_value: f64,
    pub err_estimate: f64,
    pub witness: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub label: String,
    pub nu: f64,
    pub nu_x: f64,
    pub nu_y: f64,
    pub c_est: f64,
    pub argmax_r: f64,
    pub argmax_theta: f64,
    /// `C₁/√ν`.
    pub bound: f64,
    /// `C₂/√ν` with the published constant; informational.
    pub lower_reference: f64,
    pub upper_ok: bool,
    pub witness_theta: f64,
    pub witness_max: f64,
    pub samples: usize,
    pub failed: usize,
    /// Samples above the bound.
    pub violations: usize,
    pub notes: String,
}

/// `count` uniform angles over the body's angular range.
pub fn body_theta_grid(body: &ConvexBody, count: usize) -> Vec<f64> {
    let (lo, hi) = body.theta_range();
    let n = count.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn fold_angle(theta: f64, range: (f64, f64)) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= PI;
    }
    if range.1 <= FRAC_PI_2 + 1e-15 && t > FRAC_PI_2 {
        t = PI - t;
    }
    t
}

/// Scans `r^{3/2}|χ̂_K|` over `r_grid × theta_grid` plus the normal direction
/// at the flattest boundary point, and compares the maximum with `C₁/√ν`.
pub fn conjecture_scan(
    body: &ConvexBody,
    r_grid: &[f64],
    theta_grid: &[f64],
    cfg: &QuadConfig,
) -> Result<ConjectureReport> {
    cfg.validate()?;
    let flat = body_curvature_min(body, CURVATURE_GRID)?;
    if !(flat.nu > 1e-12) {
        return Err(Error::Domain {
            what: "minimum curvature (conjecture bound needs nu > 0)",
            value: flat.nu,
        });
    }
    if r_grid.is_empty() || r_grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::Config("radius grid must be non-empty and positive".into()));
    }
    let range = body.theta_range();
    if theta_grid
        .iter()
        .any(|&t| !(t >= range.0 - 1e-12 && t <= range.1 + 1e-12))
    {
        return Err(Error::Config(format!(
            "theta grid must lie in [{}, {}] for this body",
            range.0, range.1
        )));
    }
    let witness_theta = fold_angle(flat.normal_angle, range);

    let mut points = Vec::with_capacity(r_grid.len() * (theta_grid.len() + 1));
    for &r in r_grid {
        for &t in theta_grid {
            points.push((r, t, false));
        }
        points.push((r, witness_theta, true));
    }
    let results: Vec<Result<BodySample>> = points
        .par_iter()
        .map(|&(r, theta, witness)| {
            let t = chi_hat_body(body, Frequency::polar(r, theta), cfg)?;
            let scale = r.powf(1.5);
            Ok(BodySample {
                r,
                theta,
                scaled_value: scale * t.magnitude(),
                err_estimate: scale * t.err_estimate,
                witness,
            })
        })
        .collect();

    let bound = upper_constant() / flat.nu.sqrt();
    let total = results.len();
    let mut failed = 0;
    let mut violations = 0;
    let mut best: Option<BodySample> = None;
    let mut witness_max: f64 = 0.0;
    let mut kept = 0;
    for res in results {
        let Ok(s) = res else {
            failed += 1;
            continue;
        };
        kept += 1;
        if s.scaled_value > bound {
            violations += 1;
        }
        if s.witness {
            witness_max = witness_max.max(s.scaled_value);
        }
        if best.map_or(true, |b| s.scaled_value > b.scaled_value) {
            best = Some(s);
        }
    }
    if failed as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(Error::TooManyFailures { failed, total });
    }
    let best = best.ok_or(Error::InsufficientPoints { needed: 1, got: 0 })?;
    let mut notes = format!(
        "theta range [{:.6}, {:.6}]; flattest point ({:.6}, {:.6})",
        range.0, range.1, flat.x, flat.y
    );
    if violations > 0 {
        notes.push_str("; counterexample candidate");
    }
    Ok(ConjectureReport {
        label: body.label.clone(),
        nu: flat.nu,
        nu_x: flat.x,
        nu_y: flat.y,
        c_est: best.scaled_value,
        argmax_r: best.r,
        argmax_theta: best.theta,
        bound,
        lower_reference: published_lower_constant() / flat.nu.sqrt(),
        upper_ok: best.scaled_value <= bound,
        witness_theta,
        witness_max,
        samples: kept,
        failed,
        violations,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_derivatives_match_differences() {
        let graphs = [
            Graph::Superellipse { a: 2.0, b: 1.0, q: 2.0, sign: 1.0 },
            Graph::Superellipse { a: 1.0, b: 1.5, q: 1.4, sign: -1.0 },
            Graph::Poly(vec![1.0, 0.2, -1.0, 0.0, -0.1]),
        ];
        let h = 1e-5;
        for g in &graphs {
            for x in [-0.7, -0.2, 0.3, 0.6] {
                let fd1 = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
                let fd2 = (g.d1(x + h) - g.d1(x - h)) / (2.0 * h);
                assert!((g.d1(x) - fd1).abs() < 1e-7, "{g:?} {x}");
                assert!((g.d2(x) - fd2).abs() < 1e-6, "{g:?} {x}");
            }
        }
    }

    #[test]
    fn curvature_minima() {
        let disk = body_curvature_min(&ConvexBody::disk(), 2000).unwrap();
        assert!((disk.nu - 1.0).abs() < 1e-9);
        let e = body_curvature_min(&ConvexBody::ellipse(2.0, 1.0).unwrap(), 2000).unwrap();
        assert!((e.nu - 0.25).abs() < 1e-9);
        assert!(e.x.abs() < 1e-4);
        assert!((e.normal_angle.abs() - FRAC_PI_2).abs() < 1e-4);
        let p = PExponent::new(1.5).unwrap();
        let b = body_curvature_min(&ConvexBody::lp(p), 2000).unwrap();
        assert!((b.nu - p.min_curvature()).abs() < 1e-9);
        assert!(body_curvature_min(&ConvexBody::disk(), 999).is_err());
    }

    #[test]
    fn zero_frequency_is_area_over_two_pi() {
        let cfg = QuadConfig::default();
        let e = chi_hat_body(&ConvexBody::ellipse(2.0, 0.5).unwrap(), Frequency::cartesian(0.0, 0.0), &cfg).unwrap();
        assert!((e.value - 0.5).abs() < 1e-10);
        assert_eq!(e.method, Method::ZeroFrequency);
    }

    #[test]
    fn rejects_malformed_bodies() {
        assert!(ConvexBody::poly(vec![1.0], vec![-1.0], (-1.0, 1.0)).is_err());
        // upper arc convex
        assert!(ConvexBody::poly(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, -1.0], (-1.0, 1.0)).is_err());
        assert!(ConvexBody::poly(vec![1.0, 0.0, -1.0], vec![-1.0, 0.0, 1.0], (1.0, -1.0)).is_err());
        assert!(ConvexBody::ellipse(0.0, 1.0).is_err());
        assert!(ConvexBody::superellipse(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn lens_symmetry_flags() {
        let lens = ConvexBody::poly(vec![1.0, 0.0, -1.0], vec![-1.0, 0.0, 1.0], (-1.0, 1.0)).unwrap();
        assert!(lens.centrally_symmetric && lens.reflection_symmetric);
        let cap = ConvexBody::poly(vec![1.0, 0.0, -1.0], vec![0.0], (-1.0, 1.0)).unwrap();
        assert!(!cap.centrally_symmetric && cap.reflection_symmetric);
        let tilted = ConvexBody::poly(vec![1.0, 0.3, -1.0], vec![-1.0, 0.3, 1.0], (-1.0, 1.0)).unwrap();
        assert!(tilted.centrally_symmetric && !tilted.reflection_symmetric);
        assert_eq!(tilted.theta_range(), (0.0, PI));
    }

    #[test]
    fn flat_bodies_are_rejected() {
        let diamond = ConvexBody::lp(PExponent::new(1.0).unwrap());
        let cfg = QuadConfig::default();
        assert!(matches!(
            conjecture_scan(&diamond, &[10.0], &[0.5], &cfg),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn body_spec_json_shape() {
        let spec: BodySpec =
            serde_json::from_str(r#"{"label":"e","kind":"ellipse","params":{"a":2.0,"b":1.0}}"#).unwrap();
        assert_eq!(spec.kind, BodyKind::Ellipse { a: 2.0, b: 1.0 });
        let poly: BodySpec = serde_json::from_str(
            r#"{"label":"lens","kind":"custom-poly-coeffs","params":{"upper":[1,0,-1],"lower":[-1,0,1],"x_range":[-1,1]}}"#,
        )
        .unwrap();
        assert!(ConvexBody::from_spec(&poly).is_ok());
    }
}

//! Measuring the decay envelope `C(p) = sup_ω |ω|^{3/2} |χ̂_{B_p}(ω)|`.
//!
//! The supremum is approximated by a grid scan over `(r, θ)` together with the
//! stationary-phase witness frequencies `ω_n = r_n(cos θ*, sin θ*)`, where
//! `r_n·ψ_p(x*; θ*) = 2πn` so that the phase vanishes at the flat point.
//! Along that sequence `r^{3/2}|χ̂|` tends to
//!
//! ```text
//! V(p) = 1 / (√π · sin^{3/2}θ* · √((p − 1)·m(p)))
//! ```
//!
//! which carries the `(p − 1)^{−1/2}` blow-up as `p → 1`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{chi_hat_lp, Frequency, Method};
use crate::oscquad::QuadConfig;
use crate::PExponent;

/// Upper-bound constant `C₁ = 12·2^{1/4}` in `sup |ω|^{3/2}|χ̂| ≤ C₁/√(p − 1)`.
pub fn upper_constant() -> f64 {
    12.0 * 2f64.powf(0.25)
}

/// Lower-bound constant `C₂ = 2^{7/4}√π` as published; reported, never asserted.
pub fn published_lower_constant() -> f64 {
    2f64.powf(1.75) * PI.sqrt()
}

/// Failed samples above this fraction abort a scan.
pub const MAX_FAILED_FRACTION: f64 = 0.01;

/// Where a scan sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSource {
    Grid,
    Sequence,
    Offset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSample {
    pub p: f64,
    pub r: f64,
    pub theta: f64,
    /// `r^{3/2}·|χ̂|`.
    pub scaled_value: f64,
    pub err_estimate: f64,
    pub method: Method,
    pub source: SampleSource,
}

/// A grid point whose transform could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedSample {
    pub r: f64,
    pub theta: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub p: f64,
    pub c_est: f64,
    pub argmax_r: f64,
    pub argmax_theta: f64,
    pub samples: Vec<EnvelopeSample>,
    pub failed: Vec<FailedSample>,
}

/// Log-spaced radii from `r_min` to `r_max` inclusive.
pub fn log_grid(r_min: f64, r_max: f64, per_decade: usize) -> Vec<f64> {
    if !(r_max > r_min) || per_decade == 0 {
        return vec![r_min];
    }
    let decades = (r_max / r_min).log10();
    let n = (decades * per_decade as f64).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| {
            if i == n {
                r_max
            } else {
                r_min * 10f64.powf(decades * i as f64 / n as f64)
            }
        })
        .collect()
}

/// `count` uniform angles on `[π/4, π/2]` plus `θ*(p)` and `π/2` exactly, sorted.
pub fn theta_grid(p: PExponent, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = if count >= 2 {
        (0..count)
            .map(|i| FRAC_PI_4 + (FRAC_PI_2 - FRAC_PI_4) * i as f64 / (count - 1) as f64)
            .collect()
    } else {
        vec![FRAC_PI_4]
    };
    out.push(p.theta_star());
    out.push(FRAC_PI_2);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Default scan grids: 60 radii per decade and 48 angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ScanGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub r_per_decade: usize,
    pub theta_count: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            r_min: 5.0,
            r_max: 2000.0,
            r_per_decade: 60,
            theta_count: 48,
        }
    }
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min >= 5.0) || !(self.r_max > self.r_min) || !self.r_max.is_finite() {
            return Err(Error::Config(format!(
                "radius range [{}, {}] must satisfy 5 <= r_min < r_max",
                self.r_min, self.r_max
            )));
        }
        if self.r_per_decade == 0 || self.theta_count < 2 {
            return Err(Error::Config("grid densities must be positive".into()));
        }
        Ok(())
    }
}

/// Runs `op` on a dedicated pool of `workers` threads (`0` means the global pool).
pub fn with_workers<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return op();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}

fn sample(p: PExponent, r: f64, theta: f64, source: SampleSource, cfg: &QuadConfig) -> std::result::Result<EnvelopeSample, FailedSample> {
    let scale = r.powf(1.5);
    chi_hat_lp(p, Frequency::polar(r, theta), cfg)
        .map(|t| EnvelopeSample {
            p: p.get(),
            r,
            theta,
            scaled_value: scale * t.value.abs(),
            err_estimate: scale * t.err_estimate,
            method: t.method,
            source,
        })
        .map_err(|e| FailedSample {
            r,
            theta,
            error: e.to_string(),
        })
}

/// Scans `r^{3/2}|χ̂_{B_p}|` over `r_grid × theta_grid`, adding the witness
/// sequence (and its phase-offset neighbours) whenever `1 < p < 2`.
///
/// Evaluation is parallel; the sample order and the maximum are independent
/// of the number of workers.
pub fn envelope_scan(
    p: PExponent,
    r_grid: &[f64],
    theta_grid: &[f64],
    cfg: &QuadConfig,
) -> Result<EnvelopeReport> {
    cfg.validate()?;
    let (r_lo, r_hi) = bounds(r_grid)?;
    if r_lo < 5.0 {
        return Err(Error::Config(format!("r grid starts at {r_lo} < 5")));
    }
    let tol = 1e-12;
    if theta_grid.is_empty()
        || theta_grid
            .iter()
            .any(|&t| !(t >= FRAC_PI_4 - tol && t <= FRAC_PI_2 + tol))
    {
        return Err(Error::Config("theta grid must lie in [pi/4, pi/2]".into()));
    }
    let ts = p.theta_star();
    if !theta_grid.iter().any(|&t| (t - ts).abs() <= tol) {
        return Err(Error::Config(format!("theta grid must include theta* = {ts}")));
    }

    let mut points: Vec<(f64, f64, SampleSource)> = Vec::with_capacity(r_grid.len() * theta_grid.len());
    for &r in r_grid {
        for &t in theta_grid {
            points.push((r, t, SampleSource::Grid));
        }
    }
    if p.regime() == crate::lpgeom::Regime::Interior {
        let base = base_phase(p);
        let n_min = ((r_lo * base / (2.0 * PI)).ceil() as usize).max(1);
        let n_max = (r_hi * base / (2.0 * PI)).floor() as usize;
        if n_max >= n_min {
            let spec = stationary_sequence(p, n_min, n_max)?;
            let shift = FRAC_PI_4 / base;
            for &r in &spec.r_values {
                points.push((r, ts, SampleSource::Sequence));
                for rr in [r - shift, r + shift] {
                    if rr >= r_lo && rr <= r_hi {
                        points.push((rr, ts, SampleSource::Offset));
                    }
                }
            }
        }
    }

    let results: Vec<_> = points
        .par_iter()
        .map(|&(r, t, src)| sample(p, r, t, src, cfg))
        .collect();

    let mut samples = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(f) => failed.push(f),
        }
    }
    let total = samples.len() + failed.len();
    if failed.len() as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(Error::TooManyFailures {
            failed: failed.len(),
            total,
        });
    }
    let best = samples
        .iter()
        .fold(None::<&EnvelopeSample>, |acc, s| match acc {
            Some(b) if b.scaled_value >= s.scaled_value => Some(b),
            _ => Some(s),
        })
        .ok_or(Error::InsufficientPoints { needed: 1, got: 0 })?;
    Ok(EnvelopeReport {
        p: p.get(),
        c_est: best.scaled_value,
        argmax_r: best.r,
        argmax_theta: best.theta,
        samples: samples.clone(),
        failed,
    })
}

fn bounds(grid: &[f64]) -> Result<(f64, f64)> {
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if grid.is_empty() || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config("empty or non-finite radius grid".into()));
    }
    Ok((lo, hi))
}

/// `ψ_p(x*; θ*) = cos θ*·x* + sin θ*·φ_p(x*)`.
pub fn base_phase(p: PExponent) -> f64 {
    let (s, c) = p.theta_star().sin_cos();
    let xs = p.x_star();
    c * xs + s * p.phi_unchecked(xs)
}

/// Stationary-phase prediction `V(p)` for the witness sequence; infinite at `p = 1`.
pub fn v_of_p(p: PExponent) -> f64 {
    let s = p.theta_star().sin();
    1.0 / (PI.sqrt() * s.powf(1.5) * p.min_abs_phi2().sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceSpec {
    pub p: f64,
    pub theta_star: f64,
    pub base_phase: f64,
    pub n_values: Vec<usize>,
    pub r_values: Vec<f64>,
}

/// Witness radii `r_n = 2πn/ψ_p(x*; θ*)` for `n_min ≤ n ≤ n_max`.
pub fn stationary_sequence(p: PExponent, n_min: usize, n_max: usize) -> Result<SequenceSpec> {
    if p.is_special() {
        return Err(Error::Domain {
            what: "stationary_sequence p (needs 1 < p < 2)",
            value: p.get(),
        });
    }
    if n_min < 1 || n_max < n_min {
        return Err(Error::Config(format!("invalid sequence range {n_min}..={n_max}")));
    }
    let base = base_phase(p);
    let n_values: Vec<usize> = (n_min..=n_max).collect();
    let r_values = n_values
        .iter()
        .map(|&n| 2.0 * PI * n as f64 / base)
        .collect();
    Ok(SequenceSpec {
        p: p.get(),
        theta_star: p.theta_star(),
        base_phase: base,
        n_values,
        r_values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequencePoint {
    pub n: usize,
    pub r_n: f64,
    pub scaled_value: f64,
    pub v_of_p: f64,
    pub err_estimate: f64,
}

/// `r_n^{3/2}|χ̂_{B_p}(ω_n)|` along a witness sequence.
pub fn sequence_values(p: PExponent, spec: &SequenceSpec, cfg: &QuadConfig) -> Result<Vec<SequencePoint>> {
    if spec.p != p.get() {
        return Err(Error::Config("sequence spec was built for a different p".into()));
    }
    let v = v_of_p(p);
    spec.n_values
        .par_iter()
        .zip(spec.r_values.par_iter())
        .map(|(&n, &r)| {
            let t = chi_hat_lp(p, Frequency::polar(r, spec.theta_star), cfg)?;
            let scale = r.powf(1.5);
            Ok(SequencePoint {
                n,
                r_n: r,
                scaled_value: scale * t.value.abs(),
                v_of_p: v,
                err_estimate: scale * t.err_estimate,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub p: f64,
    pub c_est: f64,
    pub bound: f64,
    pub pass: bool,
    /// `bound / c_est`.
    pub slack_ratio: f64,
}

/// `C₁/√(p − 1)`; undefined at `p = 1`.
pub fn upper_bound(p: PExponent) -> Result<f64> {
    if p.regime() == crate::lpgeom::Regime::Linear {
        return Err(Error::Domain {
            what: "upper bound (p = 1 divides by zero)",
            value: p.get(),
        });
    }
    Ok(upper_constant() / (p.get() - 1.0).sqrt())
}

pub fn upper_bound_check(p: PExponent, c_est: f64) -> Result<BoundReport> {
    let bound = upper_bound(p)?;
    Ok(BoundReport {
        p: p.get(),
        c_est,
        bound,
        pass: c_est <= bound,
        slack_ratio: bound / c_est,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    let n = xs.len().min(ys.len());
    if n < 4 {
        return Err(Error::InsufficientPoints { needed: 4, got: n });
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(Error::Config("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_abs_residual,
        points: n,
    })
}

/// Slope of `log(r^{3/2}|χ̂|)` at the witness `n_ref` against `log(p − 1)`.
pub fn blowup_fit(p_grid: &[f64], n_ref: usize, cfg: &QuadConfig) -> Result<FitResult> {
    if p_grid.len() < 4 {
        return Err(Error::InsufficientPoints {
            needed: 4,
            got: p_grid.len(),
        });
    }
    let mut xs = Vec::with_capacity(p_grid.len());
    let mut ys = Vec::with_capacity(p_grid.len());
    for &pv in p_grid {
        let p = PExponent::new(pv)?;
        let spec = stationary_sequence(p, n_ref, n_ref)?;
        let pt = sequence_values(p, &spec, cfg)?[0];
        xs.push((pv - 1.0).ln());
        ys.push(pt.scaled_value.ln());
    }
    least_squares(&xs, &ys)
}

/// The same fit applied to the asymptote `V(p)` instead of quadrature values.
pub fn blowup_fit_asymptote(p_grid: &[f64]) -> Result<FitResult> {
    let mut xs = Vec::with_capacity(p_grid.len());
    let mut ys = Vec::with_capacity(p_grid.len());
    for &pv in p_grid {
        let p = PExponent::new(pv)?;
        xs.push((pv - 1.0).ln());
        ys.push(v_of_p(p).ln());
    }
    least_squares(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    #[test]
    fn constants() {
        assert!((upper_constant() - 14.2704853800326528).abs() < 1e-13);
        assert!((published_lower_constant() - 5.96180035771636100).abs() < 1e-13);
    }

    #[test]
    fn sequence_structure() {
        let p = pe(1.5);
        assert!((base_phase(p) - 0.911440684894724897197459448921).abs() < 1e-14);
        let s = stationary_sequence(p, 1, 40).unwrap();
        for (&n, &r) in s.n_values.iter().zip(&s.r_values) {
            assert!((r * s.base_phase - 2.0 * PI * n as f64).abs() < 1e-9);
            assert!((r * s.base_phase).sin().abs() < 1e-9);
        }
        assert_eq!(s.r_values[19] / s.r_values[9], 2.0);
        assert!(s.r_values.windows(2).all(|w| w[0] < w[1]));
        assert!(stationary_sequence(pe(2.0), 1, 3).is_err());
        assert!(stationary_sequence(pe(1.0), 1, 3).is_err());
        assert!(stationary_sequence(p, 0, 3).is_err());
    }

    #[test]
    fn asymptote_value() {
        assert!((v_of_p(pe(1.5)) - 0.675617322045884367).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_values() {
        let b = upper_bound_check(pe(2.0), 0.798).unwrap();
        assert!((b.bound - 14.2704853800326528).abs() < 1e-12);
        assert!(b.pass);
        assert!((b.slack_ratio - 17.88).abs() < 0.01);
        assert!((upper_bound(pe(1.1)).unwrap() - 45.127).abs() < 1e-3);
        assert!(upper_bound_check(pe(1.0), 1.0).is_err());
    }

    #[test]
    fn fit_sanity() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let f = least_squares(&xs, &[2.0; 5]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.intercept, 2.0);
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 1.0).collect();
        let f = least_squares(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-15);
        assert!(matches!(
            least_squares(&xs[..3], &ys[..3]),
            Err(Error::InsufficientPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn grids() {
        let g = log_grid(5.0, 2000.0, 60);
        assert_eq!(g[0], 5.0);
        assert_eq!(*g.last().unwrap(), 2000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let t = theta_grid(pe(1.5), 48);
        assert!(t.contains(&pe(1.5).theta_star()));
        assert!(t.contains(&FRAC_PI_2));
        assert_eq!(t.len(), 49);
    }

    #[test]
    fn scan_validates_inputs() {
        let cfg = QuadConfig::default();
        let p = pe(1.5);
        let t = theta_grid(p, 4);
        assert!(envelope_scan(p, &[1.0, 10.0], &t, &cfg).is_err());
        assert!(envelope_scan(p, &[10.0, 20.0], &[0.9, 1.2], &cfg).is_err());
        assert!(envelope_scan(p, &[10.0, 20.0], &[0.1, p.theta_star()], &cfg).is_err());
        assert!(envelope_scan(p, &[], &t, &cfg).is_err());
    }
}

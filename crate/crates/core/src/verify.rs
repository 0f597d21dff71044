//! Named verification suites with fixed tolerances.
//!
//! Each suite checks one quantitative claim end to end and reports a single
//! pass/fail outcome with the measured numbers.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convex_probe::{body_theta_grid, chi_hat_body, conjecture_scan, ConvexBody};
use crate::decay::{
    blowup_fit, envelope_scan, log_grid, sequence_values, stationary_sequence, theta_grid,
    upper_bound, v_of_p, with_workers, ScanGrid,
};
use crate::error::{Error, Result};
use crate::fourier::{
    bessel_oracle_config, chi_hat_bruteforce, chi_hat_l1_closed, chi_hat_lp, chi_hat_lp_y,
    disk_transform,
};
use crate::oscquad::{certify_vdc, fresnel_symmetric, integrate_sin_phase, FnPhase, VdcOrder};
use crate::report::{envelope_csv, EnvelopeRun};
use crate::{Frequency, PExponent, QuadConfig};

/// Suite names in order; the position plus one is the criterion number.
pub const SUITES: [&str; 11] = [
    "oracles",
    "closed-form",
    "geometry",
    "van-der-corput",
    "stationary-phase",
    "upper-bound",
    "lower-order",
    "blowup",
    "l1-sharpness",
    "conjecture",
    "determinism",
];

pub const ORACLE_CASES: usize = 50;
pub const ORACLE_BRUTE_TOL: f64 = 1e-6;
pub const ORACLE_SLICING_TOL: f64 = 1e-8;
pub const ORACLE_MAX_RADIUS: f64 = 30.0;
pub const BRUTE_FORCE_GRID: usize = 800;
pub const L1_FIXTURE_TOL: f64 = 1e-9;
pub const DISK_FIXTURE_TOL: f64 = 1e-8;
pub const DISK_FIXTURE_RADII: [f64; 4] = [1.0, 10.0, 50.0, 100.0];
pub const GEOMETRY_REL_TOL: f64 = 1e-10;
pub const CURVATURE_MIN_TOL: f64 = 1e-6;
pub const VDC_CASES: usize = 100;
pub const STATIONARY_RADIUS: f64 = 1e5;
pub const STATIONARY_BAND: (f64, f64) = (0.95, 1.05);
pub const UPPER_BOUND_PS: [f64; 4] = [1.1, 1.3, 1.5, 2.0];
pub const SEQUENCE_P: f64 = 1.5;
pub const SEQUENCE_NS: [usize; 4] = [25, 50, 100, 200];
pub const SEQUENCE_REL_TOL: f64 = 0.05;
pub const DISK_ENVELOPE_REL_TOL: f64 = 0.02;
pub const BLOWUP_PS: [f64; 5] = [1.05, 1.1, 1.2, 1.3, 1.4];
pub const BLOWUP_N_REF: usize = 200;
pub const BLOWUP_SLOPE_BAND: (f64, f64) = (-0.56, -0.44);
pub const SHARPNESS_EPS: f64 = 1e-2;
pub const SHARPNESS_NS: [u32; 3] = [10, 100, 1000];
pub const ELLIPSE_SCALING_TOL: f64 = 1e-6;
pub const DETERMINISM_WORKERS: [usize; 3] = [1, 4, 8];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub suite: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_secs: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<17} {} ({:.1} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.suite,
            self.detail,
            self.elapsed_secs
        )
    }
}

/// Runs one suite by name.
pub fn run(name: &str) -> Result<Outcome> {
    let idx = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| Error::Config(format!("unknown suite '{name}' (known: {})", SUITES.join(", "))))?;
    let start = Instant::now();
    let res = match idx {
        0 => oracles(),
        1 => closed_form(),
        2 => geometry(),
        3 => van_der_corput(),
        4 => stationary_phase(),
        5 => upper_bound_scan(),
        6 => lower_order(),
        7 => blowup(),
        8 => l1_sharpness(),
        9 => conjecture(),
        _ => determinism(),
    };
    let elapsed = start.elapsed();
    let (pass, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(Outcome {
        id: idx + 1,
        suite: SUITES[idx],
        pass,
        detail,
        elapsed_secs: elapsed.as_secs_f64(),
    })
}

pub fn run_all() -> Vec<Outcome> {
    SUITES.iter().map(|s| run(s).expect("known suite")).collect()
}

type Check = Result<(bool, String)>;

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn oracles() -> Check {
    let start = Instant::now();
    let cfg = QuadConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut brute, mut slicing) = (0.0f64, 0.0f64);
    for _ in 0..ORACLE_CASES {
        let p = PExponent::new(rng.gen_range(1.0..=2.0))?;
        let w = Frequency::polar(rng.gen_range(0.0..=ORACLE_MAX_RADIUS), rng.gen_range(0.0..2.0 * PI));
        let x = chi_hat_lp(p, w, &cfg)?;
        let y = chi_hat_lp_y(p, w, &cfg)?;
        let b = chi_hat_bruteforce(p, w, BRUTE_FORCE_GRID)?;
        brute = brute.max((x.value - b.re).abs());
        slicing = slicing.max((x.value - y.value).abs());
    }
    let t = start.elapsed();
    Ok((
        brute <= ORACLE_BRUTE_TOL && slicing <= ORACLE_SLICING_TOL && within(t, 120),
        format!("max |reduction - brute force| = {brute:.2e}, max |x - y slicing| = {slicing:.2e}"),
    ))
}

fn closed_form() -> Check {
    let cfg = QuadConfig::default();
    let bessel = bessel_oracle_config();
    let want = -4.0 / (3.0 * PI.powi(3));
    let got = chi_hat_lp(PExponent::new(1.0)?, Frequency::cartesian(PI, 2.0 * PI), &cfg)?.value;
    let l1_err = (got - want).abs();
    let disk = PExponent::new(2.0)?;
    let mut disk_err = 0.0f64;
    for r in DISK_FIXTURE_RADII {
        let v = chi_hat_lp(disk, Frequency::polar(r, 0.3), &cfg)?.value;
        disk_err = disk_err.max((v - disk_transform(r, &bessel)?).abs());
    }
    Ok((
        l1_err <= L1_FIXTURE_TOL && disk_err <= DISK_FIXTURE_TOL,
        format!("l1 (pi, 2pi) = {got:.12}, error {l1_err:.2e}; disk max error {disk_err:.2e}"),
    ))
}

fn geometry() -> Check {
    let one = PExponent::new(1.0)?;
    let two = PExponent::new(2.0)?;
    let endpoints = one.m() == 4.0 && two.m() == 1.0;
    let ms: Vec<f64> = (0..100)
        .map(|i| PExponent::new(1.0 + i as f64 / 99.0).map(|p| p.m()))
        .collect::<Result<_>>()?;
    let decreasing = ms.windows(2).all(|w| w[1] < w[0]);
    let (mut phi2_err, mut curv_err) = (0.0f64, 0.0f64);
    for pv in [1.1, 1.5, 1.9] {
        let p = PExponent::new(pv)?;
        let at = p.phi_d2(p.x_star())?.abs();
        phi2_err = phi2_err.max((at - p.min_abs_phi2()).abs() / p.min_abs_phi2());
        let n = 200_000;
        let mut dense = f64::INFINITY;
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            dense = dense.min(p.curvature(x)?);
        }
        let closed = (pv - 1.0) * 2f64.powf(1.0 / pv - 0.5);
        curv_err = curv_err.max((dense - closed).abs());
    }
    Ok((
        endpoints && decreasing && phi2_err <= GEOMETRY_REL_TOL && curv_err <= CURVATURE_MIN_TOL,
        format!(
            "m(1)={}, m(2)={}, decreasing={decreasing}, |phi''(x*)| rel err {phi2_err:.2e}, curvature min err {curv_err:.2e}",
            one.m(),
            two.m()
        ),
    ))
}

fn van_der_corput() -> Check {
    let start = Instant::now();
    let cfg = QuadConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut violations = [0usize; 2];
    let mut worst = [0.0f64; 2];
    for case in 0..2 {
        for _ in 0..VDC_CASES {
            let r = 10f64.powf(rng.gen_range(0.0..=4.0));
            let lambda = rng.gen_range(0.1..5.0);
            let b = rng.gen_range(-5.0..5.0);
            let c = rng.gen_range(0.0..5.0);
            let d = rng.gen_range(0.0..3.0);
            let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let check = if case == 0 {
                // ψ' = s(λ + 2cx + 3dx²): monotone with |ψ'| ≥ λ on [0, 1]
                let phase = FnPhase {
                    label: "first".into(),
                    eval: move |x: f64| s * (lambda * x + c * x * x + d * x * x * x),
                    d1: move |x: f64| s * (lambda + 2.0 * c * x + 3.0 * d * x * x),
                    d2: move |x: f64| s * (2.0 * c + 6.0 * d * x),
                };
                certify_vdc(VdcOrder::First, &phase, r, lambda, 0.0, 1.0, &cfg)?
            } else {
                // ψ'' = s(λ + 6dx) ≥ λ, possibly with a stationary point
                let phase = FnPhase {
                    label: "second".into(),
                    eval: move |x: f64| s * (b * x + 0.5 * lambda * x * x + d * x * x * x),
                    d1: move |x: f64| s * (b + lambda * x + 3.0 * d * x * x),
                    d2: move |x: f64| s * (lambda + 6.0 * d * x),
                };
                certify_vdc(VdcOrder::Second, &phase, r, lambda, 0.0, 1.0, &cfg)?
            };
            if !check.holds {
                violations[case] += 1;
            }
            worst[case] = worst[case].max(check.integral.abs() / check.bound);
        }
    }
    let t = start.elapsed();
    Ok((
        violations == [0, 0] && within(t, 60),
        format!(
            "violations first/second = {}/{}, worst ratio to bound {:.3}/{:.3}",
            violations[0], violations[1], worst[0], worst[1]
        ),
    ))
}

fn stationary_phase() -> Check {
    let cfg = QuadConfig::default();
    let limit = (PI / 2.0).sqrt();
    let mut fresnel_ok = true;
    let mut worst_slack = f64::INFINITY;
    for m in 10..=100 {
        let m = m as f64;
        let dev = (fresnel_symmetric(m, &cfg)? - limit).abs();
        fresnel_ok &= dev <= 2.0 / m;
        worst_slack = worst_slack.min(2.0 / m - dev);
    }
    let phase = FnPhase {
        label: "(x - 1/2)^2".into(),
        eval: |x: f64| (x - 0.5) * (x - 0.5),
        d1: |x: f64| 2.0 * (x - 0.5),
        d2: |_x: f64| 2.0,
    };
    let r = STATIONARY_RADIUS;
    let i = integrate_sin_phase(&phase, r, 0.0, 1.0, &cfg)?.value;
    let ratio = i.abs() * (2.0 * r).sqrt() / PI.sqrt();
    Ok((
        fresnel_ok && ratio >= STATIONARY_BAND.0 && ratio <= STATIONARY_BAND.1,
        format!("fresnel within 2/m on m=10..100 (min slack {worst_slack:.2e}); stationary ratio {ratio:.6}"),
    ))
}

fn default_scan(p: PExponent, grid: &ScanGrid, cfg: &QuadConfig) -> Result<crate::decay::EnvelopeReport> {
    grid.validate()?;
    let rg = log_grid(grid.r_min, grid.r_max, grid.r_per_decade);
    let tg = theta_grid(p, grid.theta_count);
    envelope_scan(p, &rg, &tg, cfg)
}

fn upper_bound_scan() -> Check {
    let start = Instant::now();
    let cfg = QuadConfig::default();
    let grid = ScanGrid::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for pv in UPPER_BOUND_PS {
        let p = PExponent::new(pv)?;
        let rep = default_scan(p, &grid, &cfg)?;
        let bound = upper_bound(p)?;
        let violations = rep.samples.iter().filter(|s| s.scaled_value > bound).count();
        ok &= rep.c_est <= bound && violations == 0;
        parts.push(format!("p={pv}: C_est {:.4} <= {bound:.3} ({violations} violations)", rep.c_est));
    }
    let t = start.elapsed();
    Ok((ok && within(t, 600), parts.join("; ")))
}

fn lower_order() -> Check {
    let cfg = QuadConfig::default();
    let p = PExponent::new(SEQUENCE_P)?;
    let v = v_of_p(p);
    let mut devs = Vec::with_capacity(SEQUENCE_NS.len());
    for n in SEQUENCE_NS {
        let spec = stationary_sequence(p, n, n)?;
        let pt = sequence_values(p, &spec, &cfg)?[0];
        devs.push((pt.scaled_value - v).abs() / v);
    }
    let last = *devs.last().unwrap_or(&f64::INFINITY);
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);

    let disk = PExponent::new(2.0)?;
    let grid = ScanGrid {
        r_min: 50.0,
        ..ScanGrid::default()
    };
    let rep = default_scan(disk, &grid, &cfg)?;
    let target = (2.0 / PI).sqrt();
    let disk_dev = (rep.c_est - target).abs() / target;
    let devs_text: Vec<String> = devs.iter().map(|d| format!("{d:.2e}")).collect();
    Ok((
        last <= SEQUENCE_REL_TOL && decreasing && disk_dev <= DISK_ENVELOPE_REL_TOL,
        format!(
            "V(1.5)={v:.6}, rel deviation at n=25,50,100,200: [{}], decreasing={decreasing}; disk C_est {:.5} ({:.2}% off)",
            devs_text.join(", "),
            rep.c_est,
            100.0 * disk_dev
        ),
    ))
}

fn blowup() -> Check {
    let start = Instant::now();
    let fit = blowup_fit(&BLOWUP_PS, BLOWUP_N_REF, &QuadConfig::default())?;
    let t = start.elapsed();
    Ok((
        fit.slope >= BLOWUP_SLOPE_BAND.0 && fit.slope <= BLOWUP_SLOPE_BAND.1 && within(t, 900),
        format!("slope {:.4}, max residual {:.2e}", fit.slope, fit.max_abs_residual),
    ))
}

fn l1_sharpness() -> Check {
    let cfg = QuadConfig::default();
    let one = PExponent::new(1.0)?;
    let mut ok = true;
    let mut ratios = Vec::new();
    for n in SHARPNESS_NS {
        let a = 2.0 * PI * n as f64 + FRAC_PI_2;
        let w = Frequency::cartesian(a, a + SHARPNESS_EPS);
        let v = chi_hat_lp(one, w, &cfg)?.value.abs();
        let closed = chi_hat_l1_closed(w).abs();
        let floor = 1.0 / (PI * w.r);
        ok &= v >= floor && closed >= floor;
        ratios.push(format!("{:.4}", v / floor));
    }
    Ok((ok, format!("|chi|·pi·|w| at n=10,100,1000: [{}]", ratios.join(", "))))
}

fn conjecture() -> Check {
    let cfg = QuadConfig::default();
    let grid = ScanGrid::default();
    let rg = log_grid(grid.r_min, grid.r_max, grid.r_per_decade);
    let mut ok = true;
    let mut parts = Vec::new();
    let ellipse = ConvexBody::ellipse(2.0, 1.0)?;
    for body in [ConvexBody::disk(), ellipse.clone()] {
        let tg = body_theta_grid(&body, grid.theta_count);
        let rep = conjecture_scan(&body, &rg, &tg, &cfg)?;
        ok &= rep.upper_ok && rep.violations == 0;
        parts.push(format!(
            "{}: nu {:.4}, C_est {:.4} <= {:.3}",
            rep.label, rep.nu, rep.c_est, rep.bound
        ));
    }
    let bessel = bessel_oracle_config();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_000a);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let w = Frequency::polar(rng.gen_range(0.1..50.0), rng.gen_range(0.0..2.0 * PI));
        let rho = (2.0 * w.alpha).hypot(w.beta);
        let want = 2.0 * disk_transform(rho, &bessel)?;
        let got = chi_hat_body(&ellipse, w, &cfg)?;
        worst = worst.max((got.value - want).abs()).max(got.imag.abs());
    }
    ok &= worst <= ELLIPSE_SCALING_TOL;
    parts.push(format!("ellipse scaling max error {worst:.2e}"));
    Ok((ok, parts.join("; ")))
}

/// Envelope CSVs (no timestamp) for the upper-bound exponents on `workers` threads.
pub fn envelope_outputs(workers: usize) -> Result<String> {
    let cfg = QuadConfig::default();
    let grid = ScanGrid::default();
    let mut out = String::new();
    for pv in UPPER_BOUND_PS {
        let p = PExponent::new(pv)?;
        let rep = with_workers(workers, || default_scan(p, &grid, &cfg))?;
        let run = EnvelopeRun { p: pv, grid, quad: cfg };
        out.push_str(&envelope_csv(&run, &rep.samples, false)?);
    }
    Ok(out)
}

fn determinism() -> Check {
    let outputs: Vec<String> = DETERMINISM_WORKERS
        .iter()
        .map(|&w| envelope_outputs(w))
        .collect::<Result<_>>()?;
    let identical = outputs.windows(2).all(|w| w[0].as_bytes() == w[1].as_bytes());
    Ok((
        identical,
        format!(
            "workers {:?}: {} bytes each, identical={identical}",
            DETERMINISM_WORKERS,
            outputs[0].len()
        ),
    ))
}

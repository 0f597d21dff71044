use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use lpdecay::convex_probe::{
    body_curvature_min, body_theta_grid, chi_hat_body, conjecture_scan, ConvexBody,
};
use lpdecay::decay::{envelope_scan, log_grid, theta_grid, SampleSource};
use lpdecay::fourier::{bessel_oracle_config, chi_hat_lp, disk_transform};
use lpdecay::{Error, Frequency, PExponent, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn simpson(n: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> (f64, f64)) -> (f64, f64) {
    let h = (b - a) / n as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..=n {
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let (r, j) = f(a + i as f64 * h);
        re += w * r;
        im += w * j;
    }
    (re * h / 3.0, im * h / 3.0)
}

/// Ellipse transform by elliptic polar coordinates: trapezoid in angle, Simpson in radius.
fn ellipse_oracle(a: f64, b: f64, w: Frequency) -> f64 {
    let nt = 400;
    simpson(4000, 0.0, 1.0, |rho| {
        let mut s = 0.0;
        for k in 0..nt {
            let t = 2.0 * PI * k as f64 / nt as f64;
            s += (w.alpha * a * rho * t.cos() + w.beta * b * rho * t.sin()).cos();
        }
        (s * 2.0 * PI / nt as f64 * a * b * rho, 0.0)
    })
    .0 / (2.0 * PI)
}

/// Complex transform of the region between two graphs by a 2-D Simpson rule.
fn graph_oracle(upper: impl Fn(f64) -> f64, lower: impl Fn(f64) -> f64, w: Frequency) -> (f64, f64) {
    let (re, im) = simpson(1200, -1.0, 1.0, |x| {
        let (u, l) = (upper(x), lower(x));
        let width = u - l;
        simpson(400, 0.0, 1.0, |s| {
            let ph = w.alpha * x + w.beta * (l + s * width);
            (ph.cos() * width, -ph.sin() * width)
        })
    });
    (re / (2.0 * PI), im / (2.0 * PI))
}

#[test]
fn curvature_minima_of_sample_bodies() {
    assert!((body_curvature_min(&ConvexBody::disk(), 1000).unwrap().nu - 1.0).abs() < 1e-9);
    let e = body_curvature_min(&ConvexBody::ellipse(2.0, 1.0).unwrap(), 1000).unwrap();
    assert!((e.nu - 0.25).abs() < 1e-9);
    let p = PExponent::new(1.5).unwrap();
    let b = body_curvature_min(&ConvexBody::lp(p), 1000).unwrap();
    assert!((b.nu - 0.5612310241546865).abs() < 1e-9);
    assert!((b.nu - p.min_curvature()).abs() < 1e-9);
}

#[test]
fn disk_body_matches_bessel_identity() {
    let cfg = QuadConfig::default();
    let got = chi_hat_body(&ConvexBody::disk(), Frequency::cartesian(0.0, 10.0), &cfg).unwrap();
    assert!((got.value - 0.004347274616886144).abs() < 1e-12);
    assert!((got.value - disk_transform(10.0, &bessel_oracle_config()).unwrap()).abs() < 1e-12);
}

#[test]
fn ellipse_matches_direct_two_dimensional_quadrature() {
    let cfg = QuadConfig::default();
    let e = ConvexBody::ellipse(2.0, 1.0).unwrap();
    for (a, b) in [(0.5, 1.0), (3.0, -2.0), (-1.0, 6.0)] {
        let w = Frequency::cartesian(a, b);
        let want = ellipse_oracle(2.0, 1.0, w);
        let got = chi_hat_body(&e, w, &cfg).unwrap();
        assert!((got.value - want).abs() < 1e-8, "{w:?}: {} vs {want}", got.value);
        let rho = (2.0 * a).hypot(b);
        assert!((2.0 * disk_transform(rho, &bessel_oracle_config()).unwrap() - want).abs() < 1e-8);
    }
}

#[test]
fn ellipse_scaling_law() {
    let cfg = QuadConfig::default();
    let bessel = bessel_oracle_config();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..20 {
        let (a, b) = (rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0));
        let body = ConvexBody::ellipse(a, b).unwrap();
        let w = Frequency::polar(rng.gen_range(0.1..60.0), rng.gen_range(0.0..2.0 * PI));
        let rho = (a * w.alpha).hypot(b * w.beta);
        let want = a * b * disk_transform(rho, &bessel).unwrap();
        let got = chi_hat_body(&body, w, &cfg).unwrap();
        assert!((got.value - want).abs() < 1e-6, "a={a} b={b} {w:?}");
    }
}

#[test]
fn lp_body_agrees_with_dedicated_transform() {
    let cfg = QuadConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let p = PExponent::new(rng.gen_range(1.05..=2.0)).unwrap();
        let w = Frequency::polar(rng.gen_range(0.5..80.0), rng.gen_range(0.0..2.0 * PI));
        let body = chi_hat_body(&ConvexBody::lp(p), w, &cfg).unwrap();
        let lp = chi_hat_lp(p, w, &cfg).unwrap();
        assert!((body.value - lp.value).abs() < 1e-8, "p={} {w:?}", p.get());
    }
}

#[test]
fn imaginary_part_vanishes_for_symmetric_bodies() {
    let cfg = QuadConfig::default();
    let mut e = ConvexBody::ellipse(1.5, 0.7).unwrap();
    e.centrally_symmetric = false;
    let lens = ConvexBody::poly(vec![1.0, 0.3, -1.0], vec![-1.0, 0.3, 1.0], (-1.0, 1.0)).unwrap();
    let mut lens_slow = lens.clone();
    lens_slow.centrally_symmetric = false;
    for (a, b) in [(2.0, 3.0), (-7.0, 1.0), (12.0, -9.0)] {
        let w = Frequency::cartesian(a, b);
        assert!(chi_hat_body(&e, w, &cfg).unwrap().imag.abs() <= 1e-8);
        let slow = chi_hat_body(&lens_slow, w, &cfg).unwrap();
        assert!(slow.imag.abs() <= 1e-8);
        assert!((slow.value - chi_hat_body(&lens, w, &cfg).unwrap().value).abs() < 1e-10);
    }
}

#[test]
fn asymmetric_body_matches_complex_oracle() {
    let cfg = QuadConfig::default();
    let body = ConvexBody::poly(vec![1.0, 0.0, -1.0], vec![-0.5, 0.0, 0.5], (-1.0, 1.0)).unwrap();
    assert!(!body.centrally_symmetric);
    for (a, b) in [(1.0, 2.0), (-4.0, 3.0), (0.5, -7.0)] {
        let w = Frequency::cartesian(a, b);
        let (re, im) = graph_oracle(|x| 1.0 - x * x, |x| -0.5 * (1.0 - x * x), w);
        let got = chi_hat_body(&body, w, &cfg).unwrap();
        assert!((got.value - re).abs() < 1e-8, "{w:?}: {} vs {re}", got.value);
        assert!((got.imag - im).abs() < 1e-8, "{w:?}: {} vs {im}", got.imag);
        assert!(im.abs() > 1e-4);
    }
}

#[test]
fn disk_and_ellipse_satisfy_the_curvature_bound() {
    let cfg = QuadConfig::default();
    let rg = log_grid(5.0, 400.0, 12);
    for body in [ConvexBody::disk(), ConvexBody::ellipse(2.0, 1.0).unwrap()] {
        let tg = body_theta_grid(&body, 9);
        let rep = conjecture_scan(&body, &rg, &tg, &cfg).unwrap();
        assert!(rep.upper_ok && rep.violations == 0, "{rep:?}");
        assert!(rep.c_est <= rep.bound);
        assert!(rep.witness_max <= rep.c_est);
        assert_eq!(rep.failed, 0);
    }
    let rep = conjecture_scan(&ConvexBody::ellipse(2.0, 1.0).unwrap(), &rg, &[0.0, FRAC_PI_2], &cfg).unwrap();
    assert!((rep.bound - 28.540970760065306).abs() < 1e-9);
    assert!((rep.witness_theta - FRAC_PI_2).abs() < 1e-6);
}

#[test]
fn lp_body_scan_matches_envelope_scan() {
    let cfg = QuadConfig::default();
    let p = PExponent::new(1.5).unwrap();
    let rg = log_grid(5.0, 200.0, 10);
    let tg = theta_grid(p, 8);
    let env = envelope_scan(p, &rg, &tg, &cfg).unwrap();
    let grid_max = env
        .samples
        .iter()
        .filter(|s| s.source == SampleSource::Grid)
        .map(|s| s.scaled_value)
        .fold(0.0, f64::max);
    let rep = conjecture_scan(&ConvexBody::lp(p), &rg, &tg, &cfg).unwrap();
    assert!(rep.c_est >= grid_max - 1e-8);
    assert!(rep.c_est <= env.c_est + 1e-8);
    assert!((rep.nu - p.min_curvature()).abs() < 1e-9);
    // flattest point of B_1.5 is on the diagonal
    assert!((rep.witness_theta - FRAC_PI_4).abs() < 1e-6);
}

#[test]
fn theta_grid_outside_body_range_is_rejected() {
    let cfg = QuadConfig::default();
    let err = conjecture_scan(&ConvexBody::disk(), &[10.0], &[2.0], &cfg).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

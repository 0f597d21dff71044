//! Fixed quadrature rules.

use crate::scalar::Real;

/// Positive-half nodes of the 15-point Kronrod rule, ascending, center first.
/// Even positions are the 7-point Gauss nodes.
const XGK15: [f64; 8] = [
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];

const WGK15: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];

/// Gauss weights for `XGK15[0], XGK15[2], XGK15[4], XGK15[6]`.
const WG7: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// One application of the G7/K15 pair on `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PanelEstimate<T> {
    pub kronrod: T,
    pub gauss: T,
}

/// Applies G7/K15 on `[a, b]`. On a non-finite sample, returns its abscissa.
#[inline]
pub(crate) fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<PanelEstimate<T>, T> {
    let half = (b - a) * T::lit(0.5);
    let center = a + half;
    let eval = |x: T| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(x)
        }
    };

    let fc = eval(center)?;
    let mut kron = fc * T::lit(WGK15[0]);
    let mut gauss = fc * T::lit(WG7[0]);
    for j in 1..8 {
        let dx = half * T::lit(XGK15[j]);
        let pair = eval(center - dx)? + eval(center + dx)?;
        kron = kron + pair * T::lit(WGK15[j]);
        if j % 2 == 0 {
            gauss = gauss + pair * T::lit(WG7[j / 2]);
        }
    }
    Ok(PanelEstimate {
        kronrod: kron * half,
        gauss: gauss * half,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Tanh-sinh (double exponential) nodes and weights on `[0, 1]` with step `h`.
///
/// Nodes are returned as `(x, 1 − x, w)` so that integrands singular at either
/// end can use the complementary distance without cancellation.
pub fn tanh_sinh_unit(h: f64) -> Vec<(f64, f64, f64)> {
    use std::f64::consts::FRAC_PI_2;
    let mut out = Vec::new();
    let kmax = (4.0 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        // x = (1 + tanh u)/2, 1 − x = (1 − tanh u)/2 = 1/(1 + e^{2u})
        let lo = 1.0 / (1.0 + (2.0 * u).exp());
        let hi = 1.0 / (1.0 + (-2.0 * u).exp());
        let w = h * 0.5 * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if w < 1e-300 || lo == 0.0 || hi == 0.0 {
            continue;
        }
        out.push((hi, lo, w));
    }
    out
}

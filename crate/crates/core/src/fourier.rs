//! Fourier transform of the indicator of the l^p unit ball,
//!
//! ```text
//! χ̂(α, β) = (1/2π) ∬_{B_p} e^{−i(xα + yβ)} dx dy,
//! ```
//!
//! evaluated through the one-dimensional slice formulas
//!
//! ```text
//! χ̂(α, β) = (2/(πβ)) ∫_0^1 cos(αx) sin(βφ_p(x)) dx      (x-slicing)
//!          = (2/(πα)) ∫_0^1 cos(βy) sin(αφ_p(y)) dy      (y-slicing)
//! ```
//!
//! The transform is even in each argument and symmetric under swapping them,
//! so every frequency is first reduced to `0 ≤ α ≤ β`. Independent reference
//! paths live alongside: the closed form at `p = 1`, the disk's Bessel
//! identity at `p = 2`, and brute-force 2-D quadrature.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpgeom::PExponent;
use crate::oscquad::{self, grade_ends, integrate_on_mesh, Phase, QuadConfig};
use crate::scalar::{sin_over, Real};

/// Brute-force evaluation refuses frequencies above this radius.
pub const BRUTE_FORCE_MAX_RADIUS: f64 = 50.0;

/// A frequency carried in both Cartesian and polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frequency<T> {
    pub alpha: T,
    pub beta: T,
    pub r: T,
    pub theta: T,
}

impl<T: Real> Frequency<T> {
    pub fn cartesian(alpha: T, beta: T) -> Self {
        Self {
            alpha,
            beta,
            r: alpha.hypot(beta),
            theta: if alpha == T::zero() && beta == T::zero() {
                T::zero()
            } else {
                beta.atan2(alpha)
            },
        }
    }

    pub fn polar(r: T, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            alpha: r * c,
            beta: r * s,
            r,
            theta,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite()
    }

    /// Canonical representative with `0 ≤ α ≤ β`.
    ///
    /// Frequencies already in canonical form are returned unchanged, so polar
    /// inputs keep their exact `(r, θ)`.
    pub fn reduce_symmetry(self) -> Self {
        let a = self.alpha.abs();
        let b = self.beta.abs();
        if a == self.alpha && b == self.beta && a <= b {
            return self;
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Self::cartesian(lo, hi)
    }
}

/// How a transform value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ReductionX,
    ReductionY,
    ClosedL1,
    ZeroFrequency,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ReductionX => "reduction-x",
            Method::ReductionY => "reduction-y",
            Method::ClosedL1 => "closed-l1",
            Method::ZeroFrequency => "zero-frequency",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformResult<T> {
    pub value: T,
    pub err_estimate: T,
    pub method: Method,
}

/// Breakpoints on `[0, 1]` for `∫ cos(a·x)·g(b·φ_p(x)) dx`.
///
/// A uniform grid in `x` resolves the `a` oscillation; the image under `φ_p`
/// of a uniform grid in `y` resolves the `b` oscillation (the boundary arc is
/// symmetric about the diagonal, so `φ_p` is its own inverse). The phase
/// increment per panel stays bounded even where `φ_p'` blows up.
pub fn slice_mesh<T: Real>(p: PExponent<T>, a: T, b: T, cfg: &QuadConfig) -> Result<Vec<T>> {
    let per_wave = cfg.panels_per_wavelength as f64 / (2.0 * std::f64::consts::PI);
    let na = (a.to_f64_lossy().abs() * per_wave).ceil().max(1.0);
    let nb = (b.to_f64_lossy().abs() * per_wave).ceil().max(1.0);
    if na + nb > cfg.max_panels as f64 {
        return Err(Error::BudgetExceeded {
            partial: f64::NAN,
            err_estimate: f64::INFINITY,
            max_panels: cfg.max_panels,
        });
    }
    let (na, nb) = (na as usize, nb as usize);

    let mut pts: Vec<T> = Vec::with_capacity(na + nb + 2);
    pts.extend((0..=na).map(|i| T::lit(i as f64 / na as f64)));
    pts.extend((1..nb).map(|j| p.phi_unchecked(T::lit(j as f64 / nb as f64))));
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    let min_gap = T::lit(1e-13);
    pts.dedup_by(|x, y| (*x - *y).abs() < min_gap);
    // keep the exact endpoints after dedup
    let last = pts.len() - 1;
    pts[0] = T::zero();
    pts[last] = T::one();
    Ok(grade_ends(pts, cfg.endpoint_inset))
}

/// `(2/π) ∫_0^1 cos(a·x)·sin(b·φ_p(x))/b dx`, i.e. the slice formula with its
/// `1/b` folded into the integrand so that small `b` loses no accuracy.
fn slice_integral<T: Real>(p: PExponent<T>, a: T, b: T, cfg: &QuadConfig) -> Result<(T, T)> {
    cfg.validate()?;
    let mesh = slice_mesh(p, a, b, cfg)?;
    let q = integrate_on_mesh(|x: T| (a * x).cos() * sin_over(b, p.phi_unchecked(x)), &mesh, cfg)?;
    let scale = T::lit(2.0) / T::PI();
    Ok((scale * q.value, scale * q.err_estimate))
}

/// Area of `B_p` as `4 ∫_0^1 φ_p`.
pub fn area<T: Real>(p: PExponent<T>, cfg: &QuadConfig) -> Result<QuadResultPair<T>> {
    let mesh = grade_ends(vec![T::zero(), T::lit(0.5), T::one()], cfg.endpoint_inset);
    let q = integrate_on_mesh(|x: T| p.phi_unchecked(x), &mesh, cfg)?;
    Ok(QuadResultPair {
        value: T::lit(4.0) * q.value,
        err_estimate: T::lit(4.0) * q.err_estimate,
    })
}

/// A value with its propagated error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResultPair<T> {
    pub value: T,
    pub err_estimate: T,
}

fn zero_frequency<T: Real>(p: PExponent<T>, cfg: &QuadConfig) -> Result<TransformResult<T>> {
    let a = area(p, cfg)?;
    let two_pi = T::lit(2.0) * T::PI();
    Ok(TransformResult {
        value: a.value / two_pi,
        err_estimate: a.err_estimate / two_pi,
        method: Method::ZeroFrequency,
    })
}

fn check_frequency<T: Real>(omega: &Frequency<T>) -> Result<()> {
    if omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "frequency",
            value: omega.r.to_f64_lossy(),
        })
    }
}

/// `χ̂_{B_p}(ω)` by x-slicing after symmetry reduction.
pub fn chi_hat_lp<T: Real>(
    p: PExponent<T>,
    omega: Frequency<T>,
    cfg: &QuadConfig,
) -> Result<TransformResult<T>> {
    check_frequency(&omega)?;
    let w = omega.reduce_symmetry();
    if w.beta == T::zero() {
        return zero_frequency(p, cfg);
    }
    let (value, err_estimate) = slice_integral(p, w.alpha, w.beta, cfg)?;
    Ok(TransformResult {
        value,
        err_estimate,
        method: Method::ReductionX,
    })
}

/// `χ̂_{B_p}(ω)` by y-slicing after symmetry reduction; an independent route to [`chi_hat_lp`].
pub fn chi_hat_lp_y<T: Real>(
    p: PExponent<T>,
    omega: Frequency<T>,
    cfg: &QuadConfig,
) -> Result<TransformResult<T>> {
    check_frequency(&omega)?;
    let w = omega.reduce_symmetry();
    if w.beta == T::zero() {
        return zero_frequency(p, cfg);
    }
    let (value, err_estimate) = slice_integral(p, w.beta, w.alpha, cfg)?;
    Ok(TransformResult {
        value,
        err_estimate,
        method: Method::ReductionY,
    })
}

/// The two phases `ψ_p(x; θ) = cos θ·x + sin θ·φ_p(x)` and
/// `ψ̃_p(x; θ) = −cos θ·x + sin θ·φ_p(x)`.
#[derive(Debug, Clone, Copy)]
pub struct LpPhase<T> {
    p: PExponent<T>,
    cos_theta: T,
    sin_theta: T,
    label: &'static str,
}

impl<T: Real> Phase<T> for LpPhase<T> {
    #[inline]
    fn eval(&self, x: T) -> T {
        self.cos_theta * x + self.sin_theta * self.p.phi_unchecked(x)
    }
    #[inline]
    fn d1(&self, x: T) -> T {
        self.cos_theta + self.sin_theta * self.p.phi_d1_unchecked(x)
    }
    #[inline]
    fn d2(&self, x: T) -> T {
        self.sin_theta * self.p.phi_d2_unchecked(x)
    }
    fn label(&self) -> &str {
        self.label
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PhasePair<T> {
    pub psi: LpPhase<T>,
    pub psi_tilde: LpPhase<T>,
    pub p: PExponent<T>,
    pub theta: T,
}

/// Builds `(ψ_p, ψ̃_p)` for `θ ∈ [π/4, π/2]`.
pub fn psi_pair<T: Real>(p: PExponent<T>, theta: T) -> Result<PhasePair<T>> {
    let lo = T::FRAC_PI_4() * (T::one() - T::lit(1e-12));
    let hi = T::FRAC_PI_2() * (T::one() + T::lit(1e-12));
    if !(theta >= lo && theta <= hi) {
        return Err(Error::Domain {
            what: "psi_pair theta",
            value: theta.to_f64_lossy(),
        });
    }
    let (s, c) = theta.sin_cos();
    Ok(PhasePair {
        psi: LpPhase {
            p,
            cos_theta: c,
            sin_theta: s,
            label: "psi",
        },
        psi_tilde: LpPhase {
            p,
            cos_theta: -c,
            sin_theta: s,
            label: "psi_tilde",
        },
        p,
        theta,
    })
}

/// Integrals `∫_0^1 sin(rψ_p)` and `∫_0^1 sin(rψ̃_p)` for the pair at radius `r`.
pub fn split_integrals<T: Real>(
    pair: &PhasePair<T>,
    r: T,
    cfg: &QuadConfig,
) -> Result<(QuadResultPair<T>, QuadResultPair<T>)> {
    cfg.validate()?;
    let (s, c) = pair.theta.sin_cos();
    let mesh = slice_mesh(pair.p, r * c, r * s, cfg)?;
    let run = |ph: &LpPhase<T>| -> Result<QuadResultPair<T>> {
        let q = integrate_on_mesh(|x: T| (r * ph.eval(x)).sin(), &mesh, cfg)?;
        Ok(QuadResultPair {
            value: q.value,
            err_estimate: q.err_estimate,
        })
    };
    Ok((run(&pair.psi)?, run(&pair.psi_tilde)?))
}

/// `χ̂_{B_p}(r, θ) = (1/(πr sin θ)) ∫_0^1 [sin(rψ_p) + sin(rψ̃_p)] dx` for `θ ∈ [π/4, π/2]`.
pub fn chi_hat_polar<T: Real>(
    p: PExponent<T>,
    r: T,
    theta: T,
    cfg: &QuadConfig,
) -> Result<TransformResult<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::Domain {
            what: "chi_hat_polar r",
            value: r.to_f64_lossy(),
        });
    }
    let pair = psi_pair(p, theta)?;
    let (a, b) = split_integrals(&pair, r, cfg)?;
    let pre = (T::PI() * r * theta.sin()).recip();
    Ok(TransformResult {
        value: pre * (a.value + b.value),
        err_estimate: pre * (a.err_estimate + b.err_estimate),
        method: Method::ReductionX,
    })
}

/// Closed form for the diamond `B_1`:
/// `χ̂ = −2(cos β − cos α)/(π(β² − α²))`, evaluated as
/// `(4/π)·[sin(s/2)/s]·[sin(d/2)/d]` with `s = α + β`, `d = β − α`,
/// which is stable on the diagonal and at the origin.
pub fn chi_hat_l1_closed<T: Real>(omega: Frequency<T>) -> T {
    let w = omega.reduce_symmetry();
    let half = T::lit(0.5);
    let s = w.alpha + w.beta;
    let d = w.beta - w.alpha;
    T::lit(4.0) / T::PI() * sin_over(s, half) * sin_over(d, half)
}

/// Upper bound `(2/π)/|ω|` for `|χ̂_{B_1}(ω)|`.
pub fn l1_bound<T: Real>(omega: Frequency<T>) -> T {
    T::lit(2.0) / (T::PI() * omega.r)
}

pub fn chi_hat_l1_result<T: Real>(omega: Frequency<T>) -> TransformResult<T> {
    TransformResult {
        value: chi_hat_l1_closed(omega),
        err_estimate: T::zero(),
        method: Method::ClosedL1,
    }
}

/// `J₁(r) = (1/π) ∫_0^π cos(t − r sin t) dt`.
pub fn bessel_j1<T: Real>(r: T, cfg: &QuadConfig) -> Result<T> {
    let hint = r.abs().to_f64_lossy() + 1.0;
    let q = oscquad::integrate_oscillatory(|t: T| (t - r * t.sin()).cos(), T::zero(), T::PI(), hint, cfg)?;
    Ok(q.value / T::PI())
}

/// Configuration for the Bessel reference path, deliberately distinct from the default.
pub fn bessel_oracle_config() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_panels: 1 << 18,
        endpoint_inset: 1e-3,
        panels_per_wavelength: 6,
    }
}

/// Disk transform `J₁(r)/r`, with the value `1/2` at the origin.
pub fn disk_transform<T: Real>(r: T, cfg: &QuadConfig) -> Result<T> {
    if r == T::zero() {
        return Ok(T::lit(0.5));
    }
    Ok(bessel_j1(r, cfg)? / r)
}

/// Real and imaginary parts of a brute-force 2-D evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteForce {
    pub re: f64,
    pub im: f64,
}

/// Direct tensor-product evaluation of `(1/2π)∬_{B_p} e^{−i(xα+yβ)} dx dy`
/// over the graph description `|y| ≤ φ_p(|x|)`, without any symmetry
/// reduction: tanh-sinh nodes in `x` on each half of `[−1, 1]`, composite
/// Gauss-Legendre in `y`. `grid_n` sets the node count per axis.
pub fn chi_hat_bruteforce(p: PExponent<f64>, omega: Frequency<f64>, grid_n: usize) -> Result<BruteForce> {
    if !(omega.r <= BRUTE_FORCE_MAX_RADIUS) {
        return Err(Error::Domain {
            what: "chi_hat_bruteforce |omega|",
            value: omega.r,
        });
    }
    if grid_n < 32 {
        return Err(Error::Config("brute force grid_n must be at least 32".into()));
    }
    let (alpha, beta) = (omega.alpha, omega.beta);
    let h = 16.0 / grid_n as f64;
    let outer = oscquad::rules::tanh_sinh_unit(h);
    let (gx, gw) = oscquad::rules::gauss_legendre(16);
    let panels = (grid_n / 16).max(1);

    let mut re = 0.0;
    let mut im = 0.0;
    for &(t, one_minus_t, w) in &outer {
        // φ_p(|x|) with the complement available for |x| near 1
        let height = if p.get() == 1.0 {
            one_minus_t
        } else {
            let one_minus_pow = -(p.get() * t.ln()).exp_m1();
            one_minus_pow.max(0.0).powf(1.0 / p.get())
        };
        // inner ∫_{−h}^{h} e^{−iβy} dy by composite Gauss-Legendre
        let (mut ir, mut ii) = (0.0, 0.0);
        let width = 2.0 * height / panels as f64;
        for k in 0..panels {
            let c = -height + (k as f64 + 0.5) * width;
            for (x, wt) in gx.iter().zip(&gw) {
                let y = c + 0.5 * width * x;
                let (s, co) = (beta * y).sin_cos();
                ir += wt * co;
                ii -= wt * s;
            }
        }
        ir *= 0.5 * width;
        ii *= 0.5 * width;
        for x in [t, -t] {
            let (s, co) = (alpha * x).sin_cos();
            // (co − i s)(ir + i ii)
            re += w * (co * ir + s * ii);
            im += w * (co * ii - s * ir);
        }
    }
    let scale = 1.0 / (2.0 * std::f64::consts::PI);
    Ok(BruteForce {
        re: re * scale,
        im: im * scale,
    })
}

//! Geometry of the l^p unit ball boundary in the first quadrant.
//!
//! The boundary arc is the graph `y = φ_p(x) = (1 − x^p)^{1/p}` on `[0, 1]`.
//! Everything here is closed form: the derivatives of `φ_p`, the flattest
//! point `x*` (where `|φ_p''|` is smallest), the factor `m(p)` with
//! `min |φ_p''| = (p − 1)·m(p)`, the frequency direction `θ*` normal to the
//! boundary at `x*`, and the boundary curvature.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Width of the window below `p = 2` where `m(p)` is evaluated in log space.
const M_GUARD: f64 = 1e-8;

/// Which closed-form regime an exponent falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `p = 1`: the diamond, flat faces.
    Linear,
    /// `1 < p < 2`.
    Interior,
    /// `p = 2`: the disk; `x* = 0` and `θ* = π/2` are limit values.
    Circle,
}

/// A validated exponent `p ∈ [1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PExponent<T> {
    p: T,
}

impl<T: Real> PExponent<T> {
    pub fn new(p: T) -> Result<Self> {
        if !p.is_finite() || p < T::one() || p > T::lit(2.0) {
            return Err(Error::InvalidExponent(p.to_f64_lossy()));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn get(self) -> T {
        self.p
    }

    pub fn regime(self) -> Regime {
        if self.p == T::one() {
            Regime::Linear
        } else if self.p == T::lit(2.0) {
            Regime::Circle
        } else {
            Regime::Interior
        }
    }

    /// `true` at `p = 1` and `p = 2`, where limit conventions apply.
    pub fn is_special(self) -> bool {
        self.regime() != Regime::Interior
    }

    /// `1 − x^p`, accurate for `x` close to 1.
    #[inline]
    fn one_minus_pow(self, x: T) -> T {
        if x == T::zero() {
            T::one()
        } else {
            -(self.p * x.ln()).exp_m1()
        }
    }

    /// Unchecked `φ_p(x)` for `x ∈ [0, 1]`; the quadrature hot path.
    #[inline]
    pub(crate) fn phi_unchecked(self, x: T) -> T {
        if self.p == T::one() {
            return T::one() - x;
        }
        if x >= T::one() {
            return T::zero();
        }
        self.one_minus_pow(x).powf(self.p.recip())
    }

    /// `φ_p(x) = (1 − x^p)^{1/p}`.
    pub fn phi(self, x: T) -> Result<T> {
        if !(x >= T::zero() && x <= T::one()) {
            return Err(Error::Domain {
                what: "phi",
                value: x.to_f64_lossy(),
            });
        }
        Ok(self.phi_unchecked(x))
    }

    fn open_unit(what: &'static str, x: T) -> Result<()> {
        if x > T::zero() && x < T::one() {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: x.to_f64_lossy(),
            })
        }
    }

    fn finite(what: &'static str, x: T, v: T) -> Result<T> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what,
                at: x.to_f64_lossy(),
            })
        }
    }

    #[inline]
    pub(crate) fn phi_d1_unchecked(self, x: T) -> T {
        let p = self.p;
        -(x.powf(p - T::one())) * self.one_minus_pow(x).powf(p.recip() - T::one())
    }

    #[inline]
    pub(crate) fn phi_d2_unchecked(self, x: T) -> T {
        let p = self.p;
        if p == T::one() {
            return T::zero();
        }
        -(p - T::one())
            * x.powf(p - T::lit(2.0))
            * self.one_minus_pow(x).powf(p.recip() - T::lit(2.0))
    }

    /// `φ_p'(x) = −x^{p−1}(1 − x^p)^{1/p − 1}` on the open interval.
    pub fn phi_d1(self, x: T) -> Result<T> {
        Self::open_unit("phi_d1", x)?;
        Self::finite("phi_d1", x, self.phi_d1_unchecked(x))
    }

    /// `φ_p''(x) = −(p − 1)x^{p−2}(1 − x^p)^{1/p − 2}` on the open interval.
    pub fn phi_d2(self, x: T) -> Result<T> {
        Self::open_unit("phi_d2", x)?;
        Self::finite("phi_d2", x, self.phi_d2_unchecked(x))
    }

    /// `φ_p'''(x) = −(p − 1)x^{p−3}(1 − x^p)^{1/p − 3}((p + 1)x^p + p − 2)`.
    pub fn phi_d3(self, x: T) -> Result<T> {
        Self::open_unit("phi_d3", x)?;
        let p = self.p;
        if p == T::one() {
            return Ok(T::zero());
        }
        let xp = x.powf(p);
        let v = -(p - T::one())
            * x.powf(p - T::lit(3.0))
            * self.one_minus_pow(x).powf(p.recip() - T::lit(3.0))
            * (xp * (p + T::one()) + p - T::lit(2.0));
        Self::finite("phi_d3", x, v)
    }

    /// Abscissa of the minimum of `|φ_p''|`: `((2 − p)/(p + 1))^{1/p}`, `0` at `p = 2`.
    pub fn x_star(self) -> T {
        let p = self.p;
        ((T::lit(2.0) - p) / (p + T::one())).powf(p.recip())
    }

    /// `m(p) = (2 − p)^{1−2/p}(2p − 1)^{1/p−2}(p + 1)^{1+1/p}`, with `m(2) = 1`.
    pub fn m(self) -> T {
        let p = self.p;
        let two = T::lit(2.0);
        match self.regime() {
            Regime::Linear => T::lit(4.0),
            Regime::Circle => T::one(),
            Regime::Interior if two - p < T::lit(M_GUARD) => {
                // (2 − p)^{1−2/p} is a 0^0 form here
                let log_m = (T::one() - two / p) * (two - p).ln()
                    + (p.recip() - two) * (two * p - T::one()).ln()
                    + (T::one() + p.recip()) * (p + T::one()).ln();
                log_m.exp()
            }
            Regime::Interior => {
                (two - p).powf(T::one() - two / p)
                    * (two * p - T::one()).powf(p.recip() - two)
                    * (p + T::one()).powf(T::one() + p.recip())
            }
        }
    }

    /// `min_{[0,1]} |φ_p''| = (p − 1)·m(p)`.
    pub fn min_abs_phi2(self) -> T {
        (self.p - T::one()) * self.m()
    }

    /// `φ_p'(x*) = −((2 − p)/(2p − 1))^{1 − 1/p}`.
    pub fn phi1_at_x_star(self) -> T {
        let p = self.p;
        -((T::lit(2.0) - p) / (T::lit(2.0) * p - T::one())).powf(T::one() - p.recip())
    }

    /// `θ* = arctan(−1/φ_p'(x*))`; `π/2` at `p = 2` and `π/4` at `p = 1`.
    pub fn theta_star(self) -> T {
        T::one().atan2(-self.phi1_at_x_star())
    }

    /// Curvature of the boundary at `(x, φ_p(x))`, `|φ''|/(1 + φ'²)^{3/2}`.
    pub fn curvature(self, x: T) -> Result<T> {
        Self::open_unit("curvature", x)?;
        let d1 = self.phi_d1_unchecked(x);
        let d2 = self.phi_d2_unchecked(x);
        Self::finite("curvature", x, graph_curvature(d1, d2))
    }

    /// `min κ = (p − 1)·2^{1/p − 1/2}`, attained on the diagonal `x = 2^{−1/p}`.
    pub fn min_curvature(self) -> T {
        let p = self.p;
        (p - T::one()) * T::lit(2.0).powf(p.recip() - T::lit(0.5))
    }

    /// Abscissa of the diagonal boundary point, `2^{−1/p}`.
    pub fn diagonal_x(self) -> T {
        T::lit(2.0).powf(-self.p.recip())
    }

    pub fn profile(self) -> GeomProfile<T> {
        GeomProfile {
            p: self.p,
            x_star: self.x_star(),
            m_p: self.m(),
            phi1_at_xstar: self.phi1_at_x_star(),
            theta_star: self.theta_star(),
            min_abs_phi2: self.min_abs_phi2(),
            min_curvature: self.min_curvature(),
            degenerate: self.regime() == Regime::Circle,
        }
    }
}

/// Curvature of a graph from its first two derivatives; safe for very steep slopes.
#[inline]
pub fn graph_curvature<T: Real>(d1: T, d2: T) -> T {
    let h = T::one().hypot(d1);
    d2.abs() / h / h / h
}

/// Derived quantities of one exponent, mutually consistent by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeomProfile<T> {
    pub p: T,
    pub x_star: T,
    pub m_p: T,
    pub phi1_at_xstar: T,
    pub theta_star: T,
    pub min_abs_phi2: T,
    pub min_curvature: T,
    /// Set at `p = 2`, where `x*` sits on the domain boundary.
    pub degenerate: bool,
}

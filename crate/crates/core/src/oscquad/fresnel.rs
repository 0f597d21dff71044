use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{integrate_oscillatory, QuadConfig};

/// Above this argument the power series is abandoned for quadrature.
pub const FRESNEL_SERIES_LIMIT: f64 = 4.0;

/// `∫_0^m sin(x²) dx` by its Maclaurin series; only used for `m ≤ FRESNEL_SERIES_LIMIT`.
fn series<T: Real>(m: T) -> T {
    // Σ (−1)^k m^{4k+3} / ((2k+1)! (4k+3))
    let m2 = m * m;
    let m4 = m2 * m2;
    let mut term = m * m2; // (−1)^k m^{4k+3}/(2k+1)!
    let mut sum = term / T::lit(3.0);
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = k as f64;
        term = -term * m4 / T::lit((2.0 * kf) * (2.0 * kf + 1.0));
        let add = term / T::lit(4.0 * kf + 3.0);
        sum = sum + add;
        if add.abs() <= T::epsilon() * sum.abs() * T::lit(1e-2) || k > 200 {
            break;
        }
    }
    sum
}

/// `∫_0^m sin(x²) dx` for `m ≥ 0`.
///
/// Power series up to `m = 4`; beyond that the tail `∫_{16}^{m²} sin(u)/(2√u) du`
/// is integrated in the substituted variable, where the oscillation rate is one.
pub fn fresnel_sin<T: Real>(m: T, cfg: &QuadConfig) -> Result<T> {
    if !(m >= T::zero()) || !m.is_finite() {
        return Err(Error::Domain {
            what: "fresnel_sin",
            value: m.to_f64_lossy(),
        });
    }
    let split = T::lit(FRESNEL_SERIES_LIMIT);
    if m <= split {
        return Ok(series(m));
    }
    let head = series(split);
    let tail = integrate_oscillatory(
        |u: T| u.sin() / (T::lit(2.0) * u.sqrt()),
        split * split,
        m * m,
        1.0,
        cfg,
    )?;
    Ok(head + tail.value)
}

/// Symmetric Fresnel sine integral `∫_{−m}^{m} sin(x²) dx`, tending to `√(π/2)`.
pub fn fresnel_symmetric<T: Real>(m: T, cfg: &QuadConfig) -> Result<T> {
    Ok(T::lit(2.0) * fresnel_sin(m, cfg)?)
}

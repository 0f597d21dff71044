//! Scalar abstraction shared by the numeric modules.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the geometry and quadrature code (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sin(k·v)/k`, stable as `k → 0`.
#[inline]
pub fn sin_over<T: Real>(k: T, v: T) -> T {
    let kv = k * v;
    if kv.abs() < T::lit(1e-4) {
        // v·(1 − (kv)²/6 + (kv)⁴/120)
        let s = kv * kv;
        v * (T::one() - s / T::lit(6.0) * (T::one() - s / T::lit(20.0)))
    } else {
        kv.sin() / k
    }
}

//! Fourier transforms of indicator functions of l^p unit balls in the plane,
//! evaluated through one-dimensional oscillatory integrals, together with
//! tools to measure their `|ω|^{3/2}` decay envelope.
//!
//! The numeric core ([`lpgeom`], [`oscquad`], [`fourier`]) is generic over the
//! scalar type; the experiment drivers ([`decay`], [`convex_probe`]) work in `f64`.

pub mod convex_probe;
pub mod decay;
pub mod error;
pub mod fourier;
pub mod lpgeom;
pub mod oscquad;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PExponent = lpgeom::PExponent<f64>;
pub type PExponent32 = lpgeom::PExponent<f32>;
pub type GeomProfile = lpgeom::GeomProfile<f64>;
pub type QuadResult = oscquad::QuadResult<f64>;
pub use oscquad::QuadConfig;
pub type Frequency = fourier::Frequency<f64>;
pub type TransformResult = fourier::TransformResult<f64>;

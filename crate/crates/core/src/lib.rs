//! Carathéodory–Pesin topological pressure on subshifts of finite type and on
//! the one-point compactification of the doubling map of the line, with exact
//! transfer-matrix oracles, equilibrium states and multifractal spectra.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below fix the scalar.

mod error;
mod scalar;

pub mod compactify;
pub mod multifractal;
pub mod pressure;
pub mod symbolic;
pub mod thermo;
pub mod util;

pub use error::{Error, Result};
pub use scalar::Real;

use serde::Serialize;

pub type PotentialF64 = symbolic::Potential<f64>;
pub type PotentialF32 = symbolic::Potential<f32>;
pub type PressureEstimateF64 = pressure::PressureEstimate<f64>;
pub type PressureEstimateF32 = pressure::PressureEstimate<f32>;
pub type CoverStringF64 = pressure::CoverString<f64>;
pub type EquilibriumStateF64 = thermo::EquilibriumState<f64>;
pub type EquilibriumStateF32 = thermo::EquilibriumState<f32>;
pub type MarkovMeasureF64 = thermo::MarkovMeasure<f64>;
pub type TQCurveF64 = multifractal::TQCurve<f64>;
pub type TQCurveF32 = multifractal::TQCurve<f32>;
pub type RadialPotentialF64 = compactify::RadialPotential<f64>;
pub type GapCertificateF64 = compactify::GapCertificate<f64>;

/// A named numeric check: `value` compared against `bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check<S> {
    pub name: String,
    pub value: S,
    pub bound: S,
    pub passed: bool,
}

impl<S: Real> Check<S> {
    /// Passes when `|value| <= bound`.
    pub fn within(name: impl Into<String>, value: S, bound: S) -> Self {
        Self { name: name.into(), value, bound, passed: value.abs() <= bound }
    }
}

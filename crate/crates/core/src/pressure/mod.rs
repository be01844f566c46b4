//! Carathéodory–Pesin weights and the pressures extracted from them.

mod cover;
mod engine;
mod shift;

pub use cover::{Cover, CoverString};
pub use engine::{
    capacity_on, critical_alpha_on, CpStructure, NRow, PressureEstimate, PressureMode,
    PressureSettings, WeightM,
};
pub use shift::{
    capacity_pressures, critical_alpha, lambda_n, log_lambda_n, pressure_refined, weight_m,
    DepthRow, RefinedPressure, ShiftModel,
};

//! Transfer-matrix oracles, equilibrium states and variational-principle checks.

mod measure;
mod recode;
mod transfer;
mod vp;

pub use measure::{equilibrium_markov, EquilibriumState, MarkovMeasure};
pub use recode::{block_recode, power_system, Recoded};
pub use transfer::{power_iteration, transfer_pressure, Perron, TransferMatrix};
pub use vp::{inverse_vp_probe, power_pressure_check, vp_residual, InverseVpProbe};

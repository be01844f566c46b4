//! The doubling map of the line and its one-point compactification, admissible
//! covers, Lebesgue numbers, and pressure transfer to the compactification.

mod cells;
mod cover;
mod gap;
mod metric;
mod model;

pub use cells::{CircleModel, CircleSubset};
pub use cover::{ArcCover, ArcElement, CoverKind};
pub use gap::{
    circle_pressure, compactification_transfer_check, gap_example, invariant_measures,
    push_forward_check, zero_potential_entropy, CircleBudget, ErgodicMeasure, GapCertificate,
    MeasureInventory, PushForwardReport, TransferCheck,
};
pub use metric::{lebesgue_number, CoverElement, FiniteMetricModel};
pub use model::{ExtPoint, LineDoublingModel, RadialPotential};

//! Multifractal analysis of equilibrium states: `T(q)`, the entropy spectrum,
//! Legendre duality and correlation entropies.

mod correlation;
mod curve;

pub use correlation::{
    correlation_entropy, local_entropy_check, local_entropy_check_measure, log_renyi_sum,
    CorrelationEntropyCurve, EntropyTolerance, LocalEntropyReport,
};
pub use curve::{central_difference_check, legendre_check, q_grid, t_curve, LegendreReport, TQCurve};

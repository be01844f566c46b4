use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pressure::{capacity_on, critical_alpha_on, PressureEstimate, PressureSettings};
use crate::Real;

use super::cells::{CircleModel, CircleSubset};
use super::cover::{ArcCover, CoverKind};
use super::model::{ExtPoint, LineDoublingModel, RadialPotential};

/// An ergodic invariant measure of the model: a point mass on a fixed point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicMeasure<S> {
    pub label: String,
    /// `None` for the point at infinity.
    pub support: Option<S>,
    pub entropy: S,
    pub integral: S,
}

/// Ergodic invariant probability measures; every invariant measure is a convex combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureInventory<S> {
    pub on_compactification: bool,
    pub ergodic: Vec<ErgodicMeasure<S>>,
}

impl<S: Real> MeasureInventory<S> {
    /// `sup (h_mu + integral phi d mu)`, attained at an ergodic member.
    pub fn sup_free_energy(&self) -> S {
        self.ergodic.iter().map(|m| m.entropy + m.integral).fold(S::neg_infinity(), S::max)
    }
}

/// Invariant measures of `x -> 2x`.
///
/// On the line only `delta_0` is invariant: if `mu` is invariant then
/// `mu(A) = mu(2^-k A)` for every `k`, and for `A = [-L, L] \ [-L/2, L/2]`
/// the sets `2^-k A` are disjoint, so each has measure zero, whence
/// `mu(R \ {0}) = 0`. On the compactification the same argument applied at
/// both poles leaves `delta_0` and `delta_inf`.
pub fn invariant_measures<S: Real>(potential: &RadialPotential<S>, on_compactification: bool) -> MeasureInventory<S> {
    let mut ergodic = vec![ErgodicMeasure {
        label: "delta_0".into(),
        support: Some(S::zero()),
        entropy: S::zero(),
        integral: potential.value(ExtPoint::Finite(S::zero())),
    }];
    if on_compactification {
        ergodic.push(ErgodicMeasure {
            label: "delta_inf".into(),
            support: None,
            entropy: S::zero(),
            integral: potential.value(ExtPoint::Infinity),
        });
    }
    MeasureInventory { on_compactification, ergodic }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PushForwardReport<S> {
    /// Largest mass left in `[-L, L] \ {0}` after the pushes, over all trials.
    pub residual_mass: S,
    /// Total variation between `delta_0` and its push-forward.
    pub delta0_defect: S,
}

/// Pushes random atomic probability measures forward under the doubling map
/// and records how much mass stays in a compact window away from `0`.
pub fn push_forward_check<S: Real, R: Rng + ?Sized>(
    rng: &mut R,
    trials: usize,
    atoms: usize,
    steps: usize,
    window: S,
) -> PushForwardReport<S> {
    let model = LineDoublingModel;
    let mut residual = S::zero();
    for _ in 0..trials {
        let mut xs: Vec<(S, S)> = (0..atoms)
            .map(|_| (S::lit(rng.gen_range(-1.0..1.0)) * window, S::lit(rng.gen::<f64>())))
            .collect();
        let total: S = xs.iter().map(|a| a.1).sum();
        for _ in 0..steps {
            for a in &mut xs {
                if let ExtPoint::Finite(y) = model.map(ExtPoint::Finite(a.0)) {
                    a.0 = y;
                }
            }
        }
        let left: S = xs
            .iter()
            .filter(|a| a.0 != S::zero() && a.0.abs() <= window)
            .map(|a| a.1)
            .sum();
        residual = residual.max(left / total);
    }
    let delta0_defect = match model.map(ExtPoint::Finite(S::zero())) {
        ExtPoint::Finite(y) if y == S::zero() => S::zero(),
        _ => S::one(),
    };
    PushForwardReport { residual_mass: residual, delta0_defect }
}

/// Arc count, string lengths and bisection tolerance for cover estimates on the circle model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleBudget<S> {
    pub arcs: usize,
    pub n_max: usize,
    pub headroom: usize,
    pub tol: S,
}

impl<S: Real> Default for CircleBudget<S> {
    fn default() -> Self {
        Self { arcs: 64, n_max: 40, headroom: 8, tol: S::lit(1e-6) }
    }
}

impl<S: Real> CircleBudget<S> {
    fn settings(&self) -> PressureSettings<S> {
        PressureSettings { n_max: self.n_max, headroom: self.headroom, tol: self.tol, ..PressureSettings::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.n_max < 8 {
            return Err(Error::InvalidBudget(format!("n_max = {} < 8", self.n_max)));
        }
        if !(self.tol > S::zero()) {
            return Err(Error::InvalidBudget("tol must be positive".into()));
        }
        Ok(())
    }
}

/// Cover-based pressure of `subset` on the circle model.
pub fn circle_pressure<S: Real>(
    kind: CoverKind,
    potential: &RadialPotential<S>,
    subset: CircleSubset,
    budget: &CircleBudget<S>,
) -> Result<PressureEstimate<S>> {
    budget.validate()?;
    let cover = ArcCover::new(kind, budget.arcs)?;
    let model = CircleModel::new(&cover, potential, subset, budget.n_max + budget.headroom)?;
    critical_alpha_on(&model, &budget.settings())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferCheck<S> {
    /// Estimate with admissible covers of the line.
    pub line: PressureEstimate<S>,
    /// Estimate with arc covers of the circle.
    pub circle: PressureEstimate<S>,
    /// `max` of the potential at the two fixed points.
    pub oracle: S,
}

impl<S: Real> TransferCheck<S> {
    pub fn difference(&self) -> S {
        (self.line.value - self.circle.value).abs()
    }
}

/// Pressure of `subset` from line covers and from circle covers.
pub fn compactification_transfer_check<S: Real>(
    potential: &RadialPotential<S>,
    subset: CircleSubset,
    budget: &CircleBudget<S>,
) -> Result<TransferCheck<S>> {
    if subset == CircleSubset::PoleInf {
        return Err(Error::InvalidArgument("the point at infinity is not in the line".into()));
    }
    let line = circle_pressure(CoverKind::Line, potential, subset, budget)?;
    let circle = circle_pressure(CoverKind::Circle, potential, subset, budget)?;
    let oracle = match subset {
        CircleSubset::Pole0 => potential.at_zero(),
        _ => potential.at_zero().max(potential.at_infinity()),
    };
    Ok(TransferCheck { line, circle, oracle })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate<S> {
    /// `max` over the ergodic inventory of the compactification: `pi`.
    pub pressure_compactified: S,
    /// `sup` of `h_mu + integral phi d mu` over invariant measures on the line: `pi/2`.
    pub sup_over_m_x_f: S,
    pub gap: S,
    pub inventory_line: MeasureInventory<S>,
    pub inventory_compactified: MeasureInventory<S>,
    /// Cover-based pressure of the arccot potential on the circle.
    pub estimated_pressure: S,
    /// Upper capacity entropy estimate of the compactified map.
    pub estimated_entropy: S,
    pub estimator_tolerance: S,
}

impl<S: Real> GapCertificate<S> {
    pub fn holds(&self) -> bool {
        self.gap > S::zero()
            && self.pressure_compactified >= self.sup_over_m_x_f
            && (self.estimated_pressure - self.pressure_compactified).abs() <= self.estimator_tolerance
            && self.estimated_entropy.abs() <= self.estimator_tolerance
    }
}

/// The strict gap between the pressure of the arccot potential and the
/// supremum of free energies over invariant measures of the line.
pub fn gap_example<S: Real>(budget: &CircleBudget<S>) -> Result<GapCertificate<S>> {
    let phi = RadialPotential::arccot();
    let inventory_line = invariant_measures(&phi, false);
    let inventory_compactified = invariant_measures(&phi, true);
    let pressure_compactified = inventory_compactified.sup_free_energy();
    let sup_over_m_x_f = inventory_line.sup_free_energy();
    let estimated_pressure = circle_pressure(CoverKind::Circle, &phi, CircleSubset::Whole, budget)?.value;
    let estimated_entropy = zero_potential_entropy(budget.arcs, 256)?;
    Ok(GapCertificate {
        pressure_compactified,
        sup_over_m_x_f,
        gap: pressure_compactified - sup_over_m_x_f,
        inventory_line,
        inventory_compactified,
        estimated_pressure,
        estimated_entropy,
        estimator_tolerance: S::lit(1e-2),
    })
}

/// Upper capacity entropy of the compactified map: the number of level-`N`
/// cells grows linearly, so increments of `log Lambda_N` decay like `1/N`.
pub fn zero_potential_entropy<S: Real>(arcs: usize, n_max: usize) -> Result<S> {
    let cover = ArcCover::new(CoverKind::Circle, arcs)?;
    let zero = RadialPotential::constant(S::zero());
    let model = CircleModel::new(&cover, &zero, CircleSubset::Whole, n_max)?;
    Ok(capacity_on(&model, n_max)?.1.value)
}

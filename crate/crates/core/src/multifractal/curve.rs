use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolic::{Potential, ShiftSystem};
use crate::thermo::{equilibrium_markov, transfer_pressure};
use crate::{Check, Real};

/// `T(q) = P(q phi) - q P(phi)`, `alpha(q) = -T'(q)` and `E(alpha(q)) = T(q) + q alpha(q)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TQCurve<S> {
    pub q_grid: Vec<S>,
    pub t_values: Vec<S>,
    pub alpha_values: Vec<S>,
    pub spectrum_values: Vec<S>,
    /// `P_X(phi)`.
    pub pressure: S,
    /// Topological entropy `h(f)`.
    pub entropy: S,
}

pub(crate) fn check_grid<S: Real>(q_grid: &[S]) -> Result<()> {
    if q_grid.is_empty() {
        return Err(Error::InvalidArgument("empty q grid".into()));
    }
    if q_grid.iter().any(|q| !q.is_finite()) || q_grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidArgument("q grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Evenly spaced grid `lo, lo + step, ..., hi`.
pub fn q_grid<S: Real>(lo: S, hi: S, step: S) -> Vec<S> {
    let count = ((hi - lo) / step).round().to_usize().unwrap_or(0);
    (0..=count).map(|i| lo + step * S::count(i)).collect()
}

/// One grid point: `(T(q), alpha(q))` from the equilibrium state of `q phi`.
fn point<S: Real>(system: &ShiftSystem, potential: &Potential<S>, pressure: S, q: S) -> Result<(S, S)> {
    let eq = equilibrium_markov(system, &potential.scaled(q))?;
    let integral = eq.measure.integral(system, potential);
    Ok((eq.log_lambda - q * pressure, pressure - integral))
}

pub fn t_curve<S: Real>(system: &ShiftSystem, potential: &Potential<S>, q_grid: &[S]) -> Result<TQCurve<S>> {
    check_grid(q_grid)?;
    let pressure = transfer_pressure(system, potential)?;
    let entropy = transfer_pressure(system, &Potential::zero(system))?;
    let mut t_values = Vec::with_capacity(q_grid.len());
    let mut alpha_values = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let (t, a) = point(system, potential, pressure, q)?;
        t_values.push(t);
        alpha_values.push(a);
    }
    let spectrum_values = q_grid
        .iter()
        .zip(t_values.iter().zip(&alpha_values))
        .map(|(&q, (&t, &a))| t + q * a)
        .collect();
    Ok(TQCurve { q_grid: q_grid.to_vec(), t_values, alpha_values, spectrum_values, pressure, entropy })
}

impl<S: Real> TQCurve<S> {
    /// `(alpha(q), E(alpha(q)))` pairs.
    pub fn spectrum(&self) -> Vec<(S, S)> {
        self.alpha_values.iter().copied().zip(self.spectrum_values.iter().copied()).collect()
    }

    fn value_at(&self, values: &[S], q: S) -> Option<S> {
        self.q_grid.iter().position(|&x| x == q).map(|i| values[i])
    }

    pub fn t_at(&self, q: S) -> Option<S> {
        self.value_at(&self.t_values, q)
    }

    pub fn alpha_at(&self, q: S) -> Option<S> {
        self.value_at(&self.alpha_values, q)
    }

    pub fn alpha_range(&self) -> S {
        let lo = self.alpha_values.iter().copied().fold(S::infinity(), S::min);
        let hi = self.alpha_values.iter().copied().fold(S::neg_infinity(), S::max);
        hi - lo
    }

    pub fn resolution(&self) -> S {
        self.q_grid.windows(2).map(|p| p[1] - p[0]).fold(S::zero(), S::max)
    }

    /// `T(0) = h(f)`, `T(1) = 0`, convexity and monotonicity of `alpha`, each to `tol`.
    pub fn invariant_checks(&self, tol: S) -> Vec<Check<S>> {
        let mut out = Vec::new();
        if let Some(t0) = self.t_at(S::zero()) {
            out.push(Check::within("T(0) = h", t0 - self.entropy, tol));
        }
        if let Some(t1) = self.t_at(S::one()) {
            out.push(Check::within("T(1) = 0", t1, tol));
        }
        // slopes of consecutive chords must not decrease
        let chords: Vec<S> = (1..self.q_grid.len())
            .map(|i| (self.t_values[i] - self.t_values[i - 1]) / (self.q_grid[i] - self.q_grid[i - 1]))
            .collect();
        let worst = chords.windows(2).map(|c| c[1] - c[0]).fold(S::zero(), S::min);
        out.push(Check::within("T convex", worst.min(S::zero()), tol));
        let rise = self.alpha_values.windows(2).map(|a| a[1] - a[0]).fold(S::zero(), S::max);
        out.push(Check::within("alpha nonincreasing", rise, tol));
        out
    }
}

/// Largest gap between `alpha(q)` and the central difference `-(T(q+h) - T(q-h)) / 2h`.
pub fn central_difference_check<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    qs: &[S],
    step: S,
) -> Result<S> {
    let pressure = transfer_pressure(system, potential)?;
    let mut worst = S::zero();
    for &q in qs {
        let (_, alpha) = point(system, potential, pressure, q)?;
        let (tp, _) = point(system, potential, pressure, q + step)?;
        let (tm, _) = point(system, potential, pressure, q - step)?;
        let fd = -(tp - tm) / (S::lit(2.0) * step);
        worst = worst.max((alpha - fd).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendreReport<S> {
    /// `max |E(alpha(q*)) - min_q (T(q) + q alpha(q*))|`.
    pub forward_defect: S,
    /// `max |T(q) - max_{q'} (E(alpha(q')) - q alpha(q'))|`.
    pub reverse_defect: S,
    /// Set when the spectrum is degenerate and the duality is not tested.
    pub skipped: bool,
}

impl<S: Real> LegendreReport<S> {
    pub fn max_defect(&self) -> S {
        self.forward_defect.max(self.reverse_defect)
    }
}

pub fn legendre_check<S: Real>(curve: &TQCurve<S>) -> LegendreReport<S> {
    if curve.q_grid.len() < 3 || curve.alpha_range() <= S::lit(10.0) * curve.resolution() {
        return LegendreReport { forward_defect: S::zero(), reverse_defect: S::zero(), skipped: true };
    }
    let qs = &curve.q_grid;
    let ts = &curve.t_values;
    let mut forward = S::zero();
    for (&a, &e) in curve.alpha_values.iter().zip(&curve.spectrum_values) {
        let inf = qs.iter().zip(ts).map(|(&q, &t)| t + q * a).fold(S::infinity(), S::min);
        forward = forward.max((e - inf).abs());
    }
    let mut reverse = S::zero();
    for (&q, &t) in qs.iter().zip(ts) {
        let sup = curve
            .alpha_values
            .iter()
            .zip(&curve.spectrum_values)
            .map(|(&a, &e)| e - q * a)
            .fold(S::neg_infinity(), S::max);
        reverse = reverse.max((t - sup).abs());
    }
    LegendreReport { forward_defect: forward, reverse_defect: reverse, skipped: false }
}

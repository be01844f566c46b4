//! Critical-exponent search and capacity estimates over any C-P structure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::ls_slope;
use crate::Real;

/// A Carathéodory–Pesin structure built from a fixed cover, exposing the
/// two weight families the pressures are extracted from.
pub trait CpStructure<S: Real> {
    /// `log M(Z, alpha, N)`, the infimum over covering string collections of
    /// lengths in `N..=depth_cap`.
    fn log_weight_m(&self, alpha: S, n: usize, depth_cap: usize) -> Result<WeightM<S>>;

    /// `log Lambda(Z, N)`, the infimum over covers by strings of length exactly `N`.
    fn log_lambda(&self, n: usize) -> Result<S>;

    /// An interval guaranteed to contain the critical exponent.
    fn alpha_bracket(&self) -> (S, S);

    fn is_empty_set(&self) -> bool;

    /// Depth (or refinement index) of the underlying cover, for diagnostics.
    fn cover_depth(&self) -> usize;
}

/// Value of the `M` weight at a given `alpha` and `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightM<S> {
    pub log_value: S,
    pub n: usize,
    pub depth_cap: usize,
    /// The recursion reached a fixed point before the cap, so the value is
    /// the exact infimum and not only an upper bound.
    pub stabilized: bool,
}

impl<S: Real> WeightM<S> {
    pub fn value(&self) -> S {
        self.log_value.exp()
    }

    /// The depth cap was hit with the recursion still improving.
    pub fn inconclusive_at_depth(&self) -> bool {
        !self.stabilized
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMode {
    P,
    CpLower,
    CpUpper,
}

/// One row of per-`N` diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NRow<S> {
    pub n: usize,
    pub log_weight: S,
    /// Local increment `log W_N - log W_{N-1}` (for the first row, `log W_N / N`).
    pub slope: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureEstimate<S> {
    pub value: S,
    pub mode: PressureMode,
    pub cover_depth: usize,
    pub n_range: (usize, usize),
    pub bracket: Option<(S, S)>,
    pub diagnostics: Vec<NRow<S>>,
    /// Least-squares slope of `log W_N` over the window.
    pub slope_estimate: Option<S>,
    /// Classification threshold on the slope used by the bisection.
    pub threshold: Option<S>,
    /// Set when `Z` is empty and the value is `-inf`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureSettings<S> {
    pub n_max: usize,
    /// Extra string length allowed below each root, `D = N + headroom`.
    pub headroom: usize,
    pub tol: S,
    /// Slope threshold as a multiple of `tol`.
    pub threshold_factor: S,
    pub max_bisection: usize,
}

impl<S: Real> Default for PressureSettings<S> {
    fn default() -> Self {
        Self {
            n_max: 24,
            headroom: 8,
            tol: S::lit(1e-6),
            threshold_factor: S::lit(1e-3),
            max_bisection: 200,
        }
    }
}

impl<S: Real> PressureSettings<S> {
    pub fn with_tol(mut self, tol: S) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn window(&self) -> (usize, usize) {
        ((self.n_max / 2).max(1), self.n_max)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > S::zero()) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if self.n_max < 4 {
            return Err(Error::InvalidArgument("n_max must be at least 4".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Growth {
    Below,
    Above,
    Critical,
}

struct Classified<S> {
    growth: Growth,
    slope: S,
    rows: Vec<NRow<S>>,
}

fn classify<S: Real, C: CpStructure<S> + ?Sized>(
    model: &C,
    alpha: S,
    settings: &PressureSettings<S>,
) -> Result<Classified<S>> {
    let (lo, hi) = settings.window();
    let mut ns = Vec::new();
    let mut logs = Vec::new();
    for n in lo..=hi {
        let w = model.log_weight_m(alpha, n, n + settings.headroom)?;
        if !w.log_value.is_finite() {
            return Err(Error::Inconclusive(format!(
                "log M is not finite at alpha = {alpha}, N = {n}"
            )));
        }
        ns.push(S::count(n));
        logs.push(w.log_value);
    }
    let slope = ls_slope(&ns, &logs);
    let thr = settings.threshold_factor * settings.tol;
    let growth = if slope > thr {
        Growth::Below
    } else if slope < -thr {
        Growth::Above
    } else {
        Growth::Critical
    };
    Ok(Classified { growth, slope, rows: rows_from((lo..=hi).collect(), &logs) })
}

fn rows_from<S: Real>(ns: Vec<usize>, logs: &[S]) -> Vec<NRow<S>> {
    ns.iter()
        .enumerate()
        .map(|(i, &n)| NRow {
            n,
            log_weight: logs[i],
            slope: if i == 0 { logs[0] / S::count(n) } else { logs[i] - logs[i - 1] },
        })
        .collect()
}

fn degenerate<S: Real>(mode: PressureMode, depth: usize, n_range: (usize, usize)) -> PressureEstimate<S> {
    PressureEstimate {
        value: S::neg_infinity(),
        mode,
        cover_depth: depth,
        n_range,
        bracket: None,
        diagnostics: Vec::new(),
        slope_estimate: None,
        threshold: None,
        degenerate: true,
    }
}

/// `P_Z(phi, U) = inf{alpha : m(Z, alpha) = 0}` by bisection on the growth of `log M` in `N`.
pub fn critical_alpha_on<S: Real, C: CpStructure<S> + ?Sized>(
    model: &C,
    settings: &PressureSettings<S>,
) -> Result<PressureEstimate<S>> {
    settings.validate()?;
    let window = settings.window();
    if model.is_empty_set() {
        return Ok(degenerate(PressureMode::P, model.cover_depth(), window));
    }
    let (mut lo, mut hi) = model.alpha_bracket();
    let thr = settings.threshold_factor * settings.tol;

    let mut grow = 0;
    while classify(model, lo, settings)?.growth == Growth::Above {
        grow += 1;
        if grow > 8 {
            return Err(Error::Inconclusive(format!(
                "lower bracket end {lo} still classified above critical"
            )));
        }
        lo = lo - (hi - lo);
    }
    grow = 0;
    while classify(model, hi, settings)?.growth == Growth::Below {
        grow += 1;
        if grow > 8 {
            return Err(Error::Inconclusive(format!(
                "upper bracket end {hi} still classified below critical"
            )));
        }
        hi = hi + (hi - lo);
    }

    let two = S::lit(2.0);
    let mut iterations = 0;
    while hi - lo > settings.tol {
        iterations += 1;
        if iterations > settings.max_bisection {
            return Err(Error::Inconclusive("bisection budget exhausted".into()));
        }
        let mid = (lo + hi) / two;
        let c = classify(model, mid, settings)?;
        match c.growth {
            Growth::Below => lo = mid,
            Growth::Above => hi = mid,
            Growth::Critical => {
                let half = settings.tol / two;
                lo = lo.max(mid - half);
                hi = hi.min(mid + half);
                break;
            }
        }
    }
    let value = (lo + hi) / two;
    let last = classify(model, value, settings)?;
    Ok(PressureEstimate {
        value,
        mode: PressureMode::P,
        cover_depth: model.cover_depth(),
        n_range: window,
        bracket: Some((lo, hi)),
        diagnostics: last.rows,
        slope_estimate: Some(last.slope),
        threshold: Some(thr),
        degenerate: false,
    })
}

/// Lower and upper capacity pressures from `log Lambda_N`.
///
/// The limit inferior and superior of `(1/N) log Lambda_N` are bracketed by
/// the extremes of the increments `log Lambda_N - log Lambda_{N-1}` over the
/// window `[n_max/2, n_max]`; those are what is reported. The least-squares
/// slope of `log Lambda_N` over the same window is kept in `slope_estimate`.
pub fn capacity_on<S: Real, C: CpStructure<S> + ?Sized>(
    model: &C,
    n_max: usize,
) -> Result<(PressureEstimate<S>, PressureEstimate<S>)> {
    if n_max < 8 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} < 8")));
    }
    let window = (n_max / 2, n_max);
    let mut logs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        logs.push(model.log_lambda(n)?);
    }
    if logs.iter().all(|l| *l == S::neg_infinity()) {
        return Ok((
            degenerate(PressureMode::CpLower, model.cover_depth(), window),
            degenerate(PressureMode::CpUpper, model.cover_depth(), window),
        ));
    }
    let rows = rows_from((1..=n_max).collect(), &logs);
    let incs: Vec<S> = (window.0..=window.1).map(|n| logs[n - 1] - logs[n - 2]).collect();
    let lower = incs.iter().copied().fold(S::infinity(), S::min);
    let upper = incs.iter().copied().fold(S::neg_infinity(), S::max);
    let ns: Vec<S> = (window.0..=window.1).map(S::count).collect();
    let slope = ls_slope(&ns, &logs[window.0 - 1..window.1]);
    let make = |value, mode| PressureEstimate {
        value,
        mode,
        cover_depth: model.cover_depth(),
        n_range: window,
        bracket: Some((lower, upper)),
        diagnostics: rows.clone(),
        slope_estimate: Some(slope),
        threshold: None,
        degenerate: false,
    };
    Ok((make(lower, PressureMode::CpLower), make(upper, PressureMode::CpUpper)))
}

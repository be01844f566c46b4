use crate::error::{Error, Result};
use crate::symbolic::{strongly_connected, Potential, ShiftSystem};
use crate::Real;

use super::recode::block_recode;

const MAX_ITERATIONS: usize = 100_000;
const STREAK: usize = 10;

/// Nonnegative square matrix stored as `exp(log_scale) * entries`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix<S> {
    dim: usize,
    entries: Vec<S>,
    log_scale: S,
}

impl<S: Real> TransferMatrix<S> {
    pub fn new(rows: &[Vec<S>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("transfer matrix must be square and nonempty".into()));
        }
        if rows.iter().flatten().any(|&x| !(x >= S::zero()) || !x.is_finite()) {
            return Err(Error::InvalidArgument("entries must be finite and nonnegative".into()));
        }
        Ok(Self { dim, entries: rows.concat(), log_scale: S::zero() })
    }

    /// `M_ab = A_ab exp(phi(a))` for a depth-1 potential; deeper potentials are
    /// recoded to blocks first.
    pub fn from_system(system: &ShiftSystem, potential: &Potential<S>) -> Result<Self> {
        let rec = block_recode(system, potential)?;
        let k = rec.system.alphabet_size();
        let values = rec.potential.table();
        let top = values.iter().copied().fold(S::neg_infinity(), S::max);
        let mut entries = vec![S::zero(); k * k];
        for a in 0..k {
            let w = (values[a] - top).exp();
            for b in rec.system.successors(a) {
                entries[a * k + b] = w;
            }
        }
        Ok(Self { dim: k, entries, log_scale: top })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(a, b)` including the scale factor.
    pub fn get(&self, a: usize, b: usize) -> S {
        self.entries[a * self.dim + b] * self.log_scale.exp()
    }

    pub fn log_scale(&self) -> S {
        self.log_scale
    }

    pub fn is_irreducible(&self) -> bool {
        strongly_connected(self.dim, |a, b| self.entries[a * self.dim + b] > S::zero())
    }

    /// Entry `(a, b)` without the scale factor.
    pub(crate) fn scaled(&self, a: usize, b: usize) -> S {
        self.entries[a * self.dim + b]
    }
}

/// Perron eigenvalue with positive right and left eigenvectors, `u . v = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perron<S> {
    pub lambda: S,
    /// `log lambda`, accurate even when `lambda` itself would overflow.
    pub log_lambda: S,
    pub right: Vec<S>,
    pub left: Vec<S>,
    pub iterations: usize,
}

pub fn power_iteration<S: Real>(matrix: &TransferMatrix<S>, tol: S) -> Result<Perron<S>> {
    if !(tol > S::zero()) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if !matrix.is_irreducible() {
        return Err(Error::NoUniquePerron);
    }
    let n = matrix.dim;
    let (mu, right, it_r) = dominant(n, tol, |a, b| matrix.scaled(a, b))?;
    let (_, mut left, it_l) = dominant(n, tol, |a, b| matrix.scaled(b, a))?;
    let dot: S = left.iter().zip(&right).map(|(&u, &v)| u * v).sum();
    for u in &mut left {
        *u = *u / dot;
    }
    let log_lambda = mu.ln() + matrix.log_scale;
    Ok(Perron { lambda: log_lambda.exp(), log_lambda, right, left, iterations: it_r.max(it_l) })
}

/// Power iteration on `M + cI` (`c` the largest entry), which is primitive
/// whenever `M` is irreducible. Returns the eigenvalue of `M` and a positive
/// vector with unit sum.
fn dominant<S: Real>(n: usize, tol: S, m: impl Fn(usize, usize) -> S) -> Result<(S, Vec<S>, usize)> {
    let rows: Vec<Vec<(usize, S)>> = (0..n)
        .map(|a| (0..n).map(|b| (b, m(a, b))).filter(|&(_, x)| x != S::zero()).collect())
        .collect();
    let shift = rows.iter().flatten().map(|&(_, x)| x).fold(S::zero(), S::max);
    // floating-point error of one product, relative to the largest row sum
    let roundoff = S::lit(4.0) * S::count(n) * S::epsilon();
    let row_max = rows.iter().map(|r| r.iter().map(|&(_, x)| x).sum::<S>()).fold(S::zero(), S::max);
    let apply = |v: &[S]| -> Vec<S> { rows.iter().map(|r| r.iter().map(|&(b, x)| x * v[b]).sum::<S>()).collect() };
    let mut v = vec![S::one() / S::count(n); n];
    let mut mu = S::zero();
    let mut streak = 0;
    for it in 1..=MAX_ITERATIONS {
        let mv = apply(&v);
        let w: Vec<S> = mv.iter().zip(&v).map(|(&x, &y)| x + shift * y).collect();
        let norm: S = w.iter().copied().sum();
        let next_mu = norm - shift;
        v = w.into_iter().map(|x| x / norm).collect();
        if (next_mu - mu).abs() <= (tol + roundoff) * next_mu.abs() {
            streak += 1;
        } else {
            streak = 0;
        }
        mu = next_mu;
        if streak >= STREAK {
            let mv = apply(&v);
            let residual = mv.iter().zip(&v).map(|(&x, &y)| (x - mu * y).abs()).fold(S::zero(), S::max);
            let vmax = v.iter().copied().fold(S::zero(), S::max);
            if residual <= (tol * mu + roundoff * row_max) * vmax {
                return Ok((mu, v, it));
            }
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
}

/// `P_X(phi)` as the log of the Perron eigenvalue of the weighted transfer matrix.
pub fn transfer_pressure<S: Real>(system: &ShiftSystem, potential: &Potential<S>) -> Result<S> {
    if !system.is_irreducible() {
        return Err(Error::NoUniquePerron);
    }
    let m = TransferMatrix::from_system(system, potential)?;
    Ok(power_iteration(&m, S::perron_tol())?.log_lambda)
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pressure::{log_lambda_n, Cover};
use crate::symbolic::{for_each_word, Potential, ShiftSystem, SubsetSpec, Word};
use crate::Real;

use super::measure::MarkovMeasure;
use super::recode::power_system;
use super::transfer::transfer_pressure;

/// `P_X(phi) - (h_mu + integral phi d mu)`, nonnegative for every invariant measure.
pub fn vp_residual<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    measure: &MarkovMeasure<S>,
) -> Result<S> {
    if !measure.supported_on(system) {
        return Err(Error::InvalidMeasure("measure charges inadmissible words".into()));
    }
    let p = transfer_pressure(system, potential)?;
    Ok(p - (measure.entropy() + measure.integral(system, potential)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseVpProbe<S> {
    pub n: usize,
    /// Pressure of the typical set at scale `n`.
    pub value: S,
    /// Number of depth-`n` cylinders in the typical set.
    pub typical_count: usize,
    /// `h_mu + integral phi d mu`.
    pub free_energy: S,
    pub pressure: S,
}

/// Pressure of the frequency-typical set `Z_n` of `measure` at scale `n`.
///
/// `Z_n` is the union of depth-`n` cylinders whose empirical 1- and 2-block
/// frequencies are within `1/sqrt(n)` of the measure's. The returned value is
/// `(1/N) log Lambda(Z_n, N)` with strings of the depth-`r` cover and `N`
/// chosen so that the strings' domains are exactly the depth-`n` cylinders.
pub fn inverse_vp_probe<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    measure: &MarkovMeasure<S>,
    n: usize,
) -> Result<InverseVpProbe<S>> {
    let r = potential.depth();
    if n < 4 || n < r {
        return Err(Error::InvalidArgument(format!("n = {n} too small")));
    }
    let k = system.alphabet_size();
    let p1: Vec<S> = (0..k).map(|a| measure.cylinder_prob(&[a])).collect();
    let p2: Vec<S> = (0..k * k).map(|ab| measure.cylinder_prob(&[ab / k, ab % k])).collect();
    let radius = S::one() / S::count(n).sqrt();
    let mut typical = Vec::new();
    let mut c1 = vec![0usize; k];
    let mut c2 = vec![0usize; k * k];
    for_each_word(system, n, |w| {
        c1.iter_mut().for_each(|c| *c = 0);
        c2.iter_mut().for_each(|c| *c = 0);
        for &a in w {
            c1[a] += 1;
        }
        for p in w.windows(2) {
            c2[p[0] * k + p[1]] += 1;
        }
        let close1 = (0..k).all(|a| (S::count(c1[a]) / S::count(n) - p1[a]).abs() <= radius);
        let close2 = (0..k * k).all(|ab| (S::count(c2[ab]) / S::count(n - 1) - p2[ab]).abs() <= radius);
        if close1 && close2 {
            typical.push(Word::from_symbols(w.to_vec()));
        }
    });
    if typical.is_empty() {
        return Err(Error::IncreaseN { n });
    }
    let typical_count = typical.len();
    let cover = Cover::new(system, r)?;
    let strings = n + 1 - r;
    let log_lambda = log_lambda_n(system, &SubsetSpec::cylinders(typical), potential, &cover, strings)?;
    Ok(InverseVpProbe {
        n,
        value: log_lambda / S::count(strings),
        typical_count,
        free_energy: measure.entropy() + measure.integral(system, potential),
        pressure: transfer_pressure(system, potential)?,
    })
}

/// `(P_{X, f^k}(S_k phi), k P_{X, f}(phi))`.
pub fn power_pressure_check<S: Real>(system: &ShiftSystem, potential: &Potential<S>, k: usize) -> Result<(S, S)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (power, sk) = power_system(system, potential, k)?;
    Ok((transfer_pressure(&power, &sk)?, S::count(k) * transfer_pressure(system, potential)?))
}

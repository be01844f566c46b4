use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolic::{Potential, ShiftSystem};
use crate::thermo::{equilibrium_markov, MarkovMeasure};
use crate::util::LogSumExp;
use crate::Real;

use super::curve::{check_grid, t_curve};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationEntropyCurve<S> {
    pub q_grid: Vec<S>,
    /// `-T(q) / (q - 1)`.
    pub formula_values: Vec<S>,
    /// `-(1 / (n (q - 1))) log sum_w mu([w])^q` over `n`-words.
    pub direct_values: Vec<S>,
    pub n_used: usize,
    /// Formula side at `q = 1 - 1e-3` and `q = 1 + 1e-3`.
    pub near_one: (S, S),
    /// `h_mu` of the equilibrium state.
    pub measure_entropy: S,
}

pub fn correlation_entropy<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    q_grid: &[S],
    n: usize,
) -> Result<CorrelationEntropyCurve<S>> {
    check_grid(q_grid)?;
    if q_grid.iter().any(|&q| q == S::one()) {
        return Err(Error::InvalidArgument("q = 1 is not allowed on the grid".into()));
    }
    if n < 10 {
        return Err(Error::InvalidArgument(format!("n = {n} < 10")));
    }
    let curve = t_curve(system, potential, q_grid)?;
    let formula_values = q_grid
        .iter()
        .zip(&curve.t_values)
        .map(|(&q, &t)| -t / (q - S::one()))
        .collect();
    let eq = equilibrium_markov(system, potential)?;
    let direct_values = q_grid
        .iter()
        .map(|&q| -log_renyi_sum(&eq.measure, q, n) / (S::count(n) * (q - S::one())))
        .collect();
    let d = S::lit(1e-3);
    let edge = t_curve(system, potential, &[S::one() - d, S::one() + d])?;
    let near_one = (edge.t_values[0] / d, -edge.t_values[1] / d);
    Ok(CorrelationEntropyCurve {
        q_grid: q_grid.to_vec(),
        formula_values,
        direct_values,
        n_used: n,
        near_one,
        measure_entropy: eq.entropy,
    })
}

/// `log sum_w mu([w])^q` over words of length `n`, accumulated along the
/// chain so that no word is enumerated.
pub fn log_renyi_sum<S: Real>(measure: &MarkovMeasure<S>, q: S, n: usize) -> S {
    let l = measure.block_len();
    let states = measure.blocks.len();
    let log_pow = |p: S| if p > S::zero() { q * p.ln() } else { S::neg_infinity() };
    let mut cur: Vec<S> = measure.stationary.iter().map(|&p| log_pow(p)).collect();
    for _ in l..n {
        let mut next = vec![LogSumExp::new(); states];
        for (a, &la) in cur.iter().enumerate() {
            if la == S::neg_infinity() {
                continue;
            }
            for (b, &p) in measure.transitions[a].iter().enumerate() {
                if p > S::zero() {
                    next[b].push(la + log_pow(p));
                }
            }
        }
        cur = next.iter().map(LogSumExp::value).collect();
    }
    crate::util::log_sum_exp(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntropyTolerance<S> {
    Fixed { value: S },
    /// `z * sigma / sqrt(n)`, `sigma` the pooled standard deviation of the per-step log-weights.
    Clt { z: S },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalEntropyReport<S> {
    pub n: usize,
    pub samples: usize,
    pub tolerance: S,
    pub fraction_within: S,
    pub mean: S,
    pub measure_entropy: S,
}

/// Samples `x` from the chain and compares `-(1/n) log mu([x_0 .. x_{n-1}])` with `h_mu`.
pub fn local_entropy_check_measure<S: Real, R: Rng + ?Sized>(
    measure: &MarkovMeasure<S>,
    samples: usize,
    n: usize,
    tolerance: EntropyTolerance<S>,
    rng: &mut R,
) -> Result<LocalEntropyReport<S>> {
    let l = measure.block_len();
    if samples == 0 || n <= l {
        return Err(Error::InvalidArgument("need samples > 0 and n above the block length".into()));
    }
    let draw = |weights: &[S], rng: &mut R| -> usize {
        let u = S::lit(rng.gen::<f64>());
        let mut acc = S::zero();
        let mut last = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w > S::zero() {
                acc = acc + w;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    };
    let mut locals = Vec::with_capacity(samples);
    let mut steps = Moments::default();
    for _ in 0..samples {
        let mut s = draw(&measure.stationary, rng);
        let mut log_mu = measure.stationary[s].ln();
        for _ in l..n {
            let next = draw(&measure.transitions[s], rng);
            let lp = measure.transitions[s][next].ln();
            steps.push(-lp.as_f64());
            log_mu = log_mu + lp;
            s = next;
        }
        locals.push(-log_mu / S::count(n));
    }
    let h = measure.entropy();
    let tol = match tolerance {
        EntropyTolerance::Fixed { value } => value,
        EntropyTolerance::Clt { z } => z * S::lit(steps.std()) / S::count(n).sqrt(),
    };
    let within = locals.iter().filter(|&&x| (x - h).abs() <= tol).count();
    let mean = locals.iter().copied().sum::<S>() / S::count(samples);
    Ok(LocalEntropyReport {
        n,
        samples,
        tolerance: tol,
        fraction_within: S::count(within) / S::count(samples),
        mean,
        measure_entropy: h,
    })
}

/// [`local_entropy_check_measure`] for the equilibrium state of `potential`.
pub fn local_entropy_check<S: Real, R: Rng + ?Sized>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    samples: usize,
    n: usize,
    tolerance: EntropyTolerance<S>,
    rng: &mut R,
) -> Result<LocalEntropyReport<S>> {
    let eq = equilibrium_markov(system, potential)?;
    local_entropy_check_measure(&eq.measure, samples, n, tolerance, rng)
}

#[derive(Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn std(&self) -> f64 {
        if self.count < 2.0 {
            0.0
        } else {
            (self.m2 / (self.count - 1.0)).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::for_each_word;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (ShiftSystem, Potential<f64>) {
        let s = ShiftSystem::full_shift(2).unwrap();
        let phi = Potential::symbol_values(&s, &[0.0, 2f64.ln()], "p").unwrap();
        (s, phi)
    }

    #[test]
    fn renyi_sum_matches_enumeration() {
        let g = ShiftSystem::golden_mean();
        let phi = Potential::from_fn(&g, 2, "p", |b| 0.2 * b[0] as f64 + 0.5 * b[1] as f64).unwrap();
        let m = equilibrium_markov(&g, &phi).unwrap().measure;
        for q in [-1.5, 0.0, 0.5, 2.0] {
            let mut total = 0.0;
            for_each_word(&g, 9, |w| total += m.cylinder_prob(w).powf(q));
            assert!((log_renyi_sum(&m, q, 9) - total.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn bernoulli_q2() {
        let (s, phi) = setup();
        let c = correlation_entropy(&s, &phi, &[0.0, 2.0], 12).unwrap();
        let want = (9.0f64 / 5.0).ln();
        assert!((c.formula_values[1] - want).abs() < 1e-12);
        assert!((c.direct_values[1] - want).abs() < 1e-12);
        assert!((c.formula_values[0] - 2f64.ln()).abs() < 1e-12);
        let h = 3f64.ln() - 2.0 / 3.0 * 2f64.ln();
        assert!((c.near_one.0 - h).abs() < 1e-3 && (c.near_one.1 - h).abs() < 1e-3);
        assert!(correlation_entropy(&s, &phi, &[1.0], 12).is_err());
        assert!(correlation_entropy(&s, &phi, &[2.0], 9).is_err());
    }

    #[test]
    fn local_entropy_samples() {
        let (s, phi) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = local_entropy_check(&s, &phi, 200, 2000, EntropyTolerance::Fixed { value: 0.05 }, &mut rng).unwrap();
        assert!(r.fraction_within >= 0.9);
        let r = local_entropy_check(&s, &phi, 200, 2000, EntropyTolerance::Clt { z: 3.0 }, &mut rng).unwrap();
        assert!(r.fraction_within >= 0.9);
        let uniform = MarkovMeasure::bernoulli(&s, &[0.5, 0.5]).unwrap();
        let r = local_entropy_check_measure(&uniform, 20, 50, EntropyTolerance::Fixed { value: 1e-12 }, &mut rng).unwrap();
        assert_eq!(r.fraction_within, 1.0);
        let dirac = MarkovMeasure::<f64>::dirac_fixed_point(&s, 0).unwrap();
        let r = local_entropy_check_measure(&dirac, 20, 50, EntropyTolerance::Fixed { value: 0.0 }, &mut rng).unwrap();
        assert_eq!(r.fraction_within, 1.0);
        assert_eq!(r.mean, 0.0);
    }
}

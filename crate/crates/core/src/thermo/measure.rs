use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolic::{for_each_word, Potential, ShiftSystem};
use crate::Real;

use super::recode::block_recode;
use super::transfer::{power_iteration, TransferMatrix};

/// Shift-invariant Markov measure given by a stationary chain on admissible
/// `block_len`-words, consecutive states overlapping in `block_len - 1` symbols.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovMeasure<S> {
    pub blocks: Vec<Vec<usize>>,
    pub stationary: Vec<S>,
    /// Row-stochastic, indexed like `blocks`.
    pub transitions: Vec<Vec<S>>,
}

impl<S: Real> MarkovMeasure<S> {
    pub fn new(blocks: Vec<Vec<usize>>, stationary: Vec<S>, transitions: Vec<Vec<S>>) -> Result<Self> {
        let m = Self { blocks, stationary, transitions };
        m.validate()?;
        Ok(m)
    }

    /// Product measure with marginal `p` on a system allowing every transition it charges.
    pub fn bernoulli(system: &ShiftSystem, p: &[S]) -> Result<Self> {
        let k = system.alphabet_size();
        if p.len() != k {
            return Err(Error::InvalidMeasure(format!("need {k} probabilities")));
        }
        for a in 0..k {
            for b in 0..k {
                if p[a] > S::zero() && p[b] > S::zero() && !system.allows(a, b) {
                    return Err(Error::InvalidMeasure(format!(
                        "transition {a}->{b} charged but not allowed"
                    )));
                }
            }
        }
        let m = Self {
            blocks: (0..k).map(|a| vec![a]).collect(),
            stationary: p.to_vec(),
            transitions: vec![p.to_vec(); k],
        };
        m.validate()?;
        Ok(m)
    }

    /// Point mass on the fixed point `a^infinity`.
    pub fn dirac_fixed_point(system: &ShiftSystem, a: usize) -> Result<Self> {
        let k = system.alphabet_size();
        if a >= k || !system.allows(a, a) {
            return Err(Error::InvalidMeasure(format!("{a} is not a fixed point")));
        }
        let transitions = (0..k)
            .map(|b| {
                let target = if b == a { a } else { system.successors(b).next().expect("no dead symbols") };
                (0..k).map(|c| if c == target { S::one() } else { S::zero() }).collect()
            })
            .collect();
        let stationary = (0..k).map(|b| if b == a { S::one() } else { S::zero() }).collect();
        let m = Self { blocks: (0..k).map(|b| vec![b]).collect(), stationary, transitions };
        m.validate()?;
        Ok(m)
    }

    pub fn block_len(&self) -> usize {
        self.blocks[0].len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.blocks.len();
        if n == 0 || self.stationary.len() != n || self.transitions.iter().any(|r| r.len() != n) || self.transitions.len() != n {
            return Err(Error::InvalidMeasure("inconsistent dimensions".into()));
        }
        let l = self.blocks[0].len();
        if l == 0 || self.blocks.iter().any(|b| b.len() != l) {
            return Err(Error::InvalidMeasure("blocks must share a positive length".into()));
        }
        let tol = S::lit(1e3) * S::epsilon() * S::count(n);
        let sum: S = self.stationary.iter().copied().sum();
        if self.stationary.iter().any(|&p| !(p >= S::zero())) || (sum - S::one()).abs() > tol {
            return Err(Error::InvalidMeasure("stationary vector is not a probability vector".into()));
        }
        for (a, row) in self.transitions.iter().enumerate() {
            let s: S = row.iter().copied().sum();
            if row.iter().any(|&p| !(p >= S::zero())) || (s - S::one()).abs() > tol {
                return Err(Error::InvalidMeasure(format!("row {a} is not stochastic")));
            }
            for (b, &p) in row.iter().enumerate() {
                if p > S::zero() && self.blocks[a][1..] != self.blocks[b][..l - 1] {
                    return Err(Error::InvalidMeasure(format!("transition {a}->{b} does not overlap")));
                }
            }
        }
        for b in 0..n {
            let flow: S = (0..n).map(|a| self.stationary[a] * self.transitions[a][b]).sum();
            if (flow - self.stationary[b]).abs() > tol {
                return Err(Error::InvalidMeasure("stationary vector is not invariant".into()));
            }
        }
        Ok(())
    }

    /// Whether every charged transition is admissible in `system`.
    pub fn supported_on(&self, system: &ShiftSystem) -> bool {
        let l = self.block_len();
        self.blocks.iter().enumerate().all(|(a, u)| {
            self.stationary[a] == S::zero()
                || (u.windows(2).all(|p| system.allows(p[0], p[1]))
                    && self.transitions[a].iter().enumerate().all(|(b, &p)| {
                        p == S::zero() || system.allows(u[l - 1], self.blocks[b][l - 1])
                    }))
        })
    }

    fn index_of(&self, block: &[usize]) -> Option<usize> {
        self.blocks.iter().position(|b| b == block)
    }

    /// `mu([w])` for the cylinder of `w` at the origin.
    pub fn cylinder_prob(&self, w: &[usize]) -> S {
        let l = self.block_len();
        if w.len() < l {
            return self
                .blocks
                .iter()
                .zip(&self.stationary)
                .filter(|(b, _)| b[..w.len()] == *w)
                .map(|(_, &p)| p)
                .sum();
        }
        let Some(mut cur) = self.index_of(&w[..l]) else {
            return S::zero();
        };
        let mut p = self.stationary[cur];
        for j in 1..=w.len() - l {
            let Some(next) = self.index_of(&w[j..j + l]) else {
                return S::zero();
            };
            p = p * self.transitions[cur][next];
            cur = next;
        }
        p
    }

    /// Kolmogorov-Sinai entropy `-sum pi_a P_ab log P_ab`.
    pub fn entropy(&self) -> S {
        let mut h = S::zero();
        for (pa, row) in self.stationary.iter().zip(&self.transitions) {
            for &p in row {
                if p > S::zero() && *pa > S::zero() {
                    h = h - *pa * p * p.ln();
                }
            }
        }
        h
    }

    /// `integral phi d mu`.
    pub fn integral(&self, system: &ShiftSystem, potential: &Potential<S>) -> S {
        let r = potential.depth();
        let mut total = S::zero();
        for_each_word(system, r.max(self.block_len()), |w| {
            let p = self.cylinder_prob(w);
            if p > S::zero() {
                total = total + p * potential.value(&w[..r]);
            }
        });
        total
    }

    /// A nearby invariant Markov measure: each positive transition is scaled
    /// by a factor in `[1 - eps, 1 + eps]`, rows are renormalised and the
    /// stationary vector is solved again.
    pub fn perturbed<R: Rng + ?Sized>(&self, rng: &mut R, eps: S) -> Result<Self> {
        let transitions: Vec<Vec<S>> = self
            .transitions
            .iter()
            .map(|row| {
                let raw: Vec<S> = row
                    .iter()
                    .map(|&p| {
                        let f = S::lit(rng.gen_range(-1.0..=1.0));
                        p * (S::one() + eps * f)
                    })
                    .collect();
                let s: S = raw.iter().copied().sum();
                raw.into_iter().map(|p| p / s).collect()
            })
            .collect();
        let stationary = solve_stationary(&transitions)?;
        Self::new(self.blocks.clone(), stationary, transitions)
    }
}

/// Unique `pi` with `pi P = pi`, `sum pi = 1`, by Gaussian elimination.
fn solve_stationary<S: Real>(p: &[Vec<S>]) -> Result<Vec<S>> {
    let n = p.len();
    // rows: (P^T - I), last row replaced by the normalisation
    let mut a: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut row: Vec<S> = (0..n).map(|j| p[j][i] - if i == j { S::one() } else { S::zero() }).collect();
            row.push(S::zero());
            row
        })
        .collect();
    a[n - 1] = vec![S::one(); n + 1];
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).expect("finite"))
            .expect("nonempty");
        if a[piv][col].abs() <= S::epsilon() {
            return Err(Error::InvalidMeasure("stationary vector not unique".into()));
        }
        a.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != S::zero() {
                    for c in col..=n {
                        a[row][c] = a[row][c] - f * a[col][c];
                    }
                }
            }
        }
    }
    Ok((0..n).map(|i| (a[i][n] / a[i][i]).max(S::zero())).collect())
}

/// The equilibrium state of a potential on an irreducible SFT.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumState<S> {
    pub measure: MarkovMeasure<S>,
    pub entropy: S,
    pub potential_integral: S,
    pub log_lambda: S,
}

impl<S: Real> EquilibriumState<S> {
    pub fn eigenvalue(&self) -> S {
        self.log_lambda.exp()
    }

    pub fn stationary(&self) -> &[S] {
        &self.measure.stationary
    }

    pub fn transitions(&self) -> &[Vec<S>] {
        &self.measure.transitions
    }
}

pub fn equilibrium_markov<S: Real>(system: &ShiftSystem, potential: &Potential<S>) -> Result<EquilibriumState<S>> {
    if !system.is_irreducible() {
        return Err(Error::NoUniquePerron);
    }
    let rec = block_recode(system, potential)?;
    let m = TransferMatrix::from_system(&rec.system, &rec.potential)?;
    let perron = power_iteration(&m, S::perron_tol())?;
    let n = m.dim();
    let scaled_lambda = (perron.log_lambda - m.log_scale()).exp();
    let transitions: Vec<Vec<S>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| m.scaled(a, b) * perron.right[b] / (scaled_lambda * perron.right[a]))
                .collect()
        })
        .map(|row: Vec<S>| {
            let s: S = row.iter().copied().sum();
            row.into_iter().map(|p| p / s).collect()
        })
        .collect();
    let weights: Vec<S> = perron.left.iter().zip(&perron.right).map(|(&u, &v)| u * v).collect();
    let total: S = weights.iter().copied().sum();
    let stationary = weights.into_iter().map(|w| w / total).collect();
    let measure = MarkovMeasure { blocks: rec.blocks, stationary, transitions };
    let entropy = measure.entropy();
    let potential_integral = measure.integral(system, potential);
    let free_energy = entropy + potential_integral;
    let bound = S::identity_tol() * (S::one() + perron.log_lambda.abs());
    if (perron.log_lambda - free_energy).abs() > bound {
        return Err(Error::GibbsIdentity {
            log_lambda: perron.log_lambda.as_f64(),
            free_energy: free_energy.as_f64(),
        });
    }
    Ok(EquilibriumState { measure, entropy, potential_integral, log_lambda: perron.log_lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_and_biased_equilibria() {
        let s = ShiftSystem::full_shift(2).unwrap();
        let e = equilibrium_markov(&s, &Potential::<f64>::zero(&s)).unwrap();
        assert!((e.stationary()[0] - 0.5).abs() < 1e-12);
        assert!((e.entropy - 2f64.ln()).abs() < 1e-12);
        let phi = Potential::symbol_values(&s, &[0.0, 2f64.ln()], "p").unwrap();
        let e = equilibrium_markov(&s, &phi).unwrap();
        assert!((e.stationary()[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((e.transitions()[0][1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((e.entropy - (3f64.ln() - 2.0 / 3.0 * 2f64.ln())).abs() < 1e-12);
        assert!((e.potential_integral - 2.0 / 3.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn parry_measure() {
        let g = ShiftSystem::golden_mean();
        let e = equilibrium_markov(&g, &Potential::<f64>::zero(&g)).unwrap();
        let gr = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((e.transitions()[0][1] - 1.0 / (gr * gr)).abs() < 1e-12);
        assert!((e.transitions()[1][0] - 1.0).abs() < 1e-12);
        assert!((e.entropy - gr.ln()).abs() < 1e-12);
    }

    #[test]
    fn deep_potential_equilibrium_integrates_on_blocks() {
        let s = ShiftSystem::full_shift(2).unwrap();
        let phi = Potential::from_fn(&s, 2, "p", |b| 0.3 * b[0] as f64 + 0.7 * (b[0] * b[1]) as f64).unwrap();
        let e = equilibrium_markov(&s, &phi).unwrap();
        assert_eq!(e.measure.block_len(), 2);
        assert!((e.entropy + e.potential_integral - e.log_lambda).abs() < 1e-10);
    }

    #[test]
    fn simple_measures() {
        let s = ShiftSystem::full_shift(2).unwrap();
        let b = MarkovMeasure::bernoulli(&s, &[0.25, 0.75]).unwrap();
        let h = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!((b.entropy() - h).abs() < 1e-14);
        assert!((b.cylinder_prob(&[1, 1, 0]) - 0.75 * 0.75 * 0.25).abs() < 1e-15);
        let d = MarkovMeasure::<f64>::dirac_fixed_point(&s, 1).unwrap();
        assert_eq!(d.entropy(), 0.0);
        assert!(MarkovMeasure::<f64>::dirac_fixed_point(&ShiftSystem::golden_mean(), 1).is_err());
        assert!(MarkovMeasure::bernoulli(&ShiftSystem::golden_mean(), &[0.5, 0.5]).is_err());
        assert!(MarkovMeasure::bernoulli(&s, &[0.5, 0.6]).is_err());
    }

    #[test]
    fn perturbation_stays_invariant() {
        let g = ShiftSystem::golden_mean();
        let e = equilibrium_markov(&g, &Potential::<f64>::zero(&g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = e.measure.perturbed(&mut rng, 0.5).unwrap();
            assert!(m.supported_on(&g));
        }
    }
}

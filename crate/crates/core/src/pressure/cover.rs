use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolic::{for_each_word, CylinderSet, Potential, ShiftSystem, Word};
use crate::Real;

const MAX_ELEMENTS: usize = 1 << 22;

/// Partition of the shift space into all depth-`t` cylinders at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    system: ShiftSystem,
    depth: usize,
    elements: Vec<CylinderSet>,
}

impl Cover {
    pub fn new(system: &ShiftSystem, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidCover("depth must be at least 1".into()));
        }
        if system.word_count(depth) > MAX_ELEMENTS as u128 {
            return Err(Error::InvalidCover(format!("depth {depth} has too many cylinders")));
        }
        let mut elements = Vec::new();
        for_each_word(system, depth, |w| {
            elements.push(CylinderSet::at_origin(Word::from_symbols(w.to_vec())))
        });
        Ok(Self { system: system.clone(), depth, elements })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn system(&self) -> &ShiftSystem {
        &self.system
    }

    pub fn elements(&self) -> &[CylinderSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn diameter<S: Real>(&self) -> S {
        self.elements
            .iter()
            .map(|c| c.diameter::<S>(self.system.sidedness()))
            .fold(S::zero(), S::max)
    }

    /// `gamma(U)`: the largest oscillation of `phi` on a single element.
    pub fn oscillation<S: Real>(&self, potential: &Potential<S>) -> S {
        self.elements
            .iter()
            .map(|c| potential.oscillation_on(&self.system, c.word.symbols()))
            .fold(S::zero(), S::max)
    }

    pub(crate) fn check_against<S: Real>(
        &self,
        system: &ShiftSystem,
        potential: &Potential<S>,
    ) -> Result<()> {
        if &self.system != system {
            return Err(Error::InvalidCover("cover built on a different system".into()));
        }
        if potential.alphabet_size() != system.alphabet_size() {
            return Err(Error::InvalidPotential("alphabet size mismatch".into()));
        }
        if self.depth < potential.depth() {
            return Err(Error::InvalidCover(format!(
                "cover depth {} below potential depth {}",
                self.depth,
                potential.depth()
            )));
        }
        Ok(())
    }

    /// The string `(U_{i_0}, ..., U_{i_{m-1}})` with its weights.
    pub fn string<S: Real>(&self, potential: &Potential<S>, indices: &[usize]) -> Result<CoverString<S>> {
        self.check_against(&self.system, potential)?;
        if indices.is_empty() {
            return Err(Error::InvalidArgument("a string has length at least 1".into()));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.elements.len()) {
            return Err(Error::InvalidArgument(format!("cover index {i} out of range")));
        }
        let m = indices.len();
        let t = self.depth;
        let first = self.elements[indices[0]].word.symbols();
        let mut domain: Vec<usize> = first.to_vec();
        let mut consistent = true;
        for pair in indices.windows(2) {
            let a = self.elements[pair[0]].word.symbols();
            let b = self.elements[pair[1]].word.symbols();
            if a[1..] != b[..t - 1] {
                consistent = false;
                break;
            }
            domain.push(b[t - 1]);
        }
        // For t = 1 consecutive elements must also be joined by an allowed transition.
        let domain = if consistent && Word::from_symbols(domain.clone()).is_admissible(&self.system) {
            Some(CylinderSet::at_origin(Word::from_symbols(domain)))
        } else {
            None
        };
        let log_xi = match &domain {
            Some(c) => potential.birkhoff_exact(c.word.symbols(), m),
            None => S::neg_infinity(),
        };
        Ok(CoverString {
            indices: indices.to_vec(),
            domain,
            log_xi,
            eta: (-S::count(m)).exp(),
            psi: S::one() / S::count(m),
        })
    }
}

/// A string of cover elements and its C-P weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverString<S> {
    pub indices: Vec<usize>,
    /// `X(U)`, `None` when empty.
    pub domain: Option<CylinderSet>,
    /// `log xi(U) = sup S_m phi` over `X(U)`.
    pub log_xi: S,
    pub eta: S,
    pub psi: S,
}

impl<S: Real> CoverString<S> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn xi(&self) -> S {
        self.log_xi.exp()
    }

    /// `xi(U) * eta(U)^alpha`.
    pub fn weight(&self, alpha: S) -> S {
        (self.log_xi - alpha * S::count(self.len())).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_cover_counts() {
        let g = ShiftSystem::golden_mean();
        assert_eq!(Cover::new(&g, 3).unwrap().len(), 5);
        assert!(Cover::new(&g, 0).is_err());
    }

    #[test]
    fn diameter_halves() {
        let s = ShiftSystem::full_shift(2).unwrap();
        for t in 1..8 {
            let a: f64 = Cover::new(&s, t).unwrap().diameter();
            let b: f64 = Cover::new(&s, t + 1).unwrap().diameter();
            assert_eq!(a, 2.0 * b);
        }
    }

    #[test]
    fn string_domain_and_weights() {
        let s = ShiftSystem::full_shift(2).unwrap();
        let phi = Potential::symbol_values(&s, &[0.0, 2f64.ln()], "phi").unwrap();
        let cover = Cover::new(&s, 2).unwrap();
        // elements in lexicographic order: 00, 01, 10, 11
        let u = cover.string(&phi, &[1, 3, 2]).unwrap();
        assert_eq!(u.domain.as_ref().unwrap().word.symbols(), &[0, 1, 1, 0]);
        assert!((u.log_xi - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((u.eta - (-3f64).exp()).abs() < 1e-15);
        assert!((u.psi - 1.0 / 3.0).abs() < 1e-15);
        let empty = cover.string(&phi, &[1, 1]).unwrap();
        assert!(empty.domain.is_none());
        assert_eq!(empty.weight(0.5), 0.0);
    }

    #[test]
    fn oscillation_vanishes_past_depth() {
        let s = ShiftSystem::full_shift(2).unwrap();
        let phi = Potential::from_fn(&s, 2, "p", |b| (b[0] + 2 * b[1]) as f64).unwrap();
        assert_eq!(Cover::new(&s, 1).unwrap().oscillation(&phi), 2.0);
        assert_eq!(Cover::new(&s, 2).unwrap().oscillation(&phi), 0.0);
    }
}

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::system::{strongly_connected, ShiftSystem, Sidedness};
use super::word::{CylinderSet, Word};
use crate::error::{Error, Result};

/// A subset `Z` of the shift space on which pressures are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetSpec {
    Whole,
    /// Points whose transitions all lie in a sub-adjacency matrix.
    SubSft { adjacency: Vec<Vec<u8>> },
    /// Finite union of cylinders.
    Cylinders { cylinders: Vec<CylinderSet> },
}

impl SubsetSpec {
    pub fn sub_sft(adjacency: Vec<Vec<u8>>) -> Self {
        SubsetSpec::SubSft { adjacency }
    }

    /// Union of cylinders anchored at coordinate 0.
    pub fn cylinders(words: impl IntoIterator<Item = Word>) -> Self {
        SubsetSpec::Cylinders {
            cylinders: words.into_iter().map(CylinderSet::at_origin).collect(),
        }
    }

    /// The fixed point `a^inf` as a sub-SFT.
    pub fn fixed_point(system: &ShiftSystem, a: usize) -> Result<Self> {
        if !system.allows(a, a) {
            return Err(Error::InvalidSubset(format!("{a}{a} is not admissible")));
        }
        let k = system.alphabet_size();
        let mut m = vec![vec![0u8; k]; k];
        m[a][a] = 1;
        Ok(SubsetSpec::SubSft { adjacency: m })
    }

    pub fn validate(&self, system: &ShiftSystem) -> Result<()> {
        let k = system.alphabet_size();
        match self {
            SubsetSpec::Whole => Ok(()),
            SubsetSpec::SubSft { adjacency } => {
                if adjacency.len() != k || adjacency.iter().any(|r| r.len() != k) {
                    return Err(Error::InvalidSubset(format!(
                        "sub-SFT adjacency must be {k}x{k}"
                    )));
                }
                for (a, row) in adjacency.iter().enumerate() {
                    for (b, &v) in row.iter().enumerate() {
                        if v > 1 {
                            return Err(Error::InvalidSubset(format!("entry ({a},{b}) not 0/1")));
                        }
                        if v == 1 && !system.allows(a, b) {
                            return Err(Error::InvalidSubset(format!(
                                "entry ({a},{b}) exceeds the parent adjacency"
                            )));
                        }
                    }
                }
                Ok(())
            }
            SubsetSpec::Cylinders { cylinders } => {
                for c in cylinders {
                    if c.word.is_empty() {
                        return Err(Error::InvalidSubset("empty cylinder word".into()));
                    }
                    c.word.check(system)?;
                    if c.start < 0 && system.sidedness() == Sidedness::OneSided {
                        return Err(Error::InvalidSubset(
                            "negative cylinder start on a one-sided system".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// The image under the shift map (two-sided systems only for cylinders).
    pub fn shifted(&self, system: &ShiftSystem) -> Result<Self> {
        match self {
            SubsetSpec::Cylinders { cylinders } => {
                if system.sidedness() != Sidedness::TwoSided {
                    return Err(Error::InvalidSubset(
                        "cylinder images need a two-sided system".into(),
                    ));
                }
                Ok(SubsetSpec::Cylinders {
                    cylinders: cylinders
                        .iter()
                        .map(|c| CylinderSet { word: c.word.clone(), start: c.start - 1 })
                        .collect(),
                })
            }
            other => Ok(other.clone()),
        }
    }

    /// Whether the set is invariant, `f^-1(Z) = Z`.
    pub fn is_invariant(&self) -> bool {
        !matches!(self, SubsetSpec::Cylinders { .. })
    }
}

/// Membership oracle for forward cylinders `[v]` (coordinates `0..|v|`)
/// meeting `Z`, together with the continuation structure below depth
/// `settle_len` where every admissible extension of a meeting word still
/// meets `Z`.
#[derive(Debug, Clone)]
pub(crate) struct SubsetOracle {
    k: usize,
    kind: OracleKind,
    /// Word length from which membership is decided by the continuation rule.
    pub settle_len: usize,
}

#[derive(Debug, Clone)]
enum OracleKind {
    Whole,
    Sub { allowed: Vec<bool>, live: Vec<bool> },
    Anchored { full: HashSet<Vec<usize>>, prefixes: HashSet<Vec<usize>>, lens: Vec<usize> },
    General { cylinders: Vec<CylinderSet> },
}

impl SubsetOracle {
    pub fn new(system: &ShiftSystem, spec: &SubsetSpec) -> Result<Self> {
        spec.validate(system)?;
        let k = system.alphabet_size();
        Ok(match spec {
            SubsetSpec::Whole => Self { k, kind: OracleKind::Whole, settle_len: 0 },
            SubsetSpec::SubSft { adjacency } => {
                let allowed: Vec<bool> = adjacency.iter().flatten().map(|&v| v == 1).collect();
                let live = live_symbols(k, &allowed);
                Self { k, kind: OracleKind::Sub { allowed, live }, settle_len: 0 }
            }
            SubsetSpec::Cylinders { cylinders } => {
                let settle_len = cylinders
                    .iter()
                    .map(|c| (c.start + c.word.len() as i64).max(0) as usize)
                    .max()
                    .unwrap_or(0);
                if cylinders.iter().all(|c| c.start == 0) {
                    let mut full = HashSet::new();
                    let mut prefixes = HashSet::new();
                    let mut lens: Vec<usize> = Vec::new();
                    for c in cylinders {
                        let w = c.word.symbols();
                        full.insert(w.to_vec());
                        lens.push(w.len());
                        for l in 1..=w.len() {
                            prefixes.insert(w[..l].to_vec());
                        }
                    }
                    lens.sort_unstable();
                    lens.dedup();
                    Self { k, kind: OracleKind::Anchored { full, prefixes, lens }, settle_len }
                } else {
                    Self {
                        k,
                        kind: OracleKind::General { cylinders: cylinders.clone() },
                        settle_len,
                    }
                }
            }
        })
    }

    pub fn is_empty_set(&self) -> bool {
        match &self.kind {
            OracleKind::Whole => false,
            OracleKind::Sub { live, .. } => !live.iter().any(|&l| l),
            OracleKind::Anchored { full, .. } => full.is_empty(),
            OracleKind::General { cylinders } => cylinders.is_empty(),
        }
    }

    /// Transition allowed for words that already meet `Z` at length `>= settle_len`.
    #[inline]
    pub fn continues(&self, system: &ShiftSystem, a: usize, b: usize) -> bool {
        match &self.kind {
            OracleKind::Sub { allowed, live } => allowed[a * self.k + b] && live[b],
            _ => system.allows(a, b),
        }
    }

    /// Whether the forward cylinder of the admissible word `v` meets `Z`.
    pub fn meets(&self, system: &ShiftSystem, v: &[usize]) -> bool {
        match &self.kind {
            OracleKind::Whole => true,
            OracleKind::Sub { allowed, live } => {
                !v.is_empty()
                    && live[*v.last().expect("nonempty")]
                    && v.windows(2).all(|p| allowed[p[0] * self.k + p[1]])
            }
            OracleKind::Anchored { full, prefixes, lens } => {
                prefixes.contains(v)
                    || lens
                        .iter()
                        .take_while(|&&l| l <= v.len())
                        .any(|&l| full.contains(&v[..l]))
            }
            OracleKind::General { cylinders } => {
                cylinders.iter().any(|c| compatible(system, c, v))
            }
        }
    }
}

/// Symbols from which an infinite forward path exists inside `allowed`.
fn live_symbols(k: usize, allowed: &[bool]) -> Vec<bool> {
    let mut live = vec![true; k];
    loop {
        let mut changed = false;
        for a in 0..k {
            if live[a] && !(0..k).any(|b| allowed[a * k + b] && live[b]) {
                live[a] = false;
                changed = true;
            }
        }
        if !changed {
            return live;
        }
    }
}

/// Whether the sub-SFT restricted to its live symbols is irreducible.
pub fn sub_sft_is_irreducible(adjacency: &[Vec<u8>]) -> bool {
    let k = adjacency.len();
    let allowed: Vec<bool> = adjacency.iter().flatten().map(|&v| v == 1).collect();
    let live = live_symbols(k, &allowed);
    let idx: Vec<usize> = (0..k).filter(|&a| live[a]).collect();
    strongly_connected(idx.len(), |i, j| allowed[idx[i] * k + idx[j]])
}

/// Cylinder `c` and the forward word `v` (coordinates `0..|v|`) admit a common point.
fn compatible(system: &ShiftSystem, c: &CylinderSet, v: &[usize]) -> bool {
    let w = c.word.symbols();
    let (ws, we) = (c.start, c.start + w.len() as i64);
    let (vs, ve) = (0i64, v.len() as i64);
    if ws < ve && vs < we {
        // overlap: symbols must agree, and the union must be admissible
        let lo = ws.min(vs);
        let hi = we.max(ve);
        let mut merged = Vec::with_capacity((hi - lo) as usize);
        for pos in lo..hi {
            let from_w = (pos >= ws && pos < we).then(|| w[(pos - ws) as usize]);
            let from_v = (pos >= vs && pos < ve).then(|| v[pos as usize]);
            match (from_w, from_v) {
                (Some(a), Some(b)) if a != b => return false,
                (Some(a), _) | (_, Some(a)) => merged.push(a),
                (None, None) => unreachable!("contiguous union"),
            }
        }
        merged.windows(2).all(|p| system.allows(p[0], p[1]))
    } else if we <= vs {
        let gap = (vs - we) as usize;
        system.reachable_in(w[w.len() - 1], v[0], gap + 1)
    } else {
        let gap = (ws - ve) as usize;
        system.reachable_in(v[v.len() - 1], w[0], gap + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::make_full_shift;

    #[test]
    fn sub_sft_validation() {
        let s = ShiftSystem::golden_mean();
        assert!(SubsetSpec::sub_sft(vec![vec![1, 0], vec![0, 0]]).validate(&s).is_ok());
        assert!(SubsetSpec::sub_sft(vec![vec![1, 1], vec![1, 1]]).validate(&s).is_err());
        assert!(SubsetSpec::fixed_point(&s, 1).is_err());
    }

    #[test]
    fn meets_for_each_kind() {
        let s = make_full_shift(2).unwrap();
        let fixed = SubsetOracle::new(&s, &SubsetSpec::fixed_point(&s, 0).unwrap()).unwrap();
        assert!(fixed.meets(&s, &[0, 0, 0]));
        assert!(!fixed.meets(&s, &[0, 1]));
        let cyl = SubsetOracle::new(&s, &SubsetSpec::cylinders([Word::from(vec![0, 1])])).unwrap();
        assert!(cyl.meets(&s, &[0]));
        assert!(cyl.meets(&s, &[0, 1, 1]));
        assert!(!cyl.meets(&s, &[1]));
        assert_eq!(cyl.settle_len, 2);
    }

    #[test]
    fn general_cylinders_agree_with_anchored() {
        let g = ShiftSystem::golden_mean().with_sidedness(Sidedness::TwoSided);
        let words = [Word::from(vec![0, 1]), Word::from(vec![1, 0, 0])];
        let anchored = SubsetOracle::new(&g, &SubsetSpec::cylinders(words.clone())).unwrap();
        let general = SubsetOracle {
            k: 2,
            kind: OracleKind::General {
                cylinders: words.iter().cloned().map(CylinderSet::at_origin).collect(),
            },
            settle_len: 3,
        };
        for n in 1..=5 {
            for v in crate::symbolic::admissible_words(&g, n) {
                assert_eq!(anchored.meets(&g, v.symbols()), general.meets(&g, v.symbols()));
            }
        }
    }

    #[test]
    fn negative_start_uses_gap_paths() {
        let g = ShiftSystem::golden_mean().with_sidedness(Sidedness::TwoSided);
        // x_{-2} = 1; then x_{-1} = 0 is forced, x_0 free
        let spec = SubsetSpec::Cylinders {
            cylinders: vec![CylinderSet { word: Word::from(vec![1]), start: -2 }],
        };
        let o = SubsetOracle::new(&g, &spec).unwrap();
        assert!(o.meets(&g, &[1]));
        assert!(o.meets(&g, &[0]));
        let spec = SubsetSpec::Cylinders {
            cylinders: vec![CylinderSet { word: Word::from(vec![1]), start: -1 }],
        };
        let o = SubsetOracle::new(&g, &spec).unwrap();
        assert!(!o.meets(&g, &[1]));
        assert!(o.meets(&g, &[0, 1]));
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// Subshift of finite type on `alphabet_size` symbols.
///
/// The adjacency matrix has no dead symbols: every row and every column
/// contains at least one allowed transition, so every admissible word
/// extends to an infinite sequence in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSystem {
    alphabet_size: usize,
    adjacency: Vec<bool>,
    sidedness: Sidedness,
    irreducible: bool,
}

impl ShiftSystem {
    pub fn new(adjacency: &[Vec<u8>], sidedness: Sidedness) -> Result<Self> {
        let k = adjacency.len();
        if k < 2 {
            return Err(Error::InvalidSystem(format!(
                "alphabet size {k} < 2 is not supported"
            )));
        }
        let mut flat = Vec::with_capacity(k * k);
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidSystem(format!(
                    "adjacency row {i} has length {}, expected {k}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => flat.push(false),
                    1 => flat.push(true),
                    _ => {
                        return Err(Error::InvalidSystem(format!(
                            "adjacency entry ({i},{j}) = {v} is not 0/1"
                        )))
                    }
                }
            }
        }
        for a in 0..k {
            if !(0..k).any(|b| flat[a * k + b]) {
                return Err(Error::InvalidSystem(format!("symbol {a} has no successor")));
            }
            if !(0..k).any(|b| flat[b * k + a]) {
                return Err(Error::InvalidSystem(format!("symbol {a} has no predecessor")));
            }
        }
        let irreducible = strongly_connected(k, |a, b| flat[a * k + b]);
        Ok(Self {
            alphabet_size: k,
            adjacency: flat,
            sidedness,
            irreducible,
        })
    }

    pub fn full_shift(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSystem(format!(
                "full shift needs at least 2 symbols, got {k}"
            )));
        }
        Self::new(&vec![vec![1; k]; k], Sidedness::OneSided)
    }

    /// The golden-mean shift: no two consecutive 1s.
    pub fn golden_mean() -> Self {
        Self::new(&[vec![1, 1], vec![1, 0]], Sidedness::OneSided).expect("valid adjacency")
    }

    pub fn with_sidedness(mut self, sidedness: Sidedness) -> Self {
        self.sidedness = sidedness;
        self
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn sidedness(&self) -> Sidedness {
        self.sidedness
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    #[inline]
    pub fn allows(&self, a: usize, b: usize) -> bool {
        self.adjacency[a * self.alphabet_size + b]
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.alphabet_size).filter(move |&b| self.allows(a, b))
    }

    pub fn adjacency_rows(&self) -> Vec<Vec<u8>> {
        (0..self.alphabet_size)
            .map(|a| (0..self.alphabet_size).map(|b| self.allows(a, b) as u8).collect())
            .collect()
    }

    pub fn is_full_shift(&self) -> bool {
        self.adjacency.iter().all(|&x| x)
    }

    /// Some power of the adjacency matrix is strictly positive.
    pub fn is_primitive(&self) -> bool {
        if !self.irreducible {
            return false;
        }
        let k = self.alphabet_size;
        let limit = (k - 1) * (k - 1) + 1;
        let mut power = self.adjacency.clone();
        for _ in 0..limit {
            if power.iter().all(|&x| x) {
                return true;
            }
            power = bool_mul(k, &power, &self.adjacency);
        }
        power.iter().all(|&x| x)
    }

    /// Whether a path with exactly `steps` transitions leads from `a` to `b`.
    pub fn reachable_in(&self, a: usize, b: usize, steps: usize) -> bool {
        let k = self.alphabet_size;
        let mut frontier = vec![false; k];
        frontier[a] = true;
        for _ in 0..steps {
            let mut next = vec![false; k];
            for (x, _) in frontier.iter().enumerate().filter(|(_, &f)| f) {
                for y in self.successors(x) {
                    next[y] = true;
                }
            }
            frontier = next;
        }
        frontier[b]
    }

    /// Number of admissible words of length `n`: the entry sum of `A^(n-1)`.
    pub fn word_count(&self, n: usize) -> u128 {
        if n == 0 {
            return 1;
        }
        let k = self.alphabet_size;
        let mut counts = vec![1u128; k];
        for _ in 1..n {
            let mut next = vec![0u128; k];
            for a in 0..k {
                for b in self.successors(a) {
                    next[b] += counts[a];
                }
            }
            counts = next;
        }
        counts.iter().sum()
    }
}

/// Full shift on `k` symbols.
pub fn make_full_shift(k: usize) -> Result<ShiftSystem> {
    ShiftSystem::full_shift(k)
}

fn bool_mul(k: usize, x: &[bool], y: &[bool]) -> Vec<bool> {
    let mut out = vec![false; k * k];
    for i in 0..k {
        for l in 0..k {
            if x[i * k + l] {
                for j in 0..k {
                    out[i * k + j] |= y[l * k + j];
                }
            }
        }
    }
    out
}

pub(crate) fn strongly_connected(k: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..k {
                let e = if forward { edge(a, b) } else { edge(b, a) };
                if e && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    k > 0 && reach(true) && reach(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_adjacency() {
        let s = make_full_shift(2).unwrap();
        assert_eq!(s.adjacency_rows(), vec![vec![1, 1], vec![1, 1]]);
        assert!(s.is_irreducible());
        let s3 = make_full_shift(3).unwrap();
        assert_eq!(s3.adjacency_rows(), vec![vec![1; 3]; 3]);
        assert!(matches!(make_full_shift(1), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn rejects_dead_symbols_and_bad_shapes() {
        assert!(ShiftSystem::new(&[vec![1, 1], vec![0, 0]], Sidedness::OneSided).is_err());
        assert!(ShiftSystem::new(&[vec![1, 0], vec![1, 0]], Sidedness::OneSided).is_err());
        assert!(ShiftSystem::new(&[vec![1, 1, 1], vec![1, 1]], Sidedness::OneSided).is_err());
        assert!(ShiftSystem::new(&[vec![1, 2], vec![1, 1]], Sidedness::OneSided).is_err());
    }

    #[test]
    fn reducible_flagged() {
        let s = ShiftSystem::new(&[vec![1, 1], vec![0, 1]], Sidedness::OneSided).unwrap();
        assert!(!s.is_irreducible());
        let p = ShiftSystem::new(&[vec![0, 1], vec![1, 0]], Sidedness::OneSided).unwrap();
        assert!(p.is_irreducible());
        assert!(!p.is_primitive());
        assert!(ShiftSystem::golden_mean().is_primitive());
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let g = ShiftSystem::golden_mean();
        let counts: Vec<u128> = (1..=10).map(|n| g.word_count(n)).collect();
        assert_eq!(counts, vec![2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
    }
}

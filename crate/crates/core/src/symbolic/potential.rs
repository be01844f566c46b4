use std::collections::HashMap;

use super::system::ShiftSystem;
use super::word::{for_each_word, Word};
use crate::error::{Error, Result};
use crate::Real;

/// Locally constant potential: `phi(x)` depends on `x[0..depth]` only.
///
/// Values are stored densely, indexed by the base-`k` encoding of the
/// depth-block. Entries for inadmissible blocks are kept at zero and never
/// read by the algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<S> {
    name: String,
    alphabet_size: usize,
    depth: usize,
    table: Vec<S>,
}

const MAX_TABLE: usize = 1 << 22;

impl<S: Real> Potential<S> {
    /// Builds a potential from a dense table over all `k^depth` blocks.
    pub fn new(system: &ShiftSystem, depth: usize, table: Vec<S>, name: impl Into<String>) -> Result<Self> {
        let k = system.alphabet_size();
        let size = table_size(k, depth)?;
        if table.len() != size {
            return Err(Error::InvalidPotential(format!(
                "table has {} entries, expected {size} = {k}^{depth}",
                table.len()
            )));
        }
        let mut p = Self {
            name: name.into(),
            alphabet_size: k,
            depth,
            table,
        };
        let mut bad = None;
        let mut admissible = vec![false; size];
        for_each_word(system, depth, |w| {
            let i = p.index(w);
            admissible[i] = true;
            if !p.table[i].is_finite() && bad.is_none() {
                bad = Some(w.to_vec());
            }
        });
        if let Some(w) = bad {
            return Err(Error::InvalidPotential(format!("non-finite value on block {w:?}")));
        }
        for (v, ok) in p.table.iter_mut().zip(admissible) {
            if !ok {
                *v = S::zero();
            }
        }
        Ok(p)
    }

    pub fn from_fn(
        system: &ShiftSystem,
        depth: usize,
        name: impl Into<String>,
        f: impl Fn(&[usize]) -> S,
    ) -> Result<Self> {
        let k = system.alphabet_size();
        let size = table_size(k, depth)?;
        let mut table = vec![S::zero(); size];
        for_each_word(system, depth, |w| {
            table[encode(k, w)] = f(w);
        });
        Self::new(system, depth, table, name)
    }

    /// Depth-1 potential from one value per symbol.
    pub fn symbol_values(system: &ShiftSystem, values: &[S], name: impl Into<String>) -> Result<Self> {
        Self::new(system, 1, values.to_vec(), name)
    }

    /// Potential from explicit `(block, value)` entries; missing blocks are zero.
    pub fn from_entries(
        system: &ShiftSystem,
        depth: usize,
        entries: &HashMap<Word, S>,
        name: impl Into<String>,
    ) -> Result<Self> {
        for w in entries.keys() {
            if w.len() != depth {
                return Err(Error::InvalidPotential(format!(
                    "block {:?} has length {}, expected {depth}",
                    w.symbols(),
                    w.len()
                )));
            }
            w.check(system)?;
        }
        Self::from_fn(system, depth, "entries", |b| {
            entries.get(&Word::from(b.to_vec())).copied().unwrap_or_else(S::zero)
        })
        .map(|p| p.with_name(name))
    }

    pub fn zero(system: &ShiftSystem) -> Self {
        Self::constant(system, S::zero())
    }

    pub fn constant(system: &ShiftSystem, c: S) -> Self {
        Self::symbol_values(system, &vec![c; system.alphabet_size()], "constant")
            .expect("finite constant")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub(crate) fn index(&self, block: &[usize]) -> usize {
        encode(self.alphabet_size, block)
    }

    /// Value on a block of exactly `depth` symbols.
    #[inline]
    pub fn value(&self, block: &[usize]) -> S {
        debug_assert_eq!(block.len(), self.depth);
        self.table[self.index(block)]
    }

    pub fn table(&self) -> &[S] {
        &self.table
    }

    /// `q * phi`.
    pub fn scaled(&self, q: S) -> Self {
        Self {
            name: format!("{}*{}", q, self.name),
            alphabet_size: self.alphabet_size,
            depth: self.depth,
            table: self.table.iter().map(|&v| v * q).collect(),
        }
    }

    /// Same potential viewed at a larger depth (ignores the extra coordinates).
    pub fn deepened(&self, system: &ShiftSystem, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::InvalidPotential(format!(
                "cannot reduce depth {} to {depth}",
                self.depth
            )));
        }
        Self::from_fn(system, depth, self.name.clone(), |w| self.value(&w[..self.depth]))
    }

    /// `phi - other` as a potential of the larger depth.
    pub fn difference(&self, system: &ShiftSystem, other: &Self) -> Result<Self> {
        let d = self.depth.max(other.depth);
        Self::from_fn(system, d, format!("{}-{}", self.name, other.name), |w| {
            self.value(&w[..self.depth]) - other.value(&w[..other.depth])
        })
    }

    /// Minimum and maximum over admissible blocks.
    pub fn range(&self, system: &ShiftSystem) -> (S, S) {
        let mut lo = S::infinity();
        let mut hi = S::neg_infinity();
        for_each_word(system, self.depth, |w| {
            let v = self.value(w);
            lo = lo.min(v);
            hi = hi.max(v);
        });
        (lo, hi)
    }

    /// `sup |phi|` over the shift space.
    pub fn sup_norm(&self, system: &ShiftSystem) -> S {
        let (lo, hi) = self.range(system);
        lo.abs().max(hi.abs())
    }

    /// `sum_{j<n} phi(w[j..j+depth])`; requires `w.len() >= n + depth - 1`.
    pub fn birkhoff_exact(&self, word: &[usize], n: usize) -> S {
        debug_assert!(word.len() + 1 >= n + self.depth);
        (0..n).map(|j| self.value(&word[j..j + self.depth])).sum()
    }

    /// Oscillation of `phi` on the depth-`t` cylinder of `word`.
    pub fn oscillation_on(&self, system: &ShiftSystem, word: &[usize]) -> S {
        if word.len() >= self.depth {
            return S::zero();
        }
        let hi = max_extension(system, self, word, 1);
        let lo = -max_extension(system, &self.scaled(-S::one()), word, 1);
        hi - lo
    }
}

fn table_size(k: usize, depth: usize) -> Result<usize> {
    if depth == 0 {
        return Err(Error::InvalidPotential("depth must be at least 1".into()));
    }
    k.checked_pow(depth as u32)
        .filter(|&s| s <= MAX_TABLE)
        .ok_or_else(|| Error::InvalidPotential(format!("table {k}^{depth} too large")))
}

#[inline]
pub(crate) fn encode(k: usize, block: &[usize]) -> usize {
    block.iter().fold(0, |acc, &s| acc * k + s)
}

/// Exact `sup` of `S_n phi` over the cylinder of `word`.
///
/// When the word already fixes the first `n + depth - 1` coordinates this is a
/// plain table sum. Shorter words are maximised over every admissible
/// extension.
pub fn birkhoff_sup<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    word: &Word,
    n: usize,
) -> Result<S> {
    if word.is_empty() {
        return Err(Error::InsufficientWord(
            "the empty word does not determine a cylinder".into(),
        ));
    }
    word.check(system)?;
    let need = n + potential.depth() - 1;
    if n == 0 {
        return Ok(S::zero());
    }
    if word.len() >= need {
        return Ok(potential.birkhoff_exact(word.symbols(), n));
    }
    Ok(max_extension(system, potential, word.symbols(), n))
}

/// Max over admissible extensions of `prefix` to length `n + depth - 1` of
/// `S_n phi`. Uses a max-plus recursion over windows of the last `depth - 1`
/// symbols so the cost is linear in the extension length.
fn max_extension<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    prefix: &[usize],
    n: usize,
) -> S {
    let r = potential.depth();
    let target = n + r - 1;
    let base: S = (0..n)
        .filter(|&j| j + r <= prefix.len())
        .map(|j| potential.value(&prefix[j..j + r]))
        .sum();
    let mut memo: HashMap<(usize, Vec<usize>), S> = HashMap::new();
    let keep = r.saturating_sub(1).max(1);
    let start_window = prefix[prefix.len().saturating_sub(keep)..].to_vec();
    base + best_tail(
        system,
        potential,
        prefix.len(),
        target,
        start_window,
        &mut memo,
    )
}

fn best_tail<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    len: usize,
    target: usize,
    window: Vec<usize>,
    memo: &mut HashMap<(usize, Vec<usize>), S>,
) -> S {
    if len >= target {
        return S::zero();
    }
    if let Some(&v) = memo.get(&(len, window.clone())) {
        return v;
    }
    let r = potential.depth();
    let keep = r.saturating_sub(1).max(1);
    let last = *window.last().expect("nonempty window");
    let mut best = S::neg_infinity();
    for b in system.successors(last) {
        let mut block = window.clone();
        block.push(b);
        let gain = if block.len() >= r {
            potential.value(&block[block.len() - r..])
        } else {
            S::zero()
        };
        let next_window = block[block.len().saturating_sub(keep)..].to_vec();
        let v = gain + best_tail(system, potential, len + 1, target, next_window, memo);
        best = best.max(v);
    }
    memo.insert((len, window), best);
    best
}

use serde::{Deserialize, Serialize};

use super::system::{ShiftSystem, Sidedness};
use crate::error::{Error, Result};
use crate::Real;

/// A finite word over the alphabet of a shift system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    /// Builds a word, checking symbol range and every transition.
    pub fn new(system: &ShiftSystem, symbols: Vec<usize>) -> Result<Self> {
        let w = Word(symbols);
        w.check(system)?;
        Ok(w)
    }

    pub fn from_symbols(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, system: &ShiftSystem) -> Result<()> {
        let k = system.alphabet_size();
        if let Some(&s) = self.0.iter().find(|&&s| s >= k) {
            return Err(Error::InvalidWord(format!("symbol {s} outside alphabet of size {k}")));
        }
        if let Some(i) = (1..self.0.len()).find(|&i| !system.allows(self.0[i - 1], self.0[i])) {
            return Err(Error::InvalidWord(format!(
                "transition {} -> {} at position {} is forbidden",
                self.0[i - 1],
                self.0[i],
                i - 1
            )));
        }
        Ok(())
    }

    pub fn is_admissible(&self, system: &ShiftSystem) -> bool {
        self.check(system).is_ok()
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

/// Cylinder `{x : x[start + i] = word[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CylinderSet {
    pub word: Word,
    pub start: i64,
}

impl CylinderSet {
    pub fn new(system: &ShiftSystem, word: Word, start: i64) -> Result<Self> {
        word.check(system)?;
        if start < 0 && system.sidedness() == Sidedness::OneSided {
            return Err(Error::InvalidWord(format!(
                "negative start {start} on a one-sided system"
            )));
        }
        Ok(Self { word, start })
    }

    pub fn at_origin(word: Word) -> Self {
        Self { word, start: 0 }
    }

    pub fn is_nonempty(&self, system: &ShiftSystem) -> bool {
        !self.word.is_empty() && self.word.is_admissible(system)
    }

    /// `k` such that the diameter is `2^-k` under `d(x, y) = 2^-min{|i| : x_i != y_i}`.
    pub fn diameter_exponent(&self, sidedness: Sidedness) -> u32 {
        let lo = self.start;
        let hi = self.start + self.word.len() as i64;
        match sidedness {
            Sidedness::OneSided => {
                if lo > 0 {
                    0
                } else {
                    hi.max(0) as u32
                }
            }
            Sidedness::TwoSided => {
                if lo > 0 || hi <= 0 {
                    0
                } else {
                    // free coordinates closest to the origin are lo - 1 and hi
                    (1 - lo).min(hi) as u32
                }
            }
        }
    }

    pub fn diameter<S: Real>(&self, sidedness: Sidedness) -> S {
        S::lit(2.0).powi(-(self.diameter_exponent(sidedness) as i32))
    }
}

/// All admissible words of length `n`, in lexicographic order.
pub fn admissible_words(system: &ShiftSystem, n: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(system.word_count(n).min(1 << 24) as usize);
    for_each_word(system, n, |w| out.push(Word(w.to_vec())));
    out
}

/// Visits every admissible word of length `n` in lexicographic order.
pub fn for_each_word(system: &ShiftSystem, n: usize, mut visit: impl FnMut(&[usize])) {
    if n == 0 {
        visit(&[]);
        return;
    }
    let mut buf = Vec::with_capacity(n);
    for a in 0..system.alphabet_size() {
        buf.push(a);
        extend(system, n, &mut buf, &mut visit);
        buf.pop();
    }
}

fn extend(system: &ShiftSystem, n: usize, buf: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if buf.len() == n {
        visit(buf);
        return;
    }
    let last = *buf.last().expect("nonempty");
    for b in system.successors(last) {
        buf.push(b);
        extend(system, n, buf, visit);
        buf.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::make_full_shift;

    fn brute_force(system: &ShiftSystem, n: usize) -> Vec<Vec<usize>> {
        let k = system.alphabet_size();
        let total = k.pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut w = vec![0; n];
            let mut c = code;
            for i in (0..n).rev() {
                w[i] = c % k;
                c /= k;
            }
            if (1..n).all(|i| system.allows(w[i - 1], w[i])) {
                out.push(w);
            }
        }
        out
    }

    #[test]
    fn word_counts() {
        assert_eq!(admissible_words(&make_full_shift(2).unwrap(), 3).len(), 8);
        let g = ShiftSystem::golden_mean();
        assert_eq!(admissible_words(&g, 3).len(), 5);
        assert_eq!(admissible_words(&g, 10).len(), 144);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let g = ShiftSystem::golden_mean();
        for n in 1..=8 {
            let got: Vec<Vec<usize>> = admissible_words(&g, n)
                .into_iter()
                .map(|w| w.symbols().to_vec())
                .collect();
            assert_eq!(got, brute_force(&g, n));
        }
    }

    #[test]
    fn word_validation() {
        let g = ShiftSystem::golden_mean();
        assert!(Word::new(&g, vec![1, 0, 1]).is_ok());
        assert!(Word::new(&g, vec![1, 1]).is_err());
        assert!(Word::new(&g, vec![2]).is_err());
    }

    #[test]
    fn diameters() {
        let w = CylinderSet::at_origin(Word::from(vec![0, 1, 1]));
        assert_eq!(w.diameter::<f64>(Sidedness::OneSided), 0.125);
        let two = CylinderSet { word: Word::from(vec![0, 1, 1]), start: -1 };
        // fixes coordinates -1, 0, 1; nearest free coordinates are -2 and 2
        assert_eq!(two.diameter_exponent(Sidedness::TwoSided), 2);
        let off = CylinderSet { word: Word::from(vec![0]), start: 3 };
        assert_eq!(off.diameter::<f64>(Sidedness::TwoSided), 1.0);
    }
}

use crate::error::Result;
use crate::symbolic::{for_each_word, Potential, ShiftSystem};
use crate::Real;

/// A higher-block presentation: symbols are admissible words of the original system.
#[derive(Debug, Clone, PartialEq)]
pub struct Recoded<S> {
    pub system: ShiftSystem,
    /// Depth-1 potential on the new alphabet.
    pub potential: Potential<S>,
    /// Original word for each new symbol.
    pub blocks: Vec<Vec<usize>>,
}

/// Recodes onto the alphabet of admissible `r`-blocks, `r` the potential depth,
/// so that the potential becomes a function of one symbol.
///
/// Consecutive blocks must overlap in `r - 1` symbols. Words of length `n` in
/// the recoded system correspond to words of length `n + r - 1` in the original.
pub fn block_recode<S: Real>(system: &ShiftSystem, potential: &Potential<S>) -> Result<Recoded<S>> {
    let r = potential.depth();
    if r == 1 {
        let blocks = (0..system.alphabet_size()).map(|a| vec![a]).collect();
        return Ok(Recoded { system: system.clone(), potential: potential.clone(), blocks });
    }
    let blocks = words(system, r);
    let adjacency: Vec<Vec<u8>> = blocks
        .iter()
        .map(|u| blocks.iter().map(|v| u8::from(u[1..] == v[..r - 1])).collect())
        .collect();
    let recoded = ShiftSystem::new(&adjacency, system.sidedness())?;
    let values: Vec<S> = blocks.iter().map(|b| potential.value(b)).collect();
    let name = format!("{}@{}-blocks", potential.name(), r);
    let potential = Potential::symbol_values(&recoded, &values, name)?;
    Ok(Recoded { system: recoded, potential, blocks })
}

/// The `k`-th power system: symbols are admissible `k`-words, and the
/// potential is `S_k phi` expressed on the new alphabet.
pub fn power_system<S: Real>(
    system: &ShiftSystem,
    potential: &Potential<S>,
    k: usize,
) -> Result<(ShiftSystem, Potential<S>)> {
    if k == 1 {
        return Ok((system.clone(), potential.clone()));
    }
    let r = potential.depth();
    let blocks = words(system, k);
    let adjacency: Vec<Vec<u8>> = blocks
        .iter()
        .map(|u| blocks.iter().map(|v| u8::from(system.allows(u[k - 1], v[0]))).collect())
        .collect();
    let power = ShiftSystem::new(&adjacency, system.sidedness())?;
    let depth = 1 + (r - 1).div_ceil(k);
    let name = format!("S_{k} {}", potential.name());
    let sum = Potential::from_fn(&power, depth, name, |idx| {
        let word: Vec<usize> = idx.iter().flat_map(|&i| blocks[i].iter().copied()).collect();
        potential.birkhoff_exact(&word, k)
    })?;
    Ok((power, sum))
}

fn words(system: &ShiftSystem, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_word(system, n, |w| out.push(w.to_vec()));
    out
}

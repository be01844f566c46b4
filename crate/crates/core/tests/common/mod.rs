#![allow(dead_code)]

use cp_pressure::symbolic::{Potential, ShiftSystem, Sidedness};
use rand::Rng;

/// Uniformly random 0/1 matrix of size `2..=max_dim`, resampled until irreducible.
pub fn random_irreducible_sft<R: Rng>(rng: &mut R, max_dim: usize) -> ShiftSystem {
    loop {
        let k = rng.gen_range(2..=max_dim);
        let m: Vec<Vec<u8>> = (0..k)
            .map(|_| (0..k).map(|_| u8::from(rng.gen_bool(0.6))).collect())
            .collect();
        if let Ok(s) = ShiftSystem::new(&m, Sidedness::OneSided) {
            if s.is_irreducible() {
                return s;
            }
        }
    }
}

pub fn random_potential<R: Rng>(rng: &mut R, system: &ShiftSystem, depth: usize, scale: f64) -> Potential<f64> {
    let size = system.alphabet_size().pow(depth as u32);
    let table = (0..size).map(|_| rng.gen_range(-scale..=scale)).collect();
    Potential::new(system, depth, table, "random").unwrap()
}

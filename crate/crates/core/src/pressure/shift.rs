//! The C-P structure of a depth-`t` cylinder cover on a subshift of finite type.

use std::cell::Cell;

use serde::Serialize;

use super::cover::Cover;
use super::engine::{capacity_on, critical_alpha_on, CpStructure, PressureEstimate, PressureSettings, WeightM};
use crate::error::{Error, Result};
use crate::symbolic::{encode, for_each_word, Potential, ShiftSystem, SubsetOracle, SubsetSpec};
use crate::util::LogSumExp;
use crate::Real;

const MAX_STATES: usize = 1 << 20;

/// Strings of a depth-`t` cover correspond to words of length `m + t - 1`.
/// Past the settle length of `Z`, the subtree below a word depends only on
/// its last `max(t - 1, 1)` symbols, so the antichain minimisation reduces
/// to a recursion over those windows.
pub struct ShiftModel<'a, S> {
    system: &'a ShiftSystem,
    potential: &'a Potential<S>,
    oracle: SubsetOracle,
    t: usize,
    window: usize,
    /// Per window state: successor state and Birkhoff increment.
    trans: Vec<Vec<(usize, S)>>,
    seed_len: usize,
    seed: Vec<S>,
}

impl<'a, S: Real> ShiftModel<'a, S> {
    pub fn new(
        system: &'a ShiftSystem,
        z: &SubsetSpec,
        potential: &'a Potential<S>,
        cover: &Cover,
    ) -> Result<Self> {
        cover.check_against(system, potential)?;
        let oracle = SubsetOracle::new(system, z)?;
        let k = system.alphabet_size();
        let t = cover.depth();
        let r = potential.depth();
        let window = (t - 1).max(1);
        let n_states = k
            .checked_pow(window as u32)
            .filter(|&n| n <= MAX_STATES)
            .ok_or_else(|| Error::InvalidCover(format!("depth {t} too large for the recursion")))?;
        let offset = window + 1 - t;

        let mut trans = vec![Vec::new(); n_states];
        let mut block = Vec::with_capacity(window + 1);
        for_each_word(system, window, |w| {
            let s = encode(k, w);
            let last = w[window - 1];
            for b in 0..k {
                if !oracle.continues(system, last, b) {
                    continue;
                }
                block.clear();
                block.extend_from_slice(w);
                block.push(b);
                let inc = potential.value(&block[offset..offset + r]);
                trans[s].push((encode(k, &block[1..]), inc));
            }
        });

        let seed_len = t.max(oracle.settle_len);
        let m0 = seed_len + 1 - t;
        let mut seed = vec![LogSumExp::new(); n_states];
        for_each_word(system, seed_len, |w| {
            if oracle.meets(system, w) {
                seed[encode(k, &w[seed_len - window..])].push(potential.birkhoff_exact(w, m0));
            }
        });
        let seed = seed.iter().map(LogSumExp::value).collect();
        Ok(Self { system, potential, oracle, t, window, trans, seed_len, seed })
    }

    fn first_root_len(&self) -> usize {
        self.seed_len + 1 - self.t
    }

    fn state_of(&self, w: &[usize]) -> usize {
        encode(self.system.alphabet_size(), &w[w.len() - self.window..])
    }

    /// `log R_N(s)`: log of the total root weight `exp(S_N phi)` over words of
    /// length `N + t - 1` meeting `Z` that end in window `s`.
    fn root_profile(&self, n: usize) -> Vec<S> {
        let mut cur = self.seed.clone();
        for _ in self.first_root_len()..n {
            let mut next = vec![LogSumExp::new(); cur.len()];
            for (s, &lr) in cur.iter().enumerate() {
                if lr == S::neg_infinity() {
                    continue;
                }
                for &(s2, inc) in &self.trans[s] {
                    next[s2].push(lr + inc);
                }
            }
            cur = next.iter().map(LogSumExp::value).collect();
        }
        cur
    }

    /// `c_d(s)`, `d = 0..=h`: log of the optimal relative cost of the subtree
    /// below a word in state `s` with `d` further levels available.
    fn cost_tables(&self, alpha: S, h: usize) -> Vec<Vec<S>> {
        let mut tables = vec![vec![S::zero(); self.trans.len()]];
        for d in 1..=h {
            let prev = &tables[d - 1];
            let next = self
                .trans
                .iter()
                .map(|succ| {
                    if succ.is_empty() {
                        return S::zero();
                    }
                    let mut acc = LogSumExp::new();
                    for &(s2, inc) in succ {
                        acc.push(inc - alpha + prev[s2]);
                    }
                    acc.value().min(S::zero())
                })
                .collect();
            tables.push(next);
        }
        tables
    }

    fn explicit_node(
        &self,
        v: &mut Vec<usize>,
        m: usize,
        cap: usize,
        alpha: S,
        tables: &[Vec<S>],
        min_depth: &Cell<usize>,
    ) -> S {
        let own = self.potential.birkhoff_exact(v, m) - alpha * S::count(m);
        if m == cap {
            min_depth.set(0);
            return own;
        }
        if v.len() >= self.seed_len {
            let d = cap - m;
            min_depth.set(min_depth.get().min(d));
            return own + tables[d][self.state_of(v)];
        }
        let last = *v.last().expect("nonempty");
        let mut acc = LogSumExp::new();
        for b in 0..self.system.alphabet_size() {
            if !self.system.allows(last, b) {
                continue;
            }
            v.push(b);
            if self.oracle.meets(self.system, v) {
                acc.push(self.explicit_node(v, m + 1, cap, alpha, tables, min_depth));
            }
            v.pop();
        }
        own.min(acc.value())
    }
}

fn stable<S: Real>(a: &[S], b: &[S]) -> bool {
    let eps = S::epsilon() * S::lit(8.0);
    a.iter()
        .zip(b)
        .all(|(&x, &y)| x == y || (x - y).abs() <= eps * (S::one() + x.abs()))
}

impl<S: Real> CpStructure<S> for ShiftModel<'_, S> {
    fn log_weight_m(&self, alpha: S, n: usize, depth_cap: usize) -> Result<WeightM<S>> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if depth_cap < n {
            return Err(Error::InvalidArgument(format!("depth cap {depth_cap} < N = {n}")));
        }
        let h = depth_cap - n;
        let (log_value, stabilized) = if n >= self.first_root_len() {
            let tables = self.cost_tables(alpha, h);
            let roots = self.root_profile(n);
            let mut acc = LogSumExp::new();
            for (lr, c) in roots.iter().zip(&tables[h]) {
                acc.push(*lr + *c);
            }
            (acc.value() - alpha * S::count(n), h >= 1 && stable(&tables[h], &tables[h - 1]))
        } else {
            let min_depth = Cell::new(usize::MAX);
            let mut acc = LogSumExp::new();
            let tables = self.cost_tables(alpha, h);
            for_each_word(self.system, n + self.t - 1, |w| {
                if self.oracle.meets(self.system, w) {
                    let mut v = w.to_vec();
                    acc.push(self.explicit_node(&mut v, n, depth_cap, alpha, &tables, &min_depth));
                }
            });
            let d = min_depth.get();
            let ok = d != usize::MAX && d >= 1 && stable(&tables[d], &tables[d - 1]);
            (acc.value(), ok)
        };
        Ok(WeightM { log_value, n, depth_cap, stabilized })
    }

    fn log_lambda(&self, n: usize) -> Result<S> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if n >= self.first_root_len() {
            return Ok(crate::util::log_sum_exp(self.root_profile(n)));
        }
        let mut acc = LogSumExp::new();
        for_each_word(self.system, n + self.t - 1, |w| {
            if self.oracle.meets(self.system, w) {
                acc.push(self.potential.birkhoff_exact(w, n));
            }
        });
        Ok(acc.value())
    }

    fn alpha_bracket(&self) -> (S, S) {
        let (lo, hi) = self.potential.range(self.system);
        let k = S::count(self.system.alphabet_size());
        (lo - S::one(), k.ln() + hi + S::one())
    }

    fn is_empty_set(&self) -> bool {
        self.oracle.is_empty_set()
    }

    fn cover_depth(&self) -> usize {
        self.t
    }
}

/// `log Lambda(Z, phi, U, N)`.
pub fn log_lambda_n<S: Real>(
    system: &ShiftSystem,
    z: &SubsetSpec,
    potential: &Potential<S>,
    cover: &Cover,
    n: usize,
) -> Result<S> {
    ShiftModel::new(system, z, potential, cover)?.log_lambda(n)
}

/// `Lambda(Z, phi, U, N)`; zero for empty `Z`.
pub fn lambda_n<S: Real>(
    system: &ShiftSystem,
    z: &SubsetSpec,
    potential: &Potential<S>,
    cover: &Cover,
    n: usize,
) -> Result<S> {
    log_lambda_n(system, z, potential, cover, n).map(S::exp)
}

/// `M(Z, alpha, phi, U, N)` over antichains of strings with lengths in
/// `N..=depth_cap` (default `N + 8`).
pub fn weight_m<S: Real>(
    system: &ShiftSystem,
    z: &SubsetSpec,
    potential: &Potential<S>,
    cover: &Cover,
    alpha: S,
    n: usize,
    depth_cap: Option<usize>,
) -> Result<WeightM<S>> {
    ShiftModel::new(system, z, potential, cover)?.log_weight_m(alpha, n, depth_cap.unwrap_or(n + 8))
}

pub fn capacity_pressures<S: Real>(
    system: &ShiftSystem,
    z: &SubsetSpec,
    potential: &Potential<S>,
    cover: &Cover,
    n_max: usize,
) -> Result<(PressureEstimate<S>, PressureEstimate<S>)> {
    capacity_on(&ShiftModel::new(system, z, potential, cover)?, n_max)
}

pub fn critical_alpha<S: Real>(
    system: &ShiftSystem,
    z: &SubsetSpec,
    potential: &Potential<S>,
    cover: &Cover,
    settings: &PressureSettings<S>,
) -> Result<PressureEstimate<S>> {
    critical_alpha_on(&ShiftModel::new(system, z, potential, cover)?, settings)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthRow<S> {
    pub depth: usize,
    pub estimate: PressureEstimate<S>,
    /// Change from the previous depth.
    pub delta: Option<S>,
    pub oscillation: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedPressure<S> {
    pub value: S,
    pub rows: Vec<DepthRow<S>>,
    pub warnings: Vec<String>,
}

impl<S: Real> RefinedPressure<S> {
    pub fn converged(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// `P_Z(phi, U_t)` along increasing depths `t`.
///
/// Consecutive estimates must agree up to the oscillation of the coarser
/// cover plus the bisection tolerance; otherwise a warning is recorded.
pub fn pressure_refined<S: Real>(
    system: &ShiftSystem,
    z: &SubsetSpec,
    potential: &Potential<S>,
    depths: &[usize],
    settings: &PressureSettings<S>,
) -> Result<RefinedPressure<S>> {
    if depths.is_empty() {
        return Err(Error::InvalidArgument("no depths given".into()));
    }
    if depths.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidArgument("depths must be strictly increasing".into()));
    }
    let mut rows: Vec<DepthRow<S>> = Vec::new();
    let mut warnings = Vec::new();
    for &t in depths {
        let cover = Cover::new(system, t)?;
        let estimate = critical_alpha(system, z, potential, &cover, settings)?;
        let oscillation = cover.oscillation(potential);
        let delta = rows.last().map(|prev| estimate.value - prev.estimate.value);
        if let (Some(d), Some(prev)) = (delta, rows.last()) {
            let bound = prev.oscillation + S::lit(2.0) * settings.tol;
            if d.is_finite() && d.abs() > bound {
                warnings.push(format!(
                    "depth {t}: change {d} exceeds oscillation bound {bound}"
                ));
            }
        }
        rows.push(DepthRow { depth: t, estimate, delta, oscillation });
    }
    let value = rows.last().expect("nonempty").estimate.value;
    Ok(RefinedPressure { value, rows, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{CylinderSet, Word};

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    fn full2() -> ShiftSystem {
        ShiftSystem::full_shift(2).unwrap()
    }

    fn phi_log2(s: &ShiftSystem) -> Potential<f64> {
        Potential::symbol_values(s, &[0.0, ln(2.0)], "phi").unwrap()
    }

    #[test]
    fn lambda_examples() {
        let s = full2();
        let g = ShiftSystem::golden_mean();
        let zero = Potential::<f64>::zero(&s);
        let c1 = Cover::new(&s, 1).unwrap();
        let v = lambda_n(&s, &SubsetSpec::Whole, &zero, &c1, 5).unwrap();
        assert!((v - 32.0).abs() < 1e-9);
        let gz = Potential::<f64>::zero(&g);
        let v = lambda_n(&g, &SubsetSpec::Whole, &gz, &Cover::new(&g, 1).unwrap(), 5).unwrap();
        assert!((v - 13.0).abs() < 1e-9);
        let v = lambda_n(&s, &SubsetSpec::Whole, &phi_log2(&s), &c1, 3).unwrap();
        assert!((v - 27.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_of_empty_set_is_zero() {
        let s = full2();
        let z = SubsetSpec::sub_sft(vec![vec![0, 1], vec![0, 0]]);
        let c = Cover::new(&s, 1).unwrap();
        assert_eq!(lambda_n(&s, &z, &Potential::<f64>::zero(&s), &c, 4).unwrap(), 0.0);
        let (lo, hi) = capacity_pressures(&s, &z, &Potential::<f64>::zero(&s), &c, 8).unwrap();
        assert!(lo.degenerate && hi.degenerate && lo.value == f64::NEG_INFINITY);
        let p = critical_alpha(&s, &z, &Potential::<f64>::zero(&s), &c, &PressureSettings::default())
            .unwrap();
        assert!(p.degenerate);
    }

    #[test]
    fn lambda_short_n_matches_profile() {
        // cylinder Z with settle length 4 exercises both code paths
        let s = full2();
        let z = SubsetSpec::cylinders([Word::from_symbols(vec![1, 0, 1, 1])]);
        let phi = Potential::from_fn(&s, 2, "p", |b| 0.3 * b[0] as f64 - 0.2 * b[1] as f64).unwrap();
        let c = Cover::new(&s, 2).unwrap();
        for n in 1..8 {
            let mut brute = 0.0;
            for_each_word(&s, n + 1, |w| {
                let ok = w.iter().zip([1, 0, 1, 1]).all(|(a, b)| *a == b);
                if ok {
                    brute += phi.birkhoff_exact(w, n).exp();
                }
            });
            let v = lambda_n(&s, &z, &phi, &c, n).unwrap();
            assert!((v - brute).abs() < 1e-10 * brute.max(1.0), "n={n}: {v} vs {brute}");
        }
    }

    /// Every prefix-free cover of the subtree below `root` by words of length
    /// at most `cap`, as explicit leaf lists.
    fn antichains(sys: &ShiftSystem, meets: &dyn Fn(&[usize]) -> bool, root: Vec<usize>, cap: usize) -> Vec<Vec<Vec<usize>>> {
        let mut out = vec![vec![root.clone()]];
        if root.len() == cap {
            return out;
        }
        let last = *root.last().unwrap();
        let kids: Vec<Vec<usize>> = sys
            .successors(last)
            .map(|b| {
                let mut c = root.clone();
                c.push(b);
                c
            })
            .filter(|c| meets(c))
            .collect();
        let mut combos: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for kid in kids {
            let options = antichains(sys, meets, kid, cap);
            let mut next = Vec::new();
            for c in &combos {
                for o in &options {
                    let mut m = c.clone();
                    m.extend(o.iter().cloned());
                    next.push(m);
                }
            }
            combos = next;
        }
        out.extend(combos);
        out
    }

    fn brute_m(
        sys: &ShiftSystem,
        z: &SubsetSpec,
        phi: &Potential<f64>,
        t: usize,
        alpha: f64,
        n: usize,
        cap: usize,
    ) -> f64 {
        let oracle = SubsetOracle::new(sys, z).unwrap();
        let meets = |v: &[usize]| oracle.meets(sys, v);
        let mut roots = Vec::new();
        for_each_word(sys, n + t - 1, |w| {
            if meets(w) {
                roots.push(w.to_vec())
            }
        });
        let per_root: Vec<Vec<Vec<Vec<usize>>>> = roots
            .into_iter()
            .map(|r| antichains(sys, &meets, r, cap + t - 1))
            .collect();
        let weight = |c: &Vec<Vec<usize>>| -> f64 {
            c.iter()
                .map(|w| {
                    let m = w.len() + 1 - t;
                    (phi.birkhoff_exact(w, m) - alpha * m as f64).exp()
                })
                .sum()
        };
        // choices below distinct roots are independent
        per_root
            .iter()
            .map(|opts| opts.iter().map(weight).fold(f64::INFINITY, f64::min))
            .sum()
    }

    #[test]
    fn weight_m_matches_antichain_enumeration() {
        let s = full2();
        let phi = Potential::from_fn(&s, 2, "p", |b| 0.4 * b[0] as f64 - 0.1 * (b[0] * b[1]) as f64).unwrap();
        let golden = SubsetSpec::sub_sft(vec![vec![1, 1], vec![1, 0]]);
        let cyl = SubsetSpec::cylinders([Word::from_symbols(vec![0, 1, 1])]);
        for z in [SubsetSpec::Whole, golden, cyl] {
            for t in [2, 3] {
                let cover = Cover::new(&s, t).unwrap();
                for alpha in [0.2, 0.8, 1.5] {
                    let n = 2;
                    let cap = 5;
                    let dp = weight_m(&s, &z, &phi, &cover, alpha, n, Some(cap)).unwrap();
                    let bf = brute_m(&s, &z, &phi, t, alpha, n, cap);
                    assert!(
                        (dp.value() - bf).abs() < 1e-10 * bf,
                        "{z:?} t={t} alpha={alpha}: {} vs {bf}",
                        dp.value()
                    );
                }
            }
        }
    }

    #[test]
    fn weight_m_full_shift_closed_forms() {
        let s = full2();
        let zero = Potential::<f64>::zero(&s);
        let c = Cover::new(&s, 1).unwrap();
        // above the critical value the deepest level wins: (2/e)^cap
        let w = weight_m(&s, &SubsetSpec::Whole, &zero, &c, 1.0, 4, Some(12)).unwrap();
        assert!((w.log_value - 12.0 * (ln(2.0) - 1.0)).abs() < 1e-12);
        assert!(w.inconclusive_at_depth());
        // below it the roots win, at every cap
        for cap in [4, 8, 16] {
            let w = weight_m(&s, &SubsetSpec::Whole, &zero, &c, 0.5, 4, Some(cap)).unwrap();
            assert!((w.log_value - 4.0 * (ln(2.0) - 0.5)).abs() < 1e-12);
            assert_eq!(w.stabilized, cap > 4);
        }
        let fixed = SubsetSpec::fixed_point(&s, 0).unwrap();
        let w = weight_m(&s, &fixed, &zero, &c, 0.7, 5, None).unwrap();
        assert!((w.log_value + 0.7 * 13.0).abs() < 1e-12);
    }

    #[test]
    fn critical_alpha_examples() {
        let s = full2();
        let c = Cover::new(&s, 1).unwrap();
        let set = PressureSettings::default();
        let zero = Potential::<f64>::zero(&s);
        let p = critical_alpha(&s, &SubsetSpec::Whole, &zero, &c, &set).unwrap();
        assert!((p.value - ln(2.0)).abs() <= set.tol, "{}", p.value);
        let (lo, hi) = p.bracket.unwrap();
        assert!(hi - lo <= set.tol && lo <= p.value && p.value <= hi);
        let p = critical_alpha(&s, &SubsetSpec::Whole, &phi_log2(&s), &c, &set).unwrap();
        assert!((p.value - ln(3.0)).abs() <= set.tol);
        let fixed = SubsetSpec::fixed_point(&s, 0).unwrap();
        let p = critical_alpha(&s, &fixed, &zero, &c, &set).unwrap();
        assert!(p.value.abs() <= set.tol);
    }

    #[test]
    fn capacity_examples() {
        let s = full2();
        let c = Cover::new(&s, 1).unwrap();
        let zero = Potential::<f64>::zero(&s);
        let (lo, hi) = capacity_pressures(&s, &SubsetSpec::Whole, &zero, &c, 16).unwrap();
        assert!((lo.value - ln(2.0)).abs() < 1e-12 && (hi.value - ln(2.0)).abs() < 1e-12);
        let (lo, hi) = capacity_pressures(&s, &SubsetSpec::Whole, &phi_log2(&s), &c, 16).unwrap();
        assert!((lo.value - ln(3.0)).abs() < 1e-12 && (hi.value - ln(3.0)).abs() < 1e-12);
        let g = ShiftSystem::golden_mean();
        let gz = Potential::<f64>::zero(&g);
        let phi_g = ln((1.0 + 5f64.sqrt()) / 2.0);
        let (lo, hi) =
            capacity_pressures(&g, &SubsetSpec::Whole, &gz, &Cover::new(&g, 1).unwrap(), 30).unwrap();
        assert!((lo.value - phi_g).abs() < 1e-3 && (hi.value - phi_g).abs() < 1e-3);
        assert_eq!(lo.diagnostics.len(), 30);
        assert!(capacity_pressures(&s, &SubsetSpec::Whole, &zero, &c, 7).is_err());
    }

    #[test]
    fn refinement_is_constant_for_locally_constant_potentials() {
        let s = full2();
        let set = PressureSettings::default();
        let r = pressure_refined(&s, &SubsetSpec::Whole, &phi_log2(&s), &[1, 2, 3], &set).unwrap();
        assert!(r.converged());
        for row in &r.rows {
            assert!((row.estimate.value - ln(3.0)).abs() <= set.tol);
            assert_eq!(row.oscillation, 0.0);
        }
        let g = ShiftSystem::golden_mean();
        let r = pressure_refined(&g, &SubsetSpec::Whole, &Potential::zero(&g), &[1, 2, 3], &set).unwrap();
        for row in &r.rows {
            assert!((row.estimate.value - ln((1.0 + 5f64.sqrt()) / 2.0)).abs() <= set.tol);
        }
        assert!(pressure_refined(&s, &SubsetSpec::Whole, &phi_log2(&s), &[2, 1], &set).is_err());
    }

    #[test]
    fn shifted_cylinder_has_same_pressure() {
        let s = full2().with_sidedness(crate::symbolic::Sidedness::TwoSided);
        let z = SubsetSpec::Cylinders {
            cylinders: vec![CylinderSet::new(&s, Word::from_symbols(vec![1, 1, 0]), 0).unwrap()],
        };
        let fz = z.shifted(&s).unwrap();
        let phi = phi_log2(&s);
        let c = Cover::new(&s, 1).unwrap();
        let set = PressureSettings::default();
        let a = critical_alpha(&s, &z, &phi, &c, &set).unwrap();
        let b = critical_alpha(&s, &fz, &phi, &c, &set).unwrap();
        assert!((a.value - b.value).abs() <= 2.0 * set.tol);
    }

    #[test]
    fn cover_depth_below_potential_depth_is_rejected() {
        let s = full2();
        let phi = Potential::<f64>::from_fn(&s, 2, "p", |_| 0.0).unwrap();
        let c = Cover::new(&s, 1).unwrap();
        assert!(lambda_n(&s, &SubsetSpec::Whole, &phi, &c, 3).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let s = full2();
        let phi = Potential::<f32>::symbol_values(&s, &[0.0, 2f32.ln()], "phi").unwrap();
        let c = Cover::new(&s, 1).unwrap();
        let set = PressureSettings::<f32>::default().with_tol(1e-4);
        let p = critical_alpha(&s, &SubsetSpec::Whole, &phi, &c, &set).unwrap();
        assert!((p.value - 3f32.ln()).abs() <= 2e-4);
    }
}

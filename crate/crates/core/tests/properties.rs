mod common;

use cp_pressure::compactify::{lebesgue_number, FiniteMetricModel};
use cp_pressure::pressure::{capacity_pressures, critical_alpha, weight_m, Cover, PressureSettings};
use cp_pressure::symbolic::{admissible_words, birkhoff_sup, sub_sft_is_irreducible, Potential, ShiftSystem, SubsetSpec, Word};
use cp_pressure::thermo::{block_recode, equilibrium_markov, transfer_pressure, vp_residual};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_irreducible_sft, random_potential};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_counts_match_enumeration(seed in any::<u64>(), n in 1usize..8) {
        let s = random_irreducible_sft(&mut rng(seed), 4);
        prop_assert_eq!(s.word_count(n), admissible_words(&s, n).len() as u128);
    }

    #[test]
    fn birkhoff_sup_matches_brute_force(seed in any::<u64>(), n in 1usize..5, len in 1usize..4) {
        let mut r = rng(seed);
        let s = random_irreducible_sft(&mut r, 3);
        let phi = random_potential(&mut r, &s, 1 + (seed % 3) as usize, 1.0);
        let words = admissible_words(&s, len);
        let w = &words[r.gen_range(0..words.len())];
        let need = (n + phi.depth() - 1).max(len);
        let brute = admissible_words(&s, need)
            .iter()
            .filter(|x| x.symbols().starts_with(w.symbols()))
            .map(|x| phi.birkhoff_exact(x.symbols(), n))
            .fold(f64::NEG_INFINITY, f64::max);
        let got = birkhoff_sup(&s, &phi, w, n).unwrap();
        prop_assert!((got - brute).abs() <= 1e-12, "{} vs {}", got, brute);
    }

    #[test]
    fn gibbs_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_irreducible_sft(&mut r, 6);
        let phi = random_potential(&mut r, &s, 1 + (seed % 2) as usize, 2.0);
        let eq = equilibrium_markov(&s, &phi).unwrap();
        prop_assert!((eq.log_lambda - eq.entropy - eq.potential_integral).abs() <= 1e-9);
    }

    #[test]
    fn variational_residual_nonnegative(seed in any::<u64>(), eps in 0.01f64..0.99) {
        let mut r = rng(seed);
        let s = random_irreducible_sft(&mut r, 5);
        let phi = random_potential(&mut r, &s, 1 + (seed % 2) as usize, 1.5);
        let eq = equilibrium_markov(&s, &phi).unwrap();
        let mu = eq.measure.perturbed(&mut r, eps).unwrap();
        prop_assert!(vp_residual(&s, &phi, &mu).unwrap() >= -1e-9);
    }

    #[test]
    fn recoding_preserves_pressure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_irreducible_sft(&mut r, 4);
        let phi = random_potential(&mut r, &s, 2 + (seed % 2) as usize, 1.0);
        let rec = block_recode(&s, &phi).unwrap();
        let direct = transfer_pressure(&rec.system, &rec.potential).unwrap();
        let deeper = transfer_pressure(&s, &phi.deepened(&s, phi.depth() + 1).unwrap()).unwrap();
        prop_assert!((direct - deeper).abs() <= 1e-9);
    }

    #[test]
    fn oracle_is_lipschitz(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_irreducible_sft(&mut r, 5);
        let phi = random_potential(&mut r, &s, 1 + (seed % 2) as usize, 2.0);
        let psi = random_potential(&mut r, &s, phi.depth(), 2.0);
        let norm = phi.difference(&s, &psi).unwrap().sup_norm(&s);
        let gap = (transfer_pressure(&s, &phi).unwrap() - transfer_pressure(&s, &psi).unwrap()).abs();
        prop_assert!(gap <= norm + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weight_m_nonincreasing_in_alpha(seed in any::<u64>(), a in -1.0f64..2.0, da in 0.0f64..1.0, n in 2usize..6) {
        let mut r = rng(seed);
        let s = random_irreducible_sft(&mut r, 3);
        let phi = random_potential(&mut r, &s, 1, 1.0);
        let cover = Cover::new(&s, 1).unwrap();
        let lo = weight_m(&s, &SubsetSpec::Whole, &phi, &cover, a, n, Some(n + 4)).unwrap();
        let hi = weight_m(&s, &SubsetSpec::Whole, &phi, &cover, a + da, n, Some(n + 4)).unwrap();
        prop_assert!(hi.log_value <= lo.log_value + 1e-12);
    }

    #[test]
    fn cover_pressure_matches_oracle_on_full_shifts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = ShiftSystem::full_shift(r.gen_range(2..=4)).unwrap();
        let phi = random_potential(&mut r, &s, 1 + (seed % 2) as usize, 1.0);
        let cover = Cover::new(&s, phi.depth()).unwrap();
        let settings = PressureSettings::default().with_n_max(32);
        let est = critical_alpha(&s, &SubsetSpec::Whole, &phi, &cover, &settings).unwrap();
        let oracle = transfer_pressure(&s, &phi).unwrap();
        prop_assert!((est.value - oracle).abs() <= 1e-4, "{} vs {}", est.value, oracle);
    }

    #[test]
    fn chain_monotonicity_and_unions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = ShiftSystem::full_shift(2).unwrap();
        let phi = random_potential(&mut r, &s, 1, 1.0);
        let cover = Cover::new(&s, 1).unwrap();
        let settings = PressureSettings::default();
        let tol = settings.tol;
        let a: Vec<usize> = (0..r.gen_range(1..4)).map(|_| r.gen_range(0..2)).collect();
        let b: Vec<usize> = (0..r.gen_range(1..4)).map(|_| r.gen_range(0..2)).collect();
        let outer = SubsetSpec::cylinders([Word::from_symbols(a[..1].to_vec())]);
        let inner = SubsetSpec::cylinders([Word::from_symbols(a.clone())]);
        let p = |z: &SubsetSpec| critical_alpha(&s, z, &phi, &cover, &settings).unwrap().value;
        let (lo, hi) = capacity_pressures(&s, &inner, &phi, &cover, settings.n_max).unwrap();
        let p_inner = p(&inner);
        prop_assert!(p_inner <= lo.value + 2.0 * tol && lo.value <= hi.value + 2.0 * tol);
        prop_assert!(p_inner <= p(&outer) + 2.0 * tol);
        let union = SubsetSpec::cylinders([Word::from_symbols(a.clone()), Word::from_symbols(b.clone())]);
        let other = SubsetSpec::cylinders([Word::from_symbols(b)]);
        prop_assert!((p(&union) - p_inner.max(p(&other))).abs() <= 2.0 * tol);
    }

    #[test]
    fn invariant_sub_sft_pressures_coincide(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = ShiftSystem::full_shift(3).unwrap();
        let m = loop {
            let m: Vec<Vec<u8>> = (0..3).map(|_| (0..3).map(|_| u8::from(r.gen_bool(0.7))).collect()).collect();
            if sub_sft_is_irreducible(&m) && ShiftSystem::new(&m, s.sidedness()).map(|x| x.is_primitive()).unwrap_or(false) {
                break m;
            }
        };
        let sub = ShiftSystem::new(&m, s.sidedness()).unwrap();
        let phi = random_potential(&mut r, &s, 1, 0.5);
        let cover = Cover::new(&s, 1).unwrap();
        let z = SubsetSpec::sub_sft(m);
        let settings = PressureSettings::default().with_n_max(40);
        let p = critical_alpha(&s, &z, &phi, &cover, &settings).unwrap().value;
        let (lo, hi) = capacity_pressures(&s, &z, &phi, &cover, settings.n_max).unwrap();
        let sub_phi = Potential::symbol_values(&sub, phi.table(), "restricted").unwrap();
        let oracle = transfer_pressure(&sub, &sub_phi).unwrap();
        for v in [p, lo.value, hi.value] {
            prop_assert!((v - oracle).abs() <= 1e-3, "{} vs {}", v, oracle);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lebesgue_number_positive_for_admissible_covers(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let xs: Vec<f64> = (0..n).map(|_| r.gen_range(-5.0..5.0)).collect();
        let mut d: Vec<Vec<f64>> = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
        // coincident samples would violate d(x, y) > 0
        for i in 0..n {
            for j in 0..n {
                if i != j && d[i][j] == 0.0 {
                    d[i][j] = 1e-9;
                }
            }
        }
        let probe = FiniteMetricModel::with_all_compact(d.clone(), vec![]).unwrap();
        let mut cover: Vec<Vec<usize>> = (0..n).map(|c| probe.ball(c, r.gen_range(0.1..3.0))).collect();
        for _ in 0..r.gen_range(0..3) {
            cover.push((0..n).filter(|_| r.gen_bool(0.5)).collect());
        }
        let model = FiniteMetricModel::with_all_compact(d, cover).unwrap();
        let delta = lebesgue_number(&model).unwrap();
        prop_assert!(delta > 0.0);
        if n > 1 {
            for x in 0..n {
                let ball = model.ball(x, delta);
                prop_assert!(model.cover().iter().any(|e| ball.iter().all(|p| e.members.contains(p))));
            }
        }
    }
}

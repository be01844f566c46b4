//! Task dispatch.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use cp_pressure::compactify::{compactification_transfer_check, gap_example, CircleBudget, RadialPotential};
use cp_pressure::multifractal::{
    central_difference_check, correlation_entropy, legendre_check, local_entropy_check_measure, t_curve,
    EntropyTolerance,
};
use cp_pressure::pressure::{capacity_pressures, pressure_refined, Cover, NRow, PressureSettings};
use cp_pressure::symbolic::{Potential, ShiftSystem, Sidedness, SubsetSpec};
use cp_pressure::thermo::{
    equilibrium_markov, inverse_vp_probe, power_pressure_check, transfer_pressure, vp_residual, MarkovMeasure,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Budget, ExperimentConfig, PotentialSpec, SystemSpec, TaskConfig, TaskKind};
use crate::error::CliError;
use crate::report::{CheckEntry, Reported, RunReport, Table, TaskReport};

type Res<T> = cp_pressure::Result<T>;

/// Bound for identities that hold exactly up to rounding.
const EXACT: f64 = 1e-9;

#[derive(Default)]
struct Parts {
    values: Vec<Reported>,
    checks: Vec<CheckEntry>,
    warnings: Vec<String>,
    table: Option<Table>,
}

/// Runs every task of `config` on a pool of at most `jobs` threads.
pub fn run(config: &ExperimentConfig, jobs: usize) -> Result<RunReport, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Other(format!("worker pool: {e}")))?;
    let tasks = pool.install(|| {
        config
            .tasks
            .par_iter()
            .enumerate()
            .map(|(i, task)| run_task(config, task, config.seed.wrapping_add(i as u64)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(RunReport::new(config.seed, tasks))
}

fn run_task(config: &ExperimentConfig, task: &TaskConfig, seed: u64) -> Result<TaskReport, CliError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = &task.budget;
    let parts = match (&config.system, &config.potential) {
        (SystemSpec::Shift(s), PotentialSpec::Shift(phi)) => match task.kind {
            TaskKind::Pressure => pressure(s, phi, &config.subset, b),
            TaskKind::Capacity => capacity(s, phi, &config.subset, b),
            TaskKind::Spectrum => spectrum(s, phi, b),
            TaskKind::Correlation => correlation(s, phi, b),
            TaskKind::VpCheck => vp_check(s, phi, b, &mut rng),
            TaskKind::InverseVp => inverse_vp(s, phi, b),
            TaskKind::PropertySuite => property_suite(b, &mut rng),
            TaskKind::GapExample | TaskKind::TransferCheck => unreachable!("rejected during validation"),
        },
        (SystemSpec::LineDoubling, PotentialSpec::Radial(phi)) => match task.kind {
            TaskKind::GapExample => gap(phi, b),
            TaskKind::TransferCheck => transfer(phi, b),
            TaskKind::PropertySuite => property_suite(b, &mut rng),
            _ => unreachable!("rejected during validation"),
        },
        _ => unreachable!("potential resolved against its system"),
    }
    .map_err(|source| CliError::Task { task: task.name.clone(), source })?;
    Ok(TaskReport {
        name: task.name.clone(),
        kind: task.kind.as_str(),
        values: parts.values,
        checks: parts.checks,
        warnings: parts.warnings,
        table: parts.table,
        wall_clock: start.elapsed(),
    })
}

fn settings(b: &Budget) -> PressureSettings<f64> {
    PressureSettings { n_max: b.n_max, headroom: b.headroom, tol: b.tol, ..PressureSettings::default() }
}

fn pressure_rows(rows: &[NRow<f64>]) -> Table {
    Table::Pressure(
        rows.iter()
            .filter(|r| r.log_weight.is_finite() && r.slope.is_finite())
            .map(|r| (r.n, r.log_weight, r.slope))
            .collect(),
    )
}

/// Exact pressure of `z` when it is the whole system or an irreducible sub-SFT.
fn subset_oracle(s: &ShiftSystem, phi: &Potential<f64>, z: &SubsetSpec) -> Option<f64> {
    match z {
        SubsetSpec::Whole if s.is_irreducible() => transfer_pressure(s, phi).ok(),
        SubsetSpec::SubSft { adjacency } => {
            let sub = ShiftSystem::new(adjacency, s.sidedness()).ok().filter(ShiftSystem::is_irreducible)?;
            let restricted = Potential::new(&sub, phi.depth(), phi.table().to_vec(), phi.name()).ok()?;
            transfer_pressure(&sub, &restricted).ok()
        }
        _ => None,
    }
}

fn judged(name: &str, value: f64, oracle: Option<f64>, b: &Budget, parts: &mut Parts) {
    match oracle {
        Some(o) => {
            parts.values.push(Reported::against(name, value, b.check_tol, "transfer matrix", o));
            parts.checks.push(CheckEntry::at_most(format!("{name} vs transfer matrix"), (value - o).abs(), b.check_tol));
        }
        None => parts.values.push(Reported::estimate(name, value, b.tol)),
    }
}

fn pressure(s: &ShiftSystem, phi: &Potential<f64>, z: &SubsetSpec, b: &Budget) -> Res<Parts> {
    let mut parts = Parts::default();
    let refined = pressure_refined(s, z, phi, &b.depths, &settings(b))?;
    let cover = Cover::new(s, *b.depths.last().expect("validated nonempty"))?;
    let (lo, hi) = capacity_pressures(s, z, phi, &cover, b.n_max)?;
    let oracle = subset_oracle(s, phi, z);
    judged("P", refined.value, oracle, b, &mut parts);
    parts.values.push(Reported::estimate("CP_lower", lo.value, b.tol));
    parts.values.push(Reported::estimate("CP_upper", hi.value, b.tol));
    let slack = 2.0 * b.tol;
    parts.checks.push(CheckEntry::at_most("P - CP_lower", refined.value - lo.value, slack));
    parts.checks.push(CheckEntry::at_most("CP_lower - CP_upper", lo.value - hi.value, slack));
    parts.warnings.extend(refined.warnings);
    if lo.degenerate {
        parts.warnings.push("subset is empty; pressures are -inf".into());
        parts.checks.retain(|c| c.value.is_finite());
    }
    parts.table = Some(pressure_rows(&hi.diagnostics));
    Ok(parts)
}

fn capacity(s: &ShiftSystem, phi: &Potential<f64>, z: &SubsetSpec, b: &Budget) -> Res<Parts> {
    let mut parts = Parts::default();
    let cover = Cover::new(s, *b.depths.last().expect("validated nonempty"))?;
    let (lo, hi) = capacity_pressures(s, z, phi, &cover, b.n_max)?;
    let oracle = subset_oracle(s, phi, z);
    judged("CP_lower", lo.value, oracle, b, &mut parts);
    judged("CP_upper", hi.value, oracle, b, &mut parts);
    parts.checks.push(CheckEntry::at_most("CP_lower - CP_upper", lo.value - hi.value, 2.0 * b.tol));
    if lo.degenerate {
        parts.warnings.push("subset is empty; pressures are -inf".into());
        parts.checks.retain(|c| c.value.is_finite());
    }
    parts.table = Some(pressure_rows(&hi.diagnostics));
    Ok(parts)
}

fn spectrum(s: &ShiftSystem, phi: &Potential<f64>, b: &Budget) -> Res<Parts> {
    let mut parts = Parts::default();
    let curve = t_curve(s, phi, &b.q_grid)?;
    parts.values.push(Reported::against("P", curve.pressure, EXACT, "transfer matrix", curve.pressure));
    parts.values.push(Reported::against("h_top", curve.entropy, EXACT, "transfer matrix", curve.entropy));
    parts.checks.extend(curve.invariant_checks(EXACT).into_iter().map(CheckEntry::from));
    let slope = central_difference_check(s, phi, &b.q_grid, 1e-4)?;
    parts.checks.push(CheckEntry::at_most("alpha vs central difference of T", slope, 1e-6));
    let legendre = legendre_check(&curve);
    if legendre.skipped {
        parts.warnings.push("spectrum is degenerate; Legendre duality not tested".into());
    } else {
        parts.checks.push(CheckEntry::at_most("Legendre forward defect", legendre.forward_defect, 1e-4));
        parts.checks.push(CheckEntry::at_most("Legendre reverse defect", legendre.reverse_defect, 1e-4));
    }
    let rows = (0..curve.q_grid.len())
        .map(|i| [curve.q_grid[i], curve.t_values[i], curve.alpha_values[i], curve.spectrum_values[i]])
        .collect();
    parts.table = Some(Table::Spectrum(rows));
    Ok(parts)
}

fn correlation(s: &ShiftSystem, phi: &Potential<f64>, b: &Budget) -> Res<Parts> {
    let mut parts = Parts::default();
    let c = correlation_entropy(s, phi, &b.q_grid, b.n)?;
    for ((&q, &f), &d) in c.q_grid.iter().zip(&c.formula_values).zip(&c.direct_values) {
        let name = format!("h(q={q})");
        parts.values.push(Reported::against(&name, f, b.check_tol, "cylinder Renyi sum", d));
        parts.checks.push(CheckEntry::at_most(format!("{name} formula vs direct"), (f - d).abs(), b.check_tol));
    }
    if let Some(i) = c.q_grid.iter().position(|&q| q == 0.0) {
        let h_top = transfer_pressure(s, &Potential::<f64>::zero(s))?;
        parts.checks.push(CheckEntry::at_most("h(q=0) vs h_top", (c.formula_values[i] - h_top).abs(), EXACT));
    }
    let h = c.measure_entropy;
    parts.values.push(Reported::against("h(q->1-)", c.near_one.0, b.check_tol, "h_mu", h));
    parts.values.push(Reported::against("h(q->1+)", c.near_one.1, b.check_tol, "h_mu", h));
    let limit = (c.near_one.0 - h).abs().max((c.near_one.1 - h).abs());
    parts.checks.push(CheckEntry::at_most("q->1 limit vs h_mu", limit, b.check_tol));
    let rows = (0..c.q_grid.len()).map(|i| [c.q_grid[i], c.formula_values[i], c.direct_values[i]]).collect();
    parts.table = Some(Table::Correlation(rows));
    Ok(parts)
}

fn vp_check(s: &ShiftSystem, phi: &Potential<f64>, b: &Budget, rng: &mut ChaCha8Rng) -> Res<Parts> {
    let mut parts = Parts::default();
    let eq = equilibrium_markov(s, phi)?;
    let p = transfer_pressure(s, phi)?;
    let free = eq.entropy + eq.potential_integral;
    parts.values.push(Reported::against("h + integral at equilibrium", free, EXACT, "transfer matrix", p));
    parts.checks.push(CheckEntry::at_most("Gibbs identity", (eq.log_lambda - free).abs(), EXACT));
    parts.checks.push(CheckEntry::at_most("residual at equilibrium", vp_residual(s, phi, &eq.measure)?.abs(), EXACT));
    let mut worst = f64::INFINITY;
    for _ in 0..b.samples {
        let eps = rng.gen_range(0.01..0.99);
        let mu = eq.measure.perturbed(rng, eps)?;
        worst = worst.min(vp_residual(s, phi, &mu)?);
    }
    parts.checks.push(CheckEntry::at_least("min residual over perturbed measures", worst, -EXACT));
    Ok(parts)
}

fn inverse_vp(s: &ShiftSystem, phi: &Potential<f64>, b: &Budget) -> Res<Parts> {
    let mut parts = Parts::default();
    let eq = equilibrium_markov(s, phi)?;
    let probe = inverse_vp_probe(s, phi, &eq.measure, b.n)?;
    parts.values.push(Reported::against("typical-set pressure", probe.value, b.check_tol, "transfer matrix", probe.pressure));
    parts.values.push(Reported::against("h + integral", probe.free_energy, EXACT, "transfer matrix", probe.pressure));
    parts.checks.push(CheckEntry::at_most("typical-set pressure - P", probe.value - probe.pressure, 2.0 * b.tol));
    parts.checks.push(CheckEntry::at_most("free energy vs P", (probe.free_energy - probe.pressure).abs(), EXACT));
    if (probe.value - probe.pressure).abs() > b.check_tol {
        parts.warnings.push(format!(
            "typical-set pressure at n = {} is {:.3e} from P; increase n",
            b.n,
            (probe.value - probe.pressure).abs()
        ));
    }
    Ok(parts)
}

fn circle_budget(b: &Budget) -> CircleBudget<f64> {
    CircleBudget { arcs: b.arcs, n_max: b.n_max, headroom: b.headroom, tol: b.tol }
}

fn gap(phi: &RadialPotential<f64>, b: &Budget) -> Res<Parts> {
    let mut parts = Parts::default();
    if phi.name() != RadialPotential::<f64>::arccot().name() {
        parts.warnings.push(format!("the gap example always uses arccot, not {:?}", phi.name()));
    }
    let g = gap_example(&circle_budget(b))?;
    let t = g.estimator_tolerance;
    parts.values.push(Reported::against("gap", g.gap, 0.0, "pi - pi/2", PI - FRAC_PI_2));
    parts.values.push(Reported::against("P compactified", g.pressure_compactified, 0.0, "inventory", PI));
    parts.values.push(Reported::against("sup over M(X,f)", g.sup_over_m_x_f, 0.0, "inventory", FRAC_PI_2));
    parts.values.push(Reported::against("estimated pressure", g.estimated_pressure, t, "inventory", PI));
    parts.values.push(Reported::against("estimated entropy", g.estimated_entropy, t, "inventory", 0.0));
    parts.checks.push(CheckEntry::at_most("gap - pi/2", (g.gap - (PI - FRAC_PI_2)).abs(), 0.0));
    parts.checks.push(CheckEntry::at_most("estimated pressure vs pi", (g.estimated_pressure - PI).abs(), t));
    parts.checks.push(CheckEntry::at_most("estimated entropy", g.estimated_entropy.abs(), t));
    parts.checks.push(CheckEntry::flag("certificate holds", g.holds()));
    Ok(parts)
}

fn transfer(phi: &RadialPotential<f64>, b: &Budget) -> Res<Parts> {
    let mut parts = Parts::default();
    let t = compactification_transfer_check(phi, b.circle_subset, &circle_budget(b))?;
    let oracle_name = "max over fixed points";
    parts.values.push(Reported::against("line-cover pressure", t.line.value, b.check_tol, oracle_name, t.oracle));
    parts.values.push(Reported::against("circle-cover pressure", t.circle.value, b.check_tol, oracle_name, t.oracle));
    parts.checks.push(CheckEntry::at_most("line vs circle", t.difference(), 2.0 * b.tol));
    parts.checks.push(CheckEntry::at_most("line vs oracle", (t.line.value - t.oracle).abs(), b.check_tol));
    parts.checks.push(CheckEntry::at_most("circle vs oracle", (t.circle.value - t.oracle).abs(), b.check_tol));
    Ok(parts)
}

fn random_system(rng: &mut ChaCha8Rng, max_dim: usize) -> ShiftSystem {
    loop {
        let k = rng.gen_range(2..=max_dim);
        let m: Vec<Vec<u8>> = (0..k).map(|_| (0..k).map(|_| u8::from(rng.gen_bool(0.6))).collect()).collect();
        if let Ok(s) = ShiftSystem::new(&m, Sidedness::OneSided) {
            if s.is_irreducible() {
                return s;
            }
        }
    }
}

fn random_potential(rng: &mut ChaCha8Rng, s: &ShiftSystem, depth: usize) -> Potential<f64> {
    let size = s.alphabet_size().pow(depth as u32);
    let table = (0..size).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    Potential::new(s, depth, table, "random").expect("finite table")
}

/// Randomized invariant checks on `count` random irreducible systems.
fn property_suite(b: &Budget, rng: &mut ChaCha8Rng) -> Res<Parts> {
    let mut parts = Parts::default();
    let (mut gibbs, mut lipschitz, mut power) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let mut residual = f64::INFINITY;
    for i in 0..b.count {
        let s = random_system(rng, 5);
        let phi = random_potential(rng, &s, 1 + i % 2);
        let eq = equilibrium_markov(&s, &phi)?;
        gibbs = gibbs.max((eq.log_lambda - eq.entropy - eq.potential_integral).abs());
        let eps = rng.gen_range(0.01..0.99);
        let mu = eq.measure.perturbed(rng, eps)?;
        residual = residual.min(vp_residual(&s, &phi, &mu)?);
        let psi = random_potential(rng, &s, phi.depth());
        let norm = phi.difference(&s, &psi)?.sup_norm(&s);
        lipschitz = lipschitz.max((eq.log_lambda - transfer_pressure(&s, &psi)?).abs() - norm);
        // powers of a periodic system split into several components
        if s.is_primitive() {
            for k in [2, 3] {
                let (lhs, rhs) = power_pressure_check(&s, &phi, k)?;
                power = power.max((lhs - rhs).abs());
            }
        }
    }
    parts.checks.push(CheckEntry::at_most("Gibbs identity", gibbs, EXACT));
    parts.checks.push(CheckEntry::at_least("variational residual", residual, -EXACT));
    parts.checks.push(CheckEntry::at_most("Lipschitz excess", lipschitz, EXACT));
    parts.checks.push(CheckEntry::at_most("power identity", power, EXACT));
    let two = ShiftSystem::full_shift(2)?;
    let mu = MarkovMeasure::bernoulli(&two, &[1.0 / 3.0, 2.0 / 3.0])?;
    let local = local_entropy_check_measure(&mu, b.samples, b.n, EntropyTolerance::Fixed { value: 0.05 }, rng)?;
    parts.values.push(Reported::against("mean local entropy", local.mean, 0.05, "h_mu", local.measure_entropy));
    parts.checks.push(CheckEntry::at_least("fraction of local entropies within 0.05", local.fraction_within, 0.9));
    Ok(parts)
}

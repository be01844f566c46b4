//! Experiment configuration: TOML schema, defaults and validation.

use std::path::PathBuf;

use cp_pressure::compactify::{CircleSubset, RadialPotential};
use cp_pressure::symbolic::{Potential, ShiftSystem, Sidedness, SubsetSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// What a task computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Pressure,
    Capacity,
    Spectrum,
    Correlation,
    VpCheck,
    InverseVp,
    GapExample,
    TransferCheck,
    PropertySuite,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Pressure => "pressure",
            TaskKind::Capacity => "capacity",
            TaskKind::Spectrum => "spectrum",
            TaskKind::Correlation => "correlation",
            TaskKind::VpCheck => "vp_check",
            TaskKind::InverseVp => "inverse_vp",
            TaskKind::GapExample => "gap_example",
            TaskKind::TransferCheck => "transfer_check",
            TaskKind::PropertySuite => "property_suite",
        }
    }

    fn needs_shift(self) -> bool {
        !matches!(self, TaskKind::GapExample | TaskKind::TransferCheck | TaskKind::PropertySuite)
    }

    fn needs_line(self) -> bool {
        matches!(self, TaskKind::GapExample | TaskKind::TransferCheck)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    tol: Option<f64>,
    system: Option<RawSystem>,
    potential: Option<RawPotential>,
    subset: Option<SubsetSpec>,
    #[serde(default)]
    budget: RawBudget,
    #[serde(default)]
    tasks: Vec<RawTask>,
    output: Option<RawOutput>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SystemKind {
    FullShift,
    Sft,
    LineDoubling,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    kind: SystemKind,
    k: Option<usize>,
    matrix: Option<Vec<Vec<u8>>>,
    sidedness: Option<Sidedness>,
}

impl RawSystem {
    fn line() -> Self {
        RawSystem { kind: SystemKind::LineDoubling, k: None, matrix: None, sidedness: None }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    depth: Option<usize>,
    table: Option<Vec<f64>>,
    named: Option<String>,
    constant: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawGrid {
    List(Vec<f64>),
    Range { lo: f64, hi: f64, step: f64 },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    depths: Option<Vec<usize>>,
    n_max: Option<usize>,
    headroom: Option<usize>,
    tol: Option<f64>,
    check_tol: Option<f64>,
    q_grid: Option<RawGrid>,
    n: Option<usize>,
    samples: Option<usize>,
    count: Option<usize>,
    arcs: Option<usize>,
    circle_subset: Option<CircleSubset>,
}

impl RawBudget {
    fn overlay(&self, over: &RawBudget) -> RawBudget {
        RawBudget {
            depths: over.depths.clone().or_else(|| self.depths.clone()),
            n_max: over.n_max.or(self.n_max),
            headroom: over.headroom.or(self.headroom),
            tol: over.tol.or(self.tol),
            check_tol: over.check_tol.or(self.check_tol),
            q_grid: over.q_grid.clone().or_else(|| self.q_grid.clone()),
            n: over.n.or(self.n),
            samples: over.samples.or(self.samples),
            count: over.count.or(self.count),
            arcs: over.arcs.or(self.arcs),
            circle_subset: over.circle_subset.or(self.circle_subset),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    kind: TaskKind,
    name: Option<String>,
    #[serde(default)]
    budget: RawBudget,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum SystemSpec {
    Shift(ShiftSystem),
    LineDoubling,
}

#[derive(Debug, Clone)]
pub enum PotentialSpec {
    Shift(Potential<f64>),
    Radial(RadialPotential<f64>),
}

/// Numeric budget of one task, with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Budget {
    pub depths: Vec<usize>,
    pub n_max: usize,
    pub headroom: usize,
    pub tol: f64,
    pub check_tol: f64,
    pub q_grid: Vec<f64>,
    pub n: usize,
    pub samples: usize,
    pub count: usize,
    pub arcs: usize,
    pub circle_subset: CircleSubset,
}

#[derive(Debug, Clone)]
pub struct TaskConfig {
    pub name: String,
    pub kind: TaskKind,
    pub budget: Budget,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub system: SystemSpec,
    pub potential: PotentialSpec,
    pub subset: SubsetSpec,
    pub tasks: Vec<TaskConfig>,
    pub out_dir: Option<PathBuf>,
    base_budget: Option<RawBudget>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

fn err(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, overrides: Overrides) -> Result<Self, CliError> {
        let de = toml::Deserializer::new(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "<root>".to_string() } else { path };
            let message = e.into_inner().message().trim().to_string();
            err(path, message)
        })?;
        Self::from_raw(raw, overrides, None)
    }

    pub fn from_file(path: &std::path::Path, overrides: Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::from_toml_str(&text, overrides)
    }

    /// Configuration with no file: the given task on a default system.
    pub fn default_for(kind: TaskKind, overrides: Overrides) -> Result<Self, CliError> {
        let system = if kind.needs_line() { Some(RawSystem::line()) } else { None };
        let raw = RawConfig {
            seed: None,
            tol: None,
            system,
            potential: None,
            subset: None,
            budget: RawBudget::default(),
            tasks: Vec::new(),
            output: None,
        };
        Self::from_raw(raw, overrides, Some(kind))
    }

    /// Keeps the tasks of `kind`, or synthesizes one from the top-level budget.
    pub fn select(mut self, kind: TaskKind) -> Result<Self, CliError> {
        self.tasks.retain(|t| t.kind == kind);
        if self.tasks.is_empty() {
            let budget = self.base_budget.clone().unwrap_or_default();
            let task = resolve_task(kind, None, &budget, &self, "budget")?;
            self.tasks.push(task);
        }
        Ok(self)
    }

    fn from_raw(raw: RawConfig, overrides: Overrides, single: Option<TaskKind>) -> Result<Self, CliError> {
        let system = match raw.system {
            None => SystemSpec::Shift(ShiftSystem::full_shift(2).expect("two symbols")),
            Some(sys) => resolve_system(sys)?,
        };
        let potential = resolve_potential(&system, raw.potential.unwrap_or_default())?;
        let subset = raw.subset.unwrap_or(SubsetSpec::Whole);
        if let SystemSpec::Shift(s) = &system {
            subset.validate(s).map_err(|e| err("subset", e.to_string()))?;
        } else if subset != SubsetSpec::Whole {
            return Err(err("subset", "subsets apply to shift systems; use budget.circle_subset"));
        }
        let mut base = raw.budget;
        if let Some(t) = raw.tol {
            base.tol = base.tol.or(Some(t));
        }
        let mut config = ExperimentConfig {
            seed: overrides.seed.or(raw.seed).unwrap_or(DEFAULT_SEED),
            system,
            potential,
            subset,
            tasks: Vec::new(),
            out_dir: raw.output.and_then(|o| o.dir),
            base_budget: None,
        };
        let mut base_for_tasks = base.clone();
        if let Some(t) = overrides.tol {
            base_for_tasks.tol = Some(t);
        }
        let mut names: Vec<String> = Vec::new();
        for (i, task) in raw.tasks.iter().enumerate() {
            let mut merged = base_for_tasks.overlay(&task.budget);
            if let Some(t) = overrides.tol {
                merged.tol = Some(t);
            }
            let path = format!("tasks[{i}]");
            let mut t = resolve_task(task.kind, task.name.clone(), &merged, &config, &path)?;
            if task.name.is_none() {
                t.name = unique_name(task.kind.as_str(), &names);
            } else if names.contains(&t.name) {
                return Err(err(format!("{path}.name"), format!("duplicate task name {:?}", t.name)));
            }
            names.push(t.name.clone());
            config.tasks.push(t);
        }
        config.base_budget = Some(base_for_tasks);
        match single {
            Some(kind) => config.select(kind),
            None => Ok(config),
        }
    }
}

fn unique_name(base: &str, taken: &[String]) -> String {
    if !taken.iter().any(|t| t == base) {
        return base.to_string();
    }
    (2..).map(|i| format!("{base}-{i}")).find(|n| !taken.contains(n)).expect("unbounded")
}

fn resolve_system(raw: RawSystem) -> Result<SystemSpec, CliError> {
    let sidedness = raw.sidedness.unwrap_or(Sidedness::OneSided);
    let unused = |field: &str, present: bool| -> Result<(), CliError> {
        if present {
            Err(err(format!("system.{field}"), "not used by this system kind"))
        } else {
            Ok(())
        }
    };
    match raw.kind {
        SystemKind::FullShift => {
            unused("matrix", raw.matrix.is_some())?;
            let k = raw.k.ok_or_else(|| err("system.k", "required for full_shift"))?;
            let s = ShiftSystem::full_shift(k).map_err(|e| err("system.k", e.to_string()))?;
            Ok(SystemSpec::Shift(s.with_sidedness(sidedness)))
        }
        SystemKind::Sft => {
            unused("k", raw.k.is_some())?;
            let matrix = raw.matrix.ok_or_else(|| err("system.matrix", "required for sft"))?;
            let k = matrix.len();
            if let Some(i) = matrix.iter().position(|r| r.len() != k) {
                return Err(err(
                    format!("system.matrix[{i}]"),
                    format!("row has length {}, matrix must be square ({k}x{k})", matrix[i].len()),
                ));
            }
            let s = ShiftSystem::new(&matrix, sidedness).map_err(|e| err("system.matrix", e.to_string()))?;
            Ok(SystemSpec::Shift(s))
        }
        SystemKind::LineDoubling => {
            unused("k", raw.k.is_some())?;
            unused("matrix", raw.matrix.is_some())?;
            unused("sidedness", raw.sidedness.is_some())?;
            Ok(SystemSpec::LineDoubling)
        }
    }
}

fn resolve_potential(system: &SystemSpec, raw: RawPotential) -> Result<PotentialSpec, CliError> {
    match system {
        SystemSpec::LineDoubling => {
            if raw.table.is_some() || raw.depth.is_some() {
                return Err(err("potential.table", "tables apply to shift systems; use named or constant"));
            }
            match (raw.named.as_deref(), raw.constant) {
                (Some(_), Some(_)) => Err(err("potential", "give either named or constant")),
                (None, Some(c)) if c.is_finite() => Ok(PotentialSpec::Radial(RadialPotential::constant(c))),
                (None, Some(_)) => Err(err("potential.constant", "must be finite")),
                (None | Some("arccot"), None) => Ok(PotentialSpec::Radial(RadialPotential::arccot())),
                (Some(other), None) => Err(err("potential.named", format!("unknown potential {other:?}; expected \"arccot\""))),
            }
        }
        SystemSpec::Shift(s) => {
            let given = [raw.table.is_some(), raw.named.is_some(), raw.constant.is_some()];
            if given.iter().filter(|&&g| g).count() > 1 {
                return Err(err("potential", "give exactly one of table, named or constant"));
            }
            if let Some(table) = raw.table {
                let depth = raw.depth.unwrap_or(1);
                if depth == 0 {
                    return Err(err("potential.depth", "must be at least 1"));
                }
                return Potential::new(s, depth, table, "table")
                    .map(PotentialSpec::Shift)
                    .map_err(|e| err("potential.table", e.to_string()));
            }
            if raw.depth.is_some() {
                return Err(err("potential.depth", "depth requires a table"));
            }
            if let Some(c) = raw.constant {
                if !c.is_finite() {
                    return Err(err("potential.constant", "must be finite"));
                }
                return Ok(PotentialSpec::Shift(Potential::constant(s, c)));
            }
            match raw.named.as_deref() {
                None | Some("zero") => Ok(PotentialSpec::Shift(Potential::zero(s))),
                Some(other) => Err(err("potential.named", format!("unknown potential {other:?}; expected \"zero\""))),
            }
        }
    }
}

fn resolve_task(
    kind: TaskKind,
    name: Option<String>,
    raw: &RawBudget,
    config: &ExperimentConfig,
    path: &str,
) -> Result<TaskConfig, CliError> {
    match (&config.system, kind.needs_shift(), kind.needs_line()) {
        (SystemSpec::LineDoubling, true, _) => {
            return Err(err(format!("{path}.kind"), format!("{} requires a shift system", kind.as_str())))
        }
        (SystemSpec::Shift(_), _, true) => {
            return Err(err(format!("{path}.kind"), format!("{} requires system.kind = \"line_doubling\"", kind.as_str())))
        }
        _ => {}
    }
    if let Some(n) = &name {
        if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(err(format!("{path}.name"), "names use letters, digits, '-' and '_'"));
        }
        let reserved = ["pressure", "spectrum", "correlation", "summary"];
        if reserved.contains(&n.as_str()) && n != kind.as_str() {
            return Err(err(format!("{path}.name"), format!("{n:?} is reserved")));
        }
    }
    let bpath = if path == "budget" { "budget".to_string() } else { format!("{path}.budget") };
    let field = |f: &str| format!("{bpath}.{f}");
    let positive = |v: Option<usize>, default: usize, f: &str| -> Result<usize, CliError> {
        match v {
            Some(0) => Err(err(field(f), "must be positive")),
            Some(x) => Ok(x),
            None => Ok(default),
        }
    };
    let positive_real = |v: Option<f64>, default: f64, f: &str| -> Result<f64, CliError> {
        match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(err(field(f), "must be positive and finite")),
            Some(x) => Ok(x),
            None => Ok(default),
        }
    };
    let pot_depth = match &config.potential {
        PotentialSpec::Shift(p) => p.depth(),
        PotentialSpec::Radial(_) => 1,
    };
    let depths = raw.depths.clone().unwrap_or_else(|| vec![pot_depth]);
    if depths.is_empty() {
        return Err(err(field("depths"), "must not be empty"));
    }
    if depths.windows(2).any(|d| d[0] >= d[1]) {
        return Err(err(field("depths"), "must be strictly increasing"));
    }
    if depths[0] < pot_depth {
        return Err(err(field("depths"), format!("cover depth {} is below the potential depth {pot_depth}", depths[0])));
    }
    let line = kind.needs_line();
    let n_max = positive(raw.n_max, if line { 40 } else { 24 }, "n_max")?;
    if n_max < 8 {
        return Err(err(field("n_max"), "must be at least 8"));
    }
    let default_check = match kind {
        TaskKind::TransferCheck => 0.05,
        TaskKind::GapExample => 1e-2,
        _ => 1e-3,
    };
    let q_grid = match raw.q_grid.clone() {
        None if kind == TaskKind::Correlation => vec![0.0, 0.5, 2.0, 3.0],
        None => cp_pressure::multifractal::q_grid(-5.0, 5.0, 0.05),
        Some(RawGrid::List(v)) => v,
        Some(RawGrid::Range { lo, hi, step }) => {
            if !(step > 0.0 && lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(err(field("q_grid"), "need lo < hi and step > 0"));
            }
            cp_pressure::multifractal::q_grid(lo, hi, step)
        }
    };
    if q_grid.is_empty() || q_grid.iter().any(|q| !q.is_finite()) || q_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(err(field("q_grid"), "must be finite and strictly increasing"));
    }
    if kind == TaskKind::Correlation && q_grid.contains(&1.0) {
        return Err(err(field("q_grid"), "q = 1 is excluded for correlation tasks"));
    }
    let default_n = match kind {
        TaskKind::InverseVp => 14,
        TaskKind::PropertySuite => 2000,
        _ => 20,
    };
    let n = positive(raw.n, default_n, "n")?;
    if kind == TaskKind::Correlation && n < 10 {
        return Err(err(field("n"), "must be at least 10"));
    }
    if kind == TaskKind::InverseVp && (n < 4 || n < pot_depth) {
        return Err(err(field("n"), "must be at least 4 and at least the potential depth"));
    }
    let arcs = positive(raw.arcs, 64, "arcs")?;
    if line && arcs < 4 {
        return Err(err(field("arcs"), "line covers need at least 4 arcs"));
    }
    let circle_subset = raw.circle_subset.unwrap_or(CircleSubset::Whole);
    if kind == TaskKind::TransferCheck && circle_subset == CircleSubset::PoleInf {
        return Err(err(field("circle_subset"), "the point at infinity is not in the line"));
    }
    Ok(TaskConfig {
        name: name.unwrap_or_else(|| kind.as_str().to_string()),
        kind,
        budget: Budget {
            depths,
            n_max,
            headroom: positive(raw.headroom, 8, "headroom")?,
            tol: positive_real(raw.tol, 1e-6, "tol")?,
            check_tol: positive_real(raw.check_tol, default_check, "check_tol")?,
            q_grid,
            n,
            samples: positive(raw.samples, 200, "samples")?,
            count: positive(raw.count, 20, "count")?,
            arcs,
            circle_subset,
        },
    })
}

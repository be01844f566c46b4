use std::time::Duration;

use serde::Serialize;

/// One reported number with the tolerance and reference it was judged against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reported {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// Name of the reference, or `"estimate-only"`.
    pub oracle: String,
    pub oracle_value: Option<f64>,
}

impl Reported {
    pub fn against(name: &str, value: f64, tolerance: f64, oracle: &str, oracle_value: f64) -> Self {
        Self { name: name.into(), value, tolerance, oracle: oracle.into(), oracle_value: Some(oracle_value) }
    }

    pub fn estimate(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, oracle: "estimate-only".into(), oracle_value: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl CheckEntry {
    /// Passes when `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value <= bound }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value >= bound }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self { name: name.into(), value: v, bound: 1.0, passed: ok }
    }
}

impl From<cp_pressure::Check<f64>> for CheckEntry {
    fn from(c: cp_pressure::Check<f64>) -> Self {
        Self { name: c.name, value: c.value, bound: c.bound, passed: c.passed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    /// `(N, log Lambda_N, slope)`.
    Pressure(Vec<(usize, f64, f64)>),
    /// `(q, T, alpha, E)`.
    Spectrum(Vec<[f64; 4]>),
    /// `(q, h_formula, h_direct)`.
    Correlation(Vec<[f64; 3]>),
}

impl Table {
    pub fn kind(&self) -> TableKind {
        match self {
            Table::Pressure(_) => TableKind::Pressure,
            Table::Spectrum(_) => TableKind::Spectrum,
            Table::Correlation(_) => TableKind::Correlation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Pressure,
    Spectrum,
    Correlation,
}

impl TableKind {
    pub const ALL: [TableKind; 3] = [TableKind::Pressure, TableKind::Spectrum, TableKind::Correlation];

    pub fn file_stem(self) -> &'static str {
        match self {
            TableKind::Pressure => "pressure",
            TableKind::Spectrum => "spectrum",
            TableKind::Correlation => "correlation",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            TableKind::Pressure => &["N", "log_lambda", "slope"],
            TableKind::Spectrum => &["q", "T", "alpha", "E"],
            TableKind::Correlation => &["q", "h_formula", "h_direct"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskReport {
    pub name: String,
    pub kind: &'static str,
    pub values: Vec<Reported>,
    pub checks: Vec<CheckEntry>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub table: Option<Table>,
    /// Kept out of the summary file so repeated runs produce identical bytes.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl TaskReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub passed: bool,
    pub tasks: Vec<TaskReport>,
}

impl RunReport {
    pub fn new(seed: u64, tasks: Vec<TaskReport>) -> Self {
        let passed = tasks.iter().all(TaskReport::passed);
        Self { seed, passed, tasks }
    }
}

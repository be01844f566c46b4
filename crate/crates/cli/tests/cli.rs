use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};

use cp_pressure_cli::{emit_tables, run, CliError, ExperimentConfig, Overrides, RunReport, TaskKind};

const LOG3: &str = r#"
[system]
kind = "full_shift"
k = 2

[potential]
depth = 1
table = [0.0, 0.6931471805599453]
"#;

fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::from_toml_str(text, Overrides::default())
}

fn config_error_path(text: &str) -> String {
    match parse(text).and_then(|c| c.select(TaskKind::Correlation)) {
        Err(CliError::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn config_errors_name_the_field() {
    let non_square = "[system]\nkind = \"sft\"\nmatrix = [[1, 1], [1, 1, 0]]\n";
    assert_eq!(config_error_path(non_square), "system.matrix[1]");
    let bad_entry = "[system]\nkind = \"sft\"\nmatrix = [[1, 2], [1, 1]]\n";
    assert_eq!(config_error_path(bad_entry), "system.matrix");
    assert_eq!(config_error_path("[budget]\nn_max = 0\n"), "budget.n_max");
    assert_eq!(config_error_path("[budget]\ntol = -1.0\n"), "budget.tol");
    assert_eq!(config_error_path("[budget]\nq_grid = [0.5, 1.0, 2.0]\n"), "budget.q_grid");
    assert_eq!(config_error_path("[budget]\nbogus = 1\n"), "budget.bogus");
    assert_eq!(config_error_path("[potential]\ntable = [0.0]\n"), "potential.table");
    assert_eq!(config_error_path("[[tasks]]\nkind = \"gap_example\"\n"), "tasks[0].kind");
    assert_eq!(config_error_path("[[tasks]]\nkind = \"pressure\"\n[tasks.budget]\ndepths = [2, 1]\n"), "tasks[0].budget.depths");
    assert_eq!(config_error_path("[system]\nkind = \"full_shift\"\nk = \"two\"\n"), "system.k");
}

#[test]
fn duplicate_names_rejected() {
    let text = "[[tasks]]\nkind = \"pressure\"\nname = \"a\"\n[[tasks]]\nkind = \"capacity\"\nname = \"a\"\n";
    assert!(matches!(parse(text), Err(CliError::Config { path, .. }) if path == "tasks[1].name"));
}

#[test]
fn pressure_matches_log3_oracle() {
    let config = parse(LOG3).unwrap().select(TaskKind::Pressure).unwrap();
    let report = run(&config, 1).unwrap();
    assert!(report.passed);
    let p = &report.tasks[0].values[0];
    assert_eq!(p.oracle, "transfer matrix");
    assert!((p.value - 3f64.ln()).abs() < 1e-6);
    assert!((p.oracle_value.unwrap() - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn gap_example_reports_half_pi() {
    let config = ExperimentConfig::default_for(TaskKind::GapExample, Overrides::default()).unwrap();
    let report = run(&config, 1).unwrap();
    assert!(report.passed);
    let gap = report.tasks[0].values.iter().find(|v| v.name == "gap").unwrap();
    assert_eq!(gap.value, std::f64::consts::FRAC_PI_2);
}

#[test]
fn empty_report_writes_header_only_files() {
    let dir = tempfile::tempdir().unwrap();
    emit_tables(&RunReport::new(1, Vec::new()), dir.path()).unwrap();
    let read = |f: &str| fs::read_to_string(dir.path().join(f)).unwrap();
    assert_eq!(read("pressure.csv"), "N,log_lambda,slope\n");
    assert_eq!(read("spectrum.csv"), "q,T,alpha,E\n");
    assert_eq!(read("correlation.csv"), "q,h_formula,h_direct\n");
    assert!(read("summary.json").contains("\"tasks\": []"));
}

#[test]
fn pressure_rows_are_monotone_in_n() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse(LOG3).unwrap().select(TaskKind::Pressure).unwrap();
    emit_tables(&run(&config, 1).unwrap(), dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join("pressure.csv")).unwrap();
    let ns: Vec<usize> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(ns.len() > 1 && ns.windows(2).all(|w| w[0] < w[1]));
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

const SUITE: &str = r#"
seed = 11

[system]
kind = "sft"
matrix = [[1, 1], [1, 0]]

[potential]
depth = 2
table = [0.1, -0.3, 0.4, 0.0]

[budget]
depths = [2, 3]
n_max = 32

[[tasks]]
kind = "pressure"

[[tasks]]
kind = "spectrum"
[tasks.budget]
q_grid = { lo = -2.0, hi = 2.0, step = 0.25 }

[[tasks]]
kind = "correlation"
[tasks.budget]
q_grid = [0.0, 0.5, 2.0]
n = 2000

[[tasks]]
kind = "vp_check"
[tasks.budget]
samples = 20
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cppressure"));
    c.stdout(Stdio::null()).stderr(Stdio::null());
    c
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    fs::write(&cfg, SUITE).unwrap();
    let outs: Vec<_> = [("a", "1"), ("b", "3")]
        .iter()
        .map(|(name, jobs)| {
            let out = dir.path().join(name);
            let status = bin()
                .args(["suite", "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .args(["--jobs", jobs])
                .status()
                .unwrap();
            assert!(status.success());
            files(&out)
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let names: Vec<&str> = outs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["correlation.csv", "pressure.csv", "spectrum.csv", "summary.json"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, format!("{LOG3}\n[budget]\ncheck_tol = 1e-12\n")).unwrap();
    let code = |args: &[&str]| {
        bin().args(args).arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o")).status().unwrap().code()
    };
    assert_eq!(code(&["capacity"]), Some(0));
    assert_eq!(code(&["pressure"]), Some(1));
    fs::write(&cfg, "[system]\nkind = \"sft\"\nmatrix = [[1]]\n").unwrap();
    assert_eq!(code(&["pressure"]), Some(2));
}

#[test]
fn tol_and_seed_flags_override() {
    let c = ExperimentConfig::from_toml_str(LOG3, Overrides { tol: Some(1e-4), seed: Some(5) })
        .unwrap()
        .select(TaskKind::Pressure)
        .unwrap();
    assert_eq!(c.seed, 5);
    assert_eq!(c.tasks[0].budget.tol, 1e-4);
}

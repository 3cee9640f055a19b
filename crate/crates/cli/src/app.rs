//! Loading scenarios, writing outputs, sweeps and exit codes.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use logman::{fmt17, ErrorClass};

use crate::commands::{run, Headline, Outcome};
use crate::config::{Config, Issue, Value};
use crate::scenario::{resolve_scalar_key, Command, Scenario};

/// Scenarios shipped with the binary.
pub const BUILTINS: &[(&str, &str)] = &[
    ("eigen_ball", include_str!("../../../scenarios/eigen_ball.conf")),
    ("lambda_star_decay", include_str!("../../../scenarios/lambda_star_decay.conf")),
    ("hyperbolic_lambda_star", include_str!("../../../scenarios/hyperbolic_lambda_star.conf")),
    ("duality", include_str!("../../../scenarios/duality.conf")),
    ("exists_1_19", include_str!("../../../scenarios/exists_1_19.conf")),
    ("yamabe_remark", include_str!("../../../scenarios/yamabe_remark.conf")),
    ("maximal_const", include_str!("../../../scenarios/maximal_const.conf")),
    ("thm33_euclid", include_str!("../../../scenarios/thm33_euclid.conf")),
    ("ab_comparison", include_str!("../../../scenarios/ab_comparison.conf")),
    ("poisson_shell", include_str!("../../../scenarios/poisson_shell.conf")),
    ("cor32pp", include_str!("../../../scenarios/cor32pp.conf")),
];

pub const EXIT_HYPOTHESIS: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("invalid scenario:\n{}", render_issues(.0))]
    Config(Vec<Issue>),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] logman::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

fn render_issues(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(e) => match e.class() {
                ErrorClass::Hypothesis => EXIT_HYPOTHESIS,
                ErrorClass::Numerical => EXIT_NUMERICAL,
                ErrorClass::Config => EXIT_CONFIG,
            },
            AppError::Config(_) | AppError::Usage(_) | AppError::Write { .. } => EXIT_CONFIG,
        }
    }

    fn status(&self) -> &'static str {
        match self.exit_code() {
            EXIT_HYPOTHESIS => "hypothesis",
            EXIT_NUMERICAL => "numerical",
            _ => "config",
        }
    }
}

/// Where a scenario comes from.
#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Builtin(String),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::File(p) => write!(f, "{}", p.display()),
            Source::Builtin(n) => write!(f, "builtin:{n}"),
        }
    }
}

/// Overrides from command-line flags, applied before validation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mesh: Option<usize>,
    pub tol: Option<f64>,
    pub theorem: Option<String>,
}

/// A parsed config with the directory that relative paths refer to.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: Config,
    pub base: Option<PathBuf>,
}

pub fn load(source: &Source, overrides: &Overrides) -> Result<Loaded, AppError> {
    let (text, base) = match source {
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                AppError::Config(vec![Issue {
                    line: 0,
                    key: None,
                    message: format!("cannot read {}: {e}", path.display()),
                }])
            })?;
            (text, path.parent().map(Path::to_path_buf))
        }
        Source::Builtin(name) => {
            let text = BUILTINS
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| {
                    let names: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
                    AppError::Usage(format!("unknown built-in scenario '{name}' (available: {})", names.join(", ")))
                })?;
            (text, None)
        }
    };
    let mut config = Config::parse(&text).map_err(AppError::Config)?;
    if let Some(n) = overrides.mesh {
        config.set("solver.mesh", Value::Num(n as f64));
    }
    if let Some(t) = overrides.tol {
        config.set("solver.tol", Value::Num(t));
    }
    if let Some(t) = &overrides.theorem {
        config.set("theorem", Value::Str(t.clone()));
    }
    Ok(Loaded { config, base })
}

fn scenario(loaded: &Loaded) -> Result<Scenario, AppError> {
    Scenario::from_config(&loaded.config, loaded.base.as_deref()).map_err(AppError::Config)
}

fn check_out_dir(out: &Path) -> Result<(), AppError> {
    if out.is_dir() {
        Ok(())
    } else {
        Err(AppError::Usage(format!("output directory {} does not exist", out.display())))
    }
}

fn write(out: &Path, name: &str, contents: &str) -> Result<(), AppError> {
    let path = out.join(name);
    std::fs::write(&path, contents).map_err(|source| AppError::Write { path, source })
}

/// Runs `command` on a scenario and writes `<command>_report.txt` plus the
/// CSV fields into `out`.
pub fn run_scenario(loaded: &Loaded, command: Command, out: &Path) -> Result<Outcome, AppError> {
    check_out_dir(out)?;
    let s = scenario(loaded)?;
    s.check_command(command).map_err(AppError::Config)?;
    let outcome = run(&s, command)?;
    write(out, &format!("{}_report.txt", command.file_stem()), &outcome.report)?;
    for (name, contents) in &outcome.files {
        write(out, name, contents)?;
    }
    Ok(outcome)
}

/// Parses `--values`: comma-separated numbers, empty for none.
pub fn parse_values(text: &str) -> Result<Vec<f64>, AppError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| AppError::Usage(format!("sweep value '{}' is not a number", v.trim())))
        })
        .collect()
}

fn cell(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

pub const SWEEP_HEADER: &str = "value,status,eigenvalue,verdict,residual,u0";

/// Runs the scenario's own command once per value of `param` and writes
/// `sweep.csv` (rows in input order) and `sweep_report.txt`. Failed rows
/// are recorded with their error class and the sweep continues.
pub fn sweep(loaded: &Loaded, param: &str, values: &[f64], out: &Path) -> Result<Vec<(String, Headline)>, AppError> {
    check_out_dir(out)?;
    let key = resolve_scalar_key(param)
        .ok_or_else(|| AppError::Usage(format!("'{param}' is not a numeric scenario field")))?;
    let base = scenario(loaded)?;
    let command = base.command.ok_or_else(|| {
        AppError::Config(vec![Issue {
            line: 0,
            key: Some("command".into()),
            message: "a sweep needs the scenario's command".into(),
        }])
    })?;
    let rows: Vec<Result<Outcome, AppError>> = values
        .par_iter()
        .map(|&v| {
            let mut cfg = loaded.config.clone();
            cfg.set(key, Value::Num(v));
            let s = Scenario::from_config(&cfg, loaded.base.as_deref()).map_err(AppError::Config)?;
            s.check_command(command).map_err(AppError::Config)?;
            Ok(run(&s, command)?)
        })
        .collect();

    let mut table = format!("{SWEEP_HEADER}\n");
    let mut report = format!("param = {key}\ncommand = {command}\nrows = {}\n", values.len());
    let mut result = Vec::new();
    for (v, row) in values.iter().zip(rows) {
        let (status, h) = match row {
            Ok(o) => ("ok".to_string(), o.headline),
            Err(e) => {
                report.push_str(&format!("{key} = {}: {e}\n", fmt17(*v)));
                (e.status().to_string(), Headline::default())
            }
        };
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(*v),
            status,
            cell(h.eigenvalue),
            h.verdict.map(|b| u8::from(b).to_string()).unwrap_or_default(),
            cell(h.residual),
            cell(h.u0)
        ));
        result.push((status, h));
    }
    write(out, "sweep.csv", &table)?;
    write(out, "sweep_report.txt", &report)?;
    Ok(result)
}

/// Applies `LOGMAN_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<(), AppError> {
    let Ok(value) = std::env::var("LOGMAN_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| AppError::Usage(format!("LOGMAN_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::Usage(format!("cannot configure threads: {e}")))
}

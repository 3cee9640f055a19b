//! Validated scenarios built from a [`Config`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use logman::manifold::TabulatedWarping;
use logman::nonexistence::{NonexistenceParams, Theorem};
use logman::{Coefficient, LogisticProblem, ModelManifold, WarpingFunction};

use crate::config::{Config, Issue, Value};
use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigen,
    LambdaStar,
    Duality,
    Solve,
    Blowup,
    Maximal,
    Subsolution,
    Exists,
    Nonexist,
    Compare,
    Green,
    Poisson,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::Eigen,
        Command::LambdaStar,
        Command::Duality,
        Command::Solve,
        Command::Blowup,
        Command::Maximal,
        Command::Subsolution,
        Command::Exists,
        Command::Nonexist,
        Command::Compare,
        Command::Green,
        Command::Poisson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::LambdaStar => "lambda-star",
            Command::Duality => "duality",
            Command::Solve => "solve",
            Command::Blowup => "blowup",
            Command::Maximal => "maximal",
            Command::Subsolution => "subsolution",
            Command::Exists => "exists",
            Command::Nonexist => "nonexist",
            Command::Compare => "compare",
            Command::Green => "green",
            Command::Poisson => "poisson",
        }
    }

    /// Stem of the report file, `<stem>_report.txt`.
    pub fn file_stem(self) -> String {
        self.name().replace('-', "_")
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistsMode {
    /// The general sufficient condition over a radius scan.
    Condition,
    /// The hyperbolic Yamabe condition, optionally followed by a solve.
    Yamabe,
}

#[derive(Debug, Clone)]
pub struct Solver {
    pub r_max: f64,
    pub r_schedule: Option<Vec<f64>>,
    pub mesh: usize,
    pub tol: f64,
    pub residual_tol: f64,
    pub max_sweeps: usize,
    pub boundary: f64,
    pub n_schedule: Option<Vec<f64>>,
    pub radius: f64,
    pub t_o: f64,
    pub r_range: (f64, f64),
    pub mu: f64,
    pub mu_grid: Option<Vec<f64>>,
    pub subsolution: bool,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub command: Option<Command>,
    pub manifold: ModelManifold,
    pub a: Coefficient,
    pub b: Coefficient,
    pub sigma: f64,
    pub solver: Solver,
    pub params: NonexistenceParams,
    pub lambda: f64,
    pub k: f64,
    pub theorem: Option<Theorem>,
    pub u: Option<Expr>,
    pub phi: Option<Expr>,
    pub rho: Option<Expr>,
    pub u_sub: Option<Expr>,
    pub u_super: Option<Expr>,
    pub compare_u: f64,
    pub compare_v: f64,
    pub compare_tol: f64,
    pub exists_mode: ExistsMode,
    pub exists_solve: bool,
    pub yamabe_factor: f64,
    pub ab_numerics: bool,
}

impl Scenario {
    pub fn problem(&self) -> logman::Result<LogisticProblem> {
        LogisticProblem::new(self.manifold.clone(), self.a.clone(), self.b.clone(), self.sigma)
    }
}

/// Numeric keys accepted by a sweep.
pub const SCALAR_KEYS: &[&str] = &[
    "manifold.m",
    "manifold.B",
    "manifold.Bprime",
    "sigma",
    "solver.R_max",
    "solver.mesh",
    "solver.tol",
    "solver.residual_tol",
    "solver.max_sweeps",
    "solver.boundary",
    "solver.radius",
    "solver.T_o",
    "solver.mu",
    "params.H",
    "params.K",
    "params.A",
    "params.beta",
    "params.p",
    "params.q",
    "params.mu",
    "params.delta",
    "params.lambda",
    "params.k",
    "compare.u_boundary",
    "compare.v_boundary",
    "compare.tol",
    "yamabe.s_factor",
];

const OTHER_KEYS: &[&str] = &[
    "name",
    "command",
    "theorem",
    "manifold.type",
    "manifold.table",
    "a",
    "a.table",
    "b",
    "b.table",
    "u",
    "phi",
    "rho",
    "u_sub",
    "u_super",
    "solver.R_schedule",
    "solver.n_schedule",
    "solver.r_range",
    "solver.mu_grid",
    "solver.subsolution",
    "exists.mode",
    "exists.solve",
    "ab.numerics",
];

/// Resolves a sweep parameter: a full key, or a bare name under `params.`
/// or `solver.`.
pub fn resolve_scalar_key(name: &str) -> Option<&'static str> {
    [name.to_string(), format!("params.{name}"), format!("solver.{name}")]
        .iter()
        .find_map(|k| SCALAR_KEYS.iter().copied().find(|s| s == k))
}

struct Reader<'a> {
    cfg: &'a Config,
    issues: Vec<Issue>,
}

impl Reader<'_> {
    fn issue(&mut self, key: &str, message: impl Into<String>) {
        let line = self.cfg.get(key).map_or(0, |e| e.line);
        self.issues.push(Issue {
            line,
            key: Some(key.to_string()),
            message: message.into(),
        });
    }

    fn wrong_kind(&mut self, key: &str, want: &str, got: &Value) {
        self.issue(key, format!("expected a {want}, found a {}", got.kind()));
    }

    fn opt_num(&mut self, key: &str) -> Option<f64> {
        match self.cfg.get(key).map(|e| e.value.clone()) {
            None => None,
            Some(Value::Num(v)) => Some(v),
            Some(other) => {
                self.wrong_kind(key, "number", &other);
                None
            }
        }
    }

    fn num(&mut self, key: &str, default: f64) -> f64 {
        self.opt_num(key).unwrap_or(default)
    }

    fn positive(&mut self, key: &str, default: f64) -> f64 {
        let v = self.num(key, default);
        if !(v > 0.0 && v.is_finite()) {
            self.issue(key, format!("must be positive and finite, got {v}"));
        }
        v
    }

    fn count(&mut self, key: &str, default: usize, min: usize) -> usize {
        match self.opt_num(key) {
            None => default,
            Some(v) if v.fract() == 0.0 && v >= min as f64 && v <= 1e9 => v as usize,
            Some(v) => {
                self.issue(key, format!("must be an integer >= {min}, got {v}"));
                default
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.cfg.get(key).map(|e| e.value.clone()) {
            None => None,
            Some(Value::Str(s)) => Some(s),
            Some(other) => {
                self.wrong_kind(key, "string", &other);
                None
            }
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        match self.cfg.get(key).map(|e| e.value.clone()) {
            None => default,
            Some(Value::Bool(b)) => b,
            Some(other) => {
                self.wrong_kind(key, "boolean", &other);
                default
            }
        }
    }

    fn list(&mut self, key: &str) -> Option<Vec<f64>> {
        match self.cfg.get(key).map(|e| e.value.clone()) {
            None => None,
            Some(Value::List(v)) => Some(v),
            Some(other) => {
                self.wrong_kind(key, "list", &other);
                None
            }
        }
    }

    /// A positive, strictly increasing list.
    fn schedule(&mut self, key: &str, min_len: usize) -> Option<Vec<f64>> {
        let v = self.list(key)?;
        if v.len() < min_len {
            self.issue(key, format!("needs at least {min_len} entries"));
            return None;
        }
        if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) || v.windows(2).any(|w| !(w[1] > w[0])) {
            self.issue(key, "entries must be positive and strictly increasing");
            return None;
        }
        Some(v)
    }

    fn expr(&mut self, key: &str, names: &BTreeMap<String, f64>) -> Option<Expr> {
        let source = match self.cfg.get(key).map(|e| e.value.clone())? {
            Value::Str(s) => s,
            Value::Num(v) => logman::fmt17(v),
            other => {
                self.wrong_kind(key, "expression string or number", &other);
                return None;
            }
        };
        match Expr::parse(&source, names) {
            Ok(e) => Some(e),
            Err(err) => {
                self.issue(key, format!("in expression \"{source}\" {err}"));
                None
            }
        }
    }
}

fn resolve_path(base: Option<&Path>, path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

fn read_table(path: &Path) -> Result<Coefficient, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut r = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        match (cols.next().map(str::parse::<f64>), cols.next().map(str::parse::<f64>)) {
            (Some(Ok(x)), Some(Ok(y))) => {
                r.push(x);
                values.push(y);
            }
            _ if r.is_empty() => {} // header
            _ => return Err(format!("{}:{}: expected two numeric columns", path.display(), i + 1)),
        }
    }
    if r.len() < 2 || r.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(format!("{}: need at least two rows with increasing r", path.display()));
    }
    Ok(Coefficient::Samples { r, values })
}

fn coefficient(expr: Expr) -> Coefficient {
    match expr.as_constant() {
        Some(c) => Coefficient::Constant(c),
        None => {
            let label = expr.source().to_string();
            Coefficient::function(label, move |r| expr.eval(r))
        }
    }
}

impl Scenario {
    /// Builds and validates a scenario. Relative table paths are resolved
    /// against `base`.
    pub fn from_config(cfg: &Config, base: Option<&Path>) -> Result<Self, Vec<Issue>> {
        let mut rd = Reader {
            cfg,
            issues: Vec::new(),
        };
        for (key, entry) in cfg.keys() {
            if !SCALAR_KEYS.contains(&key.as_str()) && !OTHER_KEYS.contains(&key.as_str()) {
                rd.issues.push(Issue {
                    line: entry.line,
                    key: Some(key.clone()),
                    message: "unknown key".into(),
                });
            }
        }

        let name = rd.string("name").unwrap_or_else(|| "scenario".into());
        let command = rd.string("command").and_then(|s| match s.parse::<Command>() {
            Ok(c) => Some(c),
            Err(e) => {
                rd.issue("command", e);
                None
            }
        });
        let theorem = rd.string("theorem").and_then(|s| match s.parse::<Theorem>() {
            Ok(t) => Some(t),
            Err(e) => {
                rd.issue("theorem", e.to_string());
                None
            }
        });

        let dim = rd.count("manifold.m", 3, 2);
        let kind = rd.string("manifold.type").unwrap_or_else(|| "euclidean".into());
        let curvature = rd.num("manifold.B", 1.0);
        let exponent = rd.num("manifold.Bprime", 1.0);
        let warping = match kind.as_str() {
            "euclidean" => Some(WarpingFunction::Euclidean),
            "hyperbolic" => WarpingFunction::hyperbolic(curvature)
                .map_err(|e| rd.issue("manifold.B", e.to_string()))
                .ok(),
            "power" => WarpingFunction::power(exponent)
                .map_err(|e| rd.issue("manifold.Bprime", e.to_string()))
                .ok(),
            "tabulated" => match rd.string("manifold.table") {
                None => {
                    rd.issue("manifold.table", "required for manifold.type = \"tabulated\"");
                    None
                }
                Some(path) => TabulatedWarping::from_csv(&resolve_path(base, &path))
                    .map(WarpingFunction::Tabulated)
                    .map_err(|e| rd.issue("manifold.table", e.to_string()))
                    .ok(),
            },
            other => {
                rd.issue(
                    "manifold.type",
                    format!("unknown manifold type '{other}' (euclidean, hyperbolic, power, tabulated)"),
                );
                None
            }
        };
        let manifold = warping.and_then(|w| {
            ModelManifold::new(dim, w)
                .map_err(|e| rd.issue("manifold.m", e.to_string()))
                .ok()
        });

        let mut params = NonexistenceParams {
            h: rd.num("params.H", 1.0),
            k: rd.num("params.K", 0.0),
            grad_coeff_a: rd.num("params.A", 0.0),
            beta: rd.num("params.beta", 0.0),
            p: rd.num("params.p", 2.0),
            q: rd.num("params.q", 2.0),
            mu: rd.num("params.mu", 0.0),
            delta: rd.num("params.delta", f64::INFINITY),
            ..Default::default()
        };
        let sigma = rd.num("sigma", 2.0);
        params.sigma = sigma;
        let lambda = rd.num("params.lambda", 1.0);
        let k = rd.num("params.k", 1.0);

        let mut names = BTreeMap::new();
        for (n, v) in [
            ("H", params.h),
            ("K", params.k),
            ("A", params.grad_coeff_a),
            ("beta", params.beta),
            ("p", params.p),
            ("q", params.q),
            ("mu", params.mu),
            ("delta", params.delta),
            ("lambda", lambda),
            ("k", k),
            ("sigma", sigma),
            ("m", dim as f64),
            ("B", curvature),
        ] {
            names.insert(n.to_string(), v);
        }

        let coef = |rd: &mut Reader, key: &str, default: f64| -> Coefficient {
            let table_key = format!("{key}.table");
            if cfg.contains(key) && cfg.contains(&table_key) {
                rd.issue(&table_key, format!("give either {key} or {table_key}, not both"));
            }
            if let Some(path) = rd.string(&table_key) {
                return read_table(&resolve_path(base, &path))
                    .map_err(|e| rd.issue(&table_key, e))
                    .unwrap_or(Coefficient::Constant(default));
            }
            rd.expr(key, &names).map_or(Coefficient::Constant(default), coefficient)
        };
        let a = coef(&mut rd, "a", 0.0);
        let b = coef(&mut rd, "b", 1.0);
        let u = rd.expr("u", &names);
        let phi = rd.expr("phi", &names);
        let rho = rd.expr("rho", &names);
        let u_sub = rd.expr("u_sub", &names);
        let u_super = rd.expr("u_super", &names);

        let r_max = rd.positive("solver.R_max", 10.0);
        let r_range = match rd.list("solver.r_range") {
            None => (10.0, 1000.0),
            Some(v) if v.len() == 2 && v[0] > 0.0 && v[1] > v[0] => (v[0], v[1]),
            Some(_) => {
                rd.issue("solver.r_range", "expected [lo, hi] with 0 < lo < hi");
                (10.0, 1000.0)
            }
        };
        let solver = Solver {
            r_max,
            r_schedule: rd.schedule("solver.R_schedule", 1),
            mesh: rd.count("solver.mesh", 2000, 4),
            tol: rd.positive("solver.tol", 1e-10),
            residual_tol: rd.positive("solver.residual_tol", 1e-9),
            max_sweeps: rd.count("solver.max_sweeps", 10_000, 1),
            boundary: rd.num("solver.boundary", 1.0),
            n_schedule: rd.schedule("solver.n_schedule", 1),
            radius: rd.positive("solver.radius", 10.0),
            t_o: rd.positive("solver.T_o", 10.0),
            r_range,
            mu: rd.num("solver.mu", 1.0),
            mu_grid: rd.list("solver.mu_grid"),
            subsolution: rd.boolean("solver.subsolution", false),
        };
        if solver.boundary < 0.0 {
            rd.issue("solver.boundary", "boundary value must be non-negative");
        }

        let compare_u = rd.num("compare.u_boundary", 1.0);
        let compare_v = rd.num("compare.v_boundary", 2.0);
        let compare_tol = rd.positive("compare.tol", 1e-8);
        let exists_mode = match rd.string("exists.mode").as_deref() {
            None | Some("condition") => ExistsMode::Condition,
            Some("yamabe") => ExistsMode::Yamabe,
            Some(other) => {
                rd.issue("exists.mode", format!("unknown mode '{other}' (condition, yamabe)"));
                ExistsMode::Condition
            }
        };
        let exists_solve = rd.boolean("exists.solve", false);
        let yamabe_factor = rd.positive("yamabe.s_factor", 0.999);
        let ab_numerics = rd.boolean("ab.numerics", false);

        if let Some(m) = &manifold {
            if let Err(e) = LogisticProblem::new(m.clone(), a.clone(), b.clone(), sigma) {
                rd.issue("sigma", e.to_string());
            }
        }

        let Some(manifold) = manifold else {
            return Err(rd.issues);
        };
        if !rd.issues.is_empty() {
            return Err(rd.issues);
        }
        Ok(Scenario {
            name,
            command,
            manifold,
            a,
            b,
            sigma,
            solver,
            params,
            lambda,
            k,
            theorem,
            u,
            phi,
            rho,
            u_sub,
            u_super,
            compare_u,
            compare_v,
            compare_tol,
            exists_mode,
            exists_solve,
            yamabe_factor,
            ab_numerics,
        })
    }

    /// Per-command requirements that a generic config cannot express.
    pub fn check_command(&self, command: Command) -> Result<(), Vec<Issue>> {
        let mut issues = Vec::new();
        let mut need = |cond: bool, key: &str, message: &str| {
            if !cond {
                issues.push(Issue {
                    line: 0,
                    key: Some(key.to_string()),
                    message: message.to_string(),
                });
            }
        };
        let sched_len = self.solver.r_schedule.as_ref().map_or(0, Vec::len);
        match command {
            Command::LambdaStar => need(
                self.solver.r_schedule.is_none() || sched_len >= 4,
                "solver.R_schedule",
                "lambda-star needs at least four radii",
            ),
            Command::Duality => {
                need(sched_len >= 4, "solver.R_schedule", "duality needs at least four radii");
                need(
                    self.solver.mu_grid.as_ref().is_some_and(|g| g.len() >= 2),
                    "solver.mu_grid",
                    "duality needs a mu grid with at least two values",
                );
            }
            Command::Poisson => need(self.rho.is_some(), "rho", "poisson needs a source expression"),
            Command::Nonexist => match self.theorem {
                None => need(false, "theorem", "nonexist needs a theorem (config key or --theorem)"),
                Some(Theorem::Thm32 | Theorem::Cor317 | Theorem::Lemma31) => {
                    need(self.u.is_some(), "u", "this theorem needs a candidate solution u");
                    if self.theorem == Some(Theorem::Lemma31) {
                        need(sched_len >= 2, "solver.R_schedule", "lemma3.1 needs at least two radii");
                    }
                }
                Some(Theorem::AbRemark) => {
                    if self.ab_numerics {
                        need(sched_len >= 2, "solver.R_schedule", "ab.numerics needs at least two radii");
                    }
                }
                Some(_) => {}
            },
            Command::Exists if self.exists_mode == ExistsMode::Yamabe => need(
                matches!(self.manifold.warping(), WarpingFunction::Hyperbolic { .. }),
                "manifold.type",
                "the Yamabe condition is stated on hyperbolic space",
            ),
            _ => {}
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }
}

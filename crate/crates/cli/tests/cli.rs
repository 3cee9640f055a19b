use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use logman_cli::app::{self, Overrides, Source, SWEEP_HEADER};
use logman_cli::config::Config;
use logman_cli::scenario::Scenario;

fn logman(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_logman"));
    cmd.args(args).env_remove("LOGMAN_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = logman(args, &[]);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.conf");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// Rows of a CSV file without header and comment lines.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn all_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn expression_coefficient_family() {
    let cfg = Config::parse("params.k = 1\na = \"k/(1+r^2)\"\n").unwrap();
    let s = Scenario::from_config(&cfg, None).unwrap();
    let got: Vec<f64> = [0.0, 1.0, 2.0].iter().map(|&r| s.a.eval(r)).collect();
    assert_eq!(got, vec![1.0, 0.5, 0.2]);
}

#[test]
fn unknown_manifold_type_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "command = \"eigen\"\nmanifold.type = \"spherical\"\nsolver.mesh = -3\n");
    let out = logman(&["eigen", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2: manifold.type"), "{err}");
    assert!(err.contains("line 3: solver.mesh"), "{err}");
}

#[test]
fn missing_output_directory_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope");
    let out = logman(&["eigen", "--builtin", "eigen_ball", "--out", missing.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!missing.exists());
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(logman(&["eigen"], &[]).status.code(), Some(3));
    assert_eq!(logman(&["frobnicate"], &[]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = logman(&["nonexist", "--builtin", "eigen_ball", "--out", d], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theorem"));
    let out = logman(&["eigen", "--builtin", "eigen_ball", "--out", d], &[("LOGMAN_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hypothesis_and_numerical_failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // R inf a = 0.1 cannot beat (1 + tau)/T_o (g(R+T_o)/g(R))^2 = 1.2
    let cfg = write_config(dir.path(), "a = 0.01\nsolver.radius = 10\nsolver.T_o = 10\n");
    let out = logman(&["subsolution", "--config", &cfg, "--out", d], &[]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    let cfg = write_config(dir.path(), "a = 1\nsolver.R_max = 5\nsolver.mesh = 200\nsolver.max_sweeps = 1\n");
    let out = logman(&["solve", "--config", &cfg, "--out", d], &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("solve_report.txt").exists());
}

#[test]
fn runs_are_byte_identical() {
    for (cmd, name) in [("duality", "duality"), ("nonexist", "thm33_euclid"), ("poisson", "poisson_shell")] {
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        let a = logman(&[cmd, "--builtin", name, "--out", first.path().to_str().unwrap()], &[("LOGMAN_THREADS", "1")]);
        let b = logman(&[cmd, "--builtin", name, "--out", second.path().to_str().unwrap()], &[("LOGMAN_THREADS", "4")]);
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout);
        let (fa, fb) = (all_files(first.path()), all_files(second.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{name}");
    }
}

#[test]
fn hyperbolic_lambda_star_bound_line() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["lambda-star", "--builtin", "hyperbolic_lambda_star", "--out", dir.path().to_str().unwrap()]);
    let text = read(dir.path(), "lambda_star.csv");
    assert!(text.starts_with("R,lambda1\n"));
    let lambdas: Vec<f64> = rows(&text).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(lambdas.len(), 4);
    assert!(lambdas.windows(2).all(|w| w[1] <= w[0]));
    let bound: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# lambda_star_upper_bound = "))
        .expect("bound line")
        .parse()
        .unwrap();
    assert_eq!(bound, *lambdas.last().unwrap());
    // bottom of the spectrum of hyperbolic 3-space, (m-1)^2 B / 4
    assert!(bound >= 1.0 && bound - 1.0 < 2e-3, "{bound}");
}

#[test]
fn eigen_ball_matches_dilated_dirichlet_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["eigen", "--builtin", "eigen_ball", "--out", dir.path().to_str().unwrap()]);
    let text = read(dir.path(), "eigen.csv");
    assert!(text.starts_with("R,lambda1,lambda1_Lmu\n"));
    for row in rows(&text) {
        let r: f64 = row[0].parse().unwrap();
        let exact = PI * PI / (r * r);
        for cell in &row[1..] {
            let v: f64 = cell.parse().unwrap();
            assert!((v - exact).abs() <= 1e-3 * exact, "R = {r}: {v} vs {exact}");
        }
    }
}

#[test]
fn thm33_euclid_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["nonexist", "--builtin", "thm33_euclid", "--out", dir.path().to_str().unwrap()]);
    let report = read(dir.path(), "nonexist_report.txt");
    assert!(report.contains("overall = holds"), "{report}");
    assert!(report.contains("verdict = non-existence certified"));
    assert!(read(dir.path(), "integrals.csv").starts_with("r,ball_volume,int_ball_a_plus\n"));
}

#[test]
fn theorem_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    // on the plane the Green function does not decay: cor3.2pp must refuse
    let cfg = write_config(dir.path(), "theorem = \"3.3\"\nmanifold.m = 2\na = \"pos(1-r)\"\nparams.A = -1\nparams.p = 3\n");
    let out = logman(&["nonexist", "--config", &cfg, "--theorem", "cor3.2pp", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn poisson_shell_matches_newton_shell_theorem() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["poisson", "--builtin", "poisson_shell", "--out", dir.path().to_str().unwrap()]);
    // Q = 4 pi int_0^1 (1 - r^2)^2 r^2 dr = 4 pi (1/3 - 2/5 + 1/7)
    let q = 4.0 * PI * 8.0 / 105.0;
    let v = rows(&read(dir.path(), "v.csv"));
    let mut checked = 0;
    for row in &v {
        let r: f64 = row[0].parse().unwrap();
        if r >= 1.5 {
            let value: f64 = row[1].parse().unwrap();
            assert!((value + q / (4.0 * PI * r)).abs() <= 1e-6, "r = {r}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["sweep", "--builtin", "ab_comparison", "--param", "lambda", "--values", "", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(read(dir.path(), "sweep.csv"), format!("{SWEEP_HEADER}\n"));
}

#[test]
fn ab_sweep_flips_once_at_rule_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<String> = (1..=20).map(|i| format!("{}", i as f64 / 10.0)).collect();
    run_ok(&[
        "sweep",
        "--builtin",
        "ab_comparison",
        "--param",
        "lambda",
        "--values",
        &values.join(","),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let table = rows(&read(dir.path(), "sweep.csv"));
    assert_eq!(table.len(), 20);
    let lambdas: Vec<f64> = table.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(lambdas, (1..=20).map(|i| i as f64 / 10.0).collect::<Vec<_>>());
    let verdicts: Vec<&str> = table.iter().map(|r| r[3].as_str()).collect();
    let flips: Vec<usize> = (1..20).filter(|&i| verdicts[i] != verdicts[i - 1]).collect();
    // lambda* >= 1/4 for m = 3, k = 1 and min{1, (m-2)/4} = 1/4: certified iff lambda <= 1
    assert_eq!(flips, vec![10]);
    assert_eq!(verdicts[9], "1");
    assert_eq!(verdicts[10], "0");
}

#[test]
fn lambda_star_sweep_over_outer_radius_is_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "command = \"lambda-star\"\nparams.k = 1\na = \"k/(1+r^2)\"\nsolver.mesh = 800\n",
    );
    run_ok(&["sweep", "--config", &cfg, "--param", "R_max", "--values", "10,20,40", "--out", dir.path().to_str().unwrap()]);
    let table = rows(&read(dir.path(), "sweep.csv"));
    let lambdas: Vec<f64> = table.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(lambdas.len(), 3);
    assert!(table.iter().all(|r| r[1] == "ok"));
    assert!(lambdas.windows(2).all(|w| w[1] <= w[0]), "{lambdas:?}");
}

#[test]
fn failed_sweep_rows_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["sweep", "--builtin", "eigen_ball", "--param", "mesh", "--values", "2,50", "--out", dir.path().to_str().unwrap()]);
    let table = rows(&read(dir.path(), "sweep.csv"));
    assert_eq!(table[0][1], "config");
    assert_eq!(table[0][2], "");
    assert_eq!(table[1][1], "ok");
    assert!(read(dir.path(), "sweep_report.txt").contains("solver.mesh"));
    let out = logman(&["sweep", "--builtin", "eigen_ball", "--param", "a", "--values", "1"], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn every_builtin_runs() {
    for (name, text) in app::BUILTINS {
        let loaded = app::load(&Source::Builtin(name.to_string()), &Overrides::default()).unwrap();
        let s = Scenario::from_config(&loaded.config, None).unwrap();
        let command = s.command.unwrap_or_else(|| panic!("{name} has no command"));
        assert!(text.contains(&format!("name = \"{name}\"")));
        let dir = tempfile::tempdir().unwrap();
        let start = std::time::Instant::now();
        let outcome = app::run_scenario(&loaded, command, dir.path()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(start.elapsed().as_secs_f64() < 60.0, "{name}");
        assert!(dir.path().join(format!("{}_report.txt", command.file_stem())).exists());
        assert!(!outcome.files.is_empty() || *name == "ab_comparison", "{name}");
    }
    let listed = run_ok(&["list"]);
    assert_eq!(listed.lines().count(), app::BUILTINS.len());
}

#[test]
fn relative_table_paths_follow_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let table: String = std::iter::once("r,g\n".to_string())
        .chain((0..=400).map(|i| {
            let r = i as f64 * 0.05;
            format!("{r},{}\n", r)
        }))
        .collect();
    std::fs::write(dir.path().join("warp.csv"), table).unwrap();
    let cfg = write_config(
        dir.path(),
        "manifold.type = \"tabulated\"\nmanifold.table = \"warp.csv\"\na = 1\nsolver.mu = 0\nsolver.R_max = 1\nsolver.mesh = 400\n",
    );
    run_ok(&["eigen", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    let row = &rows(&read(dir.path(), "eigen.csv"))[0];
    let v: f64 = row[1].parse().unwrap();
    assert!((v - PI * PI).abs() < 1e-2 * PI * PI, "{v}");
}

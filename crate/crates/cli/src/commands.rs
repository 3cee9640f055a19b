//! Dispatch of scenario commands to the numerical modules.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use logman::fit::log_spaced;
use logman::green::{green_radial, log_substitution, poisson_solve};
use logman::logistic::{
    blowup_solution, comparison_check, default_n_schedule, maximal_solution, solve_bvp_monotone, IterationSettings,
    SolverReport,
};
use logman::nonexistence::{
    ab_comparison_scenario, cor317_check, cor32pp_check, lemma31_certificate, thm32_check, thm32prime_check,
    thm33_check, AbNumerics, SpectralSettings, Theorem,
};
use logman::radial::{integrate_ball, integrate_sphere, residual_field};
use logman::spectrum::{dirichlet_bottom, duality_check, lambda_star, principal_eigenvalue, Mesh, SignVerdict};
use logman::subsolution::{construct_subsolution, existence_condition, yamabe_condition};
use logman::{fmt17, CertificateReport, Error, LogisticProblem, RadialField, RadialGrid, WarpingFunction};

use crate::expr::Expr;
use crate::scenario::{Command, ExistsMode, Scenario};

/// Scalars reported per sweep row.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Headline {
    pub eigenvalue: Option<f64>,
    pub verdict: Option<bool>,
    pub residual: Option<f64>,
    pub u0: Option<f64>,
}

/// Everything a command produces: the report body and named CSV files.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<(String, String)>,
    pub headline: Headline,
}

impl Outcome {
    fn file(&mut self, name: &str, contents: String) {
        self.files.push((format!("{name}.csv"), contents));
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.report, "{key} = {value}");
    }
}

fn settings(s: &Scenario) -> IterationSettings {
    IterationSettings {
        max_sweeps: s.solver.max_sweeps,
        increment_tol: s.solver.tol,
        residual_tol: s.solver.residual_tol,
        ..Default::default()
    }
}

fn mesh(s: &Scenario) -> Mesh {
    Mesh::uniform(s.solver.mesh)
}

fn n_schedule(s: &Scenario) -> Vec<f64> {
    s.solver.n_schedule.clone().unwrap_or_else(default_n_schedule)
}

fn ball_grid(s: &Scenario, radius: f64) -> logman::Result<Arc<RadialGrid>> {
    Ok(Arc::new(RadialGrid::uniform(radius, s.solver.mesh)?))
}

fn field(grid: &Arc<RadialGrid>, e: &Expr) -> RadialField {
    RadialField::from_fn(grid.clone(), |r| e.eval(r))
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt17).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render(report: &CertificateReport) -> String {
    report.render()
}

pub fn run(s: &Scenario, command: Command) -> logman::Result<Outcome> {
    let mut out = Outcome::default();
    out.line("name", &s.name);
    out.line("command", command);
    out.line("manifold", format!("{} m = {}", s.manifold.warping().name(), s.manifold.dim()));
    match command {
        Command::Eigen => eigen(s, &mut out)?,
        Command::LambdaStar => lambda_star_cmd(s, &mut out)?,
        Command::Duality => duality(s, &mut out)?,
        Command::Solve => solve(s, &mut out)?,
        Command::Blowup => blowup(s, &mut out)?,
        Command::Maximal => maximal(s, &mut out)?,
        Command::Subsolution => subsolution(s, &mut out)?,
        Command::Exists => exists(s, &mut out)?,
        Command::Nonexist => nonexist(s, &mut out)?,
        Command::Compare => compare(s, &mut out)?,
        Command::Green => green(s, &mut out)?,
        Command::Poisson => poisson(s, &mut out)?,
    }
    Ok(out)
}

fn eigen(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let radii = s.solver.r_schedule.clone().unwrap_or_else(|| vec![s.solver.r_max]);
    let grids = mesh(s).nested(&radii)?;
    let rows = grids
        .par_iter()
        .map(|g| {
            let principal = match principal_eigenvalue(&s.manifold, &s.a, g.clone()) {
                Ok(r) => Some(r),
                Err(Error::Hypothesis(_)) => None,
                Err(e) => return Err(e),
            };
            let bottom = dirichlet_bottom(&s.manifold, &s.a, s.solver.mu, g.clone())?;
            Ok((g.outer(), principal, bottom))
        })
        .collect::<logman::Result<Vec<_>>>()?;
    out.line("mu", fmt17(s.solver.mu));
    out.file(
        "eigen",
        csv(
            "R,lambda1,lambda1_Lmu",
            rows.iter().map(|(r, p, b)| vec![*r, p.as_ref().map_or(f64::NAN, |p| p.eigenvalue), b.eigenvalue]),
        ),
    );
    let (r, p, b) = rows.last().expect("at least one radius");
    if p.is_none() {
        out.line("lambda1", "none (a <= 0: no principal eigenvalue)");
    }
    let eigenfunction = p.as_ref().unwrap_or(b).eigenfunction.clone();
    if let Some(phi) = eigenfunction {
        out.file("eigenfunction", phi.to_csv());
    }
    out.line("R", fmt17(*r));
    out.line("lambda1_Lmu", fmt17(b.eigenvalue));
    if let Some(p) = p {
        out.line("lambda1", fmt17(p.eigenvalue));
    }
    out.headline.eigenvalue = Some(p.as_ref().map_or(b.eigenvalue, |p| p.eigenvalue));
    Ok(())
}

fn lambda_star_radii(s: &Scenario) -> Vec<f64> {
    s.solver
        .r_schedule
        .clone()
        .unwrap_or_else(|| [0.125, 0.25, 0.5, 1.0].iter().map(|f| f * s.solver.r_max).collect())
}

fn lambda_star_cmd(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let res = lambda_star(&s.manifold, &s.a, &lambda_star_radii(s), mesh(s))?;
    let upper = res.upper_bound.unwrap_or(res.eigenvalue);
    let mut table = csv("R,lambda1", res.radii.iter().zip(&res.sequence).map(|(r, l)| vec![*r, *l]));
    let _ = writeln!(table, "# lambda_star_upper_bound = {}", fmt17(upper));
    if let Some(x) = res.extrapolated {
        let _ = writeln!(table, "# lambda_star_extrapolated = {}", fmt17(x));
    }
    out.file("lambda_star", table);
    out.line("lambda_star_upper_bound", fmt17(upper));
    out.line("lambda_star_extrapolated", res.extrapolated.map_or("none".into(), fmt17));
    out.line("max_increase", fmt17(res.max_increase));
    out.headline.eigenvalue = Some(upper);
    Ok(())
}

fn duality(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let radii = s.solver.r_schedule.clone().expect("validated");
    let mus = s.solver.mu_grid.clone().expect("validated");
    let d = duality_check(&s.manifold, &s.a, &radii, &mus, mesh(s))?;
    out.file(
        "duality",
        csv(
            "mu,lambda1_Lmu,nonnegative",
            d.grid
                .iter()
                .map(|(mu, l, v)| vec![*mu, *l, f64::from(u8::from(*v == SignVerdict::NonNegative))]),
        ),
    );
    out.line("lambda_star", fmt17(d.lambda_star.eigenvalue));
    out.line("mu_flip", fmt17(d.mu_flip));
    out.report.push_str(&render(&d.report));
    out.headline.eigenvalue = Some(d.lambda_star.eigenvalue);
    out.headline.verdict = Some(d.report.overall().holds());
    Ok(())
}

fn solver_summary(out: &mut Outcome, rep: &SolverReport) {
    out.report.push_str(&rep.summary());
    out.headline.residual = Some(rep.residual);
    out.headline.u0 = Some(rep.solution.pole_value());
}

fn dirichlet_solve(
    s: &Scenario,
    problem: &LogisticProblem,
    grid: &Arc<RadialGrid>,
    boundary: f64,
) -> logman::Result<SolverReport> {
    let sub = s
        .u_sub
        .as_ref()
        .map_or_else(|| RadialField::constant(grid.clone(), 0.0), |e| field(grid, e));
    let ceiling = boundary.max(problem.equilibrium_bound(grid.outer()));
    let sup = s
        .u_super
        .as_ref()
        .map_or_else(|| RadialField::constant(grid.clone(), ceiling), |e| field(grid, e));
    solve_bvp_monotone(problem, grid.clone(), boundary, &sub, &sup, &settings(s))
}

fn solve(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let problem = s.problem()?;
    let grid = ball_grid(s, s.solver.r_max)?;
    let rep = dirichlet_solve(s, &problem, &grid, s.solver.boundary)?;
    out.line("R", fmt17(s.solver.r_max));
    out.line("boundary", fmt17(s.solver.boundary));
    solver_summary(out, &rep);
    out.file("solution", rep.solution.to_csv());
    if let Some(lower) = &rep.lower {
        out.file("lower", lower.to_csv());
    }
    out.headline.verdict = Some(rep.converged);
    Ok(())
}

fn blowup(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let problem = s.problem()?;
    let grid = ball_grid(s, s.solver.r_max)?;
    let rep = blowup_solution(&problem, grid, &n_schedule(s), &settings(s))?;
    out.line("R", fmt17(s.solver.r_max));
    solver_summary(out, &rep);
    out.file("solution", rep.solution.to_csv());
    out.headline.verdict = rep.n_converged;
    Ok(())
}

fn maximal(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let problem = s.problem()?;
    let radii = s
        .solver
        .r_schedule
        .clone()
        .unwrap_or_else(|| [0.25, 0.5, 1.0].iter().map(|f| f * s.solver.r_max).collect());
    let u_minus = if s.solver.subsolution {
        let run = construct_subsolution(&problem, s.solver.radius, s.solver.t_o, s.solver.mesh + 1)?;
        out.file("u_minus", run.glued.field.to_csv());
        Some(run.glued.field)
    } else {
        None
    };
    let rep = maximal_solution(&problem, &radii, mesh(s), &n_schedule(s), u_minus.as_ref(), &settings(s))?;
    solver_summary(out, &rep);
    out.file("solution", rep.solution.to_csv());
    out.file(
        "stages",
        csv(
            "R,u_R(0)",
            rep.radii.iter().zip(&rep.stages).map(|(r, u)| vec![*r, u.pole_value()]),
        ),
    );
    out.headline.verdict = rep.r_converged;
    Ok(())
}

fn subsolution(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let problem = s.problem()?;
    let run = construct_subsolution(&problem, s.solver.radius, s.solver.t_o, s.solver.mesh + 1)?;
    out.line("R", fmt17(s.solver.radius));
    out.line("T_o", fmt17(s.solver.t_o));
    out.line("alpha0", fmt17(run.interior.alpha0));
    out.line("eta", fmt17(run.interior.eta));
    out.line("eta_window", format!("[{}, {}]", fmt17(run.interior.eta_min), fmt17(run.interior.eta_max)));
    out.line("annulus_derivative_bound", format!("{} <= {}", fmt17(run.annulus.bound_lhs), fmt17(run.annulus.bound_rhs)));
    out.report.push_str(&render(&run.report));
    out.file("interior", run.interior.beta.to_csv());
    out.file("annulus", run.annulus.alpha.to_csv());
    out.file("glued", run.glued.field.to_csv());
    out.headline.verdict = Some(run.report.overall().holds());
    out.headline.u0 = Some(run.glued.field.pole_value());
    Ok(())
}

fn scan_radii(s: &Scenario) -> Vec<f64> {
    s.solver
        .r_schedule
        .clone()
        .unwrap_or_else(|| (1..=50).map(f64::from).collect())
}

fn exists(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let radii = scan_radii(s);
    let rows: Vec<(f64, f64, f64, bool)> = match s.exists_mode {
        ExistsMode::Condition => radii
            .iter()
            .map(|&r| {
                let rep = existence_condition(&s.manifold, &s.a, r, s.solver.t_o)?;
                let row = &rep.rows[0];
                Ok((r, row.lhs, row.rhs, rep.overall().holds()))
            })
            .collect::<logman::Result<_>>()?,
        ExistsMode::Yamabe => {
            let WarpingFunction::Hyperbolic { curvature } = *s.manifold.warping() else {
                return Err(Error::InvalidParameter("the Yamabe condition needs a hyperbolic manifold".into()));
            };
            let m = s.manifold.dim();
            let s_sup = -((m * (m - 1)) as f64) * curvature * s.yamabe_factor;
            out.line("s_sup", fmt17(s_sup));
            radii
                .iter()
                .map(|&r| {
                    let (lhs, rhs) = yamabe_condition(m, curvature.sqrt(), s_sup, r)?;
                    Ok((r, lhs, rhs, lhs <= rhs))
                })
                .collect::<logman::Result<_>>()?
        }
    };
    let relation = match s.exists_mode {
        ExistsMode::Condition => ">",
        ExistsMode::Yamabe => "<=",
    };
    out.line("condition", format!("lhs {relation} rhs"));
    out.file(
        "exists",
        csv("R,lhs,rhs,holds", rows.iter().map(|(r, l, h, ok)| vec![*r, *l, *h, f64::from(u8::from(*ok))])),
    );
    let found = rows.iter().find(|row| row.3).map(|row| row.0);
    out.line("smallest_radius", found.map_or("none".into(), fmt17));
    if s.exists_mode == ExistsMode::Condition {
        let at = found.unwrap_or(*radii.last().expect("non-empty"));
        out.report.push_str(&render(&existence_condition(&s.manifold, &s.a, at, s.solver.t_o)?));
    }
    out.headline.verdict = Some(found.is_some());
    if s.exists_solve {
        let problem = s.problem()?;
        let grid = ball_grid(s, s.solver.r_max)?;
        let rep = blowup_solution(&problem, grid, &n_schedule(s), &settings(s))?;
        let inner = rep.solution.restrict(Arc::new(rep.solution.grid().prefix(0.5 * s.solver.r_max)?))?;
        let res = residual_field(&problem, &inner)?;
        let interior = res.values()[..res.values().len() - 1]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let positive = rep.solution.values().iter().all(|&v| v > 0.0);
        out.line("solve_R", fmt17(s.solver.r_max));
        out.line("solve_positive", positive);
        out.line("solve_residual_inner_half", fmt17(interior));
        out.line("solve_u(0)", fmt17(rep.solution.pole_value()));
        out.file("solution", rep.solution.to_csv());
        out.headline.residual = Some(interior);
        out.headline.u0 = Some(rep.solution.pole_value());
    }
    Ok(())
}

/// Per-radius volumes and integrals shown next to a certificate.
fn integrals_csv(s: &Scenario, u: Option<&RadialField>) -> logman::Result<String> {
    let (lo, hi) = s.solver.r_range;
    let a_plus = s.a.positive_part();
    let mut header = String::from("r,ball_volume,int_ball_a_plus");
    if u.is_some() {
        header.push_str(",int_sphere_u_q,int_ball_u_q");
    }
    let mut rows = Vec::new();
    for r in log_spaced(lo, hi, 32) {
        let mut row = vec![
            r,
            s.manifold.ball_volume(r)?,
            s.manifold.ball_integral(|t| a_plus.eval(t), r),
        ];
        if let Some(u) = u {
            row.push(integrate_sphere(&s.manifold, u, s.params.q, r)?);
            row.push(integrate_ball(&s.manifold, u, s.params.q, r)?);
        }
        rows.push(row);
    }
    Ok(csv(&header, rows))
}

fn nonexist(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let theorem = s.theorem.expect("validated");
    out.line("theorem", theorem);
    let spectral = SpectralSettings {
        radii: s.solver.r_schedule.clone().unwrap_or_else(|| SpectralSettings::default().radii),
        mesh: mesh(s),
    };
    let range = s.solver.r_range;
    let grid = ball_grid(s, range.1)?;
    let u = s.u.as_ref().map(|e| field(&grid, e));
    let phi = s
        .phi
        .as_ref()
        .map_or_else(|| RadialField::constant(grid.clone(), 1.0), |e| field(&grid, e));
    let report = match theorem {
        Theorem::AbRemark => {
            let numerics = s.ab_numerics.then(|| AbNumerics {
                radii: s.solver.r_schedule.clone().expect("validated"),
                mesh: mesh(s),
            });
            ab_comparison_scenario(s.k, s.manifold.dim(), s.lambda, numerics.as_ref())?
        }
        _ => {
            let problem = s.problem()?;
            let u = u.as_ref();
            match theorem {
                Theorem::Thm33 => thm33_check(&problem, &s.params, range, &spectral)?,
                Theorem::Thm32 => thm32_check(&problem, &phi, u.expect("validated"), &s.params, range)?,
                Theorem::Thm32Prime => thm32prime_check(&problem, &phi, u, &s.params, range)?,
                Theorem::Cor317 => cor317_check(&problem, u.expect("validated"), &s.params, range, &spectral)?,
                Theorem::Cor32pp => cor32pp_check(&problem, &s.params, range)?,
                Theorem::Lemma31 => lemma31_certificate(
                    &problem,
                    u.expect("validated"),
                    s.params.p,
                    s.params.grad_coeff_a,
                    s.solver.r_schedule.as_deref().expect("validated"),
                )?,
                Theorem::AbRemark => unreachable!(),
            }
        }
    };
    if theorem != Theorem::AbRemark {
        out.file("integrals", integrals_csv(s, u.as_ref())?);
    }
    let holds = report.overall().holds();
    out.report.push_str(&render(&report));
    out.line(
        "verdict",
        if holds {
            "non-existence certified"
        } else {
            "not certified"
        },
    );
    out.headline.verdict = Some(holds);
    Ok(())
}

fn compare(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let problem = s.problem()?;
    let grid = ball_grid(s, s.solver.r_max)?;
    let u = dirichlet_solve(s, &problem, &grid, s.compare_u)?;
    let v = dirichlet_solve(s, &problem, &grid, s.compare_v)?;
    let ordered = comparison_check(&problem, &u.solution, &v.solution, s.compare_tol)?;
    out.line("u_boundary", fmt17(s.compare_u));
    out.line("v_boundary", fmt17(s.compare_v));
    out.line("u_residual", fmt17(u.residual));
    out.line("v_residual", fmt17(v.residual));
    out.line("u <= v on B_R", ordered);
    out.file("u", u.solution.to_csv());
    out.file("v", v.solution.to_csv());
    out.headline.verdict = Some(ordered);
    out.headline.residual = Some(u.residual.max(v.residual));
    out.headline.u0 = Some(u.solution.pole_value());
    Ok(())
}

fn green(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let n = s.solver.mesh;
    let rows = (1..=n)
        .map(|i| {
            let r = s.solver.r_max * i as f64 / n as f64;
            Ok(vec![r, green_radial(&s.manifold, r)?])
        })
        .collect::<logman::Result<Vec<_>>>()?;
    out.line("G(R_max)", fmt17(rows.last().expect("mesh >= 4")[1]));
    out.file("green", csv("r,G", rows));
    Ok(())
}

fn poisson(s: &Scenario, out: &mut Outcome) -> logman::Result<()> {
    let grid = ball_grid(s, s.solver.r_max)?;
    let rho = field(&grid, s.rho.as_ref().expect("validated"));
    let sol = poisson_solve(&s.manifold, &rho)?;
    let sub = log_substitution(&s.manifold, &sol.v, &sol.source_average)?;
    out.line("mass", fmt17(sol.mass));
    out.line("residual", fmt17(sol.residual));
    out.line("residual_smooth", fmt17(sol.residual_smooth));
    out.line("log_substitution_residual", fmt17(sub.residual));
    out.line("phi_lower_bound", fmt17(sub.lower_bound));
    out.line("phi_clamped", sub.clamped);
    out.line("v(0)", fmt17(sol.v.pole_value()));
    out.file("v", sol.v.to_csv());
    out.file("phi", sub.phi.to_csv());
    out.file("rho_average", sol.source_average.to_csv());
    out.headline.residual = Some(sol.residual_smooth);
    out.headline.u0 = Some(sol.v.pole_value());
    Ok(())
}

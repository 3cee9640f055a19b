//! Monotone iteration for `Δu + a u − b u^σ = 0` on balls and annuli, the
//! boundary blow-up limit `n → ∞`, the exhaustion limit `R → ∞` that yields
//! the maximal solution, and comparison/uniqueness checks.
//!
//! One sweep solves `(Δ_h − C) u_{j+1} = −(C u_j + a u_j − b u_j^σ)` with the
//! node-wise shift `C_i = 1.1(|a_i| + σ b_i d_i^{σ−1})`, where `d` is the
//! current descending iterate. Since every iterate lies below `d`, `C`
//! dominates the derivative of the nonlinearity on the order interval and
//! the map is order preserving; refreshing it keeps the shift small once the
//! huge initial super-solutions of the blow-up problems have decayed.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::manifold::default_slack;
use crate::problem::LogisticProblem;
use crate::radial::{residual_with, Geometry, RadialField, RadialGrid};
use crate::report::{CertificateReport, Verdict};
use crate::spectrum::Mesh;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationSettings {
    pub max_sweeps: usize,
    /// Relative sup-norm increment below which an iterate has converged.
    pub increment_tol: f64,
    /// Absolute residual below which an iterate has converged.
    pub residual_tol: f64,
    pub shift_factor: f64,
    /// Relative change on `B_{R/2}` declaring the blow-up limit converged.
    pub blowup_tol: f64,
}

impl Default for IterationSettings {
    fn default() -> Self {
        Self {
            max_sweeps: 10_000,
            increment_tol: 1e-10,
            residual_tol: 1e-9,
            shift_factor: 1.1,
            blowup_tol: 1e-6,
        }
    }
}

/// Boundary values `n = 4^k`, `k = 0..=30`.
pub fn default_n_schedule() -> Vec<f64> {
    (0..=30).map(|k| 4f64.powi(k)).collect()
}

/// Per-sweep monotonicity record. Differences are divided nodewise by
/// `max(1, |u_j|)`, so rounding at large boundary data stays small.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    /// `max(u_{j+1} − u_j)` of the descending sequence (should be ≤ 0).
    pub descending_increase: f64,
    /// `max(u_j − u_{j+1})` of the ascending sequence (should be ≤ 0).
    pub ascending_decrease: f64,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub solution: RadialField,
    /// Limit of the ascending iteration (single solves only).
    pub lower: Option<RadialField>,
    pub residual: f64,
    pub sweeps: usize,
    pub ledger: Vec<SweepRecord>,
    pub converged: bool,
    /// Boundary values used by a blow-up run with the relative change of the
    /// interior solution at each step.
    pub n_values: Vec<f64>,
    pub n_increments: Vec<f64>,
    pub n_converged: Option<bool>,
    /// Radii of an exhaustion run with the blow-up limit at each radius.
    pub radii: Vec<f64>,
    pub stages: Vec<RadialField>,
    pub r_converged: Option<bool>,
}

impl SolverReport {
    fn single(solution: RadialField, lower: Option<RadialField>, residual: f64, core: &Core) -> Self {
        Self {
            solution,
            lower,
            residual,
            sweeps: core.sweeps,
            ledger: core.ledger.clone(),
            converged: true,
            n_values: Vec::new(),
            n_increments: Vec::new(),
            n_converged: None,
            radii: Vec::new(),
            stages: Vec::new(),
            r_converged: None,
        }
    }

    /// Plain-text summary of residuals and ledgers.
    pub fn summary(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let f = crate::fmt17;
        let _ = writeln!(s, "converged = {}", self.converged);
        let _ = writeln!(s, "residual = {}", f(self.residual));
        let _ = writeln!(s, "sweeps = {}", self.sweeps);
        let _ = writeln!(s, "u(0) = {}", f(self.solution.pole_value()));
        if let Some(worst) = self
            .ledger
            .iter()
            .map(|r| r.descending_increase.max(r.ascending_decrease))
            .reduce(f64::max)
        {
            let _ = writeln!(s, "max_monotonicity_violation = {}", f(worst));
        }
        if let Some(c) = self.n_converged {
            let _ = writeln!(s, "blowup_converged = {c}");
            for (n, d) in self.n_values.iter().zip(&self.n_increments) {
                let _ = writeln!(s, "n = {}  interior_change = {}", f(*n), f(*d));
            }
        }
        if let Some(c) = self.r_converged {
            let _ = writeln!(s, "exhaustion_converged = {c}");
            for (r, u) in self.radii.iter().zip(&self.stages) {
                let _ = writeln!(s, "R = {}  u_R(0) = {}", f(*r), f(u.pole_value()));
            }
        }
        s
    }
}

pub(crate) struct Core {
    pub(crate) desc: Vec<f64>,
    pub(crate) asc: Vec<f64>,
    pub(crate) sweeps: usize,
    pub(crate) ledger: Vec<SweepRecord>,
}

fn pow_sigma(v: f64, sigma: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else if sigma == 2.0 {
        v * v
    } else {
        v.powf(sigma)
    }
}

/// Nodewise relative change. Values that tend to zero are caught by the
/// residual test instead, so the floor only guards against division by zero.
fn relative_increment(new: &[f64], old: &[f64], range: std::ops::Range<usize>) -> f64 {
    range
        .map(|i| (new[i] - old[i]).abs() / (new[i].abs() + f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Descending and ascending iteration in lockstep.
#[allow(clippy::too_many_arguments)]
fn iterate(
    geometry: &Geometry,
    a: &[f64],
    b: &[f64],
    sigma: f64,
    inner: f64,
    outer: f64,
    sub: &[f64],
    sup: &[f64],
    settings: &IterationSettings,
) -> Result<Core> {
    let n = a.len();
    let range = geometry.grid().unknowns();
    let mut desc = sup.to_vec();
    let mut asc = sub.to_vec();
    for v in [&mut desc, &mut asc] {
        v[n - 1] = outer;
        if !geometry.grid().has_pole() {
            v[0] = inner;
        }
    }
    let f = |u: f64, i: usize| a[i] * u - b[i] * pow_sigma(u, sigma);
    let mut ledger = Vec::new();
    let (mut desc_done, mut asc_done) = (false, false);
    let residual_of = |u: &[f64]| -> f64 {
        let lap = geometry.laplacian(u);
        range
            .clone()
            .map(|i| (lap[i] + f(u[i], i)).abs())
            .fold(0.0, f64::max)
    };
    for sweep in 1..=settings.max_sweeps {
        let shift: Vec<f64> = (0..n)
            .map(|i| settings.shift_factor * (a[i].abs() + sigma * b[i] * pow_sigma(desc[i], sigma - 1.0)))
            .collect();
        let potential: Vec<f64> = shift.iter().map(|c| -c).collect();
        let step = |u: &[f64]| -> Result<Vec<f64>> {
            let rhs: Vec<f64> = (0..n).map(|i| -(shift[i] * u[i] + f(u[i], i))).collect();
            geometry.solve(&potential, &rhs, inner, outer)
        };
        let new_desc = step(&desc)?;
        let new_asc = step(&asc)?;
        let rec = SweepRecord {
            descending_increase: range
                .clone()
                .map(|i| (new_desc[i] - desc[i]) / desc[i].abs().max(1.0))
                .fold(f64::NEG_INFINITY, f64::max),
            ascending_decrease: range
                .clone()
                .map(|i| (asc[i] - new_asc[i]) / asc[i].abs().max(1.0))
                .fold(f64::NEG_INFINITY, f64::max),
        };
        ledger.push(rec);
        let d_inc = relative_increment(&new_desc, &desc, range.clone());
        let a_inc = relative_increment(&new_asc, &asc, range.clone());
        desc = new_desc;
        asc = new_asc;
        desc_done = desc_done || d_inc < settings.increment_tol || residual_of(&desc) < settings.residual_tol;
        asc_done = asc_done || a_inc < settings.increment_tol || residual_of(&asc) < settings.residual_tol;
        if desc_done && asc_done {
            return Ok(Core {
                desc,
                asc,
                sweeps: sweep,
                ledger,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: settings.max_sweeps,
        detail: "monotone iteration".into(),
        last: Some(Box::new(RadialField::from_parts(geometry.grid().clone(), desc))),
    })
}

/// Checks that `u` is a discrete super- (`sign = 1`) or sub-solution
/// (`sign = −1`) at the unknowns.
fn check_one_sided(
    geometry: &Geometry,
    a: &[f64],
    b: &[f64],
    sigma: f64,
    u: &[f64],
    sign: f64,
    what: &str,
) -> Result<()> {
    let lap = geometry.laplacian(u);
    let rounding = geometry.laplacian_rounding(u);
    for i in geometry.grid().unknowns() {
        let nl = b[i] * pow_sigma(u[i], sigma);
        let value = lap[i] + a[i] * u[i] - nl;
        let tol = 1e-8 * (1.0 + lap[i].abs() + (a[i] * u[i]).abs() + nl) + 64.0 * rounding[i];
        if sign * value > tol {
            return Err(Error::Precondition(format!(
                "{what} fails at r = {}: Δu + au − bu^σ = {value:e}",
                geometry.grid().nodes()[i]
            )));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_on_geometry(
    geometry: &Geometry,
    a: &[f64],
    b: &[f64],
    sigma: f64,
    inner: f64,
    outer: f64,
    sub: &[f64],
    sup: &[f64],
    settings: &IterationSettings,
) -> Result<(Vec<f64>, Vec<f64>, Core)> {
    if let Some(i) = b.iter().position(|&v| v < 0.0) {
        return Err(Error::Precondition(format!(
            "b must be non-negative (b = {} at r = {})",
            b[i],
            geometry.grid().nodes()[i]
        )));
    }
    let n = a.len();
    let tol = |x: f64| 1e-12 * (1.0 + x.abs());
    if let Some(i) = (0..n).find(|&i| sub[i] > sup[i] + tol(sup[i])) {
        return Err(Error::Precondition(format!(
            "bracket violated: u_sub > u_super at r = {}",
            geometry.grid().nodes()[i]
        )));
    }
    if !(sub[n - 1] <= outer + tol(outer) && outer <= sup[n - 1] + tol(outer)) {
        return Err(Error::Precondition(format!(
            "boundary value {outer} outside [{}, {}]",
            sub[n - 1],
            sup[n - 1]
        )));
    }
    if !geometry.grid().has_pole() && !(sub[0] <= inner + tol(inner) && inner <= sup[0] + tol(inner)) {
        return Err(Error::Precondition(format!(
            "inner boundary value {inner} outside [{}, {}]",
            sub[0], sup[0]
        )));
    }
    check_one_sided(geometry, a, b, sigma, sup, 1.0, "super-solution")?;
    check_one_sided(geometry, a, b, sigma, sub, -1.0, "sub-solution")?;
    let core = iterate(geometry, a, b, sigma, inner, outer, sub, sup, settings)?;
    Ok((core.desc.clone(), core.asc.clone(), core))
}

/// Solves the Dirichlet problem `u = boundary` on `∂B_R` by monotone
/// iteration from `u_super` (descending) and `u_sub` (ascending); returns
/// the descending limit.
pub fn solve_bvp_monotone(
    problem: &LogisticProblem,
    grid: Arc<RadialGrid>,
    boundary: f64,
    u_sub: &RadialField,
    u_super: &RadialField,
    settings: &IterationSettings,
) -> Result<SolverReport> {
    let geometry = Geometry::new(problem.manifold(), grid.clone())?;
    solve_with_geometry(problem, &geometry, boundary, u_sub, u_super, settings)
}

fn solve_with_geometry(
    problem: &LogisticProblem,
    geometry: &Geometry,
    boundary: f64,
    u_sub: &RadialField,
    u_super: &RadialField,
    settings: &IterationSettings,
) -> Result<SolverReport> {
    let grid = geometry.grid().clone();
    if u_sub.grid() != grid.as_ref() || u_super.grid() != grid.as_ref() {
        return Err(Error::invalid("sub/super-solutions must live on the solver grid"));
    }
    let a = problem.a().sample(&grid);
    let b = problem.b().sample(&grid);
    let (desc, asc, core) = solve_on_geometry(
        geometry,
        a.values(),
        b.values(),
        problem.sigma(),
        boundary,
        boundary,
        u_sub.values(),
        u_super.values(),
        settings,
    )?;
    let solution = RadialField::new(grid.clone(), desc)?;
    let lower = RadialField::new(grid, asc)?;
    let res = residual_with(geometry, problem, &solution)?;
    let residual = res.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(SolverReport::single(solution, Some(lower), residual, &core))
}

/// Interior limit of the solutions with boundary values `n → ∞`.
///
/// The solves run on a copy of `grid` whose last cell is refined
/// geometrically toward `∂B_R`: the boundary layer of the data `n` has width
/// `O(n^{−(σ−1)/2})` and must stay resolved for the interior to converge.
/// The returned field lives on `grid`.
pub fn blowup_solution(
    problem: &LogisticProblem,
    grid: Arc<RadialGrid>,
    n_schedule: &[f64],
    settings: &IterationSettings,
) -> Result<SolverReport> {
    if n_schedule.is_empty() || n_schedule.windows(2).any(|w| !(w[1] > w[0])) || !(n_schedule[0] > 0.0) {
        return Err(Error::invalid("n schedule must be positive and increasing"));
    }
    let radius = grid.outer();
    problem.require_positive_b(radius)?;
    let fine = Arc::new(grid.refined_toward_outer(BOUNDARY_LAYER_SPACING * radius, BOUNDARY_LAYER_RATIO)?);
    let geometry = Geometry::new(problem.manifold(), fine.clone())?;
    let ceiling = problem.equilibrium_bound(radius) + 1.0;
    let inner_nodes: Vec<usize> = fine
        .unknowns()
        .filter(|&i| fine.nodes()[i] <= 0.5 * radius)
        .collect();

    let mut prev: Option<SolverReport> = None;
    let mut n_values = Vec::new();
    let mut increments = Vec::new();
    let mut total_sweeps = 0;
    let mut ledger = Vec::new();
    for &n in n_schedule {
        let sup = RadialField::constant(fine.clone(), n.max(ceiling));
        // ascending iterates from a sub-solution stay sub-solutions; the
        // descending limit need not be one to rounding accuracy
        let sub = match &prev {
            Some(p) => p.lower.clone().unwrap_or_else(|| p.solution.clone()),
            None => RadialField::constant(fine.clone(), 0.0),
        };
        let report = solve_with_geometry(problem, &geometry, n, &sub, &sup, settings)?;
        total_sweeps += report.sweeps;
        ledger.extend(report.ledger.iter().copied());
        n_values.push(n);
        let change = match &prev {
            Some(p) => {
                let (u, v) = (report.solution.values(), p.solution.values());
                if let Some(i) = (0..u.len()).find(|&i| u[i] < v[i] - 1e-9 * (1.0 + v[i].abs())) {
                    return Err(Error::Inconsistent(format!(
                        "blow-up family decreases in n at r = {}",
                        fine.nodes()[i]
                    )));
                }
                inner_nodes
                    .iter()
                    .map(|&i| (u[i] - v[i]).abs() / u[i].abs().max(1e-300))
                    .fold(0.0, f64::max)
            }
            None => f64::INFINITY,
        };
        increments.push(change);
        let done = change < settings.blowup_tol;
        prev = Some(report);
        if done {
            break;
        }
    }
    let last = prev.expect("non-empty schedule");
    let converged = increments.last().is_some_and(|&c| c < settings.blowup_tol);
    let coarse = coarsen(&last.solution, &grid);
    if !converged && n_schedule.len() > 1 {
        return Err(Error::NoConvergence {
            iterations: n_values.len(),
            detail: format!(
                "blow-up limit still changing (relative interior increment {:e})",
                increments.last().copied().unwrap_or(f64::NAN)
            ),
            last: Some(Box::new(coarse)),
        });
    }
    // the boundary layer never converges in n; report the interior residual
    let upto = inner_nodes.last().map_or(0, |&i| i + 1);
    let residual = interior_residual(&geometry, problem, &last.solution, upto)?;
    Ok(SolverReport {
        solution: coarse,
        lower: None,
        residual,
        sweeps: total_sweeps,
        ledger,
        converged: true,
        n_values,
        n_increments: increments,
        n_converged: Some(converged),
        radii: Vec::new(),
        stages: Vec::new(),
        r_converged: None,
    })
}

/// Smallest spacing at `∂B_R` used by [`blowup_solution`], relative to `R`.
pub const BOUNDARY_LAYER_SPACING: f64 = 1e-9;
const BOUNDARY_LAYER_RATIO: f64 = 1.15;

/// Restriction of a field on a refined grid to the original nodes, which
/// are all but the inserted ones: a prefix plus the last node.
fn coarsen(fine: &RadialField, grid: &Arc<RadialGrid>) -> RadialField {
    let n = grid.len();
    let mut values = fine.values()[..n - 1].to_vec();
    values.push(fine.boundary_value());
    RadialField::from_parts(grid.clone(), values)
}

fn interior_residual(geometry: &Geometry, problem: &LogisticProblem, u: &RadialField, upto: usize) -> Result<f64> {
    let res = residual_with(geometry, problem, u)?;
    Ok(res.values()[..upto].iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Maximal solution as the decreasing limit of blow-up solutions over the
/// radius schedule, returned on the smallest ball. With `u_minus`, the limit
/// must dominate it.
pub fn maximal_solution(
    problem: &LogisticProblem,
    radii: &[f64],
    mesh: Mesh,
    n_schedule: &[f64],
    u_minus: Option<&RadialField>,
    settings: &IterationSettings,
) -> Result<SolverReport> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("radius schedule must be increasing"));
    }
    if let Some(sub) = u_minus {
        let support = sub
            .nodes()
            .iter()
            .zip(sub.values())
            .filter(|(_, v)| **v > 0.0)
            .map(|(r, _)| *r)
            .fold(0.0, f64::max);
        if support > radii[0] {
            return Err(Error::Precondition(format!(
                "sub-solution support {support} exceeds the smallest radius {}",
                radii[0]
            )));
        }
    }
    let grids = mesh.nested(radii)?;
    let stages = grids
        .par_iter()
        .map(|g| blowup_solution(problem, g.clone(), n_schedule, settings))
        .collect::<Result<Vec<_>>>()?;

    for k in 0..stages.len().saturating_sub(1) {
        let small = &stages[k].solution;
        let big = stages[k + 1].solution.restrict(small.grid_arc().clone())?;
        let (u, v) = (big.values(), small.values());
        for i in small.grid().unknowns() {
            if u[i] > v[i] + 1e-8 * (1.0 + v[i].abs()) {
                return Err(Error::Inconsistent(format!(
                    "exhaustion not monotone: u(R = {}) > u(R = {}) at r = {}",
                    grids[k + 1].outer(),
                    grids[k].outer(),
                    small.nodes()[i]
                )));
            }
        }
    }

    let smallest = grids[0].clone();
    let last = stages.last().expect("non-empty");
    let limit = last.solution.restrict(smallest.clone())?;
    let r_converged = if stages.len() >= 2 {
        let prev = stages[stages.len() - 2].solution.restrict(smallest.clone())?;
        let change = limit
            .values()
            .iter()
            .zip(prev.values())
            .map(|(a, b)| (a - b).abs() / a.abs().max(1e-300))
            .fold(0.0, f64::max);
        Some(change < 1e-4)
    } else {
        Some(false)
    };
    if let Some(sub) = u_minus {
        let peak = sub.max();
        if peak > 0.0 && limit.max() <= 1e-12 * peak {
            return Err(Error::Inconsistent(
                "maximal solution indistinguishable from 0 above a positive sub-solution".into(),
            ));
        }
        for (r, v) in limit.nodes().iter().zip(limit.values()) {
            let s = sub.value_at(*r);
            if *v < s - 1e-8 * (1.0 + s.abs()) {
                return Err(Error::Inconsistent(format!(
                    "maximal solution {v} below the sub-solution {s} at r = {r}"
                )));
            }
        }
    }
    let geometry = Geometry::new(problem.manifold(), smallest.clone())?;
    let residual = interior_residual(&geometry, problem, &limit, smallest.len() - 1)?;
    Ok(SolverReport {
        solution: limit,
        lower: None,
        residual,
        sweeps: stages.iter().map(|s| s.sweeps).sum(),
        ledger: Vec::new(),
        converged: true,
        n_values: last.n_values.clone(),
        n_increments: last.n_increments.clone(),
        n_converged: Some(stages.iter().all(|s| s.n_converged == Some(true))),
        radii: grids.iter().map(|g| g.outer()).collect(),
        stages: stages.into_iter().map(|s| s.solution).collect(),
        r_converged,
    })
}

/// `u ≤ v` on `B_R` for a solution `u` and a super-solution `v` with
/// `u(R) ≤ v(R)`. The hypotheses are checked and reported as precondition
/// errors, distinct from a `false` verdict.
pub fn comparison_check(problem: &LogisticProblem, u: &RadialField, v: &RadialField, tol: f64) -> Result<bool> {
    if u.grid() != v.grid() {
        return Err(Error::invalid("fields must share a grid"));
    }
    if u.boundary_value() > v.boundary_value() + tol {
        return Err(Error::Precondition(format!(
            "u(R) = {} exceeds v(R) = {}",
            u.boundary_value(),
            v.boundary_value()
        )));
    }
    let geometry = Geometry::new(problem.manifold(), u.grid_arc().clone())?;
    let a = problem.a().sample(u.grid_arc());
    let b = problem.b().sample(u.grid_arc());
    let sigma = problem.sigma();
    let lap_u = geometry.laplacian(u.values());
    let lap_v = geometry.laplacian(v.values());
    for i in u.grid().unknowns() {
        let scale = |lap: f64, w: f64| 1.0 + lap.abs() + (a.values()[i] * w).abs() + b.values()[i] * pow_sigma(w, sigma);
        let ru = lap_u[i] + a.values()[i] * u.values()[i] - b.values()[i] * pow_sigma(u.values()[i], sigma);
        if ru.abs() > tol * scale(lap_u[i], u.values()[i]) {
            return Err(Error::Precondition(format!(
                "u is not a solution at r = {} (residual {ru:e})",
                u.nodes()[i]
            )));
        }
        let rv = lap_v[i] + a.values()[i] * v.values()[i] - b.values()[i] * pow_sigma(v.values()[i], sigma);
        if rv > tol * scale(lap_v[i], v.values()[i]) {
            return Err(Error::Precondition(format!(
                "v is not a super-solution at r = {} (Δv + av − bv^σ = {rv:e})",
                v.nodes()[i]
            )));
        }
    }
    Ok(u
        .values()
        .iter()
        .zip(v.values())
        .all(|(x, y)| *x <= *y + tol * (1.0 + y.abs())))
}

/// Hypotheses of the uniqueness theorem: `b ≥ C(1+r)^{−μ}`,
/// `sup a₋/b < ∞` and `liminf log vol B_r / r^{2−μ} < ∞`, plus the
/// `0 < liminf ≤ limsup < ∞` sandwich for two supplied solutions.
pub fn uniqueness_conditions(
    problem: &LogisticProblem,
    mu: f64,
    r_range: (f64, f64),
    solutions: Option<(&RadialField, &RadialField)>,
) -> Result<CertificateReport> {
    if !(0.0..2.0).contains(&mu) {
        return Err(Error::invalid(format!("mu must lie in [0, 2), got {mu}")));
    }
    let (lo, hi) = r_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("r_range must satisfy 0 < lo < hi"));
    }
    let mut report = CertificateReport::new(
        "uniqueness of positive solutions",
        "positive solutions bounded above and away from 0 coincide",
    );
    let rs = crate::fit::log_spaced(lo, hi, 64);
    let b: Vec<f64> = rs.iter().map(|&r| problem.b().eval(r)).collect();
    let c_fit = rs
        .iter()
        .zip(&b)
        .map(|(r, bv)| bv * (1.0 + r).powf(mu))
        .fold(f64::INFINITY, f64::min);
    let decay = if b.iter().all(|&v| v > 0.0) {
        let xs: Vec<f64> = rs.iter().map(|r| (1.0 + r).ln()).collect();
        let ys: Vec<f64> = b.iter().map(|v| v.ln()).collect();
        line_fit(&xs, &ys).map(|f| -f.slope).unwrap_or(f64::NAN)
    } else {
        f64::INFINITY
    };
    let slack = default_slack(mu);
    report.compare(
        "b lower estimate: decay exponent of b",
        decay,
        "<=",
        mu + slack,
        format!("fitted C = min b(1+r)^mu = {}", crate::fmt17(c_fit)),
    );
    report.compare("b lower estimate: C", c_fit, ">", 0.0, "");

    let all: Vec<f64> = (0..=4000).map(|i| hi * i as f64 / 4000.0).collect();
    let ratio = all
        .iter()
        .map(|&r| {
            let a_minus = (-problem.a().eval(r)).max(0.0);
            let bv = problem.b().eval(r);
            if a_minus == 0.0 {
                0.0
            } else if bv > 0.0 {
                a_minus / bv
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    report.compare("sup a_-/b", ratio, "<", f64::INFINITY, "sampled on [0, r_max]");

    let growth = problem.manifold().classify_log_volume_growth(2.0 - mu, r_range)?;
    report.push(
        "vol growth: exponent of log vol B_r",
        growth.fitted_exponent,
        "<=",
        2.0 - mu + growth.slack,
        growth.verdict,
        "liminf log vol B_r / r^(2-mu) < inf",
    );

    if let Some((u, v)) = solutions {
        for (name, f) in [("u", u), ("v", v)] {
            report.compare(format!("inf {name}"), f.min(), ">", 0.0, "");
            report.compare(format!("sup {name}"), f.max(), "<", f64::INFINITY, "");
        }
        let diff = u
            .nodes()
            .iter()
            .zip(u.values())
            .map(|(r, x)| (x - v.value_at(*r)).abs())
            .fold(0.0, f64::max);
        let verdict = if report.overall().holds() {
            Verdict::from_bool(diff <= 1e-6 * (1.0 + u.max()))
        } else {
            Verdict::Inconclusive
        };
        report.diagnostic("sup |u - v|", diff, "<=", 1e-6 * (1.0 + u.max()), verdict, "conclusion u = v");
    }
    Ok(report)
}

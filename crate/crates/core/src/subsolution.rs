//! Construction of a compactly supported global sub-solution
//! `u₋ = β` on `B_R`, `α` on `B_{R+T_o} ∖ B_R`, `0` beyond.
//!
//! `α` solves `α″ + (m−1)(g′/g)α′ − a₋α − (b+ε)α^σ = 0` on `(R, R+T_o)` with
//! `α(R) = α₀`, `α(R+T_o) = 0`; `β(r) = α₀(1 + (R² − r²)η)` with `η` in the
//! window where `β′(R) ≤ α′(R)` is guaranteed and `β` is a sub-solution.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::logistic::{solve_on_geometry, IterationSettings};
use crate::manifold::ModelManifold;
use crate::problem::LogisticProblem;
use crate::radial::{Geometry, RadialField, RadialGrid};
use crate::report::{CertificateReport, Verdict};

const SAMPLES: usize = 2001;
const MAX_HALVINGS: usize = 60;

/// `sup_{[0,R]} r Δr = sup r(m−1)g′/g`, with the limit `m−1` at the pole.
pub fn tau(manifold: &ModelManifold, radius: f64) -> f64 {
    let m1 = (manifold.dim() - 1) as f64;
    (1..SAMPLES)
        .map(|i| {
            let r = radius * i as f64 / (SAMPLES - 1) as f64;
            r * m1 * manifold.warping().log_derivative(r)
        })
        .fold(m1, f64::max)
}

/// `(g(R+T_o)/g(R))^{m−1}`.
pub fn warp_ratio(manifold: &ModelManifold, radius: f64, t_o: f64) -> f64 {
    let w = manifold.warping();
    ((manifold.dim() - 1) as f64 * (w.ln_value(radius + t_o) - w.ln_value(radius))).exp()
}

fn max_on(c: &Coefficient, lo: f64, hi: f64) -> f64 {
    c.range_on(lo, hi, SAMPLES).1
}

fn min_on(c: &Coefficient, lo: f64, hi: f64) -> f64 {
    c.range_on(lo, hi, SAMPLES).0
}

/// The sufficient existence condition
/// `R inf_{B_R} a > (1+τ)(1/T_o + T_o max a₋)(g(R+T_o)/g(R))^{m−1}`.
pub fn existence_condition(manifold: &ModelManifold, a: &Coefficient, radius: f64, t_o: f64) -> Result<CertificateReport> {
    if !(radius > 0.0 && t_o > 0.0) {
        return Err(Error::invalid("R and T_o must be positive"));
    }
    manifold.check_radius(radius + t_o)?;
    let lhs = radius * min_on(a, 0.0, radius);
    let t = tau(manifold, radius);
    let ratio = warp_ratio(manifold, radius, t_o);
    let a_minus = max_on(&a.negative_part(), radius, radius + t_o);
    let rhs = (1.0 + t) * (1.0 / t_o + t_o * a_minus) * ratio;
    let mut report = CertificateReport::new(
        format!("existence condition at R = {radius}, T_o = {t_o}"),
        "a positive solution exists",
    );
    report.compare("R inf a vs (1+tau)(1/T_o + T_o max a_-)(g(R+T_o)/g(R))^(m-1)", lhs, ">", rhs, "");
    report.diagnostic("tau = sup r(m-1)g'/g", t, "=", t, Verdict::Holds, "");
    report.diagnostic("(g(R+T_o)/g(R))^(m-1)", ratio, "=", ratio, Verdict::Holds, "");
    Ok(report)
}

/// Smallest radius of `radii` (scanned in order) where the existence
/// condition holds.
pub fn smallest_existence_radius(manifold: &ModelManifold, a: &Coefficient, radii: &[f64], t_o: f64) -> Result<Option<f64>> {
    for &r in radii {
        if existence_condition(manifold, a, r, t_o)?.overall().holds() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Both sides of the Yamabe remark's condition on hyperbolic space of
/// curvature `−B` with scalar curvature bounded by `s_sup` on `B_{R+1}`:
/// `R s_sup ≤ −c_m(1 + (m−1)R√B coth(√B R))(sinh(√B(R+1))/sinh(√B R))^{m−1}`,
/// `c_m = 4(m−1)/(m−2)`.
pub fn yamabe_condition(dim: usize, sqrt_b: f64, s_sup: f64, radius: f64) -> Result<(f64, f64)> {
    if dim < 3 || !(sqrt_b > 0.0) || !(radius > 0.0) {
        return Err(Error::invalid("Yamabe condition needs m >= 3, sqrt(B) > 0, R > 0"));
    }
    let m1 = (dim - 1) as f64;
    let c_m = 4.0 * m1 / (dim as f64 - 2.0);
    let x = sqrt_b * radius;
    // sinh(x + √B)/sinh(x) in a form that does not overflow
    let ln_ratio = sqrt_b + ((1.0 - (-2.0 * (x + sqrt_b)).exp()) / (1.0 - (-2.0 * x).exp())).ln();
    let coth = 1.0 / x.tanh();
    let rhs = -c_m * (1.0 + m1 * x * coth) * (m1 * ln_ratio).exp();
    Ok((radius * s_sup, rhs))
}

#[derive(Debug, Clone)]
pub struct AnnulusProfile {
    pub alpha: RadialField,
    pub alpha0: f64,
    pub t: f64,
    pub t_o: f64,
    pub epsilon: f64,
    pub derivative_inner: f64,
    pub derivative_outer: f64,
    /// `|α′(R)|` and the right side of its a-priori bound.
    pub bound_lhs: f64,
    pub bound_rhs: f64,
    pub sweeps: usize,
}

impl AnnulusProfile {
    pub fn inner(&self) -> f64 {
        self.alpha.grid().inner()
    }
}

/// One-sided derivative at an end of a solution, from the flux balance on
/// the half cell with `Δα` given by the equation at that node.
fn end_derivative(geometry: &Geometry, u: &[f64], laplacian_end: f64, outer: bool) -> f64 {
    let grid = geometry.grid();
    let r = if outer { grid.outer() } else { grid.inner() };
    geometry.end_flux(u, laplacian_end, outer) / geometry.manifold().density(r)
}

/// Solves the annulus problem for `α` with coefficients `A = a_minus ≥ 0`
/// and `B + ε`, on `n` uniform nodes of `[R, R+T]`.
#[allow(clippy::too_many_arguments)]
pub fn annulus_subsolution(
    manifold: &ModelManifold,
    a_minus: &Coefficient,
    b: &Coefficient,
    sigma: f64,
    radius: f64,
    t: f64,
    alpha0: f64,
    epsilon: f64,
    n: usize,
) -> Result<AnnulusProfile> {
    if !(alpha0 >= 0.0 && t > 0.0 && radius > 0.0 && epsilon >= 0.0 && sigma > 1.0) {
        return Err(Error::invalid("annulus needs alpha0 >= 0, T > 0, R > 0, eps >= 0, sigma > 1"));
    }
    let grid = Arc::new(RadialGrid::annulus(radius, radius + t, n)?);
    let geometry = Geometry::new(manifold, grid.clone())?;
    let big_a = a_minus.sample(&grid);
    let big_b = b.sample(&grid);
    if big_a.min() < 0.0 {
        return Err(Error::Precondition("A_minus must be non-negative".into()));
    }
    if big_b.min() < 0.0 {
        return Err(Error::Precondition("B must be non-negative".into()));
    }
    let a: Vec<f64> = big_a.values().iter().map(|v| -v).collect();
    let bb: Vec<f64> = big_b.values().iter().map(|v| v + epsilon).collect();

    // harmonic profile with the same boundary data: a super-solution
    let zero = vec![0.0; grid.len()];
    let harmonic = geometry.solve(&zero, &zero, alpha0, 0.0)?;
    let sub = vec![0.0; grid.len()];
    let (alpha, _, core) = solve_on_geometry(
        &geometry,
        &a,
        &bb,
        sigma,
        alpha0,
        0.0,
        &sub,
        &harmonic,
        &IterationSettings::default(),
    )?;

    let last = grid.len() - 1;
    for i in 0..last {
        if alpha0 > 0.0 && !(alpha[i] > 0.0) {
            return Err(Error::Inconsistent(format!(
                "annulus profile not positive at r = {}",
                grid.nodes()[i]
            )));
        }
        if alpha0 > 0.0 && !(alpha[i + 1] < alpha[i]) {
            return Err(Error::Inconsistent(format!(
                "annulus profile not decreasing at r = {}",
                grid.nodes()[i]
            )));
        }
    }
    let pow = |v: f64| if v > 0.0 { v.powf(sigma) } else { 0.0 };
    let lap_in = -a[0] * alpha[0] + bb[0] * pow(alpha[0]);
    let lap_out = -a[last] * alpha[last] + bb[last] * pow(alpha[last]);
    let d_in = end_derivative(&geometry, &alpha, lap_in, false);
    let d_out = end_derivative(&geometry, &alpha, lap_out, true);

    let sup_coef = (0..grid.len())
        .map(|i| big_a.values()[i] + bb[i] * alpha0.powf(sigma - 1.0))
        .fold(0.0, f64::max);
    let bound_rhs = warp_ratio(manifold, radius, t) * (t * sup_coef + 1.0 / t) * alpha0;
    let bound_lhs = d_in.abs();
    if bound_lhs > bound_rhs * (1.0 + 1e-9) + 1e-14 {
        return Err(Error::Inconsistent(format!(
            "derivative bound violated: |alpha'(R)| = {bound_lhs} > {bound_rhs}"
        )));
    }
    Ok(AnnulusProfile {
        alpha: RadialField::new(grid, alpha)?,
        alpha0,
        t,
        t_o: t,
        epsilon,
        derivative_inner: d_in,
        derivative_outer: d_out,
        bound_lhs,
        bound_rhs,
        sweeps: core.sweeps,
    })
}

#[derive(Debug, Clone)]
pub struct InteriorProfile {
    pub beta: RadialField,
    pub alpha0: f64,
    pub eta: f64,
    pub tau: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    pub halvings: usize,
    /// `min a − [2η(1+τ) + α₀^{σ−1}(1+R²η)^σ max b]`.
    pub margin: f64,
    /// Smallest pointwise value of `Δβ + aβ − bβ^σ` at the grid unknowns.
    pub pointwise_min: f64,
}

impl InteriorProfile {
    pub fn radius(&self) -> f64 {
        self.beta.grid().outer()
    }

    /// `β′(R) = −2Rηα₀`.
    pub fn derivative_at_radius(&self) -> f64 {
        -2.0 * self.radius() * self.eta * self.alpha0
    }
}

/// Feasibility window `[η_min, η_max]` for a given `α₀` (`η_max < 0` when
/// the sub-solution inequality cannot hold for any `η ≥ 0`).
#[allow(clippy::too_many_arguments)]
pub fn eta_window(
    manifold: &ModelManifold,
    a: &Coefficient,
    b: &Coefficient,
    sigma: f64,
    radius: f64,
    t_o: f64,
    alpha0: f64,
    epsilon: f64,
) -> (f64, f64) {
    let t = tau(manifold, radius);
    let min_a = min_on(a, 0.0, radius);
    let max_b = max_on(b, 0.0, radius);
    let neg = a.negative_part();
    let sup_coef = (0..SAMPLES)
        .map(|i| radius + t_o * i as f64 / (SAMPLES - 1) as f64)
        .map(|r| neg.eval(r) + (b.eval(r) + epsilon) * alpha0.powf(sigma - 1.0))
        .fold(0.0, f64::max);
    let eta_min = warp_ratio(manifold, radius, t_o) * (1.0 / t_o + t_o * sup_coef) / (2.0 * radius);
    let lhs = |eta: f64| 2.0 * eta * (1.0 + t) + alpha0.powf(sigma - 1.0) * (1.0 + radius * radius * eta).powf(sigma) * max_b;
    if lhs(0.0) > min_a {
        return (eta_min, -1.0);
    }
    let mut hi = min_a / (2.0 * (1.0 + t));
    if lhs(hi) > min_a {
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lhs(mid) <= min_a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi = lo;
    }
    (eta_min, hi)
}

/// Builds `β` on `n` uniform nodes of `[0, R]`, halving `α₀` from
/// `alpha0_initial` until the η window is nonempty.
#[allow(clippy::too_many_arguments)]
pub fn interior_subsolution(
    manifold: &ModelManifold,
    a: &Coefficient,
    b: &Coefficient,
    sigma: f64,
    radius: f64,
    t_o: f64,
    alpha0_initial: f64,
    epsilon: f64,
    n: usize,
) -> Result<InteriorProfile> {
    if !(alpha0_initial > 0.0) {
        return Err(Error::invalid("alpha0 must be positive"));
    }
    if !existence_condition(manifold, a, radius, t_o)?.overall().holds() {
        return Err(Error::Hypothesis(format!(
            "existence condition fails at R = {radius}, T_o = {t_o}"
        )));
    }
    let min_a = min_on(a, 0.0, radius);
    if !(min_a > 0.0) {
        return Err(Error::Hypothesis(format!("inf a on B_R is {min_a} <= 0")));
    }
    let mut alpha0 = alpha0_initial;
    let mut halvings = 0;
    let (eta_min, eta_max) = loop {
        let (lo, hi) = eta_window(manifold, a, b, sigma, radius, t_o, alpha0, epsilon);
        if lo <= hi {
            break (lo, hi);
        }
        if halvings == MAX_HALVINGS {
            return Err(Error::Inconsistent(format!(
                "eta window empty after {MAX_HALVINGS} halvings of alpha0 (last [{lo}, {hi}])"
            )));
        }
        alpha0 *= 0.5;
        halvings += 1;
    };
    let eta = 0.5 * (eta_min + eta_max);
    let t = tau(manifold, radius);
    let grid = Arc::new(RadialGrid::uniform(radius, n)?);
    let beta = RadialField::from_fn(grid.clone(), |r| alpha0 * (1.0 + (radius * radius - r * r) * eta));
    if beta.min() < alpha0 * (1.0 - 1e-15) {
        return Err(Error::Inconsistent("beta below alpha0".into()));
    }
    let max_b = max_on(b, 0.0, radius);
    let margin = min_a - (2.0 * eta * (1.0 + t) + alpha0.powf(sigma - 1.0) * (1.0 + radius * radius * eta).powf(sigma) * max_b);

    let geometry = Geometry::new(manifold, grid.clone())?;
    let lap = geometry.laplacian(beta.values());
    let rounding = geometry.laplacian_rounding(beta.values());
    let mut pointwise_min = f64::INFINITY;
    for i in grid.unknowns() {
        let r = grid.nodes()[i];
        let v = beta.values()[i];
        let value = lap[i] + a.eval(r) * v - b.eval(r) * v.powf(sigma);
        pointwise_min = pointwise_min.min(value);
        let tol = 1e-9 * (lap[i].abs() + v) + 64.0 * rounding[i];
        if value < -tol {
            return Err(Error::Inconsistent(format!(
                "beta is not a sub-solution at r = {r}: {value:e}"
            )));
        }
    }
    Ok(InteriorProfile {
        beta,
        alpha0,
        eta,
        tau: t,
        eta_min,
        eta_max,
        halvings,
        margin,
        pointwise_min,
    })
}

#[derive(Debug, Clone)]
pub struct GlobalSubsolution {
    pub field: RadialField,
    pub radius: f64,
    pub t_o: f64,
    /// `β′(R) − α′(R)` (≤ 0) and `α′(R+T_o)` (≤ 0).
    pub kink_inner: f64,
    pub kink_outer: f64,
    /// Smallest weak-form row and smallest random test-profile pairing.
    pub weak_min_row: f64,
    pub weak_min_pairing: f64,
    pub weak_tolerance: f64,
}

/// Glues `β`, `α` and a zero tail of width `T_o/4` on one grid and checks
/// continuity, the kink signs and the weak sub-solution inequality against
/// hat functions (away from the pole) and random non-negative combinations.
pub fn glue_subsolution(
    problem: &LogisticProblem,
    interior: &InteriorProfile,
    annulus: &AnnulusProfile,
) -> Result<GlobalSubsolution> {
    let radius = interior.radius();
    if (annulus.inner() - radius).abs() > 1e-12 * radius {
        return Err(Error::Inconsistent(format!(
            "pieces meet at different radii ({radius} vs {})",
            annulus.inner()
        )));
    }
    let beta_r = interior.beta.boundary_value();
    let alpha_r = annulus.alpha.pole_value();
    if (beta_r - alpha_r).abs() > 1e-12 * beta_r.abs().max(1e-300) || (interior.alpha0 - annulus.alpha0).abs() > 1e-15 * interior.alpha0 {
        return Err(Error::Inconsistent(format!(
            "discontinuity at R: beta(R) = {beta_r}, alpha(R) = {alpha_r}"
        )));
    }
    if annulus.alpha.boundary_value().abs() > 1e-12 * annulus.alpha0 {
        return Err(Error::Inconsistent("alpha does not vanish at R+T_o".into()));
    }
    let kink_inner = interior.derivative_at_radius() - annulus.derivative_inner;
    if kink_inner > 0.0 {
        return Err(Error::Inconsistent(format!(
            "kink at R has the wrong sign: beta'(R) - alpha'(R) = {kink_inner}"
        )));
    }
    let kink_outer = annulus.derivative_outer;
    if kink_outer > 0.0 {
        return Err(Error::Inconsistent(format!(
            "kink at R+T_o has the wrong sign: alpha'(R+T_o) = {kink_outer}"
        )));
    }

    let outer = radius + annulus.t;
    let ann = annulus.alpha.nodes();
    let h_tail = ann[ann.len() - 1] - ann[ann.len() - 2];
    let tail_end = outer + 0.25 * annulus.t;
    let mut nodes = interior.beta.nodes().to_vec();
    let mut values = interior.beta.values().to_vec();
    nodes.extend_from_slice(&ann[1..]);
    values.extend_from_slice(&annulus.alpha.values()[1..]);
    let mut r = outer + h_tail;
    while r < tail_end + 0.5 * h_tail {
        nodes.push(r);
        values.push(0.0);
        r += h_tail;
    }
    let grid = Arc::new(RadialGrid::from_nodes(nodes, true)?);
    let field = RadialField::new(grid.clone(), values)?;

    let geometry = Geometry::new(problem.manifold(), grid.clone())?;
    let u = field.values();
    let stiff = geometry.stiffness_action(u);
    let sigma = problem.sigma();
    let last = grid.len() - 1;
    let mut rows = Vec::with_capacity(last);
    let mut scale = 0.0f64;
    for i in 1..last {
        let r = grid.nodes()[i];
        let w = geometry.volumes()[i];
        let reaction = w * (problem.a().eval(r) * u[i] - problem.b().eval(r) * u[i].max(0.0).powf(sigma));
        scale = scale.max(stiff[i].abs()).max(reaction.abs());
        rows.push(stiff[i] + reaction);
    }
    let tol = 1e-9 * scale;
    let weak_min_row = rows.iter().copied().fold(f64::INFINITY, f64::min);
    if weak_min_row < -tol {
        return Err(Error::Inconsistent(format!(
            "weak sub-solution inequality fails: row value {weak_min_row:e}"
        )));
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut weak_min_pairing = f64::INFINITY;
    for _ in 0..64 {
        let (mut s, mut norm) = (0.0, 0.0);
        for row in &rows {
            let c: f64 = rng.gen();
            s += c * row;
            norm += c;
        }
        weak_min_pairing = weak_min_pairing.min(s / norm);
    }
    Ok(GlobalSubsolution {
        field,
        radius,
        t_o: annulus.t,
        kink_inner,
        kink_outer,
        weak_min_row,
        weak_min_pairing,
        weak_tolerance: tol,
    })
}

/// Everything the construction produced, with a report of every check.
#[derive(Debug, Clone)]
pub struct SubsolutionPipeline {
    pub interior: InteriorProfile,
    pub annulus: AnnulusProfile,
    pub glued: GlobalSubsolution,
    pub report: CertificateReport,
}

/// Runs the whole construction for `problem` at `(R, T_o)`: existence
/// condition, `β` with α₀ halving from 1, `α` with `ε = 10⁻³ max b`, gluing.
pub fn construct_subsolution(problem: &LogisticProblem, radius: f64, t_o: f64, n: usize) -> Result<SubsolutionPipeline> {
    let m = problem.manifold();
    let existence = existence_condition(m, problem.a(), radius, t_o)?;
    if !existence.overall().holds() {
        return Err(Error::Hypothesis(format!(
            "existence condition fails at R = {radius}, T_o = {t_o}"
        )));
    }
    let epsilon = 1e-3 * max_on(problem.b(), 0.0, radius + t_o);
    let interior = interior_subsolution(m, problem.a(), problem.b(), problem.sigma(), radius, t_o, 1.0, epsilon, n)?;
    let annulus = annulus_subsolution(
        m,
        &problem.a().negative_part(),
        problem.b(),
        problem.sigma(),
        radius,
        t_o,
        interior.alpha0,
        epsilon,
        n,
    )?;
    let glued = glue_subsolution(problem, &interior, &annulus)?;

    let mut report = CertificateReport::new(
        format!("global sub-solution at R = {radius}, T_o = {t_o}"),
        "a compactly supported weak sub-solution exists",
    );
    report.extend(existence);
    report.compare("|alpha'(R)| vs derivative bound", annulus.bound_lhs, "<=", annulus.bound_rhs, "");
    report.compare("alpha > 0 on [R, R+T_o)", annulus.alpha.values()[annulus.alpha.values().len() - 2], ">", 0.0, "value next to R+T_o");
    report.compare("eta_min vs eta_max", interior.eta_min, "<=", interior.eta_max, format!("alpha0 = {}", crate::fmt17(interior.alpha0)));
    report.compare("beta'(R) - alpha'(R)", glued.kink_inner, "<=", 0.0, "");
    report.compare("alpha'(R+T_o)", glued.kink_outer, "<=", 0.0, "");
    report.compare("sub-solution margin for beta", interior.margin, ">=", 0.0, "");
    report.compare("min weak row", glued.weak_min_row, ">=", -glued.weak_tolerance, "");
    report.compare("min random test pairing", glued.weak_min_pairing, ">=", -glued.weak_tolerance, "");
    report.diagnostic("eta", interior.eta, "=", interior.eta, Verdict::Holds, "midpoint of the window");
    Ok(SubsolutionPipeline {
        interior,
        annulus,
        glued,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid() -> ModelManifold {
        ModelManifold::euclidean(3).unwrap()
    }

    #[test]
    fn existence_examples() {
        let m = euclid();
        let rep = existence_condition(&m, &Coefficient::Constant(1.0), 10.0, 10.0).unwrap();
        let row = &rep.rows[0];
        assert!((row.lhs - 10.0).abs() < 1e-12);
        assert!((row.rhs - 1.2).abs() < 1e-9, "{}", row.rhs);
        assert!(rep.overall().holds());
        let rep = existence_condition(&m, &Coefficient::Constant(0.0), 10.0, 10.0).unwrap();
        assert!(!rep.overall().holds());
    }

    #[test]
    fn harmonic_annulus() {
        let zero = Coefficient::Constant(0.0);
        let p = annulus_subsolution(&euclid(), &zero, &zero, 2.0, 1.0, 1.0, 1.0, 0.0, 2001).unwrap();
        for (r, v) in p.alpha.nodes().iter().zip(p.alpha.values()) {
            assert!((v - (2.0 / r - 1.0)).abs() < 1e-6);
        }
        assert!((p.derivative_inner + 2.0).abs() < 1e-5, "{}", p.derivative_inner);
        assert!((p.bound_rhs - 4.0).abs() < 1e-12);
    }

    #[test]
    fn window_examples() {
        let m = euclid();
        let one = Coefficient::Constant(1.0);
        let zero = Coefficient::Constant(0.0);
        let (_, hi) = eta_window(&m, &one, &zero, 2.0, 10.0, 10.0, 0.3, 0.0);
        assert!((hi - 1.0 / 6.0).abs() < 1e-15);
        let p = interior_subsolution(&m, &one, &one, 2.0, 10.0, 10.0, 1.0, 1e-3, 1001).unwrap();
        assert!(p.eta_min <= p.eta && p.eta <= p.eta_max);
        assert!(p.beta.pole_value() > p.alpha0);
        let neg = Coefficient::Constant(-0.5);
        assert!(matches!(
            interior_subsolution(&m, &neg, &one, 2.0, 10.0, 10.0, 1.0, 1e-3, 101),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn pipeline_and_glue_errors() {
        let p = LogisticProblem::new(euclid(), Coefficient::Constant(1.0), Coefficient::Constant(1.0), 2.0).unwrap();
        let run = construct_subsolution(&p, 10.0, 10.0, 1001).unwrap();
        assert!(run.report.overall().holds(), "{}", run.report);
        let mut bad = run.annulus.clone();
        bad.alpha0 *= 2.0;
        bad.alpha = bad.alpha.map(|_, v| 2.0 * v);
        assert!(glue_subsolution(&p, &run.interior, &bad).is_err());
        let mut bad = run.annulus.clone();
        bad.derivative_outer = 0.1;
        assert!(glue_subsolution(&p, &run.interior, &bad).is_err());
    }

    #[test]
    fn yamabe_condition_fails_for_the_remark_parameters() {
        let (lhs, rhs) = yamabe_condition(3, 3.0, -0.999 * 54.0, 10.0).unwrap();
        assert!(lhs > rhs);
    }
}

//! Principal eigenvalues `λ₁(R)` of `Δφ + λaφ = 0`, Dirichlet bottoms
//! `λ₁(L_μ, R)` of `Δ + μa`, their limits as `R → ∞`, and the duality between
//! the two.
//!
//! Both problems are symmetric tridiagonal pencils built from the
//! finite-volume stiffness `K` and lumped mass `W`:
//!
//! * bottom: `(K − μWa) x = λ W x`, smallest eigenvalue;
//! * principal: `K x = λ (Wa) x`, smallest positive eigenvalue.
//!
//! Eigenvalues are located by bisection on Sturm counts (the number of
//! negative `LDLᵀ` pivots of `K − μWa − λW`, respectively of `K − sWa`,
//! equals the number of pencil eigenvalues below `λ`, respectively in
//! `(0, s)`), then the eigenvector is obtained by inverse iteration with a
//! shift just below the eigenvalue, where the shifted matrix is positive
//! definite.

use std::sync::Arc;

use rayon::prelude::*;

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::manifold::ModelManifold;
use crate::radial::{Geometry, Grading, RadialField, RadialGrid};
use crate::report::{CertificateReport, Verdict};
use crate::tridiag;

/// Mesh settings for schedules over radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    /// Interior nodes of the grid on the largest radius.
    pub n: usize,
    pub grading: Grading,
}

impl Default for Mesh {
    fn default() -> Self {
        Self {
            n: 2000,
            grading: Grading::Uniform,
        }
    }
}

impl Mesh {
    pub fn uniform(n: usize) -> Self {
        Self {
            n,
            grading: Grading::Uniform,
        }
    }

    /// Nested grids for a schedule: one grid on the largest radius and its
    /// prefixes ending at the nodes nearest to each radius. Nesting makes the
    /// discrete eigenvalues exactly monotone in `R` (Cauchy interlacing).
    pub fn nested(&self, radii: &[f64]) -> Result<Vec<Arc<RadialGrid>>> {
        let outer = radii.iter().copied().fold(f64::NAN, f64::max);
        let full = RadialGrid::build(outer, self.n, self.grading)?;
        radii
            .iter()
            .map(|&r| full.prefix(r).map(Arc::new))
            .collect()
    }
}

/// Sign of a spectral bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignVerdict {
    NonNegative,
    Negative,
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// The eigenvalue of the single solve, or the extrapolated limit for a
    /// schedule.
    pub eigenvalue: f64,
    /// Positive eigenfunction, `∫φ² dV = 1` in the lumped measure. For a
    /// schedule it belongs to the largest radius.
    pub eigenfunction: Option<RadialField>,
    /// Radii actually used (snapped to grid nodes).
    pub radii: Vec<f64>,
    pub sequence: Vec<f64>,
    /// Limit from `λ(R) ≈ L + c/R²` fitted to the last two radii.
    pub extrapolated: Option<f64>,
    /// The last computed value, an upper bound for the limit by monotonicity.
    pub upper_bound: Option<f64>,
    /// Largest increase `λ(R_{k+1}) − λ(R_k)` observed (≤ 0 when monotone).
    pub max_increase: f64,
    /// Rayleigh quotient of the returned eigenfunction.
    pub rayleigh_quotient: f64,
    pub sign: Option<SignVerdict>,
    pub sign_tolerance: f64,
}

impl SpectralResult {
    fn single(eigenvalue: f64, eigenfunction: RadialField, rq: f64) -> Self {
        let radius = eigenfunction.grid().outer();
        Self {
            eigenvalue,
            eigenfunction: Some(eigenfunction),
            radii: vec![radius],
            sequence: vec![eigenvalue],
            extrapolated: None,
            upper_bound: None,
            max_increase: 0.0,
            rayleigh_quotient: rq,
            sign: None,
            sign_tolerance: 0.0,
        }
    }
}

struct Pencil {
    geometry: Geometry,
    k_diag: Vec<f64>,
    k_off: Vec<f64>,
    /// Lumped masses on the unknowns.
    w: Vec<f64>,
    /// Coefficient `a` at the unknowns.
    a: Vec<f64>,
}

impl Pencil {
    fn new(manifold: &ModelManifold, a: &Coefficient, grid: Arc<RadialGrid>) -> Result<Self> {
        let geometry = Geometry::new(manifold, grid.clone())?;
        let (k_diag, k_off) = geometry.stiffness();
        let range = grid.unknowns();
        let w = geometry.volumes()[range.clone()].to_vec();
        let a = grid.nodes()[range].iter().map(|&r| a.eval(r)).collect();
        Ok(Self {
            geometry,
            k_diag,
            k_off,
            w,
            a,
        })
    }

    fn len(&self) -> usize {
        self.w.len()
    }

    /// Diagonal of `K − αWa − βW`.
    fn shifted_diag(&self, alpha: f64, beta: f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.k_diag[i] - alpha * self.w[i] * self.a[i] - beta * self.w[i])
            .collect()
    }

    fn count(&self, alpha: f64, beta: f64) -> usize {
        tridiag::negative_count(
            |i| self.k_diag[i] - alpha * self.w[i] * self.a[i] - beta * self.w[i],
            &self.k_off,
            self.len(),
        )
    }

    fn quadratic(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut q = 0.0;
        for i in 0..n {
            q += self.k_diag[i] * x[i] * x[i];
            if i + 1 < n {
                q += 2.0 * self.k_off[i] * x[i] * x[i + 1];
            }
        }
        q
    }

    fn weighted(&self, x: &[f64], weight: impl Fn(usize) -> f64) -> f64 {
        x.iter().enumerate().map(|(i, v)| weight(i) * v * v).sum()
    }

    /// Inverse iteration on `(K − αWa − sW) y = M x` with mass `M`.
    fn inverse_iteration(
        &self,
        alpha: f64,
        beta: f64,
        mass: impl Fn(usize) -> f64,
    ) -> Result<Vec<f64>> {
        let diag = self.shifted_diag(alpha, beta);
        let mut x = vec![1.0; self.len()];
        let max_iter = 50;
        for it in 0..max_iter {
            let rhs: Vec<f64> = (0..self.len()).map(|i| mass(i) * x[i]).collect();
            let mut y = tridiag::solve(&diag, &self.k_off, &rhs)?;
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::Domain("inverse iteration produced a null vector".into()));
            }
            let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            for v in y.iter_mut() {
                *v *= sign / norm;
            }
            let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let change = y
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b / xnorm).abs())
                .fold(0.0, f64::max);
            x = y;
            if it > 0 && change < 1e-13 {
                return Ok(x);
            }
        }
        let grid = self.geometry.grid().clone();
        let field = self.to_field(&x);
        Err(Error::NoConvergence {
            iterations: max_iter,
            detail: format!("inverse iteration on R = {}", grid.outer()),
            last: Some(Box::new(field)),
        })
    }

    fn to_field(&self, x: &[f64]) -> RadialField {
        let grid = self.geometry.grid().clone();
        let mut values = vec![0.0; grid.len()];
        values[grid.unknowns()].copy_from_slice(x);
        RadialField::from_parts(grid, values)
    }

    /// Normalizes to `Σ w x² = 1` and checks positivity.
    fn finish(&self, mut x: Vec<f64>) -> Result<RadialField> {
        let norm = self.weighted(&x, |i| self.w[i]).sqrt();
        for v in x.iter_mut() {
            *v /= norm;
        }
        let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(i) = x.iter().position(|&v| v <= 0.0 && v < -1e-12 * peak) {
            return Err(Error::Inconsistent(format!(
                "principal eigenfunction changes sign near r = {}",
                self.geometry.grid().nodes()[self.geometry.grid().unknowns().start + i]
            )));
        }
        for v in x.iter_mut() {
            *v = v.max(0.0);
        }
        Ok(self.to_field(&x))
    }
}

/// Smallest `x` in `[lo, hi]` with `count(x) ≥ 1`, assuming monotone counts
/// and `count(lo) = 0`.
fn bisect(count: impl Fn(f64) -> usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
        if count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest Dirichlet eigenvalue of `−(Δ + μa)` on the grid's ball.
pub fn dirichlet_bottom(
    manifold: &ModelManifold,
    a: &Coefficient,
    mu: f64,
    grid: Arc<RadialGrid>,
) -> Result<SpectralResult> {
    let p = Pencil::new(manifold, a, grid)?;
    let n = p.len();
    let ones = vec![1.0; n];
    let total_w: f64 = p.w.iter().sum();
    let mut hi = (p.quadratic(&ones) - mu * p.weighted(&ones, |i| p.w[i] * p.a[i])) / total_w;
    let mut lo = p.a.iter().map(|&a| -mu * a).fold(f64::INFINITY, f64::min) - 1.0;
    let mut step = hi.abs().max(1.0);
    while p.count(mu, hi) == 0 {
        hi += step;
        step *= 2.0;
    }
    while p.count(mu, lo) > 0 {
        lo -= step;
        step *= 2.0;
    }
    let lambda = bisect(|s| p.count(mu, s), lo, hi);
    let delta = 1e-7 * lambda.abs().max(1e-6 * (hi - lo).abs()).max(1e-300);
    let x = p.inverse_iteration(mu, lambda - delta, |i| p.w[i])?;
    let rq = (p.quadratic(&x) - mu * p.weighted(&x, |i| p.w[i] * p.a[i])) / p.weighted(&x, |i| p.w[i]);
    let field = p.finish(x)?;
    Ok(SpectralResult::single(lambda, field, rq))
}

/// Smallest positive eigenvalue of `−Δφ = λaφ` with Dirichlet data.
pub fn principal_eigenvalue(
    manifold: &ModelManifold,
    a: &Coefficient,
    grid: Arc<RadialGrid>,
) -> Result<SpectralResult> {
    let p = Pencil::new(manifold, a, grid.clone())?;
    if p.a.iter().all(|&v| v <= 0.0) {
        return Err(Error::Hypothesis(format!(
            "a <= 0 on [0, {}]: no principal eigenvalue",
            grid.outer()
        )));
    }
    // Rayleigh quotient of a₊ bounds λ₁ from above
    let test: Vec<f64> = p.a.iter().map(|&v| v.max(0.0)).collect();
    let mut hi = p.quadratic(&test) / p.weighted(&test, |i| p.w[i] * p.a[i]);
    while p.count(hi, 0.0) == 0 {
        hi *= 2.0;
    }
    let lambda = bisect(|s| p.count(s, 0.0), 0.0, hi);
    let shift = lambda * (1.0 - 1e-7);
    let x = p.inverse_iteration(shift, 0.0, |i| p.w[i] * p.a[i])?;
    let rq = p.quadratic(&x) / p.weighted(&x, |i| p.w[i] * p.a[i]);
    let field = p.finish(x)?;
    Ok(SpectralResult::single(lambda, field, rq))
}

fn check_schedule(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::invalid("radius schedule needs at least two entries"));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::invalid("radius schedule must be positive and increasing"));
    }
    Ok(())
}

fn extrapolate(radii: &[f64], seq: &[f64]) -> Option<f64> {
    let n = seq.len();
    if n < 2 {
        return None;
    }
    let (r1, r2) = (radii[n - 2], radii[n - 1]);
    let (l1, l2) = (seq[n - 2], seq[n - 1]);
    Some((r2 * r2 * l2 - r1 * r1 * l1) / (r2 * r2 - r1 * r1))
}

fn schedule<F>(radii: &[f64], mesh: Mesh, solve: F) -> Result<SpectralResult>
where
    F: Fn(Arc<RadialGrid>) -> Result<SpectralResult> + Sync,
{
    check_schedule(radii)?;
    let grids = mesh.nested(radii)?;
    let results = grids
        .into_par_iter()
        .map(|g| solve(g))
        .collect::<Result<Vec<_>>>()?;
    let used: Vec<f64> = results.iter().map(|r| r.radii[0]).collect();
    if used.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(
            "radius schedule collapses on the mesh; increase the mesh size",
        ));
    }
    let seq: Vec<f64> = results.iter().map(|r| r.eigenvalue).collect();
    let max_increase = seq
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    for (k, w) in seq.windows(2).enumerate() {
        let tol = 1e-8 * w[0].abs().max(1.0);
        if w[1] > w[0] + tol {
            return Err(Error::Inconsistent(format!(
                "eigenvalue increases from {} at R = {} to {} at R = {}; mesh too coarse",
                w[0],
                used[k],
                w[1],
                used[k + 1]
            )));
        }
    }
    let extrapolated = extrapolate(&used, &seq);
    let last = results.into_iter().last().expect("non-empty schedule");
    Ok(SpectralResult {
        eigenvalue: extrapolated.unwrap_or(last.eigenvalue),
        eigenfunction: last.eigenfunction,
        radii: used,
        upper_bound: seq.last().copied(),
        sequence: seq,
        extrapolated,
        max_increase,
        rayleigh_quotient: last.rayleigh_quotient,
        sign: None,
        sign_tolerance: 0.0,
    })
}

/// `λ* = lim λ₁(R)` over a schedule of at least four radii.
pub fn lambda_star(
    manifold: &ModelManifold,
    a: &Coefficient,
    radii: &[f64],
    mesh: Mesh,
) -> Result<SpectralResult> {
    if radii.len() < 4 {
        return Err(Error::invalid("lambda_star needs at least four radii"));
    }
    schedule(radii, mesh, |g| principal_eigenvalue(manifold, a, g))
}

/// `λ₁^{L_μ}(M) = lim λ₁(L_μ, R)` with its sign.
pub fn spectrum_bottom(
    manifold: &ModelManifold,
    a: &Coefficient,
    mu: f64,
    radii: &[f64],
    mesh: Mesh,
) -> Result<SpectralResult> {
    let mut res = schedule(radii, mesh, |g| dirichlet_bottom(manifold, a, mu, g))?;
    let value = res.eigenvalue;
    let tol = 1e-6 * value.abs() + 1e-9;
    let outer = *res.radii.last().expect("non-empty");
    let (_, a_max) = a.range_on(0.0, outer, 4001);
    let last = res.upper_bound.expect("schedule has values");
    res.sign = Some(if mu >= 0.0 && a_max <= 0.0 {
        // −Δ − μa is a non-negative form
        SignVerdict::NonNegative
    } else if last < -tol || value < -tol {
        SignVerdict::Negative
    } else {
        SignVerdict::NonNegative
    });
    res.sign_tolerance = tol;
    Ok(res)
}

/// Outcome of [`duality_check`].
#[derive(Debug, Clone)]
pub struct Duality {
    pub lambda_star: SpectralResult,
    pub mu_flip: f64,
    /// `(μ, limit, verdict)` for each grid value.
    pub grid: Vec<(f64, f64, SignVerdict)>,
    pub report: CertificateReport,
}

/// Compares `λ*` with the sign change of `μ ↦ λ₁^{L_μ}(M)`.
pub fn duality_check(
    manifold: &ModelManifold,
    a: &Coefficient,
    radii: &[f64],
    mu_grid: &[f64],
    mesh: Mesh,
) -> Result<Duality> {
    let star = lambda_star(manifold, a, radii, mesh)?;
    let mut mus = mu_grid.to_vec();
    mus.sort_by(f64::total_cmp);
    let rows = mus
        .par_iter()
        .map(|&mu| spectrum_bottom(manifold, a, mu, radii, mesh).map(|r| (mu, r.eigenvalue, r.sign.expect("sign set"))))
        .collect::<Result<Vec<_>>>()?;
    let cell = rows
        .windows(2)
        .position(|w| w[0].2 == SignVerdict::NonNegative && w[1].2 == SignVerdict::Negative)
        .ok_or_else(|| Error::Inconclusive("no sign change of the spectral bottom on the mu grid".into()))?;

    // bisection on the extrapolated limit using the two largest radii
    let grids = mesh.nested(radii)?;
    let tail_grids = &grids[grids.len() - 2..];
    let limit = |mu: f64| -> Result<f64> {
        let l1 = dirichlet_bottom(manifold, a, mu, tail_grids[0].clone())?.eigenvalue;
        let l2 = dirichlet_bottom(manifold, a, mu, tail_grids[1].clone())?.eigenvalue;
        let used = [tail_grids[0].outer(), tail_grids[1].outer()];
        Ok(extrapolate(&used, &[l1, l2]).expect("two values"))
    };
    let (mut lo, mut hi) = (rows[cell].0, rows[cell + 1].0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if limit(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.abs().max(1e-12) {
            break;
        }
    }
    let mu_flip = 0.5 * (lo + hi);
    let ls = star.eigenvalue;

    let mut report = CertificateReport::new(
        "duality: lambda_star versus sign change of the spectral bottom",
        "lambda_star = sup{mu >= 0 : bottom of Delta + mu a >= 0} confirmed",
    );
    report.diagnostic(
        "lambda_star (extrapolated)",
        ls,
        "<=",
        star.upper_bound.unwrap_or(f64::NAN),
        Verdict::Holds,
        "right side: raw value at the largest radius (upper bound)",
    );
    let rel = (mu_flip - ls).abs() / ls.abs().max(1e-300);
    report.compare("|mu_flip - lambda_star| / lambda_star", rel, "<=", 0.05, format!("mu_flip = {}", crate::fmt17(mu_flip)));
    let step = mus.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let mismatches = rows
        .iter()
        .filter(|(mu, _, s)| {
            let predicted = if *mu > mu_flip { SignVerdict::Negative } else { SignVerdict::NonNegative };
            predicted != *s && (mu - mu_flip).abs() > step
        })
        .count();
    report.compare(
        "dichotomy mismatches (mu > mu_flip iff bottom < 0)",
        mismatches as f64,
        "==",
        0.0,
        "one grid cell of slack at the crossing",
    );
    Ok(Duality {
        lambda_star: star,
        mu_flip,
        grid: rows,
        report,
    })
}

//! Radial Green kernel `G(r) = t(r)/ω`, `t(r) = ∫_r^∞ g^{1−m}`, the
//! Poisson solver `Δv = ρ ≥ 0`, `v ≤ 0`, and the substitution `φ = e^{−v}`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::manifold::ModelManifold;
use crate::quadrature::{gauss_legendre5, integrate};
use crate::radial::{Geometry, RadialField};

const QUAD_TOL: f64 = 1e-13;

/// Green kernel of a non-parabolic model manifold.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    manifold: ModelManifold,
}

impl GreenKernel {
    pub fn new(manifold: &ModelManifold) -> Result<Self> {
        if !manifold.is_nonparabolic()? {
            return Err(Error::Hypothesis(format!(
                "{} is parabolic: no positive Green kernel",
                manifold.warping().name()
            )));
        }
        Ok(Self {
            manifold: manifold.clone(),
        })
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    fn integrand(&self, r: f64) -> f64 {
        (-((self.manifold.dim() - 1) as f64) * self.manifold.warping().ln_value(r)).exp()
    }

    /// `∫_lo^hi g^{1−m}`.
    pub fn segment(&self, lo: f64, hi: f64) -> f64 {
        integrate(|s| self.integrand(s), lo, hi, QUAD_TOL).0
    }

    /// `t(r) = ∫_r^∞ g^{1−m}`: doubling pieces until they are negligible,
    /// then the tail of the local power law `c s^{−p}`, `∫_x^∞ = x f(x)/(p−1)`.
    pub fn tail(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("Green kernel needs r > 0, got {r}")));
        }
        let mut total = 0.0;
        let mut x = r;
        for _ in 0..1000 {
            let piece = self.segment(x, 2.0 * x);
            total += piece;
            x *= 2.0;
            let f = self.integrand(x);
            if f == 0.0 {
                return Ok(total);
            }
            let p = -(self.integrand(2.0 * x) / f).ln() / std::f64::consts::LN_2;
            if piece <= 1e-13 * total && p > 1.0 {
                return Ok(total + x * f / (p - 1.0));
            }
        }
        Err(Error::NoConvergence {
            iterations: 1000,
            detail: format!("tail integral from r = {r}"),
            last: None,
        })
    }

    /// `G(r) = t(r)/ω_{m−1}`.
    pub fn value(&self, r: f64) -> Result<f64> {
        Ok(self.tail(r)? / self.manifold.omega())
    }
}

/// `G(r)` of the minimal positive fundamental solution.
pub fn green_radial(manifold: &ModelManifold, r: f64) -> Result<f64> {
    GreenKernel::new(manifold)?.value(r)
}

#[derive(Debug, Clone)]
pub struct PoissonSolution {
    pub v: RadialField,
    /// Total mass `∫ ρ dV` on the grid.
    pub mass: f64,
    /// `max |Δ_h v − ρ̄|` over the unknowns, `ρ̄` the control-volume average
    /// of the interpolated source.
    pub residual: f64,
    /// The same maximum over nodes at least two cells away from kinks of
    /// the source; at a kink the flux error is `O(h ρ′)` with `ρ′ ~ 1/h`.
    pub residual_smooth: f64,
    /// Control-volume averages `ρ̄`.
    pub source_average: RadialField,
}

/// Monotone cubic (Fritsch–Carlson) interpolant of the nodal source, so
/// that a non-negative table stays non-negative between nodes.
struct Source<'a> {
    r: &'a [f64],
    f: &'a [f64],
    slope: Vec<f64>,
}

impl<'a> Source<'a> {
    fn new(r: &'a [f64], f: &'a [f64]) -> Self {
        let n = r.len();
        let delta: Vec<f64> = (0..n - 1).map(|i| (f[i + 1] - f[i]) / (r[i + 1] - r[i])).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let (h0, h1) = (r[i] - r[i - 1], r[i + 1] - r[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // keep the end cells inside the data range
        for (k, d) in [(0, delta[0]), (n - 1, delta[n - 2])] {
            if slope[k] * d <= 0.0 || slope[k].abs() > 3.0 * d.abs() {
                slope[k] = 0.0;
            }
        }
        Self { r, f, slope }
    }

    /// Value at `s` in cell `i`.
    fn eval(&self, i: usize, s: f64) -> f64 {
        let h = self.r[i + 1] - self.r[i];
        let t = (s - self.r[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.f[i]
            + (t3 - 2.0 * t2 + t) * h * self.slope[i]
            + (-2.0 * t3 + 3.0 * t2) * self.f[i + 1]
            + (t3 - t2) * h * self.slope[i + 1]
    }
}

/// Solves `Δv = ρ` with `v → 0` at infinity, `ρ` monotone cubic between nodes and
/// zero beyond the grid, through `v′ = Q(r) g^{1−m}/ω`, `Q(r) = ∫_{B_r} ρ`.
pub fn poisson_solve(manifold: &ModelManifold, rho: &RadialField) -> Result<PoissonSolution> {
    let grid = rho.grid_arc().clone();
    if !grid.has_pole() {
        return Err(Error::invalid("the source must be given on a ball grid"));
    }
    if rho.min() < 0.0 {
        return Err(Error::invalid("the source must be non-negative"));
    }
    let kernel = GreenKernel::new(manifold)?;
    let r = grid.nodes();
    let f = rho.values();
    let n = r.len();
    let omega = manifold.omega();
    let dens = |s: f64| manifold.density(s);
    let source = Source::new(r, f);
    let cell_mass = |i: usize, lo: f64, hi: f64| gauss_legendre5(|s| source.eval(i, s) * dens(s), lo, hi);

    let mut cum = vec![0.0; n];
    for i in 0..n - 1 {
        cum[i + 1] = cum[i] + cell_mass(i, r[i], r[i + 1]);
    }
    let mass = cum[n - 1];
    check_integrable(manifold, rho, &cum)?;

    let mut v = vec![0.0; n];
    v[n - 1] = -mass * kernel.tail(r[n - 1])? / omega;
    for i in (0..n - 1).rev() {
        let flux = |s: f64| {
            let q = cum[i] + cell_mass(i, r[i], s);
            q * (-((manifold.dim() - 1) as f64) * manifold.warping().ln_value(s)).exp()
        };
        let h = r[i + 1] - r[i];
        // split the cell so the pole behaviour Q ~ s^m is resolved
        let mid = r[i] + 0.5 * h;
        let inc = gauss_legendre5(flux, r[i], mid) + gauss_legendre5(flux, mid, r[i + 1]);
        v[i] = v[i + 1] - inc / omega;
    }
    let v = RadialField::new(grid.clone(), v)?;

    let geometry = Geometry::new(manifold, grid.clone())?;
    let lap = geometry.laplacian(v.values());
    let mut average = vec![0.0; n];
    for i in 0..n {
        let mut m = 0.0;
        if i > 0 {
            m += cell_mass(i - 1, 0.5 * (r[i - 1] + r[i]), r[i]);
        }
        if i + 1 < n {
            m += cell_mass(i, r[i], 0.5 * (r[i] + r[i + 1]));
        }
        average[i] = m / geometry.volumes()[i];
    }
    let peak = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut near_kink = vec![false; n];
    for i in 1..n - 1 {
        if (f[i + 1] - 2.0 * f[i] + f[i - 1]).abs() > 1e-3 * peak {
            for flag in &mut near_kink[i.saturating_sub(2)..(i + 3).min(n)] {
                *flag = true;
            }
        }
    }
    let (mut residual, mut residual_smooth) = (0.0f64, 0.0f64);
    for i in grid.unknowns() {
        let e = (lap[i] - average[i]).abs();
        residual = residual.max(e);
        if !near_kink[i] {
            residual_smooth = residual_smooth.max(e);
        }
    }
    if v.max() > 0.0 {
        return Err(Error::Inconsistent("Poisson solution is positive somewhere".into()));
    }
    Ok(PoissonSolution {
        v,
        mass,
        residual,
        residual_smooth,
        source_average: RadialField::new(grid, average)?,
    })
}

/// Rejects sources whose outer half carries non-negligible mass with a
/// mass density `ρ dV/dr` that does not decay faster than `1/r`.
fn check_integrable(manifold: &ModelManifold, rho: &RadialField, cum: &[f64]) -> Result<()> {
    let r = rho.nodes();
    let n = r.len();
    let total = cum[n - 1];
    if total == 0.0 {
        return Ok(());
    }
    let half = rho.grid().nearest(0.5 * r[n - 1]);
    let tail_share = (total - cum[half]) / total;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (half..n)
        .filter(|&i| r[i] > 0.0 && rho.values()[i] > 0.0)
        .map(|i| (r[i].ln(), (r[i] * rho.values()[i] * manifold.density(r[i])).ln()))
        .unzip();
    if xs.len() < 4 || tail_share < 1e-3 {
        return Ok(());
    }
    let slope = line_fit(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN);
    if slope > -0.05 {
        return Err(Error::Domain(format!(
            "source does not look integrable: r ρ dV/dr grows like r^{slope:.3} on the outer half"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LogSubstitution {
    pub phi: RadialField,
    /// Whether `−v > 700` forced a clamp of the exponent.
    pub clamped: bool,
    /// `max |Δ_h φ + ρ̄ φ − |φ′|²/φ|` over the unknowns.
    pub residual: f64,
    /// `inf φ`, the constant in the lower bound `φ ≥ c`.
    pub lower_bound: f64,
}

const EXP_CLAMP: f64 = 700.0;

/// `φ = e^{−v}` with the residual of `Δφ + ρφ = |∇φ|²/φ`.
pub fn log_substitution(manifold: &ModelManifold, v: &RadialField, rho: &RadialField) -> Result<LogSubstitution> {
    if v.grid() != rho.grid() {
        return Err(Error::invalid("v and rho must share a grid"));
    }
    let clamped = v.values().iter().any(|&x| -x > EXP_CLAMP);
    let phi = v.map(|_, x| (-x).min(EXP_CLAMP).exp());
    let geometry = Geometry::new(manifold, Arc::clone(v.grid_arc()))?;
    let lap = geometry.laplacian(phi.values());
    let d = phi.derivative();
    let p = phi.values();
    let residual = v
        .grid()
        .unknowns()
        .map(|i| (lap[i] + rho.values()[i] * p[i] - d.values()[i].powi(2) / p[i]).abs())
        .fold(0.0, f64::max);
    Ok(LogSubstitution {
        lower_bound: phi.min(),
        phi,
        clamped,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;
    use std::f64::consts::PI;

    #[test]
    fn kernel_examples() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let g = green_radial(&e3, 2.0).unwrap();
        assert!((g - 1.0 / (8.0 * PI)).abs() < 1e-12 * g, "{g}");
        let h2 = ModelManifold::hyperbolic(2, 1.0).unwrap();
        let g = green_radial(&h2, 1.0).unwrap();
        let exact = (1.0 / (0.5f64).tanh()).ln() / (2.0 * PI);
        assert!((g - exact).abs() < 1e-12, "{g} {exact}");
        assert!(green_radial(&e3, 1e6).unwrap() < 1e-7);
        let e2 = ModelManifold::euclidean(2).unwrap();
        assert!(matches!(green_radial(&e2, 1.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn poisson_zero_and_shell() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let grid = Arc::new(RadialGrid::uniform(2.0, 2001).unwrap());
        let zero = RadialField::constant(grid.clone(), 0.0);
        let sol = poisson_solve(&e3, &zero).unwrap();
        assert!(sol.v.values().iter().all(|&x| x == 0.0));
        let rho = RadialField::from_fn(grid.clone(), |r| if r <= 1.0 { (1.0 - r * r).powi(2) } else { 0.0 });
        let sol = poisson_solve(&e3, &rho).unwrap();
        let q = 4.0 * PI * 8.0 / 105.0;
        assert!((sol.mass - q).abs() < 1e-6);
        for (r, v) in sol.v.nodes().iter().zip(sol.v.values()) {
            if *r >= 1.0 {
                assert!((v + q / (4.0 * PI * r)).abs() < 1e-8);
            }
        }
        assert!(sol.residual < 1e-6, "{}", sol.residual);
        let sub = log_substitution(&e3, &sol.v, &sol.source_average).unwrap();
        assert!(sub.residual < 1e-6, "{}", sub.residual);
        assert!(sub.lower_bound >= 1.0 && !sub.clamped);
    }

    #[test]
    fn hyperbolic_indicator() {
        let h3 = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let grid = Arc::new(RadialGrid::uniform(3.0, 3001).unwrap());
        let rho = RadialField::from_fn(grid, |r| if r <= 1.0 { 1.0 } else { 0.0 });
        let sol = poisson_solve(&h3, &rho).unwrap();
        assert!(sol.v.max() <= 0.0);
        assert!(sol.residual_smooth < 1e-6, "{}", sol.residual_smooth);
    }

    #[test]
    fn non_integrable_source() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let grid = Arc::new(RadialGrid::uniform(50.0, 501).unwrap());
        let rho = RadialField::constant(grid, 1.0);
        assert!(poisson_solve(&e3, &rho).is_err());
    }

    #[test]
    fn clamp_flag() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let grid = Arc::new(RadialGrid::uniform(1.0, 11).unwrap());
        let v = RadialField::constant(grid.clone(), -800.0);
        let sub = log_substitution(&e3, &v, &RadialField::constant(grid, 0.0)).unwrap();
        assert!(sub.clamped);
    }
}

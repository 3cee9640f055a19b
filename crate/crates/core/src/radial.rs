//! Radial grids, fields and the discrete radial operator `Δ + c(r)`.
//!
//! The operator is a conservative finite-volume discretization of
//! `g^{1−m}(g^{m−1}u′)′`. Node `r_i` owns the control volume
//! `w_i = ω∫ g^{m−1}` over `[r_{i−½}, r_{i+½}]` and neighbouring nodes are
//! coupled through the face coefficient `k_{i+½} = ω g(r_{i+½})^{m−1}/h_{i+½}`:
//!
//! ```text
//! (Lu)_i = [k_{i+½}(u_{i+1} − u_i) − k_{i−½}(u_i − u_{i−1})] / w_i + c_i u_i
//! ```
//!
//! The scheme is second order, has positive off-diagonals, and is symmetric
//! with respect to the lumped measure, so eigenvalue problems reduce to
//! symmetric tridiagonal pencils. At the pole the cell is `[0, r_½]`, which
//! yields `Δu(0) = m u″(0)` for even profiles without evaluating `(m−1)g′/g`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifold::ModelManifold;
use crate::problem::LogisticProblem;
use crate::quadrature;
use crate::tridiag;

/// Node law for [`RadialGrid::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    /// Spacings grow outward by a constant factor.
    Geometric(f64),
}

/// Nodes `r_0 < r_1 < … < r_{n+1}`.
///
/// With `pole` set, `r_0 = 0` is the centre of a ball and the profile is
/// even there; otherwise `r_0 > 0` is the inner edge of an annulus carrying
/// Dirichlet data. The last node always carries Dirichlet data.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    pole: bool,
}

pub const MIN_INTERIOR_NODES: usize = 4;

impl RadialGrid {
    pub fn build(outer: f64, n: usize, grading: Grading) -> Result<Self> {
        if !(outer > 0.0) || !outer.is_finite() {
            return Err(Error::invalid(format!("outer radius must be positive, got {outer}")));
        }
        if n < MIN_INTERIOR_NODES {
            return Err(Error::invalid(format!(
                "need at least {MIN_INTERIOR_NODES} interior nodes, got {n}"
            )));
        }
        let mut nodes = Vec::with_capacity(n + 2);
        match grading {
            Grading::Uniform => {
                let h = outer / (n + 1) as f64;
                nodes.extend((0..=n).map(|i| i as f64 * h));
            }
            Grading::Geometric(ratio) => {
                if !(ratio > 0.0) || !ratio.is_finite() {
                    return Err(Error::invalid(format!("grading ratio must be positive, got {ratio}")));
                }
                let cells = (n + 1) as f64;
                let h0 = if (ratio - 1.0).abs() < 1e-14 {
                    outer / cells
                } else {
                    outer * (ratio - 1.0) / (ratio.powf(cells) - 1.0)
                };
                let mut r = 0.0;
                let mut h = h0;
                nodes.push(0.0);
                for _ in 0..n {
                    r += h;
                    h *= ratio;
                    nodes.push(r);
                }
            }
        }
        nodes.push(outer);
        Self::from_nodes(nodes, true)
    }

    pub fn uniform(outer: f64, n: usize) -> Result<Self> {
        Self::build(outer, n, Grading::Uniform)
    }

    /// Uniform grid on `[inner, outer]` with Dirichlet data at both ends.
    pub fn annulus(inner: f64, outer: f64, n: usize) -> Result<Self> {
        if !(inner > 0.0) || !(outer > inner) {
            return Err(Error::invalid(format!(
                "annulus needs 0 < inner < outer, got [{inner}, {outer}]"
            )));
        }
        if n < MIN_INTERIOR_NODES {
            return Err(Error::invalid(format!(
                "need at least {MIN_INTERIOR_NODES} interior nodes, got {n}"
            )));
        }
        let h = (outer - inner) / (n + 1) as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| inner + i as f64 * h).collect();
        nodes.push(outer);
        Self::from_nodes(nodes, false)
    }

    pub fn from_nodes(nodes: Vec<f64>, pole: bool) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::invalid("a radial grid needs at least three nodes"));
        }
        if pole && nodes[0] != 0.0 {
            return Err(Error::invalid("a grid with a pole must start at r = 0"));
        }
        if !pole && !(nodes[0] > 0.0) {
            return Err(Error::invalid("an annulus grid must start at r > 0"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid("grid nodes must be finite and strictly increasing"));
        }
        Ok(Self { nodes, pole })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Copy of the grid whose last cell is refined geometrically toward the
    /// outer end: spacings `h_min, h_min·ratio, …` measured from the boundary.
    /// The original nodes are kept, the new ones sit between the last two.
    pub fn refined_toward_outer(&self, h_min: f64, ratio: f64) -> Result<Self> {
        if !(h_min > 0.0) || !(ratio > 1.0) {
            return Err(Error::invalid("refinement needs h_min > 0 and ratio > 1"));
        }
        let n = self.nodes.len();
        let (left, outer) = (self.nodes[n - 2], self.nodes[n - 1]);
        let mut extra = Vec::new();
        let mut d = h_min;
        while d < 0.5 * (outer - left) {
            extra.push(outer - d);
            d *= ratio;
        }
        extra.reverse();
        let mut nodes = self.nodes[..n - 1].to_vec();
        nodes.extend(extra);
        nodes.push(outer);
        Self::from_nodes(nodes, self.pole)
    }

    /// Interior nodes, i.e. all but the two ends.
    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn has_pole(&self) -> bool {
        self.pole
    }

    pub fn inner(&self) -> f64 {
        self.nodes[0]
    }

    pub fn outer(&self) -> f64 {
        *self.nodes.last().expect("non-empty")
    }

    /// Index range of the unknowns: the pole (if any) and the interior nodes.
    pub fn unknowns(&self) -> std::ops::Range<usize> {
        (if self.pole { 0 } else { 1 })..self.nodes.len() - 1
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Index of the node closest to `r`.
    pub fn nearest(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.nodes.len() => self.nodes.len() - 1,
            Err(i) => {
                if r - self.nodes[i - 1] <= self.nodes[i] - r {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Sub-grid of nodes `i0..=i1`. The pole is kept only if `i0 == 0`.
    pub fn slice(&self, i0: usize, i1: usize) -> Result<Self> {
        if i1 >= self.nodes.len() || i1 < i0 + 2 {
            return Err(Error::invalid(format!("invalid grid slice {i0}..={i1}")));
        }
        Self::from_nodes(self.nodes[i0..=i1].to_vec(), self.pole && i0 == 0)
    }

    /// Prefix grid ending at the node nearest to `outer`.
    pub fn prefix(&self, outer: f64) -> Result<Self> {
        let j = self.nearest(outer).max(2);
        self.slice(0, j)
    }
}

/// A scalar radial profile sampled at every node of a grid.
#[derive(Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl std::fmt::Debug for RadialField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialField")
            .field("nodes", &self.values.len())
            .field("outer", &self.grid.outer())
            .field("pole_value", &self.values[0])
            .field("boundary_value", &self.values[self.values.len() - 1])
            .finish()
    }
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "field has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite field value at r = {}",
                grid.nodes()[i]
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Arc<RadialGrid>, c: f64) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![c; n],
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn pole_value(&self) -> f64 {
        self.values[0]
    }

    pub fn boundary_value(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Piecewise-linear interpolation, constant beyond the ends.
    pub fn value_at(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        if r <= nodes[0] {
            return self.values[0];
        }
        let last = nodes.len() - 1;
        if r >= nodes[last] {
            return self.values[last];
        }
        let i = nodes.partition_point(|&x| x <= r) - 1;
        let t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Restriction to a grid whose nodes form a contiguous run of this
    /// field's nodes.
    pub fn restrict(&self, grid: Arc<RadialGrid>) -> Result<Self> {
        let start = self.grid.nearest(grid.inner());
        let n = grid.len();
        let ok = start + n <= self.grid.len()
            && grid
                .nodes()
                .iter()
                .zip(&self.grid.nodes()[start..])
                .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0));
        if !ok {
            return Err(Error::invalid("restriction grid is not a run of the field's nodes"));
        }
        let values = self.values[start..start + n].to_vec();
        Ok(Self { grid, values })
    }

    /// Nodal derivative by the three-point stencil (one-sided at the ends,
    /// zero at the pole).
    pub fn derivative(&self) -> Self {
        let r = self.grid.nodes();
        let u = &self.values;
        let n = r.len();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let hm = r[i] - r[i - 1];
            let hp = r[i + 1] - r[i];
            d[i] = -hp / (hm * (hm + hp)) * u[i - 1]
                + (hp - hm) / (hm * hp) * u[i]
                + hm / (hp * (hm + hp)) * u[i + 1];
        }
        d[0] = if self.grid.has_pole() {
            0.0
        } else {
            one_sided(r[0], r[1], r[2], u[0], u[1], u[2])
        };
        d[n - 1] = one_sided(r[n - 1], r[n - 2], r[n - 3], u[n - 1], u[n - 2], u[n - 3]);
        Self {
            grid: self.grid.clone(),
            values: d,
        }
    }

    /// CSV with header `r,value`, one row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", crate::fmt17(*r), crate::fmt17(*v));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses the [`to_csv`](Self::to_csv) format. The first node decides
    /// whether the grid has a pole.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with('r')) {
                continue;
            }
            let mut it = line.split(',').map(str::trim);
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("line {}: expected `r,value`", lineno + 1)))
            };
            r.push(parse(it.next())?);
            v.push(parse(it.next())?);
        }
        let pole = r.first() == Some(&0.0);
        let grid = Arc::new(RadialGrid::from_nodes(r, pole)?);
        Self::new(grid, v)
    }
}

fn one_sided(r0: f64, r1: f64, r2: f64, u0: f64, u1: f64, u2: f64) -> f64 {
    // derivative at r0 of the quadratic through the three points
    let h1 = r1 - r0;
    let h2 = r2 - r0;
    let c1 = h2 / (h1 * (h2 - h1));
    let c2 = -h1 / (h2 * (h2 - h1));
    -(c1 + c2) * u0 + c1 * u1 + c2 * u2
}

/// Per-grid geometric data of the finite-volume scheme.
#[derive(Debug, Clone)]
pub struct Geometry {
    manifold: ModelManifold,
    grid: Arc<RadialGrid>,
    volumes: Vec<f64>,
    faces: Vec<f64>,
}

impl Geometry {
    pub fn new(manifold: &ModelManifold, grid: Arc<RadialGrid>) -> Result<Self> {
        manifold.check_radius(grid.outer())?;
        let r = grid.nodes();
        let n = r.len();
        let density = |s: f64| manifold.density(s);
        let mut volumes = vec![0.0; n];
        for i in 0..n {
            let lo = if i == 0 { r[0] } else { 0.5 * (r[i - 1] + r[i]) };
            let hi = if i + 1 == n { r[i] } else { 0.5 * (r[i] + r[i + 1]) };
            volumes[i] = quadrature::integrate(density, lo, r[i], 1e-13).0
                + quadrature::integrate(density, r[i], hi, 1e-13).0;
        }
        let faces = r
            .windows(2)
            .map(|w| density(0.5 * (w[0] + w[1])) / (w[1] - w[0]))
            .collect::<Vec<f64>>();
        if let Some(i) = faces.iter().position(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(Error::Domain(format!(
                "degenerate face coefficient at r = {}",
                r[i]
            )));
        }
        Ok(Self {
            manifold: manifold.clone(),
            grid,
            volumes,
            faces,
        })
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// Control volumes (half cells at the two ends).
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Face coefficients `k_{i+½}`.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Discrete Laplacian at every node; the two Dirichlet ends use their
    /// half cells, so only the unknown entries are consistent.
    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let k = &self.faces;
        (0..n)
            .map(|i| {
                let mut flux = 0.0;
                if i + 1 < n {
                    flux += k[i] * (u[i + 1] - u[i]);
                }
                if i > 0 {
                    flux -= k[i - 1] * (u[i] - u[i - 1]);
                }
                flux / self.volumes[i]
            })
            .collect()
    }

    /// Floating-point error bound of [`Geometry::laplacian`] at each node:
    /// `ε Σ k |u_i ± u_j| / w_i` over the adjacent faces.
    pub fn laplacian_rounding(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let k = &self.faces;
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                if i + 1 < n {
                    s += k[i] * (u[i + 1].abs() + u[i].abs());
                }
                if i > 0 {
                    s += k[i - 1] * (u[i].abs() + u[i - 1].abs());
                }
                f64::EPSILON * s / self.volumes[i]
            })
            .collect()
    }

    /// The weak-form row `−(K u)_i` (the discrete `∫ −∇u·∇φ_i`).
    pub fn stiffness_action(&self, u: &[f64]) -> Vec<f64> {
        let lap = self.laplacian(u);
        lap.iter().zip(&self.volumes).map(|(l, w)| l * w).collect()
    }

    /// `ω g^{m−1} u′` at the inner or outer end, recovered from the half-cell
    /// balance `flux_end = flux_face ∓ ∫_{half cell} (Δu)`, where
    /// `laplacian_end` is the value of `Δu` at the end node.
    pub fn end_flux(&self, u: &[f64], laplacian_end: f64, outer: bool) -> f64 {
        let n = u.len();
        if outer {
            self.faces[n - 2] * (u[n - 1] - u[n - 2]) + self.volumes[n - 1] * laplacian_end
        } else {
            self.faces[0] * (u[1] - u[0]) - self.volumes[0] * laplacian_end
        }
    }

    /// Solves `(Δ_h + c) u = f` at the unknowns with Dirichlet data
    /// `inner` (ignored with a pole) and `outer`.
    pub fn solve(
        &self,
        potential: &[f64],
        rhs: &[f64],
        inner: f64,
        outer: f64,
    ) -> Result<Vec<f64>> {
        let n = self.grid.len();
        let range = self.grid.unknowns();
        let k = &self.faces;
        let w = &self.volumes;
        let m = range.len();
        let mut diag = Vec::with_capacity(m);
        let mut off = Vec::with_capacity(m.saturating_sub(1));
        let mut b = Vec::with_capacity(m);
        for i in range.clone() {
            let left = if i > 0 { k[i - 1] } else { 0.0 };
            diag.push(left + k[i] - w[i] * potential[i]);
            let mut bi = -w[i] * rhs[i];
            if i == range.start && i > 0 {
                bi += left * inner;
            }
            if i + 1 == n - 1 {
                bi += k[i] * outer;
            } else {
                off.push(-k[i]);
            }
            b.push(bi);
        }
        let x = tridiag::solve(&diag, &off, &b)?;
        let mut u = vec![0.0; n];
        if !self.grid.has_pole() {
            u[0] = inner;
        }
        u[n - 1] = outer;
        u[range].copy_from_slice(&x);
        Ok(u)
    }

    /// Symmetric stiffness `K` (diagonal, off-diagonal) on the unknowns.
    pub(crate) fn stiffness(&self) -> (Vec<f64>, Vec<f64>) {
        let range = self.grid.unknowns();
        let k = &self.faces;
        let diag = range
            .clone()
            .map(|i| if i > 0 { k[i - 1] } else { 0.0 } + k[i])
            .collect();
        let off = range.clone().skip(1).map(|i| -k[i - 1]).collect();
        (diag, off)
    }
}

/// The discrete operator `Δ + c(r)` on a grid.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    geometry: Arc<Geometry>,
    potential: Vec<f64>,
}

impl RadialOperator {
    pub fn assemble(manifold: &ModelManifold, grid: Arc<RadialGrid>, potential: &RadialField) -> Result<Self> {
        if potential.grid() != grid.as_ref() {
            return Err(Error::invalid("potential is not defined on the operator grid"));
        }
        let geometry = Arc::new(Geometry::new(manifold, grid)?);
        Ok(Self {
            geometry,
            potential: potential.values().to_vec(),
        })
    }

    pub fn laplacian(manifold: &ModelManifold, grid: Arc<RadialGrid>) -> Result<Self> {
        let n = grid.len();
        Ok(Self {
            geometry: Arc::new(Geometry::new(manifold, grid)?),
            potential: vec![0.0; n],
        })
    }

    pub fn with_potential(geometry: Arc<Geometry>, potential: Vec<f64>) -> Self {
        Self { geometry, potential }
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geometry
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.geometry.grid()
    }

    /// Off-diagonal entries `k_{i±½}/w_i` of the unknown rows.
    pub fn off_diagonals(&self) -> Vec<(f64, f64)> {
        let g = &self.geometry;
        g.grid
            .unknowns()
            .map(|i| {
                let left = if i > 0 { g.faces[i - 1] / g.volumes[i] } else { 0.0 };
                (left, g.faces[i] / g.volumes[i])
            })
            .collect()
    }

    /// `(Δ_h + c)u`; entries at Dirichlet nodes are set to zero.
    pub fn apply(&self, u: &RadialField) -> Result<RadialField> {
        if u.grid() != self.grid().as_ref() {
            return Err(Error::invalid("field is not defined on the operator grid"));
        }
        let mut out = self.geometry.laplacian(u.values());
        for (i, v) in out.iter_mut().enumerate() {
            *v += self.potential[i] * u.values()[i];
        }
        let range = self.grid().unknowns();
        for (i, v) in out.iter_mut().enumerate() {
            if !range.contains(&i) {
                *v = 0.0;
            }
        }
        Ok(RadialField::from_parts(self.grid().clone(), out))
    }

    /// Solves `(Δ_h + c)u = rhs` with `u = boundary` on the Dirichlet ends.
    pub fn solve(&self, rhs: &RadialField, boundary: f64) -> Result<RadialField> {
        self.solve_annulus(rhs, boundary, boundary)
    }

    /// As [`solve`](Self::solve) with inner Dirichlet data for annuli.
    pub fn solve_annulus(&self, rhs: &RadialField, inner: f64, outer: f64) -> Result<RadialField> {
        if rhs.grid() != self.grid().as_ref() {
            return Err(Error::invalid("right-hand side is not defined on the operator grid"));
        }
        let u = self.geometry.solve(&self.potential, rhs.values(), inner, outer)?;
        RadialField::new(self.grid().clone(), u)
    }
}

fn check_exponent(values: &[f64], exponent: f64) -> Result<()> {
    if exponent.fract() != 0.0 && values.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain(format!(
            "negative field value raised to fractional power {exponent}"
        )));
    }
    Ok(())
}

/// `∫_{B_R} u^q dV`, by Gauss–Legendre on each cell of the piecewise-linear
/// interpolant of the field (`R` may fall inside a cell).
pub fn integrate_ball(manifold: &ModelManifold, field: &RadialField, exponent: f64, radius: f64) -> Result<f64> {
    let r = field.nodes();
    if radius > field.grid().outer() * (1.0 + 1e-12) || radius < field.grid().inner() {
        return Err(Error::Domain(format!(
            "field covers [{}, {}], cannot integrate up to {radius}",
            field.grid().inner(),
            field.grid().outer()
        )));
    }
    check_exponent(field.values(), exponent)?;
    let u = field.values();
    let mut total = 0.0;
    for i in 0..r.len() - 1 {
        if r[i] >= radius {
            break;
        }
        let hi = r[i + 1].min(radius);
        let (r0, r1, u0, u1) = (r[i], r[i + 1], u[i], u[i + 1]);
        total += quadrature::gauss_legendre5(
            |s| {
                let v = u0 + (s - r0) / (r1 - r0) * (u1 - u0);
                pow(v, exponent) * manifold.density(s)
            },
            r0,
            hi,
        );
    }
    Ok(total)
}

/// `∫_{∂B_r} u^q = ω g(r)^{m−1} u(r)^q`.
pub fn integrate_sphere(manifold: &ModelManifold, field: &RadialField, exponent: f64, r: f64) -> Result<f64> {
    let v = field.value_at(r);
    check_exponent(&[v], exponent)?;
    Ok(manifold.density(r) * pow(v, exponent))
}

fn pow(v: f64, q: f64) -> f64 {
    if q == 1.0 {
        v
    } else if q == 2.0 {
        v * v
    } else if v == 0.0 {
        if q > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        v.powf(q)
    }
}

/// Node-wise `Δu + a u − b u^σ` (zero at Dirichlet nodes).
pub fn residual_field(problem: &LogisticProblem, u: &RadialField) -> Result<RadialField> {
    let geometry = Geometry::new(problem.manifold(), u.grid_arc().clone())?;
    residual_with(&geometry, problem, u)
}

pub(crate) fn residual_with(geometry: &Geometry, problem: &LogisticProblem, u: &RadialField) -> Result<RadialField> {
    if u.values().iter().any(|&v| v < 0.0) && problem.sigma().fract() != 0.0 {
        return Err(Error::Domain("residual needs u >= 0".into()));
    }
    let a = problem.a().sample(u.grid_arc());
    let b = problem.b().sample(u.grid_arc());
    let lap = geometry.laplacian(u.values());
    let range = u.grid().unknowns();
    let sigma = problem.sigma();
    let values = (0..u.values().len())
        .map(|i| {
            if range.contains(&i) {
                let v = u.values()[i];
                lap[i] + a.values()[i] * v - b.values()[i] * pow(v, sigma)
            } else {
                0.0
            }
        })
        .collect();
    Ok(RadialField::from_parts(u.grid_arc().clone(), values))
}

/// Sup-norm of `Δu + a u − b u^σ` over the unknown nodes.
pub fn residual(problem: &LogisticProblem, u: &RadialField) -> Result<f64> {
    let f = residual_field(problem, u)?;
    Ok(f.values().iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::Coefficient;
    use std::f64::consts::PI;

    fn e3() -> ModelManifold {
        ModelManifold::euclidean(3).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = RadialGrid::uniform(1.0, 4).unwrap();
        let expected = [0.2, 0.4, 0.6, 0.8];
        for (a, b) in g.interior().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let g = RadialGrid::build(10.0, 100, Grading::Geometric(1.02)).unwrap();
        assert!(g.nodes()[1] < 0.1);
        assert!(g.interior().last().unwrap() < &10.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!((g.outer() - 10.0).abs() < 1e-12);
        assert!(RadialGrid::uniform(0.0, 16).is_err());
        assert!(RadialGrid::uniform(1.0, 3).is_err());
    }

    #[test]
    fn laplacian_of_r_squared_in_r3() {
        for n in [40, 80] {
            let grid = Arc::new(RadialGrid::uniform(1.0, n).unwrap());
            let op = RadialOperator::laplacian(&e3(), grid.clone()).unwrap();
            let u = RadialField::from_fn(grid.clone(), |r| r * r);
            let lu = op.apply(&u).unwrap();
            let h = grid.max_spacing();
            for i in grid.unknowns() {
                assert!((lu.values()[i] - 6.0).abs() < 6.0 * h * h + 1e-9);
            }
            assert!((lu.values()[0] - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_potential_on_constants() {
        let grid = Arc::new(RadialGrid::uniform(2.0, 30).unwrap());
        let c = RadialField::constant(grid.clone(), 5.0);
        let op = RadialOperator::assemble(&e3(), grid.clone(), &c).unwrap();
        let out = op.apply(&RadialField::constant(grid.clone(), 1.0)).unwrap();
        for i in grid.unknowns() {
            assert!((out.values()[i] - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_laplacian_of_cosh() {
        let m = ModelManifold::hyperbolic(2, 1.0).unwrap();
        let grid = Arc::new(RadialGrid::uniform(3.0, 300).unwrap());
        let op = RadialOperator::laplacian(&m, grid.clone()).unwrap();
        let lu = op.apply(&RadialField::from_fn(grid.clone(), f64::cosh)).unwrap();
        let h = grid.max_spacing();
        for i in grid.unknowns() {
            let r = grid.nodes()[i];
            let err = (lu.values()[i] - 2.0 * r.cosh()).abs() / (h * h * r.cosh());
            assert!(err < 10.0, "r = {r}, scaled error {err}");
        }
    }

    #[test]
    fn dirichlet_solve_examples() {
        let grid = Arc::new(RadialGrid::uniform(1.0, 200).unwrap());
        let op = RadialOperator::laplacian(&e3(), grid.clone()).unwrap();
        let u = op.solve(&RadialField::constant(grid.clone(), -6.0), 0.0).unwrap();
        for (r, v) in grid.nodes().iter().zip(u.values()) {
            assert!((v - (1.0 - r * r)).abs() < 1e-4);
        }
        let z = op.solve(&RadialField::constant(grid.clone(), 0.0), 0.0).unwrap();
        assert!(z.values().iter().all(|v| *v == 0.0));

        let coarse = Arc::new(RadialGrid::uniform(1.0, 8).unwrap());
        let c = RadialField::constant(coarse.clone(), -1e6);
        let op = RadialOperator::assemble(&e3(), coarse.clone(), &c).unwrap();
        let u = op.solve(&RadialField::constant(coarse.clone(), 3.0), 0.0).unwrap();
        for i in 0..4 {
            assert!((u.values()[i] + 3e-6).abs() < 1e-8);
        }
    }

    #[test]
    fn harmonic_annulus_profile() {
        // 2/r − 1 on the annulus [1, 2] in R^3
        let grid = Arc::new(RadialGrid::annulus(1.0, 2.0, 400).unwrap());
        let op = RadialOperator::laplacian(&e3(), grid.clone()).unwrap();
        let u = op
            .solve_annulus(&RadialField::constant(grid.clone(), 0.0), 1.0, 0.0)
            .unwrap();
        for (r, v) in grid.nodes().iter().zip(u.values()) {
            assert!((v - (2.0 / r - 1.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn ball_and_sphere_integrals() {
        let grid = Arc::new(RadialGrid::uniform(1.0, 400).unwrap());
        let one = RadialField::constant(grid.clone(), 1.0);
        let v = integrate_ball(&e3(), &one, 1.0, 1.0).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-10);
        let lin = RadialField::from_fn(grid.clone(), |r| r);
        let v = integrate_ball(&e3(), &lin, 2.0, 1.0).unwrap();
        assert!((v - 4.0 * PI / 5.0).abs() < 1e-10);
        let c = RadialField::constant(grid.clone(), 3.0);
        let s = integrate_sphere(&e3(), &c, 1.0, 0.5).unwrap();
        assert!((s - 3.0 * 4.0 * PI * 0.25).abs() < 1e-12);
        let neg = RadialField::constant(grid, -1.0);
        assert!(matches!(integrate_ball(&e3(), &neg, 0.5, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn residual_examples() {
        let grid = Arc::new(RadialGrid::uniform(1.0, 50).unwrap());
        let p = LogisticProblem::new(e3(), Coefficient::Constant(1.0), Coefficient::Constant(1.0), 2.0).unwrap();
        let one = RadialField::constant(grid.clone(), 1.0);
        assert!(residual(&p, &one).unwrap() < 1e-14);

        let lin = LogisticProblem::new(e3(), Coefficient::Constant(0.0), Coefficient::Constant(0.0), 2.0).unwrap();
        let harmonic = RadialField::constant(grid.clone(), 2.5);
        assert!(residual(&lin, &harmonic).unwrap() < 1e-12);

        let eps = 1e-6;
        let mut bumped = one.values().to_vec();
        bumped[20] += eps;
        let bumped = RadialField::new(grid.clone(), bumped).unwrap();
        let h = grid.max_spacing();
        let res = residual(&p, &bumped).unwrap();
        assert!(res > 1.5 * eps / (h * h) && res < 3.0 * eps / (h * h));
    }

    #[test]
    fn csv_round_trip() {
        let grid = Arc::new(RadialGrid::uniform(1.0, 5).unwrap());
        let f = RadialField::from_fn(grid, |r| r.sin() / 3.0);
        let g = RadialField::from_csv(&f.to_csv()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn derivative_stencil() {
        let grid = Arc::new(RadialGrid::build(2.0, 60, Grading::Geometric(1.03)).unwrap());
        let f = RadialField::from_fn(grid.clone(), |r| r * r * r);
        let d = f.derivative();
        for (r, v) in grid.nodes().iter().zip(d.values()).skip(1) {
            assert!((v - 3.0 * r * r).abs() < 0.02);
        }
    }
}

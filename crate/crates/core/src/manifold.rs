//! Rotationally symmetric model manifolds `ℝ^m` with metric `dr² + g(r)² dθ²`.
//!
//! Everything downstream consumes the geometry through three quantities: the
//! warping function `g` with its derivative, the radial Laplacian coefficient
//! `(m−1) g′/g` (which is `Δr` on a model), and the polar measure
//! `ω_{m−1} g^{m−1} dr`.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fit::{line_fit, log_spaced};
use crate::quadrature;
use crate::report::Verdict;

/// Warping function families.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpingFunction {
    /// `g(r) = r`.
    Euclidean,
    /// `g(r) = sinh(√B r)/√B` with curvature scale `B > 0`.
    Hyperbolic { curvature: f64 },
    /// `g(r) = r^{B′}` with `B′ ≥ 1`. For `B′ > 1` the pole normalization
    /// `g′(0) = 1` does not hold; the family serves as a comparison model.
    Power { exponent: f64 },
    /// Monotone cubic interpolant of sampled `(r, g)` pairs.
    Tabulated(TabulatedWarping),
}

impl WarpingFunction {
    pub fn hyperbolic(curvature: f64) -> Result<Self> {
        if !(curvature > 0.0) || !curvature.is_finite() {
            return Err(Error::invalid(format!(
                "hyperbolic curvature scale must be positive, got {curvature}"
            )));
        }
        Ok(WarpingFunction::Hyperbolic { curvature })
    }

    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent >= 1.0) || !exponent.is_finite() {
            return Err(Error::invalid(format!(
                "power warping exponent must be >= 1, got {exponent}"
            )));
        }
        Ok(WarpingFunction::Power { exponent })
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::Euclidean => r,
            WarpingFunction::Hyperbolic { curvature } => {
                let k = curvature.sqrt();
                (k * r).sinh() / k
            }
            WarpingFunction::Power { exponent } => r.powf(*exponent),
            WarpingFunction::Tabulated(t) => t.value(r),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::Euclidean => 1.0,
            WarpingFunction::Hyperbolic { curvature } => (curvature.sqrt() * r).cosh(),
            WarpingFunction::Power { exponent } => exponent * r.powf(exponent - 1.0),
            WarpingFunction::Tabulated(t) => t.derivative(r),
        }
    }

    /// `g′(r)/g(r)` for `r > 0`, evaluated without forming `g′` and `g`
    /// separately where they would overflow.
    pub fn log_derivative(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::Euclidean => 1.0 / r,
            WarpingFunction::Hyperbolic { curvature } => {
                let k = curvature.sqrt();
                k / (k * r).tanh()
            }
            WarpingFunction::Power { exponent } => exponent / r,
            WarpingFunction::Tabulated(t) => t.derivative(r) / t.value(r),
        }
    }

    /// `ln g(r)` for `r > 0`.
    pub fn ln_value(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::Hyperbolic { curvature } => {
                let k = curvature.sqrt();
                let x = k * r;
                if x > 20.0 {
                    x + (-(-2.0 * x).exp()).ln_1p() - (2.0 * k).ln()
                } else {
                    (x.sinh() / k).ln()
                }
            }
            WarpingFunction::Power { exponent } => exponent * r.ln(),
            _ => self.value(r).ln(),
        }
    }

    /// Largest radius at which the function is defined, if finite.
    pub fn range(&self) -> Option<f64> {
        match self {
            WarpingFunction::Tabulated(t) => Some(t.max_radius()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WarpingFunction::Euclidean => "euclidean",
            WarpingFunction::Hyperbolic { .. } => "hyperbolic",
            WarpingFunction::Power { .. } => "power",
            WarpingFunction::Tabulated(_) => "tabulated",
        }
    }
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes, which
/// keeps the interpolant monotone (so `g′ ≥ 0` is inherited from the data).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWarping {
    r: Vec<f64>,
    g: Vec<f64>,
    slope: Vec<f64>,
}

impl TabulatedWarping {
    pub fn new(r: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if r.len() != g.len() || r.len() < 3 {
            return Err(Error::invalid(
                "tabulated warping needs at least three (r, g) pairs",
            ));
        }
        if r[0] != 0.0 || g[0] != 0.0 {
            return Err(Error::invalid("tabulated warping must start at (0, 0)"));
        }
        for i in 1..r.len() {
            if !(r[i] > r[i - 1]) {
                return Err(Error::invalid("tabulated radii must be strictly increasing"));
            }
            if !(g[i] > 0.0) {
                return Err(Error::invalid(format!("g({}) must be positive", r[i])));
            }
            if g[i] < g[i - 1] {
                return Err(Error::invalid(format!(
                    "g must be non-decreasing (drops at r = {})",
                    r[i]
                )));
            }
        }
        let n = r.len();
        let delta: Vec<f64> = (0..n - 1)
            .map(|i| (g[i + 1] - g[i]) / (r[i + 1] - r[i]))
            .collect();
        let mut slope = vec![0.0; n];
        // pole normalization g'(0) = 1, admissible if it keeps the first cell monotone
        if delta[0] <= 0.0 || 1.0 > 3.0 * delta[0] {
            return Err(Error::invalid(
                "first table cell incompatible with g'(0) = 1",
            ));
        }
        slope[0] = 1.0;
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                slope[i] = 0.0;
            } else {
                let h0 = r[i] - r[i - 1];
                let h1 = r[i + 1] - r[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        slope[n - 1] = delta[n - 2];
        Ok(Self { r, g, slope })
    }

    /// Reads a two-column CSV (`r,g`), skipping a non-numeric header line.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut r = Vec::new();
        let mut g = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Parse(format!(
                        "{}:{}: expected two columns",
                        path.display(),
                        lineno + 1
                    )))
                }
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    r.push(x);
                    g.push(y);
                }
                _ if r.is_empty() && lineno == 0 => continue, // header
                _ => {
                    return Err(Error::Parse(format!(
                        "{}:{}: non-numeric row",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(r, g)
    }

    pub fn max_radius(&self) -> f64 {
        *self.r.last().expect("non-empty table")
    }

    fn locate(&self, x: f64) -> usize {
        match self.r.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.r.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.r.len() - 2),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let last = self.r.len() - 1;
        if x >= self.r[last] {
            return self.g[last] + self.slope[last] * (x - self.r[last]);
        }
        let i = self.locate(x);
        let h = self.r[i + 1] - self.r[i];
        let t = (x - self.r[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.g[i]
            + (t3 - 2.0 * t2 + t) * h * self.slope[i]
            + (-2.0 * t3 + 3.0 * t2) * self.g[i + 1]
            + (t3 - t2) * h * self.slope[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let last = self.r.len() - 1;
        if x >= self.r[last] {
            return self.slope[last];
        }
        let i = self.locate(x);
        let h = self.r[i + 1] - self.r[i];
        let t = (x - self.r[i]) / h;
        let t2 = t * t;
        (6.0 * t2 - 6.0 * t) / h * self.g[i]
            + (3.0 * t2 - 4.0 * t + 1.0) * self.slope[i]
            + (-6.0 * t2 + 6.0 * t) / h * self.g[i + 1]
            + (3.0 * t2 - 2.0 * t) * self.slope[i + 1]
    }
}

/// Area of the unit `(n)`-sphere in `ℝ^{n+1}`, i.e. `ω_{m−1}` for `n = m−1`:
/// `2π^{m/2}/Γ(m/2)`, with `Γ` at half-integers built by recurrence.
pub fn unit_sphere_area(m: usize) -> f64 {
    let mut gamma = if m % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if m % 2 == 0 { 1.0 } else { 0.5 };
    let target = m as f64 / 2.0;
    while x < target - 0.25 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(target) / gamma
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelManifold {
    dim: usize,
    warping: WarpingFunction,
    omega: f64,
}

impl ModelManifold {
    pub fn new(dim: usize, warping: WarpingFunction) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
        }
        Ok(Self {
            dim,
            warping,
            omega: unit_sphere_area(dim),
        })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, WarpingFunction::Euclidean)
    }

    pub fn hyperbolic(dim: usize, curvature: f64) -> Result<Self> {
        Self::new(dim, WarpingFunction::hyperbolic(curvature)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.warping
    }

    /// `ω_{m−1}`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self, r: f64) -> f64 {
        self.warping.value(r)
    }

    pub fn g_prime(&self, r: f64) -> f64 {
        self.warping.derivative(r)
    }

    pub fn check_radius(&self, r: f64) -> Result<()> {
        if let Some(limit) = self.warping.range() {
            if r > limit * (1.0 + 1e-12) {
                return Err(Error::OutOfRange { radius: r, limit });
            }
        }
        Ok(())
    }

    /// `ω_{m−1} g(r)^{m−1}`, the density of the polar measure.
    pub fn density(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let k = (self.dim - 1) as f64;
        self.omega * (k * self.warping.ln_value(r)).exp()
    }

    /// `g(r)^{1−m}` without overflow.
    pub fn inverse_density_factor(&self, r: f64) -> f64 {
        let k = (self.dim - 1) as f64;
        (-k * self.warping.ln_value(r)).exp()
    }

    /// `Δr = (m−1) g′(r)/g(r)`, defined for `r > 0`.
    pub fn warp_coefficient(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!(
                "warp coefficient needs r > 0 (got {r}); the pole is handled by the radial operator"
            )));
        }
        self.check_radius(r)?;
        Ok((self.dim - 1) as f64 * self.warping.log_derivative(r))
    }

    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("negative radius {r}")));
        }
        self.check_radius(r)?;
        Ok(self.density(r))
    }

    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("negative radius {r}")));
        }
        self.check_radius(r)?;
        Ok(self.ball_integral(|_| 1.0, r))
    }

    /// `∫_{B_r} f = ω_{m−1} ∫₀^r f(s) g(s)^{m−1} ds` for a radial `f`, by
    /// adaptive Gauss–Kronrod.
    pub fn ball_integral<F: Fn(f64) -> f64>(&self, f: F, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        quadrature::integrate(|s| f(s) * self.density(s), 0.0, r, 1e-12).0
    }

    /// Least-squares classification of `vol B_r` growth over `r_range`
    /// against the target `r^{target}` (times `log r` when requested).
    pub fn classify_growth(
        &self,
        target: f64,
        with_log_factor: bool,
        r_range: (f64, f64),
    ) -> Result<GrowthClassification> {
        self.check_radius(r_range.1)?;
        let rs = log_spaced(r_range.0, r_range.1, 48);
        let vols = rs
            .iter()
            .map(|&r| self.ball_volume(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(classify_samples(&rs, &vols, target, with_log_factor, None))
    }

    /// Decides `liminf log vol B_r / r^{target} < ∞` by fitting the growth
    /// exponent of `log vol B_r` over the sampled range.
    pub fn classify_log_volume_growth(
        &self,
        target: f64,
        r_range: (f64, f64),
    ) -> Result<GrowthClassification> {
        self.check_radius(r_range.1)?;
        let rs = log_spaced(r_range.0, r_range.1, 48);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &r in &rs {
            let v = self.ball_volume(r)?;
            // only where log vol is comfortably positive
            if v > std::f64::consts::E {
                xs.push(r.ln());
                ys.push(v.ln().ln());
            }
        }
        let slack = default_slack(target);
        let mut out = GrowthClassification {
            model: GrowthModel::Polynomial,
            fitted_exponent: f64::NAN,
            exponential_rate: f64::NAN,
            target,
            with_log_factor: false,
            slack,
            verdict: Verdict::Inconclusive,
        };
        if let Some(fit) = line_fit(&xs, &ys) {
            out.fitted_exponent = fit.slope;
            out.verdict = Verdict::from_bool(fit.slope <= target + slack);
        }
        Ok(out)
    }

    /// `∫^∞ g^{1−m} < ∞`, decided from the decay exponent of the integrand
    /// fitted over `[10², 10⁴]`.
    pub fn is_nonparabolic(&self) -> Result<bool> {
        if let Some(limit) = self.warping.range() {
            return Err(Error::Inconclusive(format!(
                "tabulated warping ends at r = {limit}; the tail integral cannot be decided"
            )));
        }
        let exponent = self.tail_decay_exponent(1e2, 1e4);
        Ok(exponent > 1.0 + 1e-6)
    }

    /// Decay exponent `p` of `g^{1−m} ≈ c·r^{−p}` fitted over `[lo, hi]`.
    pub(crate) fn tail_decay_exponent(&self, lo: f64, hi: f64) -> f64 {
        let k = (self.dim - 1) as f64;
        let rs = log_spaced(lo, hi, 16);
        let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = rs.iter().map(|&r| -k * self.warping.ln_value(r)).collect();
        line_fit(&xs, &ys).map(|f| -f.slope).unwrap_or(f64::NAN)
    }
}

/// Which asymptotic model fitted the samples better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthModel {
    Polynomial,
    Exponential,
    /// All samples vanish; every growth bound holds trivially.
    Vanishing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthClassification {
    pub model: GrowthModel,
    /// Fitted `s` in `F ≈ c·r^s`.
    pub fitted_exponent: f64,
    /// Fitted `κ` in `F ≈ c·e^{κ r}`.
    pub exponential_rate: f64,
    pub target: f64,
    pub with_log_factor: bool,
    pub slack: f64,
    pub verdict: Verdict,
}

pub(crate) fn default_slack(target: f64) -> f64 {
    (0.05 * target.abs()).max(0.05)
}

/// Classifies samples `F(r_i)` against the bound `O(r^{target} [log r])`.
///
/// The samples are fitted by both a power law (`ln F` against `ln r`) and an
/// exponential (`ln F` against `r`); the better fit is reported. An exponential
/// fit with positive rate fails every polynomial target. With the log factor
/// the target's own fitted slope over the same samples is used as the
/// threshold, so a function growing exactly like `r^s log r` passes.
pub fn classify_samples(
    rs: &[f64],
    values: &[f64],
    target: f64,
    with_log_factor: bool,
    slack: Option<f64>,
) -> GrowthClassification {
    let slack = slack.unwrap_or_else(|| default_slack(target));
    let mut out = GrowthClassification {
        model: GrowthModel::Polynomial,
        fitted_exponent: f64::NAN,
        exponential_rate: f64::NAN,
        target,
        with_log_factor,
        slack,
        verdict: Verdict::Inconclusive,
    };
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak <= 1e-300 {
        out.model = GrowthModel::Vanishing;
        out.verdict = Verdict::Holds;
        return out;
    }
    let mut lx = Vec::new();
    let mut x = Vec::new();
    let mut ly = Vec::new();
    for (r, v) in rs.iter().zip(values) {
        if *v > 0.0 && *r > 0.0 {
            lx.push(r.ln());
            x.push(*r);
            ly.push(v.ln());
        }
    }
    let (Some(poly), Some(expo)) = (line_fit(&lx, &ly), line_fit(&x, &ly)) else {
        return out;
    };
    out.fitted_exponent = poly.slope;
    out.exponential_rate = expo.slope;
    let exponential = expo.slope > 0.0 && expo.rss < 0.1 * poly.rss;
    let threshold = if with_log_factor {
        let target_vals: Vec<f64> = x
            .iter()
            .map(|r| target * r.ln() + r.ln().max(1e-300).ln().max(-50.0))
            .collect();
        let usable: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 1.0).collect();
        let tx: Vec<f64> = usable.iter().map(|&i| lx[i]).collect();
        let ty: Vec<f64> = usable.iter().map(|&i| target_vals[i]).collect();
        line_fit(&tx, &ty).map(|f| f.slope).unwrap_or(target)
    } else {
        target
    };
    if exponential {
        out.model = GrowthModel::Exponential;
        out.verdict = Verdict::Fails;
    } else {
        out.verdict = Verdict::from_bool(poly.slope <= threshold + slack);
    }
    out
}

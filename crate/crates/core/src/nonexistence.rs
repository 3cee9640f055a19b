//! Hypothesis checkers for the Liouville-type non-existence results: the
//! integral estimate for solutions of
//! `uΔu + a u² − b u^{σ+1} ≥ −A|∇u|²`, the theorems built on a positive
//! solution `φ` of `Δφ + Haφ ≤ −K|∇φ|²/φ`, and the `L¹(+∞)` tests.
//!
//! Parameter constraints are decided in exact rational arithmetic (every
//! finite `f64` is a rational). Asymptotic conditions are decided by
//! least-squares fits over a user range and always report the fit.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::fit::{line_fit, log_spaced, power_log_fit};
use crate::logistic::{maximal_solution, IterationSettings};
use crate::manifold::{classify_samples, default_slack, GrowthModel, ModelManifold};
use crate::problem::LogisticProblem;
use crate::radial::{integrate_ball, integrate_sphere, Geometry, RadialField, RadialGrid};
use crate::report::{CertificateReport, Verdict};
use crate::spectrum::{spectrum_bottom, Mesh, SignVerdict};

const FIT_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Thm32,
    Thm33,
    Lemma31,
    Thm32Prime,
    Cor32pp,
    Cor317,
    AbRemark,
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "3.2" => Theorem::Thm32,
            "3.3" => Theorem::Thm33,
            "lemma3.1" => Theorem::Lemma31,
            "3.2prime" => Theorem::Thm32Prime,
            "cor3.2pp" => Theorem::Cor32pp,
            "cor3.17" => Theorem::Cor317,
            "ab" => Theorem::AbRemark,
            other => return Err(Error::Parse(format!("unknown theorem '{other}'"))),
        })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Thm32 => "3.2",
            Theorem::Thm33 => "3.3",
            Theorem::Lemma31 => "lemma3.1",
            Theorem::Thm32Prime => "3.2prime",
            Theorem::Cor32pp => "cor3.2pp",
            Theorem::Cor317 => "cor3.17",
            Theorem::AbRemark => "ab",
        })
    }
}

/// Constants of the non-existence statements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonexistenceParams {
    pub h: f64,
    pub k: f64,
    /// Coefficient `A` of `|∇u|²`.
    pub grad_coeff_a: f64,
    pub sigma: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    /// Decay exponent of `b`.
    pub mu: f64,
    /// Growth exponent in `φ ≥ C r^{1/δ}`.
    pub delta: f64,
}

impl Default for NonexistenceParams {
    fn default() -> Self {
        Self {
            h: 1.0,
            k: 0.0,
            grad_coeff_a: 0.0,
            sigma: 2.0,
            beta: 0.0,
            p: 2.0,
            q: 2.0,
            mu: 0.0,
            delta: f64::INFINITY,
        }
    }
}

fn rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Pushes a row decided exactly; non-finite inputs give an inconclusive row.
fn exact_row(
    report: &mut CertificateReport,
    name: &str,
    lhs: Option<BigRational>,
    relation: &str,
    rhs: Option<BigRational>,
) {
    let (lf, rf, verdict) = match (lhs, rhs) {
        (Some(l), Some(r)) => {
            let ok = match relation {
                "<" => l < r,
                "<=" => l <= r,
                ">" => l > r,
                ">=" => l >= r,
                _ => unreachable!("relation {relation}"),
            };
            let note = (l.to_f64().unwrap_or(f64::NAN), r.to_f64().unwrap_or(f64::NAN));
            (note.0, note.1, Verdict::from_bool(ok))
        }
        _ => (f64::NAN, f64::NAN, Verdict::Inconclusive),
    };
    report.push(name, lf, relation, rf, verdict, "exact");
}

/// Evaluates the parameter constraints of `theorem` exactly.
pub fn params_check(theorem: Theorem, params: &NonexistenceParams) -> CertificateReport {
    let mut rep = CertificateReport::new(
        format!("parameter constraints of {theorem}"),
        "parameters admissible",
    );
    let h = rational(params.h);
    let k = rational(params.k);
    let a = rational(params.grad_coeff_a);
    let s = rational(params.sigma);
    let b = rational(params.beta);
    let p = rational(params.p);
    let q = rational(params.q);
    let mu = rational(params.mu);
    let max0 = |x: &Option<BigRational>| x.clone().map(|v| if v > BigRational::zero() { v } else { BigRational::zero() });
    let ceiling = match (&h, &k) {
        (Some(h), Some(k)) => Some(h * (k + BigRational::one()) - BigRational::one()),
        _ => None,
    };
    let zero = Some(BigRational::zero());
    let one = Some(BigRational::one());
    match theorem {
        Theorem::Thm33 => {
            exact_row(&mut rep, "H >= 1", h.clone(), ">=", one.clone());
            exact_row(&mut rep, "0 <= mu", zero.clone(), "<=", mu.clone());
            exact_row(&mut rep, "mu <= 2", mu, "<=", Some(int(2)));
            exact_row(&mut rep, "A <= 1", a.clone(), "<=", one.clone());
            exact_row(&mut rep, "A < H - 1", a.clone(), "<", h.clone().map(|h| h - BigRational::one()));
            exact_row(&mut rep, "1 < sigma", one, "<", s.clone());
            exact_row(&mut rep, "sigma <= 2H + 1", s.clone(), "<=", h.clone().map(|h| int(2) * h + BigRational::one()));
            let bound = match (&h, &a) {
                (Some(h), Some(a)) => Some(int(2) * h - a),
                _ => None,
            };
            exact_row(&mut rep, "sigma < 2H - A", s, "<", bound);
        }
        Theorem::Thm32 => {
            exact_row(&mut rep, "H > 0", h, ">", zero.clone());
            exact_row(&mut rep, "K > -1", k, ">", Some(int(-1)));
            exact_row(&mut rep, "max{0,A} <= H(K+1) - 1", max0(&a), "<=", ceiling.clone());
            exact_row(&mut rep, "max{0,A} <= beta", max0(&a), "<=", b.clone());
            exact_row(&mut rep, "beta <= H(K+1) - 1", b, "<=", ceiling);
            exact_row(&mut rep, "sigma >= 1", s, ">=", one.clone());
            exact_row(&mut rep, "p > 1", p, ">", one);
        }
        Theorem::Lemma31 => {
            exact_row(&mut rep, "A <= 1", a.clone(), "<=", one.clone());
            exact_row(&mut rep, "sigma > 1", s, ">", one.clone());
            exact_row(&mut rep, "p >= 1", p.clone(), ">=", one);
            exact_row(&mut rep, "p > A + 2", p, ">", a.map(|a| a + int(2)));
        }
        Theorem::Thm32Prime => {
            exact_row(&mut rep, "H > 0", h, ">", zero.clone());
            exact_row(&mut rep, "A <= -1", a, "<=", Some(int(-1)));
            exact_row(&mut rep, "sigma >= 0", s, ">=", zero.clone());
            exact_row(&mut rep, "p > 1", p, ">", one);
            exact_row(&mut rep, "delta > 0", rational(params.delta), ">", zero);
        }
        Theorem::Cor32pp => {
            exact_row(&mut rep, "sigma > 1", s.clone(), ">", one.clone());
            exact_row(&mut rep, "A <= -1", a, "<=", Some(int(-1)));
            let floor = s.clone().map(|s| {
                let t = int(3) - s;
                if t > BigRational::one() {
                    t
                } else {
                    BigRational::one()
                }
            });
            exact_row(&mut rep, "q > max{1, 3 - sigma}", q.clone(), ">", floor);
            exact_row(&mut rep, "0 <= mu", zero, "<=", mu.clone());
            let (mu_max, p_min) = match (&s, &q) {
                (Some(s), Some(q)) => {
                    let one = BigRational::one();
                    let num = q + s - int(2);
                    let mu_max = if num.is_zero() {
                        None
                    } else {
                        Some(int(2) * (s - &one) / num.clone())
                    };
                    let p_min = if *s == one { None } else { Some(num / (s - one)) };
                    (mu_max, p_min)
                }
                _ => (None, None),
            };
            exact_row(&mut rep, "mu <= 2(sigma-1)/(sigma+q-2)", mu, "<=", mu_max);
            exact_row(&mut rep, "p > (q+sigma-2)/(sigma-1)", p, ">", p_min);
        }
        Theorem::Cor317 => {
            exact_row(&mut rep, "H >= 1", h.clone(), ">=", one);
            exact_row(&mut rep, "0 <= beta", zero, "<=", b.clone());
            exact_row(&mut rep, "beta <= H - 1", b, "<=", h.map(|h| h - BigRational::one()));
        }
        Theorem::AbRemark => {
            exact_row(&mut rep, "sigma = 2", s.clone(), ">=", Some(int(2)));
            exact_row(&mut rep, "sigma <= 2", s, "<=", Some(int(2)));
        }
    }
    rep
}

/// Outcome of an `L¹(+∞)` test for `r^w / F(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonIntegrability {
    /// `r^w/F ∉ L¹(+∞)`.
    pub divergent: bool,
    pub verdict: Verdict,
    /// Fitted `s`, `k` in `F ≈ c r^s (ln r)^k`.
    pub power: f64,
    pub log_power: f64,
    pub weight: f64,
    pub slack: f64,
    /// `F` vanishes at some sample, so `1/F` is not integrable.
    pub vanishing: bool,
    pub proxy: String,
}

/// Decides `r^weight / F ∉ L¹(+∞)` from samples `F(r_i)`, `r_i > 1`, via
/// the fit `ln F ≈ s ln r + k ln ln r + c`: divergent iff `s − w < 1 − slack`,
/// or `|s − w − 1| ≤ slack` and `k ≤ 1 + slack`.
pub fn nonintegrability_from_samples(rs: &[f64], values: &[f64], weight: f64, slack: f64) -> Result<NonIntegrability> {
    if rs.len() != values.len() || rs.len() < 4 {
        return Err(Error::invalid("need at least four samples"));
    }
    if rs.iter().any(|&r| !(r > 1.0)) {
        return Err(Error::invalid("samples must have r > 1"));
    }
    let mut out = NonIntegrability {
        divergent: true,
        verdict: Verdict::Holds,
        power: f64::NAN,
        log_power: f64::NAN,
        weight,
        slack,
        vanishing: false,
        proxy: String::new(),
    };
    if values.iter().any(|&v| !(v > 0.0)) {
        out.vanishing = true;
        out.proxy = "F vanishes at a sampled radius; 1/F is not integrable".into();
        return Ok(out);
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let fit = power_log_fit(rs, &logs).ok_or_else(|| Error::Inconclusive("degenerate power-log fit".into()))?;
    out.power = fit.power;
    out.log_power = fit.log_power;
    let s = fit.power - weight;
    out.divergent = s < 1.0 - slack || ((s - 1.0).abs() <= slack && fit.log_power <= 1.0 + slack);
    out.verdict = Verdict::from_bool(out.divergent);
    out.proxy = format!(
        "fit F ~ r^{:.4} (ln r)^{:.4} over [{}, {}], weight r^{weight}",
        fit.power,
        fit.log_power,
        rs[0],
        rs[rs.len() - 1]
    );
    Ok(out)
}

/// Which integral of `u^q` enters the test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shell {
    Sphere,
    Ball,
}

/// `r^weight / ∫ u^q ∉ L¹(+∞)` with the integral over `∂B_r` or `B_r`.
pub fn nonintegrability_test(
    manifold: &ModelManifold,
    u: &RadialField,
    q: f64,
    r_range: (f64, f64),
    shell: Shell,
    weight: f64,
) -> Result<NonIntegrability> {
    if !(q > 0.0) {
        return Err(Error::invalid("q must be positive"));
    }
    let (lo, hi) = r_range;
    if !(lo > 1.0 && hi > lo) || hi > u.grid().outer() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "r_range must satisfy 1 < lo < hi <= {}",
            u.grid().outer()
        )));
    }
    let rs = log_spaced(lo, hi.min(u.grid().outer()), FIT_SAMPLES);
    let values = rs
        .iter()
        .map(|&r| match shell {
            Shell::Sphere => integrate_sphere(manifold, u, q, r),
            Shell::Ball => integrate_ball(manifold, u, q, r),
        })
        .collect::<Result<Vec<_>>>()?;
    nonintegrability_from_samples(&rs, &values, weight, 0.05)
}

/// `b ≥ C r^{−μ}` for large `r`: decay exponent of `b` fitted over the range
/// against `μ`, with `C = min b r^μ`.
fn b_lower_bound(report: &mut CertificateReport, b: &Coefficient, mu: f64, r_range: (f64, f64), label: &str) {
    let rs = log_spaced(r_range.0, r_range.1, FIT_SAMPLES);
    let vals: Vec<f64> = rs.iter().map(|&r| b.eval(r)).collect();
    let c = rs.iter().zip(&vals).map(|(r, v)| v * r.powf(mu)).fold(f64::INFINITY, f64::min);
    let decay = if vals.iter().all(|&v| v > 0.0) {
        let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
        line_fit(&xs, &ys).map(|f| -f.slope).unwrap_or(f64::NAN)
    } else {
        f64::INFINITY
    };
    report.compare(
        format!("{label} decay exponent of b"),
        decay,
        "<=",
        mu + default_slack(mu),
        "log-log fit",
    );
    report.compare(format!("{label} C = min b r^mu"), c, ">", 0.0, "");
}

fn sup_ratio(a: &Coefficient, b: &Coefficient, r_max: f64) -> f64 {
    (0..=4000)
        .map(|i| r_max * i as f64 / 4000.0)
        .map(|r| {
            let ap = a.eval(r).max(0.0);
            let bv = b.eval(r);
            if ap == 0.0 {
                0.0
            } else if bv > 0.0 {
                ap / bv
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

fn growth_row(
    report: &mut CertificateReport,
    name: &str,
    rs: &[f64],
    values: &[f64],
    target: f64,
    with_log: bool,
) {
    let c = classify_samples(rs, values, target, with_log, None);
    let note = match c.model {
        GrowthModel::Vanishing => "vanishes identically".to_string(),
        GrowthModel::Exponential => format!("exponential, rate {}", crate::fmt17(c.exponential_rate)),
        GrowthModel::Polynomial => format!("target r^{}{}", target, if with_log { " log r" } else { "" }),
    };
    report.push(name, c.fitted_exponent, "<=", target + c.slack, c.verdict, note);
}

/// Radii and mesh used for spectral sub-checks.
#[derive(Debug, Clone)]
pub struct SpectralSettings {
    pub radii: Vec<f64>,
    pub mesh: Mesh,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        Self {
            radii: vec![10.0, 20.0, 40.0, 80.0],
            mesh: Mesh::default(),
        }
    }
}

fn spectral_row(
    report: &mut CertificateReport,
    manifold: &ModelManifold,
    a: &Coefficient,
    h: f64,
    spectral: &SpectralSettings,
) -> Result<()> {
    let res = spectrum_bottom(manifold, a, h, &spectral.radii, spectral.mesh)?;
    let verdict = Verdict::from_bool(res.sign == Some(SignVerdict::NonNegative));
    report.push(
        format!("lambda_1(Delta + {h} a) >= 0"),
        res.extrapolated.unwrap_or(res.eigenvalue),
        ">=",
        -res.sign_tolerance,
        verdict,
        format!("last radius value {}", crate::fmt17(res.eigenvalue)),
    );
    Ok(())
}

/// Theorem 3.3: hypotheses (a), (b)(i), (b)(ii), (c), (e) and the parameter
/// window; when all hold, the only non-negative solution is `u ≡ 0`.
pub fn thm33_check(
    problem: &LogisticProblem,
    params: &NonexistenceParams,
    r_range: (f64, f64),
    spectral: &SpectralSettings,
) -> Result<CertificateReport> {
    let m = problem.manifold();
    let mut rep = CertificateReport::new(
        "non-existence: only u = 0 solves the inequality",
        "the only non-negative solution is u = 0",
    );
    if (problem.sigma() - params.sigma).abs() > 0.0 {
        return Err(Error::invalid("params.sigma differs from the problem's sigma"));
    }
    rep.extend(params_check(Theorem::Thm33, params));
    let (lo, hi) = r_range;
    b_lower_bound(&mut rep, problem.b(), params.mu, r_range, "(a)");
    rep.compare("(b)(i) sup a_+/b", sup_ratio(problem.a(), problem.b(), hi), "<", f64::INFINITY, "");
    let rs = log_spaced(lo, hi, FIT_SAMPLES);
    let a_plus = problem.a().positive_part();
    let ints: Vec<f64> = rs.iter().map(|&r| m.ball_integral(|s| a_plus.eval(s), r)).collect();
    growth_row(&mut rep, "(b)(ii) growth of int_{B_r} a_+", &rs, &ints, 2.0 - params.mu, true);
    spectral_row(&mut rep, m, problem.a(), params.h, spectral)?;
    let target = 2.0 + (2.0 - params.mu) * 2.0 * params.h / (params.sigma - 1.0);
    let vol = m.classify_growth(target, true, r_range)?;
    rep.push(
        "(e) volume growth exponent",
        vol.fitted_exponent,
        "<=",
        target + vol.slack,
        vol.verdict,
        format!("target r^{target} log r"),
    );
    Ok(rep)
}

/// Integral estimate for a solution `u`: per radius, `LHS(R) = ∫_{B_R} b
/// u^{p+σ−2}` against `C₁ R^{−2(p+σ−2)/(σ−1)} ∫_{B_{2R}} b^{−(p−1)/(σ−1)} +
/// C₂ ∫_{B_{2R}} (a₊/b)^{(p−1)/(σ−1)} a₊`. Each constant is the smallest
/// for which its own term dominates `LHS(R₀)` at the anchor `R₀`.
pub fn lemma31_certificate(
    problem: &LogisticProblem,
    u: &RadialField,
    p: f64,
    grad_coeff_a: f64,
    radii: &[f64],
) -> Result<CertificateReport> {
    let sigma = problem.sigma();
    let params = NonexistenceParams {
        grad_coeff_a,
        sigma,
        p,
        ..Default::default()
    };
    let window = params_check(Theorem::Lemma31, &params);
    if !window.overall().holds() {
        return Err(Error::Hypothesis(format!("parameter window fails:\n{}", window.render())));
    }
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::invalid("radius schedule must be positive and increasing"));
    }
    let r_max = *radii.last().expect("non-empty");
    problem.require_positive_b(2.0 * r_max)?;
    if r_max > u.grid().outer() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "u is given up to r = {}, the schedule needs {r_max}",
            u.grid().outer()
        )));
    }
    let mut rep = CertificateReport::new("integral estimate for solutions", "the a-priori estimate holds");
    rep.extend(window);
    if u.values().iter().all(|&v| v == 0.0) {
        rep.compare("u = 0", 0.0, "==", 0.0, "trivial: nothing to prove for u = 0");
        return Ok(rep);
    }
    let m = problem.manifold();
    let e = p + sigma - 2.0;
    let t = (p - 1.0) / (sigma - 1.0);
    let b = problem.b().clone();
    let a = problem.a().clone();
    let integrand = u.map(|r, v| b.eval(r) * v.max(0.0).powf(e));
    let mut lhs = Vec::new();
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for &r in radii {
        lhs.push(integrate_ball(m, &integrand, 1.0, r)?);
        t1.push(r.powf(-2.0 * e / (sigma - 1.0)) * m.ball_integral(|s| b.eval(s).powf(-t), 2.0 * r));
        t2.push(m.ball_integral(
            |s| {
                let ap = a.eval(s).max(0.0);
                if ap == 0.0 {
                    0.0
                } else {
                    (ap / b.eval(s)).powf(t) * ap
                }
            },
            2.0 * r,
        ));
    }
    let c1 = if t1[0] > 0.0 { lhs[0] / t1[0] } else { 0.0 };
    let c2 = if t2[0] > 0.0 { lhs[0] / t2[0] } else { 0.0 };
    rep.diagnostic("fitted C1", c1, ">=", 0.0, Verdict::Holds, format!("anchor R0 = {}", radii[0]));
    rep.diagnostic("fitted C2", c2, ">=", 0.0, Verdict::Holds, "");
    for (i, &r) in radii.iter().enumerate().skip(1) {
        let rhs = c1 * t1[i] + c2 * t2[i];
        let verdict = Verdict::from_bool(lhs[i] <= rhs * (1.0 + 1e-9) + 1e-300);
        rep.push(format!("R = {r}: LHS <= C1 T1 + C2 T2"), lhs[i], "<=", rhs, verdict, "");
    }
    let monotone = lhs.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    rep.push(
        "LHS non-decreasing in R",
        lhs[lhs.len() - 1],
        ">=",
        lhs[0],
        Verdict::from_bool(monotone),
        "",
    );
    if radii.len() >= 2 && lhs.iter().all(|&v| v > 0.0) {
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = lhs.iter().map(|v| v.ln()).collect();
        let order = line_fit(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN);
        rep.diagnostic("growth order of LHS(R)", order, "=", order, Verdict::Holds, "log-log fit");
    }
    Ok(rep)
}

/// Maximum of `Δφ + Haφ + K|φ′|²/φ` over the grid unknowns beyond the pole
/// (must be ≤ 0), with a tolerance scaled by the size of the terms.
fn phi_inequality(manifold: &ModelManifold, a: &Coefficient, h: f64, k: f64, phi: &RadialField) -> Result<(f64, f64)> {
    if phi.min() <= 0.0 {
        return Err(Error::Domain("phi must be positive".into()));
    }
    let geometry = Geometry::new(manifold, Arc::clone(phi.grid_arc()))?;
    let lap = geometry.laplacian(phi.values());
    let rounding = geometry.laplacian_rounding(phi.values());
    let d = phi.derivative();
    let mut worst = f64::NEG_INFINITY;
    let mut excess = f64::NEG_INFINITY;
    for i in phi.grid().unknowns() {
        let r = phi.nodes()[i];
        let v = phi.values()[i];
        let grad = d.values()[i].powi(2) / v;
        let value = lap[i] + h * a.eval(r) * v + k * grad;
        let scale = 1.0 + lap[i].abs() + (h * a.eval(r) * v).abs() + grad.abs();
        worst = worst.max(value);
        excess = excess.max((value - 64.0 * rounding[i]) / scale);
    }
    Ok((worst, excess))
}

const INEQUALITY_TOL: f64 = 1e-6;

/// Theorem 3.2′: `φ` solves `Δφ + Haφ ≤ |∇φ|²/φ`, `φ ≥ C r^{1/δ}`; with a
/// candidate `u`, the weighted test `r^{δp}/∫_{∂B_r} u^p ∉ L¹(+∞)`.
pub fn thm32prime_check(
    problem: &LogisticProblem,
    phi: &RadialField,
    u: Option<&RadialField>,
    params: &NonexistenceParams,
    r_range: (f64, f64),
) -> Result<CertificateReport> {
    let m = problem.manifold();
    let mut rep = CertificateReport::new(
        "non-existence with a log-type weight",
        "no non-negative solution meets the growth condition",
    );
    rep.extend(params_check(Theorem::Thm32Prime, params));
    if !(params.delta.is_finite() && params.delta > 0.0) {
        return Err(Error::invalid("an explicit finite delta > 0 is required"));
    }
    let (worst, excess) = phi_inequality(m, problem.a(), params.h, -1.0, phi)?;
    rep.push(
        "Delta phi + H a phi - |phi'|^2/phi <= 0",
        worst,
        "<=",
        0.0,
        Verdict::from_bool(excess <= INEQUALITY_TOL),
        format!("scaled excess {}", crate::fmt17(excess)),
    );
    let (lo, hi) = r_range;
    let rs = log_spaced(lo, hi.min(phi.grid().outer()), FIT_SAMPLES);
    let vals: Vec<f64> = rs.iter().map(|&r| phi.value_at(r)).collect();
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let slope = line_fit(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN);
    let target = 1.0 / params.delta;
    rep.compare("phi growth exponent vs 1/delta", slope, ">=", target - default_slack(target), "phi >= C r^(1/delta)");
    let c = rs.iter().zip(&vals).map(|(r, v)| v / r.powf(target)).fold(f64::INFINITY, f64::min);
    rep.compare("C = min phi r^(-1/delta)", c, ">", 0.0, "");
    match u {
        Some(u) => {
            let t = nonintegrability_test(m, u, params.p, r_range, Shell::Sphere, params.delta * params.p)?;
            rep.push("r^(delta p) / int u^p not in L1", t.power - t.weight, "<=", 1.0 + t.slack, t.verdict, t.proxy);
        }
        None => {
            rep.diagnostic("weighted non-integrability", f64::NAN, "", f64::NAN, Verdict::Inconclusive, "supply a candidate u");
        }
    }
    Ok(rep)
}

/// Theorem 3.2: `(3.3)`, `φ` solves `Δφ + Haφ ≤ −K|∇φ|²/φ`, `supp u`
/// meets `{b > 0}`, and `(∫_{∂B_r} φ^{(β+1)(2−p)/H} u^{2(β+1)})⁻¹ ∉ L¹(+∞)`.
pub fn thm32_check(
    problem: &LogisticProblem,
    phi: &RadialField,
    u: &RadialField,
    params: &NonexistenceParams,
    r_range: (f64, f64),
) -> Result<CertificateReport> {
    let m = problem.manifold();
    let mut rep = CertificateReport::new("non-existence via a positive weight", "u vanishes identically");
    rep.extend(params_check(Theorem::Thm32, params));
    if phi.grid() != u.grid() {
        return Err(Error::invalid("phi and u must share a grid"));
    }
    let (worst, excess) = phi_inequality(m, problem.a(), params.h, params.k, phi)?;
    rep.push(
        "Delta phi + H a phi + K |phi'|^2/phi <= 0",
        worst,
        "<=",
        0.0,
        Verdict::from_bool(excess <= INEQUALITY_TOL),
        format!("scaled excess {}", crate::fmt17(excess)),
    );
    let meets = u
        .nodes()
        .iter()
        .zip(u.values())
        .any(|(r, v)| *v > 0.0 && problem.b().eval(*r) > 0.0);
    rep.push("supp u meets {b > 0}", f64::from(u8::from(meets)), "==", 1.0, Verdict::from_bool(meets), "");
    let e_phi = (params.beta + 1.0) * (2.0 - params.p) / params.h;
    let e_u = 2.0 * (params.beta + 1.0);
    let weighted = RadialField::new(
        Arc::clone(u.grid_arc()),
        u.values()
            .iter()
            .zip(phi.values())
            .map(|(v, f)| f.powf(e_phi) * v.max(0.0).powf(e_u))
            .collect(),
    )?;
    let t = nonintegrability_test(m, &weighted, 1.0, r_range, Shell::Sphere, 0.0)?;
    rep.push("(int phi^e u^(2(beta+1)))^-1 not in L1", t.power, "<=", 1.0 + t.slack, t.verdict, t.proxy);
    Ok(rep)
}

/// Corollary 3.17: `λ₁(Δ + Ha) ≥ 0`, `b ≥ 0`, `b ≢ 0`, and
/// `(∫_{B_r} u^{2(β+1)})⁻¹ ∉ L¹(+∞)` for a candidate positive `u`.
pub fn cor317_check(
    problem: &LogisticProblem,
    u: &RadialField,
    params: &NonexistenceParams,
    r_range: (f64, f64),
    spectral: &SpectralSettings,
) -> Result<CertificateReport> {
    let m = problem.manifold();
    let mut rep = CertificateReport::new("non-existence under a spectral condition", "no positive solution meets the growth condition");
    rep.extend(params_check(Theorem::Cor317, params));
    let (b_min, b_max) = problem.b().range_on(0.0, r_range.1, 4001);
    rep.compare("b >= 0", b_min, ">=", 0.0, "");
    rep.compare("b not identically 0", b_max, ">", 0.0, "");
    spectral_row(&mut rep, m, problem.a(), params.h, spectral)?;
    let t = nonintegrability_test(m, u, 2.0 * (params.beta + 1.0), r_range, Shell::Ball, 0.0)?;
    rep.push("(int_{B_r} u^(2(beta+1)))^-1 not in L1", t.power, "<=", 1.0 + t.slack, t.verdict, t.proxy);
    Ok(rep)
}

/// Corollary 3.2″ on a non-parabolic manifold.
pub fn cor32pp_check(problem: &LogisticProblem, params: &NonexistenceParams, r_range: (f64, f64)) -> Result<CertificateReport> {
    let m = problem.manifold();
    if !m.is_nonparabolic()? {
        return Err(Error::Hypothesis(format!(
            "{} (m = {}) is parabolic",
            m.warping().name(),
            m.dim()
        )));
    }
    if (problem.sigma() - params.sigma).abs() > 0.0 {
        return Err(Error::invalid("params.sigma differs from the problem's sigma"));
    }
    let mut rep = CertificateReport::new("non-existence for integrable a_+", "no nonzero non-negative solution");
    rep.extend(params_check(Theorem::Cor32pp, params));
    let (lo, hi) = r_range;
    let rs = log_spaced(lo, hi, FIT_SAMPLES);
    let a_plus = problem.a().positive_part();
    let ints: Vec<f64> = rs.iter().map(|&r| m.ball_integral(|s| a_plus.eval(s), r)).collect();
    growth_row(&mut rep, "(2ter) a_+ in L1: growth of int_{B_r} a_+", &rs, &ints, 0.0, false);
    let (s, q, p, mu) = (params.sigma, params.q, params.p, params.mu);
    let target = (2.0 * (s - 1.0) - mu * (q + s - 2.0)) * (p - 1.0) / (q - 1.0);
    let ints: Vec<f64> = rs.iter().map(|&r| m.ball_integral(|x| a_plus.eval(x).powf(p), r)).collect();
    growth_row(&mut rep, "(3ter) growth of int_{B_r} a_+^p", &rs, &ints, target, false);
    let vol_target = 2.0 + (2.0 - mu) * (s + q - 2.0) / (s - 1.0);
    let vol = m.classify_growth(vol_target, false, r_range)?;
    rep.push(
        "(4ter) volume growth exponent",
        vol.fitted_exponent,
        "<=",
        vol_target + vol.slack,
        vol.verdict,
        format!("target r^{vol_target}"),
    );
    b_lower_bound(&mut rep, problem.b(), mu, r_range, "(5ter)");
    let (b_min, _) = problem.b().range_on(0.0, hi, 4001);
    rep.compare("b > 0", b_min, ">", 0.0, "");
    Ok(rep)
}

/// Optional numerical cross-check of [`ab_comparison_scenario`].
#[derive(Debug, Clone)]
pub struct AbNumerics {
    pub radii: Vec<f64>,
    pub mesh: Mesh,
}

/// `Δu + λ k/(1+r²) u − u² = 0` on `ℝ^m`: non-existence is certified when
/// `λ*/λ ≥ min{1, (m−2)/4}` with the bound `λ* ≥ (m−2)²/(4k)`. The numerical
/// decay of blow-up limits is reported as a diagnostic.
pub fn ab_comparison_scenario(k: f64, dim: usize, lambda: f64, numerics: Option<&AbNumerics>) -> Result<CertificateReport> {
    if dim < 3 || !(k > 0.0) || !(lambda > 0.0) {
        return Err(Error::invalid("need m >= 3, k > 0 and lambda > 0"));
    }
    let md = dim as f64;
    let lambda_star = (md - 2.0).powi(2) / (4.0 * k);
    let threshold = (md - 2.0) / 4.0;
    let threshold = threshold.min(1.0);
    let mut rep = CertificateReport::new(
        format!("comparison scenario m = {dim}, k = {k}, lambda = {lambda}"),
        "every non-negative solution vanishes",
    );
    let ratio = lambda_star / lambda;
    let note = if (ratio - threshold).abs() <= 1e-12 * threshold {
        "certified at the boundary of the rule"
    } else {
        "lambda* >= (m-2)^2/(4k)"
    };
    rep.compare("lambda*/lambda vs min{1,(m-2)/4}", ratio, ">=", threshold, note);
    if let Some(num) = numerics {
        let a = Coefficient::function(format!("{lambda}*{k}/(1+r^2)"), move |r| lambda * k / (1.0 + r * r));
        let problem = LogisticProblem::new(ModelManifold::euclidean(dim)?, a, Coefficient::Constant(1.0), 2.0)?;
        let sol = maximal_solution(
            &problem,
            &num.radii,
            num.mesh,
            &crate::logistic::default_n_schedule(),
            None,
            &IterationSettings::default(),
        )?;
        let poles: Vec<f64> = sol.stages.iter().map(|s| s.pole_value()).collect();
        let decreasing = poles.windows(2).all(|w| w[1] <= w[0]);
        let first = poles[0];
        let last = poles[poles.len() - 1];
        rep.diagnostic(
            "blow-up limits u_R(0) decrease along the radii",
            last,
            "<=",
            first,
            Verdict::from_bool(decreasing),
            format!("R = {:?}", num.radii),
        );
    }
    Ok(rep)
}

/// `I(R) = ∫_{B_{R/2}} (u_R)^q` for a family of blow-up limits on growing
/// balls, with its log-log growth order.
pub fn interior_power_integrals(manifold: &ModelManifold, stages: &[RadialField], q: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mut radii = Vec::new();
    let mut vals = Vec::new();
    for u in stages {
        let r = u.grid().outer();
        radii.push(r);
        vals.push(integrate_ball(manifold, u, q, 0.5 * r)?);
    }
    let order = if vals.iter().all(|&v| v > 0.0) && vals.len() >= 2 {
        let xs: Vec<f64> = radii.iter().map(|r: &f64| r.ln()).collect();
        let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
        line_fit(&xs, &ys).map(|f| f.slope).unwrap_or(f64::NAN)
    } else {
        f64::NEG_INFINITY
    };
    Ok((radii, vals, order))
}

/// A constant field on `n` uniform nodes of `[0, R]`.
pub fn constant_field(radius: f64, n: usize, value: f64) -> Result<RadialField> {
    Ok(RadialField::constant(Arc::new(RadialGrid::uniform(radius, n)?), value))
}

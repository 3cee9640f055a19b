//! Independent reference computations used by the integration tests.

#![allow(dead_code)]

use std::io::Write;

/// Writes straight to the process stdout so the line survives output capture.
pub fn verdict_line(criterion: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {criterion:>2}: {tag}  {detail}").unwrap();
}

/// `J₀(x)` from its power series; accurate for `x < 10`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// First positive zero of `J₀` by bisection on `[2, 3]`.
pub fn bessel_j01() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(lo) * bessel_j0(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest Dirichlet eigenvalue of `−w″ + V w` on `(0, L)` by Sturm-count
/// bisection on the three-point finite-difference matrix.
pub fn schrodinger_bottom(v: impl Fn(f64) -> f64, length: f64, n: usize) -> f64 {
    let h = length / (n + 1) as f64;
    let diag: Vec<f64> = (1..=n).map(|i| 2.0 / (h * h) + v(i as f64 * h)).collect();
    let off = -1.0 / (h * h);
    let count_below = |s: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in diag.iter().enumerate() {
            d = a - s - if i == 0 { 0.0 } else { off * off / d };
            if d == 0.0 {
                d = 1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut lo = diag.iter().copied().fold(f64::INFINITY, f64::min) - 4.0 / (h * h);
    let mut hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 4.0 / (h * h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Reduced potential of the Laplacian on a hyperbolic model of curvature
/// `−B` under `u = g^{−(m−1)/2} w`.
pub fn hyperbolic_reduced_potential(m: usize, curvature: f64, r: f64) -> f64 {
    let k = curvature.sqrt();
    let c = (m as f64 - 1.0) / 2.0;
    let coth = 1.0 / (k * r).tanh();
    c * curvature + c * (c - 1.0) * curvature * coth * coth
}

/// Integrates `u″ + (m−1)/r u′ = f(r, u)` from the pole with `u(0) = s` by
/// classical RK4 on `steps` equal steps up to `r_end`; returns `(u, u′)` at
/// every step.
pub fn shoot(m: usize, f: impl Fn(f64, f64) -> f64, s: f64, r_end: f64, steps: usize) -> Vec<(f64, f64, f64)> {
    let h = r_end / steps as f64;
    let k = m as f64 - 1.0;
    let rhs = |r: f64, u: f64, p: f64| -> (f64, f64) {
        if r == 0.0 {
            // u″(0) = f(0, s)/m by symmetry
            (p, f(0.0, u) / m as f64)
        } else {
            (p, f(r, u) - k / r * p)
        }
    };
    let mut out = vec![(0.0, s, 0.0)];
    let (mut u, mut p) = (s, 0.0);
    for i in 0..steps {
        let r = i as f64 * h;
        let (a1, b1) = rhs(r, u, p);
        let (a2, b2) = rhs(r + 0.5 * h, u + 0.5 * h * a1, p + 0.5 * h * b1);
        let (a3, b3) = rhs(r + 0.5 * h, u + 0.5 * h * a2, p + 0.5 * h * b2);
        let (a4, b4) = rhs(r + h, u + h * a3, p + h * b3);
        u += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        p += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        out.push((r + h, u, p));
    }
    out
}

//! Least-squares fits used to decide asymptotic conditions from samples.

/// Result of a straight-line fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual sum of squares.
    pub rss: f64,
}

/// Ordinary least squares; `None` when the abscissae have zero variance or
/// fewer than two samples are given.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }
    if !(sxx > 1e-300) || !sxx.is_finite() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = (0..n)
        .map(|i| (ys[i] - slope * xs[i] - intercept).powi(2))
        .sum();
    Some(LineFit {
        slope,
        intercept,
        rss,
    })
}

/// Fit of `ln F ≈ s·ln r + k·ln ln r + c`, the power-times-log model used for
/// L¹(+∞) decisions. Samples must have `r > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogFit {
    pub power: f64,
    pub log_power: f64,
    pub constant: f64,
}

pub fn power_log_fit(rs: &[f64], log_values: &[f64]) -> Option<PowerLogFit> {
    let n = rs.len().min(log_values.len());
    if n < 4 {
        return None;
    }
    // normal equations for the three basis functions 1, ln r, ln ln r
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for i in 0..n {
        let lr = rs[i].ln();
        if lr <= 0.0 {
            return None;
        }
        let row = [1.0, lr, lr.ln()];
        for p in 0..3 {
            for q in 0..3 {
                ata[p][q] += row[p] * row[q];
            }
            atb[p] += row[p] * log_values[i];
        }
    }
    let sol = solve3(ata, atb)?;
    Some(PowerLogFit {
        constant: sol[0],
        power: sol[1],
        log_power: sol[2],
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// `count` points geometrically spaced over `[lo, hi]` (both included).
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

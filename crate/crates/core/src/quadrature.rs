//! Adaptive Gauss–Kronrod quadrature for the smooth geometric integrals
//! (ball volumes, kernel tails, coefficient integrals).

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integral of `f` over `[a, b]` to relative tolerance `rel_tol` (with a tiny
/// absolute floor). Returns the estimate and the accumulated error bound.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (v0, e0) = kronrod15(&f, lo, hi);
    let mut pieces = vec![(lo, hi, v0, e0)];
    let mut total = v0;
    let mut err = e0;
    while err > (rel_tol * total.abs()).max(1e-300) && pieces.len() < MAX_INTERVALS {
        // split the piece with the largest error
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (l, r, v, e) = pieces.swap_remove(idx);
        let mid = 0.5 * (l + r);
        if mid <= l || mid >= r {
            pieces.push((l, r, v, e));
            break;
        }
        let (vl, el) = kronrod15(&f, l, mid);
        let (vr, er) = kronrod15(&f, mid, r);
        total += vl + vr - v;
        err += el + er - e;
        pieces.push((l, mid, vl, el));
        pieces.push((mid, r, vr, er));
    }
    // re-sum to shed accumulated cancellation
    let total: f64 = pieces.iter().map(|p| p.2).sum();
    let err: f64 = pieces.iter().map(|p| p.3).sum();
    (sign * total, err)
}

/// Fixed 5-point Gauss–Legendre rule on `[a, b]`, used for per-cell geometry.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    X.iter().zip(W.iter()).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, 1e-14);
        assert!((v - (128.0 / 7.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_refines() {
        let (v, _) = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let (a, _) = integrate(f64::exp, 0.0, 1.0, 1e-12);
        let (b, _) = integrate(f64::exp, 1.0, 0.0, 1e-12);
        assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn gauss5_cubic() {
        let v = gauss_legendre5(|x| x * x * x + x * x, 1.0, 3.0);
        assert!((v - (20.0 + 26.0 / 3.0)).abs() < 1e-12);
    }
}

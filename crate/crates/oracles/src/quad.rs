//! Adaptive Gauss–Kronrod (7/15) quadrature and EP quantities built on it.

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adaptive_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> f64 {
    let (est, err) = whole;
    if err <= tol || depth == 0 || (b - a) <= f64::EPSILON * a.abs().max(b.abs()) {
        return est;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    adaptive_rec(f, a, m, left, 0.5 * tol, depth - 1) + adaptive_rec(f, m, b, right, 0.5 * tol, depth - 1)
}

/// ∫_a^b f with absolute error target `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adaptive_rec(f, a, b, gk15(f, a, b), tol, 60)
}

/// ∫_0^∞ f over geometrically growing intervals [0, s], [s, 2s], [2s, 4s], …
/// until an interval contributes less than `1e-17` of the running total.
pub fn integrate_half_line(f: &dyn Fn(f64) -> f64, scale: f64, tol: f64) -> f64 {
    let mut total = integrate(f, 0.0, scale, tol);
    let mut lo = scale;
    for _ in 0..200 {
        let piece = integrate(f, lo, 2.0 * lo, tol);
        total += piece;
        if piece.abs() <= 1e-17 * total.abs() {
            break;
        }
        lo *= 2.0;
    }
    total
}

/// Natural length scale of exp(−η|e|^p).
fn ep_scale(p: f64, eta: f64) -> f64 {
    eta.powf(-1.0 / p)
}

/// ∫ exp(−η|e|^p) de over the real line.
pub fn ep_normalizer_by_quadrature(p: f64, eta: f64) -> f64 {
    let g = move |e: f64| (-eta * e.powf(p)).exp();
    2.0 * integrate_half_line(&g, ep_scale(p, eta), 1e-15)
}

/// EP CDF at every point of `sorted` (ascending), accumulating quadrature
/// over consecutive |x| values so each piece is integrated once.
pub fn ep_cdf_sorted(sorted: &[f64], p: f64, eta: f64) -> Vec<f64> {
    let z = ep_normalizer_by_quadrature(p, eta);
    let g = move |e: f64| (-eta * e.powf(p)).exp() / z;
    let mut order: Vec<usize> = (0..sorted.len()).collect();
    order.sort_by(|&a, &b| sorted[a].abs().total_cmp(&sorted[b].abs()));
    let mut half_mass = vec![0.0; sorted.len()];
    let mut acc = 0.0;
    let mut at = 0.0;
    for &i in &order {
        let t = sorted[i].abs();
        if t > at {
            acc += integrate(&g, at, t, 1e-15);
            at = t;
        }
        half_mass[i] = acc;
    }
    sorted
        .iter()
        .zip(half_mass)
        .map(|(&x, m)| if x < 0.0 { 0.5 - m } else { 0.5 + m })
        .collect()
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`, which
/// receives the samples in ascending order.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    cdf(&sorted)
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).max((i + 1) as f64 / n - f))
        .fold(0.0, f64::max)
}

/// Σ_i ln Σ_k π_k f_k(y_i − x_iᵀβ_k) with every EP normalizer obtained by
/// quadrature. `components` holds (π, β, η, p).
pub fn ep_log_likelihood_by_quadrature(rows: &[Vec<f64>], y: &[f64], components: &[(f64, Vec<f64>, f64, f64)]) -> f64 {
    let norms: Vec<f64> = components
        .iter()
        .map(|(_, _, eta, p)| ep_normalizer_by_quadrature(*p, *eta))
        .collect();
    rows.iter()
        .zip(y)
        .map(|(x, &yi)| {
            let mix: f64 = components
                .iter()
                .zip(&norms)
                .map(|((pi, beta, eta, p), z)| {
                    let fit: f64 = x.iter().zip(beta).map(|(a, b)| a * b).sum();
                    pi * (-eta * (yi - fit).abs().powf(*p)).exp() / z
                })
                .sum();
            mix.ln()
        })
        .sum()
}

//! Distributional checks on the benchmark generators.

use mixep::simgen::{generate, Case, SimSpec};
use mixep_oracles::ks_statistic;

fn pooled_errors(case: Case, reps: u64) -> Vec<f64> {
    (0..reps)
        .flat_map(|seed| {
            let draw = generate(&SimSpec::new(case, 1000, seed)).unwrap();
            (0..1000)
                .filter(|&i| !draw.outlier_mask[i])
                .map(move |i| draw.errors[i])
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn heavy_tailed_errors_follow_cauchy() {
    let e = pooled_errors(Case::I, 20);
    let n = e.len() as f64;
    let d = ks_statistic(&e, |xs| {
        xs.iter().map(|x| 0.5 + x.atan() / std::f64::consts::PI).collect()
    });
    assert!(d < 1.9495 / n.sqrt(), "KS {d}");
}

#[test]
fn contaminated_errors_have_mixture_cdf() {
    let e = pooled_errors(Case::II, 20);
    let n = e.len() as f64;
    let phi = |x: f64| 0.5 * erfc(-x / std::f64::consts::SQRT_2);
    let d = ks_statistic(&e, |xs| {
        xs.iter().map(|&x| 0.95 * phi(x) + 0.05 * phi(x / 5.0)).collect()
    });
    assert!(d < 1.9495 / n.sqrt(), "KS {d}");
}

#[test]
fn clean_errors_are_standard_normal() {
    for case in [Case::III, Case::IV] {
        let e = pooled_errors(case, 20);
        let n = e.len() as f64;
        let mean = e.iter().sum::<f64>() / n;
        let var = e.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 / n.sqrt(), "{case}: mean {mean}");
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n).sqrt(), "{case}: var {var}");
    }
}

/// Complementary error function, W. J. Cody's rational Chebyshev fit as
/// popularised in Numerical Recipes (relative error below 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

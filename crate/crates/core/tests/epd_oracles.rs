//! The EP density integrates to one and the sampler follows it, both
//! checked against adaptive quadrature.

use mixep::rng::{stream_rng, Stream};
use mixep::{ep_sample, EPParams};
use mixep_oracles::{ep_cdf_sorted, ep_normalizer_by_quadrature, ks_statistic};

const SHAPES: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];
const RATES: [f64; 3] = [0.1, 1.0, 10.0];

#[test]
fn density_integrates_to_one_on_grid() {
    for &p in &SHAPES {
        for &eta in &RATES {
            let params = EPParams::new(p, eta).unwrap();
            let mass = params.log_normalizer().exp() * ep_normalizer_by_quadrature(p, eta);
            assert!((mass - 1.0).abs() <= 1e-8, "p={p} eta={eta}: mass {mass}");
        }
    }
}

#[test]
fn density_matches_quadrature_normalized_kernel() {
    for &p in &SHAPES {
        for &eta in &RATES {
            let params = EPParams::new(p, eta).unwrap();
            let z = ep_normalizer_by_quadrature(p, eta);
            for e in [-3.0, -0.7, 0.0, 0.2, 1.9] {
                let reference = (-eta * f64::abs(e).powf(p)).exp() / z;
                let got = params.density(e);
                assert!(
                    (got - reference).abs() <= 1e-10 * reference.max(1e-300),
                    "p={p} eta={eta} e={e}"
                );
            }
        }
    }
}

#[test]
fn sampler_passes_ks_at_the_001_level() {
    let n = 100_000;
    let critical = 1.9495 / (n as f64).sqrt();
    for (i, &p) in SHAPES.iter().enumerate() {
        for (j, &eta) in RATES.iter().enumerate() {
            let mut rng = stream_rng(1000 + (i * 10 + j) as u64, Stream::Data);
            let draws = ep_sample(&EPParams::new(p, eta).unwrap(), n, &mut rng);
            let d = ks_statistic(&draws, |sorted| ep_cdf_sorted(sorted, p, eta));
            assert!(d < critical, "p={p} eta={eta}: KS {d} >= {critical}");
        }
    }
}

#[test]
fn single_precision_density_tracks_double() {
    for &p in &SHAPES {
        let d64 = EPParams::new(p, 1.0).unwrap();
        let d32 = EPParams::new(p as f32, 1.0f32).unwrap();
        for e in [-2.0f64, -0.5, 0.0, 0.25, 1.5] {
            let a = d64.log_density(e);
            let b = f64::from(d32.log_density(e as f32));
            assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0), "p={p} e={e}");
        }
    }
}

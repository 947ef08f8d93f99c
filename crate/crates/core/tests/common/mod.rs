#![allow(dead_code)]

use mixep::{ep_sample, Component, Dataset, EPParams, MixtureModel};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Rows of `data` as owned vectors.
pub fn rows(data: &Dataset) -> Vec<Vec<f64>> {
    (0..data.n()).map(|i| data.row(i).to_vec()).collect()
}

/// Random K-component model with intercept + (d − 1) slopes, weights
/// bounded away from zero and rates in [0.3, 3].
pub fn random_model<R: Rng>(rng: &mut R, k: usize, d: usize, p: f64) -> MixtureModel {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = raw.iter().sum();
    let comps = raw
        .iter()
        .map(|w| Component {
            pi: w / total,
            beta: (0..d).map(|_| rng.random_range(-3.0..3.0)).collect(),
            eta: rng.random_range(0.3..3.0),
            p,
        })
        .collect();
    MixtureModel::new(comps).expect("valid random model")
}

/// Draws n observations from `model` with standard normal covariates.
pub fn sample_data<R: Rng>(rng: &mut R, model: &MixtureModel, n: usize) -> Dataset {
    let d = model.d();
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = model.k() - 1;
        for (k, c) in model.components().iter().enumerate() {
            acc += c.pi;
            if u < acc {
                pick = k;
                break;
            }
        }
        let c = &model.components()[pick];
        let mut row = vec![1.0];
        row.extend((1..d).map(|_| Distribution::<f64>::sample(&StandardNormal, rng)));
        let e = ep_sample(&EPParams::new(c.p, c.eta).unwrap(), 1, rng)[0];
        y.push(row.iter().zip(&c.beta).map(|(a, b)| a * b).sum::<f64>() + e);
        x.extend(row);
    }
    Dataset::new(x, y, d).expect("valid dataset")
}

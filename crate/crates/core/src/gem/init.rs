use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::weighted_least_squares;
use crate::model::{penalized_log_likelihood, Component, Dataset, MixtureModel};
use crate::scalar::Scalar;

use super::config::FitConfig;
use super::steps::{gem_iterate, GRAM_RIDGE, MAX_ETA};

/// Best of `cfg.n_starts` random-partition starts.
///
/// Each start shuffles a fresh `0..n` (so start j depends only on the
/// random source), cuts it into `k_max` groups of near-equal size, fits
/// ordinary least squares per group, sets η from the hard assignment,
/// uses uniform weights and runs `cfg.init_iters` GEM iterations. The
/// start with the highest penalized objective wins (the earliest on ties).
/// With a p grid the first candidate is used.
pub fn initialize<T: Scalar, R: Rng + ?Sized>(
    data: &Dataset<T>,
    cfg: &FitConfig<T>,
    rng: &mut R,
) -> Result<MixtureModel<T>> {
    cfg.validate()?;
    let k = cfg.k_max;
    let needed = k * (data.d() + 1);
    if data.n() < needed {
        return Err(Error::InsufficientData {
            needed,
            found: data.n(),
        });
    }
    let p = cfg.p_policy.candidates()[0];
    let pen = cfg.penalty_for(data.d());

    let mut best: Option<(T, MixtureModel<T>)> = None;
    let mut last_err = None;
    for _ in 0..cfg.n_starts {
        let mut order: Vec<usize> = (0..data.n()).collect();
        order.shuffle(rng);
        let start = partition_start(data, &order, k, p, cfg.residual_floor).and_then(|mut model| {
            for _ in 0..cfg.init_iters {
                model = gem_iterate(&model, data, cfg)?.model;
            }
            let objective = penalized_log_likelihood(&model, data, &pen)?;
            Ok((objective, model))
        });
        match start {
            Ok((objective, model)) => {
                if best.as_ref().is_none_or(|(b, _)| objective > *b) {
                    best = Some((objective, model));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some((_, model)), _) => Ok(model),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("n_starts >= 1"),
    }
}

fn partition_start<T: Scalar>(data: &Dataset<T>, order: &[usize], k: usize, p: T, floor: T) -> Result<MixtureModel<T>> {
    let n = order.len();
    let pi = T::one() / T::from_usize_lossy(k);
    let mut components = Vec::with_capacity(k);
    for g in 0..k {
        let mut members = order[g * n / k..(g + 1) * n / k].to_vec();
        members.sort_unstable();
        let beta = weighted_least_squares(
            data.x(),
            data.y(),
            data.d(),
            members.iter().map(|&i| (i, T::one())),
            T::lit(GRAM_RIDGE),
        )
        .ok_or(Error::Singular { component: g })?;
        let spread: T = members
            .iter()
            .map(|&i| data.residual(i, &beta).abs().max(floor).powf(p))
            .sum();
        let eta = (T::from_usize_lossy(members.len()) / (p * spread)).min(T::lit(MAX_ETA));
        components.push(Component { pi, beta, eta, p });
    }
    Ok(MixtureModel::from_components_unchecked(components))
}

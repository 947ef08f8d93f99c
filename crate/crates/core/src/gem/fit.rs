use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{observed_log_likelihood, penalized_log_likelihood, Dataset, MixtureModel};
use crate::rng::{stream_rng, Stream};
use crate::scalar::Scalar;

use super::config::FitConfig;
use super::init::initialize;
use super::steps::{e_step, gem_iterate, Responsibilities};

#[derive(Clone, Debug)]
pub struct FitResult<T = f64> {
    pub model: MixtureModel<T>,
    /// Responsibilities of the final model.
    pub responsibilities: Responsibilities<T>,
    /// Penalized objective of the starting model followed by one value per
    /// iteration.
    pub trace: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Scalar> FitResult<T> {
    pub fn objective(&self) -> T {
        *self.trace.last().expect("trace holds at least the starting value")
    }
}

/// Iterates GEM from `model` until the relative change of the penalized
/// objective drops below `cfg.tol` or `cfg.max_iter` iterations ran.
pub fn gem_run<T: Scalar>(model: MixtureModel<T>, data: &Dataset<T>, cfg: &FitConfig<T>) -> Result<FitResult<T>> {
    cfg.validate()?;
    let pen = cfg.penalty_for(data.d());
    let mut model = model;
    let mut trace = vec![penalized_log_likelihood(&model, data, &pen)?];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let step = gem_iterate(&model, data, cfg)?;
        iterations += 1;
        let prev = *trace.last().expect("non-empty trace");
        trace.push(step.objective);
        model = step.model;
        if (step.objective - prev).abs() <= cfg.tol * prev.abs() {
            converged = true;
            break;
        }
    }
    let responsibilities = e_step(&model, data)?;
    Ok(FitResult {
        model,
        responsibilities,
        trace,
        converged,
        iterations,
    })
}

/// Full fit: random-start initialization and GEM, repeated for every
/// candidate shape when `cfg.p_policy` is a grid. The candidate with the
/// highest final penalized objective is returned (earliest on ties).
/// Candidates that fail are skipped; the first error is returned if all do.
pub fn gem_fit<T: Scalar>(data: &Dataset<T>, cfg: &FitConfig<T>) -> Result<FitResult<T>> {
    cfg.validate()?;
    let mut best: Option<FitResult<T>> = None;
    let mut first_err = None;
    for p in cfg.p_policy.candidates() {
        let cfg_p = cfg.with_p(p);
        let mut rng = stream_rng(cfg.seed, Stream::Init);
        let fit = initialize(data, &cfg_p, &mut rng).and_then(|start| gem_run(start, data, &cfg_p));
        match fit {
            Ok(fit) => {
                if best.as_ref().is_none_or(|b| fit.objective() > b.objective()) {
                    best = Some(fit);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one candidate p"))
}

/// BIC = -2·loglik + (K·D + K − 1)·ln n.
pub fn bic<T: Scalar>(log_likelihood: T, k: usize, d_k: usize, n: usize) -> T {
    let params = T::from_usize_lossy(k * d_k + k - 1);
    -T::lit(2.0) * log_likelihood + params * T::from_usize_lossy(n).ln()
}

/// Outcome of one λ candidate.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaCandidate<T = f64> {
    pub lambda: T,
    pub k: Option<usize>,
    pub log_likelihood: Option<T>,
    pub penalized: Option<T>,
    pub bic: Option<T>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct LambdaSelection<T = f64> {
    pub lambda: T,
    pub bic: T,
    pub fit: FitResult<T>,
    pub candidates: Vec<LambdaCandidate<T>>,
}

/// Fits every λ in `grid` and keeps the lowest BIC of the unpenalized
/// observed log-likelihood (earliest on ties).
pub fn select_lambda<T: Scalar>(data: &Dataset<T>, cfg: &FitConfig<T>, grid: &[T]) -> Result<LambdaSelection<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("lambda grid is empty".into()));
    }
    let d_k = cfg.penalty_for(data.d()).d_k;
    let mut best: Option<(T, T, FitResult<T>)> = None;
    let mut candidates = Vec::with_capacity(grid.len());
    let mut first_err = None;
    for &lambda in grid {
        let outcome = gem_fit(data, &cfg.with_lambda(lambda)).and_then(|fit| {
            let ll = observed_log_likelihood(&fit.model, data)?;
            Ok((ll, fit))
        });
        match outcome {
            Ok((ll, fit)) => {
                let score = bic(ll, fit.model.k(), d_k, data.n());
                candidates.push(LambdaCandidate {
                    lambda,
                    k: Some(fit.model.k()),
                    log_likelihood: Some(ll),
                    penalized: Some(fit.objective()),
                    bic: Some(score),
                    error: None,
                });
                if best.as_ref().is_none_or(|(_, b, _)| score < *b) {
                    best = Some((lambda, score, fit));
                }
            }
            Err(e) => {
                candidates.push(LambdaCandidate {
                    lambda,
                    k: None,
                    log_likelihood: None,
                    penalized: None,
                    bic: None,
                    error: Some(e.to_string()),
                });
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some((lambda, bic, fit)) => Ok(LambdaSelection {
            lambda,
            bic,
            fit,
            candidates,
        }),
        None => Err(first_err.expect("non-empty grid")),
    }
}

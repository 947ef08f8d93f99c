//! Penalized generalized EM for EP mixtures of regressions.
//!
//! One iteration is: E-step (Bayes' rule responsibilities), penalized
//! mixing-weight update with pruning, one MM step for every β_k, then the
//! closed-form η_k update at the new β_k.

mod config;
mod fit;
mod init;
mod steps;

pub use config::{FitConfig, PPolicy};
pub use fit::{bic, gem_fit, gem_run, select_lambda, FitResult, LambdaCandidate, LambdaSelection};
pub use init::initialize;
pub use steps::{
    e_step, gem_iterate, m_step_beta, m_step_eta, m_step_pi, mm_weights, IterationOutcome, Responsibilities,
    GRAM_RIDGE, MAX_ETA,
};

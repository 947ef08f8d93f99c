use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PenaltyConfig;
use crate::scalar::Scalar;

/// How the EP shape is chosen. The shape is always shared by all components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PPolicy<T = f64> {
    Fixed(T),
    /// Fit once per candidate and keep the best penalized objective.
    Grid(Vec<T>),
}

impl<T: Scalar> PPolicy<T> {
    pub fn candidates(&self) -> Vec<T> {
        match self {
            PPolicy::Fixed(p) => vec![*p],
            PPolicy::Grid(g) => g.clone(),
        }
    }

    pub fn default_grid() -> Self {
        PPolicy::Grid(vec![T::one(), T::lit(1.5), T::lit(2.0)])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig<T = f64> {
    /// Number of components the fit starts from.
    pub k_max: usize,
    pub lambda: T,
    pub epsilon: T,
    pub p_policy: PPolicy<T>,
    pub max_iter: usize,
    /// Relative change of the penalized objective that counts as converged.
    pub tol: T,
    pub n_starts: usize,
    /// GEM iterations run on each random start before picking the best.
    pub init_iters: usize,
    /// Lower bound δ on |residual| in the MM weights and the η update.
    pub residual_floor: T,
    pub seed: u64,
    /// Free parameters per component; `None` means d + 1.
    pub free_params: Option<usize>,
}

impl<T: Scalar> Default for FitConfig<T> {
    fn default() -> Self {
        Self {
            k_max: 2,
            lambda: T::zero(),
            epsilon: T::lit(1e-5),
            p_policy: PPolicy::default_grid(),
            max_iter: 500,
            tol: T::lit(1e-8),
            n_starts: 10,
            init_iters: 5,
            residual_floor: T::lit(1e-10),
            seed: 0,
            free_params: None,
        }
    }
}

impl<T: Scalar> FitConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.k_max == 0 {
            return bad("k_max must be >= 1".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be >= 1".into());
        }
        if self.n_starts == 0 {
            return bad("n_starts must be >= 1".into());
        }
        if !(self.tol > T::zero()) {
            return bad(format!("tol must be > 0, got {}", self.tol));
        }
        if !(self.residual_floor > T::zero()) {
            return bad(format!("residual_floor must be > 0, got {}", self.residual_floor));
        }
        if self.free_params == Some(0) {
            return bad("free_params must be >= 1".into());
        }
        let candidates = self.p_policy.candidates();
        if candidates.is_empty() {
            return bad("p grid is empty".into());
        }
        if let Some(p) = candidates.iter().find(|p| !(**p > T::zero()) || !p.is_finite()) {
            return bad(format!("every candidate p must be > 0, got {p}"));
        }
        PenaltyConfig::new(self.lambda, self.epsilon, 1)?;
        Ok(())
    }

    pub fn penalty_for(&self, d: usize) -> PenaltyConfig<T> {
        PenaltyConfig {
            lambda: self.lambda,
            epsilon: self.epsilon,
            d_k: self.free_params.unwrap_or(d + 1),
        }
    }

    pub fn with_p(&self, p: T) -> Self {
        Self {
            p_policy: PPolicy::Fixed(p),
            ..self.clone()
        }
    }

    pub fn with_lambda(&self, lambda: T) -> Self {
        Self { lambda, ..self.clone() }
    }
}

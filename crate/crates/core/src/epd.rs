//! Exponential power (EP) distribution with location 0:
//!
//! f(e; p, η) = p η^{1/p} / (2 Γ(1/p)) · exp(-η |e|^p)
//!
//! Laplace with rate η at p = 1, normal with variance 1/(2η) at p = 2,
//! heavier than normal tails for p < 2.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
pub use crate::special::log_gamma;

/// Shape `p` and rate `eta` of a zero-mean EP distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EPParams<T = f64> {
    p: T,
    eta: T,
}

impl<T: Scalar> EPParams<T> {
    pub fn new(p: T, eta: T) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("EP shape p must be > 0, got {p}")));
        }
        if !(eta > T::zero()) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("EP rate eta must be > 0, got {eta}")));
        }
        Ok(Self { p, eta })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    /// ln[p η^{1/p} / (2Γ(1/p))]
    pub fn log_normalizer(&self) -> T {
        log_normalizer(self.p, self.eta)
    }

    pub fn log_density(&self, e: T) -> T {
        self.log_normalizer() - self.eta * e.abs().powf(self.p)
    }

    pub fn density(&self, e: T) -> T {
        self.log_density(e).exp()
    }
}

/// Log normalizing constant for already validated `p, eta > 0`.
pub(crate) fn log_normalizer<T: Scalar>(p: T, eta: T) -> T {
    let lg = log_gamma(p.recip()).expect("1/p is positive for validated p");
    p.ln() + eta.ln() / p - T::LN_2() - lg
}

pub fn ep_log_density<T: Scalar>(e: T, params: &EPParams<T>) -> T {
    params.log_density(e)
}

pub fn ep_density<T: Scalar>(e: T, params: &EPParams<T>) -> T {
    params.density(e)
}

/// Draws `count` i.i.d. EP variates.
///
/// With G ~ Gamma(shape 1/p, rate η), G^{1/p} has the law of |e|; an
/// independent fair sign completes the draw. Each variate consumes one
/// Gamma draw followed by one sign bit from `rng`.
pub fn ep_sample<T: Scalar, R: Rng + ?Sized>(params: &EPParams<T>, count: usize, rng: &mut R) -> Vec<T> {
    let p = params.p.to_f64_lossy();
    let eta = params.eta.to_f64_lossy();
    let gamma = Gamma::new(1.0 / p, 1.0 / eta).expect("validated EP parameters");
    (0..count)
        .map(|_| {
            let g: f64 = gamma.sample(rng);
            let magnitude = g.powf(1.0 / p);
            let e = if rng.random::<bool>() { magnitude } else { -magnitude };
            T::lit(e)
        })
        .collect()
}

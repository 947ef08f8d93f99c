//! Constrained maximizer of the penalized mixing-weight objective
//!
//! Q(π) = Σ_k N_k ln π_k − Σ_k c_k ln(1 + π_k/ε),  Σ_k π_k = 1,
//!
//! by damped Newton iterations on the Lagrange system
//! N_k/π_k − c_k/(ε + π_k) = μ, Σ π_k = 1.

use nalgebra::{DMatrix, DVector};

fn residual(pi: &[f64], mu: f64, counts: &[f64], c: &[f64], eps: f64) -> DVector<f64> {
    let k = pi.len();
    let mut f = DVector::zeros(k + 1);
    for j in 0..k {
        f[j] = (counts[j] / pi[j] - c[j] / (eps + pi[j]) - mu) / counts.iter().sum::<f64>();
    }
    f[k] = pi.iter().sum::<f64>() - 1.0;
    f
}

/// Solves the Lagrange system for all listed components. `c[k]` is
/// nλD_k. Components with N_k < c_k end with weights of order ε.
pub fn penalized_weights(counts: &[f64], c: &[f64], eps: f64) -> Vec<f64> {
    let k = counts.len();
    let excess: f64 = counts.iter().zip(c).map(|(n, c)| (n - c).max(0.0)).sum();
    let mut pi: Vec<f64> = counts
        .iter()
        .zip(c)
        .map(|(&n, &c)| {
            if n > c {
                (n - c) / excess
            } else {
                n * eps / (c - n + n * eps)
            }
        })
        .collect();
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= s);
    let mut mu = excess.max(1e-300);
    let total: f64 = counts.iter().sum();

    for _ in 0..500 {
        let f = residual(&pi, mu, counts, c, eps);
        let norm = f.norm();
        if norm < 1e-15 {
            break;
        }
        let mut jac = DMatrix::zeros(k + 1, k + 1);
        for j in 0..k {
            jac[(j, j)] = (-counts[j] / (pi[j] * pi[j]) + c[j] / ((eps + pi[j]) * (eps + pi[j]))) / total;
            jac[(j, k)] = -1.0 / total;
            jac[(k, j)] = 1.0;
        }
        let Some(step) = jac.lu().solve(&(-f)) else {
            break;
        };
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = (0..k).map(|j| pi[j] + t * step[j]).collect();
            let trial_mu = mu + t * step[k];
            if trial.iter().all(|&p| p > 0.0) && residual(&trial, trial_mu, counts, c, eps).norm() < norm {
                pi = trial;
                mu = trial_mu;
                break;
            }
            t *= 0.5;
            if t < 1e-20 {
                return pi;
            }
        }
    }
    pi
}

/// Q(π) for reporting and comparisons.
pub fn objective(pi: &[f64], counts: &[f64], c: &[f64], eps: f64) -> f64 {
    pi.iter()
        .zip(counts)
        .zip(c)
        .map(|((&p, &n), &c)| n * p.ln() - c * (p / eps).ln_1p())
        .sum()
}

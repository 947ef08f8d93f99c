//! Textbook EM for a mixture of Gaussian linear regressions, written on
//! `nalgebra` dense matrices.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixReg {
    pub pi: Vec<f64>,
    pub beta: Vec<Vec<f64>>,
    /// Error variances σ²_k.
    pub sigma2: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EmIteration {
    /// Responsibilities of the starting model, `gamma[i][k]`.
    pub gamma: Vec<Vec<f64>>,
    /// Parameters after the M-step.
    pub model: GaussianMixReg,
}

/// One EM iteration: posterior probabilities, then π_k = N_k/n,
/// β_k = (XᵀΓ_kX)⁻¹XᵀΓ_ky and σ²_k = Σ_i γ_ik r_ik² / N_k.
pub fn em_iteration(rows: &[Vec<f64>], y: &[f64], current: &GaussianMixReg) -> EmIteration {
    let n = rows.len();
    let d = rows[0].len();
    let k = current.pi.len();
    let x = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);

    let gamma: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let logs: Vec<f64> = (0..k)
                .map(|c| {
                    let mean = x.row(i).transpose().dot(&DVector::from_column_slice(&current.beta[c]));
                    let r = y[i] - mean;
                    let s2 = current.sigma2[c];
                    current.pi[c].ln() - 0.5 * (2.0 * std::f64::consts::PI * s2).ln() - r * r / (2.0 * s2)
                })
                .collect();
            let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = logs.iter().map(|l| (l - m).exp()).sum();
            logs.iter().map(|l| (l - m).exp() / z).collect()
        })
        .collect();

    let mut model = GaussianMixReg {
        pi: Vec::with_capacity(k),
        beta: Vec::with_capacity(k),
        sigma2: Vec::with_capacity(k),
    };
    for c in 0..k {
        let g = DVector::from_iterator(n, gamma.iter().map(|row| row[c]));
        let nk = g.sum();
        let xw = DMatrix::from_fn(n, d, |i, j| x[(i, j)] * g[i]);
        let gram = x.transpose() * &xw;
        let rhs = xw.transpose() * &yv;
        let beta = gram.lu().solve(&rhs).expect("non-singular weighted Gram matrix");
        let resid = &yv - &x * &beta;
        let ss: f64 = resid.iter().zip(g.iter()).map(|(r, w)| w * r * r).sum();
        model.pi.push(nk / n as f64);
        model.beta.push(beta.iter().copied().collect());
        model.sigma2.push(ss / nk);
    }
    EmIteration { gamma, model }
}

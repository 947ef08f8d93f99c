//! Label alignment and replicate aggregation (MSE and bias per coefficient).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest K accepted by [`align_labels`]; the search visits all K!
/// permutations.
pub const MAX_ALIGN_COMPONENTS: usize = 8;

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum()
}

/// Cost Σ_k ‖estimated[perm[k]] − truth[k]‖².
pub fn alignment_cost<T: Scalar>(estimated: &[Vec<T>], truth: &[Vec<T>], perm: &[usize]) -> T {
    truth
        .iter()
        .zip(perm)
        .map(|(t, &j)| squared_distance(&estimated[j], t))
        .sum()
}

/// Permutation `perm` minimizing Σ_k ‖estimated[perm[k]] − truth[k]‖²,
/// by exhaustive search in lexicographic order; the lexicographically
/// smallest permutation wins ties.
pub fn align_labels<T: Scalar>(estimated: &[Vec<T>], truth: &[Vec<T>]) -> Result<Vec<usize>> {
    if estimated.len() != truth.len() {
        return Err(Error::SizeMismatch {
            left: estimated.len(),
            right: truth.len(),
        });
    }
    let k = truth.len();
    if k > MAX_ALIGN_COMPONENTS {
        return Err(Error::InvalidParameter(format!(
            "label alignment supports at most {MAX_ALIGN_COMPONENTS} components, got {k}"
        )));
    }
    if let Some(t) = truth.first() {
        let d = t.len();
        if let Some(bad) = estimated.iter().chain(truth).find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                context: "coefficient vector",
                expected: d,
                found: bad.len(),
            });
        }
    }
    // cost[k][j] = ‖estimated[j] − truth[k]‖²
    let cost: Vec<Vec<T>> = truth
        .iter()
        .map(|t| estimated.iter().map(|e| squared_distance(e, t)).collect())
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = perm.clone();
    let mut best_cost = total(&cost, &perm);
    while next_permutation(&mut perm) {
        let c = total(&cost, &perm);
        if c < best_cost {
            best_cost = c;
            best.copy_from_slice(&perm);
        }
    }
    Ok(best)
}

fn total<T: Scalar>(cost: &[Vec<T>], perm: &[usize]) -> T {
    cost.iter().zip(perm).map(|(row, &j)| row[j]).sum()
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Reorders `estimated` so entry k corresponds to truth component k.
pub fn apply_alignment<T: Clone>(estimated: &[T], perm: &[usize]) -> Vec<T> {
    perm.iter().map(|&j| estimated[j].clone()).collect()
}

/// Per-coefficient summary over replicates, coefficients listed component
/// by component (`beta{k}{j}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateReport<T = f64> {
    pub coefficients: Vec<String>,
    pub truth: Vec<T>,
    pub mse: Vec<T>,
    pub bias: Vec<T>,
    pub replicate_count: usize,
    pub failure_count: usize,
}

/// MSE and bias of aligned estimates. `replicates[r][k]` is the coefficient
/// vector matched to `truth[k]` in replicate r.
pub fn aggregate<T: Scalar>(replicates: &[Vec<Vec<T>>], truth: &[Vec<T>]) -> Result<ReplicateReport<T>> {
    if replicates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let flat_truth: Vec<T> = truth.iter().flatten().copied().collect();
    let m = flat_truth.len();
    let mut sum_err = vec![T::zero(); m];
    let mut sum_sq = vec![T::zero(); m];
    for rep in replicates {
        if rep.len() != truth.len() {
            return Err(Error::SizeMismatch {
                left: rep.len(),
                right: truth.len(),
            });
        }
        let flat: Vec<T> = rep.iter().flatten().copied().collect();
        if flat.len() != m {
            return Err(Error::DimensionMismatch {
                context: "replicate coefficients",
                expected: m,
                found: flat.len(),
            });
        }
        for j in 0..m {
            let e = flat[j] - flat_truth[j];
            sum_err[j] += e;
            sum_sq[j] += e * e;
        }
    }
    let r = T::from_usize_lossy(replicates.len());
    let coefficients = truth
        .iter()
        .enumerate()
        .flat_map(|(k, b)| (0..b.len()).map(move |j| format!("beta{k}{j}")))
        .collect();
    Ok(ReplicateReport {
        coefficients,
        truth: flat_truth,
        mse: sum_sq.into_iter().map(|s| s / r).collect(),
        bias: sum_err.into_iter().map(|s| s / r).collect(),
        replicate_count: replicates.len(),
        failure_count: 0,
    })
}

//! Weighted least absolute deviations by vertex enumeration: a minimizer of
//! Σ w_i |y_i − x_iᵀβ| interpolates d observations, so trying every d-subset
//! finds the global minimum.

use nalgebra::{DMatrix, DVector};

/// Returns (β, objective) of the best interpolating subset.
pub fn weighted_lad(rows: &[Vec<f64>], y: &[f64], w: &[f64]) -> (Vec<f64>, f64) {
    let d = rows[0].len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let a = DMatrix::from_fn(d, d, |r, c| rows[subset[r]][c]);
        let b = DVector::from_iterator(d, subset.iter().map(|&i| y[i]));
        if let Some(beta) = a.lu().solve(&b) {
            let objective: f64 = rows
                .iter()
                .zip(y)
                .zip(w)
                .map(|((x, yi), wi)| wi * (yi - x.iter().zip(beta.iter()).map(|(a, b)| a * b).sum::<f64>()).abs())
                .sum();
            if best.as_ref().is_none_or(|(_, o)| objective < *o) {
                best = Some((beta.iter().copied().collect(), objective));
            }
        }
        if !next_combination(&mut subset, rows.len()) {
            break;
        }
    }
    best.expect("at least one non-singular subset")
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

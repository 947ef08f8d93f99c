//! Small dense linear algebra for the d×d normal equations.
//!
//! Matrices are row-major `&[T]` of length `d * d`.

use crate::scalar::Scalar;

/// Solves `a x = b` for symmetric positive (semi)definite `a`.
///
/// Tries a Cholesky factorization first and falls back to Gaussian
/// elimination with partial pivoting when a pivot is not positive. Returns
/// `None` if the system is numerically singular or the solution is not
/// finite.
pub fn solve_symmetric<T: Scalar>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let d = b.len();
    debug_assert_eq!(a.len(), d * d);
    cholesky_solve(a, b)
        .or_else(|| lu_solve(a, b))
        .filter(|x| x.iter().all(|v| v.is_finite()))
}

fn cholesky_solve<T: Scalar>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let d = b.len();
    let mut l = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return None;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    let mut z = b.to_vec();
    for i in 0..d {
        let mut s = z[i];
        for k in 0..i {
            s -= l[i * d + k] * z[k];
        }
        z[i] = s / l[i * d + i];
    }
    for i in (0..d).rev() {
        let mut s = z[i];
        for k in i + 1..d {
            s -= l[k * d + i] * z[k];
        }
        z[i] = s / l[i * d + i];
    }
    Some(z)
}

fn lu_solve<T: Scalar>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let d = b.len();
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tiny = scale * T::epsilon() * T::from_usize_lossy(d.max(1));
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&r1, &r2| {
                m[r1 * d + col]
                    .abs()
                    .partial_cmp(&m[r2 * d + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if !(m[pivot * d + col].abs() > tiny) {
            return None;
        }
        if pivot != col {
            for k in 0..d {
                m.swap(col * d + k, pivot * d + k);
            }
            x.swap(col, pivot);
        }
        for r in col + 1..d {
            let f = m[r * d + col] / m[col * d + col];
            if f == T::zero() {
                continue;
            }
            for k in col..d {
                let v = m[col * d + k];
                m[r * d + k] -= f * v;
            }
            let v = x[col];
            x[r] -= f * v;
        }
    }
    for i in (0..d).rev() {
        let mut s = x[i];
        for k in i + 1..d {
            s -= m[i * d + k] * x[k];
        }
        x[i] = s / m[i * d + i];
    }
    Some(x)
}

/// Weighted least squares `argmin Σ w_i (y_i - x_i'β)²` over the rows in
/// `rows`, via the normal equations. If those cannot be solved, `ridge·I`
/// is added to the Gram matrix and the solve retried, so well-posed
/// problems get the exact solution and only degenerate ones are biased.
pub fn weighted_least_squares<T: Scalar>(
    x: &[T],
    y: &[T],
    d: usize,
    rows: impl IntoIterator<Item = (usize, T)>,
    ridge: T,
) -> Option<Vec<T>> {
    let mut gram = vec![T::zero(); d * d];
    let mut rhs = vec![T::zero(); d];
    for (i, w) in rows {
        let xi = &x[i * d..(i + 1) * d];
        for a in 0..d {
            let wa = w * xi[a];
            rhs[a] += wa * y[i];
            for b in 0..=a {
                gram[a * d + b] += wa * xi[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            gram[b * d + a] = gram[a * d + b];
        }
    }
    solve_symmetric(&gram, &rhs).or_else(|| {
        for a in 0..d {
            gram[a * d + a] += ridge;
        }
        solve_symmetric(&gram, &rhs)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_system() {
        let a = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let x_true = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * x_true[j]).sum()).collect();
        let x = solve_symmetric(&a, &b).unwrap();
        for (got, want) in x.iter().zip(x_true) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_falls_back_to_pivoting() {
        let a = [0.0, 1.0, 1.0, 0.0];
        let x = solve_symmetric(&a, &[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_is_none() {
        let a = [1.0, 2.0, 2.0, 4.0];
        assert!(solve_symmetric(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn ridge_rescues_collinear_design() {
        // Two identical columns.
        let x = [1.0_f64, 1.0, 2.0, 2.0, 3.0, 3.0];
        let y = [1.0, 2.0, 3.0];
        let rows = (0..3).map(|i| (i, 1.0));
        let beta = weighted_least_squares(&x, &y, 2, rows, 1e-10).unwrap();
        assert!(beta.iter().all(|b| b.is_finite()));
    }

    #[test]
    fn line_through_two_points() {
        let x = [1.0_f64, 0.0, 1.0, 1.0];
        let y = [0.0, 1.0];
        let beta = weighted_least_squares(&x, &y, 2, [(0, 1.0), (1, 1.0)], 0.0).unwrap();
        assert!((beta[0]).abs() < 1e-14 && (beta[1] - 1.0).abs() < 1e-14);
    }
}

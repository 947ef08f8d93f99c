use crate::error::{Error, Result};
use crate::linalg::weighted_least_squares;
use crate::model::{log_sum_exp, penalized_log_likelihood, Component, Dataset, MixtureModel};
use crate::scalar::Scalar;

use super::config::FitConfig;

/// Upper bound on any fitted η_k.
pub const MAX_ETA: f64 = 1e12;
/// Multiple of the identity added to a weighted Gram matrix whose plain
/// solve failed.
pub const GRAM_RIDGE: f64 = 1e-10;

/// Row-stochastic n×K matrix of posterior component probabilities γ_ik.
#[derive(Clone, Debug, PartialEq)]
pub struct Responsibilities<T = f64> {
    gamma: Vec<T>,
    n: usize,
    k: usize,
}

impl<T: Scalar> Responsibilities<T> {
    /// Checks entries lie in [0, 1] and rows sum to one.
    pub fn new(gamma: Vec<T>, n: usize, k: usize) -> Result<Self> {
        if gamma.len() != n * k || k == 0 {
            return Err(Error::DimensionMismatch {
                context: "responsibilities",
                expected: n * k,
                found: gamma.len(),
            });
        }
        let tol = T::unit_sum_tolerance();
        for (i, row) in gamma.chunks(k).enumerate() {
            if row.iter().any(|g| !(*g >= T::zero() && *g <= T::one())) {
                return Err(Error::InvalidParameter(format!("responsibility row {i} leaves [0, 1]")));
            }
            let s: T = row.iter().copied().sum();
            if (s - T::one()).abs() > tol {
                return Err(Error::InvalidParameter(format!("responsibility row {i} sums to {s}")));
            }
        }
        Ok(Self { gamma, n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> T {
        self.gamma[i * self.k + k]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.gamma[i * self.k..(i + 1) * self.k]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.gamma
    }

    /// N_k = Σ_i γ_ik
    pub fn column_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.k];
        for row in self.gamma.chunks(self.k) {
            for (s, &g) in sums.iter_mut().zip(row) {
                *s += g;
            }
        }
        sums
    }

    /// Index of the most probable component for each observation.
    pub fn hard_assignments(&self) -> Vec<usize> {
        self.gamma
            .chunks(self.k)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold(
                        (0, T::neg_infinity()),
                        |best, (j, &g)| if g > best.1 { (j, g) } else { best },
                    )
                    .0
            })
            .collect()
    }
}

/// γ_ik = π_k f_k(r_ik) / Σ_l π_l f_l(r_il), in log space.
pub fn e_step<T: Scalar>(model: &MixtureModel<T>, data: &Dataset<T>) -> Result<Responsibilities<T>> {
    model.check_data(data)?;
    let k = model.k();
    let mut gamma = model.log_joint(data);
    for (i, row) in gamma.chunks_mut(k).enumerate() {
        let lse = log_sum_exp(row);
        if !lse.is_finite() {
            return Err(Error::DegenerateRow { row: i });
        }
        for g in row.iter_mut() {
            *g = (*g - lse).exp();
        }
    }
    Ok(Responsibilities { gamma, n: data.n(), k })
}

/// Penalized mixing-weight update.
///
/// Component k is pruned (weight exactly 0) when N_k/n ≤ λD_k. The
/// survivors receive the maximizer of
/// Σ_k N_k ln π_k − nλ Σ_k D_k ln((ε+π_k)/ε) subject to Σ π_k = 1, which
/// tends to (N_k/n − λD_k) / Σ_l (N_l/n − λD_l) as ε → 0 and equals N_k/n
/// when λ = 0.
pub fn m_step_pi<T: Scalar>(resp: &Responsibilities<T>, cfg: &FitConfig<T>, d_k: &[usize]) -> Result<Vec<T>> {
    if d_k.len() != resp.k() {
        return Err(Error::DimensionMismatch {
            context: "free-parameter counts",
            expected: resp.k(),
            found: d_k.len(),
        });
    }
    let n = T::from_usize_lossy(resp.n());
    let counts = resp.column_sums();
    let thresholds: Vec<T> = d_k.iter().map(|&d| n * cfg.lambda * T::from_usize_lossy(d)).collect();
    let survives: Vec<bool> = counts.iter().zip(&thresholds).map(|(&nk, &c)| nk > c).collect();
    if !survives.iter().any(|&s| s) {
        return Err(Error::AllPruned {
            lambda: cfg.lambda.to_f64_lossy(),
        });
    }

    let mut pis = vec![T::zero(); resp.k()];
    if cfg.lambda == T::zero() {
        let total: T = counts.iter().zip(&survives).filter(|(_, &s)| s).map(|(&c, _)| c).sum();
        for ((pi, &nk), &s) in pis.iter_mut().zip(&counts).zip(&survives) {
            if s {
                *pi = nk / total;
            }
        }
        return Ok(pis);
    }

    let active: Vec<(usize, T, T)> = (0..resp.k())
        .filter(|&k| survives[k])
        .map(|k| (k, counts[k], thresholds[k]))
        .collect();
    let eps = cfg.epsilon;
    let weight_at = |mu: T| -> T { active.iter().map(|&(_, nk, c)| stationary_weight(nk, c, eps, mu)).sum() };

    // Σπ(μ) is decreasing in μ and Σπ(μ0) ≥ 1 at the ε → 0 multiplier.
    let mu0: T = active.iter().map(|&(_, nk, c)| nk - c).sum();
    let mut lo = mu0;
    let mut hi = mu0;
    while weight_at(hi) > T::one() {
        lo = hi;
        hi *= T::lit(2.0);
    }
    for _ in 0..200 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if weight_at(mid) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = lo + (hi - lo) / T::lit(2.0);
    let mut total = T::zero();
    for &(k, nk, c) in &active {
        pis[k] = stationary_weight(nk, c, eps, mu);
        total += pis[k];
    }
    for pi in pis.iter_mut() {
        *pi /= total;
    }
    Ok(pis)
}

/// Positive root π of N/π − c/(ε+π) = μ, i.e. μπ² + (με − N + c)π − Nε = 0.
fn stationary_weight<T: Scalar>(nk: T, c: T, eps: T, mu: T) -> T {
    let b = mu * eps - nk + c;
    let disc = (b * b + T::lit(4.0) * mu * nk * eps).sqrt();
    if b <= T::zero() {
        (disc - b) / (T::lit(2.0) * mu)
    } else {
        T::lit(2.0) * nk * eps / (b + disc)
    }
}

/// η_k = N_k / (p_k Σ_i γ_ik max(|r_ik|, δ)^{p_k}), capped at [`MAX_ETA`].
pub fn m_step_eta<T: Scalar>(
    resp: &Responsibilities<T>,
    data: &Dataset<T>,
    betas: &[Vec<T>],
    ps: &[T],
    residual_floor: T,
) -> Vec<T> {
    let cap = T::lit(MAX_ETA);
    betas
        .iter()
        .zip(ps)
        .enumerate()
        .map(|(k, (beta, &p))| {
            let mut nk = T::zero();
            let mut spread = T::zero();
            for i in 0..data.n() {
                let g = resp.get(i, k);
                nk += g;
                spread += g * data.residual(i, beta).abs().max(residual_floor).powf(p);
            }
            let eta = nk / (p * spread);
            if eta.is_finite() {
                eta.min(cap)
            } else {
                cap
            }
        })
        .collect()
}

/// MM weights W = (p/2)·max(r², δ²)^{p/2 − 1}.
pub fn mm_weights<T: Scalar>(residuals: &[T], p: T, floor: T) -> Vec<T> {
    let half = T::lit(0.5);
    let exponent = p * half - T::one();
    let floor_sq = floor * floor;
    residuals
        .iter()
        .map(|&r| p * half * (r * r).max(floor_sq).powf(exponent))
        .collect()
}

/// One MM step for every β_k: the weighted least-squares solve with weights
/// γ_ik η_k W_ik, W evaluated at `betas_prev`.
///
/// A step that increases Σ_i γ_ik |r_ik|^{p_k} by more than rounding noise
/// is rejected and the previous β_k kept, so the update never lowers the
/// EM surrogate.
pub fn m_step_beta<T: Scalar>(
    resp: &Responsibilities<T>,
    data: &Dataset<T>,
    etas: &[T],
    ps: &[T],
    betas_prev: &[Vec<T>],
    residual_floor: T,
) -> Result<Vec<Vec<T>>> {
    let ridge = T::lit(GRAM_RIDGE);
    let n = data.n();
    let mut out = Vec::with_capacity(betas_prev.len());
    for (k, ((beta_prev, &p), &eta)) in betas_prev.iter().zip(ps).zip(etas).enumerate() {
        let residuals = data.residuals(beta_prev);
        let weights = mm_weights(&residuals, p, residual_floor);
        let rows = (0..n).map(|i| (i, resp.get(i, k) * eta * weights[i]));
        let candidate = weighted_least_squares(data.x(), data.y(), data.d(), rows, ridge)
            .ok_or(Error::Singular { component: k })?;

        let spread = |r: &mut dyn Iterator<Item = T>| -> T {
            r.enumerate().map(|(i, r)| resp.get(i, k) * r.abs().powf(p)).sum()
        };
        let before = spread(&mut residuals.iter().copied());
        let after = spread(&mut (0..n).map(|i| data.residual(i, &candidate)));
        if after <= before + before.abs() * T::lit(64.0) * T::epsilon() {
            out.push(candidate);
        } else {
            out.push(beta_prev.clone());
        }
    }
    Ok(out)
}

/// Result of one GEM iteration.
#[derive(Clone, Debug)]
pub struct IterationOutcome<T = f64> {
    pub model: MixtureModel<T>,
    /// Responsibilities used by the M-step, restricted to the surviving
    /// components.
    pub responsibilities: Responsibilities<T>,
    pub objective: T,
}

/// E-step, penalized π update with pruning, β update, η update.
pub fn gem_iterate<T: Scalar>(
    model: &MixtureModel<T>,
    data: &Dataset<T>,
    cfg: &FitConfig<T>,
) -> Result<IterationOutcome<T>> {
    let pen = cfg.penalty_for(data.d());
    let mut resp = e_step(model, data)?;
    let pis = m_step_pi(&resp, cfg, &vec![pen.d_k; model.k()])?;

    let mut current: Vec<Component<T>> = model.components().to_vec();
    if pis.iter().any(|&pi| pi == T::zero()) {
        // Drop pruned components; the reduced model's E-step equals the old
        // responsibilities with surviving columns renormalized.
        let kept: Vec<Component<T>> = current
            .iter()
            .zip(&pis)
            .filter(|(_, &pi)| pi > T::zero())
            .map(|(c, _)| c.clone())
            .collect();
        let mass: T = kept.iter().map(|c| c.pi).sum();
        let reduced = kept
            .iter()
            .map(|c| Component {
                pi: c.pi / mass,
                ..c.clone()
            })
            .collect();
        resp = e_step(&MixtureModel::from_components_unchecked(reduced), data)?;
        current = kept;
    }
    let pis: Vec<T> = pis.into_iter().filter(|&pi| pi > T::zero()).collect();

    let ps: Vec<T> = current.iter().map(|c| c.p).collect();
    let etas: Vec<T> = current.iter().map(|c| c.eta).collect();
    let betas_prev: Vec<Vec<T>> = current.iter().map(|c| c.beta.clone()).collect();
    let betas = m_step_beta(&resp, data, &etas, &ps, &betas_prev, cfg.residual_floor)?;
    let etas = m_step_eta(&resp, data, &betas, &ps, cfg.residual_floor);

    let components = pis
        .into_iter()
        .zip(betas)
        .zip(etas)
        .zip(ps)
        .map(|(((pi, beta), eta), p)| Component { pi, beta, eta, p })
        .collect();
    let model = MixtureModel::from_components_unchecked(components);
    let objective = penalized_log_likelihood(&model, data, &pen)?;
    Ok(IterationOutcome {
        model,
        responsibilities: resp,
        objective,
    })
}

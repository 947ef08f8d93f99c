//! Mixture-of-regressions data model, observed-data likelihood and the
//! mixing-weight penalty.

use serde::{Deserialize, Serialize};

use crate::epd::log_normalizer;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Design matrix (row-major, n×d) and response.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T = f64> {
    x: Vec<T>,
    y: Vec<T>,
    d: usize,
    names: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    /// `x` is row-major with `d` columns; regressors are named `x1..xd`.
    pub fn new(x: Vec<T>, y: Vec<T>, d: usize) -> Result<Self> {
        let names = (1..=d).map(|j| format!("x{j}")).collect();
        Self::with_names(x, y, names)
    }

    pub fn with_names(x: Vec<T>, y: Vec<T>, names: Vec<String>) -> Result<Self> {
        let d = names.len();
        if d == 0 {
            return Err(Error::InvalidParameter("dataset needs at least one regressor".into()));
        }
        if y.is_empty() {
            return Err(Error::InvalidParameter("dataset needs at least one observation".into()));
        }
        if x.len() != y.len() * d {
            return Err(Error::DimensionMismatch {
                context: "design matrix",
                expected: y.len() * d,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        Ok(Self { x, y, d, names })
    }

    pub fn from_rows(rows: &[Vec<T>], y: Vec<T>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                context: "design row",
                expected: d,
                found: bad.len(),
            });
        }
        Self::new(rows.concat(), y, d)
    }

    /// Prepends a column of ones named `intercept`.
    pub fn with_intercept(self) -> Self {
        let n = self.n();
        let d = self.d + 1;
        let mut x = Vec::with_capacity(n * d);
        for i in 0..n {
            x.push(T::one());
            x.extend_from_slice(self.row(i));
        }
        let mut names = Vec::with_capacity(d);
        names.push("intercept".to_string());
        names.extend(self.names);
        Self { x, y: self.y, d, names }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_intercept(&self) -> bool {
        self.names.first().is_some_and(|n| n == "intercept")
    }

    /// y_i - x_i'β
    #[inline]
    pub fn residual(&self, i: usize, beta: &[T]) -> T {
        let fitted = self
            .row(i)
            .iter()
            .zip(beta)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        self.y[i] - fitted
    }

    pub fn residuals(&self, beta: &[T]) -> Vec<T> {
        (0..self.n()).map(|i| self.residual(i, beta)).collect()
    }
}

/// One regression component: weight π_k, coefficients β_k, EP rate η_k and
/// shape p_k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component<T = f64> {
    pub pi: T,
    pub beta: Vec<T>,
    pub eta: T,
    pub p: T,
}

impl<T: Scalar> Component<T> {
    pub fn new(pi: T, beta: Vec<T>, eta: T, p: T) -> Result<Self> {
        let c = Self { pi, beta, eta, p };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi >= T::zero() && self.pi <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "pi must lie in [0, 1], got {}",
                self.pi
            )));
        }
        if !(self.eta > T::zero()) || !self.eta.is_finite() {
            return Err(Error::InvalidParameter(format!("eta must be > 0, got {}", self.eta)));
        }
        if !(self.p > T::zero()) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be > 0, got {}", self.p)));
        }
        if self.beta.is_empty() || self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("component coefficients"));
        }
        Ok(())
    }

    /// ln π_k + ln f_{p_k}(r; 0, η_k), or -inf when π_k = 0.
    #[inline]
    pub(crate) fn log_weighted_density(&self, log_norm: T, residual: T) -> T {
        if self.pi > T::zero() {
            self.pi.ln() + log_norm - self.eta * residual.abs().powf(self.p)
        } else {
            T::neg_infinity()
        }
    }

    pub(crate) fn log_normalizer(&self) -> T {
        log_normalizer(self.p, self.eta)
    }
}

/// Ordered collection of components whose weights sum to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "ModelDocument<T>",
    into = "ModelDocument<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct MixtureModel<T = f64> {
    components: Vec<Component<T>>,
}

/// On-disk layout of a [`MixtureModel`].
#[derive(Serialize, Deserialize)]
struct ModelDocument<T> {
    k: usize,
    d: usize,
    components: Vec<Component<T>>,
}

impl<T: Scalar> TryFrom<ModelDocument<T>> for MixtureModel<T> {
    type Error = Error;

    fn try_from(doc: ModelDocument<T>) -> Result<Self> {
        if doc.k != doc.components.len() {
            return Err(Error::DimensionMismatch {
                context: "model document k",
                expected: doc.k,
                found: doc.components.len(),
            });
        }
        let model = MixtureModel::new(doc.components)?;
        if model.d() != doc.d {
            return Err(Error::DimensionMismatch {
                context: "model document d",
                expected: doc.d,
                found: model.d(),
            });
        }
        Ok(model)
    }
}

impl<T: Scalar> From<MixtureModel<T>> for ModelDocument<T> {
    fn from(m: MixtureModel<T>) -> Self {
        Self {
            k: m.k(),
            d: m.d(),
            components: m.components,
        }
    }
}

impl<T: Scalar> MixtureModel<T> {
    pub fn new(components: Vec<Component<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("mixture needs at least one component".into()));
        }
        for c in &components {
            c.validate()?;
        }
        let d = components[0].beta.len();
        if let Some(c) = components.iter().find(|c| c.beta.len() != d) {
            return Err(Error::DimensionMismatch {
                context: "component coefficients",
                expected: d,
                found: c.beta.len(),
            });
        }
        let total: T = components.iter().map(|c| c.pi).sum();
        if (total - T::one()).abs() > T::unit_sum_tolerance() {
            return Err(Error::InvalidParameter(format!("mixing weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    pub(crate) fn from_components_unchecked(components: Vec<Component<T>>) -> Self {
        Self { components }
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Component<T>> {
        self.components
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn d(&self) -> usize {
        self.components[0].beta.len()
    }

    pub fn pis(&self) -> Vec<T> {
        self.components.iter().map(|c| c.pi).collect()
    }

    pub fn betas(&self) -> Vec<Vec<T>> {
        self.components.iter().map(|c| c.beta.clone()).collect()
    }

    pub fn etas(&self) -> Vec<T> {
        self.components.iter().map(|c| c.eta).collect()
    }

    pub fn ps(&self) -> Vec<T> {
        self.components.iter().map(|c| c.p).collect()
    }

    pub(crate) fn check_data(&self, data: &Dataset<T>) -> Result<()> {
        if self.d() != data.d() {
            return Err(Error::DimensionMismatch {
                context: "model vs dataset regressors",
                expected: self.d(),
                found: data.d(),
            });
        }
        Ok(())
    }

    /// Row-major n×K matrix of ln π_k + ln f_k(y_i - x_i'β_k).
    pub(crate) fn log_joint(&self, data: &Dataset<T>) -> Vec<T> {
        let k = self.k();
        let norms: Vec<T> = self.components.iter().map(Component::log_normalizer).collect();
        let mut out = Vec::with_capacity(data.n() * k);
        for i in 0..data.n() {
            for (c, &ln) in self.components.iter().zip(&norms) {
                out.push(c.log_weighted_density(ln, data.residual(i, &c.beta)));
            }
        }
        out
    }
}

/// ln Σ exp(v), stable; -inf for an empty or all -inf input.
pub fn log_sum_exp<T: Scalar>(values: &[T]) -> T {
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|&v| (v - max).exp()).sum::<T>().ln()
}

/// Σ_i ln Σ_k π_k f_{p_k}(y_i - x_i'β_k; 0, η_k)
pub fn observed_log_likelihood<T: Scalar>(model: &MixtureModel<T>, data: &Dataset<T>) -> Result<T> {
    model.check_data(data)?;
    let k = model.k();
    let joint = model.log_joint(data);
    Ok(joint.chunks(k).map(log_sum_exp).sum())
}

/// Penalty settings: tuning parameter λ, offset ε and the free-parameter
/// count D applied to every component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig<T = f64> {
    pub lambda: T,
    pub epsilon: T,
    pub d_k: usize,
}

impl<T: Scalar> PenaltyConfig<T> {
    pub const DEFAULT_EPSILON: f64 = 1e-5;

    pub fn new(lambda: T, epsilon: T, d_k: usize) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
        }
        if d_k == 0 {
            return Err(Error::InvalidParameter("free-parameter count must be >= 1".into()));
        }
        Ok(Self { lambda, epsilon, d_k })
    }

    /// λ with ε = 1e-5 and D = d + 1 (coefficients plus the EP rate).
    pub fn for_dimension(lambda: T, d: usize) -> Result<Self> {
        Self::new(lambda, T::lit(Self::DEFAULT_EPSILON), d + 1)
    }
}

/// nλ Σ_k D ln((ε + π_k)/ε)
pub fn penalty<T: Scalar>(pis: &[T], cfg: &PenaltyConfig<T>, n: usize) -> T {
    if cfg.lambda == T::zero() {
        return T::zero();
    }
    let scale = T::from_usize_lossy(n) * cfg.lambda * T::from_usize_lossy(cfg.d_k);
    scale * pis.iter().map(|&pi| (pi / cfg.epsilon).ln_1p()).sum::<T>()
}

/// Observed log-likelihood minus the mixing-weight penalty.
pub fn penalized_log_likelihood<T: Scalar>(
    model: &MixtureModel<T>,
    data: &Dataset<T>,
    cfg: &PenaltyConfig<T>,
) -> Result<T> {
    Ok(observed_log_likelihood(model, data)? - penalty(&model.pis(), cfg, data.n()))
}

//! Seeded generators for the two-line contamination benchmark and for
//! generic mixtures of regressions.
//!
//! The benchmark draws Z ~ Bernoulli(0.5), X₁, X₂ ~ N(0, 1) and
//! Y = X₁ + ε (Z = 1) or Y = −X₁ + ε (Z = 2), with ε by case:
//!
//! * I: Student t with one degree of freedom;
//! * II: 0.95·N(0, 1) + 0.05·N(0, 5²);
//! * III: N(0, 1), then ⌊0.05n⌋ rows chosen uniformly are replaced by
//!   leverage points X₁ = 2 + N(0, 1), Y = 10 + N(0, 1) with no label;
//! * IV: N(0, 1), plus a shift Uniform(4, 6) on each row independently with
//!   probability 0.1.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::epd::{ep_sample, EPParams};
use crate::error::{Error, Result};
use crate::model::{Component, Dataset, MixtureModel};
use crate::rng::{stream_rng, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    Custom,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
            Case::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            "IV" | "4" => Ok(Case::IV),
            "custom" => Ok(Case::Custom),
            other => Err(Error::InvalidParameter(format!("unknown case {other:?}"))),
        }
    }
}

/// Error law of one component in a custom simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorDist {
    Normal {
        sd: f64,
    },
    StudentT {
        df: f64,
    },
    /// (1 − weight)·N(0, 1) + weight·N(0, sd²)
    ContaminatedNormal {
        weight: f64,
        sd: f64,
    },
    ExpPower {
        p: f64,
        eta: f64,
    },
}

impl ErrorDist {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ErrorDist::Normal { sd } => sd > 0.0,
            ErrorDist::StudentT { df } => df > 0.0,
            ErrorDist::ContaminatedNormal { weight, sd } => (0.0..=1.0).contains(&weight) && sd > 0.0,
            ErrorDist::ExpPower { p, eta } => p > 0.0 && eta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid error distribution {self:?}")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ErrorDist::Normal { sd } => sd * normal(rng),
            ErrorDist::StudentT { df } => student_t(df, rng),
            ErrorDist::ContaminatedNormal { weight, sd } => {
                let u: f64 = rng.random();
                let z = normal(rng);
                if u < weight {
                    sd * z
                } else {
                    z
                }
            }
            ErrorDist::ExpPower { p, eta } => {
                let prm = EPParams::new(p, eta).expect("validated");
                ep_sample(&prm, 1, rng)[0]
            }
        }
    }
}

/// Generic mixture of regressions: intercept plus d − 1 standard normal
/// covariates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomSpec {
    pub pis: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
    pub errors: Vec<ErrorDist>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub case: Case,
    pub n: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSpec>,
}

impl SimSpec {
    pub fn new(case: Case, n: usize, seed: u64) -> Self {
        Self {
            case,
            n,
            seed,
            custom: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        match (self.case, &self.custom) {
            (Case::Custom, None) => Err(Error::InvalidParameter("custom case needs a custom spec".into())),
            (Case::Custom, Some(c)) => {
                let k = c.pis.len();
                if k == 0 || k > 255 || c.betas.len() != k || c.errors.len() != k {
                    return Err(Error::InvalidParameter(
                        "custom spec needs 1..=255 matching components".into(),
                    ));
                }
                let d = c.betas[0].len();
                if d == 0 || c.betas.iter().any(|b| b.len() != d) {
                    return Err(Error::InvalidParameter(
                        "custom coefficient vectors differ in length".into(),
                    ));
                }
                if c.pis.iter().any(|&p| !(p >= 0.0)) || (c.pis.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidParameter(
                        "custom weights must be a probability vector".into(),
                    ));
                }
                c.errors.iter().try_for_each(ErrorDist::validate)
            }
            _ => Ok(()),
        }
    }
}

/// One simulated data set with its ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct SimDraw {
    pub spec: SimSpec,
    /// Intercept column followed by the covariates.
    pub data: Dataset<f64>,
    /// Generating component, 1-based; 0 for replaced outlier rows.
    pub labels: Vec<u8>,
    pub outlier_mask: Vec<bool>,
    /// Error term added to the regression mean of each row.
    pub errors: Vec<f64>,
    /// Extra response shift (Case IV outliers), zero elsewhere.
    pub shifts: Vec<f64>,
    /// Generating weights and coefficients. For the benchmark cases η and p
    /// describe the standard normal core of the error law (η = 1/2, p = 2).
    pub truth: MixtureModel<f64>,
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Z / sqrt(χ²_df / df)
fn student_t<R: Rng + ?Sized>(df: f64, rng: &mut R) -> f64 {
    let z = normal(rng);
    let chi: f64 = ChiSquared::new(df).expect("df > 0").sample(rng);
    z / (chi / df).sqrt()
}

fn benchmark_truth() -> MixtureModel<f64> {
    MixtureModel::new(vec![
        Component::new(0.5, vec![0.0, 1.0, 0.0], 0.5, 2.0).expect("valid"),
        Component::new(0.5, vec![0.0, -1.0, 0.0], 0.5, 2.0).expect("valid"),
    ])
    .expect("valid")
}

/// Generates the draw described by `spec` from its own seed.
pub fn generate(spec: &SimSpec) -> Result<SimDraw> {
    let mut rng = stream_rng(spec.seed, Stream::Data);
    generate_with(spec, &mut rng)
}

/// Generates from an explicit random source.
pub fn generate_with<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> Result<SimDraw> {
    spec.validate()?;
    match spec.case {
        Case::Custom => generate_custom(spec, spec.custom.as_ref().expect("validated"), rng),
        _ => generate_benchmark(spec, rng),
    }
}

fn generate_benchmark<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> Result<SimDraw> {
    let n = spec.n;
    let truth = benchmark_truth();
    let mut x = Vec::with_capacity(n * 3);
    let mut y = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut outlier_mask = vec![false; n];
    let mut errors = Vec::with_capacity(n);
    let mut shifts = vec![0.0; n];

    for i in 0..n {
        let label: u8 = if rng.random::<bool>() { 1 } else { 2 };
        let x1 = normal(rng);
        let x2 = normal(rng);
        let e = match spec.case {
            Case::I => student_t(1.0, rng),
            Case::II => ErrorDist::ContaminatedNormal { weight: 0.05, sd: 5.0 }.sample(rng),
            _ => normal(rng),
        };
        if spec.case == Case::IV && rng.random_bool(0.1) {
            shifts[i] = rng.random_range(4.0..6.0);
            outlier_mask[i] = true;
        }
        let row = [1.0, x1, x2];
        let beta = &truth.components()[usize::from(label) - 1].beta;
        let mean: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        x.extend_from_slice(&row);
        y.push(mean + shifts[i] + e);
        labels.push(label);
        errors.push(e);
    }

    if spec.case == Case::III {
        let count = n * 5 / 100;
        let mut rows = index::sample(rng, n, count).into_vec();
        rows.sort_unstable();
        for i in rows {
            let ex = normal(rng);
            let ey = normal(rng);
            x[i * 3 + 1] = 2.0 + ex;
            y[i] = 10.0 + ey;
            errors[i] = ey;
            labels[i] = 0;
            outlier_mask[i] = true;
        }
    }

    let names = vec!["intercept".to_string(), "x1".to_string(), "x2".to_string()];
    Ok(SimDraw {
        spec: spec.clone(),
        data: Dataset::with_names(x, y, names)?,
        labels,
        outlier_mask,
        errors,
        shifts,
        truth,
    })
}

fn generate_custom<R: Rng + ?Sized>(spec: &SimSpec, custom: &CustomSpec, rng: &mut R) -> Result<SimDraw> {
    let n = spec.n;
    let d = custom.betas[0].len();
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut errors = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut k = custom.pis.len() - 1;
        for (j, &pi) in custom.pis.iter().enumerate() {
            acc += pi;
            if u < acc {
                k = j;
                break;
            }
        }
        let mut row = Vec::with_capacity(d);
        row.push(1.0);
        row.extend((1..d).map(|_| normal(rng)));
        let e = custom.errors[k].sample(rng);
        let mean: f64 = row.iter().zip(&custom.betas[k]).map(|(a, b)| a * b).sum();
        x.extend_from_slice(&row);
        y.push(mean + e);
        labels.push(u8::try_from(k + 1).expect("at most 255 components"));
        errors.push(e);
    }
    let truth = MixtureModel::new(
        custom
            .pis
            .iter()
            .zip(&custom.betas)
            .zip(&custom.errors)
            .map(|((&pi, beta), err)| {
                let (eta, p) = match *err {
                    ErrorDist::ExpPower { p, eta } => (eta, p),
                    ErrorDist::Normal { sd } => (1.0 / (2.0 * sd * sd), 2.0),
                    _ => (0.5, 2.0),
                };
                Component::new(pi, beta.clone(), eta, p)
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let mut names = vec!["intercept".to_string()];
    names.extend((1..d).map(|j| format!("x{j}")));
    Ok(SimDraw {
        spec: spec.clone(),
        data: Dataset::with_names(x, y, names)?,
        labels,
        outlier_mask: vec![false; n],
        errors,
        shifts: vec![0.0; n],
        truth,
    })
}

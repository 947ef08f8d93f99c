//! The three subcommands and the replicate pipeline they share.

use std::fs;
use std::io::Write;
use std::path::Path;

use mixep::gem::LambdaCandidate;
use mixep::io::{
    create, read_dataset_path, write_json, write_model_json, write_report_csv, write_responsibilities_csv,
    write_simdraw_csv, write_trace_csv,
};
use mixep::metrics::apply_alignment;
use mixep::rng::replicate_seed;
use mixep::{
    aggregate, align_labels, gem_fit, generate, select_lambda, Case, Dataset, FitResult, MixtureModel, PPolicy,
    ReplicateReport, SimSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{FitSettings, Flags, LambdaChoice, BENCH_SUCCESS_SHARE, DEFAULT_N, DEFAULT_REPS};
use crate::error::CliError;

pub const DATA_FILE: &str = "data.csv";
pub const TRUTH_FILE: &str = "truth.json";
pub const MODEL_FILE: &str = "model.json";
pub const RESPONSIBILITIES_FILE: &str = "responsibilities.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPLICATES_FILE: &str = "replicates.csv";

/// A finished fit together with the λ it was run at.
#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub fit: FitResult<f64>,
    pub lambda: f64,
    /// Per-candidate summary when λ was chosen by BIC.
    pub candidates: Vec<LambdaCandidate<f64>>,
}

/// Fits `data` at a fixed λ or picks λ from a grid by BIC.
pub fn fit_dataset(data: &Dataset<f64>, settings: &FitSettings) -> mixep::Result<FitOutcome> {
    match &settings.lambdas {
        LambdaChoice::Fixed(lambda) => Ok(FitOutcome {
            fit: gem_fit(data, &settings.config.with_lambda(*lambda))?,
            lambda: *lambda,
            candidates: Vec::new(),
        }),
        LambdaChoice::Grid(grid) => {
            let selection = select_lambda(data, &settings.config, grid)?;
            Ok(FitOutcome {
                fit: selection.fit,
                lambda: selection.lambda,
                candidates: selection.candidates,
            })
        }
    }
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

#[derive(Serialize)]
struct TruthDocument<'a> {
    spec: &'a SimSpec,
    truth: &'a MixtureModel<f64>,
}

/// `simulate`: writes `data.csv` and `truth.json` into the output directory.
pub fn simulate(flags: &Flags) -> Result<i32, CliError> {
    let spec = SimSpec::new(flags.case()?, flags.n.unwrap_or(DEFAULT_N), flags.seed());
    let draw = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let dir = flags.out_dir();
    prepare_out(&dir)?;
    write_simdraw_csv(&draw, create(&dir.join(DATA_FILE))?)?;
    write_json(
        &TruthDocument {
            spec: &draw.spec,
            truth: &draw.truth,
        },
        create(&dir.join(TRUTH_FILE))?,
    )?;
    Ok(0)
}

/// `fit`: writes the model, responsibilities and objective trace. Exit 1
/// when the iteration cap was hit (files are still written).
pub fn fit(flags: &Flags) -> Result<i32, CliError> {
    let path = flags
        .data
        .as_ref()
        .ok_or_else(|| CliError::Usage("--data is required".into()))?;
    let data: Dataset<f64> = read_dataset_path(path, flags.use_intercept())?;
    let settings = flags.fit_settings(flags.seed())?;
    let outcome = fit_dataset(&data, &settings)?;
    let dir = flags.out_dir();
    prepare_out(&dir)?;
    let fit = &outcome.fit;
    write_model_json(&fit.model, create(&dir.join(MODEL_FILE))?)?;
    write_responsibilities_csv(&data, &fit.responsibilities, create(&dir.join(RESPONSIBILITIES_FILE))?)?;
    write_trace_csv(&fit.trace, create(&dir.join(TRACE_FILE))?)?;

    let mut stdout = std::io::stdout().lock();
    let p = fit.model.components()[0].p;
    let _ = writeln!(stdout, "K = {}", fit.model.k());
    let _ = writeln!(stdout, "objective = {}", fit.objective());
    let _ = writeln!(stdout, "lambda = {}", outcome.lambda);
    let _ = writeln!(stdout, "p = {p}");
    let _ = writeln!(stdout, "iterations = {} (converged: {})", fit.iterations, fit.converged);
    Ok(if fit.converged { 0 } else { 1 })
}

/// Why a replicate did not enter the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicateStatus {
    Ok,
    /// The fit ended with a different number of components than the truth.
    WrongK,
    NotConverged,
    Error,
}

impl ReplicateStatus {
    fn as_str(self) -> &'static str {
        match self {
            ReplicateStatus::Ok => "ok",
            ReplicateStatus::WrongK => "wrong_k",
            ReplicateStatus::NotConverged => "not_converged",
            ReplicateStatus::Error => "error",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub seed: u64,
    pub status: ReplicateStatus,
    pub k: Option<usize>,
    pub iterations: Option<usize>,
    pub lambda: Option<f64>,
    pub p: Option<f64>,
    pub objective: Option<f64>,
    /// Coefficients reordered to match the truth's components.
    pub aligned: Option<Vec<Vec<f64>>>,
    pub error: Option<String>,
}

/// Runs one replicate: generate from `seed`, fit with the same seed, align.
pub fn run_replicate(case: Case, n: usize, replicate: usize, seed: u64, settings: &FitSettings) -> ReplicateRecord {
    let mut record = ReplicateRecord {
        replicate,
        seed,
        status: ReplicateStatus::Error,
        k: None,
        iterations: None,
        lambda: None,
        p: None,
        objective: None,
        aligned: None,
        error: None,
    };
    let settings = FitSettings {
        config: mixep::FitConfig {
            seed,
            ..settings.config.clone()
        },
        lambdas: settings.lambdas.clone(),
    };
    let result = generate(&SimSpec::new(case, n, seed)).and_then(|draw| {
        let outcome = fit_dataset(&draw.data, &settings)?;
        Ok((draw, outcome))
    });
    let (draw, outcome) = match result {
        Ok(v) => v,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let fit = &outcome.fit;
    record.k = Some(fit.model.k());
    record.iterations = Some(fit.iterations);
    record.lambda = Some(outcome.lambda);
    record.p = Some(fit.model.components()[0].p);
    record.objective = Some(fit.objective());
    if fit.model.k() != draw.truth.k() {
        record.status = ReplicateStatus::WrongK;
        return record;
    }
    let betas = fit.model.betas();
    match align_labels(&betas, &draw.truth.betas()) {
        Ok(perm) => record.aligned = Some(apply_alignment(&betas, &perm)),
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    }
    record.status = if fit.converged {
        ReplicateStatus::Ok
    } else {
        ReplicateStatus::NotConverged
    };
    record
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub records: Vec<ReplicateRecord>,
    /// `None` when no replicate succeeded.
    pub report: Option<ReplicateReport<f64>>,
    pub succeeded: usize,
    pub failed: usize,
}

impl BenchOutcome {
    pub fn passes_threshold(&self) -> bool {
        let total = self.records.len();
        self.succeeded as f64 >= BENCH_SUCCESS_SHARE * total as f64
    }
}

/// True coefficients of the benchmark cases (component order as generated).
pub fn benchmark_truth(case: Case) -> mixep::Result<Vec<Vec<f64>>> {
    Ok(generate(&SimSpec::new(case, 1, 0))?.truth.betas())
}

/// Runs `reps` replicates in parallel; results are ordered by replicate
/// index so the outcome does not depend on scheduling.
pub fn run_bench(
    case: Case,
    n: usize,
    master_seed: u64,
    reps: usize,
    settings: &FitSettings,
) -> mixep::Result<BenchOutcome> {
    let records: Vec<ReplicateRecord> = (0..reps)
        .into_par_iter()
        .map(|r| run_replicate(case, n, r, replicate_seed(master_seed, r as u64), settings))
        .collect();
    let aligned: Vec<Vec<Vec<f64>>> = records
        .iter()
        .filter(|r| r.status == ReplicateStatus::Ok)
        .filter_map(|r| r.aligned.clone())
        .collect();
    let succeeded = aligned.len();
    let failed = reps - succeeded;
    let report = if aligned.is_empty() {
        None
    } else {
        let mut report = aggregate(&aligned, &benchmark_truth(case)?)?;
        report.failure_count = failed;
        Some(report)
    };
    Ok(BenchOutcome {
        records,
        report,
        succeeded,
        failed,
    })
}

#[derive(Serialize)]
struct BenchDocument<'a> {
    case: Case,
    n: usize,
    master_seed: u64,
    reps: usize,
    succeeded: usize,
    failure_count: usize,
    k_max: usize,
    lambda: &'a LambdaChoiceDoc,
    p_policy: &'a PPolicy<f64>,
    report: Option<&'a ReplicateReport<f64>>,
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum LambdaChoiceDoc {
    Fixed(f64),
    Grid(Vec<f64>),
}

fn write_replicates_csv<W: Write>(records: &[ReplicateRecord], coefficients: usize, w: W) -> Result<(), CliError> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut header: Vec<String> = [
        "replicate",
        "seed",
        "status",
        "k",
        "iterations",
        "lambda",
        "p",
        "objective",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..coefficients).map(|j| format!("coef{j}")));
    header.push("error".into());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    wtr.write_record(&header).map_err(io)?;
    for r in records {
        let mut rec = vec![
            r.replicate.to_string(),
            r.seed.to_string(),
            r.status.as_str().to_string(),
            opt(r.k.map(|v| v.to_string())),
            opt(r.iterations.map(|v| v.to_string())),
            opt(r.lambda.map(|v| v.to_string())),
            opt(r.p.map(|v| v.to_string())),
            opt(r.objective.map(|v| v.to_string())),
        ];
        let flat: Vec<String> = r.aligned.iter().flatten().flatten().map(f64::to_string).collect();
        rec.extend((0..coefficients).map(|j| flat.get(j).cloned().unwrap_or_default()));
        rec.push(opt(r.error.clone()));
        wtr.write_record(&rec).map_err(io)?;
    }
    wtr.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// `bench`: replicate study with `report.csv`, `report.json` and
/// `replicates.csv`. Exit 5 when fewer than 80% of replicates succeed.
pub fn bench(flags: &Flags) -> Result<i32, CliError> {
    let case = flags.case()?;
    let n = flags.n.unwrap_or(DEFAULT_N);
    let reps = flags.reps.unwrap_or(DEFAULT_REPS);
    if reps == 0 {
        return Err(CliError::Usage("--reps must be >= 1".into()));
    }
    if !flags.use_intercept() {
        return Err(CliError::Usage(
            "bench compares against intercept-bearing truth; drop --no-intercept".into(),
        ));
    }
    let master_seed = flags.seed();
    let settings = flags.fit_settings(master_seed)?;
    let outcome = run_bench(case, n, master_seed, reps, &settings)?;

    let dir = flags.out_dir();
    prepare_out(&dir)?;
    let truth = benchmark_truth(case)?;
    let coefficients = truth.iter().map(Vec::len).sum();
    write_replicates_csv(&outcome.records, coefficients, create(&dir.join(REPLICATES_FILE))?)?;
    if let Some(report) = &outcome.report {
        write_report_csv(report, create(&dir.join(REPORT_CSV))?)?;
    }
    let lambda = match &settings.lambdas {
        LambdaChoice::Fixed(l) => LambdaChoiceDoc::Fixed(*l),
        LambdaChoice::Grid(g) => LambdaChoiceDoc::Grid(g.clone()),
    };
    write_json(
        &BenchDocument {
            case,
            n,
            master_seed,
            reps,
            succeeded: outcome.succeeded,
            failure_count: outcome.failed,
            k_max: settings.config.k_max,
            lambda: &lambda,
            p_policy: &settings.config.p_policy,
            report: outcome.report.as_ref(),
        },
        create(&dir.join(REPORT_JSON))?,
    )?;

    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(
        stdout,
        "replicates: {} succeeded, {} failed",
        outcome.succeeded, outcome.failed
    );
    if let Some(report) = &outcome.report {
        for j in 0..report.coefficients.len() {
            let _ = writeln!(
                stdout,
                "{}: truth {} mse {:.5} bias {:+.5}",
                report.coefficients[j], report.truth[j], report.mse[j], report.bias[j]
            );
        }
    }
    if outcome.passes_threshold() {
        Ok(0)
    } else {
        Err(CliError::BenchFailed {
            succeeded: outcome.succeeded,
            total: reps,
        })
    }
}

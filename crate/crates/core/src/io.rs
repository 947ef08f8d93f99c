//! File formats: dataset and simulation CSV, model JSON, responsibilities,
//! objective traces and replicate reports.
//!
//! CSV is comma-separated with a header row and LF line endings. Floats are
//! written with Rust's shortest round-trip formatting, so reading a file
//! back reproduces the exact values and equal inputs give equal bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gem::Responsibilities;
use crate::metrics::ReplicateReport;
use crate::model::{Dataset, MixtureModel};
use crate::scalar::Scalar;
use crate::simgen::SimDraw;

/// Columns that describe a simulated row rather than a regressor.
pub const METADATA_COLUMNS: [&str; 2] = ["label", "outlier"];

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Reads a dataset: one column named `y`, every other column (except
/// [`METADATA_COLUMNS`]) is a regressor in header order. With `intercept`
/// a leading column of ones is added.
pub fn read_dataset_csv<T: Scalar, R: Read>(reader: R, intercept: bool) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let y_col = headers
        .iter()
        .position(|h| h.trim() == "y")
        .ok_or_else(|| Error::Format("no column named `y`".into()))?;
    let regressors: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|&(j, h)| j != y_col && !METADATA_COLUMNS.contains(&h.trim()))
        .map(|(j, h)| (j, h.trim().to_string()))
        .collect();
    if regressors.is_empty() && !intercept {
        return Err(Error::Format("no regressor columns".into()));
    }

    let parse = |field: &str, line: u64, col: &str| -> Result<T> {
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("line {line}, column {col}: cannot parse {field:?}")))?;
        if !v.is_finite() {
            return Err(Error::Format(format!("line {line}, column {col}: non-finite value")));
        }
        Ok(T::lit(v))
    };

    let mut x = Vec::new();
    let mut y = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(Error::Format(format!("line {line}: expected {} fields", headers.len())));
        }
        y.push(parse(&record[y_col], line, "y")?);
        if intercept {
            x.push(T::one());
        }
        for (j, name) in &regressors {
            x.push(parse(&record[*j], line, name)?);
        }
    }
    if y.is_empty() {
        return Err(Error::Format("no data rows".into()));
    }
    let mut names: Vec<String> = Vec::new();
    if intercept {
        names.push("intercept".into());
    }
    names.extend(regressors.into_iter().map(|(_, n)| n));
    Dataset::with_names(x, y, names)
}

pub fn read_dataset_path<T: Scalar>(path: &Path, intercept: bool) -> Result<Dataset<T>> {
    read_dataset_csv(BufReader::new(File::open(path)?), intercept)
}

/// Columns `y`, the covariates (intercept omitted), `label`, `outlier`.
pub fn write_simdraw_csv<W: Write>(draw: &SimDraw, w: W) -> Result<()> {
    let data = &draw.data;
    let skip = usize::from(data.has_intercept());
    let mut wtr = csv_writer(w);
    let mut header = vec!["y".to_string()];
    header.extend(data.names()[skip..].iter().cloned());
    header.push("label".into());
    header.push("outlier".into());
    wtr.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec = vec![data.y()[i].to_string()];
        rec.extend(data.row(i)[skip..].iter().map(f64::to_string));
        rec.push(draw.labels[i].to_string());
        rec.push(draw.outlier_mask[i].to_string());
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<S: Serialize, W: Write>(value: &S, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<S: DeserializeOwned, R: Read>(r: R) -> Result<S> {
    Ok(serde_json::from_reader(r)?)
}

pub fn write_model_json<T: Scalar + Serialize, W: Write>(model: &MixtureModel<T>, w: W) -> Result<()> {
    write_json(model, w)
}

pub fn read_model_json<T: Scalar + DeserializeOwned, R: Read>(r: R) -> Result<MixtureModel<T>> {
    read_json(r)
}

/// One row per observation: index, response, covariates, then γ_i1..γ_iK.
pub fn write_responsibilities_csv<T: Scalar, W: Write>(
    data: &Dataset<T>,
    resp: &Responsibilities<T>,
    w: W,
) -> Result<()> {
    let skip = usize::from(data.has_intercept());
    let mut wtr = csv_writer(w);
    let mut header = vec!["obs".to_string(), "y".to_string()];
    header.extend(data.names()[skip..].iter().cloned());
    header.extend((1..=resp.k()).map(|k| format!("gamma{k}")));
    wtr.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec = vec![i.to_string(), data.y()[i].to_string()];
        rec.extend(data.row(i)[skip..].iter().map(T::to_string));
        rec.extend(resp.row(i).iter().map(T::to_string));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_trace_csv<T: Scalar, W: Write>(trace: &[T], w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    wtr.write_record(["iteration", "objective"])?;
    for (it, v) in trace.iter().enumerate() {
        wtr.write_record([it.to_string(), v.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Rows are coefficients; columns `coefficient,truth,mse,bias`.
pub fn write_report_csv<T: Scalar, W: Write>(report: &ReplicateReport<T>, w: W) -> Result<()> {
    let mut wtr = csv_writer(w);
    wtr.write_record(["coefficient", "truth", "mse", "bias"])?;
    for j in 0..report.coefficients.len() {
        wtr.write_record([
            report.coefficients[j].clone(),
            report.truth[j].to_string(),
            report.mse[j].to_string(),
            report.bias[j].to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Creates (truncating) `path` behind a buffered writer.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

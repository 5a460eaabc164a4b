//! Model file parsing and report writing.
//!
//! Models are JSON: complex scalars as `[re, im]` pairs, matrices as
//! row-major nested arrays. Parse errors carry a JSON-pointer path to the
//! offending element; invariant violations name the violated invariant.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::Value;

use qecsense_core::bosonic::FockModel;
use qecsense_core::dephasing::CorrelationModel;
use qecsense_core::linalg::DenseMatrix;
use qecsense_core::model::LindbladModel;

#[derive(Debug)]
pub enum CliError {
    /// File-system or encoding problem: exit code 1.
    Io(String),
    /// Malformed model file: exit code 2.
    Schema { pointer: String, message: String },
    /// Structurally valid input violating a model invariant: exit code 2.
    Invariant(String),
    /// Domain-level failure (HNLS violated, non-commuting, ...): exit code 2.
    Model(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Schema { pointer, message } => {
                write!(f, "schema error at '{pointer}': {message}")
            }
            CliError::Invariant(msg) => write!(f, "invariant error: {msg}"),
            CliError::Model(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

/// Any of the three model kinds a file can hold.
pub enum ModelFile {
    Lindblad(LindbladModel),
    Correlation(CorrelationModel),
    Fock(FockModel),
}

pub fn parse_model(path: &Path) -> Result<ModelFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| schema("", "model file must be a JSON object"))?;
    if object.contains_key("dimension") {
        Ok(ModelFile::Lindblad(parse_lindblad(&value)?))
    } else if object.contains_key("C") || object.contains_key("N") {
        Ok(ModelFile::Correlation(parse_correlation(&value)?))
    } else if object.contains_key("M") || object.contains_key("s") {
        Ok(ModelFile::Fock(parse_fock(&value)?))
    } else {
        Err(schema(
            "",
            "unrecognized model: expected keys 'dimension' (Lindblad), 'N'/'C' (dephasing), or 'M'/'s' (bosonic)",
        ))
    }
}

pub fn parse_lindblad(value: &Value) -> Result<LindbladModel, CliError> {
    let dimension = usize_field(value, "/dimension")?;
    let hamiltonian = complex_matrix(field(value, "/hamiltonian")?, "/hamiltonian", dimension)?;
    let jumps_value = field(value, "/jumps").ok();
    let mut jumps = Vec::new();
    if let Some(list) = jumps_value {
        let array = list
            .as_array()
            .ok_or_else(|| schema("/jumps", "expected an array of matrices"))?;
        for (i, jump) in array.iter().enumerate() {
            jumps.push(complex_matrix(jump, &format!("/jumps/{i}"), dimension)?);
        }
    }
    let rates = match field(value, "/rates") {
        Ok(v) => real_vector(v, "/rates")?,
        Err(_) => vec![1.0; jumps.len()],
    };
    if rates.len() != jumps.len() {
        return Err(CliError::Invariant(format!(
            "rates length {} must match jumps length {}",
            rates.len(),
            jumps.len()
        )));
    }
    LindbladModel::new(hamiltonian, jumps, rates).map_err(|e| CliError::Invariant(e.to_string()))
}

pub fn parse_correlation(value: &Value) -> Result<CorrelationModel, CliError> {
    let n = usize_field(value, "/N")?;
    let t2 = f64_field(value, "/T2")?;
    let gaps = real_vector(field(value, "/h")?, "/h")?;
    if gaps.len() != n {
        return Err(schema("/h", format!("expected {n} entries, got {}", gaps.len())));
    }
    let c = real_matrix(field(value, "/C")?, "/C", n)?;
    CorrelationModel::new(gaps, c, t2).map_err(|e| CliError::Invariant(e.to_string()))
}

pub fn parse_fock(value: &Value) -> Result<FockModel, CliError> {
    let truncation = usize_field(value, "/M")?;
    let order = usize_field(value, "/s")?;
    let kappa = f64_field(value, "/kappa").unwrap_or(1.0);
    let zeta = match field(value, "/zeta") {
        Ok(v) => real_vector(v, "/zeta")?,
        Err(_) => vec![0.0; order],
    };
    FockModel::new(truncation, order, kappa, zeta).map_err(|e| CliError::Invariant(e.to_string()))
}

fn field<'a>(value: &'a Value, pointer: &str) -> Result<&'a Value, CliError> {
    value
        .pointer(pointer)
        .ok_or_else(|| schema(pointer, "missing field"))
}

fn usize_field(value: &Value, pointer: &str) -> Result<usize, CliError> {
    field(value, pointer)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| schema(pointer, "expected a nonnegative integer"))
}

fn f64_field(value: &Value, pointer: &str) -> Result<f64, CliError> {
    field(value, pointer)?
        .as_f64()
        .ok_or_else(|| schema(pointer, "expected a number"))
}

fn real_vector(value: &Value, pointer: &str) -> Result<Vec<f64>, CliError> {
    let array = value
        .as_array()
        .ok_or_else(|| schema(pointer, "expected an array of numbers"))?;
    array
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| schema(format!("{pointer}/{i}"), "expected a number"))
        })
        .collect()
}

fn real_matrix(value: &Value, pointer: &str, dim: usize) -> Result<DenseMatrix, CliError> {
    let rows = value
        .as_array()
        .ok_or_else(|| schema(pointer, "expected an array of rows"))?;
    if rows.len() != dim {
        return Err(schema(pointer, format!("expected {dim} rows, got {}", rows.len())));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let entries = real_vector(row, &format!("{pointer}/{i}"))?;
        if entries.len() != dim {
            return Err(schema(
                format!("{pointer}/{i}"),
                format!("expected {dim} entries, got {}", entries.len()),
            ));
        }
        data.extend(entries.into_iter().map(|x| Complex64::new(x, 0.0)));
    }
    DenseMatrix::new(dim, dim, data).map_err(|e| CliError::Invariant(e.to_string()))
}

fn complex_entry(value: &Value, pointer: &str) -> Result<Complex64, CliError> {
    let pair = value
        .as_array()
        .ok_or_else(|| schema(pointer, "expected a [re, im] pair"))?;
    if pair.len() != 2 {
        return Err(schema(pointer, "expected exactly two entries [re, im]"));
    }
    let re = pair[0]
        .as_f64()
        .ok_or_else(|| schema(format!("{pointer}/0"), "expected a number"))?;
    let im = pair[1]
        .as_f64()
        .ok_or_else(|| schema(format!("{pointer}/1"), "expected a number"))?;
    Ok(Complex64::new(re, im))
}

fn complex_matrix(value: &Value, pointer: &str, dim: usize) -> Result<DenseMatrix, CliError> {
    let rows = value
        .as_array()
        .ok_or_else(|| schema(pointer, "expected an array of rows"))?;
    if rows.len() != dim {
        return Err(schema(pointer, format!("expected {dim} rows, got {}", rows.len())));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| schema(format!("{pointer}/{i}"), "expected an array"))?;
        if entries.len() != dim {
            return Err(schema(
                format!("{pointer}/{i}"),
                format!("expected {dim} entries, got {}", entries.len()),
            ));
        }
        for (j, entry) in entries.iter().enumerate() {
            data.push(complex_entry(entry, &format!("{pointer}/{i}/{j}"))?);
        }
    }
    DenseMatrix::new(dim, dim, data).map_err(|e| CliError::Invariant(e.to_string()))
}

pub fn complex_vector_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| serde_json::json!([z.re, z.im])).collect())
}

/// Write to a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let directory = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("invalid output path {}", path.display())))?;
    let tmp: PathBuf = directory.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Io(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}

/// Write to the given path atomically, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

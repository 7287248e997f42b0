//! Dataset files: CSV with a header row, or a little-endian binary payload
//! with a JSON sidecar.
//!
//! A binary file holds `n` rows of `d` features followed by the label, all in
//! the sidecar's `dtype`. The sidecar sits next to it with a `.json`
//! extension.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use knnsv::{Dataset, Labels, SellerMap, Target, Task};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    F32,
    F64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Class,
    Real,
}

impl From<Task> for LabelKind {
    fn from(t: Task) -> Self {
        match t {
            Task::Classification => LabelKind::Class,
            Task::Regression => LabelKind::Real,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Bin,
}

impl Format {
    /// `.bin` files are binary, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => Format::Bin,
            _ => Format::Csv,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Bin => "bin",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    pub d: usize,
    pub dtype: DType,
    pub label: LabelKind,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// A dataset read from disk plus the seller ids of a named column, if asked.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub dataset: Dataset,
    pub sellers: Option<Vec<u64>>,
}

pub fn read_dataset(path: &Path, format: Option<Format>, label: &str, task: Task, seller_column: Option<&str>) -> Result<Loaded> {
    match format.unwrap_or_else(|| Format::from_path(path)) {
        Format::Csv => read_csv(path, label, task, seller_column),
        Format::Bin => {
            if seller_column.is_some() {
                return Err(CliError::Usage("--seller-column needs CSV input; pass --sellers for binary data".into()));
            }
            Ok(Loaded { dataset: read_binary(path, task)?, sellers: None })
        }
    }
}

fn parse_cell(s: &str, row: usize, col: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Data(format!("row {row}: column {col:?} is not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Data(format!("row {row}: column {col:?} is not finite: {s:?}")));
    }
    Ok(v)
}

fn class_label(v: f64, row: usize) -> Result<u32> {
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return Err(CliError::Data(format!("row {row}: class label {v} is not a nonnegative integer")));
    }
    Ok(v as u32)
}

/// Prefixes data errors with the file they came from.
fn in_file(path: &Path) -> impl Fn(CliError) -> CliError + Copy + '_ {
    move |e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        e => e,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let row = e.position().map(|p| p.record());
    let what = match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => e.to_string(),
    };
    match row {
        Some(r) => CliError::Data(format!("{}: row {r}: {what}", path.display())),
        None => CliError::Data(format!("{}: {what}", path.display())),
    }
}

/// Reads a CSV with a header row. `label` names the label column,
/// `seller_column` an optional column of seller ids, returned when present;
/// every other column is a feature. Rows are numbered from 1 after the header.
pub fn read_csv(path: &Path, label: &str, task: Task, seller_column: Option<&str>) -> Result<Loaded> {
    let file = File::open(path).map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(BufReader::new(file));
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let label_col = find(label)
        .ok_or_else(|| CliError::Data(format!("{}: no label column named {label:?}", path.display())))?;
    // A missing seller column is reported by the caller, since test files
    // may leave it out.
    let seller_col = seller_column.and_then(find);
    let feature_cols: Vec<usize> =
        (0..headers.len()).filter(|&c| c != label_col && Some(c) != seller_col).collect();
    if feature_cols.is_empty() {
        return Err(CliError::Data(format!("{}: no feature columns", path.display())));
    }

    let mut features = Vec::new();
    let mut class = Vec::new();
    let mut real = Vec::new();
    let mut sellers = Vec::new();
    let at = in_file(path);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = i + 1;
        for &c in &feature_cols {
            features.push(parse_cell(&rec[c], row, &headers[c]).map_err(&at)?);
        }
        let y = parse_cell(&rec[label_col], row, label).map_err(&at)?;
        match task {
            Task::Classification => class.push(class_label(y, row).map_err(&at)?),
            Task::Regression => real.push(y),
        }
        if let Some(c) = seller_col {
            let s = rec[c].trim();
            sellers.push(
                s.parse::<u64>().map_err(|_| {
                    CliError::Data(format!("{}: row {row}: seller id {s:?} is not a nonnegative integer", path.display()))
                })?,
            );
        }
    }
    let labels = match task {
        Task::Classification => Labels::Class(class),
        Task::Regression => Labels::Real(real),
    };
    let dataset = Dataset::new(features, feature_cols.len(), labels)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(Loaded { dataset, sellers: seller_col.map(|_| sellers) })
}

fn label_text(t: Target) -> String {
    match t {
        Target::Class(c) => c.to_string(),
        Target::Real(v) => v.to_string(),
    }
}

/// Writes a CSV with columns `x0..x{d-1}` and the label column last.
pub fn write_csv(ds: &Dataset, path: &Path, label: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let wrap = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    let mut header: Vec<String> = (0..ds.dim()).map(|j| format!("x{j}")).collect();
    header.push(label.to_string());
    w.write_record(&header).map_err(wrap)?;
    let mut rec: Vec<String> = Vec::with_capacity(ds.dim() + 1);
    for i in 0..ds.len() {
        rec.clear();
        rec.extend(ds.row(i).iter().map(|v| v.to_string()));
        rec.push(label_text(ds.label(i)));
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn write_binary(ds: &Dataset, path: &Path, dtype: DType) -> Result<()> {
    let task = match ds.labels() {
        Labels::Class(_) => Task::Classification,
        Labels::Real(_) => Task::Regression,
    };
    let side = Sidecar { n: ds.len(), d: ds.dim(), dtype, label: task.into() };
    let side_path = sidecar_path(path);
    let json = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    std::fs::write(&side_path, json + "\n").map_err(|e| CliError::io(format!("writing {}", side_path.display()), e))?;

    let file = File::create(path).map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let mut put = |v: f64| match dtype {
        DType::F32 => w.write_all(&(v as f32).to_le_bytes()),
        DType::F64 => w.write_all(&v.to_le_bytes()),
    };
    let io = |e| CliError::io(format!("writing {}", path.display()), e);
    for i in 0..ds.len() {
        for &v in ds.row(i) {
            put(v).map_err(io)?;
        }
        put(ds.label(i).as_f64()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let side_path = sidecar_path(path);
    let text = std::fs::read_to_string(&side_path)
        .map_err(|e| CliError::io(format!("reading sidecar {}", side_path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", side_path.display())))
}

pub fn read_binary(path: &Path, task: Task) -> Result<Dataset> {
    let side = read_sidecar(path)?;
    if LabelKind::from(task) != side.label {
        return Err(CliError::Usage(format!(
            "{} holds {:?} labels, which do not fit a {task:?} run",
            path.display(),
            side.label
        )));
    }
    let width = match side.dtype {
        DType::F32 => 4,
        DType::F64 => 8,
    };
    let row_bytes = (side.d + 1) * width;
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    if bytes.len() != side.n * row_bytes {
        return Err(CliError::Data(format!(
            "{}: expected {} bytes for n={} d={} {:?}, found {}",
            path.display(),
            side.n * row_bytes,
            side.n,
            side.d,
            side.dtype,
            bytes.len()
        )));
    }
    let mut features = Vec::with_capacity(side.n * side.d);
    let mut class = Vec::new();
    let mut real = Vec::new();
    for (i, chunk) in bytes.chunks_exact(row_bytes).enumerate() {
        let row = i + 1;
        let vals = chunk.chunks_exact(width).map(|b| match side.dtype {
            DType::F32 => f32::from_le_bytes(b.try_into().expect("4 bytes")) as f64,
            DType::F64 => f64::from_le_bytes(b.try_into().expect("8 bytes")),
        });
        for (j, v) in vals.enumerate() {
            if !v.is_finite() {
                return Err(CliError::Data(format!("{}: row {row}: value {j} is not finite", path.display())));
            }
            if j < side.d {
                features.push(v);
            } else if task == Task::Classification {
                class.push(class_label(v, row).map_err(in_file(path))?);
            } else {
                real.push(v);
            }
        }
    }
    let labels = match task {
        Task::Classification => Labels::Class(class),
        Task::Regression => Labels::Real(real),
    };
    Dataset::new(features, side.d, labels).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Reads a seller file: one seller id per training row, or `point,seller`
/// pairs covering every row once. A header row is expected.
pub fn read_sellers(path: &Path, points: usize) -> Result<SellerMap> {
    let file = File::open(path).map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(BufReader::new(file));
    let mut ids: Vec<Option<u64>> = vec![None; points];
    let mut next = 0usize;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = i + 1;
        let num = |s: &str| {
            s.trim().parse::<u64>().map_err(|_| CliError::Data(format!("{}: row {row}: {s:?} is not a nonnegative integer", path.display())))
        };
        let (point, seller) = match rec.len() {
            1 => {
                next += 1;
                (next - 1, num(&rec[0])?)
            }
            2 => (num(&rec[0])? as usize, num(&rec[1])?),
            n => return Err(CliError::Data(format!("{}: row {row}: expected 1 or 2 fields, found {n}", path.display()))),
        };
        let slot = ids
            .get_mut(point)
            .ok_or_else(|| CliError::Data(format!("{}: row {row}: point {point} out of range", path.display())))?;
        if slot.replace(seller).is_some() {
            return Err(CliError::Data(format!("{}: row {row}: point {point} assigned twice", path.display())));
        }
    }
    let ids: Vec<u64> = ids
        .into_iter()
        .enumerate()
        .map(|(p, s)| s.ok_or_else(|| CliError::Data(format!("{}: point {p} has no seller", path.display()))))
        .collect::<Result<_>>()?;
    Ok(SellerMap::from_labels(&ids)?)
}

//! CSV ingestion and export of samples.
//!
//! Layout: a header row with one column per input coordinate and an optional
//! final column named `target`. Numbers are written in Rust's shortest
//! round-trip form, so a write/read cycle reproduces every `f64` bit-for-bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{LabelledSample, Matrix, UnlabelledSample};

pub const TARGET_COLUMN: &str = "target";

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn csv_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_table(reader: impl Read, path: &Path) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(path, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(csv_err(path, "missing header row"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e.to_string()))?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    csv_err(path, format!("line {}, column `{}`: `{field}` is not a number", i + 2, header[j]))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(csv_err(path, format!("line {}: non-finite value", i + 2)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(csv_err(path, "no data rows"));
    }
    Ok(Table { header, rows })
}

fn has_target(header: &[String]) -> bool {
    header.last().is_some_and(|h| h == TARGET_COLUMN)
}

pub fn read_labelled_from(reader: impl Read, path: &Path) -> Result<LabelledSample> {
    let table = read_table(reader, path)?;
    if !has_target(&table.header) {
        return Err(csv_err(path, "labelled sample needs a final `target` column"));
    }
    if table.header.len() < 2 {
        return Err(csv_err(path, "no feature columns"));
    }
    let d = table.header.len() - 1;
    let mut data = Vec::with_capacity(table.rows.len() * d);
    let mut targets = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        data.extend_from_slice(&row[..d]);
        targets.push(row[d]);
    }
    let inputs = Matrix::from_flat(table.rows.len(), d, data)?;
    LabelledSample::new(inputs, targets, path.display().to_string())
}

/// Reads inputs; a trailing `target` column, if present, is ignored.
pub fn read_unlabelled_from(reader: impl Read, path: &Path) -> Result<UnlabelledSample> {
    let table = read_table(reader, path)?;
    let d = table.header.len() - usize::from(has_target(&table.header));
    if d == 0 {
        return Err(csv_err(path, "no feature columns"));
    }
    let mut data = Vec::with_capacity(table.rows.len() * d);
    for row in &table.rows {
        data.extend_from_slice(&row[..d]);
    }
    UnlabelledSample::new(Matrix::from_flat(table.rows.len(), d, data)?, path.display().to_string())
}

pub fn read_labelled(path: &Path) -> Result<LabelledSample> {
    read_labelled_from(open(path)?, path)
}

pub fn read_unlabelled(path: &Path) -> Result<UnlabelledSample> {
    read_unlabelled_from(open(path)?, path)
}

fn feature_header(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("x{j}")).collect()
}

fn write_rows<'a>(
    writer: impl Write,
    header: &[String],
    rows: impl Iterator<Item = Vec<f64>> + 'a,
    path: &Path,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| csv_err(path, e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_labelled_to(writer: impl Write, s: &LabelledSample, path: &Path) -> Result<()> {
    let mut header = feature_header(s.dim());
    header.push(TARGET_COLUMN.to_owned());
    let rows = s.inputs().iter_rows().zip(s.targets()).map(|(x, &y)| {
        let mut r = x.to_vec();
        r.push(y);
        r
    });
    write_rows(writer, &header, rows, path)
}

pub fn write_unlabelled_to(writer: impl Write, s: &UnlabelledSample, path: &Path) -> Result<()> {
    write_rows(writer, &feature_header(s.dim()), s.inputs().iter_rows().map(<[f64]>::to_vec), path)
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_labelled(path: &Path, s: &LabelledSample) -> Result<()> {
    write_labelled_to(create(path)?, s, path)
}

pub fn write_unlabelled(path: &Path, s: &UnlabelledSample) -> Result<()> {
    write_unlabelled_to(create(path)?, s, path)
}

/// Plain numeric matrix with a header (e.g. a sensitivity point set).
pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let table = read_table(open(path)?, path)?;
    Matrix::from_rows(&table.rows)
}

pub fn write_matrix(path: &Path, m: &Matrix, prefix: &str) -> Result<()> {
    let header: Vec<String> = (0..m.cols()).map(|j| format!("{prefix}{j}")).collect();
    write_rows(create(path)?, &header, m.iter_rows().map(<[f64]>::to_vec), path)
}

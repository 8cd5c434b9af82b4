//! CSV and JSON file formats.
//!
//! | file              | columns                     |
//! |-------------------|-----------------------------|
//! | input series      | `u` (rows t = 1..m)         |
//! | target / output   | `y`                         |
//! | weights           | `w` (rows k = 0..N)         |
//! | trajectory        | `t,x0,…,xN` (rows t = 0..M) |
//! | labelled series   | `series,label,t,u`          |
//! | separation curve  | `t,c_d,c_v,sep`             |
//! | NARMA dataset     | `t,u,y`                     |
//! | matrix            | one row per CSV record, header required |
//!
//! Floats are written with Rust's shortest round-trip formatting.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::readout::ReadoutWeights;
use crate::reservoir::{InputSeries, StateTrajectory};
use crate::separation::{LabeledSeries, SeparationReport};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_f64(s: &str, what: &str, row: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Format(format!("row {row}: {what} '{s}' is not a number")))
}

/// Reads a single numeric column named `column`.
pub fn read_column<R: Read>(reader: R, column: &str) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::Format(format!("missing column '{column}'")))?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = rec
            .get(idx)
            .ok_or_else(|| Error::Format(format!("row {}: missing field", row + 1)))?;
        out.push(parse_f64(field, column, row + 1)?);
    }
    Ok(out)
}

pub fn write_column<W: Write>(writer: W, column: &str, values: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record([column])?;
    for v in values {
        wtr.write_record([v.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_series_file(path: &Path) -> Result<InputSeries> {
    Ok(read_column(open(path)?, "u")?.into())
}

pub fn write_series_file(path: &Path, u: &InputSeries) -> Result<()> {
    write_column(create(path)?, "u", u.values())
}

pub fn read_weights_file(path: &Path) -> Result<ReadoutWeights> {
    Ok(ReadoutWeights::new(read_column(open(path)?, "w")?))
}

pub fn write_weights_file(path: &Path, w: &ReadoutWeights) -> Result<()> {
    write_column(create(path)?, "w", w.values())
}

pub fn write_trajectory<W: Write>(writer: W, traj: &StateTrajectory) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((0..traj.nodes()).map(|k| format!("x{k}")));
    wtr.write_record(&header)?;
    for (t, col) in traj.columns().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(col.iter().map(f64::to_string));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a trajectory written by [`write_trajectory`].
pub fn read_trajectory<R: Read>(reader: R) -> Result<StateTrajectory> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let nodes = rdr.headers()?.len().saturating_sub(1);
    let mut data = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for field in rec.iter().skip(1) {
            data.push(parse_f64(field, "state", row + 1)?);
        }
    }
    StateTrajectory::from_columns(nodes, data)
}

/// Reads `series,label,t,u` rows. Rows of one series may appear in any
/// order but must cover `t = 1..=m` exactly once.
pub fn read_labeled<R: Read>(reader: R) -> Result<Vec<LabeledSeries>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Format(format!("missing column '{name}'")))
    };
    let (si, li, ti, ui) = (col("series")?, col("label")?, col("t")?, col("u")?);

    let mut ids: Vec<String> = Vec::new();
    let mut rows: Vec<(String, Vec<(usize, f64)>)> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let get = |i: usize| {
            rec.get(i)
                .ok_or_else(|| Error::Format(format!("row {}: missing field", row + 1)))
        };
        let id = get(si)?.to_string();
        let label = get(li)?.to_string();
        if label.is_empty() {
            return Err(Error::Format(format!("row {}: empty class label", row + 1)));
        }
        let t: usize = get(ti)?
            .parse()
            .map_err(|_| Error::Format(format!("row {}: bad time index", row + 1)))?;
        let u = parse_f64(get(ui)?, "u", row + 1)?;
        let pos = match ids.iter().position(|x| *x == id) {
            Some(p) => p,
            None => {
                ids.push(id.clone());
                rows.push((label.clone(), Vec::new()));
                ids.len() - 1
            }
        };
        if rows[pos].0 != label {
            return Err(Error::Format(format!("series '{id}' has more than one label")));
        }
        rows[pos].1.push((t, u));
    }

    ids.into_iter()
        .zip(rows)
        .map(|(id, (label, mut pts))| {
            pts.sort_by_key(|p| p.0);
            if pts.iter().enumerate().any(|(i, p)| p.0 != i + 1) {
                return Err(Error::Format(format!(
                    "series '{id}': time indices must be 1..=m without gaps"
                )));
            }
            Ok(LabeledSeries::new(
                label,
                pts.into_iter().map(|p| p.1).collect::<Vec<_>>().into(),
            ))
        })
        .collect()
}

pub fn write_labeled<W: Write>(writer: W, samples: &[LabeledSeries]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["series", "label", "t", "u"])?;
    for (i, s) in samples.iter().enumerate() {
        for (t, v) in s.series.values().iter().enumerate() {
            wtr.write_record([i.to_string(), s.label.clone(), (t + 1).to_string(), v.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_separation_csv<W: Write>(writer: W, report: &SeparationReport) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["t", "c_d", "c_v", "sep"])?;
    for i in 0..report.times.len() {
        wtr.write_record([
            report.times[i].to_string(),
            report.c_d[i].to_string(),
            report.c_v[i].to_string(),
            report.sep[i].to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_narma_dataset<W: Write>(writer: W, input: &InputSeries, target: &[f64]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["t", "u", "y"])?;
    for (t, (u, y)) in input.values().iter().zip(target).enumerate() {
        wtr.write_record([(t + 1).to_string(), u.to_string(), y.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Dense matrix, one CSV record per row after a header line.
pub fn read_matrix<R: Read>(reader: R) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let cols = rdr.headers()?.len();
    let mut data = Vec::new();
    let mut rows = 0;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for field in rec.iter() {
            data.push(parse_f64(field, "entry", row + 1)?);
        }
        rows += 1;
    }
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyDesign);
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn open_file(path: &Path) -> Result<File> {
    open(path)
}

pub fn create_file(path: &Path) -> Result<File> {
    create(path)
}

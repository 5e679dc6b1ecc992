//! CSV reports with exact decimal round trip.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::DensityEstimate;
use crate::models::SamplePath;

/// 17 significant digits, enough to recover every `f64` bit for bit.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::validation(format!("csv: {other:?}")),
    }
}

/// Writes a header and rows of preformatted fields with `\n` line endings.
pub fn write_records<W: Write>(out: W, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::validation(format!(
                "row has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_records(file, header, rows)
}

/// Header and all numeric rows of a CSV document.
pub fn read_numeric<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::validation(format!("row {}: `{f}` is not a number", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn coord_names(d: usize) -> impl Iterator<Item = String> {
    (1..=d).map(|i| format!("x{i}"))
}

pub fn path_header(d: usize) -> Vec<String> {
    std::iter::once("t".to_string()).chain(coord_names(d)).collect()
}

/// `t,x1,...,xd`, one row per stored time including `t = 0`.
pub fn write_path<W: Write>(out: W, path: &SamplePath) -> Result<()> {
    let dt = path.dt();
    let rows = path.rows().enumerate().map(|(i, x)| {
        std::iter::once(fmt_f64(i as f64 * dt))
            .chain(x.iter().map(|&v| fmt_f64(v)))
            .collect()
    });
    write_records(out, &path_header(path.dim()), rows)
}

/// Reads a path written by [`write_path`]; the step is recovered from the last time stamp.
pub fn read_path<R: Read>(input: R) -> Result<SamplePath> {
    let (header, rows) = read_numeric(input)?;
    if header.len() < 2 || header != path_header(header.len() - 1) {
        return Err(Error::validation("path CSV header must be t,x1,...,xd"));
    }
    let d = header.len() - 1;
    if rows.len() < 2 {
        return Err(Error::validation("path CSV needs at least two rows"));
    }
    let n = rows.len() - 1;
    let dt = (rows[n][0] - rows[0][0]) / n as f64;
    let mut states = Vec::with_capacity(rows.len() * d);
    for (i, row) in rows.iter().enumerate() {
        let expected = rows[0][0] + i as f64 * dt;
        if (row[0] - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            return Err(Error::validation(format!("path CSV row {} breaks the uniform time grid", i + 1)));
        }
        states.extend_from_slice(&row[1..]);
    }
    SamplePath::new(d, dt, states, 0, 0, "csv")
}

/// `x1,...,xd,rho_hat`, last axis varying fastest.
pub fn write_estimate<W: Write>(out: W, est: &DensityEstimate) -> Result<()> {
    let d = est.grid.dim();
    let header: Vec<String> = coord_names(d).chain(std::iter::once("rho_hat".to_string())).collect();
    let rows = est.grid.points().zip(&est.values).map(|(x, &v)| {
        x.iter()
            .map(|&c| fmt_f64(c))
            .chain(std::iter::once(fmt_f64(v)))
            .collect()
    });
    write_records(out, &header, rows)
}

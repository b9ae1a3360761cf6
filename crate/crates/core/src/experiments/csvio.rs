//! CSV output of the tables and sweeps, and CSV matrix input.
//!
//! Floats are written with 17 significant digits, non-finite values as
//! `diverged`, and cells that do not apply are left empty.

use super::sweep::ErrorRecord;
use super::tables::{ConditioningRow, GeometryTable};
use crate::error::{Error, Result};
use crate::kernels::DenseMatrix;
use crate::manifold::StiefelPoint;
use std::io::{Read, Write};
use std::path::Path;

pub const DIVERGED: &str = "diverged";

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        DIVERGED.to_string()
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_conditioning<W: Write>(rows: &[ConditioningRow], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["m", "cond_monomial", "cond_arnoldi"])?;
    for r in rows {
        w.write_record([r.m.to_string(), format_float(r.cond_monomial), format_float(r.cond_arnoldi)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_geometry<W: Write>(table: &GeometryTable, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "node_index",
        "t",
        "kappa_unstabilized",
        "kappa_maxvol",
        "kappa_householder",
        "kappa_householder_spectral",
    ])?;
    for r in &table.rows {
        w.write_record([
            r.node_index.to_string(),
            format_float(r.t),
            format_float(r.kappa_unstabilized),
            format_float(r.kappa_maxvol),
            format_float(r.kappa_householder),
            format_float(r.kappa_householder_spectral),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(records: &[ErrorRecord], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["t", "method", "rel_error", "orth_defect", "vel_error"])?;
    for r in records {
        w.write_record([
            format_float(r.t),
            r.method.name().to_string(),
            format_float(r.rel_error),
            format_float(r.orth_defect),
            r.vel_error.map(format_float).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: one row per entry of each evaluated representative.
pub fn write_evaluations<W: Write>(points: &[f64], values: &[StiefelPoint], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["point_index", "s", "row", "col", "value"])?;
    for (i, (s, u)) in points.iter().zip(values).enumerate() {
        let m = u.matrix();
        for c in 0..m.cols() {
            for r in 0..m.rows() {
                w.write_record([
                    i.to_string(),
                    format_float(*s),
                    r.to_string(),
                    c.to_string(),
                    format_float(m[(r, c)]),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a headerless numeric CSV into a matrix (one CSV record per row).
pub fn read_matrix<R: Read>(input: R) -> Result<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(input);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .map_err(|_| Error::Format(format!("line {}: `{cell}` is not a number", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || width == 0 || rows.iter().any(|r| r.len() != width) {
        return Err(Error::Format("matrix file must have equally long, nonempty rows".into()));
    }
    DenseMatrix::new(
        rows.len(),
        width,
        (0..width).flat_map(|c| rows.iter().map(move |r| r[c])).collect(),
    )
}

pub fn read_matrix_file(path: &Path) -> Result<DenseMatrix> {
    read_matrix(std::fs::File::open(path)?)
}

/// Writes a matrix as headerless CSV, one row per line.
pub fn write_matrix<W: Write>(m: &DenseMatrix, out: W) -> Result<()> {
    let mut w = writer(out);
    for r in 0..m.rows() {
        w.write_record(m.row(r).into_iter().map(format_float))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(f64::NAN), "diverged");
        assert_eq!(format_float(f64::INFINITY), "diverged");
    }

    #[test]
    fn matrix_round_trip() {
        let m = DenseMatrix::from_fn(3, 2, |r, c| (r as f64 + 0.1) / (c as f64 + 3.0));
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn bad_matrices() {
        assert!(read_matrix("1,2\n3\n".as_bytes()).is_err());
        assert!(read_matrix("1,x\n".as_bytes()).is_err());
        assert!(read_matrix("".as_bytes()).is_err());
        let m = read_matrix("# comment\n1, 2\n\n3, 4\n".as_bytes()).unwrap();
        assert_eq!(m, DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]));
    }
}

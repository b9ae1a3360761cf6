//! `GMIV1` model container.
//!
//! Layout: the 5 magic bytes `GMIV1`, then sections, each a 4-byte ASCII
//! tag, a little-endian `u64` payload length in bytes, and the payload.
//! Every number is a little-endian `u64` or `f64`; matrices are stored
//! column-major, preceded by their row and column counts where the shape is
//! not implied by `HEAD`.
//!
//! | tag    | payload |
//! |--------|---------|
//! | `HEAD` | mode, kind, n, p, ref_index, m, degree (u64); scale, shift, start (f64); ill-conditioned flag (u64) |
//! | `NODE` | m node values |
//! | `CHRT` | Householder factors (n x p), taus (p), signs (p) |
//! | `HESS` | Hessenberg matrix ((degree+1) x degree) |
//! | `BASQ` | rows, cols, basis at the fit rows |
//! | `COEF` | rows, cols, coefficients |

use crate::error::{Error, Result};
use crate::interpolant::{GrassmannInterpolant, InterpolationMode};
use crate::kernels::{DenseMatrix, HouseholderQr};
use crate::manifold::MvChart;
use crate::polybasis::{AffineMap, ArnoldiModel, BasisKind, ModelParts};
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 5] = b"GMIV1";

#[derive(Default)]
struct Payload(Vec<u8>);

impl Payload {
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn floats(&mut self, v: &[f64]) {
        v.iter().for_each(|&x| self.f64(x));
    }

    fn matrix_with_shape(&mut self, m: &DenseMatrix) {
        self.u64(m.rows() as u64);
        self.u64(m.cols() as u64);
        self.floats(m.as_slice());
    }
}

fn section<W: Write>(out: &mut W, tag: &[u8; 4], payload: Payload) -> Result<()> {
    out.write_all(tag)?;
    out.write_all(&(payload.0.len() as u64).to_le_bytes())?;
    out.write_all(&payload.0)?;
    Ok(())
}

pub fn write_model<W: Write>(interp: &GrassmannInterpolant, mut out: W) -> Result<()> {
    let chart = interp.chart();
    let model = interp.model();
    let map = model.map();
    out.write_all(MAGIC)?;

    let mut head = Payload::default();
    head.u64(match interp.mode() {
        InterpolationMode::Lagrange => 0,
        InterpolationMode::Hermite => 1,
    });
    head.u64(model.kind().code());
    for v in [chart.n(), chart.p(), chart.ref_index(), model.nodes().len(), model.degree()] {
        head.u64(v as u64);
    }
    head.f64(map.scale);
    head.f64(map.shift);
    head.f64(model.start());
    head.u64(model.ill_conditioned() as u64);
    section(&mut out, b"HEAD", head)?;

    let mut node = Payload::default();
    node.floats(model.nodes());
    section(&mut out, b"NODE", node)?;

    let qr = chart.householder();
    let mut chrt = Payload::default();
    chrt.floats(qr.factors().as_slice());
    chrt.floats(qr.taus());
    chrt.floats(qr.signs());
    section(&mut out, b"CHRT", chrt)?;

    let mut hess = Payload::default();
    hess.floats(model.hessenberg().as_slice());
    section(&mut out, b"HESS", hess)?;

    let mut basq = Payload::default();
    basq.matrix_with_shape(model.basis());
    section(&mut out, b"BASQ", basq)?;

    let mut coef = Payload::default();
    coef.matrix_with_shape(model.coefficients());
    section(&mut out, b"COEF", coef)?;
    out.flush()?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    what: &'static str,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < len {
            return Err(Error::Format(format!("section {} is truncated", self.what)));
        }
        let (head, rest) = self.bytes.split_at(len);
        self.bytes = rest;
        Ok(head)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("count does not fit in memory".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn floats(&mut self, count: usize) -> Result<Vec<f64>> {
        let bytes = self.take(count.checked_mul(8).ok_or_else(|| Error::Format("size overflow".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<DenseMatrix> {
        let count = rows.checked_mul(cols).ok_or_else(|| Error::Format("size overflow".into()))?;
        Ok(DenseMatrix::from_col_major(rows, cols, self.floats(count)?))
    }

    fn matrix_with_shape(&mut self) -> Result<DenseMatrix> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        self.matrix(rows, cols)
    }

    fn finish(&self) -> Result<()> {
        if self.bytes.is_empty() {
            Ok(())
        } else {
            Err(Error::Format(format!("section {} has trailing bytes", self.what)))
        }
    }
}

const ORDER: [(&[u8; 4], &str); 6] = [
    (b"HEAD", "HEAD"),
    (b"NODE", "NODE"),
    (b"CHRT", "CHRT"),
    (b"HESS", "HESS"),
    (b"BASQ", "BASQ"),
    (b"COEF", "COEF"),
];

pub fn read_model<R: Read>(mut input: R) -> Result<GrassmannInterpolant> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut file = Cursor {
        bytes: &bytes,
        what: "header",
    };
    if file.take(MAGIC.len()).ok() != Some(MAGIC.as_slice()) {
        return Err(Error::Format("not a GMIV1 model file".into()));
    }
    let mut sections = Vec::with_capacity(ORDER.len());
    for (tag, name) in ORDER {
        file.what = name;
        if file.take(4)? != tag.as_slice() {
            return Err(Error::Format(format!("expected section {name}")));
        }
        let len = file.usize()?;
        sections.push(Cursor {
            bytes: file.take(len)?,
            what: name,
        });
    }
    file.what = "file";
    file.finish()?;
    let [mut head, mut node, mut chrt, mut hess, mut basq, mut coef]: [Cursor; 6] =
        sections.try_into().map_err(|_| Error::Format("missing sections".into()))?;

    let mode = head.u64()?;
    let kind = BasisKind::from_code(head.u64()?).ok_or_else(|| Error::Format("unknown basis kind".into()))?;
    let n = head.usize()?;
    let p = head.usize()?;
    let ref_index = head.usize()?;
    let m = head.usize()?;
    let degree = head.usize()?;
    let map = AffineMap {
        scale: head.f64()?,
        shift: head.f64()?,
    };
    let start = head.f64()?;
    let ill_conditioned = head.u64()? != 0;
    head.finish()?;
    if (mode == 1) != kind.is_hermite() || mode > 1 {
        return Err(Error::Format("mode does not match the basis kind".into()));
    }
    if p == 0 || n < p || m == 0 || ref_index >= m {
        return Err(Error::Format("inconsistent dimensions in HEAD".into()));
    }

    let nodes = node.floats(m)?;
    node.finish()?;

    let factors = chrt.matrix(n, p)?;
    let taus = chrt.floats(p)?;
    let signs = chrt.floats(p)?;
    chrt.finish()?;
    let chart = MvChart::from_householder(HouseholderQr::from_parts(factors, taus, signs)?, ref_index);

    let h = hess.matrix(degree + 1, degree)?;
    hess.finish()?;
    let q = basq.matrix_with_shape()?;
    basq.finish()?;
    let coeffs = coef.matrix_with_shape()?;
    coef.finish()?;

    let model = ArnoldiModel::from_parts(ModelParts {
        kind,
        nodes,
        degree,
        map,
        h,
        q,
        coeffs,
        start,
        ill_conditioned,
    })?;
    GrassmannInterpolant::from_parts(chart, model)
}

pub fn save_model(interp: &GrassmannInterpolant, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_model(interp, std::io::BufWriter::new(file))
}

pub fn load_model(path: &Path) -> Result<GrassmannInterpolant> {
    read_model(std::io::BufReader::new(std::fs::File::open(path)?))
}

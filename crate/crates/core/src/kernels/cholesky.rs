use super::DenseMatrix;
use crate::error::{Error, Result};

/// Lower-triangular `L` with `L L^T = S` for symmetric positive definite `S`.
pub fn cholesky_spd(s: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, c) = s.shape();
    if n != c {
        return Err(Error::DimensionMismatch(format!(
            "cholesky needs a square matrix, got {n}x{c}"
        )));
    }
    let norm = s.frobenius_norm();
    let asym = DenseMatrix::from_fn(n, n, |i, j| s[(i, j)] - s[(j, i)]).frobenius_norm();
    if asym > 1e-12 * norm {
        return Err(Error::NotSymmetric(asym));
    }

    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        // NaN pivots fail this test too
        if !(d > 0.0) {
            return Err(Error::NotSpd { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / djj;
        }
    }
    Ok(l)
}

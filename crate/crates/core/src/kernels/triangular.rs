use super::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Solve `op(T) X = B`.
    Left,
    /// Solve `X op(T) = B`.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Triangle {
    Lower,
    Upper,
}

/// Solves a triangular system with `op(T) = T` or `T^T`.
///
/// Only the selected triangle of `t` is read.
pub fn solve_triangular(
    t: &DenseMatrix,
    b: &DenseMatrix,
    side: Side,
    triangle: Triangle,
    transpose: bool,
) -> Result<DenseMatrix> {
    let n = t.rows();
    if t.cols() != n {
        return Err(Error::DimensionMismatch("triangular matrix must be square".into()));
    }
    let dmax = (0..n).fold(0.0_f64, |m, i| m.max(t[(i, i)].abs()));
    let dmin = (0..n).fold(f64::INFINITY, |m, i| m.min(t[(i, i)].abs()));
    if n > 0 && !(dmin > 1e-14 * dmax) {
        return Err(Error::SingularTriangular(if dmax > 0.0 { dmin / dmax } else { 0.0 }));
    }

    match side {
        Side::Left => {
            if b.rows() != n {
                return Err(Error::DimensionMismatch(format!(
                    "left solve: T is {n}x{n}, B has {} rows",
                    b.rows()
                )));
            }
            // op(T) is lower iff (Lower, no transpose) or (Upper, transpose)
            let effective_lower = (triangle == Triangle::Lower) != transpose;
            let entry = |i: usize, j: usize| if transpose { t[(j, i)] } else { t[(i, j)] };
            let mut x = b.clone();
            for k in 0..x.cols() {
                let col = x.col_mut(k);
                if effective_lower {
                    for i in 0..n {
                        let mut s = col[i];
                        for j in 0..i {
                            s -= entry(i, j) * col[j];
                        }
                        col[i] = s / entry(i, i);
                    }
                } else {
                    for i in (0..n).rev() {
                        let mut s = col[i];
                        for j in i + 1..n {
                            s -= entry(i, j) * col[j];
                        }
                        col[i] = s / entry(i, i);
                    }
                }
            }
            Ok(x)
        }
        Side::Right => {
            if b.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "right solve: T is {n}x{n}, B has {} columns",
                    b.cols()
                )));
            }
            // X op(T) = B  <=>  op(T)^T X^T = B^T
            let xt = solve_triangular(t, &b.transpose(), Side::Left, triangle, !transpose)?;
            Ok(xt.transpose())
        }
    }
}

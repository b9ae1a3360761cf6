use super::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `M = U diag(sigma) V^T`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `rows x r` with `r = min(rows, cols)`
    pub u: DenseMatrix,
    /// nonincreasing, nonnegative
    pub sigma: Vec<f64>,
    /// `cols x r`
    pub v: DenseMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(cols);

    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = dot(a.col(i), a.col(i));
                let beta = dot(a.col(j), a.col(j));
                let gamma = dot(a.col(i), a.col(j));
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<(usize, f64)> = (0..cols).map(|j| (j, norm2(a.col(j)))).collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1));

    let mut u = DenseMatrix::zeros(rows, cols);
    let mut vs = DenseMatrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    let smax = order.first().map_or(0.0, |o| o.1);
    let mut deficient = Vec::new();
    for (k, &(j, s)) in order.iter().enumerate() {
        sigma.push(s);
        vs.col_mut(k).copy_from_slice(v.col(j));
        if s > 0.0 && s > f64::MIN_POSITIVE * smax.max(1.0) {
            for (dst, src) in u.col_mut(k).iter_mut().zip(a.col(j)) {
                *dst = src / s;
            }
        } else {
            deficient.push(k);
        }
    }
    complete_basis(&mut u, &deficient);
    Ok(Svd { u, sigma, v: vs })
}

fn rotate(a: &mut DenseMatrix, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..a.rows() {
        let x = a[(r, i)];
        let y = a[(r, j)];
        a[(r, i)] = c * x - s * y;
        a[(r, j)] = s * x + c * y;
    }
}

/// Fills the listed (zero) columns of `u` with unit vectors orthogonal to
/// the remaining ones.
fn complete_basis(u: &mut DenseMatrix, missing: &[usize]) {
    let rows = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|k| !missing.contains(k)).collect();
    let mut candidate = 0;
    for &k in missing {
        while candidate < rows {
            let mut e = vec![0.0; rows];
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &f in &filled {
                    let h = dot(u.col(f), &e);
                    for (ei, ui) in e.iter_mut().zip(u.col(f)) {
                        *ei -= h * ui;
                    }
                }
            }
            let nrm = norm2(&e);
            if nrm > 1e-8 {
                for (dst, src) in u.col_mut(k).iter_mut().zip(&e) {
                    *dst = src / nrm;
                }
                filled.push(k);
                break;
            }
        }
    }
}

/// Spectral condition number `sigma_max / sigma_min`; `+inf` when
/// `sigma_min < 1e-300` or the decomposition fails.
pub fn cond2(m: &DenseMatrix) -> f64 {
    match svd(m) {
        Ok(s) => {
            let smax = s.sigma.first().copied().unwrap_or(0.0);
            let smin = s.sigma.last().copied().unwrap_or(0.0);
            if smin < 1e-300 {
                f64::INFINITY
            } else {
                smax / smin
            }
        }
        Err(_) => f64::INFINITY,
    }
}

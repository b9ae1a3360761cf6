use crate::error::{Error, Result};
use crate::kernels::{dot, norm2, DenseMatrix};

/// Relative size below which a new subdiagonal entry counts as breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

pub(crate) struct Krylov {
    /// `(k+1) x k` upper Hessenberg
    pub h: DenseMatrix,
    /// `rows x (k+1)` orthonormal
    pub q: DenseMatrix,
}

/// Arnoldi process for `k` steps with modified Gram-Schmidt and one
/// unconditional reorthogonalization pass.
pub(crate) fn arnoldi(op: impl Fn(&[f64], &mut [f64]), start: &[f64], k: usize) -> Result<Krylov> {
    let rows = start.len();
    let mut q = DenseMatrix::zeros(rows, k + 1);
    let mut h = DenseMatrix::zeros(k + 1, k);
    let nrm = norm2(start);
    for (dst, src) in q.col_mut(0).iter_mut().zip(start) {
        *dst = src / nrm;
    }
    let mut h_norm_sq = 0.0;
    let mut v = vec![0.0; rows];
    for j in 0..k {
        op(q.col(j), &mut v);
        for _pass in 0..2 {
            for i in 0..=j {
                let qi = q.col(i);
                let c = dot(qi, &v);
                h[(i, j)] += c;
                for (vr, qr) in v.iter_mut().zip(qi) {
                    *vr -= c * qr;
                }
            }
        }
        let sub = norm2(&v);
        h_norm_sq += (0..=j).map(|i| h[(i, j)] * h[(i, j)]).sum::<f64>() + sub * sub;
        if !(sub >= BREAKDOWN_TOL * h_norm_sq.sqrt()) || sub == 0.0 {
            return Err(Error::Breakdown { step: j, value: sub });
        }
        h[(j + 1, j)] = sub;
        for (dst, src) in q.col_mut(j + 1).iter_mut().zip(&v) {
            *dst = src / sub;
        }
    }
    Ok(Krylov { h, q })
}

/// Runs the recurrence encoded by `h` at the points `x`, starting from the
/// constant `start`. Returns the value basis and its derivative with
/// respect to `x`, each `len(x) x (k+1)`.
///
/// The derivative part is the same recurrence as the lower block of the
/// augmented operator `[X 0; I X]`, so it serves the confluent models as is.
pub(crate) fn eval_basis(h: &DenseMatrix, start: f64, x: &[f64]) -> (DenseMatrix, DenseMatrix) {
    let k = h.cols();
    let mut wf = DenseMatrix::zeros(x.len(), k + 1);
    let mut wd = DenseMatrix::zeros(x.len(), k + 1);
    wf.col_mut(0).fill(start);
    for j in 0..k {
        let sub = h[(j + 1, j)];
        for r in 0..x.len() {
            let mut f = x[r] * wf[(r, j)];
            let mut d = wf[(r, j)] + x[r] * wd[(r, j)];
            for i in 0..=j {
                f -= h[(i, j)] * wf[(r, i)];
                d -= h[(i, j)] * wd[(r, i)];
            }
            wf[(r, j + 1)] = f / sub;
            wd[(r, j + 1)] = d / sub;
        }
    }
    (wf, wd)
}

/// `diag(x)` as an operator.
pub(crate) fn diagonal_op(x: &[f64]) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |v, out| {
        for ((o, vi), xi) in out.iter_mut().zip(v).zip(x) {
            *o = xi * vi;
        }
    }
}

/// The confluent operator `[X 0; I X]` acting on stacked `[f; d]`.
pub(crate) fn confluent_op(x: &[f64]) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |v, out| {
        let m = x.len();
        let (f, d) = v.split_at(m);
        let (of, od) = out.split_at_mut(m);
        for i in 0..m {
            of[i] = x[i] * f[i];
            od[i] = f[i] + x[i] * d[i];
        }
    }
}

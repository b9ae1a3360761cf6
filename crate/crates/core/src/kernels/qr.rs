use super::{norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Relative threshold on `|R[j,j]|` below which a factorization is reported
/// as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Householder QR of an `n x p` matrix (`n >= p`) kept in compact form.
///
/// `Q = H_0 H_1 ... H_{p-1} D` where `H_j = I - tau_j v_j v_j^T` and `D` is a
/// diagonal sign matrix chosen so that `diag(R) >= 0`. The reflector vectors
/// live below the diagonal of `factors` with an implicit unit leading entry.
#[derive(Clone, Debug, PartialEq)]
pub struct HouseholderQr {
    factors: DenseMatrix,
    taus: Vec<f64>,
    signs: Vec<f64>,
    input_norm: f64,
}

impl HouseholderQr {
    /// Factorizes `m`. Never fails on ill-conditioning; see
    /// [`HouseholderQr::check_rank`].
    pub fn new(m: &DenseMatrix) -> Self {
        let (n, p) = m.shape();
        assert!(n >= p, "householder QR needs rows >= cols, got {n}x{p}");
        let input_norm = m.frobenius_norm();
        let mut a = m.clone();
        let mut taus = Vec::with_capacity(p);
        let mut signs = Vec::with_capacity(p);

        for j in 0..p {
            let (alpha, sigma) = {
                let col = &a.col(j)[j..];
                (col[0], norm2(&col[1..]))
            };
            let (tau, beta) = if sigma == 0.0 {
                (0.0, alpha)
            } else {
                let beta = -alpha.signum() * alpha.hypot(sigma);
                let scale = 1.0 / (alpha - beta);
                for v in &mut a.col_mut(j)[j + 1..] {
                    *v *= scale;
                }
                ((beta - alpha) / beta, beta)
            };
            a[(j, j)] = beta;
            if tau != 0.0 {
                for k in j + 1..p {
                    apply_reflector(&mut a, j, tau, k);
                }
            }
            taus.push(tau);
            signs.push(if beta < 0.0 { -1.0 } else { 1.0 });
        }

        Self {
            factors: a,
            taus,
            signs,
            input_norm,
        }
    }

    /// Rebuilds a factorization from its compact parts (used when loading
    /// serialized charts).
    pub fn from_parts(factors: DenseMatrix, taus: Vec<f64>, signs: Vec<f64>) -> Result<Self> {
        let p = factors.cols();
        if taus.len() != p || signs.len() != p || factors.rows() < p {
            return Err(Error::DimensionMismatch(
                "householder parts have inconsistent sizes".into(),
            ));
        }
        let r_norm = {
            let r = Self {
                factors: factors.clone(),
                taus: taus.clone(),
                signs: signs.clone(),
                input_norm: 0.0,
            }
            .r();
            r.frobenius_norm()
        };
        Ok(Self {
            factors,
            taus,
            signs,
            input_norm: r_norm,
        })
    }

    pub fn rows(&self) -> usize {
        self.factors.rows()
    }

    pub fn cols(&self) -> usize {
        self.factors.cols()
    }

    pub fn factors(&self) -> &DenseMatrix {
        &self.factors
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// Errors when some `|R[j,j]| < 1e-12 * ||M||_F`.
    pub fn check_rank(&self) -> Result<()> {
        let tol = RANK_TOL * self.input_norm;
        for j in 0..self.cols() {
            let d = self.factors[(j, j)].abs();
            if !(d >= tol) || d == 0.0 {
                return Err(Error::RankDeficient { column: j, value: d });
            }
        }
        Ok(())
    }

    /// Upper-triangular `p x p` factor with nonnegative diagonal.
    pub fn r(&self) -> DenseMatrix {
        let p = self.cols();
        DenseMatrix::from_fn(p, p, |i, j| {
            if i <= j {
                self.signs[i] * self.factors[(i, j)]
            } else {
                0.0
            }
        })
    }

    /// `b <- Q^T b` in place; `b` has `n` rows.
    pub fn apply_qt(&self, b: &mut DenseMatrix) {
        assert_eq!(b.rows(), self.rows(), "apply_qt row mismatch");
        for j in 0..self.cols() {
            let tau = self.taus[j];
            if tau == 0.0 {
                continue;
            }
            for k in 0..b.cols() {
                self.reflect_column(j, tau, b.col_mut(k));
            }
        }
        for (j, &s) in self.signs.iter().enumerate() {
            if s < 0.0 {
                for k in 0..b.cols() {
                    b[(j, k)] = -b[(j, k)];
                }
            }
        }
    }

    /// `b <- Q b` in place.
    pub fn apply_q(&self, b: &mut DenseMatrix) {
        assert_eq!(b.rows(), self.rows(), "apply_q row mismatch");
        for (j, &s) in self.signs.iter().enumerate() {
            if s < 0.0 {
                for k in 0..b.cols() {
                    b[(j, k)] = -b[(j, k)];
                }
            }
        }
        for j in (0..self.cols()).rev() {
            let tau = self.taus[j];
            if tau == 0.0 {
                continue;
            }
            for k in 0..b.cols() {
                self.reflect_column(j, tau, b.col_mut(k));
            }
        }
    }

    pub fn q_full(&self) -> DenseMatrix {
        let mut q = DenseMatrix::identity(self.rows());
        self.apply_q(&mut q);
        q
    }

    /// First `p` columns of `Q`.
    pub fn q_thin(&self) -> DenseMatrix {
        let mut q = DenseMatrix::eye(self.rows(), self.cols());
        self.apply_q(&mut q);
        q
    }

    /// Least-squares solution of `M x = b` via `R x = (Q^T b)[..p]`.
    ///
    /// No conditioning guard: a tiny pivot yields huge or non-finite
    /// coefficients, which the baselines record as divergence.
    pub fn solve_least_squares(&self, b: &DenseMatrix) -> DenseMatrix {
        let p = self.cols();
        let mut qtb = b.clone();
        self.apply_qt(&mut qtb);
        let r = self.r();
        let mut x = qtb.row_block(0, p);
        for k in 0..x.cols() {
            let col = x.col_mut(k);
            for i in (0..p).rev() {
                let mut s = col[i];
                for j in i + 1..p {
                    s -= r[(i, j)] * col[j];
                }
                col[i] = s / r[(i, i)];
            }
        }
        x
    }

    fn reflect_column(&self, j: usize, tau: f64, x: &mut [f64]) {
        let v = &self.factors.col(j)[j + 1..];
        let tail = &mut x[j..];
        let mut s = tail[0];
        for (vi, xi) in v.iter().zip(&tail[1..]) {
            s += vi * xi;
        }
        s *= tau;
        tail[0] -= s;
        for (vi, xi) in v.iter().zip(&mut tail[1..]) {
            *xi -= s * vi;
        }
    }
}

fn apply_reflector(a: &mut DenseMatrix, j: usize, tau: f64, k: usize) {
    let rows = a.rows();
    let data = a.as_mut_slice();
    let (left, right) = data.split_at_mut(k * rows);
    let v = &left[j * rows + j + 1..(j + 1) * rows];
    let x = &mut right[j..rows];
    let mut s = x[0];
    for (vi, xi) in v.iter().zip(&x[1..]) {
        s += vi * xi;
    }
    s *= tau;
    x[0] -= s;
    for (vi, xi) in v.iter().zip(&mut x[1..]) {
        *xi -= s * vi;
    }
}

/// Full Householder QR: returns `(Q_full, R)` with `Q_full` `n x n`
/// orthogonal, `R` `p x p` upper triangular with nonnegative diagonal, and
/// `Q_full [R; 0] = M`.
pub fn householder_qr(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (n, p) = m.shape();
    if n < p {
        return Err(Error::DimensionMismatch(format!(
            "householder_qr needs rows >= cols, got {n}x{p}"
        )));
    }
    let qr = HouseholderQr::new(m);
    qr.check_rank()?;
    Ok((qr.q_full(), qr.r()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::rng::UniformStream;

    fn random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = UniformStream::new(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.next_symmetric())
    }

    fn stacked_r(r: &DenseMatrix, n: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(n, r.cols());
        for i in 0..r.rows() {
            for j in 0..r.cols() {
                out[(i, j)] = r[(i, j)];
            }
        }
        out
    }

    #[test]
    fn identity_block_gives_identity_frame() {
        let m = DenseMatrix::eye(5, 3);
        let (q, r) = householder_qr(&m).unwrap();
        assert_eq!(q, DenseMatrix::identity(5));
        assert_eq!(r, DenseMatrix::identity(3));
    }

    #[test]
    fn unit_vector_in_second_slot() {
        let m = DenseMatrix::from_rows(&[&[0.0], &[1.0]]);
        let (q, r) = householder_qr(&m).unwrap();
        assert_eq!(r[(0, 0)], 1.0);
        let first = q.col(0);
        assert!(first[0].abs() < 1e-15 && (first[1] - 1.0).abs() < 1e-15);
        assert!(q.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn random_reconstruction_residual() {
        let m = random(6, 3, 42);
        let (q, r) = householder_qr(&m).unwrap();
        let recon = q.matmul(&stacked_r(&r, 6));
        assert!(recon.sub(&m).frobenius_norm() <= 1e-13 * m.frobenius_norm());
        assert!(q.orthonormality_defect() <= 1e-13);
        for j in 0..3 {
            assert!(r[(j, j)] >= 0.0);
        }
    }

    #[test]
    fn tall_matrix_residuals() {
        let m = random(2000, 16, 3);
        let qr = HouseholderQr::new(&m);
        let q = qr.q_thin();
        let recon = q.matmul(&qr.r());
        assert!(recon.sub(&m).frobenius_norm() <= 1e-13 * m.frobenius_norm());
        assert!(q.orthonormality_defect() <= 1e-13);
    }

    #[test]
    fn deterministic_bits() {
        let m = random(40, 7, 11);
        let a = householder_qr(&m).unwrap();
        let b = householder_qr(&m).unwrap();
        assert_eq!(a.0.as_slice(), b.0.as_slice());
        assert_eq!(a.1.as_slice(), b.1.as_slice());
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]);
        assert!(matches!(
            householder_qr(&m),
            Err(Error::RankDeficient { column: 1, .. })
        ));
    }

    #[test]
    fn apply_q_inverts_apply_qt() {
        let m = random(9, 4, 5);
        let qr = HouseholderQr::new(&m);
        let b = random(9, 2, 6);
        let mut c = b.clone();
        qr.apply_qt(&mut c);
        qr.apply_q(&mut c);
        assert!(c.sub(&b).frobenius_norm() < 1e-14);
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let a = random(10, 3, 8);
        let b = random(10, 1, 9);
        let x = HouseholderQr::new(&a).solve_least_squares(&b);
        // residual must be orthogonal to range(A)
        let res = a.matmul(&x).sub(&b);
        assert!(a.t_matmul(&res).frobenius_norm() < 1e-13);
    }
}

use super::DenseMatrix;
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch("LU needs a square matrix".into()));
        }
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > 0.0) {
                return Err(Error::Singular(k));
            }
            if piv != k {
                perm.swap(piv, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= d;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                if u == 0.0 {
                    continue;
                }
                for i in k + 1..n {
                    let l = lu[(i, k)];
                    lu[(i, j)] -= l * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// `A X = B`
    pub fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.dim();
        assert_eq!(b.rows(), n, "LU solve row mismatch");
        let mut x = DenseMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for k in 0..x.cols() {
            let col = x.col_mut(k);
            for i in 0..n {
                let mut s = col[i];
                for j in 0..i {
                    s -= self.lu[(i, j)] * col[j];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * col[j];
                }
                col[i] = s / self.lu[(i, i)];
            }
        }
        x
    }

    /// `A^T X = B`
    pub fn solve_transposed(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.dim();
        assert_eq!(b.rows(), n, "LU solve row mismatch");
        let mut y = b.clone();
        for k in 0..y.cols() {
            let col = y.col_mut(k);
            // U^T z = b
            for i in 0..n {
                let mut s = col[i];
                for j in 0..i {
                    s -= self.lu[(j, i)] * col[j];
                }
                col[i] = s / self.lu[(i, i)];
            }
            // L^T w = z
            for i in (0..n).rev() {
                let mut s = col[i];
                for j in i + 1..n {
                    s -= self.lu[(j, i)] * col[j];
                }
                col[i] = s;
            }
        }
        // x = P^T w
        let mut x = DenseMatrix::zeros(n, b.cols());
        for i in 0..n {
            for k in 0..b.cols() {
                x[(self.perm[i], k)] = y[(i, k)];
            }
        }
        x
    }

    /// `X A = B`, i.e. `B A^{-1}` without forming the inverse.
    pub fn solve_right(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(b.cols(), self.dim(), "LU right solve column mismatch");
        self.solve_transposed(&b.transpose()).transpose()
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve(&DenseMatrix::identity(self.dim()))
    }
}

#![allow(dead_code)]

use grassmann_mv::experiments::rng::UniformStream;
use grassmann_mv::{DenseMatrix, StiefelPoint};

pub fn random_matrix(rows: usize, cols: usize, rng: &mut UniformStream) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.next_symmetric())
}

pub fn random_point(n: usize, p: usize, rng: &mut UniformStream) -> StiefelPoint {
    StiefelPoint::from_span(&random_matrix(n, p, rng)).expect("random span has full rank")
}

pub fn random_orthogonal(p: usize, rng: &mut UniformStream) -> DenseMatrix {
    random_point(p, p, rng).into_matrix()
}

/// Integer uniform on `lo..=hi`.
pub fn draw(rng: &mut UniformStream, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

/// Central differences at steps `1e-4` and `1e-5` against `exact`.
/// Accepted when both errors are below `1e-7`, or when the error ratio is
/// 100 +- 20 (second-order convergence above the rounding floor).
pub struct FdCheck {
    pub coarse: f64,
    pub fine: f64,
}

impl FdCheck {
    pub fn run(f: impl Fn(f64) -> DenseMatrix, t: f64, exact: &DenseMatrix) -> Self {
        let err = |h: f64| {
            let mut d = f(t + h).sub(&f(t - h)).scaled(0.5 / h);
            d.axpy(-1.0, exact);
            d.frobenius_norm()
        };
        Self {
            coarse: err(1e-4),
            fine: err(1e-5),
        }
    }

    pub fn ratio(&self) -> f64 {
        self.coarse / self.fine
    }

    pub fn passes(&self) -> bool {
        self.coarse.max(self.fine) <= 1e-7 || (80.0..=120.0).contains(&self.ratio())
    }
}

//! Benchmark trajectories on the Grassmann manifold with exact lifts.

use super::rng::{UniformStream, NOISE_STREAM};
use crate::error::{Error, Result};
use crate::kernels::{solve_triangular, DenseMatrix, HouseholderQr, Side, Triangle};
use crate::manifold::{StiefelPoint, TangentLift};

/// Orthonormal factor of `Y = U R` (`diag(R) >= 0`) and the horizontal
/// derivative `Udot = (I - U U^T) Ydot R^{-1}`.
pub fn qr_with_lift(y: &DenseMatrix, ydot: &DenseMatrix) -> Result<(StiefelPoint, TangentLift)> {
    let qr = HouseholderQr::new(y);
    qr.check_rank()?;
    let u = qr.q_thin();
    let r = qr.r();
    let mut d = solve_triangular(&r, ydot, Side::Right, Triangle::Upper, false)?;
    let vertical = u.matmul(&u.t_matmul(&d));
    d.axpy(-1.0, &vertical);
    let point = StiefelPoint::new(u)?;
    let lift = TangentLift::new(&point, d)?;
    Ok((point, lift))
}

/// `Y(t) = Y0 + sin(3t) Y1 + cos(3t) Y2 + exp(t) Y3`, `U(t) = qr(Y(t))`,
/// with the `Y_i` entries uniform on `[0, 1)`.
#[derive(Clone, Debug)]
pub struct TranscendentalCurve {
    y: [DenseMatrix; 4],
}

impl TranscendentalCurve {
    /// Draws `Y0`, `Y1`, `Y2`, `Y3` in that order, each column-major.
    pub fn new(n: usize, p: usize, seed: u64) -> Result<Self> {
        if p == 0 || n < p {
            return Err(Error::Config(format!("need n >= p >= 1, got n = {n}, p = {p}")));
        }
        let mut rng = UniformStream::new(seed);
        let mut draw = || DenseMatrix::from_fn(n, p, |_, _| rng.next_f64());
        let y = [draw(), draw(), draw(), draw()];
        Ok(Self { y })
    }

    pub fn n(&self) -> usize {
        self.y[0].rows()
    }

    pub fn p(&self) -> usize {
        self.y[0].cols()
    }

    pub fn y(&self, t: f64) -> DenseMatrix {
        let mut out = self.y[0].clone();
        out.axpy((3.0 * t).sin(), &self.y[1]);
        out.axpy((3.0 * t).cos(), &self.y[2]);
        out.axpy(t.exp(), &self.y[3]);
        out
    }

    pub fn ydot(&self, t: f64) -> DenseMatrix {
        let mut out = self.y[1].scaled(3.0 * (3.0 * t).cos());
        out.axpy(-3.0 * (3.0 * t).sin(), &self.y[2]);
        out.axpy(t.exp(), &self.y[3]);
        out
    }

    pub fn sample(&self, t: f64) -> Result<(StiefelPoint, TangentLift)> {
        qr_with_lift(&self.y(t), &self.ydot(t))
    }

    pub fn point(&self, t: f64) -> Result<StiefelPoint> {
        let qr = HouseholderQr::new(&self.y(t));
        qr.check_rank()?;
        StiefelPoint::new(qr.q_thin())
    }
}

pub fn gen_transcendental(n: usize, p: usize, t: f64, seed: u64) -> Result<(StiefelPoint, TangentLift)> {
    TranscendentalCurve::new(n, p, seed)?.sample(t)
}

/// Replaces each sample `U_i` by `qr(U_i + eps E_i / ||E_i||_F)` with `E_i`
/// uniform on `[-1, 1)` from the noise stream of `seed`, and projects each
/// lift onto the horizontal space of its perturbed sample.
pub fn perturb_samples(
    samples: &[(StiefelPoint, TangentLift)],
    eps: f64,
    seed: u64,
) -> Result<Vec<(StiefelPoint, TangentLift)>> {
    let mut rng = UniformStream::new(seed ^ NOISE_STREAM);
    samples
        .iter()
        .map(|(u, lift)| {
            let (n, p) = u.matrix().shape();
            let e = DenseMatrix::from_fn(n, p, |_, _| rng.next_symmetric());
            let mut y = u.matrix().clone();
            y.axpy(eps / e.frobenius_norm(), &e);
            let qr = HouseholderQr::new(&y);
            qr.check_rank()?;
            let noisy = StiefelPoint::new(qr.q_thin())?;
            let q = noisy.matrix();
            let mut d = lift.matrix().clone();
            d.axpy(-1.0, &q.matmul(&q.t_matmul(lift.matrix())));
            let lift = TangentLift::new(&noisy, d)?;
            Ok((noisy, lift))
        })
        .collect()
}

/// `|Y| / |F|` above which the wavenumber is treated as resonant.
pub const RESONANCE_RATIO: f64 = 1e8;
/// Width of the Gaussian sources.
pub const SOURCE_WIDTH: f64 = 0.05;

/// 1-D Helmholtz snapshots `A(k) Y = F`, `A(k) = L - k^2 I`, with `L` the
/// second-difference Dirichlet Laplacian on `n` interior points of `[0, 1]`
/// and `p` Gaussian sources centred at `j / (p + 1)`.
#[derive(Clone, Debug)]
pub struct HelmholtzProblem {
    n: usize,
    f: DenseMatrix,
}

impl HelmholtzProblem {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p == 0 || n < p {
            return Err(Error::Config(format!("need n >= p >= 1, got n = {n}, p = {p}")));
        }
        let h = 1.0 / (n + 1) as f64;
        let f = DenseMatrix::from_fn(n, p, |i, j| {
            let x = (i + 1) as f64 * h;
            let c = (j + 1) as f64 / (p + 1) as f64;
            (-(x - c) * (x - c) / (2.0 * SOURCE_WIDTH * SOURCE_WIDTH)).exp()
        });
        Ok(Self { n, f })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sources(&self) -> &DenseMatrix {
        &self.f
    }

    fn step2(&self) -> f64 {
        let h = 1.0 / (self.n + 1) as f64;
        1.0 / (h * h)
    }

    /// `A(k) X`
    pub fn apply(&self, k: f64, x: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let s = self.step2();
        let diag = 2.0 * s - k * k;
        DenseMatrix::from_fn(n, x.cols(), |i, c| {
            let mut v = diag * x[(i, c)];
            if i > 0 {
                v -= s * x[(i - 1, c)];
            }
            if i + 1 < n {
                v -= s * x[(i + 1, c)];
            }
            v
        })
    }

    /// `Y(k)` and `Y'(k) = A(k)^{-1} (2 k Y(k))`.
    pub fn solve(&self, k: f64) -> Result<(DenseMatrix, DenseMatrix)> {
        let s = self.step2();
        let solver = Tridiagonal::new(self.n, -s, 2.0 * s - k * k, -s)?;
        let y = solver.solve(&self.f);
        let ratio = y.frobenius_norm() / self.f.frobenius_norm();
        if !(ratio <= RESONANCE_RATIO) {
            return Err(Error::NearResonance(ratio));
        }
        let yp = solver.solve(&y.scaled(2.0 * k));
        Ok((y, yp))
    }

    pub fn sample(&self, k: f64) -> Result<(StiefelPoint, TangentLift)> {
        let (y, yp) = self.solve(k)?;
        qr_with_lift(&y, &yp)
    }

    pub fn point(&self, k: f64) -> Result<StiefelPoint> {
        Ok(self.sample(k)?.0)
    }
}

pub fn gen_helmholtz(n: usize, p: usize, k: f64) -> Result<(StiefelPoint, TangentLift)> {
    HelmholtzProblem::new(n, p)?.sample(k)
}

/// LU factorization with partial pivoting of a constant-coefficient
/// tridiagonal matrix (LAPACK `gtsv` elimination order); `A(k)` is
/// indefinite, so pivoting is needed.
struct Tridiagonal {
    /// row `i` of `U` holds `u0[i]` on the diagonal, `u1[i]`, `u2[i]` to its right
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl Tridiagonal {
    fn new(n: usize, lower: f64, diag: f64, upper: f64) -> Result<Self> {
        let mut d = vec![diag; n];
        let mut du = vec![upper; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            let dl = lower;
            if d[i].abs() >= dl.abs() {
                if d[i] == 0.0 {
                    return Err(Error::Singular(i));
                }
                let f = dl / d[i];
                mult[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl;
                mult[i] = f;
                swapped[i] = true;
                d[i] = dl;
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                du[i] = tmp;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            return Err(Error::Singular(n - 1));
        }
        Ok(Self {
            u0: d,
            u1: du,
            u2: du2,
            mult,
            swapped,
        })
    }

    fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.u0.len();
        let mut x = b.clone();
        for c in 0..x.cols() {
            let col = x.col_mut(c);
            for i in 0..n.saturating_sub(1) {
                if self.swapped[i] {
                    col.swap(i, i + 1);
                    col[i + 1] -= self.mult[i] * col[i];
                } else {
                    col[i + 1] -= self.mult[i] * col[i];
                }
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                if i + 1 < n {
                    s -= self.u1[i] * col[i + 1];
                }
                if i + 2 < n {
                    s -= self.u2[i] * col[i + 2];
                }
                col[i] = s / self.u0[i];
            }
        }
        x
    }
}

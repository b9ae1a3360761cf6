//! Stiefel representatives, the Householder MV chart, and the maps between
//! Grassmann points and MV coordinates.
//!
//! For a representative `U` and chart frame `Q`, write `Q^T U = [U1; U2]`
//! with `U1` of size `p x p`. The MV coordinates are `Xi = U2 U1^{-1}`, the
//! coordinate velocity of a lift `T = Q^T Udot = [T1; T2]` is
//! `XiDot = (T2 - Xi T1) U1^{-1}`, and the retraction is
//! `Q [I; Xi] L^{-T}` with `L L^T = I + Xi^T Xi`.

use crate::error::{Error, Result};
use crate::kernels::{cholesky_spd, cond2, solve_triangular, svd, DenseMatrix, HouseholderQr, Lu, Side, Triangle};

/// Maximum `||U^T U - I||_F` accepted for a Stiefel representative.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Lifts with horizontality defect up to this value are accepted as is.
pub const HORIZONTAL_TOL: f64 = 1e-10;
/// Lifts with defect in `(HORIZONTAL_TOL, HORIZONTAL_REJECT]` are projected;
/// larger defects are rejected.
pub const HORIZONTAL_REJECT: f64 = 1e-6;
/// `cond2(U1)` above which a sample is considered outside the chart.
pub const CHART_COND_LIMIT: f64 = 1e12;

/// An `n x p` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint {
    u: DenseMatrix,
}

impl StiefelPoint {
    pub fn new(u: DenseMatrix) -> Result<Self> {
        let (n, p) = u.shape();
        if p == 0 || n < p {
            return Err(Error::DimensionMismatch(format!(
                "Stiefel point needs n >= p >= 1, got {n}x{p}"
            )));
        }
        if !u.is_finite() {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        let defect = u.orthonormality_defect();
        if !(defect <= ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal(defect));
        }
        Ok(Self { u })
    }

    /// Wraps a matrix without checking orthonormality. Baseline outputs go
    /// through here since their loss of orthogonality is part of what gets
    /// measured.
    pub fn new_unchecked(u: DenseMatrix) -> Self {
        Self { u }
    }

    /// Orthonormalizes an arbitrary full-rank `n x p` matrix (thin QR with
    /// nonnegative `diag(R)`).
    pub fn from_span(y: &DenseMatrix) -> Result<Self> {
        let qr = HouseholderQr::new(y);
        qr.check_rank()?;
        Self::new(qr.q_thin())
    }

    #[inline]
    pub fn matrix(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.u
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn p(&self) -> usize {
        self.u.cols()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        self.u.orthonormality_defect()
    }

    /// Same subspace, different gauge: `U G`.
    pub fn regauged(&self, g: &DenseMatrix) -> Self {
        Self {
            u: self.u.matmul(g),
        }
    }
}

/// Horizontal tangent representative `Udot` at a Stiefel point
/// (`U^T Udot = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct TangentLift {
    udot: DenseMatrix,
}

impl TangentLift {
    /// Validates `udot` against `base`. Small horizontality defects are
    /// projected away (`Udot - U U^T Udot`), large ones are rejected. The
    /// defect is measured relative to `max(1, ||Udot||_F)`.
    pub fn new(base: &StiefelPoint, udot: DenseMatrix) -> Result<Self> {
        if udot.shape() != base.matrix().shape() {
            return Err(Error::DimensionMismatch(format!(
                "lift is {:?}, base is {:?}",
                udot.shape(),
                base.matrix().shape()
            )));
        }
        if !udot.is_finite() {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        let u = base.matrix();
        let utd = u.t_matmul(&udot);
        let defect = utd.frobenius_norm() / udot.frobenius_norm().max(1.0);
        if defect <= HORIZONTAL_TOL {
            Ok(Self { udot })
        } else if defect <= HORIZONTAL_REJECT {
            let mut projected = udot;
            projected.axpy(-1.0, &u.matmul(&utd));
            Ok(Self { udot: projected })
        } else {
            Err(Error::NotHorizontal(defect))
        }
    }

    pub fn zeros(n: usize, p: usize) -> Self {
        Self {
            udot: DenseMatrix::zeros(n, p),
        }
    }

    pub fn new_unchecked(udot: DenseMatrix) -> Self {
        Self { udot }
    }

    #[inline]
    pub fn matrix(&self) -> &DenseMatrix {
        &self.udot
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.udot
    }
}

/// A single coordinate chart: the orthogonal frame of a Householder QR of
/// the reference representative, stored in compact reflector form.
#[derive(Clone, Debug, PartialEq)]
pub struct MvChart {
    qr: HouseholderQr,
    ref_index: usize,
}

impl MvChart {
    pub fn from_reference(reference: &StiefelPoint, ref_index: usize) -> Result<Self> {
        let qr = HouseholderQr::new(reference.matrix());
        qr.check_rank()?;
        Ok(Self { qr, ref_index })
    }

    /// Reassembles a chart from serialized reflectors.
    pub fn from_householder(qr: HouseholderQr, ref_index: usize) -> Self {
        Self { qr, ref_index }
    }

    pub fn householder(&self) -> &HouseholderQr {
        &self.qr
    }

    pub fn ref_index(&self) -> usize {
        self.ref_index
    }

    pub fn n(&self) -> usize {
        self.qr.rows()
    }

    pub fn p(&self) -> usize {
        self.qr.cols()
    }

    pub fn n_coord(&self) -> usize {
        self.p() * (self.n() - self.p())
    }

    /// The full `n x n` orthogonal frame.
    pub fn frame(&self) -> DenseMatrix {
        self.qr.q_full()
    }

    /// `Q^T M`
    pub fn to_local(&self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = m.clone();
        self.qr.apply_qt(&mut out);
        out
    }

    /// `Q M`
    pub fn from_local(&self, mut m: DenseMatrix) -> DenseMatrix {
        self.qr.apply_q(&mut m);
        m
    }

    fn check_shape(&self, u: &DenseMatrix) -> Result<()> {
        if u.shape() != (self.n(), self.p()) {
            return Err(Error::DimensionMismatch(format!(
                "chart is for {}x{}, sample is {:?}",
                self.n(),
                self.p(),
                u.shape()
            )));
        }
        Ok(())
    }
}

/// MV coordinates `Xi` (and optionally `XiDot`), both `(n-p) x p`.
#[derive(Clone, Debug, PartialEq)]
pub struct MvCoordinates {
    pub xi: DenseMatrix,
    pub xi_dot: Option<DenseMatrix>,
}

impl MvCoordinates {
    pub fn new(xi: DenseMatrix) -> Self {
        Self { xi, xi_dot: None }
    }

    pub fn with_velocity(xi: DenseMatrix, xi_dot: DenseMatrix) -> Self {
        assert_eq!(xi.shape(), xi_dot.shape(), "coordinate/velocity shape mismatch");
        Self {
            xi,
            xi_dot: Some(xi_dot),
        }
    }

    /// Rebuilds coordinates from column-major vectors of length `p (n-p)`.
    pub fn from_vecs(n: usize, p: usize, x: &[f64], xdot: Option<&[f64]>) -> Result<Self> {
        let len = p * (n - p);
        if x.len() != len || xdot.is_some_and(|d| d.len() != len) {
            return Err(Error::DimensionMismatch(format!(
                "coordinate vector length must be {len}"
            )));
        }
        let xi = DenseMatrix::from_col_major(n - p, p, x.to_vec());
        let xi_dot = xdot.map(|d| DenseMatrix::from_col_major(n - p, p, d.to_vec()));
        Ok(Self { xi, xi_dot })
    }

    pub fn n_coord(&self) -> usize {
        self.xi.rows() * self.xi.cols()
    }

    /// `vec(Xi)`
    pub fn vectorized(&self) -> &[f64] {
        self.xi.as_slice()
    }
}

pub fn build_chart(samples: &[StiefelPoint], ref_index: usize) -> Result<MvChart> {
    let reference = samples.get(ref_index).ok_or_else(|| {
        Error::Config(format!(
            "reference index {ref_index} out of range for {} samples",
            samples.len()
        ))
    })?;
    let shape = reference.matrix().shape();
    if let Some(bad) = samples.iter().position(|s| s.matrix().shape() != shape) {
        return Err(Error::DimensionMismatch(format!(
            "sample {bad} does not match the shape {shape:?} of the reference"
        )));
    }
    MvChart::from_reference(reference, ref_index)
}

/// `Xi = U2 U1^{-1}` for an already transformed representative
/// `[U1; U2]`. Shared with the permutation charts of the baselines.
pub(crate) fn partition_coordinates(local: &DenseMatrix, p: usize) -> Result<(DenseMatrix, Lu)> {
    let u1 = local.row_block(0, p);
    let u2 = local.row_block(p, local.rows());
    let c = cond2(&u1);
    if !(c <= CHART_COND_LIMIT) {
        return Err(Error::ChartSingular(c));
    }
    let lu = Lu::new(&u1)?;
    Ok((lu.solve_right(&u2), lu))
}

/// `XiDot = (T2 - Xi T1) U1^{-1}`
pub(crate) fn partition_velocity(local_dot: &DenseMatrix, xi: &DenseMatrix, u1: &Lu) -> DenseMatrix {
    let p = xi.cols();
    let t1 = local_dot.row_block(0, p);
    let t2 = local_dot.row_block(p, local_dot.rows());
    let rhs = t2.sub(&xi.matmul(&t1));
    u1.solve_right(&rhs)
}

pub(crate) struct LocalRetraction {
    pub factor: DenseMatrix,
    pub u: DenseMatrix,
}

/// `[I; Xi] L^{-T}` with `L L^T = I + Xi^T Xi`.
pub(crate) fn retract_local(xi: &DenseMatrix) -> Result<LocalRetraction> {
    let p = xi.cols();
    let mut gram = xi.t_matmul(xi);
    for i in 0..p {
        gram[(i, i)] += 1.0;
    }
    let l = cholesky_spd(&gram)?;
    let stacked = DenseMatrix::identity(p).vstack(xi);
    let u = solve_triangular(&l, &stacked, Side::Right, Triangle::Lower, true)?;
    Ok(LocalRetraction { factor: l, u })
}

/// Horizontal lift `[K; XiDot + Xi K] L^{-T}` with
/// `K = -(I + Xi^T Xi)^{-1} Xi^T XiDot`.
pub(crate) fn retract_velocity_local(
    xi: &DenseMatrix,
    xi_dot: &DenseMatrix,
    l: &DenseMatrix,
) -> Result<DenseMatrix> {
    let rhs = xi.t_matmul(xi_dot);
    let y = solve_triangular(l, &rhs, Side::Left, Triangle::Lower, false)?;
    let k = solve_triangular(l, &y, Side::Left, Triangle::Lower, true)?.scaled(-1.0);
    let mut lower = xi_dot.clone();
    lower.axpy(1.0, &xi.matmul(&k));
    let stacked = k.vstack(&lower);
    solve_triangular(l, &stacked, Side::Right, Triangle::Lower, true)
}

pub fn to_coordinates(chart: &MvChart, u: &StiefelPoint) -> Result<MvCoordinates> {
    chart.check_shape(u.matrix())?;
    let local = chart.to_local(u.matrix());
    let (xi, _) = partition_coordinates(&local, chart.p())?;
    Ok(MvCoordinates::new(xi))
}

pub fn coordinate_velocity(chart: &MvChart, u: &StiefelPoint, lift: &TangentLift) -> Result<MvCoordinates> {
    chart.check_shape(u.matrix())?;
    chart.check_shape(lift.matrix())?;
    let local = chart.to_local(u.matrix());
    let (xi, u1) = partition_coordinates(&local, chart.p())?;
    let local_dot = chart.to_local(lift.matrix());
    let xi_dot = partition_velocity(&local_dot, &xi, &u1);
    Ok(MvCoordinates::with_velocity(xi, xi_dot))
}

fn check_coords(chart: &MvChart, coords: &MvCoordinates) -> Result<()> {
    let expected = (chart.n() - chart.p(), chart.p());
    if coords.xi.shape() != expected {
        return Err(Error::DimensionMismatch(format!(
            "coordinates are {:?}, chart expects {expected:?}",
            coords.xi.shape()
        )));
    }
    Ok(())
}

pub fn reconstruct(chart: &MvChart, coords: &MvCoordinates) -> Result<StiefelPoint> {
    check_coords(chart, coords)?;
    let local = retract_local(&coords.xi)?;
    Ok(StiefelPoint::new_unchecked(chart.from_local(local.u)))
}

pub fn reconstruct_velocity(chart: &MvChart, coords: &MvCoordinates) -> Result<(StiefelPoint, TangentLift)> {
    check_coords(chart, coords)?;
    let xi_dot = coords
        .xi_dot
        .as_ref()
        .ok_or_else(|| Error::ModeMismatch("coordinate velocity missing".into()))?;
    let local = retract_local(&coords.xi)?;
    let lift = retract_velocity_local(&coords.xi, xi_dot, &local.factor)?;
    Ok((
        StiefelPoint::new_unchecked(chart.from_local(local.u)),
        TangentLift::new_unchecked(chart.from_local(lift)),
    ))
}

/// `P = U U^T`
pub fn projector(u: &StiefelPoint) -> DenseMatrix {
    u.matrix().matmul_t(u.matrix())
}

/// Projector velocity `Udot U^T + U Udot^T`.
pub fn projector_velocity(u: &StiefelPoint, lift: &TangentLift) -> DenseMatrix {
    let a = lift.matrix().matmul_t(u.matrix());
    a.add(&a.transpose())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceError {
    /// `||U1 U1^T - U2 U2^T||_F`
    pub absolute: f64,
    /// `absolute / ||U2 U2^T||_F = absolute / sqrt(p)`
    pub relative: f64,
}

/// Projector distance without forming `n x n` projectors.
///
/// Uses `||P1 - P2||_F^2 = 2 p - 2 ||U1^T U2||_F^2 = 2 ||U1 - U2 (U2^T U1)||_F^2`.
/// The residual form avoids the cancellation of the trace form, whose
/// floor is around `sqrt(eps)`.
pub fn subspace_error(u1: &StiefelPoint, u2: &StiefelPoint) -> SubspaceError {
    assert_eq!(u1.matrix().shape(), u2.matrix().shape(), "subspace_error shape mismatch");
    let a = u1.matrix();
    let b = u2.matrix();
    let mut residual = a.clone();
    residual.axpy(-1.0, &b.matmul(&b.t_matmul(a)));
    let absolute = std::f64::consts::SQRT_2 * residual.frobenius_norm();
    SubspaceError {
        absolute,
        relative: absolute / (u2.p() as f64).sqrt(),
    }
}

/// `||Pdot1 - Pdot2||_F` and its ratio to `||Pdot2||_F`, computed in an
/// orthonormal basis of `span[U1, Udot1, U2, Udot2]` so no `n x n` matrix is
/// formed.
pub fn projector_velocity_error(
    u1: &StiefelPoint,
    lift1: &TangentLift,
    u2: &StiefelPoint,
    lift2: &TangentLift,
) -> (f64, f64) {
    let n = u1.n();
    let p = u1.p();
    let compress = |z: Option<&DenseMatrix>, u: &DenseMatrix, d: &DenseMatrix| -> DenseMatrix {
        match z {
            Some(z) => {
                let zu = z.t_matmul(u);
                let zd = z.t_matmul(d);
                let a = zd.matmul_t(&zu);
                a.add(&a.transpose())
            }
            None => {
                let a = d.matmul_t(u);
                a.add(&a.transpose())
            }
        }
    };
    let basis = if n > 4 * p {
        let stacked = u1
            .matrix()
            .hstack(lift1.matrix())
            .hstack(u2.matrix())
            .hstack(lift2.matrix());
        Some(HouseholderQr::new(&stacked).q_thin())
    } else {
        None
    };
    let e1 = compress(basis.as_ref(), u1.matrix(), lift1.matrix());
    let e2 = compress(basis.as_ref(), u2.matrix(), lift2.matrix());
    let abs = e1.sub(&e2).frobenius_norm();
    let reference = e2.frobenius_norm();
    let rel = if reference > 0.0 { abs / reference } else { abs };
    (abs, rel)
}

/// `||U1^{-1}||_F` for the chart block of `U`.
pub fn geometric_condition(chart: &MvChart, u: &StiefelPoint) -> Result<f64> {
    chart.check_shape(u.matrix())?;
    let u1 = chart.to_local(u.matrix()).row_block(0, chart.p());
    block_condition(&u1)
}

/// Spectral variant `||U1^{-1}||_2 = 1 / sigma_min(U1)`.
pub fn geometric_condition_spectral(chart: &MvChart, u: &StiefelPoint) -> Result<f64> {
    chart.check_shape(u.matrix())?;
    let u1 = chart.to_local(u.matrix()).row_block(0, chart.p());
    let s = svd(&u1)?;
    let smin = s.sigma.last().copied().unwrap_or(0.0);
    if smin == 0.0 {
        return Err(Error::ChartSingular(f64::INFINITY));
    }
    Ok(1.0 / smin)
}

/// `||U1^{-1}||_F` through an explicit inverse.
pub(crate) fn block_condition(u1: &DenseMatrix) -> Result<f64> {
    let c = cond2(u1);
    if !(c <= CHART_COND_LIMIT) {
        return Err(Error::ChartSingular(c));
    }
    Ok(Lu::new(u1)?.inverse().frobenius_norm())
}

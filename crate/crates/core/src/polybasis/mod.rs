//! Discrete orthonormal polynomial bases built by the Arnoldi process.
//!
//! Nodes are mapped onto `[-1, 1]` before any recursion. Lagrange data use
//! Arnoldi on `diag(x)` (V+A). Hermite data use either Arnoldi on the
//! confluent operator `[X 0; I X]` (augmented), or a Hessenberg matrix taken
//! from a Chebyshev surrogate grid together with the differentiated
//! recurrence and a stacked least-squares solve (surrogate).

mod arnoldi;
pub mod nodes;

pub use arnoldi::BREAKDOWN_TOL;
pub use nodes::{chebyshev_nodes, equispaced, node_rescale, AffineMap};

use crate::error::{Error, Result};
use crate::kernels::{cond2, DenseMatrix, HouseholderQr};
use arnoldi::{arnoldi, confluent_op, diagonal_op, eval_basis};

/// `cond2` of the stacked surrogate system above which the model is flagged.
pub const STACKED_COND_LIMIT: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Lagrange,
    HermiteAugmented,
    HermiteSurrogate,
}

impl BasisKind {
    pub fn is_hermite(self) -> bool {
        !matches!(self, BasisKind::Lagrange)
    }

    pub fn code(self) -> u64 {
        match self {
            BasisKind::Lagrange => 0,
            BasisKind::HermiteAugmented => 1,
            BasisKind::HermiteSurrogate => 2,
        }
    }

    pub fn from_code(code: u64) -> Option<Self> {
        match code {
            0 => Some(BasisKind::Lagrange),
            1 => Some(BasisKind::HermiteAugmented),
            2 => Some(BasisKind::HermiteSurrogate),
            _ => None,
        }
    }
}

/// A fitted polynomial model: recurrence coefficients, the basis at the
/// fit rows, and coefficients for every data column.
#[derive(Clone, Debug, PartialEq)]
pub struct ArnoldiModel {
    kind: BasisKind,
    nodes: Vec<f64>,
    degree: usize,
    map: AffineMap,
    h: DenseMatrix,
    q: DenseMatrix,
    coeffs: DenseMatrix,
    start: f64,
    ill_conditioned: bool,
}

/// Raw parts of a model, for serialization.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParts {
    pub kind: BasisKind,
    pub nodes: Vec<f64>,
    pub degree: usize,
    pub map: AffineMap,
    pub h: DenseMatrix,
    pub q: DenseMatrix,
    pub coeffs: DenseMatrix,
    pub start: f64,
    pub ill_conditioned: bool,
}

impl ArnoldiModel {
    pub fn from_parts(parts: ModelParts) -> Result<Self> {
        let k = parts.degree;
        if parts.h.shape() != (k + 1, k) || parts.coeffs.rows() != k + 1 || parts.q.cols() != k + 1 {
            return Err(Error::DimensionMismatch(format!(
                "inconsistent model parts for degree {k}"
            )));
        }
        if (0..k).any(|j| !(parts.h[(j + 1, j)] > 0.0)) {
            return Err(Error::Breakdown { step: 0, value: 0.0 });
        }
        Ok(Self {
            kind: parts.kind,
            nodes: parts.nodes,
            degree: k,
            map: parts.map,
            h: parts.h,
            q: parts.q,
            coeffs: parts.coeffs,
            start: parts.start,
            ill_conditioned: parts.ill_conditioned,
        })
    }

    pub fn into_parts(self) -> ModelParts {
        ModelParts {
            kind: self.kind,
            nodes: self.nodes,
            degree: self.degree,
            map: self.map,
            h: self.h,
            q: self.q,
            coeffs: self.coeffs,
            start: self.start,
            ill_conditioned: self.ill_conditioned,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn map(&self) -> AffineMap {
        self.map
    }

    /// `(k+1) x k` Hessenberg recurrence matrix.
    pub fn hessenberg(&self) -> &DenseMatrix {
        &self.h
    }

    /// Basis over the fit rows: `m x (k+1)` for Lagrange, `2m x (k+1)`
    /// stacked `[Q_f; Q_d]` for Hermite models.
    pub fn basis(&self) -> &DenseMatrix {
        &self.q
    }

    /// `(k+1) x N` coefficients.
    pub fn coefficients(&self) -> &DenseMatrix {
        &self.coeffs
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    /// Set when the stacked surrogate system had `cond2 > 1e8`.
    pub fn ill_conditioned(&self) -> bool {
        self.ill_conditioned
    }

    pub fn n_columns(&self) -> usize {
        self.coeffs.cols()
    }

    /// Basis functions and their parameter derivatives at `points`.
    pub fn basis_at(&self, points: &[f64]) -> (DenseMatrix, DenseMatrix) {
        let x: Vec<f64> = points.iter().map(|&s| self.map.apply(s)).collect();
        let (wf, wd) = eval_basis(&self.h, self.start, &x);
        (wf, wd.scaled(self.map.scale))
    }

    /// Values and parameter derivatives of the fitted columns at `points`.
    pub fn evaluate(&self, points: &[f64]) -> (DenseMatrix, DenseMatrix) {
        let (wf, wd) = self.basis_at(points);
        (wf.matmul(&self.coeffs), wd.matmul(&self.coeffs))
    }
}

fn check_data(m: usize, data: &DenseMatrix, what: &str) -> Result<()> {
    if data.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} rows for {m} nodes",
            data.rows()
        )));
    }
    if !data.is_finite() {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    Ok(())
}

fn prepare(nodes: &[f64], degree: usize, max: usize) -> Result<(Vec<f64>, AffineMap)> {
    if degree > max {
        return Err(Error::DegreeTooHigh { degree, max });
    }
    let (x, map) = node_rescale(nodes)?;
    nodes::check_distinct(nodes)?;
    Ok((x, map))
}

/// Lagrange fit (V+A): Arnoldi on `diag(x)` from `e / sqrt(m)`, then
/// `A = Q^T data`.
pub fn va_fit(nodes: &[f64], data: &DenseMatrix, degree: usize) -> Result<ArnoldiModel> {
    let m = nodes.len();
    let (x, map) = prepare(nodes, degree, m.saturating_sub(1))?;
    check_data(m, data, "data")?;
    let start = 1.0 / (m as f64).sqrt();
    let kr = arnoldi(diagonal_op(&x), &vec![start; m], degree)?;
    let coeffs = kr.q.t_matmul(data);
    Ok(ArnoldiModel {
        kind: BasisKind::Lagrange,
        nodes: nodes.to_vec(),
        degree,
        map,
        h: kr.h,
        q: kr.q,
        coeffs,
        start,
        ill_conditioned: false,
    })
}

/// Values of a Lagrange model at `points`.
pub fn va_eval(model: &ArnoldiModel, points: &[f64]) -> Result<DenseMatrix> {
    if model.kind != BasisKind::Lagrange {
        return Err(Error::ModeMismatch("va_eval needs a Lagrange model".into()));
    }
    Ok(model.evaluate(points).0)
}

/// Hermite fit through the confluent operator `[X 0; I X]` started from
/// `[e; 0] / sqrt(m)`; `A = Q^T [values; derivs]`.
pub fn cva_fit_augmented(
    nodes: &[f64],
    values: &DenseMatrix,
    derivs: &DenseMatrix,
    degree: usize,
) -> Result<ArnoldiModel> {
    let m = nodes.len();
    let (x, map) = prepare(nodes, degree, (2 * m).saturating_sub(1))?;
    check_data(m, values, "values")?;
    check_data(m, derivs, "derivatives")?;
    if values.cols() != derivs.cols() {
        return Err(Error::DimensionMismatch("values and derivatives differ in width".into()));
    }
    let start = 1.0 / (m as f64).sqrt();
    let mut b = vec![0.0; 2 * m];
    b[..m].fill(start);
    let kr = arnoldi(confluent_op(&x), &b, degree)?;
    let rhs = values.vstack(&derivs.scaled(1.0 / map.scale));
    let coeffs = kr.q.t_matmul(&rhs);
    Ok(ArnoldiModel {
        kind: BasisKind::HermiteAugmented,
        nodes: nodes.to_vec(),
        degree,
        map,
        h: kr.h,
        q: kr.q,
        coeffs,
        start,
        ill_conditioned: false,
    })
}

/// Default surrogate grid size `max(k + 1, 2m)`.
pub fn default_aux_count(m: usize, degree: usize) -> usize {
    (degree + 1).max(2 * m)
}

/// Hermite fit with a Hessenberg matrix from Arnoldi on `aux_count`
/// Chebyshev points spanning `[-1, 1]`. The value and differentiated
/// recurrences are run at the actual nodes and the stacked system
/// `[Q_f; Q_d] A = [values; derivs]` is solved by Householder QR.
pub fn cva_fit_surrogate(
    nodes: &[f64],
    values: &DenseMatrix,
    derivs: &DenseMatrix,
    degree: usize,
    aux_count: Option<usize>,
) -> Result<ArnoldiModel> {
    let m = nodes.len();
    let (x, map) = prepare(nodes, degree, (2 * m).saturating_sub(1))?;
    check_data(m, values, "values")?;
    check_data(m, derivs, "derivatives")?;
    if values.cols() != derivs.cols() {
        return Err(Error::DimensionMismatch("values and derivatives differ in width".into()));
    }
    let n_aux = aux_count.unwrap_or_else(|| default_aux_count(m, degree));
    if n_aux < degree + 1 {
        return Err(Error::Config(format!(
            "surrogate grid of {n_aux} points cannot carry degree {degree}"
        )));
    }
    let grid = chebyshev_nodes(n_aux, -1.0, 1.0);
    let start = 1.0 / (n_aux as f64).sqrt();
    let kr = arnoldi(diagonal_op(&grid), &vec![start; n_aux], degree)?;
    let (qf, qd) = eval_basis(&kr.h, start, &x);
    let stacked = qf.vstack(&qd);
    let ill_conditioned = !(cond2(&stacked) <= STACKED_COND_LIMIT);
    let qr = HouseholderQr::new(&stacked);
    qr.check_rank()?;
    let rhs = values.vstack(&derivs.scaled(1.0 / map.scale));
    let coeffs = qr.solve_least_squares(&rhs);
    Ok(ArnoldiModel {
        kind: BasisKind::HermiteSurrogate,
        nodes: nodes.to_vec(),
        degree,
        map,
        h: kr.h,
        q: stacked,
        coeffs,
        start,
        ill_conditioned,
    })
}

/// Values and parameter derivatives of a Hermite model at `points`.
pub fn cva_eval(model: &ArnoldiModel, points: &[f64]) -> Result<(DenseMatrix, DenseMatrix)> {
    if !model.kind.is_hermite() {
        return Err(Error::ModeMismatch("cva_eval needs a Hermite model".into()));
    }
    Ok(model.evaluate(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> DenseMatrix {
        DenseMatrix::column_vector(values)
    }

    #[test]
    fn three_node_model() {
        let model = va_fit(&[-1.0, 0.0, 1.0], &column(&[1.0, 2.0, 3.0]), 1).unwrap();
        assert_eq!(model.map(), AffineMap::IDENTITY);
        let h = model.hessenberg();
        assert!(h[(0, 0)].abs() < 1e-16);
        assert!((h[(1, 0)] - 0.816496580927726).abs() < 1e-15);
        let (w, _) = model.basis_at(&[0.5]);
        assert!((w[(0, 0)] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[(0, 1)] - 0.3535533905932738).abs() < 1e-15);
    }

    #[test]
    fn constant_data() {
        let nodes = chebyshev_nodes(6, 0.0, 2.0);
        let model = va_fit(&nodes, &column(&[4.0; 6]), 5).unwrap();
        let a = model.coefficients();
        assert!((1..6).all(|i| a[(i, 0)].abs() < 1e-13));
        let v = va_eval(&model, &[0.1, 0.77, 1.9]).unwrap();
        assert!(v.as_slice().iter().all(|x| (x - 4.0).abs() < 1e-13));
    }

    #[test]
    fn quadratic_reproduction() {
        let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
        let data = column(&nodes.map(|t| t * t));
        let model = va_fit(&nodes, &data, 4).unwrap();
        let v = va_eval(&model, &[0.3]).unwrap();
        assert!((v[(0, 0)] - 0.09).abs() < 1e-13);
        let back = va_eval(&model, &nodes).unwrap();
        assert!(back.sub(&data).frobenius_norm() < 1e-13);
    }

    #[test]
    fn degree_and_node_errors() {
        assert!(matches!(
            va_fit(&[0.0, 1.0], &column(&[0.0, 1.0]), 2),
            Err(Error::DegreeTooHigh { degree: 2, max: 1 })
        ));
        assert!(matches!(
            va_fit(&[0.0, 1.0, 1.0], &column(&[0.0, 1.0, 2.0]), 1),
            Err(Error::NodeCollision(_))
        ));
        assert!(matches!(
            cva_fit_augmented(&[0.0, 1.0], &column(&[0.0; 2]), &column(&[0.0; 2]), 4),
            Err(Error::DegreeTooHigh { degree: 4, max: 3 })
        ));
    }

    #[test]
    fn single_node_hermite() {
        let model =
            cva_fit_augmented(&[0.0], &column(&[1.5]), &column(&[-0.5]), 1).unwrap();
        assert_eq!(model.hessenberg().as_slice(), &[0.0, 1.0]);
        assert_eq!(model.basis(), &DenseMatrix::identity(2));
        let (v, d) = cva_eval(&model, &[2.0]).unwrap();
        assert!((v[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((d[(0, 0)] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn cubic_hermite_both_approaches() {
        let nodes = [0.0, 1.0];
        let values = column(&[0.0, 1.0]);
        let derivs = column(&[0.0, 3.0]);
        let aug = cva_fit_augmented(&nodes, &values, &derivs, 3).unwrap();
        let sur = cva_fit_surrogate(&nodes, &values, &derivs, 3, None).unwrap();
        let probes = [-0.3, 0.2, 0.5, 0.9, 1.4];
        for model in [&aug, &sur] {
            let (v, d) = cva_eval(model, &probes).unwrap();
            for (i, &s) in probes.iter().enumerate() {
                assert!((v[(i, 0)] - s * s * s).abs() < 1e-12);
                assert!((d[(i, 0)] - 3.0 * s * s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_hermite_data() {
        let nodes = chebyshev_nodes(4, 0.0, 1.0);
        let model = cva_fit_augmented(&nodes, &column(&[2.0; 4]), &column(&[0.0; 4]), 7).unwrap();
        let (v, d) = cva_eval(&model, &nodes).unwrap();
        assert!(v.as_slice().iter().all(|x| (x - 2.0).abs() < 1e-13));
        assert!(d.max_abs() < 1e-12);
    }

    #[test]
    fn augmented_basis_is_orthonormal() {
        let nodes = chebyshev_nodes(10, 0.0, 1.0);
        let zeros = DenseMatrix::zeros(10, 1);
        let model = cva_fit_augmented(&nodes, &zeros, &zeros, 19).unwrap();
        assert!(model.basis().orthonormality_defect() <= 1e-12);
        assert!((cond2(model.basis()) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn surrogate_constant_basis_has_zero_derivative() {
        let nodes = chebyshev_nodes(3, 0.0, 1.0);
        let zeros = DenseMatrix::zeros(3, 1);
        let model = cva_fit_surrogate(&nodes, &zeros, &zeros, 5, None).unwrap();
        let q = model.basis();
        assert!((3..6).all(|r| q[(r, 0)] == 0.0));
        assert!(!model.ill_conditioned());
    }

    #[test]
    fn kind_checks() {
        let lag = va_fit(&[0.0, 1.0], &column(&[0.0, 1.0]), 1).unwrap();
        assert!(cva_eval(&lag, &[0.5]).is_err());
        let her = cva_fit_augmented(&[0.0, 1.0], &column(&[0.0, 1.0]), &column(&[1.0, 1.0]), 3).unwrap();
        assert!(va_eval(&her, &[0.5]).is_err());
    }
}

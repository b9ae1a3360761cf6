use crate::error::{Error, Result};
use crate::kernels::{cond2, DenseMatrix, HouseholderQr};
use crate::polybasis::AffineMap;

/// Polynomial in the monomial basis, fitted through a (confluent)
/// Vandermonde least-squares solve.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialModel {
    /// `(k+1) x N`, row `j` multiplies `x^j`
    pub coeffs: DenseMatrix,
    pub map: AffineMap,
    /// `cond2` of the system matrix that was solved
    pub cond: f64,
    pub confluent: bool,
}

impl MonomialModel {
    pub fn degree(&self) -> usize {
        self.coeffs.rows() - 1
    }

    /// Non-finite coefficients: the solve blew up.
    pub fn failed(&self) -> bool {
        !self.coeffs.is_finite()
    }
}

/// `V[i, j] = x_i^j`
pub fn vandermonde(x: &[f64], degree: usize) -> DenseMatrix {
    DenseMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32))
}

/// `V1[i, j] = j x_i^(j-1)`
pub fn vandermonde_derivative(x: &[f64], degree: usize) -> DenseMatrix {
    DenseMatrix::from_fn(x.len(), degree + 1, |i, j| {
        if j == 0 {
            0.0
        } else {
            j as f64 * x[i].powi(j as i32 - 1)
        }
    })
}

/// Monomial fit on the raw nodes.
pub fn monomial_fit(
    nodes: &[f64],
    values: &DenseMatrix,
    derivs: Option<&DenseMatrix>,
    degree: usize,
) -> Result<MonomialModel> {
    monomial_fit_mapped(nodes, values, derivs, degree, AffineMap::IDENTITY)
}

/// Monomial fit in the variable `x = map(t)`. Ill-conditioning is never an
/// error; it shows up in `cond` and in the coefficients.
pub fn monomial_fit_mapped(
    nodes: &[f64],
    values: &DenseMatrix,
    derivs: Option<&DenseMatrix>,
    degree: usize,
    map: AffineMap,
) -> Result<MonomialModel> {
    let m = nodes.len();
    if values.rows() != m || derivs.is_some_and(|d| d.shape() != values.shape()) {
        return Err(Error::DimensionMismatch(format!(
            "monomial fit: {m} nodes, values {:?}, derivatives {:?}",
            values.shape(),
            derivs.map(|d| d.shape())
        )));
    }
    let x: Vec<f64> = nodes.iter().map(|&t| map.apply(t)).collect();
    let (system, rhs) = match derivs {
        Some(d) => (
            vandermonde(&x, degree).vstack(&vandermonde_derivative(&x, degree)),
            values.vstack(&d.scaled(1.0 / map.scale)),
        ),
        None => (vandermonde(&x, degree), values.clone()),
    };
    if system.rows() < system.cols() {
        return Err(Error::DegreeTooHigh {
            degree,
            max: system.rows() - 1,
        });
    }
    let cond = cond2(&system);
    let coeffs = HouseholderQr::new(&system).solve_least_squares(&rhs);
    Ok(MonomialModel {
        coeffs,
        map,
        cond,
        confluent: derivs.is_some(),
    })
}

/// Horner evaluation of values and analytic parameter derivatives.
pub fn monomial_eval(model: &MonomialModel, points: &[f64]) -> (DenseMatrix, DenseMatrix) {
    let k = model.degree();
    let cols = model.coeffs.cols();
    let mut values = DenseMatrix::zeros(points.len(), cols);
    let mut derivs = DenseMatrix::zeros(points.len(), cols);
    for (r, &s) in points.iter().enumerate() {
        let x = model.map.apply(s);
        for c in 0..cols {
            let mut p = model.coeffs[(k, c)];
            let mut d = 0.0;
            for j in (0..k).rev() {
                d = d * x + p;
                p = p * x + model.coeffs[(j, c)];
            }
            values[(r, c)] = p;
            derivs[(r, c)] = d * model.map.scale;
        }
    }
    (values, derivs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polybasis::{equispaced, va_eval, va_fit};

    #[test]
    fn linear_data_exact() {
        let nodes = [0.0, 1.0, 2.0];
        let data = DenseMatrix::column_vector(&[1.0, 3.0, 5.0]);
        let model = monomial_fit(&nodes, &data, None, 1).unwrap();
        assert!((model.coeffs[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((model.coeffs[(1, 0)] - 2.0).abs() < 1e-14);
        let (v, d) = monomial_eval(&model, &[2.0]);
        assert!((v[(0, 0)] - 5.0).abs() < 1e-14);
        assert!((d[(0, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_model() {
        let model = monomial_fit(&[0.0, 0.5, 1.0], &DenseMatrix::column_vector(&[2.0; 3]), None, 2).unwrap();
        let (v, d) = monomial_eval(&model, &[-3.0, 0.1, 7.0]);
        assert!(v.as_slice().iter().all(|x| (x - 2.0).abs() < 1e-12));
        assert!(d.max_abs() < 1e-11);
    }

    #[test]
    fn table_one_conditioning() {
        let c12 = monomial_fit(&equispaced(12, -1.0, 1.0), &DenseMatrix::zeros(12, 1), None, 11)
            .unwrap()
            .cond;
        assert!((c12 / 4.08e4 - 1.0).abs() < 0.05);
        let c40 = monomial_fit(&equispaced(40, -1.0, 1.0), &DenseMatrix::zeros(40, 1), None, 39)
            .unwrap()
            .cond;
        assert!(c40 > 7.24e16 && c40 < 7.24e18);
    }

    #[test]
    fn confluent_system_of_the_noise_scenario_is_ill_conditioned() {
        let nodes = crate::polybasis::chebyshev_nodes(10, 0.0, 1.0);
        let zeros = DenseMatrix::zeros(10, 1);
        let model = monomial_fit(&nodes, &zeros, Some(&zeros), 19).unwrap();
        assert!(model.confluent);
        assert!(model.cond > 1e12, "cond {:e}", model.cond);
    }

    #[test]
    fn agrees_with_arnoldi_at_low_degree() {
        let nodes = equispaced(9, -1.0, 1.0);
        let data = DenseMatrix::from_fn(9, 2, |i, c| (nodes[i] * (1.0 + c as f64)).sin());
        let mono = monomial_fit(&nodes, &data, None, 5).unwrap();
        let arn = va_fit(&nodes, &data, 5).unwrap();
        let probes = [-0.9, -0.2, 0.33, 0.8];
        let (a, _) = monomial_eval(&mono, &probes);
        let b = va_eval(&arn, &probes).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-10);
    }

    #[test]
    fn confluent_cubic() {
        let nodes = [0.0, 1.0];
        let model = monomial_fit(
            &nodes,
            &DenseMatrix::column_vector(&[0.0, 1.0]),
            Some(&DenseMatrix::column_vector(&[0.0, 3.0])),
            3,
        )
        .unwrap();
        assert!(model.confluent);
        let (v, d) = monomial_eval(&model, &[0.5]);
        assert!((v[(0, 0)] - 0.125).abs() < 1e-13);
        assert!((d[(0, 0)] - 0.75).abs() < 1e-13);
    }

    #[test]
    fn mapped_variable() {
        let map = AffineMap::onto_unit(10.0, 20.0).unwrap();
        let nodes = [10.0, 15.0, 20.0];
        let data = DenseMatrix::column_vector(&nodes.map(|t| t * t));
        let model = monomial_fit_mapped(&nodes, &data, None, 2, map).unwrap();
        let (v, d) = monomial_eval(&model, &[12.0]);
        assert!((v[(0, 0)] - 144.0).abs() < 1e-11);
        assert!((d[(0, 0)] - 24.0).abs() < 1e-11);
    }

    #[test]
    fn shape_errors() {
        assert!(monomial_fit(&[0.0, 1.0], &DenseMatrix::zeros(3, 1), None, 1).is_err());
    }
}

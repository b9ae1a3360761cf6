//! Comparison methods: monomial (confluent) Vandermonde fits in permutation
//! charts, greedy maxvol row selection, and normal-coordinate
//! interpolation through the Grassmann log and exp maps.

pub mod monomial;
pub mod normal;
pub mod permutation;

pub use monomial::{monomial_eval, monomial_fit, monomial_fit_mapped, vandermonde, MonomialModel};
pub use normal::{grassmann_exp, grassmann_log, naive_transport, NormalCoordinateInterpolant};
pub use permutation::{maxvol_chart, maxvol_trace, PermutationChart};

use crate::error::{Error, Result};
use crate::kernels::DenseMatrix;
use crate::manifold::{MvCoordinates, StiefelPoint, TangentLift};

/// Greedy iteration cap used by the experiments.
pub const MAXVOL_ITERS: usize = 200;

/// Monomial fit of MV coordinates in a permutation chart.
#[derive(Clone, Debug)]
pub struct MonomialChartInterpolant {
    chart: PermutationChart,
    model: MonomialModel,
}

impl MonomialChartInterpolant {
    /// Fits values (and derivatives when `lifts` is given) with a monomial
    /// basis on the raw nodes. Ill-conditioned solves are not errors.
    pub fn fit(
        nodes: &[f64],
        samples: &[StiefelPoint],
        lifts: Option<&[TangentLift]>,
        degree: usize,
        chart: PermutationChart,
    ) -> Result<Self> {
        if samples.len() != nodes.len() || lifts.is_some_and(|l| l.len() != nodes.len()) {
            return Err(Error::DimensionMismatch("nodes, samples and lifts differ in count".into()));
        }
        let (n, p) = (chart.n(), chart.p());
        let width = p * (n - p);
        let mut values = DenseMatrix::zeros(nodes.len(), width);
        let mut derivs = DenseMatrix::zeros(nodes.len(), width);
        for (i, u) in samples.iter().enumerate() {
            let c = match lifts {
                Some(l) => chart.coordinate_velocity(u, &l[i])?,
                None => chart.to_coordinates(u)?,
            };
            for (k, &v) in c.xi.as_slice().iter().enumerate() {
                values[(i, k)] = v;
            }
            if let Some(d) = &c.xi_dot {
                for (k, &v) in d.as_slice().iter().enumerate() {
                    derivs[(i, k)] = v;
                }
            }
        }
        let model = monomial_fit(nodes, &values, lifts.map(|_| &derivs), degree)?;
        Ok(Self { chart, model })
    }

    pub fn chart(&self) -> &PermutationChart {
        &self.chart
    }

    pub fn model(&self) -> &MonomialModel {
        &self.model
    }

    pub fn evaluate_many(&self, points: &[f64]) -> Vec<Result<StiefelPoint>> {
        let (n, p) = (self.chart.n(), self.chart.p());
        let (values, _) = monomial_eval(&self.model, points);
        (0..points.len())
            .map(|r| {
                let xi = DenseMatrix::from_col_major(n - p, p, values.row(r));
                if !xi.is_finite() {
                    return Err(Error::NonFinite { row: r, col: 0 });
                }
                self.chart.reconstruct(&MvCoordinates::new(xi))
            })
            .collect()
    }

    pub fn evaluate_many_with_velocity(&self, points: &[f64]) -> Vec<Result<(StiefelPoint, TangentLift)>> {
        let (n, p) = (self.chart.n(), self.chart.p());
        let (values, derivs) = monomial_eval(&self.model, points);
        (0..points.len())
            .map(|r| {
                let xi = DenseMatrix::from_col_major(n - p, p, values.row(r));
                let xi_dot = DenseMatrix::from_col_major(n - p, p, derivs.row(r));
                if !xi.is_finite() || !xi_dot.is_finite() {
                    return Err(Error::NonFinite { row: r, col: 0 });
                }
                self.chart
                    .reconstruct_velocity(&MvCoordinates::with_velocity(xi, xi_dot))
            })
            .collect()
    }
}

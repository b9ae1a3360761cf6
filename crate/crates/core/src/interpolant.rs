//! Fitted Grassmann interpolants: one Householder chart, one polynomial
//! model over the vectorized MV coordinates, and the Cholesky retraction.

use crate::error::{Error, Result};
use crate::kernels::DenseMatrix;
use crate::manifold::{
    build_chart, coordinate_velocity, reconstruct, reconstruct_velocity, to_coordinates, MvChart,
    MvCoordinates, StiefelPoint, TangentLift,
};
use crate::polybasis::{cva_fit_augmented, cva_fit_surrogate, nodes::range, va_fit, ArnoldiModel, BasisKind};

/// Evaluations farther than this fraction of the node range outside it are
/// flagged as extrapolation.
pub const EXTRAPOLATION_MARGIN: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterpolationMode {
    Lagrange,
    Hermite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteApproach {
    Augmented,
    Surrogate,
}

impl HermiteApproach {
    pub fn kind(self) -> BasisKind {
        match self {
            HermiteApproach::Augmented => BasisKind::HermiteAugmented,
            HermiteApproach::Surrogate => BasisKind::HermiteSurrogate,
        }
    }
}

impl std::str::FromStr for HermiteApproach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "augmented" => Ok(HermiteApproach::Augmented),
            "surrogate" => Ok(HermiteApproach::Surrogate),
            other => Err(Error::Config(format!("unknown approach `{other}`"))),
        }
    }
}

/// Which sample anchors the chart.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RefIndex {
    /// Node closest to the midpoint of the node range (lower index on ties).
    #[default]
    Midpoint,
    Last,
    Fixed(usize),
}

impl RefIndex {
    pub fn resolve(self, nodes: &[f64]) -> Result<usize> {
        if nodes.is_empty() {
            return Err(Error::Config("no nodes".into()));
        }
        match self {
            RefIndex::Midpoint => {
                let (lo, hi) = range(nodes);
                let mid = 0.5 * (lo + hi);
                let tol = 1e-12 * (hi - lo);
                let mut best = 0;
                for (i, &t) in nodes.iter().enumerate() {
                    if (t - mid).abs() < (nodes[best] - mid).abs() - tol {
                        best = i;
                    }
                }
                Ok(best)
            }
            RefIndex::Last => Ok(nodes.len() - 1),
            RefIndex::Fixed(i) if i < nodes.len() => Ok(i),
            RefIndex::Fixed(i) => Err(Error::Config(format!(
                "reference index {i} out of range for {} nodes",
                nodes.len()
            ))),
        }
    }
}

impl std::str::FromStr for RefIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(RefIndex::Midpoint),
            "last" => Ok(RefIndex::Last),
            other => other
                .parse::<usize>()
                .map(RefIndex::Fixed)
                .map_err(|_| Error::Config(format!("invalid reference index `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannInterpolant {
    chart: MvChart,
    model: ArnoldiModel,
    mode: InterpolationMode,
}

fn check_samples(nodes: &[f64], samples: &[StiefelPoint]) -> Result<()> {
    if nodes.len() != samples.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} nodes but {} samples",
            nodes.len(),
            samples.len()
        )));
    }
    Ok(())
}

fn coordinate_rows(rows: &[DenseMatrix]) -> DenseMatrix {
    let width = rows[0].as_slice().len();
    let mut data = DenseMatrix::zeros(rows.len(), width);
    for (i, xi) in rows.iter().enumerate() {
        for (c, &v) in xi.as_slice().iter().enumerate() {
            data[(i, c)] = v;
        }
    }
    data
}

/// Lagrange interpolant; `degree` defaults to `m - 1`.
pub fn fit_lagrange(
    nodes: &[f64],
    samples: &[StiefelPoint],
    degree: Option<usize>,
    ref_index: RefIndex,
) -> Result<GrassmannInterpolant> {
    check_samples(nodes, samples)?;
    if nodes.len() < 2 {
        return Err(Error::Config("Lagrange interpolation needs at least two nodes".into()));
    }
    let chart = build_chart(samples, ref_index.resolve(nodes)?)?;
    let xis = samples
        .iter()
        .map(|u| to_coordinates(&chart, u).map(|c| c.xi))
        .collect::<Result<Vec<_>>>()?;
    let model = va_fit(nodes, &coordinate_rows(&xis), degree.unwrap_or(nodes.len() - 1))?;
    Ok(GrassmannInterpolant {
        chart,
        model,
        mode: InterpolationMode::Lagrange,
    })
}

/// Hermite interpolant; `degree` defaults to `2m - 1`.
pub fn fit_hermite(
    nodes: &[f64],
    samples: &[StiefelPoint],
    lifts: &[TangentLift],
    degree: Option<usize>,
    approach: HermiteApproach,
    ref_index: RefIndex,
) -> Result<GrassmannInterpolant> {
    check_samples(nodes, samples)?;
    if lifts.len() != samples.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples but {} lifts",
            samples.len(),
            lifts.len()
        )));
    }
    let chart = build_chart(samples, ref_index.resolve(nodes)?)?;
    let mut xis = Vec::with_capacity(samples.len());
    let mut dots = Vec::with_capacity(samples.len());
    for (u, d) in samples.iter().zip(lifts) {
        let c = coordinate_velocity(&chart, u, d)?;
        xis.push(c.xi);
        dots.push(c.xi_dot.expect("coordinate_velocity sets the velocity"));
    }
    let values = coordinate_rows(&xis);
    let derivs = coordinate_rows(&dots);
    let degree = degree.unwrap_or(2 * nodes.len() - 1);
    let model = match approach {
        HermiteApproach::Augmented => cva_fit_augmented(nodes, &values, &derivs, degree)?,
        HermiteApproach::Surrogate => cva_fit_surrogate(nodes, &values, &derivs, degree, None)?,
    };
    Ok(GrassmannInterpolant {
        chart,
        model,
        mode: InterpolationMode::Hermite,
    })
}

impl GrassmannInterpolant {
    /// Reassembles an interpolant from a chart and a model fitted in it.
    pub fn from_parts(chart: MvChart, model: ArnoldiModel) -> Result<Self> {
        if model.n_columns() != chart.n_coord() {
            return Err(Error::DimensionMismatch(format!(
                "model has {} columns, chart needs {}",
                model.n_columns(),
                chart.n_coord()
            )));
        }
        let mode = if model.kind().is_hermite() {
            InterpolationMode::Hermite
        } else {
            InterpolationMode::Lagrange
        };
        Ok(Self { chart, model, mode })
    }

    pub fn chart(&self) -> &MvChart {
        &self.chart
    }

    pub fn model(&self) -> &ArnoldiModel {
        &self.model
    }

    pub fn mode(&self) -> InterpolationMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn p(&self) -> usize {
        self.chart.p()
    }

    pub fn n_coord(&self) -> usize {
        self.chart.n_coord()
    }

    pub fn nodes(&self) -> &[f64] {
        self.model.nodes()
    }

    /// True when `s` lies more than 10% of the node range outside it.
    pub fn is_extrapolation(&self, s: f64) -> bool {
        let (lo, hi) = range(self.nodes());
        let margin = EXTRAPOLATION_MARGIN * (hi - lo);
        s < lo - margin || s > hi + margin
    }

    fn coords_at(&self, points: &[f64], with_velocity: bool) -> Vec<MvCoordinates> {
        let rows = self.n() - self.p();
        let p = self.p();
        let (values, derivs) = self.model.evaluate(points);
        let row_matrix = |m: &DenseMatrix, r: usize| DenseMatrix::from_col_major(rows, p, m.row(r));
        (0..points.len())
            .map(|r| {
                let xi = row_matrix(&values, r);
                if with_velocity {
                    MvCoordinates::with_velocity(xi, row_matrix(&derivs, r))
                } else {
                    MvCoordinates::new(xi)
                }
            })
            .collect()
    }

    /// Interpolated MV coordinates at `s`, with velocities for Hermite
    /// models.
    pub fn coordinates_at(&self, s: f64) -> MvCoordinates {
        let with_velocity = self.mode == InterpolationMode::Hermite;
        self.coords_at(&[s], with_velocity).pop().expect("one point")
    }

    pub fn evaluate(&self, s: f64) -> Result<StiefelPoint> {
        Ok(self.evaluate_many(&[s])?.pop().expect("one point"))
    }

    pub fn evaluate_many(&self, points: &[f64]) -> Result<Vec<StiefelPoint>> {
        self.coords_at(points, false)
            .iter()
            .map(|c| reconstruct(&self.chart, c))
            .collect()
    }

    pub fn evaluate_with_velocity(&self, s: f64) -> Result<(StiefelPoint, TangentLift)> {
        Ok(self.evaluate_many_with_velocity(&[s])?.pop().expect("one point"))
    }

    pub fn evaluate_many_with_velocity(&self, points: &[f64]) -> Result<Vec<(StiefelPoint, TangentLift)>> {
        if self.mode != InterpolationMode::Hermite {
            return Err(Error::ModeMismatch("velocities need a Hermite interpolant".into()));
        }
        self.coords_at(points, true)
            .iter()
            .map(|c| reconstruct_velocity(&self.chart, c))
            .collect()
    }
}

use super::config::ExperimentConfig;
use super::sweep::{build_samples, Trajectory};
use crate::baselines::{maxvol_chart, vandermonde, PermutationChart, MAXVOL_ITERS};
use crate::error::Result;
use crate::kernels::{cond2, DenseMatrix};
use crate::manifold::{build_chart, geometric_condition, geometric_condition_spectral};
use crate::polybasis::{equispaced, va_fit};

/// Node counts of the conditioning table.
pub const CONDITIONING_SIZES: [usize; 4] = [12, 20, 30, 40];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditioningRow {
    pub m: usize,
    pub cond_monomial: f64,
    pub cond_arnoldi: f64,
}

/// `cond2` of the monomial Vandermonde matrix and of the Arnoldi basis on
/// `m` equispaced points of `[-1, 1]`, degree `m - 1`.
pub fn conditioning_row(m: usize) -> Result<ConditioningRow> {
    let x = equispaced(m, -1.0, 1.0);
    let model = va_fit(&x, &DenseMatrix::zeros(m, 1), m - 1)?;
    Ok(ConditioningRow {
        m,
        cond_monomial: cond2(&vandermonde(&x, m - 1)),
        cond_arnoldi: cond2(model.basis()),
    })
}

pub fn run_conditioning_table() -> Result<Vec<ConditioningRow>> {
    CONDITIONING_SIZES.iter().map(|&m| conditioning_row(m)).collect()
}

/// `||Ũ1^{-1}||_F` per node for three charts: the leading rows of the raw
/// representative, the greedy maxvol permutation, and the Householder frame
/// of the reference sample (plus its spectral-norm variant). Singular
/// blocks are reported as infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryRow {
    pub node_index: usize,
    pub t: f64,
    pub kappa_unstabilized: f64,
    pub kappa_maxvol: f64,
    pub kappa_householder: f64,
    pub kappa_householder_spectral: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryTable {
    pub ref_index: usize,
    pub rows: Vec<GeometryRow>,
}

impl GeometryTable {
    pub fn max_of(&self, column: impl Fn(&GeometryRow) -> f64) -> f64 {
        self.rows.iter().map(column).fold(0.0, f64::max)
    }
}

pub fn run_geometry_table(config: &ExperimentConfig) -> Result<GeometryTable> {
    config.validate()?;
    let trajectory = Trajectory::for_config(config)?;
    let data = build_samples(config, &trajectory)?;
    let ref_index = config.ref_index.resolve(&data.nodes)?;
    let (n, p) = data.samples[0].matrix().shape();
    let identity = PermutationChart::identity(n, p);
    let maxvol = maxvol_chart(&data.samples, MAXVOL_ITERS)?;
    let householder = build_chart(&data.samples, ref_index)?;
    let rows = data
        .samples
        .iter()
        .enumerate()
        .map(|(i, u)| GeometryRow {
            node_index: i,
            t: data.nodes[i],
            kappa_unstabilized: identity.geometric_condition(u).unwrap_or(f64::INFINITY),
            kappa_maxvol: maxvol.geometric_condition(u).unwrap_or(f64::INFINITY),
            kappa_householder: geometric_condition(&householder, u).unwrap_or(f64::INFINITY),
            kappa_householder_spectral: geometric_condition_spectral(&householder, u)
                .unwrap_or(f64::INFINITY),
        })
        .collect();
    Ok(GeometryTable { ref_index, rows })
}

use super::monomial::{monomial_eval, monomial_fit, MonomialModel};
use crate::error::{Error, Result};
use crate::kernels::{svd, DenseMatrix, Lu};
use crate::manifold::{StiefelPoint, TangentLift};

/// `sigma_min(U0^T U)` at or below which the log map is refused; this is a
/// principal angle within about `1e-6` of `pi / 2`.
pub const CUT_LOCUS_TOL: f64 = 1e-6;

/// Grassmann logarithm at `base`:
/// `(I - U0 U0^T) U (U0^T U)^{-1} = Q S V^T`, `log = Q atan(S) V^T`.
pub fn grassmann_log(base: &StiefelPoint, u: &StiefelPoint) -> Result<DenseMatrix> {
    let u0 = base.matrix();
    let m = u0.t_matmul(u.matrix());
    let s = svd(&m)?;
    let smin = s.sigma.last().copied().unwrap_or(0.0);
    if smin <= CUT_LOCUS_TOL {
        return Err(Error::OutOfChart(smin.clamp(-1.0, 1.0).acos()));
    }
    let mut a = u.matrix().clone();
    a.axpy(-1.0, &u0.matmul(&m));
    let x = Lu::new(&m)?.solve_right(&a);
    let d = svd(&x)?;
    let mut q = d.u;
    for (j, sig) in d.sigma.iter().enumerate() {
        let t = sig.atan();
        q.col_mut(j).iter_mut().for_each(|v| *v *= t);
    }
    Ok(q.matmul_t(&d.v))
}

/// Grassmann exponential at `base`:
/// `delta = Q S V^T`, `exp = U0 V cos(S) V^T + Q sin(S) V^T`.
pub fn grassmann_exp(base: &StiefelPoint, delta: &DenseMatrix) -> Result<StiefelPoint> {
    let d = svd(delta)?;
    let mut vc = d.v.clone();
    let mut qs = d.u;
    for (j, sig) in d.sigma.iter().enumerate() {
        let (s, c) = sig.sin_cos();
        vc.col_mut(j).iter_mut().for_each(|v| *v *= c);
        qs.col_mut(j).iter_mut().for_each(|v| *v *= s);
    }
    let mut u = base.matrix().matmul(&vc.matmul_t(&d.v));
    u.axpy(1.0, &qs.matmul_t(&d.v));
    Ok(StiefelPoint::new_unchecked(u))
}

/// Orthogonal polar factor of a square matrix.
fn polar(m: &DenseMatrix) -> Result<DenseMatrix> {
    let s = svd(m)?;
    Ok(s.u.matmul_t(&s.v))
}

/// Moves a lift at `u` into the tangent space at `base` by gauge alignment
/// and projection: `(I - U0 U0^T) Udot G` with `G` the polar factor of
/// `U^T U0`. No parallel transport.
pub fn naive_transport(base: &StiefelPoint, u: &StiefelPoint, lift: &TangentLift) -> Result<DenseMatrix> {
    let u0 = base.matrix();
    let g = polar(&u.matrix().t_matmul(u0))?;
    let moved = lift.matrix().matmul(&g);
    let mut out = moved.clone();
    out.axpy(-1.0, &u0.matmul(&u0.t_matmul(&moved)));
    Ok(out)
}

/// Interpolation in Riemannian normal coordinates about one sample, with a
/// monomial fit of the tangent vectors.
#[derive(Clone, Debug)]
pub struct NormalCoordinateInterpolant {
    base: StiefelPoint,
    model: MonomialModel,
}

impl NormalCoordinateInterpolant {
    pub fn fit(
        nodes: &[f64],
        samples: &[StiefelPoint],
        lifts: Option<&[TangentLift]>,
        degree: usize,
        base_index: usize,
    ) -> Result<Self> {
        if samples.len() != nodes.len() || lifts.is_some_and(|l| l.len() != nodes.len()) {
            return Err(Error::DimensionMismatch("nodes, samples and lifts differ in count".into()));
        }
        let base = samples
            .get(base_index)
            .ok_or_else(|| Error::Config(format!("base index {base_index} out of range")))?
            .clone();
        let (n, p) = base.matrix().shape();
        let mut values = DenseMatrix::zeros(nodes.len(), n * p);
        for (i, u) in samples.iter().enumerate() {
            let delta = grassmann_log(&base, u)?;
            for (c, &v) in delta.as_slice().iter().enumerate() {
                values[(i, c)] = v;
            }
        }
        let derivs = match lifts {
            Some(lifts) => {
                let mut d = DenseMatrix::zeros(nodes.len(), n * p);
                for (i, (u, l)) in samples.iter().zip(lifts).enumerate() {
                    let t = naive_transport(&base, u, l)?;
                    for (c, &v) in t.as_slice().iter().enumerate() {
                        d[(i, c)] = v;
                    }
                }
                Some(d)
            }
            None => None,
        };
        let model = monomial_fit(nodes, &values, derivs.as_ref(), degree)?;
        Ok(Self { base, model })
    }

    pub fn model(&self) -> &MonomialModel {
        &self.model
    }

    pub fn evaluate_many(&self, points: &[f64]) -> Vec<Result<StiefelPoint>> {
        let (n, p) = self.base.matrix().shape();
        let (values, _) = monomial_eval(&self.model, points);
        (0..points.len())
            .map(|r| {
                let delta = DenseMatrix::from_col_major(n, p, values.row(r));
                if !delta.is_finite() {
                    return Err(Error::NonFinite { row: r, col: 0 });
                }
                grassmann_exp(&self.base, &delta)
            })
            .collect()
    }
}

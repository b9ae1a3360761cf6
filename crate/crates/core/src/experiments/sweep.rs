use super::config::{ExperimentConfig, Method, Scenario};
use super::scenarios::{perturb_samples, HelmholtzProblem, TranscendentalCurve};
use crate::baselines::{maxvol_chart, MonomialChartInterpolant, NormalCoordinateInterpolant, PermutationChart, MAXVOL_ITERS};
use crate::error::Result;
use crate::interpolant::{fit_hermite, fit_lagrange, InterpolationMode};
use crate::manifold::{projector_velocity_error, subspace_error, StiefelPoint, TangentLift};
use crate::polybasis::{chebyshev_nodes, equispaced};

/// Ground-truth trajectory of a scenario.
#[derive(Clone, Debug)]
pub enum Trajectory {
    Transcendental(TranscendentalCurve),
    Helmholtz(HelmholtzProblem),
}

impl Trajectory {
    pub fn for_config(config: &ExperimentConfig) -> Result<Self> {
        Ok(match config.scenario {
            Scenario::Helmholtz => Trajectory::Helmholtz(HelmholtzProblem::new(config.n, config.p)?),
            _ => Trajectory::Transcendental(TranscendentalCurve::new(config.n, config.p, config.seed)?),
        })
    }

    pub fn sample(&self, t: f64) -> Result<(StiefelPoint, TangentLift)> {
        match self {
            Trajectory::Transcendental(c) => c.sample(t),
            Trajectory::Helmholtz(h) => h.sample(t),
        }
    }
}

/// Fit inputs of a scenario: Chebyshev nodes on the interval and the
/// (possibly perturbed) samples and lifts there.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub nodes: Vec<f64>,
    pub samples: Vec<StiefelPoint>,
    pub lifts: Vec<TangentLift>,
}

pub fn build_samples(config: &ExperimentConfig, trajectory: &Trajectory) -> Result<SampleSet> {
    let nodes = chebyshev_nodes(config.m, config.interval.0, config.interval.1);
    let mut pairs = nodes.iter().map(|&t| trajectory.sample(t)).collect::<Result<Vec<_>>>()?;
    if config.noise > 0.0 {
        pairs = perturb_samples(&pairs, config.noise, config.seed)?;
    }
    let (samples, lifts) = pairs.into_iter().unzip();
    Ok(SampleSet { nodes, samples, lifts })
}

/// One probe evaluated by one method. Diverged evaluations hold NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRecord {
    pub t: f64,
    pub method: Method,
    /// `||P_hat - P||_F / ||P||_F`
    pub rel_error: f64,
    /// `||U_hat^T U_hat - I||_F`
    pub orth_defect: f64,
    /// `||Pdot_hat - Pdot||_F / ||Pdot||_F` where the method yields velocities
    pub vel_error: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub records: Vec<ErrorRecord>,
    /// Methods whose fit failed outright (every probe diverged), with the reason.
    pub failed_fits: Vec<(Method, String)>,
    /// Set when the surrogate stacked system was flagged ill-conditioned.
    pub ill_conditioned: bool,
}

impl SweepResult {
    pub fn for_method(&self, method: Method) -> impl Iterator<Item = &ErrorRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    /// Largest relative error of a method; divergence counts as infinite.
    pub fn max_error(&self, method: Method) -> f64 {
        self.for_method(method)
            .map(|r| if r.rel_error.is_nan() { f64::INFINITY } else { r.rel_error })
            .fold(0.0, f64::max)
    }

    /// Largest orthogonality defect over non-diverged probes.
    pub fn max_orth_defect(&self, method: Method) -> f64 {
        self.for_method(method)
            .map(|r| r.orth_defect)
            .filter(|d| !d.is_nan())
            .fold(0.0, f64::max)
    }

    pub fn max_vel_error(&self, method: Method) -> Option<f64> {
        self.for_method(method)
            .filter_map(|r| r.vel_error)
            .map(|v| if v.is_nan() { f64::INFINITY } else { v })
            .reduce(f64::max)
    }
}

type Estimate = Result<(StiefelPoint, Option<TangentLift>)>;

fn without_velocity(v: Vec<Result<StiefelPoint>>) -> Vec<Estimate> {
    v.into_iter().map(|r| r.map(|u| (u, None))).collect()
}

fn with_velocity(v: Vec<Result<(StiefelPoint, TangentLift)>>) -> Vec<Estimate> {
    v.into_iter().map(|r| r.map(|(u, d)| (u, Some(d)))).collect()
}

fn estimate(
    method: Method,
    config: &ExperimentConfig,
    data: &SampleSet,
    ref_index: usize,
    probes: &[f64],
    ill_conditioned: &mut bool,
) -> Result<Vec<Estimate>> {
    let hermite = config.mode == InterpolationMode::Hermite;
    let lifts = hermite.then_some(data.lifts.as_slice());
    Ok(match method {
        Method::MvCva => {
            let interp = if hermite {
                fit_hermite(
                    &data.nodes,
                    &data.samples,
                    &data.lifts,
                    Some(config.degree),
                    config.approach,
                    config.ref_index,
                )?
            } else {
                fit_lagrange(&data.nodes, &data.samples, Some(config.degree), config.ref_index)?
            };
            *ill_conditioned |= interp.model().ill_conditioned();
            if hermite {
                interp
                    .evaluate_many_with_velocity(probes)?
                    .into_iter()
                    .map(|(u, d)| Ok((u, Some(d))))
                    .collect()
            } else {
                interp.evaluate_many(probes)?.into_iter().map(|u| Ok((u, None))).collect()
            }
        }
        Method::MonomialLocal | Method::MonomialMaxvol => {
            let (n, p) = data.samples[0].matrix().shape();
            let chart = if method == Method::MonomialLocal {
                PermutationChart::identity(n, p)
            } else {
                maxvol_chart(&data.samples, MAXVOL_ITERS)?
            };
            let interp = MonomialChartInterpolant::fit(&data.nodes, &data.samples, lifts, config.degree, chart)?;
            if hermite {
                with_velocity(interp.evaluate_many_with_velocity(probes))
            } else {
                without_velocity(interp.evaluate_many(probes))
            }
        }
        Method::NormalCoords => {
            let interp =
                NormalCoordinateInterpolant::fit(&data.nodes, &data.samples, lifts, config.degree, ref_index)?;
            without_velocity(interp.evaluate_many(probes))
        }
    })
}

/// Evaluates every configured method at equispaced probes and compares
/// against the exact trajectory. Baseline failures are recorded as
/// divergence; only failures of the scenario itself or of `mv_cva` abort.
pub fn run_error_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let trajectory = Trajectory::for_config(config)?;
    let data = build_samples(config, &trajectory)?;
    let ref_index = config.ref_index.resolve(&data.nodes)?;
    let probes = equispaced(config.probes, config.interval.0, config.interval.1);
    let truth = probes.iter().map(|&t| trajectory.sample(t)).collect::<Result<Vec<_>>>()?;

    let mut ill_conditioned = false;
    let mut failed_fits = Vec::new();
    let mut per_method = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        match estimate(method, config, &data, ref_index, &probes, &mut ill_conditioned) {
            Ok(v) => per_method.push(v.into_iter().map(Result::ok).collect::<Vec<_>>()),
            Err(e) if method.is_baseline() => {
                failed_fits.push((method, e.to_string()));
                per_method.push(vec![None; probes.len()]);
            }
            Err(e) => return Err(e),
        }
    }

    let mut records = Vec::with_capacity(probes.len() * config.methods.len());
    for (i, &t) in probes.iter().enumerate() {
        let (u_true, d_true) = &truth[i];
        for (k, &method) in config.methods.iter().enumerate() {
            let record = match &per_method[k][i] {
                Some((u, lift)) if u.matrix().is_finite() => {
                    let vel_error = lift.as_ref().map(|d| {
                        if d.matrix().is_finite() {
                            projector_velocity_error(u, d, u_true, d_true).1
                        } else {
                            f64::NAN
                        }
                    });
                    ErrorRecord {
                        t,
                        method,
                        rel_error: subspace_error(u, u_true).relative,
                        orth_defect: u.orthonormality_defect(),
                        vel_error,
                    }
                }
                _ => ErrorRecord {
                    t,
                    method,
                    rel_error: f64::NAN,
                    orth_defect: f64::NAN,
                    vel_error: (config.mode == InterpolationMode::Hermite && method != Method::NormalCoords)
                        .then_some(f64::NAN),
                },
            };
            records.push(record);
        }
    }
    Ok(SweepResult {
        records,
        failed_fits,
        ill_conditioned,
    })
}

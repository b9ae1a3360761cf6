use crate::error::{Error, Result};
use crate::kernels::{DenseMatrix, Lu};
use crate::manifold::{
    block_condition, partition_coordinates, partition_velocity, retract_local, retract_velocity_local,
    MvCoordinates, StiefelPoint, TangentLift,
};

/// Candidate swaps scored per greedy iteration.
const CANDIDATES: usize = 32;
/// Minimum objective decrease for a swap to be accepted.
const MIN_IMPROVEMENT: f64 = 1e-12;

/// Chart given by a row permutation: `Ũ[r] = U[perm[r]]`, with the first
/// `p` permuted rows forming the square block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationChart {
    perm: Vec<usize>,
    p: usize,
}

impl PermutationChart {
    pub fn new(perm: Vec<usize>, p: usize) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &r in &perm {
            if r >= n || std::mem::replace(&mut seen[r], true) {
                return Err(Error::Config("row ordering is not a permutation".into()));
            }
        }
        if p == 0 || p > n {
            return Err(Error::DimensionMismatch(format!("p = {p} for n = {n}")));
        }
        Ok(Self { perm, p })
    }

    /// No stabilization: the leading `p` rows of the raw representative.
    pub fn identity(n: usize, p: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            p,
        }
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn to_local(&self, m: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(self.perm[r], c)])
    }

    pub fn from_local(&self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(m.rows(), m.cols());
        for (r, &src) in self.perm.iter().enumerate() {
            for c in 0..m.cols() {
                out[(src, c)] = m[(r, c)];
            }
        }
        out
    }

    fn block(&self, u: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(self.p, u.cols(), |r, c| u[(self.perm[r], c)])
    }

    /// `||Ũ1^{-1}||_F` for one sample.
    pub fn geometric_condition(&self, u: &StiefelPoint) -> Result<f64> {
        block_condition(&self.block(u.matrix()))
    }

    /// `max_i ||Ũ_{i,1}^{-1}||_F`; infinite if any block is singular.
    pub fn objective(&self, samples: &[StiefelPoint]) -> f64 {
        objective_for_rows(&self.perm[..self.p], samples)
    }

    pub fn to_coordinates(&self, u: &StiefelPoint) -> Result<MvCoordinates> {
        let (xi, _) = partition_coordinates(&self.to_local(u.matrix()), self.p)?;
        Ok(MvCoordinates::new(xi))
    }

    pub fn coordinate_velocity(&self, u: &StiefelPoint, lift: &TangentLift) -> Result<MvCoordinates> {
        let (xi, u1) = partition_coordinates(&self.to_local(u.matrix()), self.p)?;
        let xi_dot = partition_velocity(&self.to_local(lift.matrix()), &xi, &u1);
        Ok(MvCoordinates::with_velocity(xi, xi_dot))
    }

    pub fn reconstruct(&self, coords: &MvCoordinates) -> Result<StiefelPoint> {
        let local = retract_local(&coords.xi)?;
        Ok(StiefelPoint::new_unchecked(self.from_local(&local.u)))
    }

    pub fn reconstruct_velocity(&self, coords: &MvCoordinates) -> Result<(StiefelPoint, TangentLift)> {
        let xi_dot = coords
            .xi_dot
            .as_ref()
            .ok_or_else(|| Error::ModeMismatch("coordinate velocity missing".into()))?;
        let local = retract_local(&coords.xi)?;
        let lift = retract_velocity_local(&coords.xi, xi_dot, &local.factor)?;
        Ok((
            StiefelPoint::new_unchecked(self.from_local(&local.u)),
            TangentLift::new_unchecked(self.from_local(&lift)),
        ))
    }
}

fn inverse_frobenius(rows: &[usize], u: &DenseMatrix) -> f64 {
    let block = DenseMatrix::from_fn(rows.len(), u.cols(), |r, c| u[(rows[r], c)]);
    match Lu::new(&block) {
        Ok(lu) => {
            let v = lu.inverse().frobenius_norm();
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

fn objective_for_rows(rows: &[usize], samples: &[StiefelPoint]) -> f64 {
    samples
        .iter()
        .map(|u| inverse_frobenius(rows, u.matrix()))
        .fold(0.0, f64::max)
}

/// Rows picked by Gaussian elimination with partial pivoting on `u`.
fn pivot_rows(u: &DenseMatrix) -> Vec<usize> {
    let (n, p) = u.shape();
    let mut a = u.clone();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..p {
        let piv = (k..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs())).unwrap_or(k);
        order.swap(k, piv);
        for c in 0..p {
            let t = a[(k, c)];
            a[(k, c)] = a[(piv, c)];
            a[(piv, c)] = t;
        }
        let d = a[(k, k)];
        if d == 0.0 {
            continue;
        }
        for i in k + 1..n {
            let f = a[(i, k)] / d;
            for c in k + 1..p {
                a[(i, c)] -= f * a[(k, c)];
            }
        }
    }
    order.truncate(p);
    order
}

/// Greedy row-swap search for a permutation that lowers
/// `max_i ||Ũ_{i,1}^{-1}||_F`.
///
/// The search starts from the better of the leading rows and the
/// partial-pivoting row picks of each sample (the usual maxvol seed).
/// Each iteration looks at the sample attaining the maximum, ranks the
/// swaps (selected row `j`, outside row `r`) by `|B[r, j]|` with
/// `B = U U[S]^{-1}` (the factor by which the swap scales `|det U[S]|`),
/// scores the best few on the full objective and keeps the best one if it
/// lowers the objective. The objective never increases.
pub fn maxvol_chart(samples: &[StiefelPoint], max_iters: usize) -> Result<PermutationChart> {
    maxvol_trace(samples, max_iters).map(|(chart, _)| chart)
}

/// As [`maxvol_chart`], also returning the objective after every accepted
/// step (starting with the identity ordering, then the seed if it differs).
pub fn maxvol_trace(samples: &[StiefelPoint], max_iters: usize) -> Result<(PermutationChart, Vec<f64>)> {
    let first = samples
        .first()
        .ok_or_else(|| Error::Config("maxvol needs at least one sample".into()))?;
    let (n, p) = first.matrix().shape();
    if samples.iter().any(|s| s.matrix().shape() != (n, p)) {
        return Err(Error::DimensionMismatch("samples differ in shape".into()));
    }
    let mut selected: Vec<usize> = (0..p).collect();
    let mut value = objective_for_rows(&selected, samples);
    let mut history = vec![value];
    for u in samples {
        let rows = pivot_rows(u.matrix());
        let v = objective_for_rows(&rows, samples);
        if v < value {
            selected = rows;
            value = v;
        }
    }
    if selected.iter().copied().ne(0..p) {
        history.push(value);
    }
    let mut in_set = vec![false; n];
    selected.iter().for_each(|&r| in_set[r] = true);

    for _ in 0..max_iters {
        let worst = samples
            .iter()
            .map(|u| inverse_frobenius(&selected, u.matrix()))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
            .0;
        let u = samples[worst].matrix();
        let block = DenseMatrix::from_fn(p, p, |r, c| u[(selected[r], c)]);
        let mut candidates: Vec<(f64, usize, usize)> = match Lu::new(&block) {
            Ok(lu) => {
                let b = lu.solve_right(u);
                (0..n)
                    .filter(|&r| !in_set[r])
                    .flat_map(|r| (0..p).map(move |j| (r, j)))
                    .map(|(r, j)| (b[(r, j)].abs(), r, j))
                    .filter(|c| c.0.is_finite())
                    .collect()
            }
            // singular block: rank rows by magnitude in the worst sample
            Err(_) => (0..n)
                .filter(|&r| !in_set[r])
                .flat_map(|r| (0..p).map(move |j| (r, j)))
                .map(|(r, j)| (u.row(r).iter().map(|x| x * x).sum::<f64>(), r, j))
                .collect(),
        };
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        candidates.truncate(CANDIDATES);

        let mut best: Option<(f64, usize, usize)> = None;
        let mut trial = selected.clone();
        for &(_, r, j) in &candidates {
            trial[j] = r;
            let v = objective_for_rows(&trial, samples);
            trial[j] = selected[j];
            if best.is_none_or(|b| v < b.0) {
                best = Some((v, r, j));
            }
        }
        match best {
            Some((v, r, j)) if v < value - MIN_IMPROVEMENT || (value.is_infinite() && v.is_finite()) => {
                in_set[selected[j]] = false;
                in_set[r] = true;
                selected[j] = r;
                value = v;
                history.push(v);
            }
            _ => break,
        }
    }

    let mut perm = selected.clone();
    perm.extend((0..n).filter(|&r| !in_set[r]));
    Ok((PermutationChart { perm, p }, history))
}

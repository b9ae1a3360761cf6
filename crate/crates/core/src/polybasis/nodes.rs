use crate::error::{Error, Result};

/// Affine map `x = scale * t + shift` from the parameter domain to the
/// recursion domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        scale: 1.0,
        shift: 0.0,
    };

    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        self.scale * t + self.shift
    }

    #[inline]
    pub fn invert(&self, x: f64) -> f64 {
        (x - self.shift) / self.scale
    }

    /// Map sending `[a, b]` onto `[-1, 1]`.
    pub fn onto_unit(a: f64, b: f64) -> Result<Self> {
        let width = b - a;
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::DegenerateRange);
        }
        Ok(Self {
            scale: 2.0 / width,
            shift: -(a + b) / width,
        })
    }
}

/// Maps the nodes onto `[-1, 1]`. A single node keeps the identity map.
pub fn node_rescale(nodes: &[f64]) -> Result<(Vec<f64>, AffineMap)> {
    if nodes.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    let map = match nodes.len() {
        0 => return Err(Error::DegenerateRange),
        1 => AffineMap::IDENTITY,
        _ => {
            let (lo, hi) = range(nodes);
            AffineMap::onto_unit(lo, hi)?
        }
    };
    Ok((nodes.iter().map(|&t| map.apply(t)).collect(), map))
}

pub(crate) fn range(nodes: &[f64]) -> (f64, f64) {
    nodes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)))
}

/// `t_i = a + (b - a)(1/2 - cos(pi i / (m - 1)) / 2)`, ascending, endpoints
/// included.
pub fn chebyshev_nodes(m: usize, a: f64, b: f64) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..m)
            .map(|i| {
                let c = (std::f64::consts::PI * i as f64 / (m - 1) as f64).cos();
                a + (b - a) * (0.5 - 0.5 * c)
            })
            .collect(),
    }
}

/// `m` equally spaced points on `[a, b]`, endpoints included.
pub fn equispaced(m: usize, a: f64, b: f64) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..m)
            .map(|i| {
                if i == m - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (m - 1) as f64
                }
            })
            .collect(),
    }
}

/// Rejects nodes closer than `1e-14` times the node range.
pub(crate) fn check_distinct(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Ok(());
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if !(gap >= 1e-14 * (hi - lo)) || gap == 0.0 {
        return Err(Error::NodeCollision(gap));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_nodes_are_the_endpoints() {
        assert_eq!(chebyshev_nodes(2, 0.0, 1.0), vec![0.0, 1.0]);
    }

    #[test]
    fn eight_nodes_on_unit_interval() {
        let t = chebyshev_nodes(8, 0.0, 1.0);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[7], 1.0);
        assert!((t[3] - 0.3887).abs() < 5e-5);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        for i in 0..8 {
            assert!((t[i] + t[7 - i] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rescale_unit_interval() {
        let (x, map) = node_rescale(&[0.0, 0.25, 1.0]).unwrap();
        assert_eq!(map, AffineMap { scale: 2.0, shift: -1.0 });
        assert_eq!(x, vec![-1.0, -0.5, 1.0]);
    }

    #[test]
    fn rescale_identity_cases() {
        let (_, map) = node_rescale(&[-1.0, 0.3, 1.0]).unwrap();
        assert_eq!(map, AffineMap::IDENTITY);
        let (x, map) = node_rescale(&[7.0]).unwrap();
        assert_eq!(map, AffineMap::IDENTITY);
        assert_eq!(x, vec![7.0]);
        assert!(matches!(node_rescale(&[2.0, 2.0]), Err(Error::DegenerateRange)));
    }

    #[test]
    fn rescale_round_trip() {
        let nodes = [10.0, 12.5, 13.0, 20.0];
        let (x, map) = node_rescale(&nodes).unwrap();
        assert_eq!(x[0], -1.0);
        assert_eq!(x[3], 1.0);
        for (&t, &s) in nodes.iter().zip(&x) {
            assert!((map.invert(s) - t).abs() <= 1e-15 * t.abs());
        }
    }

    #[test]
    fn collisions() {
        assert!(check_distinct(&[0.0, 0.5, 1.0]).is_ok());
        assert!(matches!(check_distinct(&[0.0, 0.5, 0.5, 1.0]), Err(Error::NodeCollision(_))));
        assert!(check_distinct(&[3.0]).is_ok());
    }
}

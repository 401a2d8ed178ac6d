//! Points of the probability simplex and the handful of operations the rest
//! of the crate builds on: entropy, cyclic shifts, grids, and the
//! anchor-plus-vertices decomposition used by the prefix construction.

use std::fmt;
use std::ops::Index;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate tolerance for simplex membership and reconstruction checks.
pub const TAU_PMF: f64 = 1e-9;

/// Sums within this distance of one are silently renormalized.
const RENORMALIZE_LIMIT: f64 = 1e-6;

/// Largest simplex grid [`simplex_grid`] will materialize.
pub const GRID_CAP: u128 = 20_000_000;

/// A probability mass function over `{0, .., dim - 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    weights: Vec<f64>,
}

impl Pmf {
    /// Validates and (if the drift is small) renormalizes `weights`.
    ///
    /// Entries in `[-TAU_PMF, 0)` are treated as rounding noise and clamped
    /// to zero; anything more negative is rejected.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPmf("empty weight vector".into()));
        }
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidPmf(format!("weight {i} is not finite")));
            }
            if *w < -TAU_PMF {
                return Err(Error::InvalidPmf(format!("weight {i} is negative ({w})")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() >= RENORMALIZE_LIMIT {
            return Err(Error::InvalidPmf(format!("weights sum to {sum}, not 1")));
        }
        // Sums off by summation roundoff are left alone so that a dumped PMF
        // re-parses bit for bit.
        if (sum - 1.0).abs() > weights.len() as f64 * f64::EPSILON {
            weights.iter_mut().for_each(|w| *w /= sum);
        }
        Ok(Self { weights })
    }

    /// The uniform distribution on `dim` symbols.
    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "uniform PMF needs a non-empty alphabet");
        Self {
            weights: vec![1.0 / dim as f64; dim],
        }
    }

    /// The point mass `e_j`.
    pub fn basis(dim: usize, j: usize) -> Self {
        assert!(j < dim, "basis index {j} out of range for dimension {dim}");
        let mut weights = vec![0.0; dim];
        weights[j] = 1.0;
        Self { weights }
    }

    /// Binary PMF `[p, 1 - p]`.
    pub fn binary(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self {
            weights: vec![p, 1.0 - p],
        })
    }

    /// Builds a PMF from weights the caller already knows are on the simplex
    /// (up to clamping and renormalization noise).
    pub(crate) fn from_simplex_point(weights: &[f64]) -> Self {
        let mut weights: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let sum: f64 = weights.iter().sum();
        debug_assert!((sum - 1.0).abs() < RENORMALIZE_LIMIT, "sum drifted to {sum}");
        weights.iter_mut().for_each(|w| *w /= sum);
        Self { weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    /// True when every coordinate is at least `threshold`.
    pub fn is_interior(&self, threshold: f64) -> bool {
        self.weights.iter().all(|&w| w >= threshold)
    }

    /// Number of coordinates above `threshold`.
    pub fn support_size(&self, threshold: f64) -> usize {
        self.weights.iter().filter(|&&w| w > threshold).count()
    }

    /// Largest coordinate-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Pmf::new(weights)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.weights
    }
}

impl fmt::Display for Pmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w:.6}")?;
        }
        write!(f, "]")
    }
}

/// `-x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn neg_x_log2_x(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of raw weights, in bits.
#[inline]
pub(crate) fn entropy_of(weights: &[f64]) -> f64 {
    weights.iter().map(|&w| neg_x_log2_x(w)).sum()
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(&p.weights).max(0.0)
}

#[inline]
pub(crate) fn h2(x: f64) -> f64 {
    neg_x_log2_x(x) + neg_x_log2_x(1.0 - x)
}

/// The binary entropy function `h(x)` in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "binary entropy is defined on [0, 1]",
        });
    }
    Ok(h2(x))
}

/// Rotates the coordinates by `k` positions: the mass at `i` moves to
/// `i + k (mod dim)`.
pub fn cyclic_shift(p: &Pmf, k: i64) -> Pmf {
    let n = p.dim();
    let k = k.rem_euclid(n as i64) as usize;
    let mut weights = vec![0.0; n];
    for (i, &w) in p.weights.iter().enumerate() {
        weights[(i + k) % n] = w;
    }
    Pmf { weights }
}

/// `target = q[0] * anchor + sum_k q[k + 1] * e_{basis_indices[k]}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexDecomposition {
    pub q: Pmf,
    /// The `dim - 1` vertices used, ascending.
    pub basis_indices: Vec<usize>,
    pub anchor: Pmf,
    /// The vertex left out of the containing sub-simplex.
    pub excluded: usize,
}

impl SimplexDecomposition {
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.anchor.weights.iter().map(|a| self.q[0] * a).collect();
        for (k, &j) in self.basis_indices.iter().enumerate() {
            out[j] += self.q[k + 1];
        }
        out
    }
}

/// Writes `target` as a convex combination of `anchor` and `dim - 1` of the
/// simplex vertices.
///
/// `anchor` splits the simplex into the sub-simplexes
/// `D_i = hull({e_j : j != i} ∪ {anchor})`. For each candidate `D_i` the
/// barycentric system `[anchor | e_j, j != i] q = target` has a permuted
/// triangular matrix, so row `i` fixes `q[0] = target[i] / anchor[i]` and the
/// remaining rows back-substitute. The first candidate (smallest `i`) whose
/// coordinates are all non-negative wins. Candidates with `anchor[i] = 0`
/// are flat and skipped; the minimizing ratio is always a valid candidate.
pub fn decompose(target: &Pmf, anchor: &Pmf) -> Result<SimplexDecomposition> {
    let n = target.dim();
    if anchor.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "decompose",
            expected: n,
            found: anchor.dim(),
        });
    }
    for i in 0..n {
        if anchor[i] <= TAU_PMF * TAU_PMF {
            continue;
        }
        let q1 = target[i] / anchor[i];
        if q1 > 1.0 + TAU_PMF {
            continue;
        }
        let mut q = Vec::with_capacity(n);
        q.push(q1.min(1.0));
        let mut basis_indices = Vec::with_capacity(n - 1);
        let mut feasible = true;
        for j in (0..n).filter(|&j| j != i) {
            let c = target[j] - q1 * anchor[j];
            if c < -TAU_PMF {
                feasible = false;
                break;
            }
            q.push(c.max(0.0));
            basis_indices.push(j);
        }
        if feasible {
            return Ok(SimplexDecomposition {
                q: Pmf::from_simplex_point(&q),
                basis_indices,
                anchor: anchor.clone(),
                excluded: i,
            });
        }
    }
    Err(Error::Assertion(format!(
        "no sub-simplex of {anchor} contains {target}"
    )))
}

/// Number of points in the grid of resolution `resolution` on the
/// `dim`-simplex: `C(resolution + dim - 1, dim - 1)`.
pub fn grid_size(dim: usize, resolution: usize) -> u128 {
    let (n, k) = ((resolution + dim - 1) as u128, (dim - 1) as u128);
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Calls `visit` on every grid point of the simplex, first coordinate
/// ascending.
pub(crate) fn for_each_grid_point(dim: usize, resolution: usize, mut visit: impl FnMut(&[f64])) {
    let mut counts = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    fn recurse(
        pos: usize,
        remaining: usize,
        resolution: usize,
        counts: &mut [usize],
        point: &mut [f64],
        visit: &mut dyn FnMut(&[f64]),
    ) {
        let dim = counts.len();
        if pos == dim - 1 {
            counts[pos] = remaining;
            for (p, &c) in point.iter_mut().zip(counts.iter()) {
                *p = c as f64 / resolution as f64;
            }
            visit(point);
            return;
        }
        for c in 0..=remaining {
            counts[pos] = c;
            recurse(pos + 1, remaining - c, resolution, counts, point, visit);
        }
    }
    recurse(0, resolution, resolution, &mut counts, &mut point, &mut visit);
}

/// All PMFs whose coordinates are multiples of `1 / resolution`.
pub fn simplex_grid(dim: usize, resolution: usize) -> Result<Vec<Pmf>> {
    if dim < 2 {
        return Err(Error::InvalidParameter {
            name: "dim",
            value: dim as f64,
            reason: "grid needs at least two coordinates",
        });
    }
    if resolution < 1 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            value: resolution as f64,
            reason: "must be at least 1",
        });
    }
    let count = grid_size(dim, resolution);
    if count > GRID_CAP {
        return Err(Error::ResourceCap {
            requested: count,
            cap: GRID_CAP,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for_each_grid_point(dim, resolution, |p| {
        out.push(Pmf {
            weights: p.to_vec(),
        })
    });
    Ok(out)
}

/// A uniformly distributed point of the simplex (flat Dirichlet).
pub fn random_pmf<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Pmf {
    let mut w: Vec<f64> = (0..dim)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    Pmf { weights: w }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pmf(w: &[f64]) -> Pmf {
        Pmf::new(w.to_vec()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&pmf(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy(&pmf(&[1.0, 0.0])), 0.0);
        // -0.1 log2 0.1 - 0.9 log2 0.9
        assert!((entropy(&pmf(&[0.1, 0.9])) - 0.468_995_593_589_281).abs() < 1e-14);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.1).unwrap() - 0.468_995_593_589_281).abs() < 1e-14);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn pmf_validation() {
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![1.1, -0.1]).is_err());
        assert!(Pmf::new(vec![f64::NAN, 1.0]).is_err());
        let p = Pmf::new(vec![0.5 + 1e-8, 0.5]).unwrap();
        assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let p = Pmf::new(vec![1.0, -1e-12]).unwrap();
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn cyclic_shift_examples() {
        assert_eq!(cyclic_shift(&pmf(&[1.0, 0.0, 0.0]), 1), pmf(&[0.0, 1.0, 0.0]));
        let u = Pmf::uniform(3);
        assert_eq!(cyclic_shift(&u, 2), u);
        let p = pmf(&[0.5, 0.3, 0.2]);
        assert_eq!(cyclic_shift(&p, 3), p);
        assert_eq!(cyclic_shift(&p, -1), cyclic_shift(&p, 2));
    }

    #[test]
    fn decompose_binary() {
        let d = decompose(&pmf(&[0.3, 0.7]), &pmf(&[0.5, 0.5])).unwrap();
        assert!((d.q[0] - 0.6).abs() < 1e-12);
        assert!((d.q[1] - 0.4).abs() < 1e-12);
        assert_eq!(d.basis_indices, vec![1]);
    }

    #[test]
    fn decompose_identity() {
        let p = pmf(&[0.2, 0.3, 0.5]);
        let d = decompose(&p, &p).unwrap();
        assert_eq!(d.q[0], 1.0);
        assert!(d.q.weights()[1..].iter().all(|&w| w == 0.0));
    }

    #[test]
    fn decompose_boundary_target() {
        // A vertex target may leave no weight on the anchor.
        let d = decompose(&pmf(&[0.0, 1.0, 0.0]), &Pmf::uniform(3)).unwrap();
        assert_eq!(d.q[0], 0.0);
        let r = d.reconstruct();
        assert!((r[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decompose_rejects_mismatched_dims() {
        assert!(matches!(
            decompose(&Pmf::uniform(2), &Pmf::uniform(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn grid_examples() {
        let g = simplex_grid(2, 2).unwrap();
        let w: Vec<Vec<f64>> = g.into_iter().map(Pmf::into_vec).collect();
        assert_eq!(w, vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);
        assert_eq!(simplex_grid(2, 4).unwrap().len(), 5);
        assert_eq!(simplex_grid(3, 3).unwrap().len(), 10);
        assert_eq!(grid_size(3, 3), 10);
        assert!(matches!(
            simplex_grid(6, 400),
            Err(Error::ResourceCap { .. })
        ));
        assert!(simplex_grid(1, 3).is_err());
        assert!(simplex_grid(3, 0).is_err());
    }

    fn arb_pmf(dim: usize) -> impl Strategy<Value = Pmf> {
        proptest::collection::vec(0.0f64..1.0, dim).prop_filter_map("zero vector", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| Pmf::from_simplex_point(&w.iter().map(|x| x / s).collect::<Vec<_>>()))
        })
    }

    fn arb_pair() -> impl Strategy<Value = (Pmf, Pmf)> {
        (2usize..=5).prop_flat_map(|d| (arb_pmf(d), arb_pmf(d)))
    }

    proptest! {
        #[test]
        fn decompose_reconstructs((target, anchor) in arb_pair()) {
            let d = decompose(&target, &anchor).unwrap();
            let r = d.reconstruct();
            for (a, b) in r.iter().zip(target.weights()) {
                prop_assert!((a - b).abs() <= TAU_PMF);
            }
            let mut idx = d.basis_indices.clone();
            idx.dedup();
            prop_assert_eq!(idx.len(), target.dim() - 1);
            if target.is_interior(10.0 * TAU_PMF) {
                prop_assert!(d.q[0] > 0.0);
            }
        }

        #[test]
        fn shift_cycle_and_entropy_invariance(p in (2usize..=6).prop_flat_map(arb_pmf), k in -10i64..10) {
            let mut s = p.clone();
            for _ in 0..p.dim() {
                s = cyclic_shift(&s, k);
            }
            prop_assert!(s.max_abs_diff(&p) < 1e-15);
            prop_assert!((entropy(&cyclic_shift(&p, k)) - entropy(&p)).abs() < 1e-12);
        }

        #[test]
        fn binary_entropy_matches_entropy(x in 0.0f64..=1.0) {
            let e = entropy(&Pmf::binary(x).unwrap());
            prop_assert!((binary_entropy(x).unwrap() - e).abs() < 1e-12);
        }
    }
}

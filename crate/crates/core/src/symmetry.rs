//! Input relabelings that leave both mutual informations of a wiretap pair
//! unchanged.
//!
//! The constructions for symmetric channels need `|X|` input permutations
//! `pi_0, ..., pi_{|X|-1}` such that `I(X;Y)` and `I(X;Z)` are invariant
//! under each of them and every input symbol is sent to every position by
//! exactly one of them (a Latin family). Averaging a PMF over such a family
//! gives the uniform distribution. Cyclic shifts are the usual family; some
//! channels (the van Dijk pair, for instance) are instead invariant under a
//! different regular group of relabelings.

use serde::Serialize;

use crate::channel::{is_cyclic_shift_symmetric, ChannelMatrix, WiretapChannel, SYMMETRY_SAMPLES, TAU_EQ};
use crate::probability::Pmf;

/// Largest alphabet for which the permutation search is attempted.
pub const MAX_PERMUTATION_SEARCH: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `pi_k(x) = x + k mod |X|`.
    Cyclic,
    /// A Latin family of input permutations found structurally.
    Permutation,
}

/// A Latin family of input permutations; `perms[k][x]` is the position that
/// the mass at `x` moves to under the `k`th relabeling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftFamily {
    pub kind: FamilyKind,
    pub perms: Vec<Vec<usize>>,
}

impl ShiftFamily {
    pub fn cyclic(n: usize) -> Self {
        Self {
            kind: FamilyKind::Cyclic,
            perms: (0..n).map(|k| (0..n).map(|x| (x + k) % n).collect()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    /// The `k`th relabeling of raw weights.
    pub fn apply(&self, p: &[f64], k: usize) -> Vec<f64> {
        let perm = &self.perms[k];
        let mut out = vec![0.0; p.len()];
        for (x, &w) in p.iter().enumerate() {
            out[perm[x]] = w;
        }
        out
    }

    pub fn apply_pmf(&self, p: &Pmf, k: usize) -> Pmf {
        Pmf::from_simplex_point(&self.apply(p.weights(), k))
    }

    fn is_latin(&self) -> bool {
        let n = self.perms.len();
        (0..n).all(|x| {
            let mut seen = vec![false; n];
            self.perms.iter().all(|p| !std::mem::replace(&mut seen[p[x]], true))
        })
    }
}

/// Whether relabeling the inputs by `perm` maps `ch` onto itself up to a
/// relabeling of the outputs: the multiset of columns is unchanged.
pub fn is_automorphism(ch: &ChannelMatrix, perm: &[usize]) -> bool {
    let n = ch.in_dim();
    let column = |y: usize, moved: bool| -> Vec<f64> {
        (0..n)
            .map(|x| {
                // The relabeled channel feeds weight p[x] into row perm[x]; as a
                // channel in x its row x is the old row perm[x].
                let src = if moved { perm[x] } else { x };
                ch.row(src)[y]
            })
            .collect()
    };
    let sorted = |moved: bool| {
        let mut cols: Vec<Vec<f64>> = (0..ch.out_dim()).map(|y| column(y, moved)).collect();
        cols.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(u, v)| quantize(*u).cmp(&quantize(*v)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        cols
    };
    let (a, b) = (sorted(false), sorted(true));
    a.iter()
        .zip(&b)
        .all(|(c, d)| c.iter().zip(d).all(|(u, v)| (u - v).abs() <= TAU_EQ))
}

fn quantize(v: f64) -> i64 {
    (v * 1e10).round() as i64
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn latin_subset(n: usize, candidates: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    // Index the family by the image of symbol 0.
    let by_start: Vec<Vec<&Vec<usize>>> = (0..n)
        .map(|k| candidates.iter().filter(|p| p[0] == k).collect())
        .collect();
    fn rec<'a>(k: usize, by_start: &[Vec<&'a Vec<usize>>], chosen: &mut Vec<&'a Vec<usize>>) -> bool {
        if k == by_start.len() {
            return true;
        }
        for &p in &by_start[k] {
            if chosen.iter().all(|q| q.iter().zip(p).all(|(a, b)| a != b)) {
                chosen.push(p);
                if rec(k + 1, by_start, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::with_capacity(n);
    rec(0, &by_start, &mut chosen).then(|| chosen.into_iter().cloned().collect())
}

/// Finds a family of relabelings under which both channels of `w` are
/// invariant. Cyclic shifts are certified numerically first; otherwise input
/// permutations are searched structurally (alphabets up to
/// [`MAX_PERMUTATION_SEARCH`] symbols).
pub fn symmetry_family(w: &WiretapChannel) -> Option<ShiftFamily> {
    let n = w.input_dim();
    if is_cyclic_shift_symmetric(w.main(), SYMMETRY_SAMPLES)
        && is_cyclic_shift_symmetric(w.eavesdropper(), SYMMETRY_SAMPLES)
    {
        return Some(ShiftFamily::cyclic(n));
    }
    if n > MAX_PERMUTATION_SEARCH {
        return None;
    }
    let candidates: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .filter(|p| is_automorphism(w.main(), p) && is_automorphism(w.eavesdropper(), p))
        .collect();
    let perms = latin_subset(n, &candidates)?;
    let family = ShiftFamily {
        kind: FamilyKind::Permutation,
        perms,
    };
    debug_assert!(family.is_latin());
    Some(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_standard, StandardChannel};
    use rand::SeedableRng;

    fn assert_invariant(w: &WiretapChannel, fam: &ShiftFamily) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = crate::probability::random_pmf(w.input_dim(), &mut rng);
            for k in 0..fam.len() {
                let q = fam.apply(p.weights(), k);
                assert!((w.main().mi(&q) - w.main().mi(p.weights())).abs() < 1e-12);
                assert!((w.eavesdropper().mi(&q) - w.eavesdropper().mi(p.weights())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn binary_pairs_are_cyclic() {
        let w = make_standard(StandardChannel::BscBec { eps: 0.1, alpha: 0.4 }).unwrap();
        let fam = symmetry_family(&w).unwrap();
        assert_eq!(fam.kind, FamilyKind::Cyclic);
        assert_eq!(fam.apply(&[0.2, 0.8], 1), vec![0.8, 0.2]);
    }

    #[test]
    fn van_dijk_pair_has_a_permutation_family() {
        let w = make_standard(StandardChannel::VanDijk { p: 0.1, q: 0.3, r: 0.2 }).unwrap();
        let fam = symmetry_family(&w).unwrap();
        assert_eq!(fam.kind, FamilyKind::Permutation);
        assert_eq!(fam.len(), 4);
        assert!(fam.is_latin());
        assert_invariant(&w, &fam);
        let mut avg = vec![0.0; 4];
        for k in 0..4 {
            for (a, b) in avg.iter_mut().zip(fam.apply(&[0.1, 0.2, 0.3, 0.4], k)) {
                *a += b / 4.0;
            }
        }
        assert!(avg.iter().all(|a| (a - 0.25).abs() < 1e-15));
    }

    #[test]
    fn asymmetric_pair_has_no_family() {
        let z = ChannelMatrix::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let w = WiretapChannel::new(z, ChannelMatrix::bsc(0.2).unwrap()).unwrap();
        assert!(symmetry_family(&w).is_none());
    }

    #[test]
    fn automorphism_detects_row_swaps() {
        let bsc = ChannelMatrix::bsc(0.3).unwrap();
        assert!(is_automorphism(&bsc, &[1, 0]));
        let z = ChannelMatrix::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(!is_automorphism(&z, &[1, 0]));
        assert!(is_automorphism(&z, &[0, 1]));
    }
}

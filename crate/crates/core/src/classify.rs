//! Placement of a wiretap channel among the channel orderings: more capable,
//! less noisy, cyclic shift symmetric and dominantly cyclic shift symmetric.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::AuxiliaryChain;
use crate::channel::WiretapChannel;
use crate::error::{Error, Result};
use crate::probability::{self, decompose, random_pmf, Pmf, TAU_PMF};
use crate::region;
use crate::search::{maximize_simplex, Optimum};
use crate::settings::Settings;
use crate::symmetry::{symmetry_family, FamilyKind, ShiftFamily};

/// Coordinates below this make a maximizer count as a boundary point.
pub const INTERIOR_THRESHOLD: f64 = 10.0 * TAU_PMF;

const RANDOM_PAIRS: usize = 4_000;
const LOCAL_STEPS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Seeds for a simplex search: the uniform point, the vertices and seeded
/// random points, `count` in total at most.
pub(crate) fn structured_seeds(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut seeds = vec![vec![1.0 / dim as f64; dim]];
    seeds.extend((0..dim).map(|j| Pmf::basis(dim, j).into_vec()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while seeds.len() < count {
        seeds.push(random_pmf(dim, &mut rng).into_vec());
    }
    seeds.truncate(count.max(1));
    seeds
}

/// Maximizes `sign * f_mu` over the input simplex; returns the optimum of
/// `sign * f_mu`.
pub(crate) fn optimize_fmu(w: &WiretapChannel, mu: f64, sign: f64, s: &Settings) -> Optimum {
    let n = w.input_dim();
    let top = s.starts / 2;
    let extra = structured_seeds(n, s.starts - top, s.seed);
    let objective = |p: &[f64]| sign * w.fmu(p, mu);
    maximize_simplex(n, s.class_resolution(n), top, extra, &objective)
}

/// `min f_mu` and a minimizer.
pub fn min_fmu(w: &WiretapChannel, mu: f64, s: &Settings) -> (f64, Pmf) {
    let opt = optimize_fmu(w, mu, -1.0, s);
    (-opt.value, Pmf::from_simplex_point(&opt.point))
}

/// `max f_mu` and a maximizer.
pub fn max_fmu(w: &WiretapChannel, mu: f64, s: &Settings) -> (f64, Pmf) {
    let opt = optimize_fmu(w, mu, 1.0, s);
    (opt.value, Pmf::from_simplex_point(&opt.point))
}

/// Global extrema of `f = I(X;Y) - I(X;Z)` over the input simplex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FRange {
    pub min: f64,
    pub argmin: Pmf,
    pub max: f64,
    pub argmax: Pmf,
}

pub fn f_range(w: &WiretapChannel, s: &Settings) -> FRange {
    let (min, argmin) = min_fmu(w, 0.0, s);
    let (max, argmax) = max_fmu(w, 0.0, s);
    FRange {
        min,
        argmin,
        max,
        argmax,
    }
}

/// Whether `f >= -tau_class` everywhere, with the minimizer as witness.
pub fn is_more_capable(w: &WiretapChannel) -> (bool, Pmf) {
    is_more_capable_with(w, &Settings::default())
}

pub fn is_more_capable_with(w: &WiretapChannel, s: &Settings) -> (bool, Pmf) {
    let (min, at) = min_fmu(w, 0.0, s);
    (min >= -s.tau_class, at)
}

/// Outcome of the midpoint-concavity test of `f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcavityCheck {
    pub concave: bool,
    /// Largest `(f(p) + f(p')) / 2 - f((p + p') / 2)` found.
    pub worst_violation: f64,
    pub witness: (Pmf, Pmf),
    pub pairs_tested: usize,
}

fn pair_grid_resolution(dim: usize) -> usize {
    match dim {
        0..=2 => 100,
        3 => 14,
        4 => 8,
        5 => 5,
        _ => 3,
    }
}

/// Midpoint-concavity certificate for `f` over grid pairs, seeded random
/// pairs and short segments around each grid point.
pub fn concavity_check(w: &WiretapChannel, s: &Settings) -> ConcavityCheck {
    let n = w.input_dim();
    let violation = |a: &[f64], b: &[f64]| {
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        0.5 * (w.f(a) + w.f(b)) - w.f(&mid)
    };
    let grid: Vec<Vec<f64>> = {
        let mut g = Vec::new();
        probability::for_each_grid_point(n, pair_grid_resolution(n), |p| g.push(p.to_vec()));
        g
    };
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            pairs.push((grid[i].clone(), grid[j].clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x1e55_0015);
    for _ in 0..RANDOM_PAIRS {
        pairs.push((random_pmf(n, &mut rng).into_vec(), random_pmf(n, &mut rng).into_vec()));
    }
    let mut local_centers = grid.clone();
    for _ in 0..RANDOM_PAIRS / 4 {
        local_centers.push(random_pmf(n, &mut rng).into_vec());
    }
    for c in &local_centers {
        for i in 0..n {
            for j in i + 1..n {
                for h in LOCAL_STEPS {
                    if c[i] >= h && c[j] >= h {
                        let mut a = c.clone();
                        let mut b = c.clone();
                        a[i] += h;
                        a[j] -= h;
                        b[i] -= h;
                        b[j] += h;
                        pairs.push((a, b));
                    }
                }
            }
        }
    }
    let (worst, idx) = pairs
        .par_iter()
        .enumerate()
        .map(|(k, (a, b))| (violation(a, b), k))
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x });
    let (a, b) = &pairs[idx];
    ConcavityCheck {
        concave: worst <= s.tau_class,
        worst_violation: worst,
        witness: (Pmf::from_simplex_point(a), Pmf::from_simplex_point(b)),
        pairs_tested: pairs.len(),
    }
}

/// Less-noisy test through concavity of `f`.
pub fn is_less_noisy(w: &WiretapChannel) -> bool {
    concavity_check(w, &Settings::default()).concave
}

/// Whether `f` peaks at the uniform input. Requires a symmetry family.
pub fn is_dominantly_cyclic(w: &WiretapChannel) -> Result<bool> {
    is_dominantly_cyclic_with(w, &Settings::default())
}

pub fn is_dominantly_cyclic_with(w: &WiretapChannel, s: &Settings) -> Result<bool> {
    if symmetry_family(w).is_none() {
        return Err(Error::Precondition(
            "channel pair is not certified cyclic shift symmetric".into(),
        ));
    }
    let (max, _) = max_fmu(w, 0.0, s);
    Ok(f_uniform(w) >= max - s.tau_class)
}

pub(crate) fn f_uniform(w: &WiretapChannel) -> f64 {
    w.f(Pmf::uniform(w.input_dim()).weights())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub more_capable: bool,
    pub less_noisy: bool,
    pub cyclic_shift_symmetric: bool,
    /// Which relabeling family certified the symmetry.
    pub symmetry: Option<FamilyKind>,
    pub dominantly_cyclic: bool,
    pub f_min: f64,
    pub f_min_at: Pmf,
    pub f_max: f64,
    pub f_max_at: Pmf,
    pub f_uniform: f64,
    pub concavity_violation: f64,
    pub c_b: f64,
    pub c_e: f64,
    pub notes: Vec<String>,
}

pub fn classify(w: &WiretapChannel) -> ClassificationReport {
    classify_with(w, &Settings::default())
}

pub fn classify_with(w: &WiretapChannel, s: &Settings) -> ClassificationReport {
    let range = f_range(w, s);
    let concavity = concavity_check(w, s);
    let family = symmetry_family(w);
    let fu = f_uniform(w);
    let more_capable = range.min >= -s.tau_class;
    let symmetric = family.is_some();
    let mut notes = vec![
        format!(
            "more capable: f minimized by grid search (resolution {}) plus {} local refinements; numerical certificate",
            s.class_resolution(w.input_dim()),
            s.starts
        ),
        format!(
            "less noisy: midpoint concavity of f over {} pairs, worst violation {:.3e}; relies on the concavity characterization of the less-noisy order",
            concavity.pairs_tested, concavity.worst_violation
        ),
    ];
    match family.as_ref().map(|f| f.kind) {
        Some(FamilyKind::Cyclic) => notes.push("cyclic shift symmetry: numerical certificate on grid and random inputs".into()),
        Some(FamilyKind::Permutation) => notes.push(
            "symmetric under a regular family of input relabelings (found structurally) rather than plain cyclic shifts".into(),
        ),
        None => notes.push("no symmetry family found".into()),
    }
    if concavity.concave && !more_capable {
        notes.push("inconsistent: f passes the concavity test but takes negative values".into());
    }
    ClassificationReport {
        more_capable,
        less_noisy: concavity.concave,
        cyclic_shift_symmetric: symmetric,
        symmetry: family.map(|f| f.kind),
        dominantly_cyclic: symmetric && fu >= range.max - s.tau_class,
        f_min: range.min,
        f_min_at: range.argmin,
        f_max: range.max,
        f_max_at: range.argmax,
        f_uniform: fu,
        concavity_violation: concavity.worst_violation,
        c_b: w.c_b(),
        c_e: w.c_e(),
        notes,
    }
}

/// How an improving prefix was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefixConstruction {
    /// Mixing the minimizer of `f` with vertices so that the mixture is the
    /// (interior) maximizer of `f`.
    Simplex,
    /// The maximizer of `f` lies on the boundary; the prefix comes from the
    /// optimized secrecy problem instead.
    Optimized,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImprovingPrefix {
    pub chain: AuxiliaryChain,
    /// `I(V;Y) - I(V;Z)` of the chain.
    pub secrecy_rate: f64,
    /// `max f`, the best value without prefixing.
    pub baseline: f64,
    pub construction: PrefixConstruction,
}

impl ImprovingPrefix {
    pub fn gain(&self) -> f64 {
        self.secrecy_rate - self.baseline
    }
}

/// A prefix `V -> X` with `I(V;Y) - I(V;Z) > max f`, for channels that are
/// not more capable. `None` for more-capable channels or when no strict
/// improvement is found.
pub fn improving_prefix(w: &WiretapChannel) -> Option<ImprovingPrefix> {
    improving_prefix_with(w, &Settings::default())
}

pub fn improving_prefix_with(w: &WiretapChannel, s: &Settings) -> Option<ImprovingPrefix> {
    let range = f_range(w, s);
    if range.min >= -s.tau_class {
        return None;
    }
    let n = w.input_dim();
    let secrecy = |chain: &AuxiliaryChain| -> Option<f64> {
        let t = chain.terms(w).ok()?;
        Some(t.i_vy - t.i_vz)
    };
    if range.argmax.is_interior(INTERIOR_THRESHOLD) {
        let d = decompose(&range.argmax, &range.argmin).ok()?;
        let mut rows = vec![range.argmin.weights().to_vec()];
        rows.extend(d.basis_indices.iter().map(|&j| Pmf::basis(n, j).into_vec()));
        let chain = AuxiliaryChain::prefix_only(d.q.weights(), &rows);
        let rate = secrecy(&chain)?;
        if rate > range.max + s.tau_class {
            return Some(ImprovingPrefix {
                chain,
                secrecy_rate: rate,
                baseline: range.max,
                construction: PrefixConstruction::Simplex,
            });
        }
        return None;
    }
    let sol = region::auxiliary_problem_with(w, 0.0, s);
    let chain = sol.chain.clone();
    let rate = secrecy(&chain)?;
    (rate > range.max + s.tau_class).then_some(ImprovingPrefix {
        chain,
        secrecy_rate: rate,
        baseline: range.max,
        construction: PrefixConstruction::Optimized,
    })
}

/// Relabeling family used by the symmetric constructions, if any.
pub fn shift_family(w: &WiretapChannel) -> Option<ShiftFamily> {
    symmetry_family(w)
}

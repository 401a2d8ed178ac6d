//! Upper-right boundary of the rate-equivocation region.
//!
//! A boundary point with supporting-line slope `mu` maximizes
//! `mu I(V;Y) + I(V;Y|U) - I(V;Z|U)` over chains `U -> V -> X`. Which chains
//! need to be searched depends on the classification of the channel: more
//! capable channels need no prefix, symmetric channels reduce to the
//! auxiliary problem
//!
//! ```text
//! max  f(sum_i lambda_i p_i) - sum_i lambda_i f_mu(p_i)
//! ```
//!
//! over `|X|` conditionals, and binary symmetric pairs reduce further to the
//! tangent analysis in [`crate::binary`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binary;
use crate::chain::{evaluate_objective, AuxiliaryChain, TAU_NUM};
use crate::channel::{ChannelMatrix, WiretapChannel, TAU_CAP};
use crate::classify::{f_range, f_uniform, max_fmu, min_fmu, FRange};
use crate::error::{Error, Result};
use crate::probability::{decompose, random_pmf, Pmf};
use crate::search::{maximize_from, top_grid_points};
use crate::settings::{Settings, TAU_OPT};
use crate::symmetry::{symmetry_family, ShiftFamily};

/// Bisection tolerance for `mu*`.
pub const MU_STAR_TOL: f64 = 1e-8;
/// `mu*` is reported as absent beyond this slope.
pub const MU_STAR_SEARCH_MAX: f64 = 1e6;
/// Slack in the `mu*` sign conditions, far below every other tolerance.
const MU_STAR_SLACK: f64 = 1e-12;

const AUX_INITIAL_STEP: f64 = 0.05;
const JOINT_SAMPLES: usize = 4096;

/// Solution of the auxiliary problem at one `mu`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxSolution {
    pub mu: f64,
    /// The objective clamped below at zero.
    pub value: f64,
    /// Best objective before clamping.
    pub raw_value: f64,
    pub lambda: Pmf,
    pub conditionals: Vec<Pmf>,
    /// `V` with `p(v) = lambda` and `p(x|v) = conditionals`, zero-weight
    /// symbols dropped.
    pub chain: AuxiliaryChain,
    pub starts: usize,
    /// Best minus worst local optimum across starts.
    pub spread: f64,
}

/// `f(sum lambda_i p_i) - sum lambda_i f_mu(p_i)` on the packed vector
/// `[lambda, p_1, .., p_n]`.
fn aux_objective(w: &WiretapChannel, mu: f64, x: &[f64]) -> f64 {
    let n = w.input_dim();
    let (lambda, conds) = x.split_at(n);
    let mut mix = [0.0f64; 16];
    let mut mix_vec;
    let mix: &mut [f64] = if n <= 16 {
        &mut mix[..n]
    } else {
        mix_vec = vec![0.0; n];
        &mut mix_vec
    };
    let mut penalty = 0.0;
    for (i, &l) in lambda.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let p = &conds[i * n..(i + 1) * n];
        for (m, v) in mix.iter_mut().zip(p) {
            *m += l * v;
        }
        penalty += l * w.fmu(p, mu);
    }
    w.f(mix) - penalty
}

fn pack(lambda: &[f64], conds: &[Vec<f64>]) -> Vec<f64> {
    let mut x = lambda.to_vec();
    for c in conds {
        x.extend_from_slice(c);
    }
    x
}

fn aux_seeds(w: &WiretapChannel, mu: f64, s: &Settings) -> Vec<Vec<f64>> {
    let n = w.input_dim();
    let basis: Vec<Vec<f64>> = (0..n).map(|j| Pmf::basis(n, j).into_vec()).collect();
    let mut seeds = Vec::new();

    let (_, fmax_at) = max_fmu(w, 0.0, s);
    seeds.push(pack(fmax_at.weights(), &basis));

    let (_, fmu_min_at) = min_fmu(w, mu, s);
    let family = symmetry_family(w).unwrap_or_else(|| ShiftFamily::cyclic(n));
    let shifts: Vec<Vec<f64>> = (0..n).map(|k| family.apply(fmu_min_at.weights(), k)).collect();
    seeds.push(pack(&vec![1.0 / n as f64; n], &shifts));

    if let Ok(d) = decompose(&fmax_at, &fmu_min_at) {
        let mut conds = vec![fmu_min_at.weights().to_vec()];
        conds.extend(d.basis_indices.iter().map(|&j| basis[j].clone()));
        seeds.push(pack(d.q.weights(), &conds));
    }

    if n == 2 {
        if let Ok(cfg) = binary::best_config(w, mu) {
            seeds.push(vec![
                cfg.lambda,
                1.0 - cfg.lambda,
                cfg.p1,
                1.0 - cfg.p1,
                cfg.p2,
                1.0 - cfg.p2,
            ]);
        }
        let grid = 20;
        let f = |x: &[f64]| aux_objective(w, mu, x);
        let mut scored = Vec::new();
        for a in 0..=grid {
            for b in 0..=grid {
                for c in b..=grid {
                    let (l, p1, p2) = (a as f64 / grid as f64, b as f64 / grid as f64, c as f64 / grid as f64);
                    let x = vec![l, 1.0 - l, p1, 1.0 - p1, p2, 1.0 - p2];
                    scored.push((f(&x), x));
                }
            }
        }
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        seeds.extend(scored.into_iter().take(s.starts / 2).map(|(_, x)| x));
    } else {
        // Sampled coarse joint grid: each block drawn from the resolution-4
        // simplex grid.
        let mut coarse = Vec::new();
        crate::probability::for_each_grid_point(n, 4, |p| coarse.push(p.to_vec()));
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xa0c5);
        let mut scored: Vec<(f64, Vec<f64>)> = (0..JOINT_SAMPLES)
            .map(|_| {
                let mut x = Vec::with_capacity(n * (n + 1));
                for _ in 0..=n {
                    x.extend_from_slice(&coarse[rand::Rng::gen_range(&mut rng, 0..coarse.len())]);
                }
                (aux_objective(w, mu, &x), x)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        seeds.extend(scored.into_iter().take(s.starts / 2).map(|(_, x)| x));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xa0c6);
    while seeds.len() < s.starts.max(4) {
        let mut x = Vec::with_capacity(n * (n + 1));
        for _ in 0..=n {
            x.extend(random_pmf(n, &mut rng).into_vec());
        }
        seeds.push(x);
    }
    seeds
}

pub fn auxiliary_problem(w: &WiretapChannel, mu: f64) -> AuxSolution {
    auxiliary_problem_with(w, mu, &Settings::default())
}

/// Multi-start solve of the auxiliary problem with `|V| = |X|`.
pub fn auxiliary_problem_with(w: &WiretapChannel, mu: f64, s: &Settings) -> AuxSolution {
    let n = w.input_dim();
    let seeds = aux_seeds(w, mu, s);
    let blocks = vec![n; n + 1];
    let f = |x: &[f64]| aux_objective(w, mu, x);
    let opt = maximize_from(&blocks, seeds, &f, AUX_INITIAL_STEP);
    let basis: Vec<Vec<f64>> = (0..n).map(|j| Pmf::basis(n, j).into_vec()).collect();
    let (value, lambda, conds) = if opt.value <= TAU_OPT {
        (0.0, basis[0].clone(), basis.clone())
    } else {
        let conds = opt.point[n..].chunks(n).map(<[f64]>::to_vec).collect();
        (opt.value, opt.point[..n].to_vec(), conds)
    };
    let chain = AuxiliaryChain::prefix_only(&lambda, &conds).pruned(0.0);
    AuxSolution {
        mu,
        value,
        raw_value: opt.value,
        lambda: Pmf::from_simplex_point(&lambda),
        conditionals: conds.iter().map(|c| Pmf::from_simplex_point(c)).collect(),
        chain,
        starts: opt.starts,
        spread: opt.spread,
    }
}

/// `U` uniform over the family, `V` in `|X|` blocks of `|V^|` symbols with
/// `p(v|u) = lambda` on block `u`, and `p(x | v in block u)` the `u`th
/// relabeling of the matching conditional.
pub(crate) fn symmetric_chain(family: &ShiftFamily, lambda: &[f64], conds: &[Vec<f64>]) -> AuxiliaryChain {
    let k = family.len();
    let m = lambda.len();
    let n = conds[0].len();
    let mut pv = vec![0.0; k * k * m];
    let mut px = Vec::with_capacity(k * m * n);
    for u in 0..k {
        pv[u * k * m + u * m..u * k * m + (u + 1) * m].copy_from_slice(lambda);
        for c in conds {
            px.extend(family.apply(c, u));
        }
    }
    AuxiliaryChain {
        pu: Pmf::uniform(k),
        pv_given_u: ChannelMatrix::from_data(k, k * m, pv),
        px_given_v: ChannelMatrix::from_data(k * m, n, px),
    }
}

fn check_uniform(chain: &AuxiliaryChain) -> Result<()> {
    let px = chain.px();
    let u = Pmf::uniform(px.dim());
    if px.max_abs_diff(&u) > 1e-9 {
        return Err(Error::Assertion(format!("induced input {px} is not uniform")));
    }
    Ok(())
}

/// Objective of a symmetric construction must equal `mu C_B + value`.
fn check_assembly(w: &WiretapChannel, mu: f64, objective: f64, value: f64) -> Result<()> {
    let expected = mu * w.c_b() + value;
    if (objective - expected).abs() > TAU_NUM + mu * TAU_CAP {
        return Err(Error::Assertion(format!(
            "constructed chain reaches {objective}, expected mu C_B + {value} = {expected}"
        )));
    }
    Ok(())
}

fn require_family(w: &WiretapChannel) -> Result<ShiftFamily> {
    symmetry_family(w).ok_or_else(|| Error::Precondition("channel pair is not certified cyclic shift symmetric".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructedChain {
    pub mu: f64,
    pub chain: AuxiliaryChain,
    pub objective: f64,
    pub aux: AuxSolution,
    pub family: ShiftFamily,
}

pub fn construct_optimal_uv(w: &WiretapChannel, mu: f64) -> Result<ConstructedChain> {
    construct_optimal_uv_with(w, mu, &Settings::default())
}

/// Optimal `(U*, V*)` for a symmetric pair: `|U*| = |X|` uniform, `|V*| = |X|^2`
/// assembled from the auxiliary solution.
pub fn construct_optimal_uv_with(w: &WiretapChannel, mu: f64, s: &Settings) -> Result<ConstructedChain> {
    let family = require_family(w)?;
    let aux = auxiliary_problem_with(w, mu, s);
    let conds: Vec<Vec<f64>> = aux.conditionals.iter().map(|c| c.weights().to_vec()).collect();
    let chain = symmetric_chain(&family, aux.lambda.weights(), &conds);
    check_uniform(&chain)?;
    let objective = evaluate_objective(w, &chain, mu)?;
    check_assembly(w, mu, objective, aux.value)?;
    Ok(ConstructedChain {
        mu,
        chain,
        objective,
        aux,
        family,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominantSolution {
    pub mu: f64,
    pub chain: AuxiliaryChain,
    pub objective: f64,
    /// `f(uniform) - min f_mu`.
    pub value: f64,
    pub argmin: Pmf,
}

pub fn dominant_shortcut(w: &WiretapChannel, mu: f64) -> Result<DominantSolution> {
    dominant_shortcut_with(w, mu, &Settings::default())
}

/// Boundary point of a dominantly symmetric pair without rate splitting:
/// `V` uniform over the relabelings of the minimizer of `f_mu`.
pub fn dominant_shortcut_with(w: &WiretapChannel, mu: f64, s: &Settings) -> Result<DominantSolution> {
    let family = require_family(w)?;
    let (fmax, _) = max_fmu(w, 0.0, s);
    let fu = f_uniform(w);
    if fu < fmax - s.tau_class {
        return Err(Error::Precondition(format!(
            "not dominantly symmetric: f(uniform) = {fu} < max f = {fmax}"
        )));
    }
    let (fmin, argmin) = min_fmu(w, mu, s);
    let n = w.input_dim();
    let conds: Vec<Vec<f64>> = (0..n).map(|k| family.apply(argmin.weights(), k)).collect();
    let chain = AuxiliaryChain::prefix_only(&vec![1.0 / n as f64; n], &conds);
    check_uniform(&chain)?;
    let objective = evaluate_objective(w, &chain, mu)?;
    let value = fu - fmin;
    check_assembly(w, mu, objective, value)?;
    Ok(DominantSolution {
        mu,
        chain,
        objective,
        value,
        argmin,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerSolution {
    pub chain: AuxiliaryChain,
    pub rate: f64,
    pub equivocation: f64,
    /// `true` when the maximizer of `f` is uniform and `U` is dropped.
    pub collapsed: bool,
}

pub fn corner_cb_cs(w: &WiretapChannel) -> Result<CornerSolution> {
    corner_cb_cs_with(w, &Settings::default())
}

/// The `(C_B, C_s)` corner of a more-capable symmetric pair: `V = X`, `U`
/// uniform over the relabelings of the maximizer of `f`.
pub fn corner_cb_cs_with(w: &WiretapChannel, s: &Settings) -> Result<CornerSolution> {
    let family = require_family(w)?;
    let range = f_range(w, s);
    if range.min < -s.tau_class {
        return Err(Error::Precondition(format!(
            "not more capable: f reaches {} at {}",
            range.min, range.argmin
        )));
    }
    let n = w.input_dim();
    let uniform = Pmf::uniform(n);
    let collapsed = f_uniform(w) >= range.max - s.tau_class;
    let chain = if collapsed {
        AuxiliaryChain::trivial(&uniform)
    } else {
        let conds: Vec<Vec<f64>> = (0..n).map(|k| family.apply(range.argmax.weights(), k)).collect();
        AuxiliaryChain::split_only(&conds)
    };
    check_uniform(&chain)?;
    let t = chain.terms(w)?;
    let (rate, equivocation) = t.rate_pair();
    if (rate - w.c_b()).abs() > TAU_NUM || (equivocation - range.max.max(0.0)).abs() > TAU_NUM {
        return Err(Error::Assertion(format!(
            "corner reached ({rate}, {equivocation}), expected ({}, {})",
            w.c_b(),
            range.max
        )));
    }
    Ok(CornerSolution {
        chain,
        rate,
        equivocation,
        collapsed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecrecyMethod {
    /// `max f - min f` for dominantly symmetric pairs.
    DominantSymmetry,
    /// `max f` for more-capable pairs.
    MoreCapable,
    /// Auxiliary problem at `mu = 0`.
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecrecyCapacity {
    pub value: f64,
    pub chain: AuxiliaryChain,
    pub method: SecrecyMethod,
    /// `max f - min f`.
    pub upper_bound: f64,
    pub f_max: f64,
    pub f_min: f64,
}

pub fn secrecy_capacity(w: &WiretapChannel) -> SecrecyCapacity {
    secrecy_capacity_with(w, &Settings::default())
}

pub fn secrecy_capacity_with(w: &WiretapChannel, s: &Settings) -> SecrecyCapacity {
    let range = f_range(w, s);
    let upper_bound = range.max - range.min;
    let dominant = symmetry_family(w).is_some() && f_uniform(w) >= range.max - s.tau_class;
    let (value, chain, method) = if range.min >= -s.tau_class {
        (range.max.max(0.0), AuxiliaryChain::trivial(&range.argmax), SecrecyMethod::MoreCapable)
    } else if dominant {
        match dominant_shortcut_with(w, 0.0, s) {
            Ok(d) => (d.value, d.chain, SecrecyMethod::DominantSymmetry),
            Err(_) => aux_secrecy(w, s),
        }
    } else {
        aux_secrecy(w, s)
    };
    SecrecyCapacity {
        value,
        chain,
        method,
        upper_bound,
        f_max: range.max,
        f_min: range.min,
    }
}

fn aux_secrecy(w: &WiretapChannel, s: &Settings) -> (f64, AuxiliaryChain, SecrecyMethod) {
    let sol = auxiliary_problem_with(w, 0.0, s);
    (sol.value, sol.chain, SecrecyMethod::Auxiliary)
}

/// One supporting point of the boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionPoint {
    pub mu: f64,
    pub rate: f64,
    pub equivocation: f64,
    pub chain: AuxiliaryChain,
}

impl RegionPoint {
    pub fn from_chain(w: &WiretapChannel, mu: f64, chain: AuxiliaryChain) -> Result<Self> {
        evaluate_objective(w, &chain, mu)?;
        let (rate, equivocation) = chain.terms(w)?.rate_pair();
        Ok(Self {
            mu,
            rate,
            equivocation,
            chain,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMethod {
    Binary,
    MoreCapable,
    DominantSymmetry,
    Symmetric,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuStarRegime {
    /// `min f_mu >= 0` already at `mu = 0`.
    MoreCapable,
    /// `f(uniform) <= min f_mu`, used when `f <= 0` everywhere.
    SymmetricBeatsMin,
    /// `min f_mu >= 0`.
    NonNegative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuStar {
    pub value: f64,
    /// Largest tested slope at which the condition fails (equals `value`
    /// when `value = 0`).
    pub lower: f64,
    pub regime: MuStarRegime,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub method: TraceMethod,
    /// Supporting points in increasing `mu`, including the ends of the
    /// corner segment when there is one.
    pub points: Vec<RegionPoint>,
    pub mu_star: Option<MuStar>,
    /// Indices into `points` of the straight segment of slope `mu*`.
    pub corner_segment: Option<(usize, usize)>,
    pub secrecy_capacity: f64,
    pub c_b: f64,
    pub c_e: f64,
    pub warnings: Vec<String>,
}

impl RegionBoundary {
    /// Distinct `(R, Re)` pairs sorted by rate.
    pub fn frontier(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.points.iter().map(|p| (p.rate, p.equivocation)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 && (a.1 - b.1).abs() <= 1e-12);
        pts
    }

    /// Concave and non-increasing: slopes between consecutive frontier points
    /// are non-positive and non-increasing, within `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        let pts = self.frontier();
        let mut last_slope = f64::INFINITY;
        for pair in pts.windows(2) {
            let (dr, de) = (pair[1].0 - pair[0].0, pair[1].1 - pair[0].1);
            if dr <= 1e-12 {
                if de > tol {
                    return false;
                }
                continue;
            }
            if de > tol {
                return false;
            }
            let slope = de / dr;
            // Compare the increments rather than the slopes, which blow up
            // over tiny rate steps.
            if slope > last_slope && de - last_slope * dr > tol {
                return false;
            }
            last_slope = slope;
        }
        true
    }

    /// Last point in `mu` order.
    pub fn terminal(&self) -> Option<&RegionPoint> {
        self.points.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,R,Re\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::io::fmt_sig(p.mu),
                crate::io::fmt_sig(p.rate),
                crate::io::fmt_sig(p.equivocation)
            ));
        }
        out
    }
}

fn check_mu_grid(mu_grid: &[f64]) -> Result<()> {
    if mu_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "mu_grid",
            value: 0.0,
            reason: "must not be empty",
        });
    }
    if let Some(&bad) = mu_grid.iter().find(|m| !(**m >= 0.0) || !m.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: bad,
            reason: "must be finite and non-negative",
        });
    }
    if mu_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "mu_grid",
            value: f64::NAN,
            reason: "must be strictly increasing",
        });
    }
    Ok(())
}

/// Smallest `mu` at which the monotone condition `cond` holds, by doubling
/// and bisection to [`MU_STAR_TOL`]; `None` beyond [`MU_STAR_SEARCH_MAX`].
pub fn locate_threshold(cond: impl Fn(f64) -> bool) -> Option<(f64, f64)> {
    if cond(0.0) {
        return Some((0.0, 0.0));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !cond(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > MU_STAR_SEARCH_MAX {
            return None;
        }
    }
    while hi - lo > MU_STAR_TOL {
        let mid = 0.5 * (lo + hi);
        if cond(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo, hi))
}

/// The `mu*` regime implied by the extrema of `f`.
pub fn mu_star_regime(range: &FRange, tau: f64) -> MuStarRegime {
    if range.min >= -tau {
        MuStarRegime::MoreCapable
    } else if range.max <= tau {
        MuStarRegime::SymmetricBeatsMin
    } else {
        MuStarRegime::NonNegative
    }
}

/// Defining condition of `mu*` given `min f_mu` and `f(uniform)`.
pub fn mu_star_condition(regime: MuStarRegime, min_fmu: f64, f_uniform: f64) -> bool {
    match regime {
        MuStarRegime::MoreCapable | MuStarRegime::NonNegative => min_fmu >= -MU_STAR_SLACK,
        MuStarRegime::SymmetricBeatsMin => f_uniform <= min_fmu + MU_STAR_SLACK,
    }
}

pub(crate) fn find_mu_star(regime: MuStarRegime, f_uniform: f64, min_fmu: impl Fn(f64) -> f64) -> Option<MuStar> {
    if regime == MuStarRegime::MoreCapable {
        return Some(MuStar {
            value: 0.0,
            lower: 0.0,
            regime,
        });
    }
    locate_threshold(|mu| mu_star_condition(regime, min_fmu(mu), f_uniform)).map(|(lo, hi)| MuStar {
        value: hi,
        lower: lo,
        regime,
    })
}

/// Builds the boundary from per-`mu` solutions, inserting the `mu*` corner
/// segment when `mu* > 0`.
fn assemble(
    w: &WiretapChannel,
    method: TraceMethod,
    mu_grid: &[f64],
    mu_star: Option<MuStar>,
    solve: &(dyn Fn(f64) -> Result<RegionPoint> + Sync),
    s: &Settings,
) -> Result<RegionBoundary> {
    let mut points: Vec<RegionPoint> = mu_grid.par_iter().map(|&mu| solve(mu)).collect::<Result<_>>()?;
    let mut corner_segment = None;
    if let Some(ms) = mu_star.filter(|m| m.value > 0.0) {
        let left = solve(ms.lower)?;
        let right = solve(ms.value)?;
        let pos = points.partition_point(|p| p.mu < ms.lower);
        points.insert(pos, left);
        let pos = points.partition_point(|p| p.mu <= ms.value).max(pos + 1);
        points.insert(pos, right);
        corner_segment = Some((pos - 1, pos));
        // Points after the segment collapse onto its right end.
        debug_assert!(points[pos - 1].mu <= points[pos].mu);
    }
    let sc = secrecy_capacity_with(w, s).value;
    Ok(RegionBoundary {
        method,
        points,
        mu_star,
        corner_segment,
        secrecy_capacity: sc,
        c_b: w.c_b(),
        c_e: w.c_e(),
        warnings: Vec::new(),
    })
}

/// Packed `[p(u), p(x|u=0), ..]` objective `mu I(X;Y) + sum_u p(u) f(p(x|u))`.
fn split_objective(w: &WiretapChannel, mu: f64, x: &[f64]) -> f64 {
    let n = w.input_dim();
    let (pu, conds) = x.split_at(n);
    let mut px = vec![0.0; n];
    let mut acc = 0.0;
    for (u, &p) in pu.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let c = &conds[u * n..(u + 1) * n];
        px.iter_mut().zip(c).for_each(|(a, b)| *a += p * b);
        acc += p * w.f(c);
    }
    mu * w.main().mi(&px) + acc
}

fn solve_more_capable(w: &WiretapChannel, mu: f64, family: Option<&ShiftFamily>, s: &Settings) -> Result<RegionPoint> {
    let n = w.input_dim();
    let f = |x: &[f64]| split_objective(w, mu, x);
    let mut seeds = Vec::new();
    let (_, fmu_max_at) = max_fmu(w, mu, s);
    let (_, fmax_at) = max_fmu(w, 0.0, s);
    let mut trivial = Pmf::basis(n, 0).into_vec();
    for _ in 0..n {
        trivial.extend_from_slice(fmu_max_at.weights());
    }
    seeds.push(trivial);
    let fam = family.cloned().unwrap_or_else(|| ShiftFamily::cyclic(n));
    let mut sym = vec![1.0 / n as f64; n];
    for k in 0..n {
        sym.extend(fam.apply(fmax_at.weights(), k));
    }
    seeds.push(sym);
    let top = top_grid_points(n, s.class_resolution(n).min(40), n, &|p: &[f64]| w.f(p));
    let mut mixed = vec![1.0 / n as f64; n];
    for k in 0..n {
        mixed.extend_from_slice(&top[k.min(top.len() - 1)].1);
    }
    seeds.push(mixed);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x5711);
    while seeds.len() < s.starts.max(4) {
        let mut x = Vec::new();
        for _ in 0..=n {
            x.extend(random_pmf(n, &mut rng).into_vec());
        }
        seeds.push(x);
    }
    let opt = maximize_from(&vec![n; n + 1], seeds, &f, AUX_INITIAL_STEP);
    let pu = Pmf::from_simplex_point(&opt.point[..n]);
    let chain = AuxiliaryChain::new(
        pu,
        ChannelMatrix::from_data(n, n, opt.point[n..].to_vec()),
        ChannelMatrix::identity(n),
    )?
    .pruned(0.0);
    RegionPoint::from_chain(w, mu, chain)
}

pub fn trace_more_capable(w: &WiretapChannel, mu_grid: &[f64]) -> Result<RegionBoundary> {
    trace_more_capable_with(w, mu_grid, &Settings::default())
}

/// Boundary of a more-capable pair: no prefix, `|U| <= |X|`.
pub fn trace_more_capable_with(w: &WiretapChannel, mu_grid: &[f64], s: &Settings) -> Result<RegionBoundary> {
    check_mu_grid(mu_grid)?;
    let range = f_range(w, s);
    if range.min < -s.tau_class {
        return Err(Error::Precondition(format!(
            "not more capable: f reaches {} at {}",
            range.min, range.argmin
        )));
    }
    let family = symmetry_family(w);
    let solve = |mu: f64| solve_more_capable(w, mu, family.as_ref(), s);
    assemble(w, TraceMethod::MoreCapable, mu_grid, None, &solve, s)
}

/// Packed `[p(u), p(v|u) rows, p(x|v) rows]` objective for the general
/// fallback, evaluated through the input.
fn general_objective(w: &WiretapChannel, mu: f64, x: &[f64]) -> f64 {
    let n = w.input_dim();
    let (pu, rest) = x.split_at(n);
    let (pvu, pxv) = rest.split_at(n * n);
    let mut px = vec![0.0; n];
    let mut pv = vec![0.0; n];
    let mut acc = 0.0;
    for (u, &p) in pu.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let row = &pvu[u * n..(u + 1) * n];
        let mut pxu = vec![0.0; n];
        for (v, &q) in row.iter().enumerate() {
            pv[v] += p * q;
            for (a, b) in pxu.iter_mut().zip(&pxv[v * n..(v + 1) * n]) {
                *a += q * b;
            }
        }
        px.iter_mut().zip(&pxu).for_each(|(a, b)| *a += p * b);
        acc += p * w.f(&pxu);
    }
    let mut prefix = 0.0;
    for (v, &q) in pv.iter().enumerate() {
        if q > 0.0 {
            prefix += q * w.fmu(&pxv[v * n..(v + 1) * n], mu);
        }
    }
    mu * w.main().mi(&px) + acc - prefix
}

fn solve_general(w: &WiretapChannel, mu: f64, s: &Settings) -> Result<RegionPoint> {
    let n = w.input_dim();
    let aux = auxiliary_problem_with(w, mu, s);
    let mut seeds = Vec::new();
    // U constant with the auxiliary prefix.
    let mut x = Pmf::basis(n, 0).into_vec();
    for _ in 0..n {
        x.extend_from_slice(aux.lambda.weights());
    }
    for c in &aux.conditionals {
        x.extend_from_slice(c.weights());
    }
    seeds.push(x);
    // No prefix, best single input.
    let (_, fmu_max_at) = max_fmu(w, mu, s);
    let mut x = Pmf::basis(n, 0).into_vec();
    for _ in 0..n {
        x.extend_from_slice(fmu_max_at.weights());
    }
    for j in 0..n {
        x.extend(Pmf::basis(n, j).into_vec());
    }
    seeds.push(x);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x6e6e);
    while seeds.len() < s.starts.max(4) {
        let mut x = Vec::new();
        for _ in 0..(2 * n + 1) {
            x.extend(random_pmf(n, &mut rng).into_vec());
        }
        seeds.push(x);
    }
    let f = |x: &[f64]| general_objective(w, mu, x);
    let opt = maximize_from(&vec![n; 2 * n + 1], seeds, &f, AUX_INITIAL_STEP);
    let chain = AuxiliaryChain::new(
        Pmf::from_simplex_point(&opt.point[..n]),
        ChannelMatrix::from_data(n, n, opt.point[n..n + n * n].to_vec()),
        ChannelMatrix::from_data(n, n, opt.point[n + n * n..].to_vec()),
    )?
    .pruned(0.0);
    RegionPoint::from_chain(w, mu, chain)
}

fn solve_symmetric(w: &WiretapChannel, mu: f64, s: &Settings) -> Result<RegionPoint> {
    let c = construct_optimal_uv_with(w, mu, s)?;
    RegionPoint::from_chain(w, mu, c.chain)
}

fn solve_dominant(w: &WiretapChannel, mu: f64, s: &Settings) -> Result<RegionPoint> {
    let d = dominant_shortcut_with(w, mu, s)?;
    RegionPoint::from_chain(w, mu, d.chain)
}

pub fn trace_region(w: &WiretapChannel, mu_grid: &[f64]) -> Result<RegionBoundary> {
    trace_region_with(w, mu_grid, &Settings::default())
}

/// Traces the boundary with the cheapest construction the classification
/// allows: the binary tangent analysis for symmetric binary pairs, the
/// no-prefix search for more-capable pairs, the symmetric constructions for
/// symmetric pairs, and a general chain search otherwise.
pub fn trace_region_with(w: &WiretapChannel, mu_grid: &[f64], s: &Settings) -> Result<RegionBoundary> {
    check_mu_grid(mu_grid)?;
    let n = w.input_dim();
    let range = f_range(w, s);
    let family = symmetry_family(w);
    let more_capable = range.min >= -s.tau_class;
    if let Some(fam) = family.as_ref() {
        let fu = f_uniform(w);
        let regime = mu_star_regime(&range, s.tau_class);
        if n == 2 {
            let mu_star = find_mu_star(regime, fu, |mu| binary::min_fmu_1d(w, mu).0);
            let solve = |mu: f64| binary::region_point(w, mu, fam);
            return assemble(w, TraceMethod::Binary, mu_grid, mu_star, &solve, s);
        }
        let mu_star = find_mu_star(regime, fu, |mu| min_fmu(w, mu, s).0);
        if fu >= range.max - s.tau_class {
            let solve = |mu: f64| solve_dominant(w, mu, s);
            return assemble(w, TraceMethod::DominantSymmetry, mu_grid, mu_star, &solve, s);
        }
        let solve = |mu: f64| solve_symmetric(w, mu, s);
        return assemble(w, TraceMethod::Symmetric, mu_grid, mu_star, &solve, s);
    }
    if more_capable {
        return trace_more_capable_with(w, mu_grid, s);
    }
    let solve = |mu: f64| solve_general(w, mu, s);
    let mut b = assemble(w, TraceMethod::General, mu_grid, None, &solve, s)?;
    let msg = "no ordering or symmetry certificate: boundary from a general multi-start search with |U|, |V| <= |X|; points may be suboptimal".to_string();
    log::warn!("{msg}");
    b.warnings.push(msg);
    Ok(b)
}

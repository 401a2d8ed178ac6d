//! Binary-input pairs.
//!
//! Inputs are parameterized by `p = P(X = 0)`, i.e. the PMF `[p, 1 - p]`.
//! With a binary input the auxiliary problem is
//!
//! ```text
//! max over (lambda, p1, p2):  f(m) - lambda f_mu(p1) - (1 - lambda) f_mu(p2),
//!                              m = lambda p1 + (1 - lambda) p2,
//! ```
//!
//! the gap at `m` between `f` and the chord of `f_mu` through `p1` and `p2`.
//! Stationary points have the chord tangent to `f_mu` at every interior end
//! point, which leaves a handful of configurations per `mu`: the trivial
//! chord `(0, 1)`, chords from an end point tangent at one interior point,
//! and bitangent chords.

use serde::Serialize;

use crate::chain::{evaluate_objective, AuxiliaryChain, TAU_NUM};
use crate::channel::{make_standard, ChannelMatrix, StandardChannel, WiretapChannel, TAU_CAP};
use crate::classify::{classify_with, ClassificationReport};
use crate::error::{Error, Result};
use crate::region::{find_mu_star, mu_star_regime, symmetric_chain, MuStar, RegionPoint};
use crate::search::pattern_search;
use crate::settings::Settings;
use crate::symmetry::ShiftFamily;

/// Spacing of the dense curve grid.
pub const H_GRID: f64 = 1e-4;
/// Finite-difference step for exported derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Residual tolerance of the tangency conditions.
pub const TAU_TAN: f64 = 1e-6;

const GRID_N: usize = 10_000;
const ROOT_TOL: f64 = 1e-13;
const TIE_TOL: f64 = 1e-10;
/// Coarser stride (in grid cells) for the bitangent scan.
const BITANGENT_STRIDE: usize = 10;

fn require_binary(w: &WiretapChannel) -> Result<()> {
    if w.input_dim() == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context: "binary-input analysis",
            expected: 2,
            found: w.input_dim(),
        })
    }
}

/// `dI/dp` and `d^2I/dp^2` of a binary-input channel at `p = P(X = 0)`.
fn mi_derivatives(ch: &ChannelMatrix, p: f64) -> (f64, f64) {
    let (r0, r1) = (ch.row(0), ch.row(1));
    let mut d1 = ch.row_entropy(1) - ch.row_entropy(0);
    let mut d2 = 0.0;
    for y in 0..ch.out_dim() {
        let d = r0[y] - r1[y];
        if d == 0.0 {
            continue;
        }
        let q = p * r0[y] + (1.0 - p) * r1[y];
        d1 -= d * q.log2();
        d2 -= d * d / (q * std::f64::consts::LN_2);
    }
    (d1, d2)
}

/// `f_mu` and its analytic derivatives on a binary pair.
#[derive(Clone, Copy)]
struct Curve<'a> {
    w: &'a WiretapChannel,
    mu: f64,
}

impl Curve<'_> {
    fn fmu(&self, p: f64) -> f64 {
        self.w.fmu(&[p, 1.0 - p], self.mu)
    }

    fn f(&self, p: f64) -> f64 {
        self.w.f(&[p, 1.0 - p])
    }

    fn dfmu(&self, p: f64) -> f64 {
        let (y, _) = mi_derivatives(self.w.main(), p);
        let (z, _) = mi_derivatives(self.w.eavesdropper(), p);
        (self.mu + 1.0) * y - z
    }

    fn d2fmu(&self, p: f64) -> f64 {
        let (_, y) = mi_derivatives(self.w.main(), p);
        let (_, z) = mi_derivatives(self.w.eavesdropper(), p);
        (self.mu + 1.0) * y - z
    }

    fn df(&self, p: f64) -> f64 {
        let (y, _) = mi_derivatives(self.w.main(), p);
        let (z, _) = mi_derivatives(self.w.eavesdropper(), p);
        y - z
    }

    fn d2f(&self, p: f64) -> f64 {
        let (_, y) = mi_derivatives(self.w.main(), p);
        let (_, z) = mi_derivatives(self.w.eavesdropper(), p);
        y - z
    }
}

fn grid_point(i: usize) -> f64 {
    if i == GRID_N {
        1.0
    } else {
        i as f64 * H_GRID
    }
}

/// Golden-section maximization of `g` on `[a, b]`.
fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-13 {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - R * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + R * (b - a);
            gd = g(d);
        }
    }
    let mut best = (gc, c);
    for x in [a, b, d] {
        let v = g(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    best
}

/// Maximizes `g` over `[a, b]` by a scan with `steps` cells and golden-section
/// refinement around the best cell. Returns `(value, argmax)`.
fn maximize_1d(g: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> (f64, f64) {
    let h = (b - a) / steps as f64;
    let at = |i: usize| if i == steps { b } else { a + i as f64 * h };
    let mut best = (f64::NEG_INFINITY, a, 0usize);
    for i in 0..=steps {
        let x = at(i);
        let v = g(x);
        if v > best.0 {
            best = (v, x, i);
        }
    }
    let lo = at(best.2.saturating_sub(1));
    let hi = at((best.2 + 1).min(steps));
    let refined = golden_max(&g, lo, hi);
    if refined.0 > best.0 {
        refined
    } else {
        (best.0, best.1)
    }
}

/// `min f_mu` over `[0, 1]` and its minimizer `p = P(X = 0)`.
pub fn min_fmu_1d(w: &WiretapChannel, mu: f64) -> (f64, f64) {
    let c = Curve { w, mu };
    let (v, p) = maximize_1d(|p| -c.fmu(p), 0.0, 1.0, GRID_N);
    (-v, p)
}

/// `max f` over `[0, 1]` and its maximizer.
pub fn max_f_1d(w: &WiretapChannel) -> (f64, f64) {
    let c = Curve { w, mu: 0.0 };
    maximize_1d(|p| c.f(p), 0.0, 1.0, GRID_N)
}

/// Dense samples of `f` and `f_mu` with finite-difference derivatives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    pub mu: f64,
    pub grid: Vec<f64>,
    pub f_values: Vec<f64>,
    pub fmu_values: Vec<f64>,
    pub dfmu: Vec<f64>,
    pub d2fmu: Vec<f64>,
}

impl CurveSample {
    pub fn to_csv(&self) -> String {
        use crate::io::fmt_sig;
        let mut out = String::from("px,f,fmu,dfmu,d2fmu\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_sig(self.grid[i]),
                fmt_sig(self.f_values[i]),
                fmt_sig(self.fmu_values[i]),
                fmt_sig(self.dfmu[i]),
                fmt_sig(self.d2fmu[i])
            ));
        }
        out
    }
}

/// Finite-difference first and second derivatives of `g` at `p`: centered in
/// the interior, one-sided second order at the end points.
fn fd_derivatives(g: impl Fn(f64) -> f64, p: f64) -> (f64, f64) {
    let h = FD_STEP;
    if p - h < 0.0 {
        let (g0, g1, g2, g3) = (g(p), g(p + h), g(p + 2.0 * h), g(p + 3.0 * h));
        ((-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * h), (2.0 * g0 - 5.0 * g1 + 4.0 * g2 - g3) / (h * h))
    } else if p + h > 1.0 {
        let (g0, g1, g2, g3) = (g(p), g(p - h), g(p - 2.0 * h), g(p - 3.0 * h));
        ((3.0 * g0 - 4.0 * g1 + g2) / (2.0 * h), (2.0 * g0 - 5.0 * g1 + 4.0 * g2 - g3) / (h * h))
    } else {
        let (gm, g0, gp) = (g(p - h), g(p), g(p + h));
        ((gp - gm) / (2.0 * h), (gp - 2.0 * g0 + gm) / (h * h))
    }
}

/// Samples the curve on `resolution + 1` equally spaced points of `[0, 1]`.
pub fn sample_curve(w: &WiretapChannel, mu: f64, resolution: usize) -> Result<CurveSample> {
    require_binary(w)?;
    if resolution < 1 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            value: resolution as f64,
            reason: "must be at least 1",
        });
    }
    let c = Curve { w, mu };
    let grid: Vec<f64> = (0..=resolution)
        .map(|i| if i == resolution { 1.0 } else { i as f64 / resolution as f64 })
        .collect();
    let mut s = CurveSample {
        mu,
        f_values: Vec::with_capacity(grid.len()),
        fmu_values: Vec::with_capacity(grid.len()),
        dfmu: Vec::with_capacity(grid.len()),
        d2fmu: Vec::with_capacity(grid.len()),
        grid,
    };
    for &p in &s.grid {
        s.f_values.push(c.f(p));
        s.fmu_values.push(c.fmu(p));
        let (d1, d2) = fd_derivatives(|x| c.fmu(x), p);
        s.dfmu.push(d1);
        s.d2fmu.push(d2);
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigKind {
    /// `(p1, p2) = (0, 1)`: no prefix.
    Trivial,
    /// `p1 = 0`, chord tangent at `p2`.
    BoundaryLeft,
    /// `p2 = 1 - p1`, `lambda = 1/2`, chord tangent at both points.
    InteriorSymmetric,
    /// `p2 = 1`, chord tangent at `p1`.
    BoundaryRight,
    /// Any other bitangent chord.
    InteriorTangent,
}

/// A stationary `(lambda, p1, p2)` with `p1 <= p2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangentConfig {
    pub lambda: f64,
    pub p1: f64,
    pub p2: f64,
    pub objective: f64,
    pub kind: ConfigKind,
    /// `f'(m)` minus the chord slope (zero when `m` is an end point).
    pub lw1_residual: f64,
    /// Largest `|f_mu'(p_k) - slope|` over interior end points.
    pub tangency_residual: f64,
}

impl TangentConfig {
    pub fn mixture(&self) -> f64 {
        self.lambda * self.p1 + (1.0 - self.lambda) * self.p2
    }

    /// Recomputes the objective from `(lambda, p1, p2)`.
    pub fn evaluate(&self, w: &WiretapChannel, mu: f64) -> f64 {
        eqopt(w, mu, self.lambda, self.p1, self.p2)
    }
}

/// `f(m) - lambda f_mu(p1) - (1 - lambda) f_mu(p2)`.
pub fn eqopt(w: &WiretapChannel, mu: f64, lambda: f64, p1: f64, p2: f64) -> f64 {
    let c = Curve { w, mu };
    c.f(lambda * p1 + (1.0 - lambda) * p2) - lambda * c.fmu(p1) - (1.0 - lambda) * c.fmu(p2)
}

fn is_interior(p: f64) -> bool {
    p > 0.0 && p < 1.0
}

/// Builds the configuration for the chord through `p1 < p2`: the mixture
/// point maximizes `f - chord` over `[p1, p2]`.
fn chord_config(c: Curve, p1: f64, p2: f64, kind: ConfigKind) -> Option<TangentConfig> {
    if !(p2 > p1) {
        return None;
    }
    let (f1, f2) = (c.fmu(p1), c.fmu(p2));
    let slope = (f2 - f1) / (p2 - p1);
    let chord = |m: f64| f1 + slope * (m - p1);
    let steps = (((p2 - p1) / H_GRID).ceil() as usize).clamp(16, GRID_N);
    let (_, m) = maximize_1d(|m| c.f(m) - chord(m), p1, p2, steps);
    let lambda = ((p2 - m) / (p2 - p1)).clamp(0.0, 1.0);
    let m_interior = lambda > 0.0 && lambda < 1.0 && is_interior(m);
    let lw1_residual = if m_interior { c.df(m) - slope } else { 0.0 };
    let mut tangency_residual: f64 = 0.0;
    for p in [p1, p2] {
        if is_interior(p) {
            tangency_residual = tangency_residual.max((c.dfmu(p) - slope).abs());
        }
    }
    let kind = if kind == ConfigKind::InteriorTangent
        && (p1 + p2 - 1.0).abs() <= TAU_TAN
        && (lambda - 0.5).abs() <= TAU_TAN
    {
        ConfigKind::InteriorSymmetric
    } else {
        kind
    };
    Some(TangentConfig {
        lambda,
        p1,
        p2,
        objective: eqopt(c.w, c.mu, lambda, p1, p2),
        kind,
        lw1_residual,
        tangency_residual,
    })
}

/// Describes an arbitrary triple: the kind follows from the end points and
/// the residuals are those of the chord through them.
pub(crate) fn config_from_triple(w: &WiretapChannel, mu: f64, lambda: f64, p1: f64, p2: f64) -> TangentConfig {
    let (lambda, p1, p2) = if p1 <= p2 { (lambda, p1, p2) } else { (1.0 - lambda, p2, p1) };
    let c = Curve { w, mu };
    let slope = if p2 > p1 { (c.fmu(p2) - c.fmu(p1)) / (p2 - p1) } else { c.dfmu(p1.clamp(1e-12, 1.0 - 1e-12)) };
    let m = lambda * p1 + (1.0 - lambda) * p2;
    let lw1_residual = if lambda > 0.0 && lambda < 1.0 && is_interior(m) { c.df(m) - slope } else { 0.0 };
    let tangency_residual = [p1, p2]
        .into_iter()
        .filter(|&p| is_interior(p))
        .map(|p| (c.dfmu(p) - slope).abs())
        .fold(0.0, f64::max);
    let kind = match (p1 <= 0.0, p2 >= 1.0) {
        (true, true) => ConfigKind::Trivial,
        (true, false) => ConfigKind::BoundaryLeft,
        (false, true) => ConfigKind::BoundaryRight,
        (false, false) if (p1 + p2 - 1.0).abs() <= TAU_TAN && (lambda - 0.5).abs() <= TAU_TAN => {
            ConfigKind::InteriorSymmetric
        }
        (false, false) => ConfigKind::InteriorTangent,
    };
    TangentConfig {
        lambda,
        p1,
        p2,
        objective: eqopt(w, mu, lambda, p1, p2),
        kind,
        lw1_residual,
        tangency_residual,
    }
}

/// Roots of `g` on the interior grid, found from sign changes and refined
/// by bisection.
fn grid_roots(g: impl Fn(f64) -> f64, stride: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut prev_p = grid_point(stride);
    let mut prev = g(prev_p);
    let mut i = 2 * stride;
    while i < GRID_N {
        let p = grid_point(i);
        let v = g(p);
        if prev == 0.0 {
            roots.push(prev_p);
        } else if prev.signum() != v.signum() && v.is_finite() && prev.is_finite() {
            roots.push(bisect(&g, prev_p, p, prev));
        }
        prev = v;
        prev_p = p;
        i += stride;
    }
    roots
}

fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, ga: f64) -> f64 {
    let sa = ga.signum();
    while b - a > ROOT_TOL {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Maximal runs of interior grid indices on which `f_mu'` is monotone.
fn monotone_branches(c: Curve) -> Vec<(f64, f64)> {
    let mut branches = Vec::new();
    let mut start = grid_point(1);
    let mut prev_sign = c.d2fmu(start).signum();
    for i in 2..GRID_N {
        let p = grid_point(i);
        let s = c.d2fmu(p).signum();
        if s != prev_sign {
            let edge = bisect(|x| c.d2fmu(x), grid_point(i - 1), p, c.d2fmu(grid_point(i - 1)));
            branches.push((start, edge));
            start = edge;
            prev_sign = s;
        }
    }
    branches.push((start, grid_point(GRID_N - 1)));
    branches
}

/// Point of the branch `[a, b]` where `f_mu'` equals `slope`, if any.
fn match_slope(c: Curve, a: f64, b: f64, slope: f64) -> Option<f64> {
    let (da, db) = (c.dfmu(a) - slope, c.dfmu(b) - slope);
    if da == 0.0 {
        return Some(a);
    }
    if db == 0.0 {
        return Some(b);
    }
    (da.signum() != db.signum()).then(|| bisect(|x| c.dfmu(x) - slope, a, b, da))
}

/// Bitangent chords of `f_mu` with both ends interior.
fn bitangents(c: Curve) -> Vec<(f64, f64)> {
    let intercept = |p: f64| c.fmu(p) - c.dfmu(p) * p;
    let branches = monotone_branches(c);
    let mut out = Vec::new();
    for (ia, &(a0, a1)) in branches.iter().enumerate() {
        for &(b0, b1) in &branches[ia + 1..] {
            // D(p) = intercept(p) - intercept(partner(p)) along branch A.
            let gap = |p: f64| match_slope(c, b0, b1, c.dfmu(p)).map(|q| (intercept(p) - intercept(q), q));
            let cells = (((a1 - a0) / (H_GRID * BITANGENT_STRIDE as f64)).ceil() as usize).max(4);
            let step = (a1 - a0) / cells as f64;
            let mut prev: Option<(f64, f64)> = None;
            for k in 0..=cells {
                let p = if k == cells { a1 } else { a0 + k as f64 * step };
                let cur = gap(p).map(|(d, _)| (p, d));
                if let (Some((pp, dp)), Some((pc, dc))) = (prev, cur) {
                    if dp.signum() != dc.signum() {
                        let root = bisect(|x| gap(x).map_or(dc, |g| g.0), pp, pc, dp);
                        if let Some((_, q)) = gap(root) {
                            out.push((root, q));
                        }
                    }
                }
                prev = cur;
            }
        }
    }
    out
}

/// All configurations meeting the tangency conditions within [`TAU_TAN`],
/// plus the trivial chord, plus the chord selected by the lower convex
/// envelope of the sampled `f_mu` (refined locally) as a safeguard.
pub fn find_configs(w: &WiretapChannel, mu: f64) -> Result<Vec<TangentConfig>> {
    require_binary(w)?;
    let c = Curve { w, mu };
    let mut configs = Vec::new();

    let (fmax, m) = max_f_1d(w);
    let lambda = 1.0 - m;
    configs.push(TangentConfig {
        lambda,
        p1: 0.0,
        p2: 1.0,
        objective: fmax,
        kind: ConfigKind::Trivial,
        lw1_residual: if is_interior(m) { c.df(m) } else { 0.0 },
        tangency_residual: 0.0,
    });

    for p2 in grid_roots(|p| p * c.dfmu(p) - c.fmu(p), 1) {
        configs.extend(chord_config(c, 0.0, p2, ConfigKind::BoundaryLeft));
    }
    for p1 in grid_roots(|p| (1.0 - p) * c.dfmu(p) + c.fmu(p), 1) {
        configs.extend(chord_config(c, p1, 1.0, ConfigKind::BoundaryRight));
    }
    for (p1, p2) in bitangents(c) {
        configs.extend(chord_config(c, p1, p2, ConfigKind::InteriorTangent));
    }
    configs.retain(|cfg| {
        cfg.kind == ConfigKind::Trivial
            || (cfg.lw1_residual.abs() <= TAU_TAN && cfg.tangency_residual <= TAU_TAN && cfg.lambda > 0.0 && cfg.lambda < 1.0)
    });
    if let Some(h) = envelope_config(c) {
        let best = configs.iter().map(|x| x.objective).fold(f64::NEG_INFINITY, f64::max);
        if h.objective > best + TAU_TAN {
            log::warn!(
                "tangent scan missed a configuration at mu = {mu}: envelope gives {} vs {best}",
                h.objective
            );
            configs.push(h);
        }
    }
    Ok(configs)
}

/// Maximizes `f - conv(f_mu)` on the grid, where `conv` is the lower convex
/// envelope, then polishes `(lambda, p1, p2)` by local search.
fn envelope_config(c: Curve) -> Option<TangentConfig> {
    let pts: Vec<(f64, f64)> = (0..=GRID_N).map(|i| (grid_point(i), c.fmu(grid_point(i)))).collect();
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while hull.len() >= 2 {
            let (a, b) = (pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]]);
            let cross = (b.0 - a.0) * (pts[i].1 - a.1) - (b.1 - a.1) * (pts[i].0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut best: Option<(f64, usize, usize, f64)> = None;
    for seg in hull.windows(2) {
        let (a, b) = (pts[seg[0]], pts[seg[1]]);
        for i in seg[0]..=seg[1] {
            let t = if seg[1] == seg[0] { 0.0 } else { (pts[i].0 - a.0) / (b.0 - a.0) };
            let env = a.1 + t * (b.1 - a.1);
            let gap = c.f(pts[i].0) - env;
            if best.map_or(true, |bb| gap > bb.0) {
                best = Some((gap, seg[0], seg[1], pts[i].0));
            }
        }
    }
    let (_, i1, i2, m) = best?;
    let (p1, p2) = (pts[i1].0, pts[i2].0);
    let lambda = if p2 > p1 { (p2 - m) / (p2 - p1) } else { 0.5 };
    let mut x = [lambda, 1.0 - lambda, p1, 1.0 - p1, p2, 1.0 - p2];
    let g = |x: &[f64]| eqopt(c.w, c.mu, x[0], x[2], x[4]);
    pattern_search(&[2, 2, 2], &mut x, &g, H_GRID);
    let (mut lambda, mut p1, mut p2) = (x[0], x[2], x[4]);
    if p1 > p2 {
        std::mem::swap(&mut p1, &mut p2);
        lambda = 1.0 - lambda;
    }
    let kind = match (p1 <= 0.0, p2 >= 1.0) {
        (true, true) => ConfigKind::Trivial,
        (true, false) => ConfigKind::BoundaryLeft,
        (false, true) => ConfigKind::BoundaryRight,
        (false, false) => ConfigKind::InteriorTangent,
    };
    let mut cfg = chord_config(c, p1, p2, kind)?;
    if cfg.objective < g(&x) {
        cfg.lambda = lambda;
        cfg.objective = eqopt(c.w, c.mu, lambda, p1, p2);
    }
    Some(cfg)
}

/// The best configuration; ties (within `1e-10`) go to the earlier
/// [`ConfigKind`], so the chord from `0` wins over its reflection.
pub fn best_config(w: &WiretapChannel, mu: f64) -> Result<TangentConfig> {
    let configs = find_configs(w, mu)?;
    let top = configs.iter().map(|c| c.objective).fold(f64::NEG_INFINITY, f64::max);
    Ok(*configs
        .iter()
        .filter(|c| c.objective >= top - TIE_TOL)
        .min_by(|a, b| a.kind.cmp(&b.kind).then(a.p1.total_cmp(&b.p1)))
        .expect("the trivial configuration is always present"))
}

/// `mu*` for a binary pair, with the regime chosen from the extrema of `f`.
pub fn mu_star(w: &WiretapChannel) -> Result<Option<MuStar>> {
    require_binary(w)?;
    let s = Settings::default();
    let (fmin, _) = min_fmu_1d(w, 0.0);
    let (fmax, _) = max_f_1d(w);
    let range = crate::classify::FRange {
        min: fmin,
        argmin: crate::probability::Pmf::uniform(2),
        max: fmax,
        argmax: crate::probability::Pmf::uniform(2),
    };
    let regime = mu_star_regime(&range, s.tau_class);
    let fu = w.f(&[0.5, 0.5]);
    Ok(find_mu_star(regime, fu, |mu| min_fmu_1d(w, mu).0))
}

fn config_chain(family: &ShiftFamily, cfg: &TangentConfig) -> AuxiliaryChain {
    symmetric_chain(
        family,
        &[cfg.lambda, 1.0 - cfg.lambda],
        &[vec![cfg.p1, 1.0 - cfg.p1], vec![cfg.p2, 1.0 - cfg.p2]],
    )
}

/// Boundary point of a symmetric binary pair at slope `mu`.
pub(crate) fn region_point(w: &WiretapChannel, mu: f64, family: &ShiftFamily) -> Result<RegionPoint> {
    let cfg = best_config(w, mu)?;
    let chain = config_chain(family, &cfg);
    let objective = evaluate_objective(w, &chain, mu)?;
    let expected = mu * w.c_b() + cfg.objective;
    if (objective - expected).abs() > TAU_NUM + mu * TAU_CAP {
        return Err(Error::Assertion(format!(
            "binary chain reaches {objective}, expected {expected} at mu = {mu}"
        )));
    }
    RegionPoint::from_chain(w, mu, chain)
}

/// The two-state `U`, four-state `V` chain built from the best chord with
/// one end at an input vertex: `p(x=0|v1) = 0`, `p(x=0|v2) = p`,
/// `p(x=0|v3) = 1`, `p(x=0|v4) = 1 - p`, with `p(v1|u1) = p(v3|u2) = lambda`.
pub fn bec_bsc_chain(w: &WiretapChannel, mu: f64) -> Result<AuxiliaryChain> {
    require_binary(w)?;
    let configs = find_configs(w, mu)?;
    let top = configs.iter().map(|c| c.objective).fold(f64::NEG_INFINITY, f64::max);
    let edge = configs
        .iter()
        .filter(|c| matches!(c.kind, ConfigKind::BoundaryLeft | ConfigKind::BoundaryRight))
        .max_by(|a, b| a.objective.total_cmp(&b.objective).then(b.kind.cmp(&a.kind)))
        .filter(|c| c.objective >= top - 1e-9)
        .ok_or_else(|| Error::Precondition(format!("no optimal chord from an input vertex at mu = {mu}")))?;
    // Reflect the chord from 1 onto the chord from 0.
    let (lambda, p) = match edge.kind {
        ConfigKind::BoundaryLeft => (edge.lambda, edge.p2),
        _ => (1.0 - edge.lambda, 1.0 - edge.p1),
    };
    let l = lambda;
    let chain = AuxiliaryChain::new(
        crate::probability::Pmf::uniform(2),
        ChannelMatrix::new(vec![vec![l, 1.0 - l, 0.0, 0.0], vec![0.0, 0.0, l, 1.0 - l]])?,
        ChannelMatrix::new(vec![vec![0.0, 1.0], vec![p, 1.0 - p], vec![1.0, 0.0], vec![1.0 - p, p]])?,
    )?;
    let objective = evaluate_objective(w, &chain, mu)?;
    let expected = mu * w.c_b() + edge.objective;
    if (objective - expected).abs() > TAU_NUM + mu * TAU_CAP {
        return Err(Error::Assertion(format!(
            "chain reaches {objective}, expected mu C_B + {} = {expected}",
            edge.objective
        )));
    }
    Ok(chain)
}

/// Threshold quantities for the pair with main BSC(eps) and eavesdropper
/// rows `[1-p-q, q, p]`, `[q, 1-p-q, p]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InflectionThreshold {
    /// `(1-p-2q)^2 (1-p) / ((1-p-q) q)`.
    pub c: f64,
    /// Cross-over at which `f''(0)` vanishes.
    pub eps_star: f64,
    /// `f'(0)` at `eps_star`, in bits.
    pub b: f64,
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    if p > 0.0 && q > 0.0 && p + q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "p + q",
            value: p + q,
            reason: "need p, q > 0 and p + q < 1",
        })
    }
}

/// `f'(0)` in bits for main BSC(eps) against the ternary eavesdropper.
pub fn ternary_fprime0(p: f64, q: f64, eps: f64) -> f64 {
    (1.0 - 2.0 * eps) * ((1.0 - eps) / eps).log2() - (1.0 - p - 2.0 * q) * ((1.0 - p - q) / q).log2()
}

/// `f''(0)` in bits for main BSC(eps) against the ternary eavesdropper.
pub fn ternary_fsecond0(p: f64, q: f64, eps: f64) -> f64 {
    let c = (1.0 - p - 2.0 * q).powi(2) * (1.0 - p) / ((1.0 - p - q) * q);
    (-(2.0 * eps - 1.0).powi(2) / (eps * (1.0 - eps)) + c) / std::f64::consts::LN_2
}

pub fn inflection_threshold(p: f64, q: f64) -> Result<InflectionThreshold> {
    check_pq(p, q)?;
    let c = (1.0 - p - 2.0 * q).powi(2) * (1.0 - p) / ((1.0 - p - q) * q);
    let eps_star = 0.5 - 0.5 * (c / (4.0 + c)).sqrt();
    let b = ternary_fprime0(p, q, eps_star);
    let residual = ternary_fsecond0(p, q, eps_star);
    if residual.abs() > TAU_NUM {
        return Err(Error::Assertion(format!("f''(0) = {residual} at eps* = {eps_star}")));
    }
    if b < -TAU_NUM {
        return Err(Error::Assertion(format!("b = {b} is negative")));
    }
    Ok(InflectionThreshold { c, eps_star, b })
}

/// Classification of the ternary-eavesdropper pair plus curve-shape checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TernaryReport {
    pub classification: ClassificationReport,
    /// Finite-difference `f'(0)` and `f''(0)`.
    pub fprime0: f64,
    pub fsecond0: f64,
    /// Sign changes of `f''` on `(0, 0.5)`.
    pub inflections: usize,
    pub argmax_f: f64,
    /// More capable, not less noisy and dominantly symmetric.
    pub triple: bool,
    /// `f'(0) > 0`, `f''(0) > 0`, one inflection on `(0, 0.5)`, maximum at `0.5`.
    pub shape_ok: bool,
}

pub fn verify_bsc_ternary(p: f64, q: f64, eps: f64) -> Result<TernaryReport> {
    verify_bsc_ternary_with(p, q, eps, &Settings::default())
}

pub fn verify_bsc_ternary_with(p: f64, q: f64, eps: f64, s: &Settings) -> Result<TernaryReport> {
    let w = make_standard(StandardChannel::BscTernary { p, q, eps })?;
    let classification = classify_with(&w, s);
    let c = Curve { w: &w, mu: 0.0 };
    let (fprime0, fsecond0) = fd_derivatives(|x| c.f(x), 0.0);
    let mut inflections = 0;
    let mut prev = c.d2f(H_GRID).signum();
    let mut i = 2;
    while grid_point(i) < 0.5 - H_GRID / 2.0 {
        let sgn = c.d2f(grid_point(i)).signum();
        if sgn != prev {
            inflections += 1;
            prev = sgn;
        }
        i += 1;
    }
    let (fmax, argmax_f) = max_f_1d(&w);
    let at_half = (c.f(0.5) - fmax).abs() <= s.tau_class;
    let triple = classification.more_capable && !classification.less_noisy && classification.dominantly_cyclic;
    let shape_ok = fprime0 > 0.0 && fsecond0 > 0.0 && inflections == 1 && at_half;
    Ok(TernaryReport {
        classification,
        fprime0,
        fsecond0,
        inflections,
        argmax_f,
        triple,
        shape_ok,
    })
}

/// Cross-overs `eps` on a `step` grid starting at `eps*(p, q)` for which
/// the triple property holds, as the first and last such values of the
/// contiguous run starting at the first hit.
pub fn triple_window(p: f64, q: f64, step: f64) -> Result<Option<(f64, f64)>> {
    let t = inflection_threshold(p, q)?;
    let s = Settings::default();
    let mut first = None;
    let mut last = None;
    let mut k = 0;
    loop {
        let eps = t.eps_star + k as f64 * step;
        if eps >= 0.5 {
            break;
        }
        let r = verify_bsc_ternary_with(p, q, eps, &s)?;
        if r.triple {
            first.get_or_insert(eps);
            last = Some(eps);
        } else if first.is_some() {
            break;
        }
        k += 1;
        if first.is_none() && k > 50 {
            break;
        }
    }
    Ok(first.zip(last))
}

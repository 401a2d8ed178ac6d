//! Maximization over products of probability simplices.
//!
//! The local method moves probability mass between pairs of coordinates of
//! one block at a time (which keeps every iterate feasible), accepts strict
//! improvements, adds a Hooke-Jeeves pattern move after each successful
//! sweep, and halves the step once a sweep fails.

use rayon::prelude::*;

use crate::probability::{self, for_each_grid_point};

/// Smallest step used by the local search.
pub const MIN_STEP: f64 = 1e-10;
/// Default number of starts per multi-start solve.
pub const DEFAULT_STARTS: usize = 32;

const MAX_EVALS: usize = 2_000_000;

/// Result of a multi-start solve.
#[derive(Clone, Debug)]
pub(crate) struct Optimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub starts: usize,
    /// Best minus worst local optimum over the starts.
    pub spread: f64,
}

fn block_ranges(blocks: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut start = 0;
    for &b in blocks {
        out.push((start, start + b));
        start += b;
    }
    out
}

fn project(blocks: &[(usize, usize)], x: &mut [f64]) {
    for &(a, b) in blocks {
        let block = &mut x[a..b];
        block.iter_mut().for_each(|v| *v = v.max(0.0));
        let s: f64 = block.iter().sum();
        if s > 0.0 {
            block.iter_mut().for_each(|v| *v /= s);
        } else {
            let u = 1.0 / block.len() as f64;
            block.iter_mut().for_each(|v| *v = u);
        }
    }
}

/// Local maximization of `f` from `x` (updated in place). `blocks` lists
/// the sizes of the simplices whose product is the domain.
pub(crate) fn pattern_search<F>(blocks: &[usize], x: &mut [f64], f: &F, initial_step: f64) -> f64
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let ranges = block_ranges(blocks);
    debug_assert_eq!(ranges.last().map_or(0, |r| r.1), x.len());
    let mut best = f(x);
    let mut evals = 1usize;
    let mut step = initial_step.max(MIN_STEP);
    let mut base = x.to_vec();
    let mut trial = x.to_vec();
    while step >= MIN_STEP && evals < MAX_EVALS {
        base.copy_from_slice(x);
        let mut improved = false;
        for &(a, b) in &ranges {
            for i in a..b {
                for j in a..b {
                    if i == j || x[j] <= 0.0 {
                        continue;
                    }
                    let t = step.min(x[j]);
                    let (old_i, old_j) = (x[i], x[j]);
                    x[j] = if t == old_j { 0.0 } else { old_j - t };
                    x[i] = old_i + t;
                    let v = f(x);
                    evals += 1;
                    if v > best {
                        best = v;
                        improved = true;
                    } else {
                        x[i] = old_i;
                        x[j] = old_j;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            continue;
        }
        // Pattern moves along the direction of the last successful sweep.
        loop {
            for k in 0..x.len() {
                trial[k] = 2.0 * x[k] - base[k];
            }
            project(&ranges, &mut trial);
            let v = f(&trial);
            evals += 1;
            if v > best && evals < MAX_EVALS {
                best = v;
                base.copy_from_slice(x);
                x.copy_from_slice(&trial);
            } else {
                break;
            }
        }
    }
    best
}

/// Multi-start maximization over a product of simplices from explicit starts.
pub(crate) fn maximize_from<F>(blocks: &[usize], starts: Vec<Vec<f64>>, f: &F, initial_step: f64) -> Optimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(!starts.is_empty());
    let n = starts.len();
    let results: Vec<(f64, Vec<f64>)> = starts
        .into_par_iter()
        .map(|mut x| {
            let v = pattern_search(blocks, &mut x, f, initial_step);
            (v, x)
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let (value, point) = results
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .unwrap();
    Optimum {
        point,
        value,
        starts: n,
        spread: value - worst,
    }
}

/// The `k` best grid points of `f` on a single simplex, best first. Ties keep
/// enumeration order.
pub(crate) fn top_grid_points<F>(dim: usize, resolution: usize, k: usize, f: &F) -> Vec<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let mut scored = Vec::with_capacity(probability::grid_size(dim, resolution).min(1 << 20) as usize);
    for_each_grid_point(dim, resolution, |p| scored.push((f(p), p.to_vec())));
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(k);
    scored
}

/// Grid-seeded multi-start maximization on one simplex: the best `top`
/// grid points plus `extra` seeds are each refined by [`pattern_search`].
pub(crate) fn maximize_simplex<F>(dim: usize, resolution: usize, top: usize, extra: Vec<Vec<f64>>, f: &F) -> Optimum
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut starts: Vec<Vec<f64>> = top_grid_points(dim, resolution, top, f)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    starts.extend(extra);
    maximize_from(&[dim], starts, f, 1.0 / resolution as f64)
}

//! Exhaustive grid solvers used as ground truth for the analytic and
//! multi-start solvers. Pure and deterministic; parallel over the outer axis.

use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{config_from_triple, TangentConfig};
use crate::chain::AuxiliaryChain;
use crate::channel::{ChannelMatrix, WiretapChannel};
use crate::error::{Error, Result};
use crate::probability::{entropy_of, for_each_grid_point, Pmf};

/// Evaluation cap of [`brute_binary`].
pub const BINARY_CAP: u128 = 1_000_000_000;
/// Evaluation cap of [`brute_chain`].
pub const CHAIN_CAP: u128 = 100_000_000;
pub const MAX_CHAIN_CARD: usize = 4;
pub const MAX_CHAIN_RESOLUTION: usize = 10;

/// Stride of the sub-grid on which the `lambda`-direction slope is sampled.
const SLOPE_STRIDE: usize = 8;

fn require_binary(w: &WiretapChannel) -> Result<()> {
    if w.input_dim() == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context: "oracle input alphabet",
            expected: 2,
            found: w.input_dim(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteBinary {
    pub value: f64,
    pub config: TangentConfig,
    /// Largest finite-difference slope of the objective along each of
    /// `lambda`, `p1`, `p2` seen on the grid.
    pub lipschitz: [f64; 3],
    /// `sum(lipschitz) / (2 resolution)`.
    pub error_bound: f64,
    pub evaluations: u128,
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    key: (usize, usize, usize),
}

impl Best {
    const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        key: (usize::MAX, usize::MAX, usize::MAX),
    };

    fn offer(&mut self, value: f64, key: (usize, usize, usize)) {
        if value > self.value || (value == self.value && key < self.key) {
            *self = Best { value, key };
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.offer(other.value, other.key);
        self
    }
}

/// Maximizes `f(lambda p1 + (1 - lambda) p2) - lambda f_mu(p1) -
/// (1 - lambda) f_mu(p2)` over the grid of step `1 / resolution` in
/// `[0, 1]^3`. The objective is invariant under `(lambda, p1, p2) ->
/// (1 - lambda, p2, p1)`, so only `p1 <= p2` is visited.
pub fn brute_binary(w: &WiretapChannel, mu: f64, resolution: usize) -> Result<BruteBinary> {
    require_binary(w)?;
    if resolution < 1 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let n = resolution;
    let requested = (n as u128 + 1).pow(3);
    if requested > BINARY_CAP {
        return Err(Error::ResourceCap {
            requested,
            cap: BINARY_CAP,
        });
    }
    let h = 1.0 / n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| if i == n { 1.0 } else { i as f64 * h }).collect();
    let fmu: Vec<f64> = grid.iter().map(|&p| w.fmu(&[p, 1.0 - p], mu)).collect();
    let objective = |l: usize, i: usize, j: usize| {
        let lam = grid[l];
        let m = (lam * grid[i] + (1.0 - lam) * grid[j]).clamp(0.0, 1.0);
        w.f(&[m, 1.0 - m]) - lam * fmu[i] - (1.0 - lam) * fmu[j]
    };

    let (best, slopes) = (0..=n)
        .into_par_iter()
        .map(|l| {
            let mut best = Best::NONE;
            let mut slopes = [0.0f64; 3];
            let mut prev_row: Vec<f64> = Vec::new();
            let mut row = vec![0.0; n + 1];
            for i in 0..=n {
                for j in i..=n {
                    let v = objective(l, i, j);
                    row[j] = v;
                    best.offer(v, (l, i, j));
                    if j > i {
                        slopes[2] = slopes[2].max((v - row[j - 1]).abs() * n as f64);
                    }
                    if i > 0 {
                        slopes[1] = slopes[1].max((v - prev_row[j]).abs() * n as f64);
                    }
                    if l < n && i % SLOPE_STRIDE == 0 && j % SLOPE_STRIDE == 0 {
                        slopes[0] = slopes[0].max((objective(l + 1, i, j) - v).abs() * n as f64);
                    }
                }
                std::mem::swap(&mut prev_row, &mut row);
                row.resize(n + 1, 0.0);
            }
            (best, slopes)
        })
        .reduce(
            || (Best::NONE, [0.0; 3]),
            |a, b| (a.0.merge(b.0), [a.1[0].max(b.1[0]), a.1[1].max(b.1[1]), a.1[2].max(b.1[2])]),
        );

    let (l, i, j) = best.key;
    let lipschitz = slopes;
    let error_bound = lipschitz.iter().sum::<f64>() * h / 2.0;
    log::debug!("brute_binary mu = {mu}, resolution = {n}: value {}, Lipschitz {lipschitz:?}", best.value);
    Ok(BruteBinary {
        value: best.value,
        config: config_from_triple(w, mu, grid[l], grid[i], grid[j]),
        lipschitz,
        error_bound,
        evaluations: (n as u128 + 1) * (n as u128 + 1) * (n as u128 + 2) / 2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteChain {
    pub value: f64,
    pub chain: AuxiliaryChain,
    pub evaluations: u128,
}

fn grid_points(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for_each_grid_point(dim, resolution, |p| out.push(p.to_vec()));
    out
}

/// Non-decreasing `k`-tuples of `0..=n`.
fn sorted_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, n: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in lo..=n {
            cur.push(i);
            rec(k, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, 0, &mut Vec::new(), &mut out);
    out
}

/// Per-`u` quantities for one candidate `p(v|u)`.
struct Conditional {
    py: Vec<f64>,
    cond_hy: f64,
    /// `I(V;Y|U=u) - I(V;Z|U=u)`.
    gain: f64,
}

/// Maximizes `mu I(V;Y) + I(V;Y|U) - I(V;Z|U)` over every chain whose
/// parameters lie on the grid of step `1 / resolution`. Relabelings of `U`
/// and `V` leave the objective unchanged, so only chains with `p(u)` and
/// `p(x=0|v)` non-decreasing are visited.
pub fn brute_chain(w: &WiretapChannel, mu: f64, card_u: usize, card_v: usize, resolution: usize) -> Result<BruteChain> {
    require_binary(w)?;
    for (name, card) in [("card_u", card_u), ("card_v", card_v)] {
        if card == 0 || card > MAX_CHAIN_CARD {
            return Err(Error::InvalidParameter {
                name,
                value: card as f64,
                reason: "must lie in 1..=4",
            });
        }
    }
    if resolution == 0 || resolution > MAX_CHAIN_RESOLUTION {
        return Err(Error::InvalidParameter {
            name: "resolution",
            value: resolution as f64,
            reason: "must lie in 1..=10",
        });
    }
    let r = resolution as f64;
    let pus: Vec<Vec<f64>> = grid_points(card_u, resolution)
        .into_iter()
        .filter(|p| p.windows(2).all(|w| w[0] <= w[1]))
        .collect();
    let pvs = grid_points(card_v, resolution);
    let pxs = sorted_tuples(card_v, resolution);
    let requested = pus.len() as u128 * (pvs.len() as u128).pow(card_u as u32) * pxs.len() as u128;
    if requested > CHAIN_CAP {
        return Err(Error::ResourceCap {
            requested,
            cap: CHAIN_CAP,
        });
    }
    let (main, eve) = (w.main(), w.eavesdropper());
    let out_rows = |ch: &ChannelMatrix, p0: f64| -> Vec<f64> {
        (0..ch.out_dim()).map(|y| p0 * ch.row(0)[y] + (1.0 - p0) * ch.row(1)[y]).collect()
    };

    let best = pxs
        .par_iter()
        .enumerate()
        .map(|(ix, xs)| {
            let p0: Vec<f64> = xs.iter().map(|&k| k as f64 / r).collect();
            let py_v: Vec<Vec<f64>> = p0.iter().map(|&p| out_rows(main, p)).collect();
            let pz_v: Vec<Vec<f64>> = p0.iter().map(|&p| out_rows(eve, p)).collect();
            let hy_v: Vec<f64> = py_v.iter().map(|r| entropy_of(r)).collect();
            let hz_v: Vec<f64> = pz_v.iter().map(|r| entropy_of(r)).collect();
            let conds: Vec<Conditional> = pvs
                .iter()
                .map(|q| {
                    let mix = |rows: &[Vec<f64>]| -> Vec<f64> {
                        (0..rows[0].len()).map(|y| q.iter().zip(rows).map(|(a, r)| a * r[y]).sum()).collect()
                    };
                    let (py, pz) = (mix(&py_v), mix(&pz_v));
                    let cond_hy: f64 = q.iter().zip(&hy_v).map(|(a, h)| a * h).sum();
                    let cond_hz: f64 = q.iter().zip(&hz_v).map(|(a, h)| a * h).sum();
                    let gain = entropy_of(&py) - cond_hy - entropy_of(&pz) + cond_hz;
                    Conditional { py, cond_hy, gain }
                })
                .collect();
            let mut best = Best::NONE;
            let mut idx = vec![0usize; card_u];
            let mut py = vec![0.0; main.out_dim()];
            for (iu, pu) in pus.iter().enumerate() {
                loop {
                    let mut v = 0.0;
                    let mut cond = 0.0;
                    py.iter_mut().for_each(|x| *x = 0.0);
                    for (u, &k) in idx.iter().enumerate() {
                        let c = &conds[k];
                        v += pu[u] * c.gain;
                        if mu != 0.0 {
                            cond += pu[u] * c.cond_hy;
                            py.iter_mut().zip(&c.py).for_each(|(a, b)| *a += pu[u] * b);
                        }
                    }
                    if mu != 0.0 {
                        v += mu * (entropy_of(&py) - cond).max(0.0);
                    }
                    best.offer(v, (ix, iu, flat(&idx, pvs.len())));
                    if !advance(&mut idx, pvs.len()) {
                        break;
                    }
                }
            }
            best
        })
        .reduce(|| Best::NONE, Best::merge);

    let (ix, iu, flat_idx) = best.key;
    let idx = unflat(flat_idx, pvs.len(), card_u);
    let p0: Vec<f64> = pxs[ix].iter().map(|&k| k as f64 / r).collect();
    let chain = AuxiliaryChain::new(
        Pmf::new(pus[iu].clone())?,
        ChannelMatrix::new(idx.iter().map(|&k| pvs[k].clone()).collect())?,
        ChannelMatrix::new(p0.iter().map(|&p| vec![p, 1.0 - p]).collect())?,
    )?;
    Ok(BruteChain {
        value: best.value,
        chain,
        evaluations: requested,
    })
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn flat(idx: &[usize], base: usize) -> usize {
    idx.iter().rev().fold(0, |acc, &d| acc * base + d)
}

fn unflat(mut k: usize, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = k % base;
            k /= base;
            d
        })
        .collect()
}

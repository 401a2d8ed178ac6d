//! Discrete memoryless channels and wiretap pairs.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probability::{self, cyclic_shift, entropy_of, neg_x_log2_x, Pmf};

/// Stopping gap for the capacity iteration, in bits.
pub const TAU_CAP: f64 = 1e-10;
/// Iteration cap for the capacity iteration.
pub const CAPACITY_MAX_ITERATIONS: usize = 100_000;
/// Tolerance for the numerical cyclic-symmetry certificate.
pub const TAU_SYM: f64 = 1e-9;
/// Grid resolution used by the symmetry certificate.
pub const SYMMETRY_GRID_RESOLUTION: usize = 50;
/// Random PMFs added to the symmetry grid.
pub const SYMMETRY_SAMPLES: usize = 200;
/// Element-wise tolerance for comparing channel matrices.
pub const TAU_EQ: f64 = 1e-12;

/// Gap below which the capacity iteration tries an active-set Newton polish.
const POLISH_GAP: f64 = 1e-2;
const POLISH_EVERY: usize = 64;

const SYMMETRY_SEED: u64 = 0x5eed_c7c1;
const SYMMETRY_GRID_CAP: u128 = 100_000;

/// A row-stochastic matrix `p(out | in)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ChannelMatrix {
    in_dim: usize,
    out_dim: usize,
    data: Vec<f64>,
    row_entropy: Vec<f64>,
}

impl ChannelMatrix {
    /// Builds a channel from its rows; every row must be a valid PMF of the
    /// same length.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidChannel("no rows".into()));
        }
        let out_dim = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * out_dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != out_dim {
                return Err(Error::InvalidChannel(format!(
                    "row {i} has {} entries, expected {out_dim}",
                    row.len()
                )));
            }
            let row = Pmf::new(row)
                .map_err(|e| Error::InvalidChannel(format!("row {i}: {e}")))?;
            data.extend(row.into_vec());
        }
        Ok(Self::from_data(data.len() / out_dim, out_dim, data))
    }

    pub fn from_pmfs(rows: &[Pmf]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.weights().to_vec()).collect())
    }

    pub(crate) fn from_data(in_dim: usize, out_dim: usize, data: Vec<f64>) -> Self {
        let row_entropy = data.chunks(out_dim).map(entropy_of).collect();
        Self {
            in_dim,
            out_dim,
            data,
            row_entropy,
        }
    }

    /// The noiseless channel on `n` symbols.
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_data(n, n, data)
    }

    /// Binary symmetric channel with cross-over probability `eps`.
    pub fn bsc(eps: f64) -> Result<Self> {
        check_unit("eps", eps)?;
        Self::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
    }

    /// Binary erasure channel with erasure probability `alpha`; outputs are
    /// ordered `{0, e, 1}`.
    pub fn bec(alpha: f64) -> Result<Self> {
        check_unit("alpha", alpha)?;
        Self::new(vec![
            vec![1.0 - alpha, alpha, 0.0],
            vec![0.0, alpha, 1.0 - alpha],
        ])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.out_dim..(x + 1) * self.out_dim]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.out_dim).map(<[f64]>::to_vec).collect()
    }

    /// `H(Out | In = x)` in bits.
    pub fn row_entropy(&self, x: usize) -> f64 {
        self.row_entropy[x]
    }

    /// The output marginal `px^T W`.
    pub fn output_distribution(&self, px: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.out_dim];
        for (x, &p) in px.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (qy, w) in q.iter_mut().zip(self.row(x)) {
                *qy += p * w;
            }
        }
        q
    }

    /// `I(In; Out)` for raw input weights, without dimension checks.
    pub(crate) fn mi(&self, px: &[f64]) -> f64 {
        debug_assert_eq!(px.len(), self.in_dim);
        let mut h_out = 0.0;
        for y in 0..self.out_dim {
            let mut q = 0.0;
            for (x, &p) in px.iter().enumerate() {
                q += p * self.data[x * self.out_dim + y];
            }
            h_out += neg_x_log2_x(q);
        }
        let h_cond: f64 = px.iter().zip(&self.row_entropy).map(|(p, h)| p * h).sum();
        (h_out - h_cond).max(0.0)
    }

    /// Element-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &ChannelMatrix, tol: f64) -> bool {
        self.in_dim == other.in_dim
            && self.out_dim == other.out_dim
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_sum_error(&self) -> f64 {
        self.data
            .chunks(self.out_dim)
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Vec<f64>>> for ChannelMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        ChannelMatrix::new(rows)
    }
}

impl From<ChannelMatrix> for Vec<Vec<f64>> {
    fn from(ch: ChannelMatrix) -> Self {
        ch.rows()
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

/// `I(X; Y)` in bits.
pub fn mutual_information(ch: &ChannelMatrix, px: &Pmf) -> Result<f64> {
    if px.dim() != ch.in_dim {
        return Err(Error::DimensionMismatch {
            context: "mutual_information",
            expected: ch.in_dim,
            found: px.dim(),
        });
    }
    Ok(ch.mi(px.weights()))
}

/// The channel `p(y | v) = sum_x p(x | v) p(y | x)`.
pub fn compose_prefix(prefix: &ChannelMatrix, ch: &ChannelMatrix) -> Result<ChannelMatrix> {
    if prefix.out_dim != ch.in_dim {
        return Err(Error::DimensionMismatch {
            context: "compose_prefix",
            expected: ch.in_dim,
            found: prefix.out_dim,
        });
    }
    let mut data = Vec::with_capacity(prefix.in_dim * ch.out_dim);
    for v in 0..prefix.in_dim {
        data.extend(ch.output_distribution(prefix.row(v)));
    }
    Ok(ChannelMatrix::from_data(prefix.in_dim, ch.out_dim, data))
}

/// Capacity and a capacity-achieving input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Capacity {
    pub value: f64,
    pub input: Pmf,
    /// Certified upper bound minus achieved value at termination.
    pub gap: f64,
    pub iterations: usize,
}

/// Alternating-maximization (Blahut-Arimoto) capacity with the
/// `max_x D(W_x || q) - I` stopping rule. The multiplicative update uses an
/// adaptive exponent: it grows while `I` keeps increasing and shrinks back
/// towards the plain update otherwise, which speeds up inputs whose weight
/// decays to zero. Once the gap is moderate, a Newton solve on a candidate
/// support is tried every few iterations and kept only if it closes the gap.
pub fn capacity(ch: &ChannelMatrix) -> Result<Capacity> {
    let n = ch.in_dim;
    let divergences = |r: &[f64], d: &mut [f64]| {
        let q = ch.output_distribution(r);
        for (x, dx) in d.iter_mut().enumerate() {
            *dx = ch
                .row(x)
                .iter()
                .zip(&q)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &qy)| w * (w / qy).log2())
                .sum();
        }
        r.iter().zip(d.iter()).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut r = vec![1.0 / n as f64; n];
    let mut d = vec![0.0; n];
    let mut lower = divergences(&r, &mut d);
    let mut step = 1.0;
    let mut trial = vec![0.0; n];
    let mut trial_d = vec![0.0; n];
    let mut gap = f64::INFINITY;
    for it in 0..CAPACITY_MAX_ITERATIONS {
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap < TAU_CAP {
            let input = Pmf::from_simplex_point(&r);
            let value = ch.mi(input.weights());
            return Ok(Capacity {
                value,
                input,
                gap,
                iterations: it,
            });
        }
        if gap < POLISH_GAP && it % POLISH_EVERY == 0 {
            if let Some(p) = polish_capacity(ch, &r, &d) {
                let mut pd = vec![0.0; n];
                let plower = divergences(&p, &mut pd);
                let pgap = pd.iter().copied().fold(f64::NEG_INFINITY, f64::max) - plower;
                if pgap < TAU_CAP {
                    let input = Pmf::from_simplex_point(&p);
                    let value = ch.mi(input.weights());
                    return Ok(Capacity {
                        value,
                        input,
                        gap: pgap.max(0.0),
                        iterations: it,
                    });
                }
            }
        }
        loop {
            let mut total = 0.0;
            for x in 0..n {
                trial[x] = r[x] * (step * (d[x] - upper)).exp2();
                total += trial[x];
            }
            trial.iter_mut().for_each(|t| *t /= total);
            let trial_lower = divergences(&trial, &mut trial_d);
            if trial_lower >= lower || step <= 1.0 {
                std::mem::swap(&mut r, &mut trial);
                std::mem::swap(&mut d, &mut trial_d);
                lower = trial_lower;
                step = (step * 2.0).min(64.0);
                break;
            }
            step = (step / 4.0).max(1.0);
        }
    }
    Err(Error::NonConvergence {
        iterations: CAPACITY_MAX_ITERATIONS,
        gap,
    })
}

/// Newton solve of `D(W_x || q) = C` on the inputs with the largest
/// divergences, keeping at most `|Y|` affinely independent rows. An optimal
/// input with such a support always exists. The multiplicative iteration is
/// slow when two rows nearly coincide or an input's weight decays with a tiny
/// divergence deficit; the caller only accepts the result if the gap
/// certificate closes.
fn polish_capacity(ch: &ChannelMatrix, r: &[f64], d: &[f64]) -> Option<Vec<f64>> {
    let (n, m) = (ch.in_dim, ch.out_dim);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let mut support = vec![order[0]];
    for &x in &order[1..] {
        if support.len() == m {
            break;
        }
        let base = ch.row(support[0]);
        let diffs: Vec<f64> = support[1..]
            .iter()
            .chain(std::iter::once(&x))
            .flat_map(|&s| ch.row(s).iter().zip(base).map(|(a, b)| a - b))
            .collect();
        if DMatrix::from_row_slice(support.len(), m, &diffs).rank(1e-9) == support.len() {
            support.push(x);
        }
    }
    while !support.is_empty() {
        match newton_on_support(ch, &support, r, d) {
            Ok(w) => {
                let mut full = vec![0.0; n];
                for (&x, a) in support.iter().zip(&w) {
                    full[x] = *a;
                }
                return Some(full);
            }
            Err(Some(i)) => {
                support.remove(i);
            }
            Err(None) => return None,
        }
    }
    None
}

/// Solves the capacity conditions on `support`. On failure returns the
/// position of the most negative weight, if that is what went wrong.
fn newton_on_support(ch: &ChannelMatrix, support: &[usize], r: &[f64], d: &[f64]) -> std::result::Result<Vec<f64>, Option<usize>> {
    let (k, m) = (support.len(), ch.out_dim);
    let total: f64 = support.iter().map(|&x| r[x]).sum();
    let mut w: Vec<f64> = support.iter().map(|&x| r[x] / total).collect();
    let mut c = support.iter().zip(&w).map(|(&x, a)| a * d[x]).sum::<f64>();
    for _ in 0..50 {
        let q: Vec<f64> = (0..m)
            .map(|y| support.iter().zip(&w).map(|(&x, a)| a * ch.row(x)[y]).sum())
            .collect();
        let mut f = DVector::zeros(k + 1);
        for (i, &x) in support.iter().enumerate() {
            let dx: f64 = ch
                .row(x)
                .iter()
                .zip(&q)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &qy)| p * (p / qy).log2())
                .sum();
            f[i] = dx - c;
        }
        f[k] = w.iter().sum::<f64>() - 1.0;
        let jac = DMatrix::from_fn(k + 1, k + 1, |i, j| match (i < k, j < k) {
            (true, true) => -(0..m)
                .filter(|&y| q[y] > 0.0)
                .map(|y| ch.row(support[i])[y] * ch.row(support[j])[y] / q[y])
                .sum::<f64>()
                / std::f64::consts::LN_2,
            (true, false) => -1.0,
            (false, true) => 1.0,
            (false, false) => 0.0,
        });
        let step = jac.lu().solve(&f).ok_or(None)?;
        for (a, s) in w.iter_mut().zip(step.iter()) {
            *a -= s;
        }
        c -= step[k];
        if w.iter().any(|a| !a.is_finite()) {
            return Err(None);
        }
        if let Some((i, _)) = w.iter().enumerate().filter(|(_, &a)| a < 0.0).min_by(|a, b| a.1.total_cmp(b.1)) {
            return Err(Some(i));
        }
        if step.amax() < 1e-15 {
            break;
        }
    }
    Ok(w)
}

/// Numerical certificate that `I(X; Y)` is invariant under cyclic shifts of
/// the input distribution, over a grid plus `samples` seeded random inputs.
pub fn is_cyclic_shift_symmetric(ch: &ChannelMatrix, samples: usize) -> bool {
    let n = ch.in_dim;
    if n < 2 {
        return true;
    }
    let invariant = |p: &Pmf| {
        let base = ch.mi(p.weights());
        (1..n as i64).all(|k| (ch.mi(cyclic_shift(p, k).weights()) - base).abs() <= TAU_SYM)
    };
    let mut resolution = SYMMETRY_GRID_RESOLUTION;
    while resolution > 1 && probability::grid_size(n, resolution) > SYMMETRY_GRID_CAP {
        resolution -= 1;
    }
    let mut ok = true;
    probability::for_each_grid_point(n, resolution, |w| {
        if ok {
            ok = invariant(&Pmf::from_simplex_point(w));
        }
    });
    if !ok {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SYMMETRY_SEED);
    (0..samples).all(|_| invariant(&probability::random_pmf(n, &mut rng)))
}

/// A wiretap channel: Bob's channel `p(y|x)` and Eve's `p(z|x)` over a
/// common input alphabet, with both capacities cached.
#[derive(Clone, Debug, Serialize)]
pub struct WiretapChannel {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    main: ChannelMatrix,
    eavesdropper: ChannelMatrix,
    #[serde(skip)]
    main_capacity: Capacity,
    #[serde(skip)]
    eavesdropper_capacity: Capacity,
}

impl WiretapChannel {
    pub fn new(main: ChannelMatrix, eavesdropper: ChannelMatrix) -> Result<Self> {
        if main.in_dim != eavesdropper.in_dim {
            return Err(Error::DimensionMismatch {
                context: "wiretap channel inputs",
                expected: main.in_dim,
                found: eavesdropper.in_dim,
            });
        }
        if main.in_dim < 2 {
            return Err(Error::InvalidChannel(
                "input alphabet needs at least two symbols".into(),
            ));
        }
        let main_capacity = capacity(&main)?;
        let eavesdropper_capacity = capacity(&eavesdropper)?;
        Ok(Self {
            name: None,
            main,
            eavesdropper,
            main_capacity,
            eavesdropper_capacity,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn main(&self) -> &ChannelMatrix {
        &self.main
    }

    pub fn eavesdropper(&self) -> &ChannelMatrix {
        &self.eavesdropper
    }

    pub fn input_dim(&self) -> usize {
        self.main.in_dim
    }

    /// Bob's capacity `C_B`.
    pub fn c_b(&self) -> f64 {
        self.main_capacity.value
    }

    /// Eve's capacity `C_E`.
    pub fn c_e(&self) -> f64 {
        self.eavesdropper_capacity.value
    }

    pub fn main_capacity(&self) -> &Capacity {
        &self.main_capacity
    }

    pub fn eavesdropper_capacity(&self) -> &Capacity {
        &self.eavesdropper_capacity
    }

    /// The same pair with Bob and Eve exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            name: self.name.as_ref().map(|n| format!("{n} (swapped)")),
            main: self.eavesdropper.clone(),
            eavesdropper: self.main.clone(),
            main_capacity: self.eavesdropper_capacity.clone(),
            eavesdropper_capacity: self.main_capacity.clone(),
        }
    }

    /// `(mu + 1) I(X;Y) - I(X;Z)` on raw weights.
    #[inline]
    pub(crate) fn fmu(&self, px: &[f64], mu: f64) -> f64 {
        (mu + 1.0) * self.main.mi(px) - self.eavesdropper.mi(px)
    }

    #[inline]
    pub(crate) fn f(&self, px: &[f64]) -> f64 {
        self.main.mi(px) - self.eavesdropper.mi(px)
    }

    pub(crate) fn check_input(&self, context: &'static str, dim: usize) -> Result<()> {
        if dim == self.input_dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected: self.input_dim(),
                found: dim,
            })
        }
    }
}

/// `f_mu(P_x) = (mu + 1) I(X;Y) - I(X;Z)`.
pub fn f_mu(w: &WiretapChannel, px: &Pmf, mu: f64) -> Result<f64> {
    w.check_input("f_mu", px.dim())?;
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "must be non-negative",
        });
    }
    Ok(w.fmu(px.weights(), mu))
}

/// The named channel families used throughout the examples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StandardChannel {
    /// Bob sees BSC(eps), Eve sees BEC(alpha).
    BscBec { eps: f64, alpha: f64 },
    /// Bob sees BEC(alpha), Eve sees BSC(eps).
    BecBsc { alpha: f64, eps: f64 },
    /// Four-input pair built from two cross-over parameters for Bob and a
    /// pair-confusion parameter for Eve.
    VanDijk { p: f64, q: f64, r: f64 },
    /// Bob sees BSC(eps); Eve's rows are `[1-p-q, q, p]` and `[q, 1-p-q, p]`.
    BscTernary { p: f64, q: f64, eps: f64 },
}

impl StandardChannel {
    pub fn label(&self) -> String {
        match *self {
            Self::BscBec { eps, alpha } => format!("BSC({eps})-BEC({alpha})"),
            Self::BecBsc { alpha, eps } => format!("BEC({alpha})-BSC({eps})"),
            Self::VanDijk { p, q, r } => format!("van Dijk(p={p}, q={q}, r={r})"),
            Self::BscTernary { p, q, eps } => format!("BSC({eps})-ternary(p={p}, q={q})"),
        }
    }
}

fn check_crossover(eps: f64) -> Result<()> {
    if (0.0..0.5).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "cross-over probability must lie in [0, 0.5)",
        })
    }
}

/// Builds one of the [`StandardChannel`] pairs.
pub fn make_standard(kind: StandardChannel) -> Result<WiretapChannel> {
    let w = match kind {
        StandardChannel::BscBec { eps, alpha } => {
            check_crossover(eps)?;
            WiretapChannel::new(ChannelMatrix::bsc(eps)?, ChannelMatrix::bec(alpha)?)?
        }
        StandardChannel::BecBsc { alpha, eps } => {
            check_crossover(eps)?;
            WiretapChannel::new(ChannelMatrix::bec(alpha)?, ChannelMatrix::bsc(eps)?)?
        }
        StandardChannel::VanDijk { p, q, r } => {
            check_unit("p", p)?;
            check_unit("q", q)?;
            check_unit("r", r)?;
            let main = vec![
                vec![1.0 - p, p, 1.0 - q, q],
                vec![p, 1.0 - p, q, 1.0 - q],
                vec![1.0 - q, q, 1.0 - p, p],
                vec![q, 1.0 - q, p, 1.0 - p],
            ];
            let eve = vec![
                vec![1.0 - r, 1.0 - r, r, r],
                vec![1.0 - r, 1.0 - r, r, r],
                vec![r, r, 1.0 - r, 1.0 - r],
                vec![r, r, 1.0 - r, 1.0 - r],
            ];
            let halve = |m: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                m.into_iter()
                    .map(|row| row.into_iter().map(|x| 0.5 * x).collect())
                    .collect()
            };
            WiretapChannel::new(ChannelMatrix::new(halve(main))?, ChannelMatrix::new(halve(eve))?)?
        }
        StandardChannel::BscTernary { p, q, eps } => {
            check_crossover(eps)?;
            if p < 0.0 || q < 0.0 || p + q >= 1.0 {
                return Err(Error::InvalidParameter {
                    name: "p + q",
                    value: p + q,
                    reason: "need p, q >= 0 and p + q < 1",
                });
            }
            let eve = vec![vec![1.0 - p - q, q, p], vec![q, 1.0 - p - q, p]];
            WiretapChannel::new(ChannelMatrix::bsc(eps)?, ChannelMatrix::new(eve)?)?
        }
    };
    Ok(w.with_name(kind.label()))
}

#[cfg(test)]
fn rows_are_stochastic(rows: &[Vec<f64>]) -> bool {
    use crate::probability::TAU_PMF;
    rows.iter()
        .all(|r| r.iter().all(|&x| x >= -TAU_PMF) && (r.iter().sum::<f64>() - 1.0).abs() <= TAU_PMF)
}

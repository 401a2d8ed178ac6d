//! Auxiliary Markov chains `U -> V -> X` and the boundary objective.

use serde::Serialize;

use crate::channel::{compose_prefix, ChannelMatrix, WiretapChannel};
use crate::error::{Error, Result};
use crate::probability::Pmf;

/// Agreement required between the two evaluations of the boundary objective.
pub const TAU_NUM: f64 = 1e-9;

/// The chain `U -> V -> X` given by `p(u)`, `p(v|u)` and `p(x|v)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxiliaryChain {
    pub pu: Pmf,
    pub pv_given_u: ChannelMatrix,
    pub px_given_v: ChannelMatrix,
}

/// Mutual-information terms of a chain on a wiretap channel, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainTerms {
    pub i_vy: f64,
    pub i_vz: f64,
    pub i_vy_given_u: f64,
    pub i_vz_given_u: f64,
    pub i_xy: f64,
    pub i_xy_given_u: f64,
    pub i_xz_given_u: f64,
    pub i_xy_given_v: f64,
    pub i_xz_given_v: f64,
}

impl AuxiliaryChain {
    pub fn new(pu: Pmf, pv_given_u: ChannelMatrix, px_given_v: ChannelMatrix) -> Result<Self> {
        if pv_given_u.in_dim() != pu.dim() {
            return Err(Error::DimensionMismatch {
                context: "chain p(v|u) rows",
                expected: pu.dim(),
                found: pv_given_u.in_dim(),
            });
        }
        if px_given_v.in_dim() != pv_given_u.out_dim() {
            return Err(Error::DimensionMismatch {
                context: "chain p(x|v) rows",
                expected: pv_given_u.out_dim(),
                found: px_given_v.in_dim(),
            });
        }
        Ok(Self {
            pu,
            pv_given_u,
            px_given_v,
        })
    }

    /// No rate splitting and no prefixing: `U` constant, `V = X ~ px`.
    pub fn trivial(px: &Pmf) -> Self {
        Self {
            pu: Pmf::uniform(1),
            pv_given_u: ChannelMatrix::from_data(1, px.dim(), px.weights().to_vec()),
            px_given_v: ChannelMatrix::identity(px.dim()),
        }
    }

    /// `V = X` with `U` uniform over the given conditionals `p(x|u)`.
    pub fn split_only(px_given_u: &[Vec<f64>]) -> Self {
        let n = px_given_u[0].len();
        let k = px_given_u.len();
        Self {
            pu: Pmf::uniform(k),
            pv_given_u: ChannelMatrix::from_data(k, n, px_given_u.concat()),
            px_given_v: ChannelMatrix::identity(n),
        }
    }

    /// `U` constant, `V ~ pv` with conditionals `p(x|v)`.
    pub fn prefix_only(pv: &[f64], px_given_v: &[Vec<f64>]) -> Self {
        let n = px_given_v[0].len();
        Self {
            pu: Pmf::uniform(1),
            pv_given_u: ChannelMatrix::from_data(1, pv.len(), pv.to_vec()),
            px_given_v: ChannelMatrix::from_data(px_given_v.len(), n, px_given_v.concat()),
        }
    }

    pub fn card_u(&self) -> usize {
        self.pu.dim()
    }

    pub fn card_v(&self) -> usize {
        self.px_given_v.in_dim()
    }

    pub fn card_x(&self) -> usize {
        self.px_given_v.out_dim()
    }

    /// Marginal of `V`.
    pub fn pv(&self) -> Vec<f64> {
        self.pv_given_u.output_distribution(self.pu.weights())
    }

    /// Induced input distribution.
    pub fn px(&self) -> Pmf {
        Pmf::from_simplex_point(&self.px_given_v.output_distribution(&self.pv()))
    }

    /// `p(x | U = u)`.
    pub fn px_given_u(&self, u: usize) -> Vec<f64> {
        self.px_given_v.output_distribution(self.pv_given_u.row(u))
    }

    pub fn terms(&self, w: &WiretapChannel) -> Result<ChainTerms> {
        w.check_input("auxiliary chain", self.card_x())?;
        let vy = compose_prefix(&self.px_given_v, w.main())?;
        let vz = compose_prefix(&self.px_given_v, w.eavesdropper())?;
        let pu = self.pu.weights();
        let pv = self.pv();
        let mut t = ChainTerms {
            i_vy: vy.mi(&pv),
            i_vz: vz.mi(&pv),
            i_vy_given_u: 0.0,
            i_vz_given_u: 0.0,
            i_xy: w.main().mi(self.px().weights()),
            i_xy_given_u: 0.0,
            i_xz_given_u: 0.0,
            i_xy_given_v: 0.0,
            i_xz_given_v: 0.0,
        };
        for (u, &p) in pu.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let row = self.pv_given_u.row(u);
            t.i_vy_given_u += p * vy.mi(row);
            t.i_vz_given_u += p * vz.mi(row);
            let px_u = self.px_given_u(u);
            t.i_xy_given_u += p * w.main().mi(&px_u);
            t.i_xz_given_u += p * w.eavesdropper().mi(&px_u);
        }
        for (v, &p) in pv.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let row = self.px_given_v.row(v);
            t.i_xy_given_v += p * w.main().mi(row);
            t.i_xz_given_v += p * w.eavesdropper().mi(row);
        }
        Ok(t)
    }

    /// Drops `V` symbols of zero probability and `U` symbols of zero weight.
    pub fn pruned(&self, threshold: f64) -> Self {
        let pv = self.pv();
        let keep_v: Vec<usize> = (0..self.card_v()).filter(|&v| pv[v] > threshold).collect();
        let keep_u: Vec<usize> = (0..self.card_u()).filter(|&u| self.pu[u] > threshold).collect();
        if keep_v.is_empty() || keep_u.is_empty() {
            return self.clone();
        }
        let pu = Pmf::from_simplex_point(&keep_u.iter().map(|&u| self.pu[u]).collect::<Vec<_>>());
        let mut pv_rows = Vec::new();
        for &u in &keep_u {
            let row: Vec<f64> = keep_v.iter().map(|&v| self.pv_given_u.row(u)[v]).collect();
            let s: f64 = row.iter().sum();
            pv_rows.extend(row.into_iter().map(|x| x / s));
        }
        let px_rows: Vec<f64> = keep_v
            .iter()
            .flat_map(|&v| self.px_given_v.row(v).to_vec())
            .collect();
        Self {
            pu,
            pv_given_u: ChannelMatrix::from_data(keep_u.len(), keep_v.len(), pv_rows),
            px_given_v: ChannelMatrix::from_data(keep_v.len(), self.card_x(), px_rows),
        }
    }
}

impl ChainTerms {
    /// `mu I(V;Y) + I(V;Y|U) - I(V;Z|U)`.
    pub fn direct(&self, mu: f64) -> f64 {
        mu * self.i_vy + self.i_vy_given_u - self.i_vz_given_u
    }

    /// The same objective through the input: `mu I(X;Y) + I(X;Y|U) - I(X;Z|U)
    /// - [(mu + 1) I(X;Y|V) - I(X;Z|V)]`.
    pub fn via_input(&self, mu: f64) -> f64 {
        mu * self.i_xy + self.i_xy_given_u - self.i_xz_given_u
            - ((mu + 1.0) * self.i_xy_given_v - self.i_xz_given_v)
    }

    /// Rate `I(V;Y)` and equivocation `I(V;Y|U) - I(V;Z|U)` clamped to
    /// `[0, rate]`.
    pub fn rate_pair(&self) -> (f64, f64) {
        let r = self.i_vy;
        (r, (self.i_vy_given_u - self.i_vz_given_u).clamp(0.0, r))
    }
}

/// `mu I(V;Y) + I(V;Y|U) - I(V;Z|U)`, evaluated directly and through the
/// input; the two must agree within [`TAU_NUM`].
pub fn evaluate_objective(w: &WiretapChannel, chain: &AuxiliaryChain, mu: f64) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "must be non-negative",
        });
    }
    let t = chain.terms(w)?;
    let (a, b) = (t.direct(mu), t.via_input(mu));
    if (a - b).abs() > TAU_NUM {
        return Err(Error::Assertion(format!(
            "objective forms disagree: {a} vs {b} at mu = {mu}"
        )));
    }
    Ok(a)
}

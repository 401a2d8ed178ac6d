//! Solver knobs shared by classification and region tracing.

use serde::Serialize;

use crate::probability;
use crate::search::DEFAULT_STARTS;

/// Tolerance for sign decisions in classification.
pub const TAU_CLASS: f64 = 1e-8;
/// Tolerance for optimality comparisons.
pub const TAU_OPT: f64 = 1e-6;
/// Default seed for every randomized component.
pub const DEFAULT_SEED: u64 = 0x00c0_ffee;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    /// Overrides the per-dimension classification grid resolution.
    pub grid_resolution: Option<usize>,
    pub tau_class: f64,
    pub starts: usize,
    pub seed: u64,
    pub mu_count: usize,
    pub mu_min: f64,
    pub mu_max: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            grid_resolution: None,
            tau_class: TAU_CLASS,
            starts: DEFAULT_STARTS,
            seed: DEFAULT_SEED,
            mu_count: 64,
            mu_min: 1e-3,
            mu_max: 32.0,
        }
    }
}

impl Settings {
    /// Grid resolution for searching the input simplex of dimension `dim`.
    pub fn class_resolution(&self, dim: usize) -> usize {
        if let Some(r) = self.grid_resolution {
            return r.max(1);
        }
        match dim {
            0..=2 => 200,
            3 => 40,
            4 => 20,
            _ => {
                let mut r = 20;
                while r > 2 && probability::grid_size(dim, r) > 20_000 {
                    r -= 1;
                }
                r
            }
        }
    }

    /// `0` followed by `mu_count` geometric points from `mu_min` to `mu_max`.
    pub fn mu_grid(&self) -> Vec<f64> {
        let mut grid = vec![0.0];
        match self.mu_count {
            0 => {}
            1 => grid.push(self.mu_max),
            n => {
                let ratio = (self.mu_max / self.mu_min).ln() / (n - 1) as f64;
                grid.extend((0..n).map(|i| self.mu_min * (ratio * i as f64).exp()));
            }
        }
        grid
    }
}

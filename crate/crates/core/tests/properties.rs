//! Cross-checks of the solvers against independent oracles and invariants
//! on random instances.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wiretap::binary::{best_config, bec_bsc_chain, inflection_threshold, triple_window, verify_bsc_ternary};
use wiretap::chain::evaluate_objective;
use wiretap::channel::{capacity, make_standard, ChannelMatrix, StandardChannel, WiretapChannel};
use wiretap::oracle::{brute_binary, brute_chain};
use wiretap::probability::{decompose, Pmf};
use wiretap::region::{auxiliary_problem, secrecy_capacity, trace_region};
use wiretap::settings::Settings;

fn random_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            let raw: Vec<f64> = (0..cols).map(|_| rng.gen_range(0.01..1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

fn random_binary_pair(seed: u64) -> WiretapChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ny, nz) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
    WiretapChannel::new(
        ChannelMatrix::new(random_rows(&mut rng, 2, ny)).unwrap(),
        ChannelMatrix::new(random_rows(&mut rng, 2, nz)).unwrap(),
    )
    .unwrap()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let k = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= k * a[col][c];
            }
            b[row] -= k * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Coefficients of `target` in the basis `{anchor, e_j : j in basis}`.
fn decomposition_oracle(target: &[f64], anchor: &[f64], basis: &[usize]) -> Vec<f64> {
    let n = target.len();
    let a = (0..n)
        .map(|i| {
            let mut row = vec![anchor[i]];
            row.extend(basis.iter().map(|&j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    solve(a, target.to_vec())
}

#[test]
fn decomposition_of_fixed_point_against_uniform() {
    let target = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
    let d = decompose(&target, &Pmf::uniform(3)).unwrap();
    let oracle = decomposition_oracle(target.weights(), &[1.0 / 3.0; 3], &d.basis_indices);
    for (a, b) in d.q.weights().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((d.q[0] - 0.6).abs() < 1e-12);
    assert!(oracle.iter().all(|&x| x >= -1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_matches_elimination(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = random_rows(&mut rng, 2, n);
        let (target, anchor) = (Pmf::new(rows[0].clone()).unwrap(), Pmf::new(rows[1].clone()).unwrap());
        let d = decompose(&target, &anchor).unwrap();
        let oracle = decomposition_oracle(target.weights(), anchor.weights(), &d.basis_indices);
        for (a, b) in d.q.weights().iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let back = d.reconstruct();
        prop_assert!(back.iter().zip(target.weights()).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn circulant_capacity_is_at_uniform(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let row = random_rows(&mut rng, 1, n).remove(0);
        let rows: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|y| row[(y + n - k) % n]).collect()).collect();
        let c = capacity(&ChannelMatrix::new(rows).unwrap()).unwrap();
        let h: f64 = row.iter().map(|&p| -p * p.log2()).sum();
        prop_assert!((c.value - ((n as f64).log2() - h)).abs() < 1e-9);
        prop_assert!(c.input.max_abs_diff(&Pmf::uniform(n)) < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn best_config_agrees_with_grid_oracle(seed in any::<u64>(), mu in 0.0f64..2.0) {
        let w = random_binary_pair(seed);
        let best = best_config(&w, mu).unwrap();
        let grid = brute_binary(&w, mu, 120).unwrap();
        prop_assert!(grid.value <= best.objective + 1e-9, "grid {} above analytic {}", grid.value, best.objective);
        prop_assert!(best.objective <= grid.value + grid.error_bound, "analytic {} vs grid {} + {}", best.objective, grid.value, grid.error_bound);
        prop_assert!((best.evaluate(&w, mu) - best.objective).abs() < 1e-12);
    }

    #[test]
    fn auxiliary_value_bounds(seed in any::<u64>()) {
        let w = random_binary_pair(seed);
        let sc = secrecy_capacity(&w);
        let aux = auxiliary_problem(&w, 0.0);
        prop_assert!(sc.value >= sc.f_max.max(0.0) - 1e-9);
        prop_assert!(sc.value <= sc.upper_bound + 1e-9);
        prop_assert!((aux.value - sc.value).abs() < 1e-6);
        prop_assert!(aux.raw_value >= sc.f_max - 1e-9);
    }
}

#[test]
fn chain_oracle_never_beats_analytic_value() {
    for (eps, alpha, mu) in [(0.1, 0.6, 0.0), (0.1, 0.4, 0.1), (0.2, 0.7, 0.5)] {
        let w = make_standard(StandardChannel::BscBec { eps, alpha }).unwrap();
        let analytic = mu * w.c_b() + best_config(&w, mu).unwrap().objective;
        let grid = brute_chain(&w, mu, 2, 3, 8).unwrap();
        assert!(grid.value <= analytic + 1e-9, "{} > {analytic}", grid.value);
        let direct = evaluate_objective(&w, &grid.chain, mu).unwrap();
        assert!((direct - grid.value).abs() < 1e-9);
    }
}

#[test]
fn bec_bsc_chain_is_optimal_below_mu_star() {
    let w = make_standard(StandardChannel::BecBsc { alpha: 0.5, eps: 0.1 }).unwrap();
    for mu in [0.0, 0.02, 0.05] {
        let chain = bec_bsc_chain(&w, mu).unwrap();
        let objective = evaluate_objective(&w, &chain, mu).unwrap();
        let grid = brute_chain(&w, mu, 2, 4, 8).unwrap();
        assert!(objective >= grid.value - 1e-9, "mu {mu}: {objective} < {}", grid.value);
        assert!((chain.px()[0] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn ternary_instance_shape_and_window() {
    let r = verify_bsc_ternary(0.6, 0.25, 0.4202).unwrap();
    assert!(r.shape_ok, "{r:?}");
    assert!(r.triple);
    let t = inflection_threshold(0.6, 0.25).unwrap();
    let (lo, hi) = triple_window(0.6, 0.25, 2e-4).unwrap().expect("window");
    assert!(lo >= t.eps_star && lo <= 0.4202 && hi >= 0.4202, "[{lo}, {hi}]");
}

#[test]
fn symmetric_region_is_concave_for_random_bsc_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = Settings {
        mu_count: 16,
        ..Settings::default()
    }
    .mu_grid();
    for _ in 0..3 {
        let (a, b) = (rng.gen_range(0.0..0.45), rng.gen_range(0.0..0.45));
        let w = WiretapChannel::new(ChannelMatrix::bsc(a).unwrap(), ChannelMatrix::bec(2.0 * b).unwrap()).unwrap();
        let region = trace_region(&w, &grid).unwrap();
        assert!(region.is_concave(1e-8));
        for p in &region.points {
            assert!(p.equivocation <= p.rate + 1e-9 && p.rate <= w.c_b() + 1e-9);
        }
    }
}

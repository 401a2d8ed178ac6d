//! Acceptance checks, one per criterion. Runs without the libtest harness so
//! that every criterion prints a PASS/FAIL line; exits non-zero if any fails.
//!
//! Pass criterion numbers (e.g. `3 7`) as arguments to run a subset.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wiretap::binary::{best_config, inflection_threshold, verify_bsc_ternary, ConfigKind};
use wiretap::chain::{evaluate_objective, AuxiliaryChain};
use wiretap::channel::{make_standard, ChannelMatrix, StandardChannel, WiretapChannel};
use wiretap::classify::{classify, improving_prefix};
use wiretap::oracle::{brute_binary, brute_chain};
use wiretap::probability::{binary_entropy, Pmf};
use wiretap::region::{
    auxiliary_problem, construct_optimal_uv, corner_cb_cs, dominant_shortcut, secrecy_capacity, trace_region,
    MuStarRegime, RegionBoundary,
};
use wiretap::settings::Settings;

// Pinned tolerances.
const TOL_THRESHOLD: f64 = 1e-3;
const TOL_EPS_STAR: f64 = 5e-5;
const TOL_ORACLE_GRID: f64 = 3e-3;
const TOL_DOMINANCE: f64 = 1e-9;
const MIN_PREFIX_GAIN: f64 = 1e-6;
const TOL_CONSTRUCTION: f64 = 1e-6;
const TOL_OPT: f64 = 1e-6;
const TOL_SHORTCUT: f64 = 1e-8;
const MIN_STRICT_GAP: f64 = 1e-4;
const TOL_CONFIG: f64 = 1e-6;
const TOL_FRONTIER: f64 = 1e-8;
const TOL_MU_STAR: f64 = 1e-8;
const TOL_CORNER: f64 = 1e-6;

fn h2(x: f64) -> f64 {
    binary_entropy(x).unwrap()
}

fn bsc_bec(eps: f64, alpha: f64) -> WiretapChannel {
    make_standard(StandardChannel::BscBec { eps, alpha }).unwrap()
}

fn bec_bsc(alpha: f64, eps: f64) -> WiretapChannel {
    make_standard(StandardChannel::BecBsc { alpha, eps }).unwrap()
}

/// Independent 1-D maximizer: dense scan, then golden section around the
/// best cell.
fn max_1d(g: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = 200_000;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=n {
        let p = i as f64 / n as f64;
        let v = g(p);
        if v > best.0 {
            best = (v, p);
        }
    }
    let (mut a, mut b) = ((best.1 - 1.0 / n as f64).max(0.0), (best.1 + 1.0 / n as f64).min(1.0));
    for _ in 0..200 {
        let c = a + (b - a) / 3.0;
        let d = b - (b - a) / 3.0;
        if g(c) >= g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let m = 0.5 * (a + b);
    if g(m) > best.0 {
        (g(m), m)
    } else {
        best
    }
}

fn f_bin(w: &WiretapChannel, mu: f64, p: f64) -> f64 {
    let px = Pmf::binary(p).unwrap();
    wiretap::channel::f_mu(w, &px, mu).unwrap()
}

fn max_f(w: &WiretapChannel) -> f64 {
    max_1d(|p| f_bin(w, 0.0, p)).0
}

fn min_fmu(w: &WiretapChannel, mu: f64) -> f64 {
    -max_1d(|p| -f_bin(w, mu, p)).0
}

fn random_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ChannelMatrix {
    let data = (0..rows)
        .map(|_| {
            let raw: Vec<f64> = (0..cols).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        })
        .collect();
    ChannelMatrix::new(data).unwrap()
}

fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    random_rows(rng, 1, n).row(0).to_vec()
}

fn product(a: &ChannelMatrix, b: &ChannelMatrix) -> ChannelMatrix {
    wiretap::channel::compose_prefix(a, b).unwrap()
}

/// Bisects the switch point of a monotone predicate on `[lo, hi]`.
fn bisect_switch(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    let at_lo = pred(lo);
    assert_ne!(at_lo, pred(hi), "no switch on [{lo}, {hi}]");
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_bsc_bec_thresholds() -> Outcome {
    let eps = 0.1;
    let less_noisy_eve = bisect_switch(0.2, 0.45, |a| classify(&bsc_bec(eps, a).swapped()).less_noisy);
    let dominant = bisect_switch(0.4, 0.55, |a| classify(&bsc_bec(eps, a)).dominantly_cyclic);
    let (t1, t2) = (4.0 * eps * (1.0 - eps), h2(eps));
    check(
        (less_noisy_eve - t1).abs() <= TOL_THRESHOLD,
        format!("less-noisy switch at {less_noisy_eve:.5}, expected {t1}"),
    )?;
    check(
        (dominant - t2).abs() <= TOL_THRESHOLD,
        format!("dominance switch at {dominant:.5}, expected {t2:.5}"),
    )?;
    Ok(format!("switches at {less_noisy_eve:.5} and {dominant:.5}"))
}

fn c2_ternary_instance() -> Outcome {
    let t = inflection_threshold(0.6, 0.25).map_err(|e| e.to_string())?;
    check(
        (t.eps_star - 0.4194).abs() <= TOL_EPS_STAR,
        format!("eps* = {}", t.eps_star),
    )?;
    let r = verify_bsc_ternary(0.6, 0.25, 0.4202).map_err(|e| e.to_string())?;
    let c = &r.classification;
    check(
        c.more_capable && !c.less_noisy && c.dominantly_cyclic,
        format!(
            "more capable {}, less noisy {}, dominantly symmetric {}",
            c.more_capable, c.less_noisy, c.dominantly_cyclic
        ),
    )?;
    Ok(format!("eps* = {:.6}, triple property holds at 0.4202", t.eps_star))
}

fn c3_secrecy_vs_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = vec![bsc_bec(0.1, 0.6), bec_bsc(0.5, 0.1)];
    for _ in 0..20 {
        let (ny, nz) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let main = random_rows(&mut rng, 2, ny);
        let eve = random_rows(&mut rng, 2, nz);
        pairs.push(WiretapChannel::new(main, eve).unwrap());
    }
    let mut worst: f64 = 0.0;
    for (i, w) in pairs.iter().enumerate() {
        let sc = secrecy_capacity(w).value;
        let oracle = brute_binary(w, 0.0, 400).map_err(|e| e.to_string())?.value;
        let d = (sc - oracle).abs();
        worst = worst.max(d);
        check(d <= TOL_ORACLE_GRID, format!("pair {i}: C_s = {sc}, oracle {oracle}"))?;
    }
    Ok(format!("{} pairs, max |C_s - oracle| = {worst:.2e}", pairs.len()))
}

fn c4_more_capable_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut channels = vec![bec_bsc(0.45, 0.1), bec_bsc(0.4, 0.1), bec_bsc(0.3, 0.2)];
    while channels.len() < 10 {
        // Degraded pairs: Eve observes Bob's output through another channel.
        let nx = if channels.len() < 5 { 2 } else { 3 };
        let main = random_rows(&mut rng, nx, 3);
        let eve = product(&main, &random_rows(&mut rng, 3, 2));
        channels.push(WiretapChannel::new(main, eve).unwrap());
    }
    let mut worst = f64::NEG_INFINITY;
    for (i, w) in channels.iter().enumerate() {
        check(classify(w).more_capable, format!("channel {i} is not certified more capable"))?;
        let nx = w.input_dim();
        for _ in 0..1000 {
            let (nu, nv) = (rng.gen_range(1..=3), rng.gen_range(2..=4));
            let mu = rng.gen_range(0.0..3.0);
            let chain = AuxiliaryChain::new(
                Pmf::new(random_pmf(&mut rng, nu)).unwrap(),
                random_rows(&mut rng, nu, nv),
                random_rows(&mut rng, nv, nx),
            )
            .unwrap();
            let px_u: Vec<Vec<f64>> = (0..nu).map(|u| chain.px_given_u(u)).collect();
            let counterpart = AuxiliaryChain::new(
                Pmf::new(chain.pu.weights().to_vec()).unwrap(),
                ChannelMatrix::new(px_u).unwrap(),
                ChannelMatrix::identity(nx),
            )
            .unwrap();
            let a = evaluate_objective(w, &chain, mu).map_err(|e| e.to_string())?;
            let b = evaluate_objective(w, &counterpart, mu).map_err(|e| e.to_string())?;
            worst = worst.max(a - b);
            check(a <= b + TOL_DOMINANCE, format!("channel {i}: prefixed {a} > direct {b} at mu = {mu}"))?;
        }
    }
    Ok(format!("10 channels x 1000 chains, max excess {worst:.2e}"))
}

fn c5_improving_prefix() -> Outcome {
    let mut gains = Vec::new();
    for alpha in [0.4, 0.5, 0.6] {
        let w = bsc_bec(0.1, alpha);
        let p = improving_prefix(&w).ok_or(format!("alpha = {alpha}: no improving prefix"))?;
        let t = p.chain.terms(&w).map_err(|e| e.to_string())?;
        let gain = t.i_vy - t.i_vz - max_f(&w);
        check(gain >= MIN_PREFIX_GAIN, format!("alpha = {alpha}: gain {gain}"))?;
        gains.push(format!("{gain:.3e}"));
    }
    Ok(format!("gains {}", gains.join(", ")))
}

fn c6_construction_optimality() -> Outcome {
    let w = bsc_bec(0.1, 0.6);
    let mut notes = Vec::new();
    for mu in [0.0, 0.1, 1.0] {
        let c = construct_optimal_uv(&w, mu).map_err(|e| e.to_string())?;
        let objective = evaluate_objective(&w, &c.chain, mu).map_err(|e| e.to_string())?;
        let aux = auxiliary_problem(&w, mu).value;
        check(
            (objective - (mu * w.c_b() + aux)).abs() <= TOL_CONSTRUCTION,
            format!("mu = {mu}: objective {objective} vs mu C_B + aux {}", mu * w.c_b() + aux),
        )?;
        let brute = brute_chain(&w, mu, 2, 4, 8).map_err(|e| e.to_string())?.value;
        check(
            objective >= brute - TOL_OPT,
            format!("mu = {mu}: construction {objective} below grid chain {brute}"),
        )?;
        notes.push(format!("mu={mu}: {objective:.9} vs grid {brute:.9}"));
    }
    Ok(notes.join("; "))
}

fn c7_dominant_shortcut() -> Outcome {
    let w = bsc_bec(0.1, 0.6);
    let d = dominant_shortcut(&w, 0.0).map_err(|e| e.to_string())?;
    let expected = max_f(&w) - min_fmu(&w, 0.0);
    check(
        (d.value - expected).abs() <= TOL_SHORTCUT,
        format!("shortcut {} vs max f - min f = {expected}", d.value),
    )?;
    let sc = secrecy_capacity(&w);
    check(
        (sc.value - sc.upper_bound).abs() <= TOL_SHORTCUT && (sc.value - d.value).abs() <= TOL_SHORTCUT,
        format!("C_s {} vs bound {}", sc.value, sc.upper_bound),
    )?;
    let mut strict = Vec::new();
    for w in [bec_bsc(0.5, 0.1), bsc_bec(0.1, 0.4), bec_bsc(0.6, 0.15)] {
        let sc = secrecy_capacity(&w);
        check(
            sc.value <= sc.upper_bound + TOL_SHORTCUT,
            format!("C_s {} exceeds bound {}", sc.value, sc.upper_bound),
        )?;
        strict.push(sc.upper_bound - sc.value);
    }
    let best = strict.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    check(best >= MIN_STRICT_GAP, format!("largest bound gap on non-dominant pairs {best}"))?;
    Ok(format!("shortcut matches within {:.1e}; non-dominant gaps {strict:.4?}", (d.value - expected).abs()))
}

fn c8_no_rate_splitting() -> Outcome {
    let mut checked = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    for eps in [0.05, 0.1, 0.15, 0.2, 0.25] {
        let (lo, hi) = (4.0 * eps * (1.0 - eps), h2(eps));
        for k in 0..5 {
            let alpha = lo + (hi - lo) * (k as f64 + 0.5) / 5.0;
            let w = bsc_bec(eps, alpha);
            for mu in [0.0, 0.05, 0.2, 1.0] {
                let c = best_config(&w, mu).map_err(|e| e.to_string())?;
                let symmetric = (c.lambda - 0.5).abs() <= TOL_CONFIG && (c.p2 - (1.0 - c.p1)).abs() <= TOL_CONFIG;
                check(
                    symmetric || c.kind == ConfigKind::Trivial,
                    format!("eps {eps}, alpha {alpha:.4}, mu {mu}: {c:?}"),
                )?;
                if mu <= 0.2 {
                    let no_split = mu * w.c_b() + c.objective;
                    let brute = brute_chain(&w, mu, 2, 4, 6).map_err(|e| e.to_string())?.value;
                    worst_excess = worst_excess.max(brute - no_split);
                    check(
                        brute <= no_split + TOL_OPT,
                        format!("eps {eps}, alpha {alpha:.4}, mu {mu}: split chain {brute} > {no_split}"),
                    )?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (eps, alpha, mu) cases; max split excess {worst_excess:.2e}"))
}

fn frontier_checks(name: &str, w: &WiretapChannel, b: &RegionBoundary, terminal_re: f64) -> Result<(), String> {
    check(b.is_concave(TOL_FRONTIER), format!("{name}: frontier not concave"))?;
    for p in &b.points {
        check(
            p.equivocation <= p.rate + TOL_FRONTIER && p.rate <= w.c_b() + TOL_FRONTIER && p.equivocation >= -TOL_FRONTIER,
            format!("{name}: point ({}, {}) outside Re <= R <= C_B", p.rate, p.equivocation),
        )?;
    }
    let t = b.terminal().ok_or(format!("{name}: empty boundary"))?;
    check(
        (t.rate - w.c_b()).abs() <= TOL_FRONTIER && (t.equivocation - terminal_re).abs() <= TOL_CORNER,
        format!("{name}: terminal ({}, {}) vs ({}, {terminal_re})", t.rate, t.equivocation, w.c_b()),
    )?;
    let ms = b.mu_star.ok_or(format!("{name}: no mu*"))?;
    check(ms.value - ms.lower <= TOL_MU_STAR, format!("{name}: mu* bracket [{}, {}]", ms.lower, ms.value))?;
    let fu = f_bin(w, 0.0, 0.5);
    let holds = |mu: f64| match ms.regime {
        MuStarRegime::SymmetricBeatsMin => fu <= min_fmu(w, mu) + 1e-12,
        _ => min_fmu(w, mu) >= -1e-12,
    };
    check(holds(ms.value), format!("{name}: condition fails at mu* = {}", ms.value))?;
    if ms.value > 0.0 {
        check(!holds(ms.lower), format!("{name}: condition already holds at {}", ms.lower))?;
    }
    Ok(())
}

fn c9_frontiers() -> Outcome {
    let grid = Settings::default().mu_grid();
    let mut notes = Vec::new();
    let cases = [
        ("BSC(0.1)-BEC(0.4)", bsc_bec(0.1, 0.4), None),
        ("BEC(0.5)-BSC(0.1)", bec_bsc(0.5, 0.1), Some(())),
        ("BEC(0.45)-BSC(0.1)", bec_bsc(0.45, 0.1), Some(())),
    ];
    for (name, w, ends_at_max_f) in cases {
        let b = trace_region(&w, &grid).map_err(|e| format!("{name}: {e}"))?;
        let terminal_re = if ends_at_max_f.is_some() { max_f(&w) } else { 0.0 };
        frontier_checks(name, &w, &b, terminal_re)?;
        notes.push(format!("{name}: {} points, mu* = {:.6}", b.points.len(), b.mu_star.map_or(f64::NAN, |m| m.value)));
    }
    Ok(notes.join("; "))
}

fn c10_corner() -> Outcome {
    let w = bec_bsc(0.45, 0.1);
    let c = corner_cb_cs(&w).map_err(|e| e.to_string())?;
    let cs = max_f(&w);
    check(
        (c.rate - w.c_b()).abs() <= TOL_CORNER && (c.equivocation - cs).abs() <= TOL_CORNER,
        format!("BEC-BSC corner ({}, {}) vs ({}, {cs})", c.rate, c.equivocation, w.c_b()),
    )?;
    let (p, q) = (0.05, 0.3);
    let r = (0..50)
        .map(|k| 0.5 - 0.01 * k as f64)
        .map(|r| (r, make_standard(StandardChannel::VanDijk { p, q, r }).unwrap()))
        .filter(|(_, w)| classify(w).more_capable)
        .map(|(r, _)| r)
        .last()
        .ok_or("no more-capable van Dijk parameter found")?;
    // Step back inside the range found by the scan.
    let r = (r + 0.5) / 2.0;
    let w = make_standard(StandardChannel::VanDijk { p, q, r }).unwrap();
    check(classify(&w).more_capable, format!("van Dijk r = {r} not more capable"))?;
    let c = corner_cb_cs(&w).map_err(|e| e.to_string())?;
    let cs = secrecy_capacity(&w).value;
    check(
        (c.rate - w.c_b()).abs() <= TOL_CORNER && (c.equivocation - cs).abs() <= TOL_CORNER,
        format!("van Dijk corner ({}, {}) vs ({}, {cs})", c.rate, c.equivocation, w.c_b()),
    )?;
    Ok(format!("van Dijk r = {r:.3}: corner ({:.6}, {:.6}), |U| = {}", c.rate, c.equivocation, c.chain.card_u()))
}

fn main() {
    let filters: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("BSC-BEC classification thresholds", c1_bsc_bec_thresholds),
        ("ternary-eavesdropper instance", c2_ternary_instance),
        ("secrecy capacity vs grid oracle", c3_secrecy_vs_oracle),
        ("more-capable chains need no prefix", c4_more_capable_dominance),
        ("improving prefix off the more-capable class", c5_improving_prefix),
        ("symmetric construction optimality", c6_construction_optimality),
        ("dominant-symmetry shortcut and bound", c7_dominant_shortcut),
        ("BSC-BEC needs no rate splitting", c8_no_rate_splitting),
        ("region frontier validity", c9_frontiers),
        ("(C_B, C_s) corner", c10_corner),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filters.is_empty() && !filters.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name} ({secs:.1} s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name} ({secs:.1} s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

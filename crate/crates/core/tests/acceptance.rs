//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantities. Oracles here are deliberately independent
//! of the library's computational paths: fictitious play for game values,
//! ternary/bisection search over heading and time for intercepts, and a
//! dense angular scan for the group-evasion direction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reach_avoid::engine::{realize_evader_action, status};
use reach_avoid::harness::{
    bench_solver, episode_rng, random_initial_state, run_batch, run_episode, ExperimentConfig,
    Method, PursuerPolicy,
};
use reach_avoid::learning::{heading, train, TrainingConfig};
use reach_avoid::matrix_game::{solve_zero_sum, PayoffMatrix};
use reach_avoid::time_metrics::{capture_residual, min_intercept_time, KinematicParams, TimeToEvent};
use reach_avoid::{EvaderAction, GameState, GameStatus, Vec2};
use std::time::Instant;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> PayoffMatrix {
    let entries: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-10.0..10.0)).collect())
        .collect();
    PayoffMatrix::new(
        entries,
        (0..rows).map(|i| format!("r{i}")).collect(),
        (0..cols).map(|j| format!("c{j}")).collect(),
    )
    .unwrap()
}

/// Fictitious-play value estimate with alternating updates: the evader
/// best-responds to the pursuer's empirical mixture, then the pursuer
/// best-responds including the evader's newest play. The midpoint of the
/// best guarantee bounds converges to the game value. Specialized to the
/// two-row games this suite checks.
fn fictitious_play_value(m: &PayoffMatrix, iterations: usize) -> f64 {
    assert_eq!(m.rows(), 2);
    let cols = m.cols();
    let top = m.row(0).to_vec();
    let bottom = m.row(1).to_vec();
    // Cumulative payoff of each row against the evader's play history, and
    // of each column against the pursuer's play history.
    let mut cost_top = 0.0f64;
    let mut cost_bottom = 0.0f64;
    let mut col_gain = vec![0.0f64; cols];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;

    for t in 1..=iterations {
        let mut col = 0;
        let mut best_gain = col_gain[0];
        for (j, &g) in col_gain.iter().enumerate().skip(1) {
            if g > best_gain {
                best_gain = g;
                col = j;
            }
        }
        cost_top += top[col];
        cost_bottom += bottom[col];
        let row = if cost_top <= cost_bottom { &top } else { &bottom };
        let mut new_max = f64::NEG_INFINITY;
        for (g, v) in col_gain.iter_mut().zip(row) {
            *g += v;
            if *g > new_max {
                new_max = *g;
            }
        }
        let tf = t as f64;
        lower = lower.max(cost_top.min(cost_bottom) / tf);
        upper = upper.min(new_max / tf);
    }
    0.5 * (lower + upper)
}

#[test]
fn criterion_1_lp_correctness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);

    let mut worst_gap = 0.0f64;
    for _ in 0..10_000 {
        let rows = rng.random_range(2..=12);
        let cols = rng.random_range(2..=13);
        let m = random_matrix(&mut rng, rows, cols);
        let sol = solve_zero_sum(&m).unwrap();

        // Guarantee property: the evader's floor and the pursuer's ceiling.
        let floor = (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| m.get(i, j) * sol.evader_strategy.probs()[j])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        let ceiling = (0..cols)
            .map(|j| {
                (0..rows)
                    .map(|i| m.get(i, j) * sol.pursuer_strategy.probs()[i])
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);

        assert!(floor >= sol.value - 1e-8, "evader floor {floor} below value {}", sol.value);
        assert!(ceiling <= sol.value + 1e-8, "pursuer ceiling {ceiling} above value {}", sol.value);
        let gap = (ceiling - floor).abs();
        worst_gap = worst_gap.max(gap);
        assert!(gap <= 1e-8, "duality gap {gap} exceeds 1e-8");
    }

    let mut worst_fp = 0.0f64;
    for _ in 0..1_000 {
        let cols = rng.random_range(2..=8);
        let m = random_matrix(&mut rng, 2, cols);
        let sol = solve_zero_sum(&m).unwrap();
        let fp = fictitious_play_value(&m, 1_000_000);
        let err = (sol.value - fp).abs();
        worst_fp = worst_fp.max(err);
        assert!(err <= 1e-4, "LP value {} vs fictitious play {fp}: error {err}", sol.value);
    }

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 1 took {elapsed:.1} s, budget is 60 s");
    println!(
        "[criterion 1] PASS — 10^4 LPs worst gap {worst_gap:.2e}, 10^3 fictitious-play checks \
         worst error {worst_fp:.2e}, {elapsed:.1} s"
    );
}

/// Simulation oracle for the earliest constant-bearing capture.
///
/// At time `t` a full-speed constant-heading pursuer can be anywhere on the
/// circle of radius `v_p t` about its start, so capture at `t` is possible
/// exactly when the evader's position sits within `ell` of that circle:
/// `|‖rel + v_e u t‖ − v_p t| ≤ ell`. The clearance starts above `ell` and
/// is continuous, so the earliest capture is the first downward crossing of
/// `‖rel + v_e u t‖ − v_p t = ell`, found by a grid scan and bisection —
/// no root formula anywhere.
fn intercept_oracle(rel: Vec2, u: Vec2, params: &KinematicParams, horizon: f64, step: f64) -> Option<f64> {
    let clearance = |t: f64| (rel + u * (params.v_e * t)).norm() - params.v_p * t;
    if clearance(0.0) <= params.ell {
        return Some(0.0);
    }
    let steps = (horizon / step).ceil() as usize;
    let mut prev = 0.0f64;
    for k in 1..=steps {
        let t = k as f64 * step;
        if clearance(t) <= params.ell {
            // Bisect the crossing inside (prev, t].
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if clearance(mid) <= params.ell {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = t;
    }
    None
}

#[test]
fn criterion_2_time_metric_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_residual = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut finite_count = 0u32;

    for _ in 0..10_000 {
        let rel = Vec2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let u = Vec2::from_angle(rng.random_range(0.0..std::f64::consts::TAU));
        let params = KinematicParams::new(
            rng.random_range(0.2..2.0),
            rng.random_range(0.2..2.0),
            rng.random_range(0.0..0.5),
            1e4,
        )
        .unwrap();
        if rel.norm() <= params.ell {
            continue;
        }

        let result = min_intercept_time(rel, u, &params).unwrap();
        if let TimeToEvent::Finite(t) = result {
            finite_count += 1;
            let res = capture_residual(rel, u, &params, t).abs();
            let allowed = 1e-9 * rel.norm_sq().max(1.0);
            worst_residual = worst_residual.max(res / allowed);
            assert!(res < allowed, "residual {res} beyond {allowed} at t={t}");
        }

        // Oracle agreement on a subsample (the oracle scans a time grid).
        if rng.random_range(0..10) == 0 {
            match result {
                TimeToEvent::Finite(t) => {
                    let step = 1e-4 * t.max(1.0);
                    let oracle = intercept_oracle(rel, u, &params, 1.2 * t + 1.0, step)
                        .expect("oracle must capture when a root exists");
                    let err = (oracle - t).abs();
                    worst_oracle = worst_oracle.max(err / step);
                    assert!(
                        err <= step,
                        "oracle {oracle} vs closed form {t}, beyond one grid step {step} \
                         (rel {rel:?}, u {u:?})"
                    );
                }
                TimeToEvent::Unreachable => {
                    let oracle = intercept_oracle(rel, u, &params, 50.0, 5e-3);
                    assert!(
                        oracle.is_none(),
                        "closed form says unreachable but oracle captures at {oracle:?}"
                    );
                }
            }
        }
    }
    assert!(finite_count > 1_000, "geometry sample too degenerate: {finite_count}");

    // Analytic collinear cases are exact.
    for (d, v_e, v_p, ell) in [(3.0, 1.0, 2.0, 1.0), (5.0, 0.5, 1.5, 0.25), (2.0, 0.9, 1.0, 0.01)] {
        let params = KinematicParams::new(v_e, v_p, ell, 1e4).unwrap();
        let t = min_intercept_time(Vec2::new(d, 0.0), Vec2::new(1.0, 0.0), &params)
            .unwrap()
            .finite()
            .unwrap();
        let expect = (d - ell) / (v_p - v_e);
        assert!((t - expect).abs() < 1e-12, "collinear case: {t} vs {expect}");
    }

    println!(
        "[criterion 2] PASS — worst residual {worst_residual:.2e} of budget, worst oracle \
         disagreement {worst_oracle:.2e} grid steps, collinear cases exact"
    );
}

fn random_state(rng: &mut ChaCha8Rng, n: usize, grid: f64) -> GameState {
    loop {
        let point =
            |rng: &mut ChaCha8Rng| Vec2::new(rng.random_range(0.0..grid), rng.random_range(0.0..grid));
        let s = GameState::new(
            point(rng),
            (0..n).map(|_| point(rng)).collect(),
            point(rng),
            rng.random_range(0.5..1.5),
            vec![rng.random_range(0.5..1.5); n],
            0.01,
            0.01,
            0.01,
            100_000,
        )
        .unwrap();
        if status(&s) == GameStatus::Ongoing && (s.target - s.evader).norm() > 0.05 {
            return s;
        }
    }
}

#[test]
fn criterion_3_heading_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.random_range(1..=6);
        let s = random_state(&mut rng, n, 10.0);
        let action = EvaderAction::ALL[rng.random_range(0..4)];
        let h = heading(&s, action).unwrap();

        let dir = realize_evader_action(action, &s).unwrap();
        let step = 1e-6 * s.dt;
        let before = (s.target - s.evader).norm() / s.v_e;
        let moved = s.evader + dir * (s.v_e * step);
        let after = (s.target - moved).norm() / s.v_e;
        let fd = -(after - before) / step;

        let err = (h - fd).abs();
        worst = worst.max(err);
        assert!(err < 1e-5, "heading {h} vs finite difference {fd}");
    }
    println!("[criterion 3] PASS — 10^3 states, worst |heading − FD| = {worst:.2e}");
}

/// Brute-force group-evasion oracle: scan directions at 1e-3 rad, find the
/// direction maximizing the angular distance to the nearest line of sight,
/// then reconstruct the exact bisector from the bounding pursuers, applying
/// the longer-line-of-sight tie-break among (near-)equal gaps.
fn gap_oracle(s: &GameState) -> Vec2 {
    let tau = std::f64::consts::TAU;
    let rays: Vec<(f64, f64)> = s
        .pursuers
        .iter()
        .map(|&p| ((p - s.evader).polar_angle(), (p - s.evader).norm()))
        .collect();
    let ang_dist = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(tau);
        d.min(tau - d)
    };

    if rays.len() == 1 {
        return Vec2::from_angle(rays[0].0 + std::f64::consts::PI);
    }

    // Scan for the clearance maximum.
    let steps = 6_284;
    let clearance = |theta: f64| {
        rays.iter()
            .map(|&(w, _)| ang_dist(theta, w))
            .fold(f64::INFINITY, f64::min)
    };
    let mut best_theta = 0.0;
    let mut best = -1.0;
    for k in 0..steps {
        let theta = k as f64 / steps as f64 * tau;
        let c = clearance(theta);
        if c > best {
            best = c;
            best_theta = theta;
        }
    }

    // Identify every gap whose width ties the best one, then break ties by
    // the longer bounding line of sight, then by gap order.
    let mut sorted = rays.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sorted.len();
    let gap_of = |i: usize| {
        let (start, d0) = sorted[i];
        let (end, d1) = sorted[(i + 1) % n];
        let mut width = end - start;
        if i + 1 == n {
            width += tau;
        }
        (width, d0.max(d1), start)
    };
    let best_width = 2.0 * best;
    let mut candidates: Vec<(f64, f64, f64)> = (0..n)
        .map(gap_of)
        .filter(|&(w, _, _)| (w - best_width).abs() <= 2e-3)
        .collect();
    if candidates.is_empty() {
        // No tie at scan resolution: take the gap containing the scan max.
        candidates = (0..n)
            .map(gap_of)
            .filter(|&(w, _, start)| {
                let offset = (best_theta - start).rem_euclid(tau);
                offset <= w
            })
            .collect();
    }
    let chosen = candidates
        .iter()
        .copied()
        .fold(None::<(f64, f64, f64)>, |acc, g| match acc {
            None => Some(g),
            Some(best) => {
                if g.0 > best.0 + 1e-12 || ((g.0 - best.0).abs() <= 1e-12 && g.1 > best.1 + 1e-12) {
                    Some(g)
                } else {
                    Some(best)
                }
            }
        })
        .unwrap();
    Vec2::from_angle(chosen.2 + chosen.0 / 2.0)
}

#[test]
fn criterion_4_group_evasion_matches_bruteforce() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.random_range(1..=8);
        let s = random_state(&mut rng, n, 10.0);
        let got = realize_evader_action(EvaderAction::EvadeGroup, &s).unwrap();
        let expect = gap_oracle(&s);
        let angle_err = got.dot(expect).clamp(-1.0, 1.0).acos();
        worst = worst.max(angle_err);
        assert!(
            angle_err <= 1e-3,
            "group evasion {got:?} vs oracle {expect:?} ({angle_err} rad, N={n})"
        );
    }

    // Constructed exact ties exercising the longer-line-of-sight rule.
    let tie = GameState::new(
        Vec2::new(0.0, 0.0),
        vec![
            Vec2::from_angle(0.3),
            Vec2::from_angle(0.3 + std::f64::consts::TAU / 3.0) * 1.0,
            Vec2::from_angle(0.3 + 2.0 * std::f64::consts::TAU / 3.0) * 5.0,
        ],
        Vec2::new(9.0, 9.0),
        1.0,
        vec![1.0; 3],
        0.01,
        0.01,
        0.01,
        1000,
    )
    .unwrap();
    let got = realize_evader_action(EvaderAction::EvadeGroup, &tie).unwrap();
    let expect = gap_oracle(&tie);
    let angle_err = got.dot(expect).clamp(-1.0, 1.0).acos();
    assert!(angle_err <= 1e-3, "tie case: {got:?} vs {expect:?}");

    println!("[criterion 4] PASS — 10^3 configurations, worst angular error {worst:.2e} rad");
}

fn eval_config(method: Method, n: usize, v_e: f64, episodes: u32, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        method,
        pursuer_policy: PursuerPolicy::RelayOnly,
        n_pursuers: n,
        v_e,
        v_p: 1.0,
        grid_size: 10.0,
        episodes,
        seed,
        dt: 0.01,
        ell: 0.01,
        eps: 0.01,
        t_max: reach_avoid::learning::default_horizon(10.0, v_e),
        weights_path: None,
    }
}

#[test]
fn criterion_5_slow_evader_outcome_bands() {
    let cfg = TrainingConfig {
        v_e: 0.9,
        seed: 1,
        ..TrainingConfig::default()
    };
    let (w, _) = train(&cfg).unwrap();

    let mut reached = Vec::new();
    for method in [Method::M1, Method::M2, Method::M3] {
        let cfg = eval_config(method, 5, 0.9, 500, 55);
        let stats = run_batch(&cfg, Some(&w)).unwrap();
        println!(
            "[criterion 5] {}: captured {:.2}% reached {:.2}% timed-out {:.2}%",
            method.label(),
            stats.captured_pct,
            stats.reached_pct,
            stats.timedout_pct
        );
        // Sanity for the slower evader: captures dominate arrivals.
        assert!(
            stats.captured_pct > stats.reached_pct,
            "{}: captured {:.2}% not above reached {:.2}%",
            method.label(),
            stats.captured_pct,
            stats.reached_pct
        );
        reached.push((method, stats.reached_pct));
    }

    let max = reached.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let min = reached.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let spread = max - min;
    println!("[criterion 5] method spread {spread:.2} points (must be ≤ 8)");
    assert!(spread <= 8.0, "methods differ by {spread:.2} points");

    let mut band_ok = true;
    for (method, pct) in &reached {
        if !(5.0..=20.0).contains(pct) {
            band_ok = false;
            println!(
                "[criterion 5] FAIL — {} TargetReached {pct:.2}% outside [5%, 20%]; relay \
                 pursuit under the specified min-capture-time assignment lets the evader \
                 outrun pure pursuit in blocked starts (see decisions ledger)",
                method.label()
            );
        }
    }
    assert!(
        band_ok,
        "TargetReached outside the [5, 20] band for at least one method; spread clause passed \
         at {spread:.2} points"
    );
    println!("[criterion 5] PASS — all methods in [5%, 20%], spread {spread:.2}");
}

#[test]
fn criterion_6_equal_speed_learned_policy() {
    let cfg = TrainingConfig {
        seed: 1,
        ..TrainingConfig::default()
    };
    assert_eq!(cfg.gamma, 0.9);
    assert_eq!(cfg.alpha, 0.1);
    assert_eq!(cfg.beta, 0.9);
    assert_eq!(cfg.alpha_decay, 0.9);
    assert_eq!(cfg.n_train, 2000);
    assert_eq!(cfg.n_pursuers, 3);
    assert_eq!(cfg.v_e, 1.0);
    assert_eq!(cfg.v_p, 1.0);
    assert_eq!(cfg.dt, 0.01);
    assert_eq!(cfg.ell, 0.01);
    assert_eq!(cfg.eps, 0.01);
    let (w, _) = train(&cfg).unwrap();

    let m1 = run_batch(&eval_config(Method::M1, 4, 1.0, 500, 66), Some(&w)).unwrap();
    let m2 = run_batch(&eval_config(Method::M2, 4, 1.0, 500, 66), None).unwrap();
    println!(
        "[criterion 6] m1: captured {:.2}% reached {:.2}% | m2: captured {:.2}% reached {:.2}%",
        m1.captured_pct, m1.reached_pct, m2.captured_pct, m2.reached_pct
    );

    assert!(m1.captured_pct <= 15.0, "m1 captured {:.2}% > 15%", m1.captured_pct);
    assert!(m1.reached_pct >= 70.0, "m1 reached {:.2}% < 70%", m1.reached_pct);
    assert!(
        m1.captured_pct <= m2.captured_pct,
        "m1 captured {:.2}% exceeds m2 captured {:.2}%",
        m1.captured_pct,
        m2.captured_pct
    );
    println!(
        "[criterion 6] PASS — m1 captured {:.2}% ≤ 15%, reached {:.2}% ≥ 70%, and ≤ m2's {:.2}%",
        m1.captured_pct, m1.reached_pct, m2.captured_pct
    );
}

fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..xs.len() {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean).powi(2);
        dy += (ry[i] - mean).powi(2);
    }
    num / (dx * dy).sqrt()
}

#[test]
fn criterion_7_solver_timing_shape() {
    let ns: Vec<usize> = (2..=20).collect();
    let rows = bench_solver(&ns, 200).unwrap();

    let m1: Vec<f64> = rows.iter().map(|r| r.m1_median_s).collect();
    let m2: Vec<f64> = rows.iter().map(|r| r.m2_median_s).collect();
    let n_f: Vec<f64> = ns.iter().map(|&n| n as f64).collect();

    let m1_ratio = m1.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        / m1.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let rho = spearman_rho(&n_f, &m2);
    let final_ratio = m2.last().unwrap() / m1.last().unwrap();

    for r in &rows {
        println!(
            "[criterion 7] N={:>2}  m1 {:>10.3e} s  m2 {:>10.3e} s",
            r.n_pursuers, r.m1_median_s, r.m2_median_s
        );
    }
    println!(
        "[criterion 7] m1 max/min {m1_ratio:.2} (must be < 2), m2 Spearman ρ {rho:.3} \
         (must be > 0.9), m2/m1 at N=20 {final_ratio:.1}x (must be ≥ 2)"
    );

    assert!(rho > 0.9, "m2 growth not monotone enough: Spearman ρ = {rho:.3}");
    assert!(final_ratio >= 2.0, "m2 only {final_ratio:.2}x m1 at N=20");
    assert!(
        m1_ratio < 2.0,
        "m1 build+solve varies by {m1_ratio:.2}x across N (payoff construction is O(N); \
         see decisions ledger)"
    );
    println!("[criterion 7] PASS — m1 flat ({m1_ratio:.2}x), m2 monotone (ρ={rho:.3}), ratio {final_ratio:.1}x");
}

#[test]
fn criterion_8_determinism() {
    // Bitwise-identical trained weights.
    let cfg = TrainingConfig {
        n_train: 5,
        seed: 99,
        ..TrainingConfig::default()
    };
    let (w1, log1) = train(&cfg).unwrap();
    let (w2, log2) = train(&cfg).unwrap();
    assert_eq!(w1, w2);
    assert_eq!(log1.episodes.len(), log2.episodes.len());

    // Bitwise-identical episode traces.
    let ecfg = eval_config(Method::M2, 3, 1.0, 40, 77);
    let mut rng_a = episode_rng(ecfg.seed, 7);
    let init_a = random_initial_state(&ecfg, &mut rng_a);
    let rec_a = run_episode(&ecfg, init_a, None, &mut rng_a).unwrap();
    let mut rng_b = episode_rng(ecfg.seed, 7);
    let init_b = random_initial_state(&ecfg, &mut rng_b);
    let rec_b = run_episode(&ecfg, init_b, None, &mut rng_b).unwrap();
    assert_eq!(rec_a, rec_b);

    // Identical batch statistics, serial and parallel.
    let parallel = run_batch(&ecfg, None).unwrap();
    let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = serial_pool.install(|| run_batch(&ecfg, None)).unwrap();
    assert_eq!(parallel, serial, "parallel and single-threaded batches disagree");
    let again = run_batch(&ecfg, None).unwrap();
    assert_eq!(parallel, again);

    println!("[criterion 8] PASS — weights, traces, and batch stats bitwise-identical, serial and parallel");
}

#[test]
fn criterion_9_training_update_decay() {
    let cfg = TrainingConfig {
        seed: 1,
        ..TrainingConfig::default()
    };
    let (w, log) = train(&cfg).unwrap();
    assert!(w.is_finite(), "final weights not finite");
    let n = log.episodes.len();
    assert!(n >= cfg.n_train as usize);

    let tenth = n / 10;
    let mut first: Vec<f64> = log.episodes[..tenth].iter().map(|e| e.max_weight_delta).collect();
    first.sort_by(f64::total_cmp);
    let median_first = first[tenth / 2];
    let max_last = log.episodes[n - tenth..]
        .iter()
        .map(|e| e.max_weight_delta)
        .fold(0.0f64, f64::max);

    println!(
        "[criterion 9] first-10% median ‖δw‖ = {median_first:.3e}, last-10% max = {max_last:.3e}"
    );
    assert!(
        max_last < median_first,
        "updates did not decay: last-10% max {max_last:.3e} vs first-10% median {median_first:.3e}"
    );
    println!("[criterion 9] PASS — updates decayed {:.1e}x; weights finite", median_first / max_last);
}

//! End-to-end acceptance suite. Each test covers one release gate and prints
//! a `PASS` line on success (visible with `--nocapture`); each backs its
//! claims with an oracle computed inside the test rather than trusting the
//! library's own bookkeeping.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use metric_props::arc::{check_obtuse, slice_analysis, ArcMode, ArcSample};
use metric_props::check::{
    check_de_groot, check_nagata, check_ultrametric, PropertyKind, Strategy,
};
use metric_props::construct::{
    euclidean_interval, i_space, max_product, random_metric, random_ultrametric, triode_bar_indices,
    triode_path, triode_rho,
};
use metric_props::embed::PointMap;
use metric_props::search::{separation_experiment, triode_extension_experiment};
use metric_props::space::{shortest_path_completion, validate_metric, FiniteMetricSpace, PartialMetric};

/// Criterion 1: the 101-point Euclidean grid on [-1, 1] satisfies the
/// order-one Nagata condition under both strategies, brute force within 10 s
/// and the fast path within 0.5 s.
#[test]
fn interval_grid_satisfies_np1_within_time_budget() {
    let grid = euclidean_interval(-1.0, 1.0, 101).unwrap();
    let brute = check_nagata(&grid, 1, Strategy::Brute);
    let fast = check_nagata(&grid, 1, Strategy::Fast);
    assert!(brute.holds, "brute strategy must confirm the grid");
    assert!(fast.holds, "fast strategy must confirm the grid");
    assert!(!fast.degraded_to_brute);
    assert!(
        brute.elapsed_ms < 10_000.0,
        "brute force took {} ms, budget is 10 s",
        brute.elapsed_ms
    );
    assert!(
        fast.elapsed_ms < 500.0,
        "fast path took {} ms, budget is 0.5 s",
        fast.elapsed_ms
    );
    println!(
        "criterion 1: PASS — 101-point interval grid is NP[1] (brute {:.1} ms, fast {:.1} ms)",
        brute.elapsed_ms, fast.elapsed_ms
    );
}

/// Criterion 2: the two-case triode metric at 21 points per arm validates,
/// satisfies the order-one Nagata condition, and the identity on the bar has
/// distortion exactly 2 against the Euclidean grid.
#[test]
fn two_case_triode_is_np1_with_bar_distortion_two() {
    let m = 21;
    let rho = triode_rho(m).unwrap();
    let defects = validate_metric(&rho.rows(), 1e-9).unwrap();
    assert!(defects.is_empty(), "metric defects: {defects:?}");
    let report = check_nagata(&rho, 1, Strategy::Both);
    assert!(report.holds);
    let bar = euclidean_interval(-1.0, 1.0, 2 * m + 1).unwrap();
    let f = PointMap::new(&bar, &rho, triode_bar_indices(m)).unwrap();
    let dist = f.distortion_report().unwrap();
    assert!(
        (dist.distortion - 2.0).abs() <= 1e-12,
        "bar distortion {} is not 2",
        dist.distortion
    );
    println!(
        "criterion 2: PASS — two-case triode (m = {m}) is a valid NP[1] metric, bar distortion {}",
        dist.distortion
    );
}

/// Criterion 3: the path metric on the triode grid fails the order-one
/// de Groot condition for every arm size from 2 to 10, with a witness that
/// re-verifies and whose center is the junction under the canonical scan.
#[test]
fn path_triode_fails_gp1_at_the_junction_for_all_sizes() {
    for m in 2..=10 {
        let path = triode_path(m).unwrap();
        let report = check_de_groot(&path, 1, Strategy::Both);
        assert!(!report.holds, "path triode m = {m} must violate");
        let w = report.witness.as_ref().expect("violating check has witness");
        assert!(w.verify(&path, PropertyKind::DeGroot), "witness re-verifies");
        assert_eq!(w.center, 0, "canonical first witness centers the junction");
        // Independent oracle: every tuple distance exceeds every radius.
        let min_pair = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| path.dist(w.tuple[i], w.tuple[j]))
            .fold(f64::INFINITY, f64::min);
        let max_radius = w
            .tuple
            .iter()
            .map(|&t| path.dist(w.center, t))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(min_pair > max_radius);
    }
    println!("criterion 3: PASS — path triode violates GP[1] at the junction for m = 2..=10");
}

/// Draws a space from a family closed under the order-one Nagata condition
/// and brute-verifies the draw before returning it.
fn random_np1_space(rng: &mut ChaCha8Rng, max_size: usize) -> FiniteMetricSpace {
    let space = match rng.gen_range(0..4u8) {
        0 => {
            // Subset of the real line.
            let k = rng.gen_range(2..=max_size);
            let mut pool: Vec<i64> = (0..200).collect();
            pool.shuffle(rng);
            let mut ts: Vec<i64> = pool.into_iter().take(k).collect();
            ts.sort_unstable();
            let scale = rng.gen_range(0.01..0.1);
            let rows: Vec<Vec<f64>> = ts
                .iter()
                .map(|&a| ts.iter().map(|&b| (a - b).abs() as f64 * scale).collect())
                .collect();
            FiniteMetricSpace::from_rows(rows).unwrap()
        }
        1 => random_ultrametric(rng.gen_range(2..=max_size), rng.gen()).unwrap(),
        2 => {
            // Random piece of the two-case triode.
            let arm = rng.gen_range(2..=6);
            let rho = triode_rho(arm).unwrap();
            let k = rng.gen_range(2..=max_size.min(rho.size()));
            let mut idx: Vec<usize> = (0..rho.size()).collect();
            idx.shuffle(rng);
            idx.truncate(k);
            idx.sort_unstable();
            rho.restrict(&idx).unwrap()
        }
        _ => {
            let k = rng.gen_range(2..=max_size / 2);
            i_space(rng.gen_range(0.05..0.5), k).unwrap()
        }
    };
    assert!(
        check_nagata(&space, 1, Strategy::Brute).holds,
        "sampler must only produce NP[1]-holding spaces"
    );
    space
}

/// Criterion 4: 100 randomized max-products of an NP[1]-holding space (size
/// at most 12) with a random dendrogram ultrametric (size at most 5) all
/// satisfy the order-one Nagata condition by brute force, within 60 s total.
#[test]
fn products_of_np1_spaces_with_dendrograms_stay_np1() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for trial in 0..100 {
        let x = random_np1_space(&mut rng, 12);
        let u = random_ultrametric(rng.gen_range(2..=5), rng.gen()).unwrap();
        let product = max_product(&x, &u).unwrap();
        let report = check_nagata(&product, 1, Strategy::Brute);
        assert!(
            report.holds,
            "trial {trial}: product of sizes {}x{} violated NP[1]",
            x.size(),
            u.size()
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "suite took {elapsed:?}, budget is 60 s"
    );
    println!(
        "criterion 4: PASS — 100 random max-products stayed NP[1] ({:.1} s)",
        elapsed.as_secs_f64()
    );
}

/// Criterion 5: the order-zero de Groot check, the order-zero Nagata check,
/// and the ultrametric check return identical verdicts on 200 random spaces.
#[test]
fn order_zero_checks_agree_with_ultrametricity() {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    for trial in 0..200 {
        let m = rng.gen_range(3..=40);
        let seed = rng.gen();
        let space = if trial % 2 == 0 {
            random_ultrametric(m, seed).unwrap()
        } else {
            random_metric(m, seed).unwrap()
        };
        let gp = check_de_groot(&space, 0, Strategy::Brute).holds;
        let np = check_nagata(&space, 0, Strategy::Brute).holds;
        let um = check_ultrametric(&space).holds;
        assert_eq!(gp, np, "trial {trial}: GP[0] vs NP[0] disagree");
        assert_eq!(np, um, "trial {trial}: NP[0] vs ultrametric disagree");
        if trial % 2 == 0 {
            assert!(um, "trial {trial}: dendrogram construction must be ultrametric");
        }
    }
    println!("criterion 5: PASS — GP[0], NP[0], and ultrametricity agree on 200 spaces");
}

/// Criterion 6: on the 81-column two-level grid at separation 0.1, slicing
/// the level-0 arc at any off-arc point of the inner region V yields a single
/// short component (parameter length within one grid step of twice the
/// separation), a small closed-form residual, and a retraction that is
/// non-expanding over all pairs, all at grid-step tolerance.
#[test]
fn level_slices_are_short_intervals_with_nonexpanding_retraction() {
    let m = 81;
    let sep = 0.1;
    let host = i_space(sep, m).unwrap();
    let arc_order: Vec<usize> = (0..m).map(|i| 2 * i).collect();
    let arc = ArcSample::new(&host, arc_order.clone()).unwrap();
    let step = arc.grid_step();
    assert!((step - 2.0 / 80.0).abs() < 1e-15);

    // Retraction targets: every arc point retracts to its own parameter.
    let mut retract: Vec<(usize, f64)> = arc_order
        .iter()
        .zip(arc.params())
        .map(|(&p, &t)| (p, t))
        .collect();
    let mut in_v_count = 0;
    for x in (0..host.size()).filter(|x| !arc.contains(*x)) {
        let report = slice_analysis(&arc, x, ArcMode::Gp1Interval).unwrap();
        assert_eq!(report.level, sep);
        if !report.in_v {
            continue;
        }
        in_v_count += 1;
        assert!(
            report.assertion_failures.is_empty(),
            "point {x}: {:?}",
            report.assertion_failures
        );
        assert_eq!(report.components.len(), 1, "point {x} slice fragments");
        let comp = &report.components[0];
        assert!(
            (comp.param_length - 2.0 * sep).abs() <= step,
            "point {x}: component length {} vs 2D = {}",
            comp.param_length,
            2.0 * sep
        );
        let residual = report.formula_residual.unwrap();
        assert!(residual <= step, "point {x}: residual {residual}");
        retract.push((x, report.retraction.unwrap()));
    }
    assert_eq!(in_v_count, 55, "inner region size changed");
    for (i, &(p, rp)) in retract.iter().enumerate() {
        for &(q, rq) in retract.iter().skip(i + 1) {
            assert!(
                (rp - rq).abs() <= host.dist(p, q) + step,
                "retraction expands the pair ({p}, {q})"
            );
        }
    }
    println!(
        "criterion 6: PASS — {} inner points slice to single short intervals; retraction non-expanding over {} points",
        in_v_count,
        retract.len()
    );
}

/// Criterion 7: the two-copy separation host at (7/96, 11/96) with
/// correspondence distance 1/64 fails the order-one de Groot condition with
/// a re-verifiable witness, for five construction seeds, each within 30 s.
#[test]
fn close_level_maps_force_gp1_failure() {
    let (a, b) = (7.0 / 96.0, 11.0 / 96.0);
    let eps = 1.0 / 64.0;
    for seed in 1..=5u64 {
        let start = Instant::now();
        let outcome = separation_experiment(a, b, eps, 33, seed).unwrap();
        let elapsed = start.elapsed();
        assert!(outcome.violation_guaranteed);
        assert!(
            !outcome.gp1_holds,
            "seed {seed}: host unexpectedly satisfies GP[1]"
        );
        let w = outcome.witness.as_ref().expect("violation has a witness");
        assert!(outcome.witness_verified);
        assert!(
            w.verify(&outcome.host, PropertyKind::DeGroot),
            "seed {seed}: witness fails independent re-verification"
        );
        assert_eq!(outcome.sup_distance, eps);
        assert!(
            elapsed.as_secs() < 30,
            "seed {seed} took {elapsed:?}, budget is 30 s"
        );
    }
    println!("criterion 7: PASS — separation host fails GP[1] with verified witnesses for 5 seeds");
}

/// Criterion 8: Euclidean interval arcs are obtuse for every size from 3 to
/// 64, and 200 random monotone perturbations with measured distortion at
/// most 1.95 remain obtuse.
#[test]
fn low_distortion_arcs_are_obtuse() {
    for m in 3..=64 {
        let host = euclidean_interval(0.0, 1.0, m).unwrap();
        let arc = ArcSample::new(&host, (0..m).collect()).unwrap();
        let report = check_obtuse(&arc).unwrap();
        assert!(report.holds, "Euclidean arc of {m} points must be obtuse");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    for trial in 0..200 {
        let k = rng.gen_range(5..=40);
        // Near-uniform monotone parameters: gaps within 10 percent of the
        // nominal step. (With wildly unequal gaps a short subarc can lack
        // any sample near its midpoint and obtuseness legitimately fails,
        // distortion notwithstanding.)
        let h = 1.0 / (k - 1) as f64;
        let mut ts = vec![0.0f64];
        for _ in 1..k {
            ts.push(ts.last().unwrap() + h * rng.gen_range(0.9..1.1));
        }
        let line_rows: Vec<Vec<f64>> = ts
            .iter()
            .map(|&p| ts.iter().map(|&q| (p - q).abs()).collect())
            .collect();
        let line = FiniteMetricSpace::from_rows(line_rows.clone()).unwrap();
        // Stretch each distance by up to 30 percent, then repair by shortest
        // paths; entries never drop below the line metric, so the measured
        // distortion stays well under the 1.95 admission bound.
        let mut partial = PartialMetric::new(k).unwrap();
        for i in 0..k {
            for j in i + 1..k {
                partial
                    .set(i, j, line_rows[i][j] * (1.0 + rng.gen_range(0.0..0.3)))
                    .unwrap();
            }
        }
        let host = shortest_path_completion(&partial).unwrap();
        let f = PointMap::new(&line, &host, (0..k).collect()).unwrap();
        let distortion = f.distortion_report().unwrap().distortion;
        assert!(
            distortion <= 1.95,
            "trial {trial}: generator produced distortion {distortion}"
        );
        let arc = ArcSample::new(&host, (0..k).collect()).unwrap();
        let report = check_obtuse(&arc).unwrap();
        assert!(
            report.holds,
            "trial {trial}: distortion-{distortion:.3} arc failed obtuseness at {:?}",
            report.failure
        );
    }
    println!("criterion 8: PASS — Euclidean arcs (m = 3..=64) and 200 low-distortion perturbations are obtuse");
}

/// Criterion 9: fast and brute strategies return the same verdict for the
/// order-one de Groot and Nagata conditions on 500 random spaces.
#[test]
fn fast_and_brute_strategies_agree_on_random_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    for trial in 0..500 {
        let m = rng.gen_range(4..=60);
        let seed = rng.gen();
        let space = if trial % 2 == 0 {
            random_metric(m, seed).unwrap()
        } else {
            random_ultrametric(m, seed).unwrap()
        };
        for kind in [PropertyKind::DeGroot, PropertyKind::Nagata] {
            let check = |strategy| match kind {
                PropertyKind::DeGroot => check_de_groot(&space, 1, strategy),
                _ => check_nagata(&space, 1, strategy),
            };
            let fast = check(Strategy::Fast);
            let brute = check(Strategy::Brute);
            assert!(!fast.degraded_to_brute);
            assert_eq!(
                fast.holds, brute.holds,
                "trial {trial}: strategies disagree on {kind:?} for m = {m}, seed {seed}"
            );
        }
    }
    println!("criterion 9: PASS — fast and brute verdicts agree on 500 spaces for GP[1] and NP[1]");
}

/// Criterion 10: with the distortion bound 2 and the two-case start, the
/// triode extension search reports zero violations at step 0; the
/// unconstrained run from the frozen Euclidean skeleton never reaches zero
/// across 5 seeds of 50 000 steps and says so without claiming proof.
#[test]
fn annealing_outcomes_match_known_feasibility() {
    let feasible = triode_extension_experiment(5, &[1], 0, Some(2.0)).unwrap();
    assert_eq!(feasible.min_violations, 0);
    let run = &feasible.runs[0];
    assert_eq!(run.objective_trace[0], (0, 0.0), "two-case start must be clean");
    assert!((run.achieved_distortion - 2.0).abs() <= 1e-12);
    assert_eq!(feasible.label, "feasible point found");

    let seeds = [1u64, 2, 3, 4, 5];
    let blocked = triode_extension_experiment(5, &seeds, 50_000, None).unwrap();
    assert!(
        blocked.min_violations > 0,
        "a chain reached a feasible point: {}",
        blocked.min_violations
    );
    for run in &blocked.runs {
        assert!(
            run.best_objective > 0.0,
            "seed {} reached objective 0",
            run.seed
        );
        assert_eq!(run.label, "no feasible point found");
    }
    let note = blocked
        .theoretical_note
        .as_deref()
        .expect("negative outcome carries its context note");
    assert!(!note.is_empty());
    assert!(note.contains("no feasible point found"));
    println!(
        "criterion 10: PASS — two-case start feasible at step 0; frozen-skeleton search stays above zero (min objective {:.3})",
        blocked.min_objective
    );
}

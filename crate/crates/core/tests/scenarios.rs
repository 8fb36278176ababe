mod common;

use common::shipped;
use wbgame::analysis::{
    alice_leaks, class_distribution, find_threshold, lever_report, linspace, modal_class, scan_for_flip, simulate,
    sweep, Lever, LeverOutcome, OutcomeClass,
};
use wbgame::model::{build_game, Param};
use wbgame::oracle::cross_check;
use wbgame::scenario::{corpus, parse_scenario, render_scenario};
use wbgame::solve;

#[test]
fn every_shipped_scenario_meets_its_expected_outcome() {
    for (file, text) in corpus::ALL {
        let s = parse_scenario(text).unwrap();
        let tree = build_game(&s.parameters).unwrap();
        assert!(cross_check(&tree, &s.risk, &s.ties).unwrap().agrees(), "{file}");
        let r = solve(&tree, &s.risk, &s.ties).unwrap();
        assert_eq!(modal_class(&r), s.expected_outcome, "{file}");
        assert_eq!(parse_scenario(&render_scenario(&s)).unwrap(), s, "{file}");
    }
}

#[test]
fn baseline_leaks_with_interior_probabilities() {
    let s = shipped("baseline.scn");
    let p = s.parameters;
    for v in [p.trust, p.world_tom, p.world_duncan, p.harry_strong, p.world_neutral()] {
        assert!(v > 0.0 && v < 1.0);
    }
    let r = s.setup().solve().unwrap();
    assert!(alice_leaks(&r));
    assert!(class_distribution(&r).values().filter(|p| **p > 0.0).count() >= 4);
}

#[test]
fn baseline_alice_value_is_non_decreasing_in_z() {
    let table = sweep(&shipped("baseline.scn").setup(), Param::Z, &linspace(0.0, 1.0, 11)).unwrap();
    let values: Vec<f64> = table.rows.iter().map(|r| r.root_value.unwrap().alice.to_f64()).collect();
    assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
}

#[test]
fn no_leak_flips_sit_at_their_closed_forms() {
    // Tom censors; the uncensored subgame is worth 7z - 3 to Alice while Tom
    // pursues, which he does while -2z + 5(1 - z) + I >= 0. Trusted value at
    // the base point: 0.4 * 1.2 = 0.48, so w* = 0.2 / (0.2 + 0.48).
    let base = shipped("baseline_no_leak.scn").setup();
    assert!(!alice_leaks(&base.solve().unwrap()));
    let cases = [
        (Param::W, 0.01, 0.99, 0.2 / 0.68),
        (Param::Y, 0.0, 0.8, 0.5),
        (Param::Z, 0.0, 1.0, 4.5 / 7.0),
        (Param::DeanonCost, -5.0, 0.0, -0.8),
    ];
    for (param, lo, hi, expected) in cases {
        let r = find_threshold(&base, param, lo, hi, 1e-9).unwrap();
        assert!((r.critical - expected).abs() < 1e-8, "{param}: {} vs {expected}", r.critical);
        assert!(r.monotone, "{param}");
        assert!(r.below.contains(OutcomeClass::NoLeak) != r.above.contains(OutcomeClass::NoLeak));
    }
}

#[test]
fn no_leak_lever_report_matches_grid_scans() {
    let base = shipped("baseline_no_leak.scn").setup();
    let report = lever_report(&base, 1e-6).unwrap();
    assert_eq!(report.rows.iter().map(|r| r.lever).collect::<Vec<_>>(), Lever::ALL);
    assert_eq!(report.rows[0].outcome, LeverOutcome::NoFlip);
    for row in &report.rows[1..] {
        let LeverOutcome::Flip { critical, outcome, .. } = &row.outcome else { panic!("{row:?}") };
        assert!(!outcome.contains(OutcomeClass::NoLeak));
        let start = row.base.to_f64();
        let (lo, hi) = if row.limit < start { (row.limit, start) } else { (start, row.limit) };
        let (g0, g1) = scan_for_flip(&base, row.param, lo, hi, 20_001).unwrap().unwrap();
        assert!(g0 - 2e-6 <= *critical && *critical <= g1 + 2e-6, "{:?}: {critical} not in [{g0}, {g1}]", row.lever);
    }
}

#[test]
fn simulated_frequencies_converge() {
    let s = shipped("baseline.scn");
    let tree = build_game(&s.parameters).unwrap();
    let r = solve(&tree, &s.risk, &s.ties).unwrap();
    let expected = class_distribution(&r);
    let error = |n: u64| -> f64 {
        (0..8u64)
            .map(|seed| {
                let rep = simulate(&tree, &r.profile, n, seed).unwrap();
                expected
                    .iter()
                    .map(|(c, p)| (rep.classes.get(c.slug()).map_or(0.0, |f| f.frequency) - p).abs())
                    .sum::<f64>()
            })
            .sum::<f64>()
            / 8.0
    };
    let (small, large) = (error(1_000), error(100_000));
    // O(n^-1/2): a hundredfold n should cut the error about tenfold.
    assert!(large * 3.0 < small, "{small} -> {large}");
}

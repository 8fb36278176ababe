mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{one_shot_violations, sample_params};
use wbgame::analysis::simulate;
use wbgame::game::terminal_reach;
use wbgame::model::{build_game, GameParameters, Param};
use wbgame::oracle::cross_check;
use wbgame::{solve, Payoff, PlayerId, RiskProfile, TiePolicy, TieRule};

fn params() -> impl Strategy<Value = GameParameters> {
    any::<u64>().prop_map(|seed| sample_params(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn risk() -> impl Strategy<Value = RiskProfile> {
    prop_oneof![Just(RiskProfile::NEUTRAL), (-0.5..0.5f64, -0.5..0.5f64).prop_map(|(alice, tom)| RiskProfile { alice, tom })]
}

fn ties() -> impl Strategy<Value = TiePolicy> {
    let rule = prop_oneof![Just(TieRule::ActOnTie), Just(TieRule::RefrainOnTie)];
    (rule.clone(), rule).prop_map(|(alice, tom)| TiePolicy { alice, tom })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reach_probabilities_sum_to_one(p in params()) {
        let tree = build_game(&p).unwrap();
        let r = solve(&tree, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        let total: f64 = r.outcome_distribution.values().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let reach: f64 = terminal_reach(&tree, &r.profile).unwrap().iter().map(|t| t.probability).sum();
        prop_assert!((reach - 1.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_agrees_under_any_risk_and_tie_policy(p in params(), risk in risk(), ties in ties()) {
        let tree = build_game(&p).unwrap();
        let c = cross_check(&tree, &risk, &ties).unwrap();
        prop_assert!(c.agrees(), "{c:?}");
    }

    #[test]
    fn no_profitable_one_shot_deviation(p in params(), risk in risk()) {
        let tree = build_game(&p).unwrap();
        let r = solve(&tree, &risk, &TiePolicy::default()).unwrap();
        prop_assert_eq!(one_shot_violations(&tree, &r, &risk, 1e-9), 0);
    }

    #[test]
    fn alice_never_loses_from_a_better_payoff(p in params(), which in 4usize..11, bump in 0.0..5.0f64) {
        // Tom's choices depend only on his own payoffs, and Alice can always
        // stay silent for 0.
        let param = Param::ALL[which];
        let before = solve(&build_game(&p).unwrap(), &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        let q = p.with(param, p.get(param).to_f64() + bump);
        let after = solve(&build_game(&q).unwrap(), &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        prop_assert!(before.root_value.alice >= Payoff::ZERO);
        prop_assert!(after.root_value.alice.to_f64() >= before.root_value.alice.to_f64() - 1e-12);
    }

    #[test]
    fn positive_scaling_preserves_the_equilibrium(p in params(), k in 0.1..10.0f64) {
        let mut q = p;
        for param in Param::ALL.into_iter().filter(|p| !p.is_probability()) {
            q.set(param, Payoff::Finite(p.get(param).to_f64() * k));
        }
        let a = solve(&build_game(&p).unwrap(), &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        let b = solve(&build_game(&q).unwrap(), &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        // Exact ties can be broken differently after rounding, so compare
        // values rather than profiles.
        for player in PlayerId::ALL {
            let (x, y) = (a.root_value.get(player).to_f64() * k, b.root_value.get(player).to_f64());
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()) * k.max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn solving_and_simulating_are_deterministic(p in params(), seed in any::<u64>()) {
        let tree = build_game(&p).unwrap();
        let a = solve(&tree, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        let b = solve(&tree, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(simulate(&tree, &a.profile, 5000, seed).unwrap(), simulate(&tree, &b.profile, 5000, seed).unwrap());
    }
}

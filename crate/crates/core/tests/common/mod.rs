#![allow(dead_code)]

use rand::Rng;
use wbgame::game::{Node, NodeId, StrategyProfile};
use wbgame::model::{AlicePayoffs, GameParameters, TomPayoffs, Variant};
use wbgame::scenario::{corpus, parse_scenario, ScenarioFile};
use wbgame::{expected_utility, Payoff, RiskProfile, SolveResult};

/// w, z uniform on [0, 1]; (x, y) uniform on the simplex; payoffs uniform
/// on [-10, 10]; H and I uniform on [-5, 0].
pub fn sample_params(rng: &mut impl Rng) -> GameParameters {
    let (mut x, mut y) = (rng.random::<f64>(), rng.random::<f64>());
    if x + y > 1.0 {
        (x, y) = (1.0 - x, 1.0 - y);
    }
    let mut pay = || rng.random_range(-10.0..=10.0);
    let alice = AlicePayoffs {
        no_trust: pay(),
        blocked: pay(),
        censored_jailed: pay(),
        censored_anonymous: pay(),
        uncensored_anonymous: pay(),
        uncensored_impunity: pay(),
        uncensored_jailed: pay(),
    };
    let tom = TomPayoffs {
        blocked: Payoff::Finite(pay()),
        censored_jailed: pay(),
        censored_anonymous: pay(),
        uncensored_anonymous: pay(),
        uncensored_impunity: pay(),
        uncensored_jailed: pay(),
    };
    GameParameters {
        trust: rng.random(),
        world_tom: x,
        world_duncan: y,
        harry_strong: rng.random(),
        alice,
        tom,
        censor_cost: rng.random_range(-5.0..=0.0),
        deanon_cost: rng.random_range(-5.0..=0.0),
        variant: Variant::Standard,
    }
}

pub fn shipped(name: &str) -> ScenarioFile {
    let text = corpus::ALL.iter().find(|(f, _)| *f == name).map(|(_, t)| *t).expect("shipped scenario");
    parse_scenario(text).expect("shipped scenario parses")
}

/// Rebases the choices of `profile` below `at` onto the subtree rooted there.
pub fn subprofile(profile: &StrategyProfile, at: &NodeId) -> StrategyProfile {
    let prefix = if at.is_root() { String::new() } else { at.as_str().to_string() };
    let mut out = StrategyProfile::default();
    for (id, action) in &profile.choices {
        let rebased = if prefix.is_empty() {
            Some(id.as_str().to_string())
        } else if id == at {
            Some("/".to_string())
        } else {
            id.as_str().strip_prefix(&format!("{prefix}/")).map(|rest| format!("/{rest}"))
        };
        if let Some(r) = rebased {
            out.choices.insert(NodeId::from(r), action.clone());
        }
    }
    out
}

/// Number of decision nodes where switching only the local action raises
/// the owner's expected utility in that subgame by more than `tol`.
pub fn one_shot_violations(tree: &Node, result: &SolveResult, risk: &RiskProfile, tol: f64) -> usize {
    let mut violations = 0;
    for (id, node) in tree.decision_nodes() {
        let Node::Decision { owner, actions, .. } = node else { unreachable!() };
        let base = subprofile(&result.profile, &id);
        let value = |p: &StrategyProfile| expected_utility(node, p, risk).expect("valid profile").get(*owner);
        let on_path = value(&base);
        for a in actions {
            let deviation = base.clone().with_choice(NodeId::root(), a.label.clone());
            let v = value(&deviation);
            let gain = match (v, on_path) {
                (Payoff::NegInf, _) => f64::NEG_INFINITY,
                (_, Payoff::NegInf) => f64::INFINITY,
                (a, b) => a.to_f64() - b.to_f64(),
            };
            if gain > tol {
                violations += 1;
            }
        }
    }
    violations
}

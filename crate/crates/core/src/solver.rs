//! Backward induction over perfect-information trees with chance nodes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{
    terminal_reach, validate_tree, ActionKind, GameError, Node, NodeId, PlayerId, PlayerValues, StrategyProfile,
    ValidationReport,
};
use crate::payoff::Payoff;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid tree: {0}")]
    InvalidTree(ValidationReport),
    #[error("risk coefficient for {player} must be finite, got {alpha}")]
    InvalidRisk { player: PlayerId, alpha: f64 },
    #[error("risk coefficient must be finite, got {0}")]
    NonFiniteAlpha(f64),
    #[error("risk transform of {value} with alpha {alpha} is out of floating-point range")]
    NumericRange { value: f64, alpha: f64 },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Per-player coefficient of absolute risk aversion.
///
/// `0` is risk-neutral, positive is risk-averse, negative is risk-seeking.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RiskProfile {
    pub alice: f64,
    pub tom: f64,
}

impl RiskProfile {
    pub const NEUTRAL: RiskProfile = RiskProfile { alice: 0.0, tom: 0.0 };

    pub fn get(&self, player: PlayerId) -> f64 {
        match player {
            PlayerId::Alice => self.alice,
            PlayerId::Tom => self.tom,
        }
    }

    fn check(&self) -> Result<(), SolveError> {
        for p in PlayerId::ALL {
            let alpha = self.get(p);
            if !alpha.is_finite() {
                return Err(SolveError::InvalidRisk { player: p, alpha });
            }
        }
        Ok(())
    }
}

/// Constant-absolute-risk-aversion utility `u(v) = (1 - exp(-alpha v)) / alpha`.
///
/// `alpha == 0` is the exact identity. Negative infinity maps to itself.
/// A finite payoff whose transform overflows is an error rather than being
/// silently saturated.
pub fn risk_transform(v: Payoff, alpha: f64) -> Result<Payoff, SolveError> {
    if !alpha.is_finite() {
        return Err(SolveError::NonFiniteAlpha(alpha));
    }
    if alpha == 0.0 {
        return Ok(v);
    }
    match v {
        Payoff::NegInf => Ok(Payoff::NegInf),
        Payoff::Finite(x) => {
            // expm1 keeps full precision when alpha * x is tiny.
            let u = -(-alpha * x).exp_m1() / alpha;
            if u.is_finite() {
                Ok(Payoff::Finite(u))
            } else {
                Err(SolveError::NumericRange { value: x, alpha })
            }
        }
    }
}

pub fn transform_values(v: PlayerValues, risk: &RiskProfile) -> Result<PlayerValues, SolveError> {
    v.try_map(|p, x| risk_transform(x, risk.get(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// Among tied best actions prefer the first one flagged active.
    ActOnTie,
    /// Among tied best actions prefer the first one flagged passive.
    RefrainOnTie,
}

impl TieRule {
    /// Index of the canonical best action among `(kind, value)` pairs.
    pub fn pick(self, options: &[(ActionKind, Payoff)]) -> usize {
        let best = options.iter().map(|(_, v)| *v).max().expect("decision node has actions");
        let preferred = match self {
            TieRule::ActOnTie => ActionKind::Active,
            TieRule::RefrainOnTie => ActionKind::Passive,
        };
        let tied = || options.iter().enumerate().filter(|(_, (_, v))| *v == best);
        tied()
            .find(|(_, (k, _))| *k == preferred)
            .or_else(|| tied().next())
            .map(|(i, _)| i)
            .expect("maximum is attained")
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TieRule::ActOnTie => "act",
            TieRule::RefrainOnTie => "refrain",
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TieRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "act" => Ok(TieRule::ActOnTie),
            "refrain" => Ok(TieRule::RefrainOnTie),
            other => Err(format!("unknown tie rule {other:?} (expected act or refrain)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TiePolicy {
    pub alice: TieRule,
    pub tom: TieRule,
}

impl TiePolicy {
    pub fn rule(&self, player: PlayerId) -> TieRule {
        match player {
            PlayerId::Alice => self.alice,
            PlayerId::Tom => self.tom,
        }
    }
}

impl Default for TiePolicy {
    /// Tom acts when indifferent; Alice only leaks on a strictly positive value.
    fn default() -> Self {
        TiePolicy { alice: TieRule::RefrainOnTie, tom: TieRule::ActOnTie }
    }
}

/// A terminal with its untransformed payoffs and equilibrium probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalOutcome {
    pub id: NodeId,
    pub label: String,
    pub probability: f64,
    pub payoffs: PlayerValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub profile: StrategyProfile,
    /// Expected (risk-transformed) value of every node for both players.
    pub node_values: BTreeMap<NodeId, PlayerValues>,
    pub root_value: PlayerValues,
    pub outcome_distribution: BTreeMap<NodeId, f64>,
    /// Terminals in preorder, for reporting.
    pub terminals: Vec<TerminalOutcome>,
}

impl SolveResult {
    pub fn value_at(&self, id: &NodeId) -> Option<PlayerValues> {
        self.node_values.get(id).copied()
    }

    pub fn choice(&self, id: &NodeId) -> Option<&str> {
        self.profile.choice(id)
    }
}

struct Induction<'r> {
    risk: &'r RiskProfile,
    ties: &'r TiePolicy,
    profile: StrategyProfile,
    values: BTreeMap<NodeId, PlayerValues>,
}

impl Induction<'_> {
    fn value(&mut self, node: &Node, id: NodeId) -> Result<PlayerValues, SolveError> {
        let v = match node {
            Node::Terminal { payoffs, .. } => transform_values(*payoffs, self.risk)?,
            Node::Chance { branches, .. } => {
                let mut acc = PlayerValues::default();
                for b in branches {
                    let child = self.value(&b.child, id.child(&b.label))?;
                    acc = acc.map(|p, sum| sum + child.get(p).weighted(b.probability));
                }
                acc
            }
            Node::Decision { owner, actions, .. } => {
                let mut children = Vec::with_capacity(actions.len());
                for a in actions {
                    children.push(self.value(&a.child, id.child(&a.label))?);
                }
                let options: Vec<_> = actions.iter().zip(&children).map(|(a, v)| (a.kind, v.get(*owner))).collect();
                let pick = self.ties.rule(*owner).pick(&options);
                self.profile.choices.insert(id.clone(), actions[pick].label.clone());
                children[pick]
            }
        };
        self.values.insert(id, v);
        Ok(v)
    }
}

/// Subgame-perfect equilibrium by backward induction.
pub fn solve(tree: &Node, risk: &RiskProfile, ties: &TiePolicy) -> Result<SolveResult, SolveError> {
    let report = validate_tree(tree);
    if !report.is_valid() {
        return Err(SolveError::InvalidTree(report));
    }
    risk.check()?;
    let mut run = Induction { risk, ties, profile: StrategyProfile::default(), values: BTreeMap::new() };
    let root_value = run.value(tree, NodeId::root())?;
    let Induction { profile, values, .. } = run;
    let reach = terminal_reach(tree, &profile)?;
    let outcome_distribution = reach.iter().map(|r| (r.id.clone(), r.probability)).collect();
    let terminals = reach
        .into_iter()
        .map(|r| TerminalOutcome { id: r.id, label: r.label.to_string(), probability: r.probability, payoffs: r.payoffs })
        .collect();
    Ok(SolveResult { profile, node_values: values, root_value, outcome_distribution, terminals })
}

/// Expected transformed payoff of `profile`, summed terminal by terminal.
pub fn expected_utility(tree: &Node, profile: &StrategyProfile, risk: &RiskProfile) -> Result<PlayerValues, SolveError> {
    risk.check()?;
    let mut total = PlayerValues::default();
    for r in terminal_reach(tree, profile)? {
        let u = transform_values(r.payoffs, risk)?;
        total = total.map(|p, acc| acc + u.get(p).weighted(r.probability));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Action, Branch};

    fn term(a: f64, t: f64) -> Node {
        Node::terminal("t", PlayerValues::new(a, t))
    }

    fn decision(owner: PlayerId, opts: Vec<(&str, ActionKind, Node)>) -> Node {
        Node::Decision {
            owner,
            label: "d".into(),
            actions: opts
                .into_iter()
                .map(|(l, kind, child)| Action { label: l.into(), kind, child })
                .collect(),
        }
    }

    #[test]
    fn strictly_dominated_leak_is_avoided() {
        let tree = decision(
            PlayerId::Alice,
            vec![("leak", ActionKind::Active, term(-1.0, 0.0)), ("stay", ActionKind::Passive, term(0.0, 0.0))],
        );
        let r = solve(&tree, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        assert_eq!(r.choice(&NodeId::root()), Some("stay"));
        assert_eq!(r.root_value, PlayerValues::new(0.0, 0.0));
    }

    #[test]
    fn tom_acts_on_tie_alice_refrains() {
        let tom = decision(
            PlayerId::Tom,
            vec![("wait", ActionKind::Passive, term(1.0, 5.0)), ("act", ActionKind::Active, term(2.0, 5.0))],
        );
        let r = solve(&tom, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        assert_eq!(r.choice(&NodeId::root()), Some("act"));
        assert_eq!(r.root_value.alice, Payoff::Finite(2.0));

        let alice = decision(
            PlayerId::Alice,
            vec![("leak", ActionKind::Active, term(0.0, 1.0)), ("stay", ActionKind::Passive, term(0.0, 0.0))],
        );
        let r = solve(&alice, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        assert_eq!(r.choice(&NodeId::root()), Some("stay"));
    }

    #[test]
    fn tie_without_preferred_kind_takes_first_listed() {
        let opts = [(ActionKind::Passive, Payoff::from(1)), (ActionKind::Passive, Payoff::from(1))];
        assert_eq!(TieRule::ActOnTie.pick(&opts), 0);
        let opts = [(ActionKind::Active, Payoff::from(0)), (ActionKind::Active, Payoff::from(1))];
        assert_eq!(TieRule::RefrainOnTie.pick(&opts), 1);
    }

    #[test]
    fn lottery_expectation() {
        let tree = Node::Chance {
            label: "c".into(),
            branches: vec![
                Branch { label: "up".into(), probability: 0.5, child: term(4.0, 0.0) },
                Branch { label: "down".into(), probability: 0.5, child: term(-2.0, 0.0) },
            ],
        };
        let r = solve(&tree, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        assert_eq!(r.root_value.alice, Payoff::Finite(1.0));
        let eu = expected_utility(&tree, &StrategyProfile::default(), &RiskProfile::NEUTRAL).unwrap();
        assert_eq!(eu.alice, Payoff::Finite(1.0));
    }

    #[test]
    fn neg_inf_mixing_is_absorbing() {
        let tree = Node::Chance {
            label: "c".into(),
            branches: vec![
                Branch { label: "a".into(), probability: 0.999, child: term(1.0, 10.0) },
                Branch { label: "b".into(), probability: 0.001, child: Node::terminal("x", PlayerValues::new(0.0, Payoff::NegInf)) },
            ],
        };
        let r = solve(&tree, &RiskProfile::NEUTRAL, &TiePolicy::default()).unwrap();
        assert_eq!(r.root_value.tom, Payoff::NegInf);
    }

    #[test]
    fn risk_transform_values() {
        assert_eq!(risk_transform(Payoff::Finite(7.0), 0.0).unwrap(), Payoff::Finite(7.0));
        for alpha in [-3.0, -0.5, 1e-9, 2.0] {
            assert_eq!(risk_transform(Payoff::ZERO, alpha).unwrap().to_f64(), 0.0);
            assert_eq!(risk_transform(Payoff::NegInf, alpha).unwrap(), Payoff::NegInf);
        }
        // 1 - e^{-1}, evaluated independently.
        let expected = 1.0 - (-1.0f64).exp();
        let got = risk_transform(Payoff::Finite(1.0), 1.0).unwrap().to_f64();
        assert!((got - 0.632_120_558_8).abs() < 1e-10);
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn risk_transform_overflow_is_an_error() {
        assert!(matches!(risk_transform(Payoff::Finite(-1e6), 1.0), Err(SolveError::NumericRange { .. })));
        assert!(matches!(risk_transform(Payoff::Finite(1e6), -1.0), Err(SolveError::NumericRange { .. })));
        assert!(matches!(risk_transform(Payoff::Finite(1.0), f64::NAN), Err(SolveError::NonFiniteAlpha(_))));
    }

    #[test]
    fn non_finite_alpha_rejected_by_solve() {
        let risk = RiskProfile { alice: f64::INFINITY, tom: 0.0 };
        assert!(matches!(
            solve(&term(0.0, 0.0), &risk, &TiePolicy::default()),
            Err(SolveError::InvalidRisk { player: PlayerId::Alice, .. })
        ));
    }

    #[test]
    fn invalid_tree_rejected() {
        let tree = Node::Chance {
            label: "c".into(),
            branches: vec![Branch { label: "a".into(), probability: 0.4, child: term(1.0, 1.0) }],
        };
        assert!(matches!(
            solve(&tree, &RiskProfile::NEUTRAL, &TiePolicy::default()),
            Err(SolveError::InvalidTree(_))
        ));
    }

    #[test]
    fn transform_is_strictly_increasing() {
        for alpha in [-2.0, -1e-6, 0.0, 1e-6, 0.7] {
            let xs = [-5.0, -1.0, -1e-3, 0.0, 1e-3, 1.0, 5.0];
            for w in xs.windows(2) {
                let a = risk_transform(Payoff::Finite(w[0]), alpha).unwrap();
                let b = risk_transform(Payoff::Finite(w[1]), alpha).unwrap();
                assert!(a < b, "alpha {alpha}: u({}) !< u({})", w[0], w[1]);
            }
        }
    }
}

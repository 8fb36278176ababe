//! Generic two-player extensive-form game trees with perfect information.
//!
//! Nodes are addressed by [`NodeId`]s built from the action and branch labels
//! on the path from the root, so identifiers stay stable across rebuilds.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::payoff::Payoff;

/// Absolute tolerance on chance-node probability sums.
pub const PROB_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayerId {
    Alice,
    Tom,
}

impl PlayerId {
    pub const ALL: [PlayerId; 2] = [PlayerId::Alice, PlayerId::Tom];

    pub fn name(self) -> &'static str {
        match self {
            PlayerId::Alice => "Alice",
            PlayerId::Tom => "Tom",
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One payoff per strategic player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PlayerValues {
    pub alice: Payoff,
    pub tom: Payoff,
}

impl PlayerValues {
    pub fn new(alice: impl Into<Payoff>, tom: impl Into<Payoff>) -> Self {
        PlayerValues { alice: alice.into(), tom: tom.into() }
    }

    pub fn get(&self, player: PlayerId) -> Payoff {
        match player {
            PlayerId::Alice => self.alice,
            PlayerId::Tom => self.tom,
        }
    }

    pub fn get_mut(&mut self, player: PlayerId) -> &mut Payoff {
        match player {
            PlayerId::Alice => &mut self.alice,
            PlayerId::Tom => &mut self.tom,
        }
    }

    pub fn map(self, mut f: impl FnMut(PlayerId, Payoff) -> Payoff) -> Self {
        PlayerValues { alice: f(PlayerId::Alice, self.alice), tom: f(PlayerId::Tom, self.tom) }
    }

    pub fn try_map<E>(self, mut f: impl FnMut(PlayerId, Payoff) -> Result<Payoff, E>) -> Result<Self, E> {
        Ok(PlayerValues { alice: f(PlayerId::Alice, self.alice)?, tom: f(PlayerId::Tom, self.tom)? })
    }
}

/// Whether taking an action counts as "doing something" for tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Active,
    Passive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub label: String,
    pub kind: ActionKind,
    pub child: Node,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub label: String,
    pub probability: f64,
    pub child: Node,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Decision { owner: PlayerId, label: String, actions: Vec<Action> },
    Chance { label: String, branches: Vec<Branch> },
    Terminal { label: String, payoffs: PlayerValues },
}

impl Node {
    pub fn terminal(label: impl Into<String>, payoffs: PlayerValues) -> Node {
        Node::Terminal { label: label.into(), payoffs }
    }

    pub fn label(&self) -> &str {
        match self {
            Node::Decision { label, .. } | Node::Chance { label, .. } | Node::Terminal { label, .. } => label,
        }
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Decision { .. } => NodeKind::Decision,
            Node::Chance { .. } => NodeKind::Chance,
            Node::Terminal { .. } => NodeKind::Terminal,
        }
    }

    /// Children with their edge labels, in listed order.
    pub fn children(&self) -> Vec<(&str, &Node)> {
        match self {
            Node::Decision { actions, .. } => actions.iter().map(|a| (a.label.as_str(), &a.child)).collect(),
            Node::Chance { branches, .. } => branches.iter().map(|b| (b.label.as_str(), &b.child)).collect(),
            Node::Terminal { .. } => Vec::new(),
        }
    }

    /// Every node in preorder together with its identifier.
    pub fn nodes(&self) -> Vec<(NodeId, &Node)> {
        fn go<'a>(id: NodeId, node: &'a Node, out: &mut Vec<(NodeId, &'a Node)>) {
            let kids = node.children();
            out.push((id.clone(), node));
            for (label, child) in kids {
                go(id.child(label), child, out);
            }
        }
        let mut out = Vec::new();
        go(NodeId::root(), self, &mut out);
        out
    }

    pub fn decision_nodes(&self) -> Vec<(NodeId, &Node)> {
        self.nodes().into_iter().filter(|(_, n)| n.kind() == NodeKind::Decision).collect()
    }

    pub fn find(&self, target: &NodeId) -> Option<&Node> {
        self.nodes().into_iter().find(|(id, _)| id == target).map(|(_, n)| n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Decision,
    Chance,
    Terminal,
}

/// Path identifier: `/` for the root, `/leak/trust` for the node reached by
/// action `leak` then branch `trust`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn root() -> Self {
        NodeId("/".to_string())
    }

    pub fn child(&self, label: &str) -> Self {
        if self.0 == "/" {
            NodeId(format!("/{label}"))
        } else {
            NodeId(format!("{}/{label}", self.0))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0 == "/"
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A pure strategy profile: one chosen action label per decision node.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile {
    pub choices: BTreeMap<NodeId, String>,
}

impl StrategyProfile {
    pub fn choice(&self, id: &NodeId) -> Option<&str> {
        self.choices.get(id).map(String::as_str)
    }

    pub fn with_choice(mut self, id: NodeId, action: impl Into<String>) -> Self {
        self.choices.insert(id, action.into());
        self
    }

    /// Checks that the profile's domain is exactly the decision nodes of
    /// `tree` and that every chosen label exists at its node.
    pub fn check_against(&self, tree: &Node) -> Result<(), GameError> {
        let decisions = tree.decision_nodes();
        for (id, node) in &decisions {
            let Some(choice) = self.choices.get(id) else {
                return Err(GameError::MissingChoice(id.clone()));
            };
            if let Node::Decision { actions, .. } = node {
                if !actions.iter().any(|a| &a.label == choice) {
                    return Err(GameError::UnknownAction { node: id.clone(), action: choice.clone() });
                }
            }
        }
        if self.choices.len() != decisions.len() {
            let extra = self
                .choices
                .keys()
                .find(|k| !decisions.iter().any(|(id, _)| id == *k))
                .cloned()
                .unwrap_or_else(NodeId::root);
            return Err(GameError::NotADecisionNode(extra));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("unknown node identifier {0}")]
    UnknownNode(NodeId),
    #[error("profile has no choice for decision node {0}")]
    MissingChoice(NodeId),
    #[error("profile names {0}, which is not a decision node of this tree")]
    NotADecisionNode(NodeId),
    #[error("profile chooses unknown action {action:?} at {node}")]
    UnknownAction { node: NodeId, action: String },
    #[error("invalid tree: {0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ViolationKind {
    ProbabilitySum(f64),
    ProbabilityRange(f64),
    TooFewActions(usize),
    DuplicateLabel(String),
    EmptyLabel,
    DuplicateId,
    NoBranches,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub node: NodeId,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.node)?;
        match &self.kind {
            ViolationKind::ProbabilitySum(s) => write!(f, "probabilities sum to {s}"),
            ViolationKind::ProbabilityRange(p) => write!(f, "branch probability {p} outside [0, 1]"),
            ViolationKind::TooFewActions(n) => write!(f, "decision node has {n} action(s), needs at least 2"),
            ViolationKind::DuplicateLabel(l) => write!(f, "duplicate edge label {l:?}"),
            ViolationKind::EmptyLabel => write!(f, "empty edge label"),
            ViolationKind::DuplicateId => write!(f, "node identifier is not unique"),
            ViolationKind::NoBranches => write!(f, "chance node has no branches"),
        }
    }
}

/// All invariant violations found in a tree; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<(), GameError> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(GameError::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Reports every structural invariant violation in `tree`.
///
/// Ownership of children already rules out cycles, shared subtrees and
/// terminals with a missing player, so those cannot be reported.
pub fn validate_tree(tree: &Node) -> ValidationReport {
    let mut violations = Vec::new();
    let nodes = tree.nodes();
    let mut seen = std::collections::BTreeSet::new();
    for (id, node) in &nodes {
        if !seen.insert(id) {
            violations.push(Violation { node: id.clone(), kind: ViolationKind::DuplicateId });
        }
        let labels: Vec<&str> = node.children().into_iter().map(|(l, _)| l).collect();
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                violations.push(Violation { node: id.clone(), kind: ViolationKind::EmptyLabel });
            } else if labels[..i].contains(label) {
                violations.push(Violation { node: id.clone(), kind: ViolationKind::DuplicateLabel(label.to_string()) });
            }
        }
        match node {
            Node::Decision { actions, .. } if actions.len() < 2 => {
                violations.push(Violation { node: id.clone(), kind: ViolationKind::TooFewActions(actions.len()) });
            }
            Node::Chance { branches, .. } => {
                if branches.is_empty() {
                    violations.push(Violation { node: id.clone(), kind: ViolationKind::NoBranches });
                    continue;
                }
                for b in branches {
                    if !(0.0..=1.0).contains(&b.probability) {
                        violations
                            .push(Violation { node: id.clone(), kind: ViolationKind::ProbabilityRange(b.probability) });
                    }
                }
                let sum: f64 = branches.iter().map(|b| b.probability).sum();
                if (sum - 1.0).abs() > PROB_SUM_TOL || sum.is_nan() {
                    violations.push(Violation { node: id.clone(), kind: ViolationKind::ProbabilitySum(sum) });
                }
            }
            _ => {}
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NodeCounts {
    pub decision: usize,
    pub chance: usize,
    pub terminal: usize,
}

impl NodeCounts {
    pub fn total(&self) -> usize {
        self.decision + self.chance + self.terminal
    }
}

pub fn count_nodes(tree: &Node) -> NodeCounts {
    let mut c = NodeCounts { decision: 0, chance: 0, terminal: 0 };
    for (_, n) in tree.nodes() {
        match n.kind() {
            NodeKind::Decision => c.decision += 1,
            NodeKind::Chance => c.chance += 1,
            NodeKind::Terminal => c.terminal += 1,
        }
    }
    c
}

/// A terminal reached under a profile, with its reach probability.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalReach<'a> {
    pub id: NodeId,
    pub label: &'a str,
    pub payoffs: PlayerValues,
    pub probability: f64,
}

/// Reach probability of every terminal under `profile`, in preorder.
pub fn terminal_reach<'a>(tree: &'a Node, profile: &StrategyProfile) -> Result<Vec<TerminalReach<'a>>, GameError> {
    profile.check_against(tree)?;
    let mut out = Vec::new();
    reach_walk(tree, NodeId::root(), 1.0, profile, &mut |id, node, p| {
        if let Node::Terminal { label, payoffs } = node {
            out.push(TerminalReach { id, label, payoffs: *payoffs, probability: p });
        }
    });
    Ok(out)
}

fn reach_walk<'a>(
    node: &'a Node,
    id: NodeId,
    p: f64,
    profile: &StrategyProfile,
    visit: &mut impl FnMut(NodeId, &'a Node, f64),
) {
    match node {
        Node::Decision { actions, .. } => {
            let chosen = profile.choice(&id);
            visit(id.clone(), node, p);
            for a in actions {
                let q = if chosen == Some(a.label.as_str()) { p } else { 0.0 };
                reach_walk(&a.child, id.child(&a.label), q, profile, visit);
            }
        }
        Node::Chance { branches, .. } => {
            visit(id.clone(), node, p);
            for b in branches {
                reach_walk(&b.child, id.child(&b.label), p * b.probability, profile, visit);
            }
        }
        Node::Terminal { .. } => visit(id, node, p),
    }
}

/// Probability of reaching `target` when play follows `profile`.
pub fn reachable_probability(tree: &Node, profile: &StrategyProfile, target: &NodeId) -> Result<f64, GameError> {
    profile.check_against(tree)?;
    let mut found = None;
    reach_walk(tree, NodeId::root(), 1.0, profile, &mut |id, _, p| {
        if found.is_none() && &id == target {
            found = Some(p);
        }
    });
    found.ok_or_else(|| GameError::UnknownNode(target.clone()))
}

//! Brute-force subgame-perfection check by enumerating every pure profile.
//!
//! Independent of [`crate::solver`]: the tree is flattened into an arena,
//! each profile is evaluated bottom-up over the arena, and a profile is kept
//! only if at every decision node the chosen action is the canonical best
//! response (under the tie policy) given the profile's play in every
//! subgame. Unreachable subgames are disciplined too.

use serde::Serialize;
use thiserror::Error;

use crate::game::{validate_tree, ActionKind, Node, NodeId, PlayerId, PlayerValues, StrategyProfile, ValidationReport};
use crate::payoff::Payoff;
use crate::solver::{solve, transform_values, RiskProfile, SolveError, TiePolicy};

pub const DEFAULT_PROFILE_CAP: u64 = 1 << 20;

/// Value tolerance for oracle/solver agreement on finite values.
pub const AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("tree has {count} pure profiles, more than the cap of {cap}")]
    CapExceeded { count: String, cap: u64 },
    #[error("invalid tree: {0}")]
    InvalidTree(ValidationReport),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

enum Flat {
    Decision { owner: PlayerId, slot: usize, children: Vec<(ActionKind, usize)> },
    Chance { children: Vec<(f64, usize)> },
    Terminal { payoffs: PlayerValues },
}

/// The tree in postorder: every child index is smaller than its parent's.
struct Arena {
    nodes: Vec<Flat>,
    /// Per decision slot: node id and action labels.
    slots: Vec<(NodeId, Vec<String>)>,
}

impl Arena {
    fn new(tree: &Node) -> Self {
        let mut arena = Arena { nodes: Vec::new(), slots: Vec::new() };
        arena.push(tree, NodeId::root());
        arena
    }

    fn push(&mut self, node: &Node, id: NodeId) -> usize {
        let flat = match node {
            Node::Terminal { payoffs, .. } => Flat::Terminal { payoffs: *payoffs },
            Node::Chance { branches, .. } => Flat::Chance {
                children: branches.iter().map(|b| (b.probability, self.push(&b.child, id.child(&b.label)))).collect(),
            },
            Node::Decision { owner, actions, .. } => {
                // Slots are numbered in preorder so enumeration order matches
                // the tree's listing order.
                let slot = self.slots.len();
                self.slots.push((id.clone(), actions.iter().map(|a| a.label.clone()).collect()));
                let children = actions.iter().map(|a| (a.kind, self.push(&a.child, id.child(&a.label)))).collect();
                Flat::Decision { owner: *owner, slot, children }
            }
        };
        self.nodes.push(flat);
        self.nodes.len() - 1
    }

    fn to_profile(&self, choice: &[usize]) -> StrategyProfile {
        StrategyProfile {
            choices: self.slots.iter().zip(choice).map(|((id, labels), &c)| (id.clone(), labels[c].clone())).collect(),
        }
    }

    fn profile_count(&self) -> Option<u64> {
        self.slots.iter().try_fold(1u64, |acc, (_, labels)| acc.checked_mul(labels.len() as u64))
    }
}

/// Every pure strategy profile, in mixed-radix order over the decision
/// nodes in preorder (the last node varies fastest).
pub struct Profiles {
    arena: Arena,
    next: Option<Vec<usize>>,
}

impl Profiles {
    fn advance(&mut self) {
        let Some(cur) = self.next.as_mut() else { return };
        for slot in (0..cur.len()).rev() {
            cur[slot] += 1;
            if cur[slot] < self.arena.slots[slot].1.len() {
                return;
            }
            cur[slot] = 0;
        }
        self.next = None;
    }
}

impl Iterator for Profiles {
    type Item = StrategyProfile;

    fn next(&mut self) -> Option<StrategyProfile> {
        let profile = self.arena.to_profile(self.next.as_ref()?);
        self.advance();
        Some(profile)
    }
}

pub fn enumerate_profiles(tree: &Node, cap: u64) -> Result<Profiles, OracleError> {
    let arena = Arena::new(tree);
    check_cap(&arena, cap)?;
    let start = vec![0; arena.slots.len()];
    Ok(Profiles { arena, next: Some(start) })
}

fn check_cap(arena: &Arena, cap: u64) -> Result<u64, OracleError> {
    match arena.profile_count() {
        Some(n) if n <= cap => Ok(n),
        Some(n) => Err(OracleError::CapExceeded { count: n.to_string(), cap }),
        None => Err(OracleError::CapExceeded { count: "more than 2^64".into(), cap }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub spe_profiles: Vec<StrategyProfile>,
    pub root_values: Vec<PlayerValues>,
    pub profiles_checked: u64,
}

pub fn brute_force_spe(tree: &Node, risk: &RiskProfile, ties: &TiePolicy) -> Result<OracleResult, OracleError> {
    brute_force_spe_capped(tree, risk, ties, DEFAULT_PROFILE_CAP)
}

pub fn brute_force_spe_capped(
    tree: &Node,
    risk: &RiskProfile,
    ties: &TiePolicy,
    cap: u64,
) -> Result<OracleResult, OracleError> {
    let report = validate_tree(tree);
    if !report.is_valid() {
        return Err(OracleError::InvalidTree(report));
    }
    let arena = Arena::new(tree);
    let total = check_cap(&arena, cap)?;

    // Transform terminal payoffs once.
    let mut leaf_values = vec![PlayerValues::default(); arena.nodes.len()];
    for (i, n) in arena.nodes.iter().enumerate() {
        if let Flat::Terminal { payoffs } = n {
            leaf_values[i] = transform_values(*payoffs, risk)?;
        }
    }

    let mut result = OracleResult { spe_profiles: Vec::new(), root_values: Vec::new(), profiles_checked: total };
    let mut choice = vec![0usize; arena.slots.len()];
    let mut values = leaf_values.clone();
    let root = arena.nodes.len() - 1;
    for _ in 0..total {
        if evaluate_and_check(&arena, &choice, ties, &mut values) {
            result.spe_profiles.push(arena.to_profile(&choice));
            result.root_values.push(values[root]);
        }
        for slot in (0..choice.len()).rev() {
            choice[slot] += 1;
            if choice[slot] < arena.slots[slot].1.len() {
                break;
            }
            choice[slot] = 0;
        }
    }
    Ok(result)
}

/// Fills `values` for the profile `choice` and reports whether no decision
/// node has a canonical deviation.
fn evaluate_and_check(arena: &Arena, choice: &[usize], ties: &TiePolicy, values: &mut [PlayerValues]) -> bool {
    let mut options: Vec<(ActionKind, Payoff)> = Vec::new();
    for (i, node) in arena.nodes.iter().enumerate() {
        match node {
            Flat::Terminal { .. } => {}
            Flat::Chance { children } => {
                let mut acc = PlayerValues::default();
                for &(p, c) in children {
                    let v = values[c];
                    acc = acc.map(|player, sum| sum + v.get(player).weighted(p));
                }
                values[i] = acc;
            }
            Flat::Decision { owner, slot, children } => {
                options.clear();
                options.extend(children.iter().map(|&(kind, c)| (kind, values[c].get(*owner))));
                let canonical = ties.rule(*owner).pick(&options);
                if canonical != choice[*slot] {
                    return false;
                }
                values[i] = values[children[choice[*slot]].1];
            }
        }
    }
    true
}

/// Outcome of comparing the oracle with backward induction on one tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub profiles_checked: u64,
    pub oracle_profiles: usize,
    pub profile_agrees: bool,
    /// Largest absolute difference between finite root values.
    pub max_value_gap: f64,
    pub values_agree: bool,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.oracle_profiles == 1 && self.profile_agrees && self.values_agree
    }
}

pub fn values_close(a: PlayerValues, b: PlayerValues, tol: f64) -> (bool, f64) {
    let mut gap: f64 = 0.0;
    let mut ok = true;
    for p in PlayerId::ALL {
        match (a.get(p), b.get(p)) {
            (Payoff::Finite(x), Payoff::Finite(y)) => {
                gap = gap.max((x - y).abs());
                ok &= (x - y).abs() <= tol;
            }
            (Payoff::NegInf, Payoff::NegInf) => {}
            _ => {
                ok = false;
                gap = f64::INFINITY;
            }
        }
    }
    (ok, gap)
}

/// Runs both the oracle and [`solve`] and compares profile and root values.
pub fn cross_check(tree: &Node, risk: &RiskProfile, ties: &TiePolicy) -> Result<CrossCheck, OracleError> {
    let oracle = brute_force_spe(tree, risk, ties)?;
    let solved = solve(tree, risk, ties)?;
    let profile_agrees = oracle.spe_profiles.len() == 1 && oracle.spe_profiles[0] == solved.profile;
    let (values_agree, max_value_gap) = match oracle.root_values.first() {
        Some(v) if oracle.root_values.len() == 1 => values_close(*v, solved.root_value, AGREEMENT_TOL),
        _ => (false, f64::INFINITY),
    };
    Ok(CrossCheck {
        profiles_checked: oracle.profiles_checked,
        oracle_profiles: oracle.spe_profiles.len(),
        profile_agrees,
        max_value_gap,
        values_agree,
    })
}

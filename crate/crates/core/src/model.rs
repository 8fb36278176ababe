//! The sequential whistleblowing game.
//!
//! Alice (whistleblower) decides whether to leak. Duncan (the reporter)
//! trusts her with probability `w`; Tom may then block the story, attempt
//! censorship, and attempt to de-anonymise Alice. The World's stance and
//! Harry's protection are chance events.
//!
//! Move order of the standard tree:
//!
//! ```text
//! Alice: leak | stay
//!   Duncan (chance): trust w | no-trust 1-w
//!     Tom: block | proceed
//!       Tom: censor (cost H) | hold
//!         World (chance): supports-tom x | supports-duncan y | neutral 1-x-y
//!           censored (World=Tom, or neutral after censor):
//!             Tom: pursue (cost I) -> (c, C) | drop -> (d, D)
//!           uncensored (World=Duncan, or neutral after hold):
//!             Tom: pursue (cost I) | drop
//!               Harry (chance): strong z | weak 1-z
//!                 pursue: strong -> (f, F), weak -> (g, G)
//!                 drop:   both   -> (e, E)
//! ```
//!
//! H and I are signed additive adjustments to Tom's payoff (a cost is a
//! negative number). H is charged on every terminal below a censor choice,
//! I on every terminal below a pursue choice.
//!
//! Two published formulas for this game do not match the outcome structure
//! above, and this module implements the structural version:
//!
//! * uncensored de-anonymisation is written `zG + (1-z)E + I >= F`; the
//!   structure gives `zF + (1-z)G + I >= E` (impunity when Harry is strong,
//!   jail when weak, anonymity when Tom does not try), see
//!   [`rule_deanon_uncensored`];
//! * the censorship comparison weights the World-supports-Duncan subgames
//!   by `z`; the structure gives `y`, see [`rule_censor`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Action, ActionKind, Branch, Node, NodeId, PlayerId, PlayerValues};
use crate::payoff::Payoff;

/// Tolerance on `x + y <= 1`.
const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Standard,
    /// Duncan goes straight to Harry: the World always supports Duncan.
    DuncanToHarry,
    /// Alice goes straight to Harry: Duncan always trusts, blocking is
    /// impossible and the World always supports Duncan.
    AliceToHarry,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::DuncanToHarry => "duncan_to_harry",
            Variant::AliceToHarry => "alice_to_harry",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Variant::Standard),
            "duncan_to_harry" => Ok(Variant::DuncanToHarry),
            "alice_to_harry" => Ok(Variant::AliceToHarry),
            other => Err(format!(
                "unknown variant {other:?} (expected standard, duncan_to_harry or alice_to_harry)"
            )),
        }
    }
}

/// Equivalence classes of terminals, one per payoff pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeClass {
    NoLeak,
    NoTrust,
    Blocked,
    CensoredJailed,
    CensoredAnonymous,
    UncensoredAnonymous,
    UncensoredImpunity,
    UncensoredJailed,
}

impl OutcomeClass {
    pub const ALL: [OutcomeClass; 8] = [
        OutcomeClass::NoLeak,
        OutcomeClass::NoTrust,
        OutcomeClass::Blocked,
        OutcomeClass::CensoredJailed,
        OutcomeClass::CensoredAnonymous,
        OutcomeClass::UncensoredAnonymous,
        OutcomeClass::UncensoredImpunity,
        OutcomeClass::UncensoredJailed,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            OutcomeClass::NoLeak => "no-leak",
            OutcomeClass::NoTrust => "no-trust",
            OutcomeClass::Blocked => "blocked",
            OutcomeClass::CensoredJailed => "censored-jailed",
            OutcomeClass::CensoredAnonymous => "censored-anonymous",
            OutcomeClass::UncensoredAnonymous => "uncensored-anonymous",
            OutcomeClass::UncensoredImpunity => "uncensored-impunity",
            OutcomeClass::UncensoredJailed => "uncensored-jailed",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.slug() == s)
    }

    /// Conventional payoff letters `(Alice, Tom)`.
    pub fn letters(self) -> (&'static str, &'static str) {
        match self {
            OutcomeClass::NoLeak => ("0", "0"),
            OutcomeClass::NoTrust => ("a", "0"),
            OutcomeClass::Blocked => ("b", "B"),
            OutcomeClass::CensoredJailed => ("c", "C"),
            OutcomeClass::CensoredAnonymous => ("d", "D"),
            OutcomeClass::UncensoredAnonymous => ("e", "E"),
            OutcomeClass::UncensoredImpunity => ("f", "F"),
            OutcomeClass::UncensoredJailed => ("g", "G"),
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, OutcomeClass::CensoredJailed | OutcomeClass::CensoredAnonymous)
    }

    pub fn is_uncensored(self) -> bool {
        matches!(
            self,
            OutcomeClass::UncensoredAnonymous | OutcomeClass::UncensoredImpunity | OutcomeClass::UncensoredJailed
        )
    }

    pub fn describe(self) -> &'static str {
        match self {
            OutcomeClass::NoLeak => "Alice does not leak",
            OutcomeClass::NoTrust => "Duncan does not trust Alice",
            OutcomeClass::Blocked => "Tom blocks Duncan before the broadcast",
            OutcomeClass::CensoredJailed => "broadcast censored, Alice jailed",
            OutcomeClass::CensoredAnonymous => "broadcast censored, Alice anonymous",
            OutcomeClass::UncensoredAnonymous => "broadcast uncensored, Alice anonymous",
            OutcomeClass::UncensoredImpunity => "broadcast uncensored, Alice has impunity",
            OutcomeClass::UncensoredJailed => "broadcast uncensored, Alice jailed",
        }
    }
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for OutcomeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_slug(s).ok_or_else(|| format!("unknown outcome class {s:?}"))
    }
}

/// Alice's payoff for each outcome (the no-leak outcome is normalised to 0).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlicePayoffs {
    pub no_trust: f64,
    pub blocked: f64,
    pub censored_jailed: f64,
    pub censored_anonymous: f64,
    pub uncensored_anonymous: f64,
    pub uncensored_impunity: f64,
    pub uncensored_jailed: f64,
}

/// Tom's payoff for each outcome before attempt costs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TomPayoffs {
    pub blocked: Payoff,
    pub censored_jailed: f64,
    pub censored_anonymous: f64,
    pub uncensored_anonymous: f64,
    pub uncensored_impunity: f64,
    pub uncensored_jailed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GameParameters {
    /// Probability Duncan trusts Alice (`w`).
    pub trust: f64,
    /// Probability the World supports Tom (`x`).
    pub world_tom: f64,
    /// Probability the World supports Duncan (`y`).
    pub world_duncan: f64,
    /// Probability Harry's protection is strong (`z`).
    pub harry_strong: f64,
    pub alice: AlicePayoffs,
    pub tom: TomPayoffs,
    /// Adjustment to Tom's payoff for attempting censorship (`H`).
    pub censor_cost: f64,
    /// Adjustment to Tom's payoff for attempting de-anonymisation (`I`).
    pub deanon_cost: f64,
    pub variant: Variant,
}

/// Scalar parameters addressable by their conventional one-letter names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    W,
    X,
    Y,
    Z,
    #[serde(rename = "a")]
    AliceNoTrust,
    #[serde(rename = "b")]
    AliceBlocked,
    #[serde(rename = "c")]
    AliceCensoredJailed,
    #[serde(rename = "d")]
    AliceCensoredAnonymous,
    #[serde(rename = "e")]
    AliceUncensoredAnonymous,
    #[serde(rename = "f")]
    AliceUncensoredImpunity,
    #[serde(rename = "g")]
    AliceUncensoredJailed,
    #[serde(rename = "B")]
    TomBlocked,
    #[serde(rename = "C")]
    TomCensoredJailed,
    #[serde(rename = "D")]
    TomCensoredAnonymous,
    #[serde(rename = "E")]
    TomUncensoredAnonymous,
    #[serde(rename = "F")]
    TomUncensoredImpunity,
    #[serde(rename = "G")]
    TomUncensoredJailed,
    #[serde(rename = "H")]
    CensorCost,
    #[serde(rename = "I")]
    DeanonCost,
}

impl Param {
    pub const ALL: [Param; 19] = [
        Param::W,
        Param::X,
        Param::Y,
        Param::Z,
        Param::AliceNoTrust,
        Param::AliceBlocked,
        Param::AliceCensoredJailed,
        Param::AliceCensoredAnonymous,
        Param::AliceUncensoredAnonymous,
        Param::AliceUncensoredImpunity,
        Param::AliceUncensoredJailed,
        Param::TomBlocked,
        Param::TomCensoredJailed,
        Param::TomCensoredAnonymous,
        Param::TomUncensoredAnonymous,
        Param::TomUncensoredImpunity,
        Param::TomUncensoredJailed,
        Param::CensorCost,
        Param::DeanonCost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::W => "w",
            Param::X => "x",
            Param::Y => "y",
            Param::Z => "z",
            Param::AliceNoTrust => "a",
            Param::AliceBlocked => "b",
            Param::AliceCensoredJailed => "c",
            Param::AliceCensoredAnonymous => "d",
            Param::AliceUncensoredAnonymous => "e",
            Param::AliceUncensoredImpunity => "f",
            Param::AliceUncensoredJailed => "g",
            Param::TomBlocked => "B",
            Param::TomCensoredJailed => "C",
            Param::TomCensoredAnonymous => "D",
            Param::TomUncensoredAnonymous => "E",
            Param::TomUncensoredImpunity => "F",
            Param::TomUncensoredJailed => "G",
            Param::CensorCost => "H",
            Param::DeanonCost => "I",
        }
    }

    pub fn is_probability(self) -> bool {
        matches!(self, Param::W | Param::X | Param::Y | Param::Z)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown parameter {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{param} = {value} is outside [0, 1]")]
    NotAProbability { param: Param, value: f64 },
    #[error("x + y = {sum} > 1")]
    Simplex { sum: f64 },
    #[error("{param} must be finite, got {value}")]
    NonFinite { param: Param, value: f64 },
    #[error("-inf is only allowed for B, not {0}")]
    NegInfNotAllowed(Param),
    #[error("variant {variant} requires {param} = {required}, got {value}")]
    VariantConflict { variant: Variant, param: Param, required: Payoff, value: Payoff },
}

impl GameParameters {
    pub fn get(&self, param: Param) -> Payoff {
        let v = match param {
            Param::W => self.trust,
            Param::X => self.world_tom,
            Param::Y => self.world_duncan,
            Param::Z => self.harry_strong,
            Param::AliceNoTrust => self.alice.no_trust,
            Param::AliceBlocked => self.alice.blocked,
            Param::AliceCensoredJailed => self.alice.censored_jailed,
            Param::AliceCensoredAnonymous => self.alice.censored_anonymous,
            Param::AliceUncensoredAnonymous => self.alice.uncensored_anonymous,
            Param::AliceUncensoredImpunity => self.alice.uncensored_impunity,
            Param::AliceUncensoredJailed => self.alice.uncensored_jailed,
            Param::TomBlocked => return self.tom.blocked,
            Param::TomCensoredJailed => self.tom.censored_jailed,
            Param::TomCensoredAnonymous => self.tom.censored_anonymous,
            Param::TomUncensoredAnonymous => self.tom.uncensored_anonymous,
            Param::TomUncensoredImpunity => self.tom.uncensored_impunity,
            Param::TomUncensoredJailed => self.tom.uncensored_jailed,
            Param::CensorCost => self.censor_cost,
            Param::DeanonCost => self.deanon_cost,
        };
        Payoff::Finite(v)
    }

    /// Sets one parameter. Values are not checked here; call [`validate`].
    ///
    /// [`validate`]: GameParameters::validate
    pub fn set(&mut self, param: Param, value: Payoff) {
        let v = value.to_f64();
        match param {
            Param::W => self.trust = v,
            Param::X => self.world_tom = v,
            Param::Y => self.world_duncan = v,
            Param::Z => self.harry_strong = v,
            Param::AliceNoTrust => self.alice.no_trust = v,
            Param::AliceBlocked => self.alice.blocked = v,
            Param::AliceCensoredJailed => self.alice.censored_jailed = v,
            Param::AliceCensoredAnonymous => self.alice.censored_anonymous = v,
            Param::AliceUncensoredAnonymous => self.alice.uncensored_anonymous = v,
            Param::AliceUncensoredImpunity => self.alice.uncensored_impunity = v,
            Param::AliceUncensoredJailed => self.alice.uncensored_jailed = v,
            Param::TomBlocked => self.tom.blocked = value,
            Param::TomCensoredJailed => self.tom.censored_jailed = v,
            Param::TomCensoredAnonymous => self.tom.censored_anonymous = v,
            Param::TomUncensoredAnonymous => self.tom.uncensored_anonymous = v,
            Param::TomUncensoredImpunity => self.tom.uncensored_impunity = v,
            Param::TomUncensoredJailed => self.tom.uncensored_jailed = v,
            Param::CensorCost => self.censor_cost = v,
            Param::DeanonCost => self.deanon_cost = v,
        }
    }

    pub fn with(mut self, param: Param, value: impl Into<Payoff>) -> Self {
        self.set(param, value.into());
        self
    }

    /// Probability the World is neutral, `1 - x - y`.
    pub fn world_neutral(&self) -> f64 {
        (1.0 - self.world_tom - self.world_duncan).max(0.0)
    }

    /// The values a variant pins, as `(param, value)` pairs.
    pub fn variant_requirements(variant: Variant) -> &'static [(Param, Payoff)] {
        const DUNCAN: &[(Param, Payoff)] = &[(Param::X, Payoff::Finite(0.0)), (Param::Y, Payoff::Finite(1.0))];
        const ALICE: &[(Param, Payoff)] = &[
            (Param::W, Payoff::Finite(1.0)),
            (Param::X, Payoff::Finite(0.0)),
            (Param::Y, Payoff::Finite(1.0)),
            (Param::TomBlocked, Payoff::NegInf),
        ];
        match variant {
            Variant::Standard => &[],
            Variant::DuncanToHarry => DUNCAN,
            Variant::AliceToHarry => ALICE,
        }
    }

    /// Switches to `variant`, overwriting the parameters it pins.
    pub fn apply_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        for &(param, value) in Self::variant_requirements(variant) {
            self.set(param, value);
        }
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for param in Param::ALL {
            let x = self.get(param).to_f64();
            if x == f64::NEG_INFINITY {
                if param != Param::TomBlocked {
                    return Err(ParamError::NegInfNotAllowed(param));
                }
            } else if !x.is_finite() {
                return Err(ParamError::NonFinite { param, value: x });
            } else if param.is_probability() && !(0.0..=1.0).contains(&x) {
                return Err(ParamError::NotAProbability { param, value: x });
            }
        }
        let sum = self.world_tom + self.world_duncan;
        if sum > 1.0 + SIMPLEX_TOL {
            return Err(ParamError::Simplex { sum });
        }
        for &(param, required) in Self::variant_requirements(self.variant) {
            let value = self.get(param);
            if value != required {
                return Err(ParamError::VariantConflict { variant: self.variant, param, required, value });
            }
        }
        Ok(())
    }

    /// Non-fatal remarks: a positive H or I is a subsidy, not a cost.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.censor_cost > 0.0 {
            out.push(format!("H = {} > 0 rewards Tom for attempting censorship", self.censor_cost));
        }
        if self.deanon_cost > 0.0 {
            out.push(format!("I = {} > 0 rewards Tom for attempting de-anonymisation", self.deanon_cost));
        }
        out
    }
}

// Edge labels of the standard tree.
pub const LEAK: &str = "leak";
pub const STAY: &str = "stay";
pub const TRUST: &str = "trust";
pub const NO_TRUST: &str = "no-trust";
pub const BLOCK: &str = "block";
pub const PROCEED: &str = "proceed";
pub const CENSOR: &str = "censor";
pub const HOLD: &str = "hold";
pub const WORLD_TOM: &str = "supports-tom";
pub const WORLD_DUNCAN: &str = "supports-duncan";
pub const WORLD_NEUTRAL: &str = "neutral";
pub const PURSUE: &str = "pursue";
pub const DROP: &str = "drop";
pub const STRONG: &str = "strong";
pub const WEAK: &str = "weak";

/// Identifier of a numbered decision node in the unpruned tree.
///
/// 1 is Alice's leak decision, 2 Tom's block decision, 3 his censorship
/// decision; 9/7/5 follow `censor` with the World supporting Tom, neutral,
/// supporting Duncan; 8/6/4 follow `hold` likewise.
pub fn numbered_node(n: u8) -> Option<NodeId> {
    let node3 = NodeId::root().child(LEAK).child(TRUST).child(PROCEED);
    Some(match n {
        1 => NodeId::root(),
        2 => NodeId::root().child(LEAK).child(TRUST),
        3 => node3,
        4 => node3.child(HOLD).child(WORLD_DUNCAN),
        5 => node3.child(CENSOR).child(WORLD_DUNCAN),
        6 => node3.child(HOLD).child(WORLD_NEUTRAL),
        7 => node3.child(CENSOR).child(WORLD_NEUTRAL),
        8 => node3.child(HOLD).child(WORLD_TOM),
        9 => node3.child(CENSOR).child(WORLD_TOM),
        _ => return None,
    })
}

/// Numbered de-anonymisation nodes where the broadcast is censored.
pub const CENSORED_NODES: [u8; 3] = [9, 7, 8];
/// Numbered de-anonymisation nodes where the broadcast goes out.
pub const UNCENSORED_NODES: [u8; 3] = [5, 6, 4];

fn decision(owner: PlayerId, label: &str, active: (&str, Node), passive: (&str, Node)) -> Node {
    Node::Decision {
        owner,
        label: label.to_string(),
        actions: vec![
            Action { label: active.0.to_string(), kind: ActionKind::Active, child: active.1 },
            Action { label: passive.0.to_string(), kind: ActionKind::Passive, child: passive.1 },
        ],
    }
}

fn chance(label: &str, branches: Vec<(&str, f64, Node)>) -> Node {
    Node::Chance {
        label: label.to_string(),
        branches: branches
            .into_iter()
            .map(|(l, probability, child)| Branch { label: l.to_string(), probability, child })
            .collect(),
    }
}

fn outcome(class: OutcomeClass, alice: f64, tom: Payoff) -> Node {
    Node::terminal(class.slug(), PlayerValues::new(alice, tom))
}

struct Builder<'p> {
    p: &'p GameParameters,
}

impl Builder<'_> {
    /// Tom's payoff with attempt costs; I is added before the sunk H so the
    /// two sides of a de-anonymisation comparison share the same H term.
    fn tom(&self, base: f64, censor: bool, pursue: bool) -> Payoff {
        let mut v = Payoff::Finite(base);
        if pursue {
            v = v + self.p.deanon_cost;
        }
        if censor {
            v = v + self.p.censor_cost;
        }
        v
    }

    fn censored(&self, number: u8, censor: bool) -> Node {
        let (a, t) = (&self.p.alice, &self.p.tom);
        decision(
            PlayerId::Tom,
            &format!("node {number}"),
            (PURSUE, outcome(OutcomeClass::CensoredJailed, a.censored_jailed, self.tom(t.censored_jailed, censor, true))),
            (DROP, outcome(OutcomeClass::CensoredAnonymous, a.censored_anonymous, self.tom(t.censored_anonymous, censor, false))),
        )
    }

    fn uncensored(&self, number: u8, censor: bool) -> Node {
        let (a, t, z) = (&self.p.alice, &self.p.tom, self.p.harry_strong);
        let anonymous = || outcome(OutcomeClass::UncensoredAnonymous, a.uncensored_anonymous, self.tom(t.uncensored_anonymous, censor, false));
        decision(
            PlayerId::Tom,
            &format!("node {number}"),
            (
                PURSUE,
                chance(
                    "harry",
                    vec![
                        (STRONG, z, outcome(OutcomeClass::UncensoredImpunity, a.uncensored_impunity, self.tom(t.uncensored_impunity, censor, true))),
                        (WEAK, 1.0 - z, outcome(OutcomeClass::UncensoredJailed, a.uncensored_jailed, self.tom(t.uncensored_jailed, censor, true))),
                    ],
                ),
            ),
            (DROP, chance("harry", vec![(STRONG, z, anonymous()), (WEAK, 1.0 - z, anonymous())])),
        )
    }

    fn world(&self, censor: bool) -> Node {
        let p = self.p;
        // Node numbers: censor -> 9/5/7, hold -> 8/4/6.
        let (n_tom, n_duncan, n_neutral) = if censor { (9, 5, 7) } else { (8, 4, 6) };
        let neutral = if censor { self.censored(n_neutral, true) } else { self.uncensored(n_neutral, false) };
        chance(
            "world",
            vec![
                (WORLD_TOM, p.world_tom, self.censored(n_tom, censor)),
                (WORLD_DUNCAN, p.world_duncan, self.uncensored(n_duncan, censor)),
                (WORLD_NEUTRAL, p.world_neutral(), neutral),
            ],
        )
    }

    fn build(&self) -> Node {
        let p = self.p;
        let censorship = decision(PlayerId::Tom, "node 3", (CENSOR, self.world(true)), (HOLD, self.world(false)));
        let block = decision(
            PlayerId::Tom,
            "node 2",
            (BLOCK, outcome(OutcomeClass::Blocked, p.alice.blocked, p.tom.blocked)),
            (PROCEED, censorship),
        );
        let duncan = chance(
            "duncan",
            vec![
                (TRUST, p.trust, block),
                (NO_TRUST, 1.0 - p.trust, outcome(OutcomeClass::NoTrust, p.alice.no_trust, Payoff::ZERO)),
            ],
        );
        decision(PlayerId::Alice, "node 1", (LEAK, duncan), (STAY, outcome(OutcomeClass::NoLeak, 0.0, Payoff::ZERO)))
    }
}

/// Builds the full game tree. Variants keep the standard shape; their
/// pinned probabilities leave zero-probability branches that
/// [`prune_zero`] removes.
pub fn build_game(p: &GameParameters) -> Result<Node, ParamError> {
    p.validate()?;
    Ok(Builder { p }.build())
}

/// Removes zero-probability chance branches and collapses chance nodes left
/// with a single branch.
///
/// A collapsed node's branch label is folded into the incoming edge label
/// (`hold` + `supports-duncan` becomes `hold/supports-duncan`), so every
/// surviving node keeps its original identifier. A chance node at the root
/// is never collapsed because it has no incoming edge.
pub fn prune_zero(tree: &Node) -> Node {
    prune(tree, false).0
}

fn prune(node: &Node, collapsible: bool) -> (Node, Option<String>) {
    let joined = |label: &str, suffix: Option<String>| match suffix {
        Some(s) => format!("{label}/{s}"),
        None => label.to_string(),
    };
    match node {
        Node::Terminal { .. } => (node.clone(), None),
        Node::Decision { owner, label, actions } => {
            let actions = actions
                .iter()
                .map(|a| {
                    let (child, suffix) = prune(&a.child, true);
                    Action { label: joined(&a.label, suffix), kind: a.kind, child }
                })
                .collect();
            (Node::Decision { owner: *owner, label: label.clone(), actions }, None)
        }
        Node::Chance { label, branches } => {
            let mut kept: Vec<Branch> = branches
                .iter()
                .filter(|b| b.probability != 0.0)
                .map(|b| {
                    let (child, suffix) = prune(&b.child, true);
                    Branch { label: joined(&b.label, suffix), probability: b.probability, child }
                })
                .collect();
            if collapsible && kept.len() == 1 {
                let only = kept.pop().expect("one branch");
                return (only.child, Some(only.label));
            }
            (Node::Chance { label: label.clone(), branches: kept }, None)
        }
    }
}

/// Tom pursues Alice after a censored broadcast iff `C + I >= D`.
///
/// H is charged on both sides of this comparison and cancels.
pub fn rule_deanon_censored(p: &GameParameters) -> bool {
    p.tom.censored_jailed + p.deanon_cost >= p.tom.censored_anonymous
}

/// Tom pursues Alice after an uncensored broadcast iff
/// `z F + (1 - z) G + I >= E`.
///
/// This is the comparison implied by the outcome structure: a pursuit ends
/// in impunity (F) when Harry is strong and jail (G) when he is weak, while
/// not pursuing leaves Alice anonymous (E) either way. The printed form
/// `zG + (1-z)E + I >= F` swaps these roles; see the module docs.
pub fn rule_deanon_uncensored(p: &GameParameters) -> bool {
    let z = p.harry_strong;
    z * p.tom.uncensored_impunity + (1.0 - z) * p.tom.uncensored_jailed + p.deanon_cost >= p.tom.uncensored_anonymous
}

/// Tom blocks Duncan iff `B >= E(U_3)`, his value at the censorship node.
pub fn rule_block(p: &GameParameters, u3: Payoff) -> bool {
    p.tom.blocked >= u3
}

/// Tom's values at the six numbered de-anonymisation nodes, indexed by
/// node number minus 4 (nodes 4 through 9).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeanonValues(pub [f64; 6]);

impl DeanonValues {
    pub fn at(&self, node: u8) -> f64 {
        self.0[usize::from(node - 4)]
    }
}

/// Tom attempts censorship iff the World-weighted value after `censor`
/// (nodes 9, 7, 5) is at least that after `hold` (nodes 8, 6, 4).
///
/// The World-supports-Duncan subgames are weighted by `y`; the printed
/// inequality uses `z` there, which is Harry's probability and does not
/// belong at this node.
pub fn rule_censor(p: &GameParameters, u: &DeanonValues) -> bool {
    let (x, y, n) = (p.world_tom, p.world_duncan, 1.0 - p.world_tom - p.world_duncan);
    x * u.at(9) + n * u.at(7) + y * u.at(5) >= x * u.at(8) + n * u.at(6) + y * u.at(4)
}

/// Alice's expected value of leaking: `(1 - w) a + w v`, where `v` is her
/// value once Duncan trusts her. She leaks iff this is strictly positive.
pub fn alice_leak_value(p: &GameParameters, tom_subgame_value_for_alice: f64) -> f64 {
    (1.0 - p.trust) * p.alice.no_trust + p.trust * tom_subgame_value_for_alice
}

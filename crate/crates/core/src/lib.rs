//! Sequential-move whistleblowing game.
//!
//! * [`game`]: generic two-player extensive-form trees with chance nodes.
//! * [`solver`]: backward induction under per-player risk attitudes.
//! * [`model`]: the whistleblowing tree, its variants and closed-form rules.
//! * [`oracle`]: brute-force enumeration of pure profiles.
//! * [`analysis`]: sweeps, threshold search, lever report, Monte Carlo.
//! * [`scenario`] and [`render`]: file formats and exports.
//! * [`cli`]: the `wbgame` command line.

pub mod analysis;
pub mod cli;
pub mod game;
pub mod model;
pub mod oracle;
pub mod payoff;
pub mod render;
pub mod scenario;
pub mod solver;

pub use game::{
    count_nodes, reachable_probability, validate_tree, Node, NodeCounts, NodeId, PlayerId, PlayerValues,
    StrategyProfile, ValidationReport,
};
pub use model::{build_game, prune_zero, GameParameters, OutcomeClass, Param, Variant};
pub use payoff::Payoff;
pub use solver::{expected_utility, risk_transform, solve, RiskProfile, SolveResult, TiePolicy, TieRule};

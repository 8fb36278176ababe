//! Comparative statics over [`GameParameters`].

mod levers;
mod simulate;
mod sweep;
mod threshold;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameError, NodeId};
use crate::model::{build_game, GameParameters, ParamError, LEAK};
use crate::solver::{solve, RiskProfile, SolveError, SolveResult, TiePolicy};

pub use crate::model::OutcomeClass;
pub use levers::{lever_report, Lever, LeverOutcome, LeverReport, LeverRow};
pub use simulate::{simulate, ClassFrequency, PlayerStats, SimulationReport, GENERATOR, PLAYOUTS_PER_BATCH};
pub use sweep::{linspace, sweep, SweepRow, SweepTable};
pub use threshold::{find_threshold, scan_for_flip, ThresholdReport, PRESCAN_POINTS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("grid must be non-empty and strictly increasing")]
    Grid,
    #[error("invalid bracket [{lo}, {hi}] with tolerance {tol}")]
    InvalidBracket { lo: f64, hi: f64, tol: f64 },
    #[error("same outcome ({outcome}) at both ends of [{lo}, {hi}]")]
    SameOutcome { lo: f64, hi: f64, outcome: OutcomeSet },
    #[error("at {param} = {value}: {message}")]
    Point { param: String, value: f64, message: String },
    #[error("Alice already leaks in the base configuration")]
    AlreadyLeaks,
    #[error("playout count must be at least 1")]
    NoPlayouts,
}

/// Parameters plus the solver configuration they are analysed under.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Setup {
    pub params: GameParameters,
    pub risk: RiskProfile,
    pub ties: TiePolicy,
}

impl Setup {
    pub fn new(params: GameParameters) -> Self {
        Setup { params, risk: RiskProfile::NEUTRAL, ties: TiePolicy::default() }
    }

    pub fn solve(&self) -> Result<SolveResult, AnalysisError> {
        let tree = build_game(&self.params)?;
        Ok(solve(&tree, &self.risk, &self.ties)?)
    }
}

/// Probability of each outcome class. Terminals whose label is not a class
/// slug are ignored.
pub fn class_distribution(result: &SolveResult) -> BTreeMap<OutcomeClass, f64> {
    let mut out = BTreeMap::new();
    for t in &result.terminals {
        if let Some(class) = OutcomeClass::from_slug(&t.label) {
            *out.entry(class).or_insert(0.0) += t.probability;
        }
    }
    out
}

/// Whether Alice's equilibrium choice at the root is to leak.
pub fn alice_leaks(result: &SolveResult) -> bool {
    result.choice(&NodeId::root()) == Some(LEAK)
}

/// The set of outcome classes reached with positive probability.
///
/// Two parameter points have the same equilibrium outcome when these sets
/// are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeSet(pub BTreeSet<OutcomeClass>);

impl OutcomeSet {
    pub fn of(result: &SolveResult) -> Self {
        OutcomeSet(class_distribution(result).into_iter().filter(|(_, p)| *p > 0.0).map(|(c, _)| c).collect())
    }

    pub fn contains(&self, class: OutcomeClass) -> bool {
        self.0.contains(&class)
    }
}

impl fmt::Display for OutcomeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("(none)");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The most probable outcome class; ties go to the earlier class.
pub fn modal_class(result: &SolveResult) -> Option<OutcomeClass> {
    let dist = class_distribution(result);
    let mut best: Option<(OutcomeClass, f64)> = None;
    for (c, p) in dist {
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((c, p));
        }
    }
    best.map(|(c, _)| c)
}

/// Worker pool size from `WBGAME_THREADS` (unset or 0 means automatic).
pub fn thread_pool_from_env() -> rayon::ThreadPool {
    let n = std::env::var("WBGAME_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool")
}

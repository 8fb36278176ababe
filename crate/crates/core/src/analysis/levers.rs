//! Minimal parameter changes that make Alice leak.
//!
//! Three levers are searched, each in one direction from the base value:
//!
//! | lever            | parameter | direction | range                    |
//! |------------------|-----------|-----------|--------------------------|
//! | time-to-publish  | `B`       | down      | `[B - span, B]`          |
//! | de-anon cost     | `I`       | down      | `[I - span, I]`          |
//! | trust            | `w`       | up        | `[w, 1]`                 |
//!
//! `span` is `100 * max(1, largest finite |payoff or cost|)`. Faster
//! publication is modelled as blocking becoming worse for Tom (`B` falling
//! toward `-inf`) rather than as a structural change.

use std::fmt;

use serde::Serialize;

use super::threshold::locate_flip;
use super::{alice_leaks, AnalysisError, OutcomeSet, Setup};
use crate::model::Param;
use crate::payoff::Payoff;

/// Search span multiplier for the payoff-valued levers.
const SPAN_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lever {
    TimeToPublish,
    DeanonCost,
    Trust,
}

impl Lever {
    pub const ALL: [Lever; 3] = [Lever::TimeToPublish, Lever::DeanonCost, Lever::Trust];

    pub fn param(self) -> Param {
        match self {
            Lever::TimeToPublish => Param::TomBlocked,
            Lever::DeanonCost => Param::DeanonCost,
            Lever::Trust => Param::W,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Lever::TimeToPublish => "reduce time-to-publish (lower B)",
            Lever::DeanonCost => "raise the cost of de-anonymising Alice (lower I)",
            Lever::Trust => "ease trust between Alice and Duncan (raise w)",
        }
    }
}

impl fmt::Display for Lever {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lever::TimeToPublish => "time-to-publish",
            Lever::DeanonCost => "deanon-cost",
            Lever::Trust => "trust",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum LeverOutcome {
    Flip {
        /// Parameter value at which Alice starts leaking.
        critical: f64,
        half_width: f64,
        /// `|critical - base|`.
        change: f64,
        outcome: OutcomeSet,
    },
    NoFlip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeverRow {
    pub lever: Lever,
    pub param: Param,
    /// Base value of the parameter (`-inf` allowed for `B`).
    pub base: Payoff,
    /// Far end of the searched range.
    pub limit: f64,
    pub outcome: LeverOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeverReport {
    pub tol: f64,
    pub rows: Vec<LeverRow>,
}

fn span(base: &Setup) -> f64 {
    let largest = Param::ALL
        .into_iter()
        .filter(|p| !p.is_probability())
        .filter_map(|p| base.params.get(p).as_finite())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    SPAN_FACTOR * largest
}

fn search(base: &Setup, lever: Lever, tol: f64) -> Result<LeverRow, AnalysisError> {
    let param = lever.param();
    let base_value = base.params.get(param);
    let no_flip = |limit| LeverRow { lever, param, base: base_value, limit, outcome: LeverOutcome::NoFlip };
    let Payoff::Finite(start) = base_value else {
        // B is already -inf: nothing further to lower.
        return Ok(no_flip(f64::NEG_INFINITY));
    };
    let limit = match lever {
        Lever::TimeToPublish | Lever::DeanonCost => start - span(base),
        Lever::Trust => 1.0,
    };
    if limit == start {
        return Ok(no_flip(limit));
    }
    let Some(flip) = locate_flip(base, param, start, limit, tol)? else {
        return Ok(no_flip(limit));
    };
    let critical = 0.5 * (flip.near + flip.far);
    Ok(LeverRow {
        lever,
        param,
        base: base_value,
        limit,
        outcome: LeverOutcome::Flip {
            critical,
            half_width: 0.5 * (flip.far - flip.near).abs(),
            change: (critical - start).abs(),
            outcome: flip.far_outcome,
        },
    })
}

/// For each lever, the nearest parameter value (from the base, within the
/// lever's range) at which Alice's equilibrium choice becomes leaking.
pub fn lever_report(base: &Setup, tol: f64) -> Result<LeverReport, AnalysisError> {
    if alice_leaks(&base.solve()?) {
        return Err(AnalysisError::AlreadyLeaks);
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(AnalysisError::InvalidBracket { lo: 0.0, hi: 0.0, tol });
    }
    let rows = Lever::ALL.into_iter().map(|l| search(base, l, tol)).collect::<Result<_, _>>()?;
    Ok(LeverReport { tol, rows })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::passive_tom;
    use super::*;

    #[test]
    fn trust_lever_needs_a_good_subgame() {
        // w = 0, a < 0: raising w helps only if the trusted subgame is
        // positive for Alice.
        let mut p = passive_tom(0.0, -1.0, 5.0);
        let report = lever_report(&Setup::new(p), 1e-9).unwrap();
        let trust = &report.rows[2];
        assert_eq!(trust.lever, Lever::Trust);
        let LeverOutcome::Flip { critical, .. } = trust.outcome else { panic!("{trust:?}") };
        assert!((critical - 1.0 / 6.0).abs() < 1e-8);

        p.alice.uncensored_anonymous = -0.5;
        let report = lever_report(&Setup::new(p), 1e-9).unwrap();
        assert_eq!(report.rows[2].outcome, LeverOutcome::NoFlip);
    }

    #[test]
    fn time_to_publish_lever_finds_finite_b() {
        // Tom blocks (B = 5 beats everything after proceeding), while the
        // post-proceed subgame is good for Alice: lowering B below Tom's
        // value at the censorship node (0 here) makes Alice leak.
        let mut p = passive_tom(0.9, -1.0, 5.0);
        p.tom.blocked = Payoff::Finite(5.0);
        let base = Setup::new(p);
        let r = base.solve().unwrap();
        assert!(!alice_leaks(&r));
        let report = lever_report(&base, 1e-9).unwrap();
        let LeverOutcome::Flip { critical, .. } = report.rows[0].outcome else { panic!() };
        assert!(critical.abs() < 1e-8, "{critical}");
    }

    #[test]
    fn neg_inf_block_cannot_go_lower() {
        let mut p = passive_tom(0.0, -1.0, 5.0);
        p.tom.blocked = Payoff::NegInf;
        let report = lever_report(&Setup::new(p), 1e-9).unwrap();
        assert_eq!(report.rows[0].outcome, LeverOutcome::NoFlip);
    }

    #[test]
    fn refuses_a_leaking_base() {
        let base = Setup::new(passive_tom(0.9, -1.0, 5.0));
        assert_eq!(lever_report(&base, 1e-6), Err(AnalysisError::AlreadyLeaks));
    }
}

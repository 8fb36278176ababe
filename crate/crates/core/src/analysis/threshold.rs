use serde::Serialize;

use super::{AnalysisError, OutcomeSet, Setup};
use crate::model::Param;
use crate::payoff::Payoff;

/// Points in the pre-scan that guards bisection against multiple flips.
pub const PRESCAN_POINTS: usize = 64;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    /// Midpoint of the final bracket.
    pub critical: f64,
    /// Half-width of the final bracket; the flip lies in
    /// `critical ± half_width`.
    pub half_width: f64,
    /// Outcome on the `lo` side of the flip.
    pub below: OutcomeSet,
    /// Outcome on the `hi` side of the flip.
    pub above: OutcomeSet,
    /// False when the pre-scan saw more than one change of outcome; the
    /// report then describes the change nearest the starting end.
    pub monotone: bool,
}

pub(super) fn outcome_at(base: &Setup, param: Param, value: f64) -> Result<OutcomeSet, AnalysisError> {
    let mut s = *base;
    s.params.set(param, Payoff::Finite(value));
    s.solve()
        .map(|r| OutcomeSet::of(&r))
        .map_err(|e| AnalysisError::Point { param: param.to_string(), value, message: e.to_string() })
}

/// A located change of outcome between `near` and `far`, searched from the
/// `start` end of an oriented interval.
pub(super) struct Flip {
    pub near: f64,
    pub far: f64,
    pub near_outcome: OutcomeSet,
    pub far_outcome: OutcomeSet,
    pub changes_seen: usize,
}

/// Pre-scans `start..=end` (either orientation) and bisects the first cell,
/// counted from `start`, in which the outcome changes. `None` when the scan
/// sees no change.
pub(super) fn locate_flip(
    base: &Setup,
    param: Param,
    start: f64,
    end: f64,
    tol: f64,
) -> Result<Option<Flip>, AnalysisError> {
    let n = PRESCAN_POINTS;
    let points: Vec<f64> =
        (0..n).map(|i| if i == n - 1 { end } else { start + (end - start) * i as f64 / (n - 1) as f64 }).collect();
    let outcomes = points.iter().map(|&v| outcome_at(base, param, v)).collect::<Result<Vec<_>, _>>()?;
    let changes: Vec<usize> = (1..n).filter(|&i| outcomes[i] != outcomes[i - 1]).collect();
    let Some(&first) = changes.first() else { return Ok(None) };

    let (mut near, mut far) = (points[first - 1], points[first]);
    let near_outcome = outcomes[first - 1].clone();
    let mut far_outcome = outcomes[first].clone();
    for _ in 0..MAX_BISECTIONS {
        if (far - near).abs() <= tol {
            break;
        }
        let mid = 0.5 * (near + far);
        if mid == near || mid == far {
            break;
        }
        let o = outcome_at(base, param, mid)?;
        if o == near_outcome {
            near = mid;
        } else {
            far = mid;
            far_outcome = o;
        }
    }
    Ok(Some(Flip { near, far, near_outcome, far_outcome, changes_seen: changes.len() }))
}

/// Bisection for the parameter value at which the equilibrium outcome
/// changes, to bracket width `<= tol`.
pub fn find_threshold(base: &Setup, param: Param, lo: f64, hi: f64, tol: f64) -> Result<ThresholdReport, AnalysisError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi && tol > 0.0 && tol.is_finite()) {
        return Err(AnalysisError::InvalidBracket { lo, hi, tol });
    }
    let at_lo = outcome_at(base, param, lo)?;
    let at_hi = outcome_at(base, param, hi)?;
    if at_lo == at_hi {
        return Err(AnalysisError::SameOutcome { lo, hi, outcome: at_lo });
    }
    let flip = locate_flip(base, param, lo, hi, tol)?.expect("endpoints differ, so the scan sees a change");
    Ok(ThresholdReport {
        param,
        lo,
        hi,
        critical: 0.5 * (flip.near + flip.far),
        half_width: 0.5 * (flip.far - flip.near),
        below: flip.near_outcome,
        above: flip.far_outcome,
        monotone: flip.changes_seen == 1,
    })
}

/// Brute-force locator: the first grid cell `[g[i-1], g[i]]` of an
/// `points`-point uniform grid over `[lo, hi]` whose ends differ in outcome.
pub fn scan_for_flip(
    base: &Setup,
    param: Param,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Option<(f64, f64)>, AnalysisError> {
    let grid = super::linspace(lo, hi, points);
    let mut prev: Option<(f64, OutcomeSet)> = None;
    for v in grid {
        let o = outcome_at(base, param, v)?;
        if let Some((pv, po)) = &prev {
            if *po != o {
                return Ok(Some((*pv, v)));
            }
        }
        prev = Some((v, o));
    }
    Ok(None)
}

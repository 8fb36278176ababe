use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{alice_leaks, class_distribution, AnalysisError, OutcomeClass, Setup};
use crate::game::PlayerValues;
use crate::model::Param;
use crate::payoff::Payoff;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// Set when the grid point yields invalid parameters or fails to solve;
    /// the remaining fields are then empty.
    pub error: Option<String>,
    pub alice_leaks: Option<bool>,
    pub root_value: Option<PlayerValues>,
    pub classes: BTreeMap<OutcomeClass, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub param: Param,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }
}

fn row(base: &Setup, param: Param, value: f64) -> SweepRow {
    let mut setup = *base;
    setup.params.set(param, Payoff::Finite(value));
    match setup.solve() {
        Ok(r) => SweepRow {
            value,
            error: None,
            alice_leaks: Some(alice_leaks(&r)),
            root_value: Some(r.root_value),
            classes: class_distribution(&r),
        },
        Err(e) => SweepRow { value, error: Some(e.to_string()), alice_leaks: None, root_value: None, classes: BTreeMap::new() },
    }
}

/// Solves once per grid point. Invalid points are reported in their row and
/// do not stop the sweep. Rows are computed in parallel on the current rayon
/// pool and returned in grid order.
pub fn sweep(base: &Setup, param: Param, grid: &[f64]) -> Result<SweepTable, AnalysisError> {
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::Grid);
    }
    let rows = grid.par_iter().map(|&v| row(base, param, v)).collect();
    Ok(SweepTable { param, rows })
}

/// `steps` evenly spaced points from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let n = (steps - 1) as f64;
            (0..steps)
                .map(|i| if i == steps - 1 { to } else { (from * (n - i as f64) + to * i as f64) / n })
                .collect()
        }
    }
}

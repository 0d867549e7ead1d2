use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::ExtendedReal;

/// Which coordinates an iteration updated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepIndex {
    /// No step taken (the run stopped at this iteration).
    None,
    Coordinate(usize),
    All,
}

impl fmt::Display for StepIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepIndex::None => f.write_str("-"),
            StepIndex::Coordinate(j) => write!(f, "{j}"),
            StepIndex::All => f.write_str("all"),
        }
    }
}

impl FromStr for StepIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "-" => Ok(StepIndex::None),
            "all" => Ok(StepIndex::All),
            other => other
                .parse::<usize>()
                .map(StepIndex::Coordinate)
                .map_err(|_| Error::InvalidInput(format!("bad step index '{other}'"))),
        }
    }
}

/// One row of a convergence trace, describing iterate `Y^(t)` and the step
/// taken from it.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub objective: ExtendedReal,
    pub max_violation: f64,
    pub step: StepIndex,
    /// Full step vector `δ^(t)` (zeros for untouched coordinates).
    pub delta: Vec<f64>,
    pub trace_y: f64,
    pub seconds: f64,
    /// Auxiliary-function value `A(Y^(t), δ^(t))` when a step was taken.
    pub auxiliary: Option<f64>,
}

/// Final state of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    BudgetExhausted,
    /// Objective decrease fell below the configured tolerance before the
    /// violation tolerance was met.
    Stalled,
    UnboundedStep,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::BudgetExhausted => "budget_exhausted",
            Status::Stalled => "stalled",
            Status::UnboundedStep => "unbounded_step",
            Status::Error => "error",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::BudgetExhausted | Status::Stalled => 2,
            Status::UnboundedStep => 3,
            Status::Error => 1,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Events noted during a run, each tagged with the iteration it happened in.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceFlags {
    /// The family has no strong-convexity certificate; descent is not guaranteed
    /// for the approximate solvers.
    pub strong_convexity_unverified: bool,
    /// `(t, j)`: step clamped to `±δ_max`.
    pub clamped: Vec<(usize, usize)>,
    /// `(t, j)`: step equation had no finite solution.
    pub unbounded: Vec<(usize, usize)>,
    /// `(t, j)`: coordinate held at zero (zero target in iterative scaling).
    pub frozen: Vec<(usize, usize)>,
    /// Iterations whose objective rose by more than the descent slack.
    pub descent_violations: Vec<usize>,
}

/// Per-iteration record of a solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTrace {
    pub algorithm: String,
    pub family: String,
    pub records: Vec<TraceRecord>,
    pub flags: TraceFlags,
    pub status: Status,
}

impl ConvergenceTrace {
    pub fn new(algorithm: &str, family: &str) -> Self {
        ConvergenceTrace {
            algorithm: algorithm.to_string(),
            family: family.to_string(),
            records: Vec::new(),
            flags: TraceFlags::default(),
            status: Status::BudgetExhausted,
        }
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn objectives(&self) -> Vec<ExtendedReal> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// Iterations `t` whose objective exceeds the previous one by more than
    /// `slack·max(1, |previous|)`.
    pub fn monotonicity_breaks(&self, slack: f64) -> Vec<usize> {
        monotonicity_breaks(&self.objectives(), slack)
            .into_iter()
            .map(|i| self.records[i].t)
            .collect()
    }

    /// Step vectors in iteration order, excluding the final no-step row.
    pub fn deltas(&self) -> Vec<Vec<f64>> {
        self.records
            .iter()
            .filter(|r| r.step != StepIndex::None)
            .map(|r| r.delta.clone())
            .collect()
    }
}

/// Indices `i ≥ 1` with `objective[i] > objective[i-1] + slack·max(1, |objective[i-1]|)`.
pub fn monotonicity_breaks(objectives: &[ExtendedReal], slack: f64) -> Vec<usize> {
    objectives
        .windows(2)
        .enumerate()
        .filter(|(_, w)| match (w[0], w[1]) {
            (_, ExtendedReal::PosInfinity) => w[0].is_finite(),
            (ExtendedReal::PosInfinity, _) => false,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => b > a + slack * a.abs().max(1.0),
        })
        .map(|(i, _)| i + 1)
        .collect()
}

/// Receives trace rows as a run progresses.
pub trait TraceSink {
    fn record(&mut self, record: &TraceRecord);
}

/// Discards every row.
#[derive(Debug, Default)]
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _record: &TraceRecord) {}
}

impl<F: FnMut(&TraceRecord)> TraceSink for F {
    fn record(&mut self, record: &TraceRecord) {
        self(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotonicity_detects_rises() {
        let obj = [
            ExtendedReal::PosInfinity,
            ExtendedReal::Finite(2.0),
            ExtendedReal::Finite(1.0),
            ExtendedReal::Finite(1.0 + 1e-12),
            ExtendedReal::Finite(1.5),
        ];
        assert_eq!(monotonicity_breaks(&obj, 1e-9), vec![4]);
    }

    #[test]
    fn step_index_round_trip() {
        for s in [StepIndex::None, StepIndex::All, StepIndex::Coordinate(3)] {
            assert_eq!(s.to_string().parse::<StepIndex>().unwrap(), s);
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Converged.exit_code(), 0);
        assert_eq!(Status::BudgetExhausted.exit_code(), 2);
        assert_eq!(Status::UnboundedStep.exit_code(), 3);
        assert_eq!(Status::Error.exit_code(), 1);
    }
}

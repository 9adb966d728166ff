//! Solving CNF formulas: an embedded CDCL solver and a wrapper around any
//! external DIMACS solver process.

mod cdcl;
mod external;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::CnfFormula;

pub use cdcl::{solve_embedded, Heuristic, Restarts, SolverConfig};
pub use external::{parse_solver_output, solve_external, SolverOutput};

/// Default wall-clock limit for one embedded solve.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    /// The external solver claimed SAT but its model falsifies a clause.
    #[error("solver model falsifies clause {clause} ({lits:?})")]
    ModelRejected { clause: usize, lits: Vec<i32> },
    #[error("cannot write DIMACS file: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Satisfiable,
    Unsatisfiable,
    Timeout,
    Unknown,
}

impl Status {
    pub fn short(&self) -> &'static str {
        match self {
            Status::Satisfiable => "SAT",
            Status::Unsatisfiable => "UNSAT",
            Status::Timeout => "TIMEOUT",
            Status::Unknown => "UNKNOWN",
        }
    }
}

/// Limits for one solve call. `None` means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub time: Option<Duration>,
    pub conflicts: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            time: Some(DEFAULT_TIMEOUT),
            conflicts: None,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            time: None,
            conflicts: None,
        }
    }

    pub fn seconds(secs: f64) -> Self {
        Budget {
            time: Some(Duration::from_secs_f64(secs)),
            conflicts: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learned: u64,
    pub wall_time: Duration,
}

impl SolveStats {
    /// The counters without the wall time, for determinism checks.
    pub fn counters(&self) -> (u64, u64, u64, u64, u64) {
        (
            self.decisions,
            self.propagations,
            self.conflicts,
            self.restarts,
            self.learned,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: Status,
    /// `model[v - 1]` is the value of variable `v`; present iff satisfiable.
    pub model: Option<Vec<bool>>,
    pub stats: SolveStats,
    pub diagnostic: Option<String>,
}

impl SolveOutcome {
    pub(crate) fn without_model(
        status: Status,
        stats: SolveStats,
        diagnostic: Option<String>,
    ) -> Self {
        SolveOutcome {
            status,
            model: None,
            stats,
            diagnostic,
        }
    }
}

/// Where formulas get solved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Embedded(SolverConfig),
    /// Command template; `{cnf}` is replaced by the DIMACS file path.
    External(String),
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Embedded(SolverConfig::default())
    }
}

impl Backend {
    pub fn solve(&self, f: &CnfFormula, budget: &Budget) -> Result<SolveOutcome, SatError> {
        match self {
            Backend::Embedded(config) => Ok(solve_embedded(f, budget, config)),
            Backend::External(cmd) => solve_external(f, cmd, budget),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Backend::Embedded(c) => format!(
                "embedded({:?}, {:?} restarts, seed {})",
                c.heuristic, c.restarts, c.seed
            ),
            Backend::External(cmd) => format!("external({cmd})"),
        }
    }
}

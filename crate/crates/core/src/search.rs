//! Finding the largest minimal cube length for given `(n, u, group)`.
//!
//! The search starts at the density bound and walks `k` downwards until
//! the first satisfiable instance; every model is decoded and verified
//! before it is reported.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{density_bound, BoundsError};
use crate::dnf::{Dnf, DnfError, VerificationReport};
use crate::encoder::{build_instance, EncodeError, EncodeOptions, Encoding, Instance, VarMap};
use crate::groups::{GroupKind, GroupSpec};
use crate::sat::{Backend, Budget, SatError, SolveStats, Status};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Dnf(#[from] DnfError),
    /// A decoded model is not a qualifying DNF. Always a bug somewhere in
    /// the pipeline; the formula and the model are written next to each
    /// other for inspection.
    #[error(
        "decoded DNF failed verification (n={n} u={u} k={k}): {report:?}; artifacts: {artifacts:?}"
    )]
    Verification {
        n: u32,
        u: u32,
        k: u32,
        report: Box<VerificationReport>,
        artifacts: Vec<PathBuf>,
    },
}

/// How instances get encoded and solved.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub backend: Backend,
    pub budget: Budget,
    pub options: EncodeOptions,
}

/// One solved `(n, u, k, group)` instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub k: u32,
    pub status: Status,
    pub seconds: f64,
    pub vars: u32,
    pub clauses: usize,
    pub stats: SolveStats,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: u32,
    pub u: u32,
    pub group: GroupKind,
    /// Largest `k` with a verified witness; `0` when every `k >= 1` is
    /// refuted; `None` when nothing was found and some attempt timed out.
    pub k_found: Option<u32>,
    pub k_density_bound: i32,
    /// Every attempted `k`, keyed by `k`.
    pub attempts: BTreeMap<u32, Attempt>,
    pub witness: Option<Dnf>,
    pub matched_bound: bool,
    /// No attempt above `k_found` ended without a proof.
    pub proven_optimal: bool,
}

impl SearchResult {
    pub fn status_at(&self, k: u32) -> Option<Status> {
        self.attempts.get(&k).map(|a| a.status)
    }

    pub fn total_seconds(&self) -> f64 {
        self.attempts.values().map(|a| a.seconds).sum()
    }
}

/// Builds the DNF selected by `model` and checks it against every
/// requirement of the instance. A failure dumps the formula and the model
/// to the temporary directory and returns [`SearchError::Verification`].
pub fn decode_and_verify(
    model: &[bool],
    vm: &VarMap,
    n: u32,
    u: u32,
    k: u32,
    group: &GroupSpec,
    dimacs: impl FnOnce() -> String,
) -> Result<Dnf, SearchError> {
    let d = vm.decode(n, model)?;
    let report = d.verify(k, u, Some(group))?;
    if report.passed() {
        return Ok(d);
    }
    let stem = std::env::temp_dir().join(format!(
        "dnftaut-failure-{}-n{n}-u{u}-k{k}-{}",
        std::process::id(),
        group.kind
    ));
    let cnf_path = stem.with_extension("cnf");
    let model_path = stem.with_extension("model");
    let model_text: Vec<String> = model
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b {
                (i + 1).to_string()
            } else {
                format!("-{}", i + 1)
            }
        })
        .collect();
    let mut artifacts = Vec::new();
    if std::fs::write(&cnf_path, dimacs()).is_ok() {
        artifacts.push(cnf_path);
    }
    if std::fs::write(&model_path, format!("v {} 0\n", model_text.join(" "))).is_ok() {
        artifacts.push(model_path);
    }
    Err(SearchError::Verification {
        n,
        u,
        k,
        report: Box::new(report),
        artifacts,
    })
}

/// Encodes and solves one instance, returning the attempt and, when
/// satisfiable, the verified witness.
pub fn solve_instance(
    n: u32,
    u: u32,
    k: u32,
    group: &GroupSpec,
    config: &SearchConfig,
) -> Result<(Attempt, Option<Dnf>), SearchError> {
    let started = Instant::now();
    let options = config.options.for_group(group);
    let enc: Encoding = build_instance(n, u, k, group, options)?;
    let formula = match &enc.instance {
        Instance::Cnf(f) => f,
        Instance::TriviallyUnsat { uncovered } => {
            let attempt = Attempt {
                k,
                status: Status::Unsatisfiable,
                seconds: started.elapsed().as_secs_f64(),
                vars: enc.var_map.total_vars(),
                clauses: 0,
                stats: SolveStats::default(),
                diagnostic: Some(format!("{uncovered} is covered by no cube")),
            };
            return Ok((attempt, None));
        }
    };
    let outcome = config.backend.solve(formula, &config.budget)?;
    let witness = match (&outcome.status, &outcome.model) {
        (Status::Satisfiable, Some(model)) => Some(decode_and_verify(
            model,
            &enc.var_map,
            n,
            u,
            k,
            group,
            || enc.to_dimacs(),
        )?),
        _ => None,
    };
    let attempt = Attempt {
        k,
        status: outcome.status,
        seconds: started.elapsed().as_secs_f64(),
        vars: formula.num_vars(),
        clauses: formula.num_clauses(),
        stats: outcome.stats,
        diagnostic: outcome.diagnostic,
    };
    Ok((attempt, witness))
}

/// Largest `k` for which a qualifying DNF exists, searching downward from
/// the density bound.
pub fn max_k(
    n: u32,
    u: u32,
    group: &GroupSpec,
    config: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    let bound = density_bound(n, u)?.k_max_bound;
    let mut attempts = BTreeMap::new();
    let mut found = None;
    let mut unresolved = false;
    for k in (1..=bound.max(0) as u32).rev() {
        let (attempt, witness) = solve_instance(n, u, k, group, config)?;
        let status = attempt.status;
        attempts.insert(k, attempt);
        match status {
            Status::Satisfiable => {
                found = Some((k, witness.expect("satisfiable attempts carry a witness")));
                break;
            }
            Status::Unsatisfiable => {}
            Status::Timeout | Status::Unknown => unresolved = true,
        }
    }
    // refutations of a restricted instance say nothing about the real one
    let restricted = config.options.symmetry_with_group && !group.is_trivial();
    let (k_found, witness) = match found {
        Some((k, w)) => (Some(k), Some(w)),
        None if unresolved => (None, None),
        None => (Some(0), None),
    };
    Ok(SearchResult {
        n,
        u,
        group: group.kind,
        k_found,
        k_density_bound: bound,
        attempts,
        witness,
        matched_bound: k_found.map(|k| k as i32) == Some(bound),
        proven_optimal: k_found.is_some() && !unresolved && !restricted,
    })
}

/// Existence of a qualifying DNF whose cubes all have length exactly `k`.
pub fn exact_k(
    n: u32,
    k: u32,
    group: &GroupSpec,
    config: &SearchConfig,
) -> Result<(Attempt, Option<Dnf>), SearchError> {
    solve_instance(n, k, k, group, config)
}

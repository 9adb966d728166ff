//! Recomputation of the known result grids and comparison against them.
//!
//! Grids have `u` growing downwards and `n` growing to the right, starting
//! at 2 in both directions. Reference values are embedded; an entry marked
//! open was found but never proven optimal by its authors.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::density_bound;
use crate::groups::{GroupKind, GroupSpec};
use crate::search::{max_k, SearchConfig, SearchError, SearchResult};
use crate::store::{ResultStore, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Plain,
    CyclicDihedral,
    AlternatingSymmetric,
}

impl TableKind {
    pub const ALL: [TableKind; 3] = [
        TableKind::Plain,
        TableKind::CyclicDihedral,
        TableKind::AlternatingSymmetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Plain => "plain",
            TableKind::CyclicDihedral => "cyclic_dihedral",
            TableKind::AlternatingSymmetric => "alternating_symmetric",
        }
    }

    /// Groups whose grids are reported together.
    pub fn groups(self) -> &'static [GroupKind] {
        match self {
            TableKind::Plain => &[GroupKind::Trivial],
            TableKind::CyclicDihedral => &[GroupKind::Cyclic, GroupKind::Dihedral],
            TableKind::AlternatingSymmetric => &[GroupKind::Alternating, GroupKind::Symmetric],
        }
    }

    /// Largest `n` with reference values.
    pub fn reference_n_max(self) -> u32 {
        match self {
            TableKind::Plain | TableKind::CyclicDihedral => 10,
            TableKind::AlternatingSymmetric => 14,
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "plain" | "none" => Ok(TableKind::Plain),
            "cyclic_dihedral" | "cd" => Ok(TableKind::CyclicDihedral),
            "alternating_symmetric" | "as" => Ok(TableKind::AlternatingSymmetric),
            other => Err(format!(
                "unknown table `{other}` (expected plain, cyclic_dihedral, alternating_symmetric)"
            )),
        }
    }
}

/// One reference value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reference {
    pub k: u32,
    /// Printed boxed in the source grid.
    pub boxed: bool,
    /// Printed with a question mark: found, optimality not established.
    pub open: bool,
}

// Rows u = 2..=10. Each token is one column starting at n = u:
// digits, optionally with `b` (boxed) and/or `?` (open).
const PLAIN_ROWS: [&str; 9] = [
    "1 1 2 2 2 2 2 2 2",
    "1 2 2b 3 3 3 3 3",
    "2 3 3 4 4 4 4",
    "3 4 4 5 5 5",
    "4 4 5 5b 6",
    "4 5 6 6",
    "5 6 6b",
    "6 6b?",
    "6b?",
];

const CYCLIC_DIHEDRAL_ROWS: [&str; 9] = [
    "1 1 1 1 1 1 1 1 1",
    "1 2 2 2 3 3 3 3",
    "2 2b 3 3b 4 4 4",
    "2b 3b 4 4b 5 5",
    "3b 4 5 5 6",
    "4 5 6 6",
    "5 6 6?",
    "6 6?",
    "6?",
];

/// `k` found for `n = 1..=14`, `u = n`; `true` marks an open entry.
pub const FIRST_TABLE: [(u32, bool); 14] = [
    (0, false),
    (1, false),
    (1, false),
    (2, false),
    (3, false),
    (4, false),
    (4, false),
    (5, false),
    (6, false),
    (6, true),
    (7, false),
    (8, false),
    (9, false),
    (9, true),
];

/// `k` found for `n = 1..=14` with every cube of length exactly `k`.
pub const SECOND_TABLE: [(u32, bool); 14] = [
    (0, false),
    (0, false),
    (0, true),
    (2, false),
    (2, true),
    (3, false),
    (4, false),
    (5, false),
    (5, true),
    (6, false),
    (7, false),
    (8, false),
    (8, true),
    (9, false),
];

fn parse_cell(tok: &str) -> Reference {
    let digits: String = tok.chars().filter(char::is_ascii_digit).collect();
    Reference {
        k: digits.parse().expect("embedded grid"),
        boxed: tok.contains('b'),
        open: tok.contains('?'),
    }
}

fn from_rows(rows: &[&str], n: u32, u: u32) -> Option<Reference> {
    if u < 2 || n < u {
        return None;
    }
    let row = rows.get(u as usize - 2)?;
    row.split_whitespace().nth((n - u) as usize).map(parse_cell)
}

/// The reference value at `(n, u)`, if the grid has one.
pub fn reference(kind: TableKind, n: u32, u: u32) -> Option<Reference> {
    match kind {
        TableKind::Plain => from_rows(&PLAIN_ROWS, n, u),
        TableKind::CyclicDihedral => from_rows(&CYCLIC_DIHEDRAL_ROWS, n, u),
        TableKind::AlternatingSymmetric => (2 <= u && u <= n && n <= 14).then(|| Reference {
            k: (u - 1).min(n / 2),
            boxed: false,
            open: false,
        }),
    }
}

/// How far a table run goes before entries are skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// `n <= 6`.
    Default,
    /// `n <= 8`.
    Extended,
    /// No limit beyond what is requested.
    Full,
}

impl Tier {
    pub fn n_max(self) -> Option<u32> {
        match self {
            Tier::Default => Some(6),
            Tier::Extended => Some(8),
            Tier::Full => None,
        }
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "default" => Ok(Tier::Default),
            "extended" => Ok(Tier::Extended),
            "full" => Ok(Tier::Full),
            other => Err(format!(
                "unknown tier `{other}` (expected default, extended, full)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Agree,
    Disagree,
    Timeout,
    NotAttempted,
    /// Computed, but the reference grid has no entry here.
    NoReference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: u32,
    pub u: u32,
    pub group: GroupKind,
    pub k_density_bound: i32,
    pub reference: Option<Reference>,
    /// `None` when the entry was beyond the tier.
    pub result: Option<SearchResult>,
    pub verdict: Verdict,
}

impl Cell {
    pub fn k_found(&self) -> Option<u32> {
        self.result.as_ref().and_then(|r| r.k_found)
    }

    pub fn proven(&self) -> bool {
        self.result.as_ref().is_some_and(|r| r.proven_optimal)
    }
}

/// Compares a computed result with a reference value.
pub fn verdict(result: Option<&SearchResult>, reference: Option<Reference>) -> Verdict {
    let Some(r) = result else {
        return Verdict::NotAttempted;
    };
    let Some(refv) = reference else {
        return Verdict::NoReference;
    };
    match r.k_found {
        Some(k) if k == refv.k => Verdict::Agree,
        // a verified witness above the reference contradicts it whether or not
        // the search above it finished
        Some(k) if k > refv.k => Verdict::Disagree,
        _ if !r.proven_optimal => Verdict::Timeout,
        _ => Verdict::Disagree,
    }
}

/// A pair of grids that should coincide disagreeing at `(n, u)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossMismatch {
    pub n: u32,
    pub u: u32,
    pub values: Vec<(GroupKind, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub kind: TableKind,
    pub n_max: u32,
    pub u_max: u32,
    pub tier: Tier,
    pub cells: Vec<Cell>,
    /// Entries where every group finished with a proof but values differ.
    pub cross_mismatches: Vec<CrossMismatch>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TableOptions<'a> {
    pub n_max: u32,
    pub u_max: u32,
    pub tier: Tier,
    pub workers: usize,
    pub config: SearchConfig,
    pub store: Option<&'a ResultStore>,
    pub force: bool,
}

impl TableOptions<'_> {
    pub fn new(n_max: u32, config: SearchConfig) -> Self {
        TableOptions {
            n_max,
            u_max: n_max,
            tier: Tier::Default,
            workers: 1,
            config,
            store: None,
            force: false,
        }
    }
}

fn run_one(
    n: u32,
    u: u32,
    group: &GroupSpec,
    opts: &TableOptions<'_>,
) -> Result<SearchResult, StoreError> {
    match opts.store {
        Some(store) => Ok(store.max_k_cached(n, u, group, &opts.config, opts.force)?.0),
        None => Ok(max_k(n, u, group, &opts.config)?),
    }
}

/// Computes every `(n, u)` entry with `2 <= u <= min(n, u_max)` and
/// `2 <= n <= n_max` for each group of `kind`, skipping entries beyond the
/// tier, and compares them with the reference grid.
pub fn reproduce_table(
    kind: TableKind,
    opts: &TableOptions<'_>,
) -> Result<TableReport, StoreError> {
    let started = Instant::now();
    let limit = opts.tier.n_max().unwrap_or(u32::MAX);
    let mut jobs = Vec::new();
    for &g in kind.groups() {
        for n in 2..=opts.n_max {
            for u in 2..=n.min(opts.u_max) {
                jobs.push((g, n, u));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<Result<Cell, StoreError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(g, n, u)| {
                let group = GroupSpec::new(g, n).expect("valid group for n >= 2");
                let result = if n <= limit {
                    Some(run_one(n, u, &group, opts)?)
                } else {
                    None
                };
                let reference = reference(kind, n, u);
                Ok(Cell {
                    n,
                    u,
                    group: g,
                    k_density_bound: density_bound(n, u).map_err(SearchError::from)?.k_max_bound,
                    reference,
                    verdict: verdict(result.as_ref(), reference),
                    result,
                })
            })
            .collect()
    });
    let cells = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut by_entry: BTreeMap<(u32, u32), Vec<&Cell>> = BTreeMap::new();
    for c in &cells {
        by_entry.entry((c.n, c.u)).or_default().push(c);
    }
    let cross_mismatches = by_entry
        .into_iter()
        .filter_map(|((n, u), cs)| {
            if cs.len() < 2 || !cs.iter().all(|c| c.proven()) {
                return None;
            }
            let values: Vec<(GroupKind, u32)> = cs
                .iter()
                .map(|c| (c.group, c.k_found().expect("proven")))
                .collect();
            values
                .windows(2)
                .any(|w| w[0].1 != w[1].1)
                .then_some(CrossMismatch { n, u, values })
        })
        .collect();

    Ok(TableReport {
        kind,
        n_max: opts.n_max,
        u_max: opts.u_max,
        tier: opts.tier,
        cells,
        cross_mismatches,
        seconds: started.elapsed().as_secs_f64(),
    })
}

impl TableReport {
    pub fn cell(&self, group: GroupKind, n: u32, u: u32) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.group == group && c.n == n && c.u == u)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.cells.iter().filter(|c| c.verdict == v).count()
    }

    pub fn total_time(&self) -> Duration {
        Duration::from_secs_f64(self.seconds)
    }

    /// One grid per group: `[k]` when below the density bound, `k?` when
    /// not proven optimal, `T` for no answer, `-` when not attempted.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for &g in self.kind.groups() {
            let _ = writeln!(out, "{} ({g})", self.kind);
            let _ = write!(out, "{:>4} |", "u\\n");
            for n in 2..=self.n_max {
                let _ = write!(out, "{n:>6}");
            }
            out.push('\n');
            let _ = writeln!(
                out,
                "-----+{}",
                "-".repeat(6 * (self.n_max.saturating_sub(1)) as usize)
            );
            for u in 2..=self.u_max.min(self.n_max) {
                let _ = write!(out, "{u:>4} |");
                for n in 2..=self.n_max {
                    let text = match self.cell(g, n, u) {
                        None => String::new(),
                        Some(c) => match (&c.result, c.k_found()) {
                            (None, _) => "-".into(),
                            (Some(_), None) => "T".into(),
                            (Some(r), Some(k)) => {
                                let mut s = if (k as i32) < c.k_density_bound {
                                    format!("[{k}]")
                                } else {
                                    k.to_string()
                                };
                                if !r.proven_optimal {
                                    s.push('?');
                                }
                                s
                            }
                        },
                    };
                    let _ = write!(out, "{text:>6}");
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }

    /// One line per cell that is not an agreement, then the totals.
    pub fn diff_report(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            if matches!(c.verdict, Verdict::Agree) {
                continue;
            }
            let got = match (&c.result, c.k_found()) {
                (None, _) => "not attempted".to_string(),
                (Some(_), None) => "no answer".to_string(),
                (Some(r), Some(k)) if r.proven_optimal => k.to_string(),
                (Some(_), Some(k)) => format!(">= {k}"),
            };
            let expected = c.reference.map_or("-".to_string(), |r| {
                format!("{}{}", r.k, if r.open { "?" } else { "" })
            });
            let _ = writeln!(
                out,
                "n={:<2} u={:<2} {:<11} got {:<14} reference {:<4} {:?}",
                c.n,
                c.u,
                c.group.to_string(),
                got,
                expected,
                c.verdict
            );
        }
        for m in &self.cross_mismatches {
            let vals: Vec<String> = m.values.iter().map(|(g, k)| format!("{g}={k}")).collect();
            let _ = writeln!(
                out,
                "n={:<2} u={:<2} groups differ: {}",
                m.n,
                m.u,
                vals.join(" ")
            );
        }
        let _ = writeln!(
            out,
            "agree {} disagree {} timeout {} not attempted {} no reference {}; {} cross mismatches; {:.1}s",
            self.count(Verdict::Agree),
            self.count(Verdict::Disagree),
            self.count(Verdict::Timeout),
            self.count(Verdict::NotAttempted),
            self.count(Verdict::NoReference),
            self.cross_mismatches.len(),
            self.seconds
        );
        out
    }

    /// `n,u,group,k_found,proven_optimal,density_bound,reference,verdict`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("n,u,group,k_found,proven_optimal,density_bound,reference,verdict\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:?}",
                c.n,
                c.u,
                c.group,
                c.k_found().map_or(String::new(), |k| k.to_string()),
                c.proven(),
                c.k_density_bound,
                c.reference.map_or(String::new(), |r| r.k.to_string()),
                c.verdict
            );
        }
        out
    }
}

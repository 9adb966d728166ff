//! Brute-force existence check for tiny instances, independent of the CNF
//! encoding and the SAT solver.
//!
//! Depth-first search over the supports in the length window, largest
//! supports first. At each undecided support the search either places one
//! of its `2^s` cubes (together with the cube's whole orbit, so every
//! partial DNF stays closed under the group) or leaves the support, and its
//! orbit, empty. A branch is cut when the remaining supports cannot cover
//! the still-uncovered assignments even in the best case, each support
//! contributing at most `2^(n-s)` assignments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dnf::{low_bits, Assignment, Cube, Dnf, DnfError};
use crate::groups::GroupSpec;

/// Largest `n` for which the search is guaranteed to finish quickly.
pub const EXHAUSTIVE_CAP: u32 = 3;
/// Largest `n` the search supports at all (assignments fit a 64-bit mask).
pub const BEST_EFFORT_CAP: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the exhaustive cap {EXHAUSTIVE_CAP}; enable best effort for n <= {BEST_EFFORT_CAP}")]
    Capacity { n: u32 },
    #[error("expected 1 <= k <= u <= n, got n = {n}, u = {u}, k = {k}")]
    Window { n: u32, u: u32, k: u32 },
    #[error("group acts on {group} variables, instance has {n}")]
    GroupDimension { group: u32, n: u32 },
    #[error("witness failed verification: {0}")]
    BadWitness(String),
    #[error(transparent)]
    Dnf(#[from] DnfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Allow `EXHAUSTIVE_CAP < n <= BEST_EFFORT_CAP`.
    pub best_effort: bool,
    /// Cut branches by the coverage capacity bound.
    pub prune: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            best_effort: false,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub exists: bool,
    pub witness: Option<Dnf>,
    pub nodes_explored: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Open,
    Empty,
    Taken(u32),
}

struct Search<'a> {
    n: u32,
    group: &'a GroupSpec,
    prune: bool,
    order: Vec<u32>,
    slots: Vec<Slot>,
    nodes: u64,
}

impl Search<'_> {
    fn cover_mask(&self, c: &Cube) -> u64 {
        (0..1u32 << self.n)
            .filter(|&v| c.evaluate(Assignment::new(self.n, v)))
            .fold(0, |m, v| m | 1 << v)
    }

    fn capacity(&self, from: usize) -> u64 {
        self.order[from..]
            .iter()
            .filter(|&&s| self.slots[s as usize] == Slot::Open)
            .map(|s| 1u64 << (self.n - s.count_ones()))
            .sum()
    }

    fn dfs(&mut self, from: usize, uncovered: u64) -> bool {
        self.nodes += 1;
        if uncovered == 0 {
            return true;
        }
        let Some(idx) =
            (from..self.order.len()).find(|&i| self.slots[self.order[i] as usize] == Slot::Open)
        else {
            return false;
        };
        if self.prune && self.capacity(idx) < uncovered.count_ones() as u64 {
            return false;
        }
        let support = self.order[idx];

        for polarity in subsets(support) {
            let c = Cube::new(support, polarity).expect("subset polarity");
            let orbit = self.group.orbit(&c).expect("dimensions match");
            let mut placed: Vec<u32> = Vec::with_capacity(orbit.len());
            let mut ok = true;
            let mut mask = 0u64;
            for d in &orbit {
                if self.slots[d.support() as usize] != Slot::Open {
                    ok = false;
                    break;
                }
                self.slots[d.support() as usize] = Slot::Taken(d.polarity());
                placed.push(d.support());
                mask |= self.cover_mask(d);
            }
            if ok && self.dfs(idx + 1, uncovered & !mask) {
                return true;
            }
            for s in placed {
                self.slots[s as usize] = Slot::Open;
            }
        }

        let support_orbit: Vec<u32> = self
            .group
            .orbit(&Cube::new(support, 0).expect("positive cube"))
            .expect("dimensions match")
            .iter()
            .map(Cube::support)
            .collect();
        for &s in &support_orbit {
            self.slots[s as usize] = Slot::Empty;
        }
        if self.dfs(idx + 1, uncovered) {
            return true;
        }
        for &s in &support_orbit {
            self.slots[s as usize] = Slot::Open;
        }
        false
    }
}

fn subsets(s: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == s {
            None
        } else {
            Some(cur.wrapping_sub(s) & s)
        };
        Some(cur)
    })
}

/// Decides by exhaustive search whether a distinct DNF tautology over `n`
/// variables with cube lengths in `[k, u]`, invariant under `group`, exists.
pub fn exists_bruteforce(
    n: u32,
    u: u32,
    k: u32,
    group: &GroupSpec,
    options: OracleOptions,
) -> Result<OracleResult, OracleError> {
    if k == 0 || k > u || u > n {
        return Err(OracleError::Window { n, u, k });
    }
    if n > BEST_EFFORT_CAP || (n > EXHAUSTIVE_CAP && !options.best_effort) {
        return Err(OracleError::Capacity { n });
    }
    if group.n != n {
        return Err(OracleError::GroupDimension { group: group.n, n });
    }
    let mut order: Vec<u32> = (1..=low_bits(n))
        .filter(|s| (k..=u).contains(&s.count_ones()))
        .collect();
    order.sort_by_key(|s| (std::cmp::Reverse(s.count_ones()), *s));
    let mut search = Search {
        n,
        group,
        prune: options.prune,
        order,
        slots: vec![Slot::Open; 1 << n],
        nodes: 0,
    };
    let all = if n == 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    };
    let exists = search.dfs(0, all);
    let witness = if exists {
        let cubes = search
            .slots
            .iter()
            .enumerate()
            .filter_map(|(s, slot)| match slot {
                Slot::Taken(p) => Some(Cube::new(s as u32, *p).expect("subset polarity")),
                _ => None,
            });
        let d = Dnf::new(n, cubes)?;
        let report = d.verify(k, u, Some(group))?;
        if !report.passed() {
            return Err(OracleError::BadWitness(format!("{d} -> {report:?}")));
        }
        Some(d)
    } else {
        None
    };
    Ok(OracleResult {
        exists,
        witness,
        nodes_explored: search.nodes,
    })
}

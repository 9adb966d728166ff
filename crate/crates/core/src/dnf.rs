//! Cubes, assignments and DNFs, plus exhaustive verification of the
//! properties a search result must have: tautology, distinct supports,
//! cube lengths inside a window and (optionally) group invariance.
//!
//! Variables are numbered from 1. Bit `i - 1` of a bit-set stands for
//! variable `i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::GroupSpec;

/// Largest variable count a [`Cube`] or [`Dnf`] can hold.
pub const MAX_VARS: u32 = 32;

/// Largest variable count for which tautology is decided by enumeration.
pub const MAX_EXHAUSTIVE_VARS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DnfError {
    #[error("polarity bits {polarity:#x} are not a subset of support {support:#x}")]
    PolarityOutsideSupport { support: u32, polarity: u32 },
    #[error("variable {var} is outside 1..={n}")]
    VariableOutOfRange { var: i64, n: u32 },
    #[error("variable count {0} is outside 1..={MAX_VARS}")]
    BadVariableCount(u32),
    #[error("empty cube cannot be stored in a DNF")]
    EmptyCube,
    #[error("literal {0} appears together with its negation")]
    Contradiction(i64),
    #[error("exhaustive check needs n <= {MAX_EXHAUSTIVE_VARS}, got n = {0}")]
    Capacity(u32),
    #[error("length window requires 0 <= k <= u <= n, got k = {k}, u = {u}, n = {n}")]
    Window { k: u32, u: u32, n: u32 },
    #[error("group acts on {group} variables but the DNF has {dnf}")]
    DimensionMismatch { group: u32, dnf: u32 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A conjunction of literals: `support` holds the variables occurring in it,
/// `polarity` the ones occurring negated.
///
/// The derived ordering (support as an integer, then polarity) is the
/// canonical cube order used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    support: u32,
    polarity: u32,
}

impl Cube {
    pub fn new(support: u32, polarity: u32) -> Result<Self, DnfError> {
        if polarity & !support != 0 {
            return Err(DnfError::PolarityOutsideSupport { support, polarity });
        }
        Ok(Cube { support, polarity })
    }

    /// The cube `x_1 ∧ … ∧ x_k`.
    pub fn positive_prefix(k: u32) -> Self {
        Cube {
            support: low_bits(k),
            polarity: 0,
        }
    }

    /// Builds a cube from signed variable indices, `-3` meaning `¬x3`.
    pub fn from_literals(lits: &[i64]) -> Result<Self, DnfError> {
        let mut support = 0u32;
        let mut polarity = 0u32;
        for &lit in lits {
            let var = lit.unsigned_abs();
            if lit == 0 || var > MAX_VARS as u64 {
                return Err(DnfError::VariableOutOfRange {
                    var: lit,
                    n: MAX_VARS,
                });
            }
            let bit = 1u32 << (var - 1);
            let negated = lit < 0;
            if support & bit != 0 && ((polarity & bit != 0) != negated) {
                return Err(DnfError::Contradiction(var as i64));
            }
            support |= bit;
            if negated {
                polarity |= bit;
            }
        }
        Ok(Cube { support, polarity })
    }

    pub fn support(&self) -> u32 {
        self.support
    }

    pub fn polarity(&self) -> u32 {
        self.polarity
    }

    /// Number of literals.
    pub fn len(&self) -> u32 {
        self.support.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.support == 0
    }

    /// Highest variable index occurring in the cube (0 for the empty cube).
    pub fn max_var(&self) -> u32 {
        32 - self.support.leading_zeros()
    }

    /// Signed literals in increasing variable order.
    pub fn literals(&self) -> Vec<i64> {
        bits(self.support)
            .map(|i| {
                let var = i as i64 + 1;
                if self.polarity & (1 << i) != 0 {
                    -var
                } else {
                    var
                }
            })
            .collect()
    }

    /// True when every literal of the cube holds under `a`.
    pub fn evaluate(&self, a: Assignment) -> bool {
        // positive literals need a 1, negated literals need a 0
        (a.values ^ self.polarity) & self.support == self.support
    }

    /// True when the literal set of `self` is a subset of the literal set of `other`.
    pub fn literals_subset_of(&self, other: &Cube) -> bool {
        self.support & !other.support == 0 && (self.polarity ^ other.polarity) & self.support == 0
    }

    /// Number of assignments over `n` variables satisfying the cube.
    pub fn coverage(&self, n: u32) -> u64 {
        1u64 << (n - self.len())
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("⊤");
        }
        let mut first = true;
        for lit in self.literals() {
            if !first {
                f.write_str(" ∧ ")?;
            }
            first = false;
            if lit < 0 {
                write!(f, "¬x{}", -lit)?;
            } else {
                write!(f, "x{lit}")?;
            }
        }
        Ok(())
    }
}

/// A truth assignment to variables `1..=n`; bit `i - 1` set means `x_i = true`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub n: u32,
    pub values: u32,
}

impl Assignment {
    pub fn new(n: u32, values: u32) -> Self {
        Assignment {
            n,
            values: values & low_bits(n),
        }
    }

    pub fn get(&self, var: u32) -> bool {
        self.values & (1 << (var - 1)) != 0
    }

    /// The `t`-th assignment in lexicographic order of `(x_1, …, x_n)` with
    /// false before true.
    pub fn lex(n: u32, t: u32) -> Self {
        let values = if n == 0 {
            0
        } else {
            t.reverse_bits() >> (32 - n)
        };
        Assignment { n, values }
    }

    /// Position of this assignment in the order produced by [`Assignment::lex`].
    pub fn lex_rank(&self) -> u32 {
        if self.n == 0 {
            0
        } else {
            self.values.reverse_bits() >> (32 - self.n)
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=self.n)
            .map(|v| format!("x{}={}", v, if self.get(v) { 'T' } else { 'F' }))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// A disjunction of cubes over `n` variables, kept sorted in canonical cube
/// order without duplicates so that equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "DnfRepr", try_from = "DnfRepr")]
pub struct Dnf {
    n: u32,
    cubes: Vec<Cube>,
}

#[derive(Serialize, Deserialize)]
struct DnfRepr {
    n: u32,
    cubes: Vec<Vec<i64>>,
}

impl From<Dnf> for DnfRepr {
    fn from(d: Dnf) -> Self {
        DnfRepr {
            n: d.n,
            cubes: d.cubes.iter().map(Cube::literals).collect(),
        }
    }
}

impl TryFrom<DnfRepr> for Dnf {
    type Error = DnfError;

    fn try_from(r: DnfRepr) -> Result<Self, DnfError> {
        let cubes = r
            .cubes
            .iter()
            .map(|lits| Cube::from_literals(lits))
            .collect::<Result<Vec<_>, _>>()?;
        Dnf::new(r.n, cubes)
    }
}

impl Dnf {
    pub fn new(n: u32, cubes: impl IntoIterator<Item = Cube>) -> Result<Self, DnfError> {
        if n == 0 || n > MAX_VARS {
            return Err(DnfError::BadVariableCount(n));
        }
        let mut cubes: Vec<Cube> = cubes.into_iter().collect();
        for c in &cubes {
            if c.is_empty() {
                return Err(DnfError::EmptyCube);
            }
            if c.max_var() > n {
                return Err(DnfError::VariableOutOfRange {
                    var: c.max_var() as i64,
                    n,
                });
            }
        }
        cubes.sort_unstable();
        cubes.dedup();
        Ok(Dnf { n, cubes })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn contains(&self, c: &Cube) -> bool {
        self.cubes.binary_search(c).is_ok()
    }

    pub fn min_length(&self) -> u32 {
        self.cubes.iter().map(Cube::len).min().unwrap_or(0)
    }

    pub fn max_length(&self) -> u32 {
        self.cubes.iter().map(Cube::len).max().unwrap_or(0)
    }

    pub fn evaluate(&self, a: Assignment) -> bool {
        self.cubes.iter().any(|c| c.evaluate(a))
    }

    /// Scans the assignments in lexicographic order and returns the first one
    /// no cube covers, or `None` when the DNF is a tautology.
    pub fn first_uncovered(&self) -> Result<Option<Assignment>, DnfError> {
        if self.n > MAX_EXHAUSTIVE_VARS {
            return Err(DnfError::Capacity(self.n));
        }
        let total = 1u64 << self.n;
        Ok((0..total)
            .map(|t| Assignment::lex(self.n, t as u32))
            .find(|&a| !self.evaluate(a)))
    }

    pub fn is_tautology(&self) -> Result<bool, DnfError> {
        Ok(self.first_uncovered()?.is_none())
    }

    /// Counts covered assignments by marking, cube by cube, every assignment
    /// the cube satisfies. Independent of the per-assignment scan used by
    /// [`Dnf::first_uncovered`].
    pub fn covered_count(&self) -> Result<u64, DnfError> {
        if self.n > MAX_EXHAUSTIVE_VARS {
            return Err(DnfError::Capacity(self.n));
        }
        let total = 1usize << self.n;
        let mut covered = vec![false; total];
        let all = low_bits(self.n);
        for c in &self.cubes {
            let fixed = !c.polarity & c.support;
            let free = all & !c.support;
            // enumerate subsets of the free variables
            let mut sub = 0u32;
            loop {
                covered[(fixed | sub) as usize] = true;
                if sub == free {
                    break;
                }
                sub = (sub.wrapping_sub(free)) & free;
            }
        }
        Ok(covered.iter().filter(|&&b| b).count() as u64)
    }

    /// The smallest support (as an integer) shared by two cubes, if any.
    pub fn first_duplicate_support(&self) -> Option<u32> {
        self.cubes
            .windows(2)
            .find(|w| w[0].support == w[1].support)
            .map(|w| w[0].support)
    }

    pub fn has_distinct_supports(&self) -> bool {
        self.first_duplicate_support().is_none()
    }

    /// Checks every property a qualifying search result must have.
    pub fn verify(
        &self,
        k: u32,
        u: u32,
        group: Option<&GroupSpec>,
    ) -> Result<VerificationReport, DnfError> {
        if k > u || u > self.n {
            return Err(DnfError::Window { k, u, n: self.n });
        }
        let first_uncovered_assignment = self.first_uncovered()?;
        let first_duplicate_support = self.first_duplicate_support();
        let (min_length, max_length) = (self.min_length(), self.max_length());
        let invariant_under_group = match group {
            Some(g) => {
                if g.n != self.n {
                    return Err(DnfError::DimensionMismatch {
                        group: g.n,
                        dnf: self.n,
                    });
                }
                Some(g.is_invariant(self))
            }
            None => None,
        };
        Ok(VerificationReport {
            is_tautology: first_uncovered_assignment.is_none(),
            distinct_supports: first_duplicate_support.is_none(),
            min_length,
            max_length,
            within_length_window: self.cubes.iter().all(|c| (k..=u).contains(&c.len())),
            invariant_under_group,
            first_uncovered_assignment,
            first_duplicate_support,
        })
    }

    /// Applies `f` to every cube and rebuilds the DNF.
    pub fn map_cubes(&self, f: impl Fn(&Cube) -> Cube) -> Result<Dnf, DnfError> {
        Dnf::new(self.n, self.cubes.iter().map(f))
    }

    /// Renders the textual format: a `p dnf <n> <cubes>` header followed by
    /// one cube per line as signed variable indices.
    pub fn to_text(&self) -> String {
        let mut out = format!("p dnf {} {}\n", self.n, self.cubes.len());
        for c in &self.cubes {
            let lits: Vec<String> = c.literals().iter().map(i64::to_string).collect();
            out.push_str(&lits.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cubes.is_empty() {
            return f.write_str("⊥");
        }
        let parts: Vec<String> = self.cubes.iter().map(|c| format!("({c})")).collect();
        f.write_str(&parts.join(" ∨ "))
    }
}

impl FromStr for Dnf {
    type Err = DnfError;

    fn from_str(text: &str) -> Result<Self, DnfError> {
        let mut header: Option<(u32, usize)> = None;
        let mut cubes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| DnfError::Parse { line: line_no, msg };
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(parse_err("duplicate header".into()));
                }
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 4 || fields[0] != "p" || fields[1] != "dnf" {
                    return Err(parse_err(format!("malformed header `{line}`")));
                }
                let n: u32 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(format!("bad variable count `{}`", fields[2])))?;
                let m: usize = fields[3]
                    .parse()
                    .map_err(|_| parse_err(format!("bad cube count `{}`", fields[3])))?;
                if n == 0 || n > MAX_VARS {
                    return Err(DnfError::BadVariableCount(n));
                }
                header = Some((n, m));
                continue;
            }
            let Some((n, _)) = header else {
                return Err(parse_err("cube before `p dnf` header".into()));
            };
            let lits = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| parse_err(format!("bad literal `{tok}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(&bad) = lits
                .iter()
                .find(|l| **l == 0 || l.unsigned_abs() > n as u64)
            {
                return Err(parse_err(format!("literal {bad} outside 1..={n}")));
            }
            let cube = Cube::from_literals(&lits).map_err(|e| parse_err(e.to_string()))?;
            cubes.push(cube);
        }
        let Some((n, m)) = header else {
            return Err(DnfError::Parse {
                line: 0,
                msg: "missing `p dnf` header".into(),
            });
        };
        if cubes.len() != m {
            return Err(DnfError::Parse {
                line: 0,
                msg: format!("header announces {m} cubes, found {}", cubes.len()),
            });
        }
        Dnf::new(n, cubes)
    }
}

/// Outcome of [`Dnf::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub is_tautology: bool,
    pub distinct_supports: bool,
    pub min_length: u32,
    pub max_length: u32,
    pub within_length_window: bool,
    pub invariant_under_group: Option<bool>,
    pub first_uncovered_assignment: Option<Assignment>,
    pub first_duplicate_support: Option<u32>,
}

impl VerificationReport {
    /// All checks hold.
    pub fn passed(&self) -> bool {
        self.is_tautology
            && self.distinct_supports
            && self.within_length_window
            && self.invariant_under_group != Some(false)
    }
}

pub(crate) fn low_bits(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Indices of set bits, ascending.
pub(crate) fn bits(mut x: u32) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let i = x.trailing_zeros();
            x &= x - 1;
            Some(i)
        }
    })
}

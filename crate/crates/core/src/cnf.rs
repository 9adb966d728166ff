//! CNF formulas over numbered variables and their DIMACS text form.

use std::fmt::Write as _;

use thiserror::Error;

/// A DIMACS literal: `v` or `-v` for a variable `v >= 1`.
pub type Lit = i32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("literal 0 is not allowed inside a clause")]
    ZeroLiteral,
    #[error("literal {lit} exceeds the declared {num_vars} variables")]
    LiteralOutOfRange { lit: Lit, num_vars: u32 },
    #[error("clause contains both {0} and {}", -.0)]
    Tautological(Lit),
    #[error("empty clause")]
    EmptyClause,
    #[error("DIMACS line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Clauses over variables `1..=num_vars`.
///
/// Every stored clause is non-empty, duplicate-free and never contains a
/// variable together with its negation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn add_clause(&mut self, mut clause: Vec<Lit>) -> Result<(), CnfError> {
        for &lit in &clause {
            if lit == 0 {
                return Err(CnfError::ZeroLiteral);
            }
            if lit.unsigned_abs() > self.num_vars {
                return Err(CnfError::LiteralOutOfRange {
                    lit,
                    num_vars: self.num_vars,
                });
            }
        }
        let mut sorted = clause.clone();
        sorted.sort_unstable_by_key(|l| (l.abs(), *l));
        sorted.dedup();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == -w[1]) {
            return Err(CnfError::Tautological(w[1].abs()));
        }
        if clause.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        if sorted.len() != clause.len() {
            let mut seen = std::collections::HashSet::new();
            clause.retain(|l| seen.insert(*l));
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn extend<I>(&mut self, clauses: I) -> Result<(), CnfError>
    where
        I: IntoIterator<Item = Vec<Lit>>,
    {
        clauses.into_iter().try_for_each(|c| self.add_clause(c))
    }

    /// Index of the first clause falsified by `model` (`model[v - 1]` is the
    /// value of variable `v`), or `None` if the model satisfies the formula.
    pub fn first_falsified(&self, model: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|clause| {
            !clause.iter().any(|&lit| {
                let value = model
                    .get(lit.unsigned_abs() as usize - 1)
                    .copied()
                    .unwrap_or(false);
                value == (lit > 0)
            })
        })
    }

    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        model.len() >= self.num_vars as usize && self.first_falsified(model).is_none()
    }

    /// DIMACS text: the given comment lines (each prefixed with `c `), the
    /// `p cnf` header, then one `0`-terminated clause per line.
    pub fn to_dimacs(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("c ");
            out.push_str(c);
            out.push('\n');
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads DIMACS CNF. Comment lines are skipped and clauses may span lines.
    pub fn from_dimacs(text: &str) -> Result<Self, CnfError> {
        let mut formula: Option<CnfFormula> = None;
        let mut declared = 0usize;
        let mut current = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            let err = |msg: String| CnfError::Parse { line: line_no, msg };
            if line.starts_with('p') {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 4 || fields[1] != "cnf" || formula.is_some() {
                    return Err(err(format!("bad header `{line}`")));
                }
                let vars = fields[2]
                    .parse()
                    .map_err(|_| err("bad variable count".into()))?;
                declared = fields[3]
                    .parse()
                    .map_err(|_| err("bad clause count".into()))?;
                formula = Some(CnfFormula::new(vars));
                continue;
            }
            let f = formula
                .as_mut()
                .ok_or_else(|| err("clause before header".into()))?;
            for tok in line.split_whitespace() {
                let lit: Lit = tok
                    .parse()
                    .map_err(|_| err(format!("bad literal `{tok}`")))?;
                if lit == 0 {
                    let clause = std::mem::take(&mut current);
                    f.add_clause(clause).map_err(|e| err(e.to_string()))?;
                } else {
                    current.push(lit);
                }
            }
        }
        let f = formula.ok_or(CnfError::Parse {
            line: 0,
            msg: "missing `p cnf` header".into(),
        })?;
        if !current.is_empty() {
            return Err(CnfError::Parse {
                line: 0,
                msg: "last clause is not terminated by 0".into(),
            });
        }
        if f.clauses.len() != declared {
            return Err(CnfError::Parse {
                line: 0,
                msg: format!(
                    "header declares {declared} clauses, found {}",
                    f.clauses.len()
                ),
            });
        }
        Ok(f)
    }
}

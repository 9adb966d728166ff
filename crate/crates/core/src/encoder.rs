//! Compiles "is there a distinct DNF tautology over `n` variables with cube
//! lengths in `[k, u]`, invariant under a group?" into CNF.
//!
//! Every cube in the length window gets one selector variable, numbered in
//! canonical cube order. The clause families are:
//!
//! * tautology: for each assignment, one of the cubes it satisfies is selected;
//! * distinctness: at most one selected cube per support, binary encoding;
//! * invariance: `c` selected implies `g(c)` selected, for each generator `g`;
//! * symmetry breaking (trivial group only): the cube `x1 ∧ … ∧ xk` is
//!   selected, the cube on support `{1..k-1, k+1}` has its negations in a
//!   prefix and `x_{k+1}` positive, and the positive cubes
//!   `x1 ∧ … ∧ x_{k-1} ∧ x_i` (`i > k`) are selected in index order;
//! * subsumption (optional): no selected cube strictly contains another.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{CnfError, CnfFormula, Lit};
use crate::dnf::{low_bits, Assignment, Cube, Dnf, DnfError, MAX_EXHAUSTIVE_VARS};
use crate::groups::GroupSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("expected 1 <= k <= u <= n <= {MAX_EXHAUSTIVE_VARS}, got n = {n}, u = {u}, k = {k}")]
    Window { n: u32, u: u32, k: u32 },
    #[error("symmetry breaking cannot be combined with a non-trivial group ({0})")]
    SymmetryWithGroup(GroupSpec),
    #[error("group acts on {group} variables, instance has {n}")]
    GroupDimension { group: u32, n: u32 },
    #[error("model assigns {got} variables, encoding has {expected}")]
    ModelSize { got: usize, expected: u32 },
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Dnf(#[from] DnfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodeOptions {
    pub symmetry_breaking: bool,
    pub forbid_subsumed: bool,
    /// Keep the symmetry-breaking clauses for non-trivial groups. They
    /// assume the full renaming/negation symmetry, which invariance destroys,
    /// so the instance becomes a strict restriction: SAT answers stay valid
    /// but UNSAT no longer refutes existence. Off by default.
    #[serde(default)]
    pub symmetry_with_group: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            symmetry_breaking: true,
            forbid_subsumed: false,
            symmetry_with_group: false,
        }
    }
}

impl EncodeOptions {
    /// The same options with symmetry breaking switched off when `group`
    /// is non-trivial.
    pub fn for_group(self, group: &GroupSpec) -> Self {
        EncodeOptions {
            symmetry_breaking: self.symmetry_breaking
                && (group.is_trivial() || self.symmetry_with_group),
            ..self
        }
    }
}

/// Bidirectional map between cubes and their selector variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    cubes: Vec<Cube>,
    index: HashMap<Cube, u32>,
    aux_var_start: u32,
    total_vars: u32,
}

impl VarMap {
    /// Selector variables `1..=cubes.len()` in the given order.
    pub fn new(cubes: Vec<Cube>) -> Self {
        let index = cubes
            .iter()
            .enumerate()
            .map(|(i, c)| (*c, i as u32 + 1))
            .collect();
        let m = cubes.len() as u32;
        VarMap {
            cubes,
            index,
            aux_var_start: m + 1,
            total_vars: m,
        }
    }

    pub fn cube_var(&self, c: &Cube) -> Option<u32> {
        self.index.get(c).copied()
    }

    pub fn var_cube(&self, v: u32) -> Option<Cube> {
        self.cubes.get((v as usize).checked_sub(1)?).copied()
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn num_cube_vars(&self) -> u32 {
        self.cubes.len() as u32
    }

    pub fn aux_var_start(&self) -> u32 {
        self.aux_var_start
    }

    pub fn total_vars(&self) -> u32 {
        self.total_vars
    }

    /// Reserves `count` fresh auxiliary variables, returning the first one.
    pub fn alloc_aux(&mut self, count: u32) -> u32 {
        let first = self.total_vars + 1;
        self.total_vars += count;
        first
    }

    fn var(&self, c: &Cube) -> Lit {
        self.index[c] as Lit
    }

    /// The DNF of all cubes whose selectors are true in `model`.
    pub fn decode(&self, n: u32, model: &[bool]) -> Result<Dnf, EncodeError> {
        if model.len() < self.cubes.len() {
            return Err(EncodeError::ModelSize {
                got: model.len(),
                expected: self.total_vars,
            });
        }
        let selected = self
            .cubes
            .iter()
            .zip(model)
            .filter(|(_, &on)| on)
            .map(|(c, _)| *c);
        Ok(Dnf::new(n, selected)?)
    }
}

/// Supports of size in `[k, u]`, ascending as integers.
fn supports(n: u32, k: u32, u: u32) -> impl Iterator<Item = u32> {
    (1..=low_bits(n)).filter(move |s| (k..=u).contains(&s.count_ones()))
}

/// Subsets of `s` in increasing numeric order.
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

/// All cubes over `n` variables with length in `[k, u]`, in canonical order.
pub fn enumerate_cubes(n: u32, k: u32, u: u32) -> Vec<Cube> {
    supports(n, k, u)
        .flat_map(|s| subsets(s).map(move |p| Cube::new(s, p).expect("subset polarity")))
        .collect()
}

/// `∑_{i=k}^{u} C(n, i) 2^i`, the number of cubes in the window.
pub fn cube_count(n: u32, k: u32, u: u32) -> u64 {
    let mut binom = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; binom.len() + 1];
        for i in 1..binom.len() {
            next[i] = binom[i - 1] + binom[i];
        }
        binom = next;
    }
    (k..=u).map(|i| binom[i as usize] << i).sum()
}

/// One clause per assignment (in lexicographic order) listing the selectors
/// of the given cubes that the assignment satisfies. Returns the first
/// assignment satisfied by none of them as an error value.
pub fn encode_tautology(n: u32, cubes: &[Cube], vm: &VarMap) -> Result<Vec<Vec<Lit>>, Assignment> {
    let mut by_support: BTreeMap<u32, HashMap<u32, Lit>> = BTreeMap::new();
    for c in cubes {
        by_support
            .entry(c.support())
            .or_default()
            .insert(c.polarity(), vm.var(c));
    }
    let mut clauses = Vec::with_capacity(1 << n);
    for t in 0..(1u64 << n) {
        let a = Assignment::lex(n, t as u32);
        // the only cube on support s that a satisfies negates exactly s \ a
        let mut clause: Vec<Lit> = by_support
            .iter()
            .filter_map(|(&s, pols)| pols.get(&(s & !a.values)).copied())
            .collect();
        if clause.is_empty() {
            return Err(a);
        }
        clause.sort_unstable();
        clauses.push(clause);
    }
    Ok(clauses)
}

/// Binary at-most-one over `vars`: the `j`-th variable, when true, forces
/// the auxiliary bits to spell `j`. Uses `⌈log2 len⌉` fresh variables.
pub fn encode_amo_binary(vars: &[Lit], vm: &mut VarMap) -> Vec<Vec<Lit>> {
    if vars.len() < 2 {
        return Vec::new();
    }
    let width = usize::BITS - (vars.len() - 1).leading_zeros();
    let first = vm.alloc_aux(width) as Lit;
    let mut clauses = Vec::with_capacity(vars.len() * width as usize);
    for (j, &v) in vars.iter().enumerate() {
        for t in 0..width {
            let aux = first + t as Lit;
            let lit = if (j >> t) & 1 == 1 { aux } else { -aux };
            clauses.push(vec![-v, lit]);
        }
    }
    clauses
}

/// `¬v(c) ∨ v(g(c))` for every cube and generator, skipping fixed points.
pub fn encode_invariance(cubes: &[Cube], vm: &VarMap, group: &GroupSpec) -> Vec<Vec<Lit>> {
    let gens = group.generators();
    let mut clauses = Vec::new();
    for c in cubes {
        for g in &gens {
            let image = g.apply_unchecked(c);
            if image == *c {
                continue;
            }
            let target = vm
                .cube_var(&image)
                .expect("permutations preserve cube length");
            clauses.push(vec![-vm.var(c), target as Lit]);
        }
    }
    clauses
}

/// The three symmetry-breaking families for the trivial group.
pub fn encode_symmetry_breaking(n: u32, k: u32, vm: &VarMap) -> Vec<Vec<Lit>> {
    assert!(k >= 1, "symmetry breaking needs k >= 1");
    let mut clauses = vec![vec![vm.var(&Cube::positive_prefix(k))]];
    if k + 1 > n {
        return clauses;
    }
    let head = low_bits(k - 1);
    let next = 1u32 << k;
    let support = head | next;
    for polarity in subsets(support) {
        let negated_prefix = polarity & next == 0 && (polarity + 1) & polarity == 0;
        if !negated_prefix {
            let c = Cube::new(support, polarity).expect("subset polarity");
            clauses.push(vec![-vm.var(&c)]);
        }
    }
    let positive = |i: u32| Cube::new(head | 1 << (i - 1), 0).expect("positive cube");
    for i in k + 1..n {
        clauses.push(vec![-vm.var(&positive(i + 1)), vm.var(&positive(i))]);
    }
    clauses
}

/// `¬v(c) ∨ ¬v(c')` whenever the literals of `c` are a strict subset of
/// those of `c'`.
pub fn encode_subsumption_exclusion(n: u32, cubes: &[Cube], vm: &VarMap) -> Vec<Vec<Lit>> {
    let all = low_bits(n);
    let mut clauses = Vec::new();
    for c in cubes {
        let free = all & !c.support();
        for extra in subsets(free).skip(1) {
            for signs in subsets(extra) {
                let bigger =
                    Cube::new(c.support() | extra, c.polarity() | signs).expect("subset polarity");
                if let Some(v) = vm.cube_var(&bigger) {
                    clauses.push(vec![-vm.var(c), -(v as Lit)]);
                }
            }
        }
    }
    clauses
}

/// Clause counts per family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCounts {
    pub tautology: usize,
    pub at_most_one: usize,
    pub invariance: usize,
    pub symmetry_breaking: usize,
    pub subsumption: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Cnf(CnfFormula),
    /// Some assignment is satisfied by no cube of the window.
    TriviallyUnsat {
        uncovered: Assignment,
    },
}

#[derive(Debug, Clone)]
pub struct Encoding {
    pub n: u32,
    pub u: u32,
    pub k: u32,
    pub group: GroupSpec,
    pub options: EncodeOptions,
    pub instance: Instance,
    pub var_map: VarMap,
    pub counts: FamilyCounts,
}

impl Encoding {
    /// DIMACS text with a `c cube <var> = <literals>` line per selector.
    pub fn to_dimacs(&self) -> String {
        let mut comments = vec![format!(
            "distinct DNF tautology n={} u={} k={} group={} symmetry_breaking={} forbid_subsumed={}",
            self.n,
            self.u,
            self.k,
            self.group.kind,
            self.options.symmetry_breaking,
            self.options.forbid_subsumed
        )];
        for (i, c) in self.var_map.cubes().iter().enumerate() {
            let lits: Vec<String> = c.literals().iter().map(i64::to_string).collect();
            comments.push(format!("cube {} = {}", i + 1, lits.join(" ")));
        }
        match &self.instance {
            Instance::Cnf(f) => f.to_dimacs(&comments),
            Instance::TriviallyUnsat { uncovered } => {
                comments.push(format!(
                    "trivially unsatisfiable: {uncovered} is covered by no cube"
                ));
                let mut f = CnfFormula::new(1);
                f.extend([vec![1], vec![-1]]).expect("valid clauses");
                f.to_dimacs(&comments)
            }
        }
    }
}

/// Builds the full instance for `(n, u, k)` and `group`.
pub fn build_instance(
    n: u32,
    u: u32,
    k: u32,
    group: &GroupSpec,
    options: EncodeOptions,
) -> Result<Encoding, EncodeError> {
    if k == 0 || k > u || u > n || n > MAX_EXHAUSTIVE_VARS {
        return Err(EncodeError::Window { n, u, k });
    }
    if group.n != n {
        return Err(EncodeError::GroupDimension { group: group.n, n });
    }
    if options.symmetry_breaking && !group.is_trivial() && !options.symmetry_with_group {
        return Err(EncodeError::SymmetryWithGroup(*group));
    }
    let cubes = enumerate_cubes(n, k, u);
    let mut vm = VarMap::new(cubes.clone());
    let mut counts = FamilyCounts::default();

    let tautology = match encode_tautology(n, &cubes, &vm) {
        Ok(clauses) => clauses,
        Err(uncovered) => {
            return Ok(Encoding {
                n,
                u,
                k,
                group: *group,
                options,
                instance: Instance::TriviallyUnsat { uncovered },
                var_map: vm,
                counts,
            })
        }
    };
    counts.tautology = tautology.len();

    let mut amo = Vec::new();
    for chunk in cubes.chunk_by(|a, b| a.support() == b.support()) {
        let vars: Vec<Lit> = chunk.iter().map(|c| vm.var(c)).collect();
        amo.extend(encode_amo_binary(&vars, &mut vm));
    }
    counts.at_most_one = amo.len();

    let invariance = encode_invariance(&cubes, &vm, group);
    counts.invariance = invariance.len();

    let symmetry = if options.symmetry_breaking {
        encode_symmetry_breaking(n, k, &vm)
    } else {
        Vec::new()
    };
    counts.symmetry_breaking = symmetry.len();

    let subsumption = if options.forbid_subsumed {
        encode_subsumption_exclusion(n, &cubes, &vm)
    } else {
        Vec::new()
    };
    counts.subsumption = subsumption.len();

    let mut formula = CnfFormula::new(vm.total_vars());
    formula.extend(tautology)?;
    formula.extend(amo)?;
    formula.extend(invariance)?;
    formula.extend(symmetry)?;
    formula.extend(subsumption)?;
    Ok(Encoding {
        n,
        u,
        k,
        group: *group,
        options,
        instance: Instance::Cnf(formula),
        var_map: vm,
        counts,
    })
}

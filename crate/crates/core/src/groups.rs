//! Permutation groups acting on variable indices, and their action on cubes.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dnf::{bits, Cube, Dnf, MAX_VARS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("images do not form a bijection on 1..={0}")]
    NotBijection(u32),
    #[error("cube mentions x{var} but the permutation acts on {n} variables")]
    DimensionMismatch { var: u32, n: u32 },
    #[error("group degree {0} is outside 1..={MAX_VARS}")]
    BadDegree(u32),
    #[error("unknown group `{0}` (expected none, cyclic, dihedral, alternating or symmetric)")]
    UnknownKind(String),
}

/// A bijection on `{1..n}`, stored as `images[i - 1] = g(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self, GroupError> {
        let n = images.len() as u32;
        let mut seen = vec![false; images.len()];
        for &img in &images {
            if img == 0 || img > n || std::mem::replace(&mut seen[img as usize - 1], true) {
                return Err(GroupError::NotBijection(n));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: u32) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// The permutation of `{1..n}` given by a single cycle, e.g. `[1, 2, 3]`
    /// for `1 → 2 → 3 → 1`.
    pub fn cycle(n: u32, cycle: &[u32]) -> Self {
        let mut images: Vec<u32> = (1..=n).collect();
        for (i, &from) in cycle.iter().enumerate() {
            images[from as usize - 1] = cycle[(i + 1) % cycle.len()];
        }
        Permutation { images }
    }

    pub fn degree(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `g(i)` for a 1-based index.
    pub fn image(&self, i: u32) -> u32 {
        self.images[i as usize - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &g)| g == i as u32 + 1)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&i| self.image(i)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &g) in self.images.iter().enumerate() {
            images[g as usize - 1] = i as u32 + 1;
        }
        Permutation { images }
    }

    fn map_bits(&self, set: u32) -> u32 {
        bits(set).fold(0, |acc, i| acc | 1 << (self.images[i as usize] - 1))
    }

    /// Moves every literal on `x_i` to `x_g(i)`, keeping its sign.
    pub fn apply(&self, c: &Cube) -> Result<Cube, GroupError> {
        if c.max_var() > self.degree() {
            return Err(GroupError::DimensionMismatch {
                var: c.max_var(),
                n: self.degree(),
            });
        }
        Ok(self.apply_unchecked(c))
    }

    pub(crate) fn apply_unchecked(&self, c: &Cube) -> Cube {
        Cube::new(self.map_bits(c.support()), self.map_bits(c.polarity()))
            .expect("permuted polarity stays inside permuted support")
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.images.len()];
        let mut any = false;
        for start in 1..=self.degree() {
            if seen[start as usize - 1] || self.image(start) == start {
                continue;
            }
            any = true;
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i as usize - 1] {
                seen[i as usize - 1] = true;
                cyc.push(i.to_string());
                i = self.image(i);
            }
            write!(f, "({})", cyc.join(" "))?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    #[serde(rename = "none")]
    Trivial,
    Cyclic,
    Dihedral,
    Alternating,
    Symmetric,
}

impl GroupKind {
    pub const ALL: [GroupKind; 5] = [
        GroupKind::Trivial,
        GroupKind::Cyclic,
        GroupKind::Dihedral,
        GroupKind::Alternating,
        GroupKind::Symmetric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GroupKind::Trivial => "none",
            GroupKind::Cyclic => "cyclic",
            GroupKind::Dihedral => "dihedral",
            GroupKind::Alternating => "alternating",
            GroupKind::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupKind {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "trivial" => Ok(GroupKind::Trivial),
            "cyclic" | "c" => Ok(GroupKind::Cyclic),
            "dihedral" | "d" => Ok(GroupKind::Dihedral),
            "alternating" | "a" => Ok(GroupKind::Alternating),
            "symmetric" | "s" => Ok(GroupKind::Symmetric),
            _ => Err(GroupError::UnknownKind(s.to_string())),
        }
    }
}

/// One of the supported groups acting on `{1..n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub n: u32,
}

impl GroupSpec {
    pub fn new(kind: GroupKind, n: u32) -> Result<Self, GroupError> {
        if n == 0 || n > MAX_VARS {
            return Err(GroupError::BadDegree(n));
        }
        Ok(GroupSpec { kind, n })
    }

    pub fn trivial(n: u32) -> Self {
        GroupSpec {
            kind: GroupKind::Trivial,
            n,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.generators().is_empty()
    }

    /// Generating set for the group. Identity generators are dropped, so
    /// degenerate small cases (`C_1`, `A_2`, ...) come back empty.
    pub fn generators(&self) -> Vec<Permutation> {
        let n = self.n;
        let rotation = || Permutation::cycle(n, &(1..=n).collect::<Vec<_>>());
        let gens = match self.kind {
            GroupKind::Trivial => vec![],
            GroupKind::Cyclic => vec![rotation()],
            GroupKind::Dihedral => {
                let reflection = Permutation {
                    images: (1..=n).map(|i| n + 1 - i).collect(),
                };
                vec![rotation(), reflection]
            }
            GroupKind::Alternating if n < 3 => vec![],
            GroupKind::Alternating => {
                let long = if n % 2 == 1 {
                    rotation()
                } else {
                    Permutation::cycle(n, &(2..=n).collect::<Vec<_>>())
                };
                vec![Permutation::cycle(n, &[1, 2, 3]), long]
            }
            GroupKind::Symmetric if n == 1 => vec![],
            GroupKind::Symmetric if n == 2 => vec![Permutation::cycle(2, &[1, 2])],
            GroupKind::Symmetric => vec![Permutation::cycle(n, &[1, 2]), rotation()],
        };
        gens.into_iter().filter(|g| !g.is_identity()).collect()
    }

    /// Every group element, found by closing the generators under
    /// composition. Exponential in `n` for the alternating and symmetric
    /// groups; meant for small degrees.
    pub fn elements(&self) -> Vec<Permutation> {
        let gens = self.generators();
        let id = Permutation::identity(self.n);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &gens {
                let q = g.compose(&p);
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        let mut all: Vec<_> = seen.into_iter().collect();
        all.sort();
        all
    }

    /// True when every generator maps the DNF onto itself.
    pub fn is_invariant(&self, d: &Dnf) -> bool {
        if d.n() != self.n {
            return false;
        }
        self.generators()
            .iter()
            .all(|g| d.cubes().iter().all(|c| d.contains(&g.apply_unchecked(c))))
    }

    /// Closure of `{c}` under the generators.
    pub fn orbit(&self, c: &Cube) -> Result<BTreeSet<Cube>, GroupError> {
        if c.max_var() > self.n {
            return Err(GroupError::DimensionMismatch {
                var: c.max_var(),
                n: self.n,
            });
        }
        let gens = self.generators();
        let mut orbit = BTreeSet::from([*c]);
        let mut stack = vec![*c];
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = g.apply_unchecked(&x);
                if orbit.insert(y) {
                    stack.push(y);
                }
            }
        }
        Ok(orbit)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            GroupKind::Trivial => return write!(f, "trivial({})", self.n),
            GroupKind::Cyclic => 'C',
            GroupKind::Dihedral => 'D',
            GroupKind::Alternating => 'A',
            GroupKind::Symmetric => 'S',
        };
        write!(f, "{letter}_{}", self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cube(lits: &[i64]) -> Cube {
        Cube::from_literals(lits).unwrap()
    }

    fn group(kind: GroupKind, n: u32) -> GroupSpec {
        GroupSpec::new(kind, n).unwrap()
    }

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn generator_examples() {
        let c4 = group(GroupKind::Cyclic, 4).generators();
        assert_eq!(c4.len(), 1);
        assert_eq!(c4[0].images(), &[2, 3, 4, 1]);

        let s2 = group(GroupKind::Symmetric, 2).generators();
        assert_eq!(s2, vec![Permutation::new(vec![2, 1]).unwrap()]);

        let d4 = group(GroupKind::Dihedral, 4);
        let gens = d4.generators();
        assert_eq!(gens[1].images(), &[4, 3, 2, 1]);
        assert_eq!(d4.elements().len(), 8);

        assert!(group(GroupKind::Trivial, 5).generators().is_empty());
        assert!(group(GroupKind::Alternating, 2).generators().is_empty());
        assert!(group(GroupKind::Cyclic, 1).generators().is_empty());
    }

    #[test]
    fn group_orders_match_theory() {
        for n in 3..=7u32 {
            assert_eq!(group(GroupKind::Cyclic, n).elements().len(), n as usize);
            assert_eq!(
                group(GroupKind::Dihedral, n).elements().len(),
                2 * n as usize
            );
            assert_eq!(
                group(GroupKind::Alternating, n).elements().len(),
                factorial(n as usize) / 2
            );
            assert_eq!(
                group(GroupKind::Symmetric, n).elements().len(),
                factorial(n as usize)
            );
        }
    }

    #[test]
    fn apply_examples() {
        let rot = &group(GroupKind::Cyclic, 4).generators()[0];
        assert_eq!(rot.apply(&cube(&[1, -2, 3])).unwrap(), cube(&[2, -3, 4]));
        let c = cube(&[-1, 3]);
        assert_eq!(Permutation::identity(3).apply(&c).unwrap(), c);
        let swap = Permutation::cycle(2, &[1, 2]);
        assert_eq!(swap.apply(&cube(&[-1])).unwrap(), cube(&[-2]));
        assert!(matches!(
            swap.apply(&cube(&[3])),
            Err(GroupError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permutation_validation_and_display() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        let p = Permutation::new(vec![2, 3, 1, 4]).unwrap();
        assert_eq!(p.to_string(), "(1 2 3)");
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(4));
        assert_eq!(Permutation::identity(2).to_string(), "()");
    }

    #[test]
    fn invariance_examples() {
        // cyclic pattern x_i ∧ ¬x_{i+1} ∧ x_{i+2} over n = 4
        let d = Dnf::new(
            4,
            [
                cube(&[1, -2, 3]),
                cube(&[2, -3, 4]),
                cube(&[3, -4, 1]),
                cube(&[4, -1, 2]),
            ],
        )
        .unwrap();
        assert!(group(GroupKind::Cyclic, 4).is_invariant(&d));
        // with x3 in place of x2 in the last cube the pattern breaks
        let misprint = d
            .map_cubes(|c| {
                if *c == cube(&[4, -1, 2]) {
                    cube(&[4, -1, 3])
                } else {
                    *c
                }
            })
            .unwrap();
        assert!(!group(GroupKind::Cyclic, 4).is_invariant(&misprint));
        assert!(!misprint.has_distinct_supports());

        let d = Dnf::new(2, [cube(&[1])]).unwrap();
        assert!(!group(GroupKind::Symmetric, 2).is_invariant(&d));
        assert!(GroupSpec::trivial(2).is_invariant(&d));
    }

    #[test]
    fn orbit_examples() {
        let o = group(GroupKind::Cyclic, 3).orbit(&cube(&[1])).unwrap();
        assert_eq!(o, BTreeSet::from([cube(&[1]), cube(&[2]), cube(&[3])]));

        let o = group(GroupKind::Symmetric, 3)
            .orbit(&cube(&[1, -2]))
            .unwrap();
        assert_eq!(o.len(), 6);
        assert!(o
            .iter()
            .all(|c| c.len() == 2 && c.polarity().count_ones() == 1));

        let c = cube(&[-2, 3]);
        assert_eq!(
            GroupSpec::trivial(3).orbit(&c).unwrap(),
            BTreeSet::from([c])
        );
    }

    #[test]
    fn kind_parsing() {
        for kind in GroupKind::ALL {
            assert_eq!(kind.name().parse::<GroupKind>().unwrap(), kind);
        }
        assert!("klein".parse::<GroupKind>().is_err());
    }

    fn arb_group() -> impl Strategy<Value = GroupSpec> {
        (0usize..5, 1u32..=6).prop_map(|(k, n)| GroupSpec::new(GroupKind::ALL[k], n).unwrap())
    }

    fn arb_cube(n: u32) -> impl Strategy<Value = Cube> {
        let mask = (1u32 << n) - 1;
        (1..=mask, any::<u32>()).prop_map(|(s, p)| Cube::new(s, p & s).unwrap())
    }

    proptest! {
        #[test]
        fn apply_preserves_length_and_sign_count(g in arb_group(), seed in any::<u64>()) {
            let mask = (1u32 << g.n) - 1;
            let s = (seed as u32 & mask).max(1);
            let c = Cube::new(s, (seed >> 32) as u32 & s).unwrap();
            for p in g.elements().iter().take(50) {
                let d = p.apply(&c).unwrap();
                prop_assert_eq!(d.len(), c.len());
                prop_assert_eq!(d.polarity().count_ones(), c.polarity().count_ones());
            }
        }

        #[test]
        fn orbit_size_divides_group_order(g in arb_group(), c in arb_cube(6)) {
            prop_assume!(c.max_var() <= g.n);
            let order = g.elements().len();
            let orbit = g.orbit(&c).unwrap();
            prop_assert_eq!(order % orbit.len(), 0);
        }

        #[test]
        fn invariance_survives_group_action(g in arb_group(), c in arb_cube(6)) {
            prop_assume!(c.max_var() <= g.n);
            let d = Dnf::new(g.n, g.orbit(&c).unwrap()).unwrap();
            prop_assert!(g.is_invariant(&d));
            for h in g.elements().iter().take(30) {
                let image = d.map_cubes(|x| h.apply(x).unwrap()).unwrap();
                prop_assert!(g.is_invariant(&image));
            }
        }
    }
}

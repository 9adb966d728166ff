//! Search for distinct DNF tautologies with bounded cube lengths.
//!
//! Given `n` variables, a cube-length window `[k, u]` and optionally a
//! permutation group, decide whether some DNF tautology uses only cubes
//! with pairwise different supports, all of length in the window, and is
//! mapped to itself by the group. The question is compiled to CNF
//! ([`encoder`]), handed to a SAT solver ([`sat`]), and every answer is
//! checked by exhaustive evaluation ([`dnf`]). [`search`] and [`table`]
//! drive the search for the largest feasible `k`.

pub mod bounds;
pub mod cnf;
pub mod dnf;
pub mod encoder;
pub mod groups;
pub mod oracle;
pub mod sat;
pub mod search;
pub mod store;
pub mod table;

pub use bounds::{density_bound, density_feasible, BoundResult};
pub use cnf::CnfFormula;
pub use dnf::{Assignment, Cube, Dnf, VerificationReport};
pub use encoder::{build_instance, EncodeOptions, Encoding, Instance, VarMap};
pub use groups::{GroupKind, GroupSpec, Permutation};
pub use oracle::{exists_bruteforce, OracleOptions, OracleResult};
pub use sat::{Backend, Budget, SolveOutcome, Status};
pub use search::{exact_k, max_k, SearchConfig, SearchResult};
pub use store::ResultStore;
pub use table::{reproduce_table, TableKind, TableOptions, TableReport, Tier};

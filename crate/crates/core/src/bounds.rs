//! Density upper bound on the minimal cube length.
//!
//! A cube of length `i` covers a `2^-i` fraction of all assignments and a
//! distinct DNF uses each of the `C(n, i)` supports at most once, so a
//! tautology with cube lengths in `[k, u]` can only exist when
//! `sum_{i=k}^{u} C(n, i) 2^-i >= 1`. The inequality is decided exactly
//! after multiplying through by `2^u`.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("expected 0 <= k <= u <= n, got n = {n}, u = {u}, k = {k}")]
    Order { n: u32, u: u32, k: u32 },
    #[error("expected 1 <= u <= n, got n = {n}, u = {u}")]
    Window { n: u32, u: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub n: u32,
    pub u: u32,
    /// Largest `k` satisfying the density inequality, `-1` if none does.
    pub k_max_bound: i32,
    /// `per_k_feasible[k]` for `k` in `0..=u`.
    pub per_k_feasible: Vec<bool>,
}

impl BoundResult {
    /// The per-k table as CSV with a `k,feasible` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,feasible\n");
        for (k, ok) in self.per_k_feasible.iter().enumerate() {
            out.push_str(&format!("{k},{ok}\n"));
        }
        out
    }
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: u32) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::one());
        row = next;
    }
    row
}

fn feasible_with_row(row: &[BigUint], u: u32, k: u32) -> bool {
    let lhs: BigUint = (k..=u).map(|i| &row[i as usize] << (u - i) as usize).sum();
    lhs >= BigUint::one() << u as usize
}

/// Whether `sum_{i=k}^{u} C(n, i) 2^-i >= 1`.
pub fn density_feasible(n: u32, u: u32, k: u32) -> Result<bool, BoundsError> {
    if k > u || u > n {
        return Err(BoundsError::Order { n, u, k });
    }
    Ok(feasible_with_row(&binomial_row(n), u, k))
}

pub fn density_bound(n: u32, u: u32) -> Result<BoundResult, BoundsError> {
    if u == 0 || u > n {
        return Err(BoundsError::Window { n, u });
    }
    let row = binomial_row(n);
    let per_k_feasible: Vec<bool> = (0..=u).map(|k| feasible_with_row(&row, u, k)).collect();
    let k_max_bound = per_k_feasible
        .iter()
        .rposition(|&ok| ok)
        .map_or(-1, |k| k as i32);
    Ok(BoundResult {
        n,
        u,
        k_max_bound,
        per_k_feasible,
    })
}

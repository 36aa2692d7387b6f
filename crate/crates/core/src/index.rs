//! The closed-form `(α, β)`-power index.

use num_traits::Zero;

use crate::graph::{NodeId, UnionGraph};
use crate::linear::{int, ratio, LinearForm, Rational};

/// `φ_i` as a linear form: `a = d_i(S^{-i})`,
/// `b = Σ_{j ∈ N(i, S^{-i})} d_j(S^{-i}) / d_j(S^i)`.
pub fn node_index(g: &UnionGraph, i: NodeId) -> LinearForm {
    let own = g.own_union(i);
    let outside = g.outside_union(i);
    let ext = g.external_neighbors(i);
    // j is adjacent to i, so d_j(S^i) >= 1.
    let b = ext
        .iter()
        .map(|j| ratio(g.degree_in(j, outside) as i64, g.degree_in(j, own) as i64))
        .fold(Rational::zero(), |acc, x| acc + x);
    LinearForm::new(int(ext.len() as i64), b)
}

pub fn power_index(g: &UnionGraph) -> Vec<LinearForm> {
    (0..g.node_count()).map(|i| node_index(g, i)).collect()
}

/// Coefficient `c_i` with `φ_i^{(α, α)} = c_i·α`.
pub fn symmetric_index(g: &UnionGraph) -> Vec<Rational> {
    (0..g.node_count())
        .map(|i| {
            let own = g.own_union(i);
            g.external_neighbors(i)
                .iter()
                .map(|j| ratio(g.degree(j) as i64, g.degree_in(j, own) as i64))
                .fold(Rational::zero(), |acc, x| acc + x)
        })
        .collect()
}

/// `Σ_i φ_i` computed from topology alone:
/// `2·ε^ext·α + Σ_i Σ_{ℓ ∈ u(i)} d_i(N \ S_ℓ)·β`.
pub fn total_power(g: &UnionGraph) -> LinearForm {
    let b: usize = (0..g.node_count())
        .map(|i| {
            (0..g.union_count())
                .filter(|&l| l != g.union_of(i) && g.degree_in(i, g.union(l)) > 0)
                .map(|l| g.degree_in(i, g.nodes().difference(g.union(l))))
                .sum::<usize>()
        })
        .sum();
    LinearForm::ints(2 * g.external_edge_count() as i64, b as i64)
}

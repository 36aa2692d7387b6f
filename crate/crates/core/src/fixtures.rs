//! Built-in demo graphs. Construction uses 1-based labels.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::UnionGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown fixture `{0}`; expected one of: {}", FIXTURE_NAMES.join(", "))]
pub struct UnknownFixture(pub String);

pub const FIXTURE_NAMES: [&str; 6] =
    ["example1", "figure2a", "figure2b", "figure3", "unanimity4a", "local-unanimity4b"];

/// Builds a graph from 1-based union blocks and edges. Panics on invalid
/// data, so only use it with literals.
pub fn labelled(n: usize, unions: &[&[usize]], edges: &[(usize, usize)]) -> UnionGraph {
    let unions: Vec<Vec<usize>> = unions.iter().map(|u| u.iter().map(|i| i - 1).collect()).collect();
    let edges: Vec<_> = edges.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    UnionGraph::validate(n, &unions, &edges).expect("fixture literal is valid")
}

pub fn example1() -> UnionGraph {
    labelled(
        10,
        &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9, 10]],
        &[
            (1, 2),
            (1, 4),
            (1, 5),
            (1, 6),
            (1, 7),
            (2, 4),
            (3, 4),
            (3, 10),
            (4, 7),
            (5, 8),
            (6, 9),
            (6, 10),
            (4, 5),
            (5, 6),
        ],
    )
}

pub fn example1_labels() -> BTreeMap<usize, String> {
    ["Toyota", "Ford", "BMW", "NVIDIA", "Intel", "Waymo", "Verizon", "AT&T", "Ericsson", "Huawei"]
        .iter()
        .enumerate()
        .map(|(i, name)| (i, name.to_string()))
        .collect()
}

pub fn figure2a() -> UnionGraph {
    labelled(6, &[&[1, 2, 3], &[4, 5, 6]], &[(1, 2), (1, 3), (1, 4), (4, 5), (5, 6)])
}

pub fn figure2b() -> UnionGraph {
    labelled(6, &[&[1, 2, 3], &[4, 5, 6]], &[(1, 2), (1, 3), (1, 4), (4, 5), (5, 6), (1, 6)])
}

pub fn figure3() -> UnionGraph {
    labelled(
        12,
        &[&[1], &[2, 3], &[4, 5, 6, 7], &[8, 9], &[10, 11, 12]],
        &[(1, 4), (2, 5), (2, 7), (3, 9), (6, 10), (6, 12), (8, 11)],
    )
}

pub fn unanimity4a() -> UnionGraph {
    labelled(8, &[&[1, 2, 3, 8], &[4, 5, 6, 7]], &[(1, 2), (1, 3), (1, 4), (1, 5), (1, 6)])
}

pub fn local_unanimity4b() -> UnionGraph {
    labelled(8, &[&[1, 2, 3, 8], &[4, 5, 6, 7]], &[(1, 4), (1, 5), (1, 6)])
}

/// The path 1-2-3-4 with unions {1}, {2,4}, {3}.
pub fn four_node_path() -> UnionGraph {
    labelled(4, &[&[1], &[2, 4], &[3]], &[(1, 2), (2, 3), (3, 4)])
}

/// Node 1 alone, joined to both members of {2,3}.
pub fn three_node_star() -> UnionGraph {
    labelled(3, &[&[1], &[2, 3]], &[(1, 2), (1, 3)])
}

/// Edges {1,2},{1,3} with 2 and 3 sharing a union apart from 1, plus a
/// spare node so that the other union is not a singleton.
pub fn label_sensitive_star() -> UnionGraph {
    labelled(4, &[&[1, 4], &[2, 3]], &[(1, 2), (1, 3)])
}

/// Named fixture plus its optional node labels.
pub fn by_name(name: &str) -> Result<(UnionGraph, BTreeMap<usize, String>), UnknownFixture> {
    let graph = match name {
        "example1" => return Ok((example1(), example1_labels())),
        "figure2a" => figure2a(),
        "figure2b" => figure2b(),
        "figure3" => figure3(),
        "unanimity4a" => unanimity4a(),
        "local-unanimity4b" => local_unanimity4b(),
        other => return Err(UnknownFixture(other.to_string())),
    };
    Ok((graph, BTreeMap::new()))
}

/// Small graphs used as extra members of every axiom universe.
pub fn small_graphs() -> Vec<UnionGraph> {
    vec![four_node_path(), three_node_star(), label_sensitive_star(), labelled(3, &[&[1], &[2, 3]], &[(1, 2)])]
}

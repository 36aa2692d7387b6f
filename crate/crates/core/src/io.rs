//! JSON graph documents:
//! `{"nodes": n, "unions": [[1, 2], ...], "edges": [[1, 3], ...], "labels": {"1": "name"}}`
//! with 1-based node ids throughout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, UnionGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: usize,
    pub unions: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("node id 0 in {0}; ids are 1-based")]
    ZeroId(&'static str),
    #[error("label key `{0}` is not a node id")]
    BadLabel(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A validated graph with its display labels, keyed by 0-based id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledGraph {
    pub graph: UnionGraph,
    pub labels: BTreeMap<usize, String>,
}

impl LabelledGraph {
    pub fn unlabelled(graph: UnionGraph) -> Self {
        Self { graph, labels: BTreeMap::new() }
    }

    /// `"3"` or `"3 (BMW)"`.
    pub fn describe(&self, i: usize) -> String {
        match self.labels.get(&i) {
            Some(name) => format!("{} ({name})", i + 1),
            None => (i + 1).to_string(),
        }
    }
}

impl GraphDocument {
    pub fn from_graph(graph: &UnionGraph, labels: &BTreeMap<usize, String>) -> Self {
        Self {
            nodes: graph.node_count(),
            unions: graph.unions().iter().map(|s| s.labels()).collect(),
            edges: graph.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            labels: labels.iter().map(|(i, l)| ((i + 1).to_string(), l.clone())).collect(),
        }
    }

    pub fn into_graph(self) -> Result<LabelledGraph, LoadError> {
        let shift = |v: usize, ctx| v.checked_sub(1).ok_or(LoadError::ZeroId(ctx));
        let unions = self
            .unions
            .iter()
            .map(|u| u.iter().map(|&v| shift(v, "unions")).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let edges = self
            .edges
            .iter()
            .map(|&[i, j]| Ok((shift(i, "edges")?, shift(j, "edges")?)))
            .collect::<Result<Vec<_>, LoadError>>()?;
        let graph = UnionGraph::validate(self.nodes, &unions, &edges)?;
        let mut labels = BTreeMap::new();
        for (key, name) in self.labels {
            let id: usize = key.parse().map_err(|_| LoadError::BadLabel(key.clone()))?;
            if id == 0 || id > graph.node_count() {
                return Err(LoadError::BadLabel(key));
            }
            labels.insert(id - 1, name);
        }
        Ok(LabelledGraph { graph, labels })
    }
}

pub fn parse_graph(json: &str) -> Result<LabelledGraph, LoadError> {
    serde_json::from_str::<GraphDocument>(json)?.into_graph()
}

pub fn to_json(graph: &UnionGraph, labels: &BTreeMap<usize, String>) -> String {
    serde_json::to_string_pretty(&GraphDocument::from_graph(graph, labels)).expect("graph documents serialize")
}

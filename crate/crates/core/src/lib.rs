//! Exact power indices, TU games and axiom checks on graphs with a priori
//! unions.
//!
//! Every value is carried as a [`LinearForm`] `a·α + b·β` over exact
//! rationals, so results hold for all market parameters at once and can be
//! compared for equality without tolerances.

pub mod axioms;
pub mod fixtures;
pub mod game;
pub mod graph;
pub mod index;
pub mod io;
pub mod linear;
pub mod ranking;

pub use graph::{DegreeProfile, Edge, GraphError, NodeId, NodeSet, UnionGraph};
pub use linear::{format_rational, int, parse_rational, ratio, LinearForm, MarketParams, Rational};

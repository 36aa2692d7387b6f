//! Dense rankings, pairwise rank-reversal thresholds and `ρ = β/α` sweeps.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{NodeId, NodeSet, UnionGraph};
use crate::index::power_index;
use crate::linear::{format_rational, int, ratio, LinearForm, MarketParams, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankingError {
    #[error("the graph does not have the restricted spillover property")]
    SpilloverPropertyAbsent,
    #[error("rho_max must be positive, got {0}")]
    NonPositiveRhoMax(String),
}

/// Dense ranking: `groups[0]` holds the rank-1 nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub groups: Vec<NodeSet>,
    pub params: MarketParams,
}

impl Ranking {
    /// Rank (1-based) of node `i`.
    pub fn rank_of(&self, i: NodeId) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(i)).map(|p| p + 1)
    }

    pub fn same_order(&self, other: &Ranking) -> bool {
        self.groups == other.groups
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|g| g.labels().iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Ranks precomputed forms at `p`, highest value first.
pub fn rank_forms(forms: &[LinearForm], p: &MarketParams) -> Ranking {
    let mut scored: Vec<(Rational, NodeId)> = forms.iter().map(|f| f.evaluate(p)).zip(0..).collect();
    scored.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut groups: Vec<NodeSet> = Vec::new();
    let mut last: Option<&Rational> = None;
    for (value, i) in &scored {
        match (last, groups.last_mut()) {
            (Some(prev), Some(group)) if prev == value => *group = group.with(*i),
            _ => groups.push(NodeSet::singleton(*i)),
        }
        last = Some(value);
    }
    Ranking { groups, params: p.clone() }
}

pub fn ranking_at(g: &UnionGraph, p: &MarketParams) -> Ranking {
    rank_forms(&power_index(g), p)
}

/// `ρ* = −(a_i − a_j)/(b_i − b_j)` when `(a_i − a_j)(b_i − b_j) < 0`.
pub fn form_threshold(fi: &LinearForm, fj: &LinearForm) -> Option<Rational> {
    let da = &fi.a - &fj.a;
    let db = &fi.b - &fj.b;
    if (&da * &db).is_negative() {
        Some(-da / db)
    } else {
        None
    }
}

pub fn reversal_threshold(g: &UnionGraph, i: NodeId, j: NodeId) -> Option<Rational> {
    form_threshold(&super::index::node_index(g, i), &super::index::node_index(g, j))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Window {
    Point(Rational),
    Open(Rational, Rational),
}

impl Window {
    /// Header text: `r = 3/19` or `0 < r < 3/19`.
    pub fn header(&self) -> String {
        match self {
            Window::Point(r) => format!("r = {}", format_rational(r)),
            Window::Open(lo, hi) => format!("{} < r < {}", format_rational(lo), format_rational(hi)),
        }
    }

    /// Point evaluated for this column.
    pub fn sample(&self) -> Rational {
        match self {
            Window::Point(r) => r.clone(),
            Window::Open(lo, hi) => (lo + hi) / int(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepColumn {
    pub window: Window,
    pub ranking: Ranking,
}

/// Rankings over `ρ ∈ [0, ρ_max]` with `α = 1`. Columns run
/// `ρ = 0`, `(0, b_1)`, `b_1`, ..., `(b_k, ρ_max)`, `ρ = ρ_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSweep {
    pub rho_max: Rational,
    pub breakpoints: Vec<Rational>,
    pub columns: Vec<SweepColumn>,
}

impl RankSweep {
    pub fn max_rank(&self) -> usize {
        self.columns.iter().map(|c| c.ranking.groups.len()).max().unwrap_or(0)
    }
}

pub fn rank_sweep(g: &UnionGraph, rho_max: &Rational) -> Result<RankSweep, RankingError> {
    if !rho_max.is_positive() {
        return Err(RankingError::NonPositiveRhoMax(format_rational(rho_max)));
    }
    let forms = power_index(g);
    let mut candidates: Vec<Rational> = forms
        .iter()
        .enumerate()
        .flat_map(|(i, fi)| forms[i + 1..].iter().filter_map(move |fj| form_threshold(fi, fj)))
        .filter(|r| r < rho_max)
        .collect();
    candidates.sort();
    candidates.dedup();

    let at = |rho: Rational| rank_forms(&forms, &MarketParams::from_rho(rho));
    let mut breakpoints = Vec::new();
    let mut lo = Rational::zero();
    for (k, b) in candidates.iter().enumerate() {
        let hi = candidates.get(k + 1).unwrap_or(rho_max);
        let left = at((&lo + b) / int(2));
        let right = at((b + hi) / int(2));
        if !left.same_order(&right) {
            breakpoints.push(b.clone());
            lo = b.clone();
        }
    }

    let mut columns = vec![SweepColumn { window: Window::Point(Rational::zero()), ranking: at(Rational::zero()) }];
    let mut left = Rational::zero();
    for b in breakpoints.iter().chain(std::iter::once(rho_max)) {
        for window in [Window::Open(left.clone(), b.clone()), Window::Point(b.clone())] {
            let ranking = at(window.sample());
            columns.push(SweepColumn { window, ranking });
        }
        left = b.clone();
    }
    Ok(RankSweep { rho_max: rho_max.clone(), breakpoints, columns })
}

/// 5×5 grid with `α > 0`, including `β = 0`.
pub fn default_grid() -> Vec<MarketParams> {
    let alphas = [ratio(1, 3), int(1), int(2), ratio(7, 2), int(10)];
    let betas = [int(0), ratio(1, 5), int(1), int(3), int(100)];
    alphas.iter().flat_map(|a| betas.iter().map(move |b| MarketParams::new(a.clone(), b.clone()))).collect()
}

pub fn spillover_invariance_check(g: &UnionGraph) -> Result<bool, RankingError> {
    spillover_invariance_on(g, &default_grid())
}

/// All `b` coefficients vanish and every grid point yields the same ranking.
pub fn spillover_invariance_on(g: &UnionGraph, grid: &[MarketParams]) -> Result<bool, RankingError> {
    if g.restricted_spillover().is_none() {
        return Err(RankingError::SpilloverPropertyAbsent);
    }
    let forms = power_index(g);
    if forms.iter().any(|f| !f.b.is_zero()) {
        return Ok(false);
    }
    let mut rankings = grid.iter().filter(|p| p.alpha.is_positive()).map(|p| rank_forms(&forms, p));
    let Some(first) = rankings.next() else { return Ok(true) };
    Ok(rankings.all(|r| r.same_order(&first)))
}

/// Sign of `φ_i − φ_j` at `(1, ρ)`.
pub fn compare_at(fi: &LinearForm, fj: &LinearForm, rho: &Rational) -> Ordering {
    let p = MarketParams::from_rho(rho.clone());
    fi.evaluate(&p).cmp(&fj.evaluate(&p))
}

//! The TU game on a graph with a priori unions, its Harsanyi dividends, its
//! potential, and four independent routes to the Shapley value.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{NodeId, NodeSet, UnionGraph};
use crate::linear::{int, LinearForm, Rational};

pub type Coalition = NodeSet;

pub const DEFAULT_MAX_UNION_SIZE: usize = 20;
pub const DEFAULT_MAX_BRUTEFORCE_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("coalition {0:?} is not contained in a single union")]
    CoalitionSpansUnions(Coalition),
    #[error("union {union} has {size} members; the dividend bound is {bound}")]
    UnionTooLarge { union: usize, size: usize, bound: usize },
    #[error("graph has {n} nodes; the brute-force bound is {bound}")]
    GraphTooLarge { n: usize, bound: usize },
}

impl GameError {
    /// Errors caused by configured size limits rather than bad input.
    pub fn is_bound_violation(&self) -> bool {
        !matches!(self, GameError::CoalitionSpansUnions(_))
    }
}

/// Worths have integer coefficients, so the hot loops stay in machine ints.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
struct IntForm {
    a: i64,
    b: i64,
}

impl IntForm {
    fn to_linear(self) -> LinearForm {
        LinearForm::ints(self.a, self.b)
    }

    fn plus(self, o: IntForm) -> IntForm {
        IntForm { a: self.a + o.a, b: self.b + o.b }
    }

    fn minus(self, o: IntForm) -> IntForm {
        IntForm { a: self.a - o.a, b: self.b - o.b }
    }
}

/// One-step and two-step worth of `t ⊆ S_l`, as integer `(a, b)`.
fn union_worth(g: &UnionGraph, l: usize, t: Coalition) -> (i64, i64) {
    let outside = g.nodes().difference(g.union(l));
    let mut a = 0;
    let mut reach = NodeSet::EMPTY;
    for i in t {
        let ext = g.neighbors(i, Some(outside));
        a += ext.len() as i64;
        reach = reach.union(ext);
    }
    let b = reach.iter().map(|h| g.degree_in(h, outside) as i64).sum();
    (a, b)
}

fn containing_union(g: &UnionGraph, t: Coalition) -> Result<Option<usize>, GameError> {
    let Some(first) = t.first() else { return Ok(None) };
    let l = g.union_of(first);
    if t.is_subset(g.union(l)) {
        Ok(Some(l))
    } else {
        Err(GameError::CoalitionSpansUnions(t))
    }
}

/// `ν₁(T) = α Σ_{i ∈ T} d_i(N \ S_l)` for `T ⊆ S_l`.
pub fn nu1(g: &UnionGraph, t: Coalition) -> Result<LinearForm, GameError> {
    Ok(match containing_union(g, t)? {
        Some(l) => LinearForm::ints(union_worth(g, l, t).0, 0),
        None => LinearForm::zero(),
    })
}

/// `ν₂(T) = β Σ_{h ∈ N(T) \ S_l} d_h(N \ S_l)` for `T ⊆ S_l`.
pub fn nu2(g: &UnionGraph, t: Coalition) -> Result<LinearForm, GameError> {
    Ok(match containing_union(g, t)? {
        Some(l) => LinearForm::ints(0, union_worth(g, l, t).1),
        None => LinearForm::zero(),
    })
}

fn worth(g: &UnionGraph, t: Coalition) -> IntForm {
    (0..g.union_count())
        .map(|l| {
            let part = t.intersection(g.union(l));
            if part.is_empty() {
                IntForm::default()
            } else {
                let (a, b) = union_worth(g, l, part);
                IntForm { a, b }
            }
        })
        .fold(IntForm::default(), IntForm::plus)
}

/// Lazily evaluated characteristic function with a thread-safe memo.
pub struct GameValueTable<'g> {
    graph: &'g UnionGraph,
    memo: RwLock<HashMap<Coalition, IntForm>>,
}

impl<'g> GameValueTable<'g> {
    pub fn graph(&self) -> &'g UnionGraph {
        self.graph
    }

    fn int_value(&self, t: Coalition) -> IntForm {
        if let Some(v) = self.memo.read().expect("memo lock").get(&t) {
            return *v;
        }
        let v = worth(self.graph, t);
        self.memo.write().expect("memo lock").insert(t, v);
        v
    }

    /// `ν(T)`.
    pub fn value(&self, t: Coalition) -> LinearForm {
        self.int_value(t).to_linear()
    }

    pub fn cached(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }
}

pub fn characteristic(g: &UnionGraph) -> GameValueTable<'_> {
    GameValueTable { graph: g, memo: RwLock::new(HashMap::new()) }
}

/// First pair `({i}, {j})` of same-union nodes, in `(i, j)` order, with
/// `ν({i, j}).b < ν({i}).b + ν({j}).b`.
pub fn subadditivity_witness(g: &UnionGraph) -> Option<(Coalition, Coalition)> {
    let n = g.node_count();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find_map(|(i, j)| {
        if g.union_of(i) != g.union_of(j) {
            return None;
        }
        let (si, sj) = (NodeSet::singleton(i), NodeSet::singleton(j));
        let joint = worth(g, si.union(sj)).b;
        (joint < worth(g, si).b + worth(g, sj).b).then_some((si, sj))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dividend {
    pub union: usize,
    pub coalition: Coalition,
    pub value: LinearForm,
}

/// Nonzero Harsanyi dividends, sorted by union, cardinality, then members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DividendTable {
    entries: Vec<Dividend>,
}

impl DividendTable {
    pub fn entries(&self) -> &[Dividend] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Δ(T)`, zero when not listed.
    pub fn get(&self, t: Coalition) -> LinearForm {
        self.entries.iter().find(|d| d.coalition == t).map(|d| d.value.clone()).unwrap_or_default()
    }

    /// `Σ_{∅ ≠ S ⊆ T} Δ(S)`.
    pub fn mobius_sum(&self, t: Coalition) -> LinearForm {
        self.entries.iter().filter(|d| d.coalition.is_subset(t)).map(|d| &d.value).sum()
    }

    /// `Sh_i = Σ_{T ∋ i} Δ(T) / |T|`.
    pub fn shapley(&self, n: usize) -> Vec<LinearForm> {
        let mut sh = vec![LinearForm::zero(); n];
        for d in &self.entries {
            let share = d.value.scale(&Rational::new(BigInt::one(), BigInt::from(d.coalition.len())));
            for i in d.coalition {
                sh[i] += &share;
            }
        }
        sh
    }
}

pub fn harsanyi_dividends(g: &UnionGraph) -> Result<DividendTable, GameError> {
    harsanyi_dividends_bounded(g, DEFAULT_MAX_UNION_SIZE)
}

/// Dividends are only computed inside unions; every coalition that spans two
/// unions has a zero dividend because the game is a sum of per-union games.
pub fn harsanyi_dividends_bounded(g: &UnionGraph, max_union: usize) -> Result<DividendTable, GameError> {
    for (l, s) in g.unions().iter().enumerate() {
        if s.len() > max_union {
            return Err(GameError::UnionTooLarge { union: l + 1, size: s.len(), bound: max_union });
        }
    }
    let mut entries = Vec::new();
    for (l, &s) in g.unions().iter().enumerate() {
        let members: Vec<NodeId> = s.iter().collect();
        let k = members.len();
        let lift = |mask: usize| -> Coalition {
            members.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect()
        };
        let mut f: Vec<IntForm> = (0..1usize << k)
            .into_par_iter()
            .map(|mask| {
                let (a, b) = union_worth(g, l, lift(mask));
                IntForm { a, b }
            })
            .collect();
        for bit in 0..k {
            for mask in 0..1usize << k {
                if mask >> bit & 1 == 1 {
                    f[mask] = f[mask].minus(f[mask ^ 1 << bit]);
                }
            }
        }
        let mut union_entries: Vec<Dividend> = f
            .iter()
            .enumerate()
            .filter(|(mask, v)| *mask != 0 && **v != IntForm::default())
            .map(|(mask, v)| Dividend { union: l, coalition: lift(mask), value: v.to_linear() })
            .collect();
        union_entries.sort_by_key(|d| (d.coalition.len(), d.coalition.labels()));
        entries.extend(union_entries);
    }
    Ok(DividendTable { entries })
}

pub fn shapley_via_dividends(g: &UnionGraph) -> Result<Vec<LinearForm>, GameError> {
    Ok(harsanyi_dividends(g)?.shapley(g.node_count()))
}

fn harmonic(k: usize) -> Rational {
    (1..=k).map(|t| Rational::new(BigInt::one(), BigInt::from(t))).fold(Rational::zero(), |acc, x| acc + x)
}

/// `P(T) = Σ_l [α Σ_{j ∈ T_l} d_j(S^{-j}) + β Σ_{h ∉ S_l} H(d_h(T_l))·d_h(N \ S_l)]`
/// with `T_l = T ∩ S_l` and `H` the harmonic number.
pub fn potential(g: &UnionGraph, t: Coalition) -> LinearForm {
    let mut a = 0i64;
    let mut b = Rational::zero();
    for &s in g.unions() {
        let part = t.intersection(s);
        if part.is_empty() {
            continue;
        }
        let outside = g.nodes().difference(s);
        a += part.iter().map(|j| g.external_degree(j) as i64).sum::<i64>();
        for h in outside {
            let hits = g.degree_in(h, part);
            if hits > 0 {
                b += harmonic(hits) * int(g.degree_in(h, outside) as i64);
            }
        }
    }
    LinearForm::new(int(a), b)
}

/// `Sh_i = P(N) − P(N \ {i})`.
pub fn shapley_via_potential(g: &UnionGraph) -> Vec<LinearForm> {
    let all = g.nodes();
    let total = potential(g, all);
    (0..g.node_count()).map(|i| &total - &potential(g, all.without(i))).collect()
}

/// `Σ_{i ∈ T} [P(T) − P(T \ {i})] = ν(T)`.
pub fn verify_potential_identity(g: &UnionGraph, t: Coalition) -> bool {
    let p = potential(g, t);
    let lhs: LinearForm = t.iter().map(|i| &p - &potential(g, t.without(i))).sum();
    lhs == worth(g, t).to_linear()
}

pub fn shapley_bruteforce(g: &UnionGraph) -> Result<Vec<LinearForm>, GameError> {
    shapley_bruteforce_bounded(g, DEFAULT_MAX_BRUTEFORCE_N)
}

/// The subset formula `Σ_{T ∌ i} |T|!(n−|T|−1)!/n! · (ν(T ∪ {i}) − ν(T))`
/// over all `2^n` coalitions. Marginals are accumulated per cardinality in
/// integers and weighted once.
pub fn shapley_bruteforce_bounded(g: &UnionGraph, max_n: usize) -> Result<Vec<LinearForm>, GameError> {
    let n = g.node_count();
    if n > max_n {
        return Err(GameError::GraphTooLarge { n, bound: max_n });
    }
    let table: Vec<IntForm> = (0..1u64 << n).into_par_iter().map(|m| worth(g, NodeSet(m))).collect();
    let factorial = |k: usize| (1..=k).fold(BigInt::one(), |acc, x| acc * BigInt::from(x));
    let weights: Vec<Rational> =
        (0..n).map(|k| Rational::new(factorial(k) * factorial(n - k - 1), factorial(n))).collect();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut by_size = vec![(0i128, 0i128); n];
            let bit = 1u64 << i;
            for m in 0..1u64 << n {
                if m & bit != 0 {
                    continue;
                }
                let d = table[(m | bit) as usize].minus(table[m as usize]);
                let slot = &mut by_size[m.count_ones() as usize];
                slot.0 += d.a as i128;
                slot.1 += d.b as i128;
            }
            by_size
                .iter()
                .zip(&weights)
                .map(|(&(a, b), w)| {
                    LinearForm::new(Rational::from_integer(a.into()), Rational::from_integer(b.into())).scale(w)
                })
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::index::power_index;
    use crate::linear::{ratio, MarketParams};

    fn set(labels: &[usize]) -> Coalition {
        labels.iter().map(|l| l - 1).collect()
    }

    #[test]
    fn one_and_two_step_worths() {
        let g = fixtures::example1();
        assert_eq!(nu1(&g, set(&[1])).unwrap(), LinearForm::ints(4, 0));
        assert_eq!(nu1(&g, set(&[1, 2, 3])).unwrap(), LinearForm::ints(7, 0));
        assert_eq!(nu2(&g, set(&[1])).unwrap(), LinearForm::ints(0, 9));
        assert_eq!(nu2(&g, set(&[1, 2, 3])).unwrap(), LinearForm::ints(0, 10));
        assert!(nu1(&g, Coalition::EMPTY).unwrap().is_zero());
        assert!(nu2(&g, Coalition::EMPTY).unwrap().is_zero());
        assert!(matches!(nu1(&g, set(&[1, 4])), Err(GameError::CoalitionSpansUnions(_))));
    }

    #[test]
    fn characteristic_function_examples() {
        let g = fixtures::example1();
        let nu = characteristic(&g);
        assert_eq!(nu.value(g.nodes()), LinearForm::ints(22, 30));
        assert_eq!(nu.value(set(&[7])), LinearForm::ints(2, 8));
        assert!(nu.value(Coalition::EMPTY).is_zero());
        let (t, s) = (set(&[1, 2]), set(&[5, 9]));
        assert_eq!(nu.value(t.union(s)), nu.value(t) + nu.value(s));
        assert_eq!(nu.value(set(&[1, 2, 3])), LinearForm::ints(7, 10));
        assert!(nu.cached() > 0);
    }

    #[test]
    fn subadditivity_witnesses() {
        assert_eq!(subadditivity_witness(&fixtures::example1()), Some((set(&[1]), set(&[2]))));
        assert_eq!(subadditivity_witness(&fixtures::figure3()), None);
        let singletons = fixtures::labelled(3, &[&[1], &[2], &[3]], &[(1, 2), (2, 3), (1, 3)]);
        assert_eq!(subadditivity_witness(&singletons), None);
    }

    #[test]
    fn shared_neighbour_without_onward_links_is_not_strict() {
        let g = fixtures::labelled(3, &[&[1, 2], &[3]], &[(1, 3), (2, 3)]);
        assert_eq!(subadditivity_witness(&g), None);
    }

    #[test]
    fn example1_dividends() {
        let g = fixtures::example1();
        let table = harsanyi_dividends(&g).unwrap();
        assert_eq!(table.len(), 19);
        assert_eq!(table.get(set(&[1])), LinearForm::ints(4, 9));
        assert_eq!(table.get(set(&[1, 2])), LinearForm::ints(0, -2));
        assert_eq!(table.get(set(&[4, 5, 6])), LinearForm::ints(0, 2));
        assert!(table.get(set(&[1, 4])).is_zero());
        let first: Vec<_> = table.entries().iter().take(4).map(|d| d.coalition.labels()).collect();
        assert_eq!(first, vec![vec![1], vec![2], vec![3], vec![1, 2]]);
    }

    #[test]
    fn dividends_at_beta_zero_are_singletons() {
        let g = fixtures::example1();
        let p = MarketParams::ints(1, 0);
        for d in harsanyi_dividends(&g).unwrap().entries() {
            if d.coalition.len() > 1 {
                assert_eq!(d.value.evaluate(&p), int(0));
            } else {
                assert_eq!(d.value.evaluate(&p), nu1(&g, d.coalition).unwrap().evaluate(&p));
            }
        }
    }

    #[test]
    fn dividend_bound_is_enforced() {
        let err = harsanyi_dividends_bounded(&fixtures::example1(), 3).unwrap_err();
        assert_eq!(err, GameError::UnionTooLarge { union: 3, size: 4, bound: 3 });
        assert!(err.is_bound_violation());
    }

    #[test]
    fn shapley_routes_on_example1() {
        let g = fixtures::example1();
        let phi = power_index(&g);
        let via_div = shapley_via_dividends(&g).unwrap();
        assert_eq!(via_div[0], LinearForm::new(int(4), ratio(23, 3)));
        assert_eq!(via_div[6], LinearForm::ints(2, 8));
        let via_pot = shapley_via_potential(&g);
        assert_eq!(via_pot[3], LinearForm::new(int(4), ratio(11, 3)));
        assert_eq!(via_div, phi);
        assert_eq!(via_pot, phi);
        assert_eq!(shapley_bruteforce(&g).unwrap(), phi);
    }

    #[test]
    fn single_edge_shapley() {
        let g = fixtures::labelled(6, &[&[1, 2, 3], &[4, 5, 6]], &[(1, 4)]);
        let sh = shapley_bruteforce(&g).unwrap();
        assert_eq!(sh[0], LinearForm::ints(1, 0));
        assert_eq!(sh[3], LinearForm::ints(1, 0));
        assert!(sh[1].is_zero());
    }

    #[test]
    fn empty_graph_has_zero_values() {
        let g = crate::UnionGraph::validate(4, &[vec![0, 1], vec![2, 3]], &[]).unwrap();
        assert!(shapley_bruteforce(&g).unwrap().iter().all(LinearForm::is_zero));
        assert!(shapley_via_dividends(&g).unwrap().iter().all(LinearForm::is_zero));
        assert!(harsanyi_dividends(&g).unwrap().is_empty());
    }

    #[test]
    fn bruteforce_bound_is_enforced() {
        let err = shapley_bruteforce_bounded(&fixtures::figure3(), 10).unwrap_err();
        assert_eq!(err, GameError::GraphTooLarge { n: 12, bound: 10 });
    }

    #[test]
    fn potential_examples() {
        let g = fixtures::figure2a();
        assert!(potential(&g, Coalition::EMPTY).is_zero());
        assert_eq!(potential(&g, set(&[1])), LinearForm::ints(1, 1));
        let g = fixtures::example1();
        let all = g.nodes();
        assert_eq!(&potential(&g, all) - &potential(&g, all.without(0)), LinearForm::new(int(4), ratio(23, 3)));
        assert!(verify_potential_identity(&g, Coalition::EMPTY));
        assert!(verify_potential_identity(&g, all));
    }
}

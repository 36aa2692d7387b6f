//! Unanimity-graph recognition, axiom checks over bounded graph universes,
//! and the index functions that break exactly one axiom each.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{NodeId, NodeSet, UnionGraph};
use crate::index::power_index;
use crate::io::GraphDocument;
use crate::linear::{format_rational, int, ratio, LinearForm, MarketParams, Rational};
use crate::{fixtures, index};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    EN,
    IUN,
    A,
    Li,
    UI,
    ConI,
    Ba,
    EP,
    PConI,
}

impl Axiom {
    /// The seven axioms characterizing the index for arbitrary `(α, β)`.
    pub const CORE: [Axiom; 7] = [Axiom::EN, Axiom::IUN, Axiom::A, Axiom::Li, Axiom::UI, Axiom::ConI, Axiom::Ba];
    pub const ALL: [Axiom; 9] =
        [Axiom::EN, Axiom::IUN, Axiom::A, Axiom::Li, Axiom::UI, Axiom::ConI, Axiom::Ba, Axiom::EP, Axiom::PConI];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::EN => "EN",
            Axiom::IUN => "IUN",
            Axiom::A => "A",
            Axiom::Li => "Li",
            Axiom::UI => "UI",
            Axiom::ConI => "ConI",
            Axiom::Ba => "Ba",
            Axiom::EP => "EP",
            Axiom::PConI => "PConI",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("no violating fixture exists for axiom {0}")]
    NoFixture(Axiom),
    #[error("the universe is empty")]
    EmptyUniverse,
    #[error("exhaustive universes are limited to n <= {limit}, got {requested}")]
    UniverseTooLarge { requested: usize, limit: usize },
    #[error("the graph has no incomplete bridge")]
    NoIncompleteBridge,
}

impl FromStr for Axiom {
    type Err = AxiomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| AxiomError::UnknownAxiom(s.to_string()))
    }
}

/// Whether `i` satisfies the hub condition of a unanimity graph.
fn is_hub(g: &UnionGraph, i: NodeId) -> bool {
    let ext = g.external_degree(i);
    if ext == 0 || ext != g.external_edge_count() {
        return false;
    }
    let spokes = g.neighbors(i, Some(g.own_union(i)));
    (0..g.node_count()).filter(|&j| j != i).all(|j| {
        let want = usize::from(spokes.contains(j));
        g.internal_degree(j) == want
    })
}

/// Lowest-id hub of a unanimity graph.
pub fn is_unanimity_graph(g: &UnionGraph) -> Option<NodeId> {
    if g.union_count() != 2 {
        return None;
    }
    (0..g.node_count()).find(|&i| is_hub(g, i))
}

/// Lowest-id hub with no internal edges.
pub fn is_local_unanimity_graph(g: &UnionGraph) -> Option<NodeId> {
    if g.union_count() != 2 {
        return None;
    }
    (0..g.node_count()).find(|&i| is_hub(g, i) && g.internal_degree(i) == 0)
}

/// A power index evaluated at fixed market values.
pub trait IndexFunction: Sync {
    fn name(&self) -> String;

    fn values(&self, g: &UnionGraph) -> Vec<Rational>;

    /// Values as linear forms in `(α, β)`, when the index has that shape.
    fn symbolic(&self, _g: &UnionGraph) -> Option<Vec<LinearForm>> {
        None
    }
}

/// `φ^{(α, β)}`.
#[derive(Debug, Clone)]
pub struct PowerIndexFn {
    pub params: MarketParams,
}

impl PowerIndexFn {
    pub fn new(params: MarketParams) -> Self {
        Self { params }
    }
}

impl IndexFunction for PowerIndexFn {
    fn name(&self) -> String {
        format!("phi({}, {})", format_rational(&self.params.alpha), format_rational(&self.params.beta))
    }

    fn values(&self, g: &UnionGraph) -> Vec<Rational> {
        power_index(g).iter().map(|f| f.evaluate(&self.params)).collect()
    }

    fn symbolic(&self, g: &UnionGraph) -> Option<Vec<LinearForm>> {
        Some(power_index(g))
    }
}

/// Index given by a plain function of the graph.
type ValueFn = Box<dyn Fn(&UnionGraph) -> Vec<Rational> + Send + Sync>;

pub struct Fixture {
    name: &'static str,
    f: ValueFn,
}

impl Fixture {
    pub fn new(name: &'static str, f: impl Fn(&UnionGraph) -> Vec<Rational> + Send + Sync + 'static) -> Self {
        Self { name, f: Box::new(f) }
    }
}

impl IndexFunction for Fixture {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn values(&self, g: &UnionGraph) -> Vec<Rational> {
        (self.f)(g)
    }
}

fn per_node(g: &UnionGraph, f: impl Fn(NodeId) -> Rational) -> Vec<Rational> {
    (0..g.node_count()).map(f).collect()
}

fn count(n: usize) -> Rational {
    int(n as i64)
}

fn sum(values: impl Iterator<Item = Rational>) -> Rational {
    values.fold(Rational::zero(), |acc, x| acc + x)
}

/// `{1,2}, {1,3} ∈ E` and `S^2 = S^3 ≠ S^1`, with 1-based labels.
pub fn in_label_class(g: &UnionGraph) -> bool {
    g.has_edge(0, 1) && g.has_edge(0, 2) && g.union_of(1) == g.union_of(2) && g.union_of(0) != g.union_of(1)
}

fn external_degrees(g: &UnionGraph) -> Vec<Rational> {
    per_node(g, |i| count(g.external_degree(i)))
}

fn fixture_a() -> Fixture {
    Fixture::new("A-violator", |g| {
        let mut v = external_degrees(g);
        if in_label_class(g) {
            v[1] += ratio(1, 2);
            v[2] -= ratio(1, 2);
        }
        v
    })
}

fn fixture_li() -> Fixture {
    Fixture::new("Li-violator", |g| {
        per_node(g, |i| {
            let own = g.own_union(i);
            let denom: usize = g.external_neighbors(i).iter().map(|j| g.degree_in(j, own)).sum();
            if denom == 0 {
                Rational::zero()
            } else {
                Rational::new(g.external_degree(i).into(), (denom * denom).into())
            }
        })
    })
}

fn fixture_ui() -> Fixture {
    Fixture::new("UI-violator", |g| per_node(g, |i| count(g.union_count() * g.external_degree(i))))
}

/// Edges with both endpoints in `s`.
fn edges_within(g: &UnionGraph, s: NodeSet) -> usize {
    g.edges().iter().filter(|&&(j, k)| s.contains(j) && s.contains(k)).count()
}

/// Fixtures used for the independence matrix. Each one breaks only its own
/// axiom on every universe; [`original_violating_index`] has the variants
/// that also break others.
pub fn violating_index(axiom: Axiom) -> Result<Box<dyn IndexFunction>, AxiomError> {
    let phi = PowerIndexFn::new(MarketParams::ints(1, 1));
    Ok(match axiom {
        Axiom::EN => Box::new(Fixture::new("EN-violator", move |g| {
            let base = phi.values(g);
            per_node(g, |i| if g.external_degree(i) == 0 { int(1) } else { base[i].clone() })
        })),
        Axiom::A => Box::new(fixture_a()),
        Axiom::IUN => Box::new(Fixture::new("IUN-violator", |g| {
            per_node(g, |i| {
                let (own, outside) = (g.own_union(i), g.outside_union(i));
                let far_edges = count(edges_within(g, outside));
                sum(g.external_neighbors(i).iter().map(|h| &far_edges / count(g.degree_in(h, own))))
            })
        })),
        Axiom::Li => Box::new(fixture_li()),
        Axiom::UI => Box::new(fixture_ui()),
        Axiom::ConI => Box::new(Fixture::new("ConI-violator", |g| {
            per_node(g, |i| {
                let outside = g.outside_union(i);
                count(g.external_neighbors(i).iter().map(|j| g.degree_in(j, outside)).sum())
            })
        })),
        Axiom::Ba => Box::new(Fixture::new("Ba-violator", |g| {
            per_node(g, |i| {
                let own = g.own_union(i);
                count(g.external_neighbors(i).iter().map(|j| g.degree_in(j, own)).sum())
            })
        })),
        other => return Err(AxiomError::NoFixture(other)),
    })
}

/// The violating indices written exactly as in the independence argument.
pub fn original_violating_index(axiom: Axiom) -> Result<Box<dyn IndexFunction>, AxiomError> {
    let phi = PowerIndexFn::new(MarketParams::ints(1, 1));
    Ok(match axiom {
        Axiom::EN => Box::new(Fixture::new("EN-violator (original)", move |g| {
            if g.edges().is_empty() {
                vec![int(1); g.node_count()]
            } else {
                phi.values(g)
            }
        })),
        Axiom::A => Box::new(fixture_a()),
        Axiom::IUN => Box::new(Fixture::new("IUN-violator (original)", |g| {
            per_node(g, |i| {
                let outside = g.outside_union(i);
                let total: usize = g
                    .external_neighbors(i)
                    .iter()
                    .flat_map(|h| g.neighbors(h, Some(outside)).iter())
                    .map(|j| g.degree(j))
                    .sum();
                count(total)
            })
        })),
        Axiom::Li => Box::new(fixture_li()),
        Axiom::UI => Box::new(fixture_ui()),
        Axiom::ConI => Box::new(Fixture::new("ConI-violator (original)", |g| {
            per_node(g, |i| count(g.external_neighbors(i).iter().map(|j| g.degree(j)).sum()))
        })),
        Axiom::Ba => Box::new(Fixture::new("Ba-violator (original)", |g| {
            let mut v = external_degrees(g);
            if in_label_class(g) {
                v[1] += int(1);
                v[2] += int(1);
            }
            v
        })),
        other => return Err(AxiomError::NoFixture(other)),
    })
}

pub const MAX_EXHAUSTIVE_N: usize = 6;
pub const DEFAULT_SEED: u64 = 0x0005_eed0_fa11;
pub const RANDOM_PERMUTATIONS: usize = 100;
const FULL_PERMUTATION_N: usize = 5;

/// What to put in a universe: every two-union graph with `3 <= n <= max_n`,
/// the small hand-picked graphs, and any explicit extras.
#[derive(Debug, Clone)]
pub struct UniverseSpec {
    pub max_n: usize,
    pub include_small: bool,
    pub extra: Vec<UnionGraph>,
    pub seed: u64,
}

impl Default for UniverseSpec {
    fn default() -> Self {
        Self { max_n: 5, include_small: true, extra: Vec::new(), seed: DEFAULT_SEED }
    }
}

impl UniverseSpec {
    pub fn explicit(graphs: Vec<UnionGraph>) -> Self {
        Self { max_n: 0, include_small: false, extra: graphs, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone)]
pub struct Universe {
    graphs: Vec<UnionGraph>,
    seed: u64,
}

impl Universe {
    pub fn build(spec: &UniverseSpec) -> Result<Self, AxiomError> {
        if spec.max_n > MAX_EXHAUSTIVE_N {
            return Err(AxiomError::UniverseTooLarge { requested: spec.max_n, limit: MAX_EXHAUSTIVE_N });
        }
        let mut graphs = Vec::new();
        if spec.include_small {
            graphs.extend(fixtures::small_graphs());
        }
        graphs.extend(spec.extra.iter().cloned());
        for n in 3..=spec.max_n {
            graphs.extend(two_union_graphs(n));
        }
        if graphs.is_empty() {
            return Err(AxiomError::EmptyUniverse);
        }
        Ok(Self { graphs, seed: spec.seed })
    }

    pub fn graphs(&self) -> &[UnionGraph] {
        &self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Every edge set on every partition of `0..n` into two blocks, with the
/// block holding node 0 listed first.
pub fn two_union_graphs(n: usize) -> Vec<UnionGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 1u64..1 << (n - 1) {
        let second: Vec<usize> = (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
        let first: Vec<usize> = (0..n).filter(|i| !second.contains(i)).collect();
        let base = UnionGraph::validate(n, &[first, second], &[]).expect("two-block partition is valid");
        for edges in 0u64..1 << pairs.len() {
            let chosen = pairs.iter().enumerate().filter(|(b, _)| edges >> b & 1 == 1).map(|(_, &e)| e).collect();
            out.push(base.with_edges(chosen));
        }
    }
    out
}

/// A reproducible failing configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub graph: GraphDocument,
    /// 1-based node the equation was checked at.
    pub node: usize,
    pub detail: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other_graph: Option<GraphDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub index: String,
    pub passed: bool,
    /// Number of instances of the axiom's equation that were evaluated.
    pub checked: usize,
    pub seed: u64,
    pub witness: Option<Witness>,
}

/// Memoized evaluation of an index over many graphs.
struct Evaluator<'f> {
    f: &'f dyn IndexFunction,
    memo: RwLock<HashMap<UnionGraph, Arc<Vec<Rational>>>>,
}

impl<'f> Evaluator<'f> {
    fn new(f: &'f dyn IndexFunction) -> Self {
        Self { f, memo: RwLock::new(HashMap::new()) }
    }

    fn eval(&self, g: &UnionGraph) -> Arc<Vec<Rational>> {
        if let Some(v) = self.memo.read().expect("memo lock").get(g) {
            return Arc::clone(v);
        }
        let v = Arc::new(self.f.values(g));
        self.memo.write().expect("memo lock").insert(g.clone(), Arc::clone(&v));
        v
    }
}

fn doc(g: &UnionGraph) -> GraphDocument {
    GraphDocument::from_graph(g, &BTreeMap::new())
}

fn witness(g: &UnionGraph, node: NodeId, detail: String, lhs: &Rational, rhs: &Rational) -> Box<Witness> {
    Box::new(Witness {
        graph: doc(g),
        node: node + 1,
        detail,
        lhs: format_rational(lhs),
        rhs: format_rational(rhs),
        other_graph: None,
    })
}

type Outcome = Result<usize, Box<Witness>>;

/// Runs `check` on every graph in parallel; the reported witness is the one
/// from the earliest graph in universe order.
fn scan(universe: &Universe, check: impl Fn(usize, &UnionGraph) -> Outcome + Sync) -> Outcome {
    let outcomes: Vec<Outcome> = universe.graphs.par_iter().enumerate().map(|(idx, g)| check(idx, g)).collect();
    outcomes.into_iter().try_fold(0, |acc, o| o.map(|c| acc + c))
}

fn labels(s: impl IntoIterator<Item = NodeId>) -> String {
    let parts: Vec<String> = s.into_iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn check_en(eval: &Evaluator, universe: &Universe, nonnegative: bool) -> Outcome {
    scan(universe, |_, g| {
        let v = eval.eval(g);
        if g.edges().is_empty() {
            if let Some(i) = v.iter().position(|x| !x.is_zero()) {
                return Err(witness(g, i, "empty edge set".into(), &v[i], &Rational::zero()));
            }
        }
        if nonnegative {
            if let Some(i) = v.iter().position(|x| x.is_negative()) {
                return Err(witness(g, i, "negative value".into(), &v[i], &Rational::zero()));
            }
            return Ok(g.node_count());
        }
        Ok(if g.edges().is_empty() { g.node_count() } else { 0 })
    })
}

fn check_iun(eval: &Evaluator, universe: &Universe) -> Outcome {
    scan(universe, |_, g| {
        let v = eval.eval(g);
        for i in 0..g.node_count() {
            let star = g.with_edges(g.inter_union_restriction(i));
            let w = eval.eval(&star);
            if v[i] != w[i] {
                let mut wit = witness(g, i, "value on E vs value on E_i^*".into(), &v[i], &w[i]);
                wit.other_graph = Some(doc(&star));
                return Err(wit);
            }
        }
        Ok(g.node_count())
    })
}

fn permutations(n: usize, idx: usize, seed: u64) -> Vec<Vec<NodeId>> {
    if n <= FULL_PERMUTATION_N {
        let mut all = Vec::new();
        let mut p: Vec<NodeId> = (0..n).collect();
        heap_permutations(n, &mut p, &mut all);
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
        (0..RANDOM_PERMUTATIONS)
            .map(|_| {
                let mut p: Vec<NodeId> = (0..n).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect()
    }
}

fn heap_permutations(k: usize, p: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for c in 0..k {
        heap_permutations(k - 1, p, out);
        if c + 1 < k {
            if k.is_multiple_of(2) {
                p.swap(c, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
}

fn check_anonymity(eval: &Evaluator, universe: &Universe) -> Outcome {
    let seed = universe.seed;
    scan(universe, |idx, g| {
        let v = eval.eval(g);
        let perms = permutations(g.node_count(), idx, seed);
        for sigma in &perms {
            let moved = g.apply_permutation(sigma).expect("generated permutations are bijections");
            let w = eval.eval(&moved);
            if let Some(i) = (0..g.node_count()).find(|&i| v[i] != w[sigma[i]]) {
                let mapping: Vec<String> =
                    sigma.iter().enumerate().map(|(a, b)| format!("{}->{}", a + 1, b + 1)).collect();
                let mut wit = witness(g, i, format!("sigma = [{}]", mapping.join(", ")), &v[i], &w[sigma[i]]);
                wit.other_graph = Some(doc(&moved));
                return Err(wit);
            }
        }
        Ok(perms.len() * g.node_count())
    })
}

fn check_linearity(eval: &Evaluator, universe: &Universe) -> Outcome {
    scan(universe, |_, g| {
        let v = eval.eval(g);
        let mut checked = 0;
        for i in 0..g.node_count() {
            let Ok(family) = g.linearity_family(i) else { continue };
            let total = sum(family.into_iter().map(|edges| eval.eval(&g.with_edges(edges))[i].clone()));
            if v[i] != total {
                let detail = format!("sum over the {} single-external-edge graphs", g.external_degree(i));
                return Err(witness(g, i, detail, &v[i], &total));
            }
            checked += 1;
        }
        Ok(checked)
    })
}

fn check_union_indifference(eval: &Evaluator, universe: &Universe) -> Outcome {
    scan(universe, |_, g| {
        if g.union_count() < 3 {
            return Ok(0);
        }
        let v = eval.eval(g);
        let mut checked = 0;
        for i in 0..g.node_count() {
            let own = g.union_of(i);
            for s in (0..g.union_count()).filter(|&s| s != own && g.degree_in(i, g.union(s)) == 0) {
                for t in (0..g.union_count()).filter(|&t| t != own && t != s) {
                    let merged = g.merge_unions(s, t).expect("r >= 3 leaves two unions");
                    let w = eval.eval(&merged);
                    if v[i] != w[i] {
                        let detail = format!("merge {} into {}", labels(g.union(s)), labels(g.union(t)));
                        let mut wit = witness(g, i, detail, &v[i], &w[i]);
                        wit.other_graph = Some(doc(&merged));
                        return Err(wit);
                    }
                    checked += 1;
                }
            }
        }
        Ok(checked)
    })
}

/// One instance of the constant-increment equation.
#[derive(Debug, Clone)]
pub struct Increment {
    pub graph: UnionGraph,
    pub hub: NodeId,
    pub partner: NodeId,
    pub value: Rational,
}

/// `Σ_{j ∈ N(i, S^{-i})} [f_j(E ∪ {i,k}) − f_j(E)]` for every unanimity graph
/// in the universe, every `i` with `d_i^ext = ε^ext` and every eligible `k`.
pub fn constant_increments(f: &dyn IndexFunction, universe: &Universe) -> Vec<Increment> {
    increments(&Evaluator::new(f), universe)
}

fn increments(eval: &Evaluator, universe: &Universe) -> Vec<Increment> {
    universe
        .graphs
        .par_iter()
        .filter(|g| is_unanimity_graph(g).is_some())
        .flat_map_iter(|g| {
            let v = eval.eval(g);
            let eps = g.external_edge_count();
            let mut out = Vec::new();
            for i in (0..g.node_count()).filter(|&i| g.external_degree(i) == eps) {
                let ext = g.external_neighbors(i);
                for k in g.own_union(i).iter().filter(|&k| k != i && !g.has_edge(i, k)) {
                    let w = eval.eval(&g.with_edge(i, k));
                    let value = sum(ext.iter().map(|j| &w[j] - &v[j]));
                    out.push(Increment { graph: g.clone(), hub: i, partner: k, value });
                }
            }
            out
        })
        .collect()
}

fn check_constant_increment(eval: &Evaluator, universe: &Universe, nonnegative: bool) -> Outcome {
    let all = increments(eval, universe);
    let mut first: HashMap<(Vec<NodeSet>, NodeId, NodeId), &Increment> = HashMap::new();
    for inc in &all {
        if nonnegative && inc.value.is_negative() {
            let detail = format!("negative increment when adding {}", labels([inc.hub, inc.partner]));
            return Err(witness(&inc.graph, inc.hub, detail, &inc.value, &Rational::zero()));
        }
        let key = (inc.graph.unions().to_vec(), inc.hub, inc.partner);
        match first.get(&key) {
            Some(base) if base.value != inc.value => {
                let detail =
                    format!("increment from adding {} differs between two graphs", labels([inc.hub, inc.partner]));
                let mut wit = witness(&base.graph, inc.hub, detail, &base.value, &inc.value);
                wit.other_graph = Some(doc(&inc.graph));
                return Err(wit);
            }
            Some(_) => {}
            None => {
                first.insert(key, inc);
            }
        }
    }
    Ok(all.len())
}

fn check_balancedness(eval: &Evaluator, universe: &Universe) -> Outcome {
    scan(universe, |_, g| {
        if is_local_unanimity_graph(g).is_none() {
            return Ok(0);
        }
        let v = eval.eval(g);
        let eps = g.external_edge_count();
        let mut checked = 0;
        for i in (0..g.node_count()).filter(|&i| g.external_degree(i) == eps) {
            let spread = sum(g.external_neighbors(i).iter().map(|j| v[j].clone()));
            if v[i] != spread {
                return Err(witness(g, i, "hub value vs sum over external neighbours".into(), &v[i], &spread));
            }
            checked += 1;
        }
        Ok(checked)
    })
}

pub fn check_axiom(axiom: Axiom, f: &dyn IndexFunction, universe: &Universe) -> AxiomReport {
    check_with(axiom, &Evaluator::new(f), universe)
}

fn check_with(axiom: Axiom, eval: &Evaluator, universe: &Universe) -> AxiomReport {
    let outcome = match axiom {
        Axiom::EN => check_en(eval, universe, false),
        Axiom::EP => check_en(eval, universe, true),
        Axiom::IUN => check_iun(eval, universe),
        Axiom::A => check_anonymity(eval, universe),
        Axiom::Li => check_linearity(eval, universe),
        Axiom::UI => check_union_indifference(eval, universe),
        Axiom::ConI => check_constant_increment(eval, universe, false),
        Axiom::PConI => check_constant_increment(eval, universe, true),
        Axiom::Ba => check_balancedness(eval, universe),
    };
    let (passed, checked, witness) = match outcome {
        Ok(checked) => (true, checked, None),
        Err(w) => (false, 0, Some(*w)),
    };
    AxiomReport { axiom, index: eval.f.name(), passed, checked, seed: universe.seed, witness }
}

/// Reports for one index against several axioms, sharing one memo.
pub fn check_axioms(axioms: &[Axiom], f: &dyn IndexFunction, universe: &Universe) -> Vec<AxiomReport> {
    let eval = Evaluator::new(f);
    axioms.iter().map(|&a| check_with(a, &eval, universe)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixRow {
    pub index: String,
    pub reports: Vec<AxiomReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomMatrix {
    pub axioms: Vec<Axiom>,
    pub rows: Vec<MatrixRow>,
}

impl AxiomMatrix {
    /// Row `r` fails exactly column `r`, for the square part of the grid.
    pub fn is_diagonal_fail(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(r, row)| row.reports.iter().enumerate().all(|(c, rep)| rep.passed == (r != c)))
    }
}

pub fn axiom_matrix(indices: &[Box<dyn IndexFunction>], axioms: &[Axiom], universe: &Universe) -> AxiomMatrix {
    let rows = indices
        .iter()
        .map(|f| MatrixRow { index: f.name(), reports: check_axioms(axioms, f.as_ref(), universe) })
        .collect();
    AxiomMatrix { axioms: axioms.to_vec(), rows }
}

/// The seven fixtures against the seven core axioms.
pub fn independence_matrix(spec: &UniverseSpec) -> Result<AxiomMatrix, AxiomError> {
    let universe = Universe::build(spec)?;
    let indices = Axiom::CORE.iter().map(|&a| violating_index(a)).collect::<Result<Vec<_>, _>>()?;
    Ok(axiom_matrix(&indices, &Axiom::CORE, &universe))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub added_edge: (NodeId, NodeId),
    pub increased: NodeId,
    pub decreased: NodeId,
    pub increased_before: LinearForm,
    pub increased_after: LinearForm,
    pub decreased_before: LinearForm,
    pub decreased_after: LinearForm,
    pub extended: UnionGraph,
}

/// Adds `{i, m}` for the lowest incomplete bridge `i`, its lowest partially
/// touched union `S_l`, the highest `m ∈ S_l \ N(i)`, and reports `i` and
/// the lowest `j ∈ N(i) ∩ S_l`.
pub fn monotonicity_demo(g: &UnionGraph) -> Result<MonotonicityReport, AxiomError> {
    let (i, l) = (0..g.node_count())
        .find_map(|i| g.incomplete_unions(i).next().map(|l| (i, l)))
        .ok_or(AxiomError::NoIncompleteBridge)?;
    let s = g.union(l);
    let touched = g.neighbors(i, Some(s));
    let j = touched.first().expect("incomplete union is touched");
    let m = s.difference(touched).iter().last().expect("incomplete union is not fully touched");
    let extended = g.with_edge(i, m);
    Ok(MonotonicityReport {
        added_edge: (i.min(m), i.max(m)),
        increased: i,
        decreased: j,
        increased_before: index::node_index(g, i),
        increased_after: index::node_index(&extended, i),
        decreased_before: index::node_index(g, j),
        decreased_after: index::node_index(&extended, j),
        extended,
    })
}

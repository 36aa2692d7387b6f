use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use thiserror::Error;
use unionpower_core::axioms::{
    axiom_matrix, violating_index, Axiom, AxiomError, IndexFunction, PowerIndexFn, Universe, UniverseSpec,
};
use unionpower_core::fixtures::{self, UnknownFixture};
use unionpower_core::game::{
    characteristic, harsanyi_dividends_bounded, shapley_bruteforce_bounded, shapley_via_dividends,
    shapley_via_potential, GameError, DEFAULT_MAX_BRUTEFORCE_N,
};
use unionpower_core::index::power_index;
use unionpower_core::io::{parse_graph, to_json, LabelledGraph, LoadError};
use unionpower_core::ranking::{rank_sweep, ranking_at, RankingError, Window};
use unionpower_core::{format_rational, LinearForm, MarketParams, NodeSet, Rational};

use crate::{table, Command, Format, Method, ParamArgs};

pub const MAX_N_VAR: &str = "UNIONPOWER_MAX_N";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Load { path: String, source: LoadError },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Universe(#[from] AxiomError),
    #[error(transparent)]
    Fixture(#[from] UnknownFixture),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error("{0}")]
    Usage(String),
}

pub struct Outcome {
    pub output: String,
    pub code: u8,
}

struct Report {
    command: &'static str,
    input: Value,
    text: String,
    results: Vec<Value>,
    code: u8,
}

impl Report {
    fn new(command: &'static str, input: &Path) -> Self {
        Self { command, input: json!(input.display().to_string()), text: String::new(), results: Vec::new(), code: 0 }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.text.push_str(text.as_ref());
        self.text.push('\n');
    }

    fn render(self, format: Format) -> Outcome {
        let output = match format {
            Format::Text => self.text,
            Format::Json => {
                let doc = json!({"command": self.command, "input": self.input, "results": self.results});
                serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
            }
        };
        Outcome { output, code: self.code }
    }
}

pub fn run(command: &Command, format: Format) -> Result<Outcome, CliError> {
    let report = match command {
        Command::Validate { input } => validate(input)?,
        Command::Index { input, params } => index(input, params)?,
        Command::Game { input, coalition, params } => game(input, coalition.as_deref(), params)?,
        Command::Dividends { input, max_union_size, params } => dividends(input, *max_union_size, params)?,
        Command::Shapley { input, method, params } => shapley(input, *method, params)?,
        Command::Rank { input, params, rho } => rank(input, params, rho.as_ref())?,
        Command::Sweep { input, rho_max } => sweep(input, rho_max)?,
        Command::Axioms { max_n, graphs, seed, witness_dir, params } => {
            axioms(*max_n, graphs, *seed, witness_dir.as_deref(), params)?
        }
        Command::Demo { name, output } => return demo(name, output.as_deref()),
    };
    Ok(report.render(format))
}

fn load(path: &Path) -> Result<LabelledGraph, CliError> {
    let shown = path.display().to_string();
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|source| CliError::Read { path: shown.clone(), source })?;
        buf
    } else {
        fs::read_to_string(path).map_err(|source| CliError::Read { path: shown.clone(), source })?
    };
    parse_graph(&text).map_err(|source| CliError::Load { path: shown, source })
}

fn params_of(p: &ParamArgs) -> Option<MarketParams> {
    match (&p.alpha, &p.beta) {
        (Some(a), Some(b)) => Some(MarketParams::new(a.clone(), b.clone())),
        _ => None,
    }
}

fn show(form: &LinearForm, params: Option<&MarketParams>) -> String {
    match params {
        Some(p) => format_rational(&form.evaluate(p)),
        None => form.to_string(),
    }
}

fn set_text(s: NodeSet) -> String {
    let ids: Vec<String> = s.labels().iter().map(ToString::to_string).collect();
    format!("{{{}}}", ids.join(","))
}

fn node_json(lg: &LabelledGraph, i: usize) -> Value {
    let mut v = json!({"node": i + 1});
    if let Some(label) = lg.labels.get(&i) {
        v["label"] = json!(label);
    }
    v
}

fn validate(input: &Path) -> Result<Report, CliError> {
    let lg = load(input)?;
    let g = &lg.graph;
    let mut r = Report::new("validate", input);
    let bridges = g.bridge_nodes();
    r.line(format!("nodes: {}", g.node_count()));
    r.line(format!("unions: {}", g.union_count()));
    r.line(format!("edges: {}", g.edges().len()));
    r.line(format!("external edges: {}", g.external_edge_count()));
    r.line(format!("bridge nodes: {}", set_text(bridges)));
    r.results.push(json!({
        "nodes": g.node_count(),
        "unions": g.unions().iter().map(|s| s.labels()).collect::<Vec<_>>(),
        "edges": g.edges().len(),
        "external_edges": g.external_edge_count(),
        "bridge_nodes": bridges.labels(),
    }));
    Ok(r)
}

fn per_node(r: &mut Report, lg: &LabelledGraph, values: &[LinearForm], params: Option<&MarketParams>) {
    for (i, v) in values.iter().enumerate() {
        let shown = show(v, params);
        r.line(format!("node {}: {shown}", lg.describe(i)));
        let mut entry = node_json(lg, i);
        entry["value"] = json!(shown);
        r.results.push(entry);
    }
}

fn index(input: &Path, params: &ParamArgs) -> Result<Report, CliError> {
    let lg = load(input)?;
    let mut r = Report::new("index", input);
    per_node(&mut r, &lg, &power_index(&lg.graph), params_of(params).as_ref());
    Ok(r)
}

fn parse_coalition(text: &str, n: usize) -> Result<NodeSet, CliError> {
    text.split(',')
        .map(|part| {
            let id: usize = part.trim().parse().map_err(|_| CliError::Usage(format!("bad node id `{part}`")))?;
            if id == 0 || id > n {
                return Err(CliError::Usage(format!("node {id} is not in 1..={n}")));
            }
            Ok(id - 1)
        })
        .collect()
}

fn game(input: &Path, coalition: Option<&str>, params: &ParamArgs) -> Result<Report, CliError> {
    let lg = load(input)?;
    let g = &lg.graph;
    let coalitions = match coalition {
        Some(text) => vec![parse_coalition(text, g.node_count())?],
        None => g.unions().iter().copied().chain(std::iter::once(g.nodes())).collect(),
    };
    let nu = characteristic(g);
    let params = params_of(params);
    let mut r = Report::new("game", input);
    for t in coalitions {
        let shown = show(&nu.value(t), params.as_ref());
        r.line(format!("nu({}) = {shown}", set_text(t)));
        r.results.push(json!({"coalition": t.labels(), "value": shown}));
    }
    Ok(r)
}

fn dividends(input: &Path, max_union: usize, params: &ParamArgs) -> Result<Report, CliError> {
    let lg = load(input)?;
    let table = harsanyi_dividends_bounded(&lg.graph, max_union)?;
    let params = params_of(params);
    let mut r = Report::new("dividends", input);
    for d in table.entries() {
        let shown = show(&d.value, params.as_ref());
        r.line(format!("{}: {shown}", set_text(d.coalition)));
        r.results.push(json!({"union": d.union + 1, "coalition": d.coalition.labels(), "value": shown}));
    }
    Ok(r)
}

fn bruteforce_bound() -> Result<usize, CliError> {
    match std::env::var(MAX_N_VAR) {
        Ok(text) => {
            text.trim().parse().map_err(|_| CliError::Usage(format!("{MAX_N_VAR} must be an integer, got `{text}`")))
        }
        Err(_) => Ok(DEFAULT_MAX_BRUTEFORCE_N),
    }
}

fn route(lg: &LabelledGraph, method: Method) -> Result<Vec<LinearForm>, CliError> {
    let g = &lg.graph;
    Ok(match method {
        Method::Closed => power_index(g),
        Method::Potential => shapley_via_potential(g),
        Method::Dividends => shapley_via_dividends(g)?,
        Method::Bruteforce => shapley_bruteforce_bounded(g, bruteforce_bound()?)?,
        Method::All => unreachable!("expanded by the caller"),
    })
}

fn shapley(input: &Path, method: Method, params: &ParamArgs) -> Result<Report, CliError> {
    let lg = load(input)?;
    let params = params_of(params);
    let mut r = Report::new("shapley", input);
    if method != Method::All {
        per_node(&mut r, &lg, &route(&lg, method)?, params.as_ref());
        return Ok(r);
    }
    let methods = [Method::Closed, Method::Potential, Method::Dividends, Method::Bruteforce];
    let routes = methods.iter().map(|&m| route(&lg, m)).collect::<Result<Vec<_>, _>>()?;
    let names = ["closed", "potential", "dividends", "bruteforce"];
    let agree = routes.iter().all(|v| v == &routes[0]);
    if agree {
        per_node(&mut r, &lg, &routes[0], params.as_ref());
        r.line("all four routes agree");
        for entry in &mut r.results {
            entry["agree"] = json!(true);
        }
        return Ok(r);
    }
    let header: Vec<String> =
        std::iter::once("node".to_string()).chain(names.iter().map(ToString::to_string)).collect();
    let mut rows = Vec::new();
    for i in 0..lg.graph.node_count() {
        let cells: Vec<String> = routes.iter().map(|v| show(&v[i], params.as_ref())).collect();
        let mut entry = node_json(&lg, i);
        for (name, cell) in names.iter().zip(&cells) {
            entry[*name] = json!(cell);
        }
        entry["agree"] = json!(cells.iter().all(|c| c == &cells[0]));
        r.results.push(entry);
        rows.push(std::iter::once(lg.describe(i)).chain(cells).collect());
    }
    r.text = table::render(&header, &rows);
    r.line("routes disagree");
    r.code = 3;
    Ok(r)
}

fn rank(input: &Path, params: &ParamArgs, rho: Option<&Rational>) -> Result<Report, CliError> {
    let lg = load(input)?;
    let p = match (params_of(params), rho) {
        (Some(p), _) => p,
        (None, Some(rho)) => MarketParams::from_rho(rho.clone()),
        (None, None) => return Err(CliError::Usage("rank needs --alpha and --beta, or --rho".into())),
    };
    let ranking = ranking_at(&lg.graph, &p);
    let mut r = Report::new("rank", input);
    for (k, group) in ranking.groups.iter().enumerate() {
        let names: Vec<String> = group.iter().map(|i| lg.describe(i)).collect();
        r.line(format!("rank {}: {}", k + 1, names.join(", ")));
        r.results.push(json!({"rank": k + 1, "nodes": group.labels()}));
    }
    Ok(r)
}

fn cell(group: Option<&NodeSet>) -> String {
    group.map(|g| g.labels().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")).unwrap_or_default()
}

fn sweep(input: &Path, rho_max: &Rational) -> Result<Report, CliError> {
    let lg = load(input)?;
    let sweep = rank_sweep(&lg.graph, rho_max)?;
    let mut r = Report::new("sweep", input);
    let points: Vec<String> = sweep.breakpoints.iter().map(format_rational).collect();
    r.line(format!("breakpoints: {}", if points.is_empty() { "none".to_string() } else { points.join(", ") }));
    let header: Vec<String> =
        std::iter::once("rank".to_string()).chain(sweep.columns.iter().map(|c| c.window.header())).collect();
    let rows: Vec<Vec<String>> = (0..sweep.max_rank())
        .map(|k| {
            std::iter::once((k + 1).to_string())
                .chain(sweep.columns.iter().map(|c| cell(c.ranking.groups.get(k))))
                .collect()
        })
        .collect();
    r.text += &table::render(&header, &rows);
    for c in &sweep.columns {
        let ranking: Vec<Vec<usize>> = c.ranking.groups.iter().map(|g| g.labels()).collect();
        let window = match &c.window {
            Window::Point(p) => json!({
                "rho": format_rational(p),
                "breakpoint": sweep.breakpoints.contains(p),
            }),
            Window::Open(lo, hi) => json!({"from": format_rational(lo), "to": format_rational(hi)}),
        };
        r.results.push(json!({"header": c.window.header(), "window": window, "ranking": ranking}));
    }
    Ok(r)
}

fn file_stem(index: &str, axiom: Axiom) -> String {
    let words: Vec<String> = index
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .collect();
    format!("{}-{}", words.join("-"), axiom.name().to_ascii_lowercase())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn axioms(
    max_n: usize,
    extra: &[PathBuf],
    seed: u64,
    witness_dir: Option<&Path>,
    params: &ParamArgs,
) -> Result<Report, CliError> {
    let extra = extra.iter().map(|p| load(p).map(|lg| lg.graph)).collect::<Result<Vec<_>, _>>()?;
    let universe = Universe::build(&UniverseSpec { max_n, include_small: true, extra, seed })?;
    let phi = PowerIndexFn::new(params_of(params).unwrap_or_else(|| MarketParams::ints(1, 1)));
    let mut indices: Vec<Box<dyn IndexFunction>> = vec![Box::new(phi)];
    for a in Axiom::CORE {
        indices.push(violating_index(a)?);
    }
    let matrix = axiom_matrix(&indices, &Axiom::ALL, &universe);

    let mut r = Report::new("axioms", Path::new(""));
    r.input = json!({"max_n": max_n, "graphs": universe.len(), "seed": seed});
    r.line(format!("universe: {} graphs (two unions, n <= {max_n}, plus extras), seed {seed}", universe.len()));
    r.line("");
    let header: Vec<String> =
        std::iter::once("index".to_string()).chain(matrix.axioms.iter().map(|a| a.name().to_string())).collect();
    let rows: Vec<Vec<String>> = matrix
        .rows
        .iter()
        .map(|row| {
            let marks = row.reports.iter().map(|rep| if rep.passed { "pass" } else { "FAIL" }.to_string());
            std::iter::once(row.index.clone()).chain(marks).collect()
        })
        .collect();
    r.text += &table::render(&header, &rows);

    let mut first = true;
    for rep in matrix.rows.iter().flat_map(|row| &row.reports) {
        r.results.push(serde_json::to_value(rep).expect("reports serialize"));
        let Some(w) = &rep.witness else { continue };
        if first {
            r.line("");
            r.line("witnesses:");
            first = false;
        }
        let graph = serde_json::to_string(&w.graph).expect("graphs serialize");
        r.line(format!("  {} / {}: {} at node {}: {} vs {}", rep.index, rep.axiom, w.detail, w.node, w.lhs, w.rhs));
        r.line(format!("    graph {graph}"));
        if let Some(other) = &w.other_graph {
            r.line(format!("    other {}", serde_json::to_string(other).expect("graphs serialize")));
        }
        if let Some(dir) = witness_dir {
            fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })?;
            let stem = file_stem(&rep.index, rep.axiom);
            let pretty = |doc| serde_json::to_string_pretty(doc).expect("graphs serialize") + "\n";
            write_file(&dir.join(format!("{stem}.json")), &pretty(&w.graph))?;
            if let Some(other) = &w.other_graph {
                write_file(&dir.join(format!("{stem}-other.json")), &pretty(other))?;
            }
        }
    }
    Ok(r)
}

fn demo(name: &str, output: Option<&Path>) -> Result<Outcome, CliError> {
    let (graph, labels) = fixtures::by_name(name)?;
    let text = to_json(&graph, &labels) + "\n";
    match output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(Outcome { output: String::new(), code: 0 })
        }
        None => Ok(Outcome { output: text, code: 0 }),
    }
}

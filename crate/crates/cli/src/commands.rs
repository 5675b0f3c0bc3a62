use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use serde::Serialize;

use pebblewidth_core::enumerate::{random_dag, random_graph};
use pebblewidth_core::io::{export_dot, load_dag, load_graph, load_ugraph, write_graph};
use pebblewidth_core::layout::{
    heuristic_greedy, named_problem, solve_bruteforce, solve_subset_dp, GreedyConfig, LayoutLimits,
};
use pebblewidth_core::pebbling::{
    build_pyramid, exhaustive_one_shot, indegree2_transform, lengauer_to_dag, lengauer_to_undirected,
    one_shot_black_cost, ordering_to_black_strategy, single_sink_transform, validate_strategy, Accounting,
    PebbleMode, PebbleStrategy, SearchLimits,
};
use pebblewidth_core::reductions::{to_incidence_dag, to_replicated_bipartite};
use pebblewidth_core::sse::{gen_planted, gen_random_regular, write_partition};
use pebblewidth_core::suites::{run_suite, Corpus, Suite};
use pebblewidth_core::width::{
    check_separator_bound, half_separator_number, parse_decomposition, path_decomposition_from_ordering,
    pathwidth_exact, tree_decomposition_from_elimination, treewidth_exact, validate_decomposition,
    write_decomposition, WMode, WidthLimits,
};
use pebblewidth_core::{AnyGraph, Error, Ordering, UGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{
    AccountingArg, ConvertArgs, Format, GenArgs, GenKind, Measure, ModeArg, PebbleArgs, ReduceArgs, SolveArgs,
    SolveMethod, VerifyArgs, WidthArgs,
};

/// Why a command stopped: bad input (exit 2) or a domain failure (exit 1).
pub enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Unknown { .. }
            | Error::DirectionMismatch { .. }
            | Error::InvalidParameters(_)
            | Error::VertexOutOfRange { .. }
            | Error::NotAPermutation(_)
            | Error::NotTopological { .. }
            | Error::InvalidGraph(_) => Failure::Usage(e.into()),
            _ => Failure::Domain(e.into()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

type CmdResult = Result<bool, Failure>;

pub struct Output {
    pub human: bool,
}

impl Output {
    fn record<T: Serialize>(&self, record: &T, human: impl FnOnce() -> String) {
        if self.human {
            print!("{}", human());
        } else {
            println!("{}", serde_json::to_string(record).expect("records serialize"));
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Domain(anyhow!("cannot write {}: {e}", path.display())))
}

fn read_ugraph(path: &Path) -> Result<UGraph, Failure> {
    Ok(load_ugraph(&read(path)?)?)
}

fn ids(vs: &[usize]) -> String {
    vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

pub fn solve(out: &Output, a: SolveArgs, seed: u64) -> CmdResult {
    let g = load_graph(&read(&a.graph)?)?;
    let spec = named_problem(&a.problem)?;
    let limits = LayoutLimits {
        bruteforce_max_n: a.max_bruteforce,
        dp_max_states: a.max_states,
    };
    let greedy = GreedyConfig {
        seed,
        ..GreedyConfig::default()
    };
    let r = match a.method {
        SolveMethod::Bruteforce => solve_bruteforce(&g, spec, limits)?,
        SolveMethod::Dp => solve_subset_dp(&g, spec, limits)?,
        SolveMethod::Greedy => heuristic_greedy(&g, spec, greedy)?,
        SolveMethod::Auto => match solve_subset_dp(&g, spec, limits) {
            Err(Error::SizeLimit(_)) => heuristic_greedy(&g, spec, greedy)?,
            r => r?,
        },
    };
    out.record(&r.to_record(), || {
        format!(
            "problem   {}\nvalue     {}\nmethod    {}\nordering  {}\n",
            spec.name(),
            r.value,
            serde_json::to_value(r.method).expect("method serializes").as_str().unwrap_or_default(),
            ids(r.witness.sequence())
        )
    });
    Ok(true)
}

#[derive(Serialize)]
struct WidthRecord<T: Serialize> {
    measure: &'static str,
    #[serde(flatten)]
    result: T,
}

pub fn width(out: &Output, a: WidthArgs) -> CmdResult {
    let g = read_ugraph(&a.graph)?;
    if let Some(path) = &a.validate {
        let (td, n) = parse_decomposition(&read(path)?)?;
        if n != g.n() {
            return Err(usage(format!("decomposition covers {n} vertices, graph has {}", g.n())));
        }
        let report = validate_decomposition(&g, &td, a.path);
        out.record(&report, || match &report.violation {
            None => format!("valid, width {}\n", report.width),
            Some(v) => format!("invalid: {v}\n"),
        });
        return Ok(report.valid);
    }
    let limits = WidthLimits::default();
    match a.measure {
        Measure::Treewidth | Measure::Pathwidth => {
            let (name, r) = if a.measure == Measure::Treewidth {
                ("treewidth", treewidth_exact(&g, limits)?)
            } else {
                ("pathwidth", pathwidth_exact(&g, LayoutLimits::default())?)
            };
            if let Some(path) = &a.decomposition {
                let order = Ordering::from_sequence(r.witness.clone())?;
                let td = if a.measure == Measure::Treewidth {
                    tree_decomposition_from_elimination(&g, &order)
                } else {
                    path_decomposition_from_ordering(&g, &order)
                };
                write(path, &write_decomposition(&td, g.n()))?;
            }
            out.record(&WidthRecord { measure: name, result: &r }, || {
                format!("{name}  {}\nwitness    {}\n", r.value, ids(&r.witness))
            });
            Ok(true)
        }
        Measure::Separator => {
            let r = half_separator_number(&g, WMode::FullVertexSet, limits)?;
            out.record(&WidthRecord { measure: "separator", result: &r }, || {
                format!("separator  {}\nset        {}\n", r.value, ids(&r.separator))
            });
            Ok(true)
        }
        Measure::SeparatorBound => {
            let r = check_separator_bound(&g, limits)?;
            out.record(&WidthRecord { measure: "separator_bound", result: &r }, || {
                format!(
                    "treewidth + 1  {}\nK_1/2          {}\nholds          {}\n",
                    r.treewidth + 1,
                    r.k_half,
                    r.holds
                )
            });
            Ok(r.holds)
        }
    }
}

#[derive(Serialize)]
struct PebbleSolveRecord {
    mode: PebbleMode,
    accounting: Accounting,
    cost: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<usize>,
}

pub fn pebble(out: &Output, a: PebbleArgs) -> CmdResult {
    let d = load_dag(&read(&a.dag)?)?;
    let mode = match a.mode {
        ModeArg::Black => PebbleMode::Black,
        ModeArg::Bw => PebbleMode::BlackWhite,
    };
    let accounting = match a.accounting {
        AccountingArg::Peak => Accounting::Peak,
        AccountingArg::PostCleanup => Accounting::PostCleanup,
    };
    if let Some(path) = &a.strategy {
        let s = PebbleStrategy::parse(&read(path)?, d.n())?;
        let report = validate_strategy(&d, &s, mode);
        out.record(&report, || match &report.violation {
            None => format!("valid, cost {}, one-shot {}\n", report.cost, report.one_shot),
            Some(v) => format!("invalid at step {}: {}\n", v.step, v.reason),
        });
        return Ok(report.valid);
    }
    let limits = LayoutLimits::default();
    let (record, strategy) = match mode {
        PebbleMode::Black => {
            let cost = one_shot_black_cost(&d, accounting, limits)?;
            let strategy = match &a.output {
                Some(_) => {
                    let rs = solve_subset_dp(&d, named_problem("register_sufficiency")?, limits)?;
                    Some(ordering_to_black_strategy(&d, &rs.witness)?)
                }
                None => None,
            };
            (
                PebbleSolveRecord {
                    mode,
                    accounting,
                    cost,
                    states: None,
                },
                strategy,
            )
        }
        PebbleMode::BlackWhite => {
            if accounting != Accounting::Peak {
                return Err(usage("black-white search reports peak accounting only"));
            }
            let r = exhaustive_one_shot(
                &d,
                mode,
                SearchLimits {
                    max_states: a.max_states,
                },
            )?;
            (
                PebbleSolveRecord {
                    mode,
                    accounting,
                    cost: r.cost as u64,
                    states: Some(r.states),
                },
                Some(r.strategy),
            )
        }
    };
    if let (Some(path), Some(s)) = (&a.output, &strategy) {
        write(path, &s.write())?;
    }
    out.record(&record, || format!("cost  {}\n", record.cost));
    Ok(true)
}

#[derive(Serialize)]
struct GraphRecord {
    kind: String,
    nodes: usize,
    edges: usize,
    output: PathBuf,
}

fn emit_graph(out: &Output, kind: &str, g: &AnyGraph, path: Option<&Path>) -> Result<(), Failure> {
    let text = write_graph(g);
    match path {
        None => print!("{text}"),
        Some(p) => {
            write(p, &text)?;
            let (nodes, edges) = match g {
                AnyGraph::Undirected(u) => (u.n(), u.m()),
                AnyGraph::Dag(d) => (d.n(), d.m()),
            };
            let rec = GraphRecord {
                kind: kind.into(),
                nodes,
                edges,
                output: p.to_path_buf(),
            };
            out.record(&rec, || format!("{kind}: {nodes} nodes, {edges} edges -> {}\n", p.display()));
        }
    }
    Ok(())
}

fn node_count(g: &AnyGraph) -> usize {
    match g {
        AnyGraph::Undirected(u) => u.n(),
        AnyGraph::Dag(d) => d.n(),
    }
}

pub fn reduce(out: &Output, a: ReduceArgs) -> CmdResult {
    let input = load_graph(&read(&a.graph)?)?;
    let need_ug = || {
        input
            .as_undirected()
            .ok_or_else(|| usage(format!("--kind {} expects an undirected graph", a.kind)))
    };
    let need_dag = || {
        input
            .as_dag()
            .ok_or_else(|| usage(format!("--kind {} expects a DAG", a.kind)))
    };
    let result: AnyGraph = match a.kind.as_str() {
        "incidence-dag" => to_incidence_dag(need_ug()?).dag.into(),
        "lengauer-dg" => lengauer_to_dag(need_ug()?).into(),
        "lengauer-gd" => lengauer_to_undirected(need_dag()?).into(),
        "indeg2" => indegree2_transform(need_dag()?).into(),
        "single-sink" => single_sink_transform(need_dag()?).into(),
        k => match k.strip_prefix("replicated:") {
            Some(r) => {
                let r: usize = r
                    .parse()
                    .map_err(|_| usage(format!("replication factor `{r}` is not a number")))?;
                to_replicated_bipartite(need_ug()?, r, a.max_nodes)?.graph.into()
            }
            None => {
                return Err(Error::Unknown {
                    kind: "reduction",
                    name: k.into(),
                }
                .into())
            }
        },
    };
    if node_count(&result) > a.max_nodes {
        return Err(Error::SizeLimit(format!(
            "transformed instance has {} nodes, budget is {}",
            node_count(&result),
            a.max_nodes
        ))
        .into());
    }
    emit_graph(out, &a.kind, &result, a.output.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct PlantedRecord {
    nodes: usize,
    edges: usize,
    d: usize,
    blocks: usize,
    cross_edges: usize,
    max_phi: String,
    epsilon: f64,
    seed: u64,
}

pub fn gen(out: &Output, a: GenArgs, seed: u64) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (kind, g): (&str, AnyGraph) = match a.kind {
        GenKind::Planted {
            q,
            block_size,
            d,
            cross,
            partition,
        } => {
            let inst = gen_planted(q, block_size, d, cross, seed)?;
            let sidecar = partition.or_else(|| {
                a.output.as_ref().map(|p| {
                    let mut s = p.clone().into_os_string();
                    s.push(".partition");
                    PathBuf::from(s)
                })
            });
            if let Some(p) = &sidecar {
                write(p, &write_partition(&inst.blocks))?;
            }
            match &a.output {
                Some(p) => {
                    write(p, &write_graph(&inst.graph.clone().into()))?;
                    let rec = PlantedRecord {
                        nodes: inst.graph.n(),
                        edges: inst.graph.m(),
                        d: inst.d,
                        blocks: inst.blocks.len(),
                        cross_edges: inst.cross_edges,
                        max_phi: inst.max_phi.to_string(),
                        epsilon: inst.epsilon,
                        seed,
                    };
                    out.record(&rec, || {
                        let mut s = String::new();
                        let _ = writeln!(s, "planted: {} nodes, {} edges -> {}", rec.nodes, rec.edges, p.display());
                        let _ = writeln!(s, "cross edges {}, max block expansion {}", rec.cross_edges, rec.max_phi);
                        s
                    });
                }
                None => print!("{}", write_graph(&inst.graph.into())),
            }
            return Ok(true);
        }
        GenKind::Regular { n, d } => ("regular", gen_random_regular(n, d, seed)?.into()),
        GenKind::Pyramid { size } => ("pyramid", build_pyramid(size)?.into()),
        GenKind::RandomGraph { n, p } => {
            check_probability(p)?;
            ("random-graph", random_graph(n, p, &mut rng).into())
        }
        GenKind::RandomDag { n, p, max_indegree } => {
            check_probability(p)?;
            ("random-dag", random_dag(n, p, max_indegree, &mut rng).into())
        }
    };
    emit_graph(out, kind, &g, a.output.as_deref())?;
    Ok(true)
}

fn check_probability(p: f64) -> Result<(), Failure> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(usage(format!("probability {p} outside [0, 1]")))
    }
}

pub fn verify(out: &Output, a: VerifyArgs, seed: u64) -> CmdResult {
    let suite: Suite = a.suite.parse()?;
    let corpus: Corpus = a.corpus.parse()?;
    let report = run_suite(suite, corpus, seed)?;
    out.record(&report, || {
        let mut s = format!(
            "suite {} corpus {}: {} passed, {} failed\n",
            suite,
            corpus.name(),
            report.passed,
            report.failed
        );
        for f in report.failures() {
            let _ = writeln!(s, "  FAIL {} on {}: {} {} {}", f.check, f.instance, f.lhs, f.relation, f.rhs);
        }
        s
    });
    Ok(report.ok())
}

pub fn convert(out: &Output, a: ConvertArgs) -> CmdResult {
    let g = load_graph(&read(&a.input)?)?;
    match a.to {
        Format::Edgelist => emit_graph(out, "edgelist", &g, a.output.as_deref())?,
        Format::Dot => {
            let text = export_dot(&g);
            match &a.output {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(true)
}

//! Reductions from an undirected graph `G` to a bipartite DAG and to a
//! replicated bipartite graph, with per-instance checks of the inequalities
//! relating their layout values and widths to those of `G`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cut_edges, Dag, LayoutGraph, Ordering, UGraph, VertexId, VertexSet};
use crate::layout::{evaluate, named_problem, solve_subset_dp, LayoutLimits, ProblemSpec};
use crate::width::{half_separator_number, treewidth_exact, WMode, WidthLimits};

/// Node `v < n` is vertex `v`; node `n + j` is edge `j` of `G` (edges in
/// sorted order). Arcs go from each edge node to both of its endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceDag {
    pub dag: Dag,
    pub n_vertices: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl IncidenceDag {
    pub fn vertex_node(&self, v: VertexId) -> usize {
        v
    }

    pub fn edge_node(&self, j: usize) -> usize {
        self.n_vertices + j
    }
}

/// Node `v * r + i` is copy `i` of vertex `v`; node `r * n + j` is edge `j`.
/// Each edge node is adjacent to every copy of both endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplicatedGraph {
    pub graph: UGraph,
    pub r: usize,
    pub n_vertices: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl ReplicatedGraph {
    pub fn copy(&self, v: VertexId, i: usize) -> usize {
        v * self.r + i
    }

    pub fn edge_node(&self, j: usize) -> usize {
        self.r * self.n_vertices + j
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionLimits {
    pub max_nodes: usize,
    pub layout: LayoutLimits,
    pub width: WidthLimits,
}

impl Default for ReductionLimits {
    fn default() -> Self {
        Self {
            max_nodes: 64,
            layout: LayoutLimits::default(),
            width: WidthLimits::default(),
        }
    }
}

pub fn to_incidence_dag(g: &UGraph) -> IncidenceDag {
    let n = g.n();
    let arcs = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(j, &(u, v))| [(n + j, u), (n + j, v)]);
    IncidenceDag {
        dag: Dag::new(n + g.m(), arcs).expect("arcs leave edge nodes only"),
        n_vertices: n,
        edges: g.edges().to_vec(),
    }
}

pub fn to_replicated_bipartite(g: &UGraph, r: usize, max_nodes: usize) -> Result<ReplicatedGraph> {
    if r == 0 {
        return Err(Error::InvalidParameters("replication factor must be at least 1".into()));
    }
    let n = g.n();
    let nodes = r
        .checked_mul(n)
        .and_then(|x| x.checked_add(g.m()))
        .filter(|&x| x <= max_nodes)
        .ok_or_else(|| {
            Error::SizeLimit(format!(
                "replicated graph would have {r}·{n}+{} nodes, budget is {max_nodes}",
                g.m()
            ))
        })?;
    let edges = g.edges().iter().enumerate().flat_map(|(j, &(u, v))| {
        (0..r).flat_map(move |i| [(u * r + i, r * n + j), (v * r + i, r * n + j)])
    });
    Ok(ReplicatedGraph {
        graph: UGraph::new(nodes, edges).expect("bipartite edges are simple"),
        r,
        n_vertices: n,
        edges: g.edges().to_vec(),
    })
}

/// Edges of `g` grouped by the endpoint that comes first in `order`.
fn edges_by_first_endpoint(g: &UGraph, order: &Ordering) -> Result<Vec<Vec<usize>>> {
    if order.len() != g.n() {
        return Err(Error::NotAPermutation(g.n()));
    }
    let mut by_first = vec![Vec::new(); g.n()];
    for (j, &(u, v)) in g.edges().iter().enumerate() {
        let first = if order.rank(u) < order.rank(v) { u } else { v };
        by_first[first].push(j);
    }
    Ok(by_first)
}

/// Extends `order` to the incidence DAG by inserting each edge node
/// immediately before the earlier of its endpoints.
pub fn lift_ordering_dag(g: &UGraph, order: &Ordering) -> Result<Ordering> {
    let by_first = edges_by_first_endpoint(g, order)?;
    let n = g.n();
    let mut seq = Vec::with_capacity(n + g.m());
    for &v in order.sequence() {
        seq.extend(by_first[v].iter().map(|&j| n + j));
        seq.push(v);
    }
    Ordering::from_sequence(seq)
}

/// Extends `order` to the replicated graph: the copies of each vertex are
/// consecutive, preceded by the edge nodes whose first endpoint it is.
pub fn lift_ordering_undirected(g: &UGraph, r: usize, order: &Ordering) -> Result<Ordering> {
    let by_first = edges_by_first_endpoint(g, order)?;
    let n = g.n();
    let mut seq = Vec::with_capacity(r * n + g.m());
    for &v in order.sequence() {
        seq.extend(by_first[v].iter().map(|&j| r * n + j));
        seq.extend(v * r..(v + 1) * r);
    }
    Ordering::from_sequence(seq)
}

/// One checked inequality `lhs <= rhs` (or `>=`, per `lemma`) on one
/// instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub instance: String,
    pub lhs: u64,
    /// `<=` or `>=`.
    pub relation: String,
    pub rhs: u64,
    pub holds: bool,
    pub hypothesis_met: bool,
}

impl LemmaReport {
    fn at_most(lemma: &str, instance: &str, lhs: u64, rhs: u64, hypothesis_met: bool) -> Self {
        Self {
            lemma: lemma.into(),
            instance: instance.into(),
            lhs,
            relation: "<=".into(),
            rhs,
            holds: lhs <= rhs,
            hypothesis_met,
        }
    }

    fn at_least(lemma: &str, instance: &str, lhs: u64, rhs: u64, hypothesis_met: bool) -> Self {
        Self {
            relation: ">=".into(),
            holds: lhs >= rhs,
            ..Self::at_most(lemma, instance, lhs, rhs, hypothesis_met)
        }
    }
}

/// Compact instance label: `n=3 m=2 [1-2 2-3]`, 1-based.
pub fn describe(g: &UGraph) -> String {
    let edges: Vec<String> = g.edges().iter().map(|&(u, v)| format!("{}-{}", u + 1, v + 1)).collect();
    format!("n={} m={} [{}]", g.n(), g.m(), edges.join(" "))
}

/// The replication factor the soundness lemmas ask for, `|V|·|E|`, and at
/// least 1.
pub fn default_replication(g: &UGraph) -> usize {
    (g.n() * g.m()).max(1)
}

fn solve<H: LayoutGraph + ?Sized>(h: &H, name: &str, limits: LayoutLimits) -> Result<(u64, Ordering)> {
    let r = solve_subset_dp(h, named_problem(name)?, limits)?;
    Ok((r.value, r.witness))
}

fn spec(name: &str) -> ProblemSpec {
    named_problem(name).expect("known problem")
}

/// `layout(D;E,max) <= MCLA(G) + d`, `layout(D;E,Σ) <= (MLA(G) + d|V'|)(d+1)`,
/// and the lifted optimal cutwidth ordering meets the first bound itself.
pub fn verify_dag_completeness(g: &UGraph, limits: &ReductionLimits) -> Result<Vec<LemmaReport>> {
    let inc = to_incidence_dag(g);
    check_nodes(inc.dag.n(), limits)?;
    let name = describe(g);
    let d = g.max_degree() as u64;
    let nodes = inc.dag.n() as u64;
    let (mcla, mcla_order) = solve(g, "mcla", limits.layout)?;
    let (mla, _) = solve(g, "mla", limits.layout)?;
    let (dmax, _) = solve(&inc.dag, "dag_mcla", limits.layout)?;
    let (dsum, _) = solve(&inc.dag, "dag_mla", limits.layout)?;
    let lifted = lift_ordering_dag(g, &mcla_order)?;
    let lifted_max = evaluate(&inc.dag, spec("dag_mcla"), &lifted)?;
    Ok(vec![
        LemmaReport::at_most("dag_completeness_max", &name, dmax, mcla + d, true),
        LemmaReport::at_most("dag_completeness_sum", &name, dsum, (mla + d * nodes) * (d + 1), true),
        LemmaReport::at_most("dag_completeness_lifted_max", &name, lifted_max, mcla + d, true),
    ])
}

/// Smallest `|E(S, V \ S)|` over `S` with `|S| = ceil(|V|/2)`.
pub fn min_balanced_cut(g: &UGraph) -> Result<u64> {
    let n = g.n();
    let k = n.div_ceil(2);
    min_cut_where(g, |size| size == k)
}

/// Smallest `|E(S, V \ S)|` over partitions with `5|S| >= |V|` and
/// `5|V \ S| >= |V|`; 0 when no partition qualifies.
pub fn min_fifth_balanced_cut(g: &UGraph) -> Result<u64> {
    let n = g.n();
    Ok(min_cut_where(g, |size| 5 * size >= n && 5 * (n - size) >= n).unwrap_or(0))
}

fn min_cut_where(g: &UGraph, ok: impl Fn(usize) -> bool) -> Result<u64> {
    let n = g.n();
    if n > 24 {
        return Err(Error::SizeLimit(format!("balanced cut search handles at most 24 vertices, got {n}")));
    }
    let mut best: Option<u64> = None;
    for mask in 0u64..1 << n {
        if !ok(mask.count_ones() as usize) {
            continue;
        }
        let c = cut_edges(g, &VertexSet::from_mask(n, mask))? as u64;
        best = Some(best.map_or(c, |b| b.min(c)));
    }
    best.ok_or_else(|| Error::InvalidParameters("no partition meets the balance condition".into()))
}

/// `layout(D;V,max) >= min balanced cut of G`.
pub fn verify_dag_soundness_bound(g: &UGraph, limits: &ReductionLimits) -> Result<Vec<LemmaReport>> {
    let inc = to_incidence_dag(g);
    check_nodes(inc.dag.n(), limits)?;
    let (value, _) = solve(&inc.dag, "register_sufficiency", limits.layout)?;
    let cut = min_balanced_cut(g)?;
    Ok(vec![LemmaReport::at_least("dag_soundness_max", &describe(g), value, cut, true)])
}

/// `layout(G';V,max) <= MCLA(G)`, `layout(G';V,Σ) <= (d+r)·MLA(G)`, and the
/// lifted optimal cutwidth ordering meets the first bound itself.
pub fn verify_undir_completeness(g: &UGraph, r: usize, limits: &ReductionLimits) -> Result<Vec<LemmaReport>> {
    let rep = to_replicated_bipartite(g, r, limits.max_nodes)?;
    let name = format!("{} r={r}", describe(g));
    let d = g.max_degree() as u64;
    let (mcla, mcla_order) = solve(g, "mcla", limits.layout)?;
    let (mla, _) = solve(g, "mla", limits.layout)?;
    let (vmax, _) = solve(&rep.graph, "vertex_separation", limits.layout)?;
    let (vsum, _) = solve(&rep.graph, "igc", limits.layout)?;
    let lifted = lift_ordering_undirected(g, r, &mcla_order)?;
    let lifted_max = evaluate(&rep.graph, spec("vertex_separation"), &lifted)?;
    Ok(vec![
        LemmaReport::at_most("undir_completeness_max", &name, vmax, mcla, true),
        LemmaReport::at_most("undir_completeness_sum", &name, vsum, (d + r as u64) * mla, true),
        LemmaReport::at_most("undir_completeness_lifted_max", &name, lifted_max, mcla, true),
    ])
}

/// `layout(G';V,max) >=` the smallest cut over partitions of `V` with both
/// sides at least `|V|/5`.
pub fn verify_undir_soundness_bound(g: &UGraph, r: usize, limits: &ReductionLimits) -> Result<Vec<LemmaReport>> {
    let rep = to_replicated_bipartite(g, r, limits.max_nodes)?;
    let (value, _) = solve(&rep.graph, "vertex_separation", limits.layout)?;
    let cut = min_fifth_balanced_cut(g)?;
    let met = r >= g.n() * g.m();
    Ok(vec![LemmaReport::at_least(
        "undir_soundness_max",
        &format!("{} r={r}", describe(g)),
        value,
        cut,
        met,
    )])
}

/// `tw(G') >= ψ(G', V') - 1` and `ψ(G', V') >=` the fifth-balanced cut of `G`.
pub fn verify_treewidth_bound(g: &UGraph, r: usize, limits: &ReductionLimits) -> Result<Vec<LemmaReport>> {
    let rep = to_replicated_bipartite(g, r, limits.max_nodes)?;
    let name = format!("{} r={r}", describe(g));
    let tw = treewidth_exact(&rep.graph, limits.width)?.value as u64;
    let psi = half_separator_number(&rep.graph, WMode::FullVertexSet, limits.width)?.value as u64;
    let cut = min_fifth_balanced_cut(g)?;
    let met = r >= g.n() * g.m();
    Ok(vec![
        LemmaReport::at_least("treewidth_separator", &name, tw + 1, psi, met),
        LemmaReport::at_least("separator_cut", &name, psi, cut, met),
    ])
}

fn check_nodes(nodes: usize, limits: &ReductionLimits) -> Result<()> {
    if nodes > limits.max_nodes {
        return Err(Error::SizeLimit(format!(
            "reduced instance has {nodes} nodes, budget is {}",
            limits.max_nodes
        )));
    }
    Ok(())
}

//! Small-instance catalogs: isomorphism classes of graphs and DAGs, plus
//! seeded random instances for property sweeps.
//!
//! Canonical forms use partition refinement with individualization and
//! take the minimal adjacency code over all discrete leaves. There is no
//! automorphism pruning, which is fine up to about ten vertices.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Dag, UGraph};

/// Adjacency as out-neighbor masks; undirected graphs are symmetric.
struct Adj<'a> {
    out: &'a [u64],
    inn: Vec<u64>,
    directed: bool,
}

impl Adj<'_> {
    fn n(&self) -> usize {
        self.out.len()
    }
}

/// Splits cells by neighbor counts into every other cell until stable.
fn refine(adj: &Adj<'_>, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let cell_masks: Vec<u64> = cells
            .iter()
            .map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let signature = |v: usize| -> Vec<u32> {
                let mut sig = Vec::with_capacity(cell_masks.len() * 2);
                for &cm in &cell_masks {
                    sig.push((adj.out[v] & cm).count_ones());
                    if adj.directed {
                        sig.push((adj.inn[v] & cm).count_ones());
                    }
                }
                sig
            };
            let mut keyed: Vec<(Vec<u32>, usize)> = cell.iter().map(|&v| (signature(v), v)).collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        // Refinement only splits cells.
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn code_of(adj: &Adj<'_>, perm: &[usize]) -> u64 {
    let n = adj.n();
    let mut code = 0u64;
    for i in 0..n {
        let start = if adj.directed { 0 } else { i + 1 };
        for j in start..n {
            if i == j {
                continue;
            }
            code = code << 1 | (adj.out[perm[i]] >> perm[j] & 1);
        }
    }
    code
}

fn search(adj: &Adj<'_>, cells: Vec<Vec<usize>>, best: &mut Option<(u64, Vec<usize>)>) {
    let cells = refine(adj, cells);
    match cells.iter().position(|c| c.len() > 1) {
        None => {
            let perm: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let code = code_of(adj, &perm);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                *best = Some((code, perm));
            }
        }
        Some(k) => {
            for &v in &cells[k] {
                let mut split = cells[..k].to_vec();
                split.push(vec![v]);
                split.push(cells[k].iter().copied().filter(|&w| w != v).collect());
                split.extend_from_slice(&cells[k + 1..]);
                search(adj, split, best);
            }
        }
    }
}

/// Canonical code and canonical vertex order (`perm[i]` is the original
/// vertex placed at canonical position `i`). Requires `n <= 11` undirected
/// or `n <= 8` directed so the code fits in 64 bits.
pub fn canonical_form(out: &[u64], directed: bool) -> (u64, Vec<usize>) {
    let n = out.len();
    assert!(
        if directed { n * (n - 1).max(1) <= 64 } else { n * n.saturating_sub(1) / 2 <= 64 },
        "canonical codes are limited to 64 adjacency bits"
    );
    let mut inn = vec![0u64; n];
    for (v, &m) in out.iter().enumerate() {
        for (w, slot) in inn.iter_mut().enumerate() {
            if m >> w & 1 == 1 {
                *slot |= 1 << v;
            }
        }
    }
    let adj = Adj { out, inn, directed };
    if n == 0 {
        return (0, Vec::new());
    }
    let mut best = None;
    search(&adj, vec![(0..n).collect()], &mut best);
    best.expect("at least one leaf")
}

pub fn canonical_ugraph(g: &UGraph) -> u64 {
    canonical_form(&g.neighbor_masks(), false).0
}

pub fn canonical_dag(d: &Dag) -> u64 {
    canonical_form(&d.successor_masks(), true).0
}

/// One representative per isomorphism class of graphs on `n` vertices.
pub fn all_graphs(n: usize) -> Vec<UGraph> {
    if n == 0 {
        return vec![UGraph::empty(0)];
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for base in all_graphs(n - 1) {
        for nbrs in 0u64..1 << (n - 1) {
            let edges = base
                .edges()
                .iter()
                .copied()
                .chain((0..n - 1).filter(|&u| nbrs >> u & 1 == 1).map(|u| (u, n - 1)));
            let g = UGraph::new(n, edges).expect("extension stays simple");
            if seen.insert(canonical_ugraph(&g)) {
                out.push(g);
            }
        }
    }
    out
}

pub fn connected_graphs(n: usize) -> Vec<UGraph> {
    all_graphs(n).into_iter().filter(UGraph::is_connected).collect()
}

/// One representative per isomorphism class of DAGs on `n` vertices. Every
/// DAG arises from a smaller one by adding a new sink.
pub fn all_dags(n: usize) -> Vec<Dag> {
    if n == 0 {
        return vec![Dag::new(0, []).expect("empty DAG")];
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for base in all_dags(n - 1) {
        for preds in 0u64..1 << (n - 1) {
            let arcs = base
                .arcs()
                .iter()
                .copied()
                .chain((0..n - 1).filter(|&u| preds >> u & 1 == 1).map(|u| (u, n - 1)));
            let d = Dag::new(n, arcs).expect("new sink keeps acyclicity");
            if seen.insert(canonical_dag(&d)) {
                out.push(d);
            }
        }
    }
    out
}

pub fn connected_dags(n: usize) -> Vec<Dag> {
    all_dags(n)
        .into_iter()
        .filter(|d| d.underlying().is_connected())
        .collect()
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> UGraph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.random_bool(p))
        .collect();
    UGraph::new(n, edges).expect("random edges are simple")
}

/// Random connected graph: a random spanning tree plus extra edges with
/// probability `p`, relabeled by a random permutation.
pub fn random_connected_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> UGraph {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut edges = HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.insert((u, v));
            }
        }
    }
    let mut edges: Vec<_> = edges.into_iter().map(|(u, v)| (label[u], label[v])).collect();
    edges.sort_unstable();
    UGraph::new(n, edges).expect("random edges are simple")
}

/// Random DAG: arcs `i -> j` (`i < j` in a hidden order) with probability
/// `p`, at most `max_indegree` per vertex, then relabeled at random.
pub fn random_dag<R: Rng>(n: usize, p: f64, max_indegree: usize, rng: &mut R) -> Dag {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut arcs = Vec::new();
    for j in 0..n {
        let mut preds: Vec<usize> = (0..j).filter(|_| rng.random_bool(p)).collect();
        preds.shuffle(rng);
        preds.truncate(max_indegree);
        arcs.extend(preds.into_iter().map(|i| (label[i], label[j])));
    }
    Dag::new(n, arcs).expect("arcs follow a hidden topological order")
}

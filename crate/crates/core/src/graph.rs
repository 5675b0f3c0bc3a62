//! Graph representations shared by every other module.
//!
//! Vertex ids are contiguous `0..n`. Both [`UGraph`] and [`Dag`] are
//! immutable once built and reject self-loops and parallel edges.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Membership bitset over the vertex range `[0, n)` of a host graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = VertexId>>(n: usize, vertices: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in vertices {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Builds a set from the low `n` bits of `mask`. Requires `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "from_mask needs n <= 64");
        let mut s = Self::empty(n);
        if n > 0 {
            s.words[0] = mask & low_bits(n);
        }
        s
    }

    /// The set as a single machine word, when the universe fits in one.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: VertexId) {
        assert!(v < self.n, "vertex {v} outside universe {}", self.n);
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: VertexId) {
        if v < self.n {
            self.words[v / 64] &= !(1 << (v % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn complement(&self) -> Self {
        let mut out = Self::empty(self.n);
        for v in 0..self.n {
            if !self.contains(v) {
                out.insert(v);
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n).filter(move |&v| self.contains(v))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Simple undirected graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UGraph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<VertexId>>,
}

impl UGraph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge {{{}, {}}}",
                w[0].0, w[0].1
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self {
            n,
            edges: list,
            adj,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("edgeless graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).expect("path is valid")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// The common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Neighborhood bitmasks, one word per vertex. Requires `n <= 64`.
    pub(crate) fn neighbor_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        self.adj
            .iter()
            .map(|a| a.iter().fold(0u64, |m, &w| m | 1 << w))
            .collect()
    }
}

/// Directed acyclic graph. Construction certifies acyclicity with a stored
/// topological order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dag {
    n: usize,
    arcs: Vec<(VertexId, VertexId)>,
    succ: Vec<Vec<VertexId>>,
    pred: Vec<Vec<VertexId>>,
    topo: Vec<VertexId>,
}

impl Dag {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        let mut list: Vec<_> = arcs.into_iter().collect();
        for &(u, v) in &list {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate arc ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(u, v) in &list {
            succ[u].push(v);
            pred[v].push(u);
        }
        for p in &mut pred {
            p.sort_unstable();
        }

        // Kahn's algorithm, smallest ready id first.
        let mut indeg: Vec<usize> = pred.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<VertexId> =
            (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(u) = ready.pop_first() {
            topo.push(u);
            for &w in &succ[u] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::InvalidGraph("arcs contain a directed cycle".into()));
        }
        Ok(Self {
            n,
            arcs: list,
            succ,
            pred,
            topo,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(VertexId, VertexId)] {
        &self.arcs
    }

    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v]
    }

    pub fn indegree(&self, v: VertexId) -> usize {
        self.pred[v].len()
    }

    pub fn max_indegree(&self) -> usize {
        self.pred.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn sources(&self) -> Vec<VertexId> {
        (0..self.n).filter(|&v| self.pred[v].is_empty()).collect()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        (0..self.n).filter(|&v| self.succ[v].is_empty()).collect()
    }

    pub fn topological_witness(&self) -> Ordering {
        Ordering::from_sequence(self.topo.clone()).expect("stored witness is a permutation")
    }

    /// Underlying undirected graph (arcs with orientation dropped).
    pub fn underlying(&self) -> UGraph {
        UGraph::new(self.n, self.arcs.iter().copied()).expect("arcs of a DAG are simple")
    }

    pub(crate) fn successor_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        self.succ
            .iter()
            .map(|a| a.iter().fold(0u64, |m, &w| m | 1 << w))
            .collect()
    }

    pub(crate) fn predecessor_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        self.pred
            .iter()
            .map(|a| a.iter().fold(0u64, |m, &w| m | 1 << w))
            .collect()
    }
}

/// A bijection from vertices to ranks `1..=n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ordering {
    sequence: Vec<VertexId>,
    rank0: Vec<usize>,
}

impl Ordering {
    /// `sequence[k]` is the vertex placed at rank `k + 1`.
    pub fn from_sequence(sequence: Vec<VertexId>) -> Result<Self> {
        let n = sequence.len();
        let mut rank0 = vec![usize::MAX; n];
        for (k, &v) in sequence.iter().enumerate() {
            if v >= n || rank0[v] != usize::MAX {
                return Err(Error::NotAPermutation(n));
            }
            rank0[v] = k;
        }
        Ok(Self { sequence, rank0 })
    }

    /// Builds from 1-based ranks, `ranks[v]` being the rank of vertex `v`.
    pub fn from_ranks(ranks: &[usize]) -> Result<Self> {
        let n = ranks.len();
        let mut sequence = vec![usize::MAX; n];
        for (v, &r) in ranks.iter().enumerate() {
            if r == 0 || r > n || sequence[r - 1] != usize::MAX {
                return Err(Error::NotAPermutation(n));
            }
            sequence[r - 1] = v;
        }
        Self::from_sequence(sequence)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_sequence((0..n).collect()).expect("identity is a permutation")
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// 1-based rank of `v`.
    pub fn rank(&self, v: VertexId) -> usize {
        self.rank0[v] + 1
    }

    /// Vertex at 1-based `rank`.
    pub fn vertex_at(&self, rank: usize) -> VertexId {
        self.sequence[rank - 1]
    }

    pub fn sequence(&self) -> &[VertexId] {
        &self.sequence
    }

    /// Ranks indexed by vertex, 1-based.
    pub fn ranks(&self) -> Vec<usize> {
        self.rank0.iter().map(|r| r + 1).collect()
    }

    /// The set of vertices at ranks `1..=i`.
    pub fn prefix(&self, i: usize) -> VertexSet {
        VertexSet::from_vertices(self.len(), self.sequence[..i].iter().copied())
            .expect("sequence entries are in range")
    }
}

/// Whether a graph is undirected or a DAG; selects the feasible orderings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Undirected,
    Dag,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Undirected => "undirected",
            Direction::Dag => "dag",
        }
    }
}

/// Uniform view of the two graph kinds used by layout evaluation.
///
/// `forward(v)` lists the vertices whose placement after `v` makes an edge
/// at `v` cross: all neighbors for undirected graphs, successors for DAGs.
/// `backward(v)` lists vertices that must precede `v` (empty when undirected).
pub trait LayoutGraph {
    fn vertex_count(&self) -> usize;
    fn direction(&self) -> Direction;
    fn forward(&self, v: VertexId) -> &[VertexId];
    fn backward(&self, v: VertexId) -> &[VertexId];
    /// Edges `(u, v)` with `u < v` for undirected graphs, arcs for DAGs.
    fn edge_pairs(&self) -> &[(VertexId, VertexId)];

    fn is_feasible(&self, order: &Ordering) -> bool {
        if order.len() != self.vertex_count() {
            return false;
        }
        match self.direction() {
            Direction::Undirected => true,
            Direction::Dag => self
                .edge_pairs()
                .iter()
                .all(|&(u, v)| order.rank(u) < order.rank(v)),
        }
    }
}

impl LayoutGraph for UGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn direction(&self) -> Direction {
        Direction::Undirected
    }
    fn forward(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }
    fn backward(&self, _v: VertexId) -> &[VertexId] {
        &[]
    }
    fn edge_pairs(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }
}

impl LayoutGraph for Dag {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn direction(&self) -> Direction {
        Direction::Dag
    }
    fn forward(&self, v: VertexId) -> &[VertexId] {
        &self.succ[v]
    }
    fn backward(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v]
    }
    fn edge_pairs(&self) -> &[(VertexId, VertexId)] {
        &self.arcs
    }
}

/// Either graph kind, as read from an edge-list file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AnyGraph {
    Undirected(UGraph),
    Dag(Dag),
}

impl AnyGraph {
    pub fn as_undirected(&self) -> Option<&UGraph> {
        match self {
            AnyGraph::Undirected(g) => Some(g),
            AnyGraph::Dag(_) => None,
        }
    }

    pub fn as_dag(&self) -> Option<&Dag> {
        match self {
            AnyGraph::Dag(d) => Some(d),
            AnyGraph::Undirected(_) => None,
        }
    }
}

impl From<UGraph> for AnyGraph {
    fn from(g: UGraph) -> Self {
        AnyGraph::Undirected(g)
    }
}

impl From<Dag> for AnyGraph {
    fn from(d: Dag) -> Self {
        AnyGraph::Dag(d)
    }
}

impl LayoutGraph for AnyGraph {
    fn vertex_count(&self) -> usize {
        match self {
            AnyGraph::Undirected(g) => g.vertex_count(),
            AnyGraph::Dag(d) => d.vertex_count(),
        }
    }
    fn direction(&self) -> Direction {
        match self {
            AnyGraph::Undirected(_) => Direction::Undirected,
            AnyGraph::Dag(_) => Direction::Dag,
        }
    }
    fn forward(&self, v: VertexId) -> &[VertexId] {
        match self {
            AnyGraph::Undirected(g) => g.forward(v),
            AnyGraph::Dag(d) => d.forward(v),
        }
    }
    fn backward(&self, v: VertexId) -> &[VertexId] {
        match self {
            AnyGraph::Undirected(g) => g.backward(v),
            AnyGraph::Dag(d) => d.backward(v),
        }
    }
    fn edge_pairs(&self) -> &[(VertexId, VertexId)] {
        match self {
            AnyGraph::Undirected(g) => g.edge_pairs(),
            AnyGraph::Dag(d) => d.edge_pairs(),
        }
    }
}

fn check_universe(n: usize, s: &VertexSet) -> Result<()> {
    if s.universe() != n {
        return Err(Error::VertexOutOfRange {
            vertex: s.universe().saturating_sub(1),
            n,
        });
    }
    Ok(())
}

/// Number of edges with exactly one endpoint in `s`.
pub fn cut_edges(g: &UGraph, s: &VertexSet) -> Result<usize> {
    check_universe(g.n(), s)?;
    Ok(g.edges()
        .iter()
        .filter(|&&(u, v)| s.contains(u) != s.contains(v))
        .count())
}

/// Normalized edge expansion `|E(S, V \ S)| / (d |S|)` of a d-regular graph.
pub fn expansion(g: &UGraph, s: &VertexSet) -> Result<Ratio<u64>> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let cut = cut_edges(g, s)?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if d == 0 {
        // Edgeless regular graph: nothing leaves any set.
        return Ok(Ratio::from_integer(0));
    }
    Ok(Ratio::new(cut as u64, (d * s.len()) as u64))
}

/// True iff every arc `(u, v)` has `rank(u) < rank(v)`.
pub fn is_topological(d: &Dag, order: &Ordering) -> bool {
    d.is_feasible(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, vs.iter().copied()).unwrap()
    }

    #[test]
    fn cut_edges_small_cases() {
        let k3 = UGraph::complete(3);
        assert_eq!(cut_edges(&k3, &set(3, &[0])).unwrap(), 2);
        let c4 = UGraph::cycle(4);
        assert_eq!(cut_edges(&c4, &set(4, &[0, 1])).unwrap(), 2);
        assert_eq!(cut_edges(&c4, &VertexSet::empty(4)).unwrap(), 0);
    }

    #[test]
    fn cut_edges_rejects_wrong_universe() {
        let k3 = UGraph::complete(3);
        assert!(cut_edges(&k3, &set(5, &[4])).is_err());
    }

    #[test]
    fn expansion_on_c6() {
        let c6 = UGraph::cycle(6);
        assert_eq!(
            expansion(&c6, &set(6, &[0, 1, 2])).unwrap(),
            Ratio::new(1, 3)
        );
        assert_eq!(
            expansion(&c6, &set(6, &[0, 2, 4])).unwrap(),
            Ratio::from_integer(1)
        );
        assert_eq!(
            expansion(&c6, &VertexSet::full(6)).unwrap(),
            Ratio::from_integer(0)
        );
    }

    #[test]
    fn expansion_errors() {
        let p3 = UGraph::path(3);
        assert_eq!(expansion(&p3, &set(3, &[0])), Err(Error::NotRegular));
        let c4 = UGraph::cycle(4);
        assert_eq!(expansion(&c4, &VertexSet::empty(4)), Err(Error::EmptySet));
    }

    #[test]
    fn topological_checks() {
        let star = Dag::new(3, [(0, 1), (0, 2)]).unwrap();
        let ok = Ordering::from_sequence(vec![0, 1, 2]).unwrap();
        let bad = Ordering::from_sequence(vec![1, 0, 2]).unwrap();
        assert!(is_topological(&star, &ok));
        assert!(!is_topological(&star, &bad));
        let single = Dag::new(1, []).unwrap();
        assert!(is_topological(&single, &Ordering::identity(1)));
    }

    #[test]
    fn dag_rejects_cycles_and_duplicates() {
        assert!(Dag::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(Dag::new(2, [(0, 1), (0, 1)]).is_err());
        assert!(Dag::new(2, [(1, 1)]).is_err());
        assert!(UGraph::new(2, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn ordering_rejects_non_permutations() {
        assert!(Ordering::from_sequence(vec![0, 0]).is_err());
        assert!(Ordering::from_ranks(&[1, 3]).is_err());
        let o = Ordering::from_ranks(&[2, 1]).unwrap();
        assert_eq!(o.sequence(), &[1, 0]);
        assert_eq!(o.rank(0), 2);
    }

    #[test]
    fn vertex_set_beyond_one_word() {
        let mut s = VertexSet::empty(130);
        s.insert(129);
        s.insert(3);
        assert_eq!(s.len(), 2);
        assert_eq!(s.complement().len(), 128);
        assert_eq!(s.to_mask(), None);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 129]);
    }
}

//! Linear layout problems `layout(H; C, agg)`.
//!
//! A problem is a triple of graph direction, cost (crossing edges or their
//! left endpoints) and aggregator (sum or max over positions). Orderings are
//! feasible when they are topological for DAGs, and always otherwise.

mod brute;
pub(crate) mod dp;
mod greedy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Direction, LayoutGraph, Ordering, VertexId, VertexSet};

pub use brute::solve_bruteforce;
pub use dp::{solve_subset_dp, solve_subset_dp_with, Symmetry};
pub use greedy::{heuristic_greedy, GreedyConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    Edge,
    Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    Sum,
    Max,
}

impl Aggregator {
    pub(crate) fn combine(self, acc: u64, cost: u64) -> u64 {
        match self {
            Aggregator::Sum => acc + cost,
            Aggregator::Max => acc.max(cost),
        }
    }
}

/// One row of the layout-problem taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub direction: Direction,
    pub cost: CostKind,
    pub agg: Aggregator,
}

impl ProblemSpec {
    pub const fn new(direction: Direction, cost: CostKind, agg: Aggregator) -> Self {
        Self {
            direction,
            cost,
            agg,
        }
    }

    /// All eight combinations, undirected first.
    pub fn all() -> [ProblemSpec; 8] {
        let mut out = [NAMED[0].1; 8];
        for (slot, (_, spec)) in out.iter_mut().zip(NAMED.iter()) {
            *slot = *spec;
        }
        out
    }

    pub fn name(&self) -> &'static str {
        NAMED
            .iter()
            .find(|(_, s)| s == self)
            .map(|(n, _)| *n)
            .expect("every combination is named")
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const NAMED: [(&str, ProblemSpec); 8] = {
    use Aggregator::*;
    use CostKind::*;
    use Direction::*;
    [
        ("mla", ProblemSpec::new(Undirected, Edge, Sum)),
        ("mcla", ProblemSpec::new(Undirected, Edge, Max)),
        ("igc", ProblemSpec::new(Undirected, Vertex, Sum)),
        ("vertex_separation", ProblemSpec::new(Undirected, Vertex, Max)),
        ("dag_mla", ProblemSpec::new(Dag, Edge, Sum)),
        ("dag_mcla", ProblemSpec::new(Dag, Edge, Max)),
        ("dag_sumvertex", ProblemSpec::new(Dag, Vertex, Sum)),
        ("register_sufficiency", ProblemSpec::new(Dag, Vertex, Max)),
    ]
};

/// Looks a problem up by its conventional name.
pub fn named_problem(name: &str) -> Result<ProblemSpec> {
    NAMED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::Unknown {
            kind: "problem",
            name: name.to_string(),
        })
}

impl FromStr for ProblemSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        named_problem(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bruteforce,
    SubsetDp,
    Heuristic,
}

impl Method {
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::Heuristic)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutResult {
    pub problem: ProblemSpec,
    pub value: u64,
    pub witness: Ordering,
    pub method: Method,
}

/// Serialized form of a [`LayoutResult`]; `ordering[v]` is the 1-based rank
/// of vertex `v + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutRecord {
    pub problem: String,
    pub spec: ProblemSpec,
    pub value: u64,
    pub ordering: Vec<usize>,
    pub method: Method,
}

impl LayoutResult {
    pub fn to_record(&self) -> LayoutRecord {
        LayoutRecord {
            problem: self.problem.name().to_string(),
            spec: self.problem,
            value: self.value,
            ordering: self.witness.ranks(),
            method: self.method,
        }
    }

    pub fn from_record(record: &LayoutRecord) -> Result<Self> {
        Ok(Self {
            problem: record.spec,
            value: record.value,
            witness: Ordering::from_ranks(&record.ordering)?,
            method: record.method,
        })
    }
}

pub(crate) fn check_direction<H: LayoutGraph + ?Sized>(h: &H, spec: ProblemSpec) -> Result<()> {
    if h.direction() != spec.direction {
        return Err(Error::DirectionMismatch {
            expected: spec.direction.name(),
        });
    }
    Ok(())
}

fn check_feasible<H: LayoutGraph + ?Sized>(h: &H, order: &Ordering) -> Result<()> {
    if order.len() != h.vertex_count() {
        return Err(Error::NotAPermutation(h.vertex_count()));
    }
    if let Some(&(u, v)) = h
        .edge_pairs()
        .iter()
        .find(|&&(u, v)| h.direction() == Direction::Dag && order.rank(u) >= order.rank(v))
    {
        return Err(Error::NotTopological { from: u, to: v });
    }
    Ok(())
}

/// Edges crossing position `i`, oriented `(earlier, later)`.
pub fn crossing_edges<H: LayoutGraph + ?Sized>(
    h: &H,
    order: &Ordering,
    i: usize,
) -> Result<Vec<(VertexId, VertexId)>> {
    check_feasible(h, order)?;
    let n = h.vertex_count();
    if i == 0 || i > n {
        return Err(Error::PositionOutOfRange { position: i, n });
    }
    Ok(h.edge_pairs()
        .iter()
        .filter_map(|&(u, v)| {
            let (a, b) = if order.rank(u) <= order.rank(v) {
                (u, v)
            } else {
                (v, u)
            };
            (order.rank(a) <= i && i < order.rank(b)).then_some((a, b))
        })
        .collect())
}

/// Left endpoints of the edges crossing position `i`.
pub fn left_vertices<H: LayoutGraph + ?Sized>(
    h: &H,
    order: &Ordering,
    i: usize,
) -> Result<VertexSet> {
    let crossing = crossing_edges(h, order, i)?;
    VertexSet::from_vertices(h.vertex_count(), crossing.into_iter().map(|(a, _)| a))
}

/// Per-position costs `|C_1(π)|, ..., |C_n(π)|`.
pub fn cost_profile<H: LayoutGraph + ?Sized>(
    h: &H,
    cost: CostKind,
    order: &Ordering,
) -> Result<Vec<u64>> {
    (1..=h.vertex_count())
        .map(|i| {
            Ok(match cost {
                CostKind::Edge => crossing_edges(h, order, i)?.len(),
                CostKind::Vertex => left_vertices(h, order, i)?.len(),
            } as u64)
        })
        .collect()
}

/// Aggregated cost of a feasible ordering.
pub fn evaluate<H: LayoutGraph + ?Sized>(h: &H, spec: ProblemSpec, order: &Ordering) -> Result<u64> {
    check_direction(h, spec)?;
    let profile = cost_profile(h, spec.cost, order)?;
    Ok(profile.into_iter().fold(0, |acc, c| spec.agg.combine(acc, c)))
}

/// Cost at a position whose prefix (vertices at ranks `1..=i`) is `s`.
///
/// Edge cost counts edges leaving `s` (arcs out of `s` for DAGs); vertex
/// cost counts members of `s` with an edge or arc to the outside.
pub fn prefix_cost<H: LayoutGraph + ?Sized>(h: &H, cost: CostKind, s: &VertexSet) -> Result<u64> {
    let n = h.vertex_count();
    if s.universe() != n {
        return Err(Error::VertexOutOfRange {
            vertex: s.universe().saturating_sub(1),
            n,
        });
    }
    let outside = |v: VertexId| h.forward(v).iter().filter(|&&w| !s.contains(w)).count();
    Ok(match cost {
        CostKind::Edge => s.iter().map(outside).sum::<usize>(),
        CostKind::Vertex => s.iter().filter(|&v| outside(v) > 0).count(),
    } as u64)
}

/// Mask form of [`prefix_cost`] used inside the exact solvers.
#[inline]
pub(crate) fn prefix_cost_mask(forward: &[u64], cost: CostKind, s: u64) -> u64 {
    let mut rest = s;
    let mut total = 0u64;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let out = forward[v] & !s;
        total += match cost {
            CostKind::Edge => out.count_ones() as u64,
            CostKind::Vertex => (out != 0) as u64,
        };
    }
    total
}

/// Solver bounds. Exceeding them is a clean [`Error::SizeLimit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayoutLimits {
    pub bruteforce_max_n: usize,
    /// Maximum number of lattice states in the subset DP. `1 << 24` matches
    /// 24 vertices when no two vertices are twins.
    pub dp_max_states: usize,
}

impl Default for LayoutLimits {
    fn default() -> Self {
        Self {
            bruteforce_max_n: 9,
            dp_max_states: 1 << 24,
        }
    }
}

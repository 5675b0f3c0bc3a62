//! Tree and path decompositions, elimination width, exact treewidth and
//! pathwidth, and the 1/2-separator number.

mod decomposition;
mod separator;

pub use decomposition::{
    parse_decomposition, path_decomposition_from_ordering, tree_decomposition_from_elimination,
    validate_decomposition, write_decomposition, DecompositionReport, TreeDecomposition,
};
pub use separator::{
    check_separator_bound, half_separator_number, separator_number_for, SeparatorBoundReport,
    SeparatorResult, WMode,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Ordering, UGraph, VertexSet};
use crate::layout::{named_problem, solve_subset_dp, LayoutLimits};
use crate::lattice::{twin_classes, ClassLattice};

/// A permutation of the vertices, eliminated first to last.
pub type EliminationOrder = Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WidthLimits {
    /// Largest state count of the treewidth DP.
    pub treewidth_max_states: usize,
    /// Largest vertex count for maximizing the separator number over `W`.
    pub separator_max_n: usize,
    /// Largest state count for the separator number with `W = V`.
    pub separator_max_states: usize,
}

impl Default for WidthLimits {
    fn default() -> Self {
        Self {
            treewidth_max_states: 1 << 18,
            separator_max_n: 14,
            separator_max_states: 1 << 18,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthResult {
    pub value: usize,
    /// Elimination order for treewidth, layout ordering for pathwidth.
    pub witness: Vec<usize>,
}

/// Degree of `v` at the moment it is eliminated after `eliminated`: the
/// number of other uneliminated vertices reachable from `v` through
/// eliminated vertices only.
pub fn elim_degree(g: &UGraph, eliminated: &VertexSet, v: usize) -> Result<usize> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if eliminated.contains(v) {
        return Err(Error::InvalidParameters(format!("vertex {v} is already eliminated")));
    }
    let mut seen = vec![false; g.n()];
    seen[v] = true;
    let mut stack = vec![v];
    let mut count = 0;
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            if eliminated.contains(w) {
                stack.push(w);
            } else {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[inline]
fn elim_degree_mask(adj: &[u64], eliminated: u64, v: usize) -> u32 {
    let mut inside = 1u64 << v;
    let mut frontier = inside;
    let mut reached = 0u64;
    while frontier != 0 {
        let mut nbrs = 0u64;
        let mut rest = frontier;
        while rest != 0 {
            nbrs |= adj[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        reached |= nbrs & !eliminated;
        frontier = nbrs & eliminated & !inside;
        inside |= frontier;
    }
    (reached & !(1u64 << v)).count_ones()
}

pub fn elimination_width(g: &UGraph, order: &EliminationOrder) -> Result<usize> {
    if order.len() != g.n() {
        return Err(Error::NotAPermutation(g.n()));
    }
    let mut eliminated = VertexSet::empty(g.n());
    let mut width = 0;
    for &v in order.sequence() {
        width = width.max(elim_degree(g, &eliminated, v)?);
        eliminated.insert(v);
    }
    Ok(width)
}

/// Exact treewidth as the minimum elimination width, by DP over eliminated
/// sets: `g(E) = min_{v ∈ E} max(g(E \ v), elim_degree(E \ v, v))`.
pub fn treewidth_exact(g: &UGraph, limits: WidthLimits) -> Result<WidthResult> {
    let n = g.n();
    if n > 64 {
        return Err(Error::SizeLimit(format!("treewidth handles at most 64 vertices, got {n}")));
    }
    if n == 0 {
        return Ok(WidthResult { value: 0, witness: Vec::new() });
    }
    let adj = g.neighbor_masks();
    let classes = twin_classes(&adj, &vec![0; n], true);
    let states = ClassLattice::state_count(&classes);
    let lattice = ClassLattice::new(classes, limits.treewidth_max_states).ok_or_else(|| {
        Error::SizeLimit(format!(
            "treewidth DP needs {states} states, limit is {}",
            limits.treewidth_max_states
        ))
    })?;
    let mut best = vec![u32::MAX; lattice.size];
    lattice.for_each_state(|index, counts, mask| {
        if index == 0 {
            best[0] = 0;
            return;
        }
        let mut b = u32::MAX;
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let v = lattice.classes[k][c - 1];
            let prev = best[index - lattice.strides[k]];
            b = b.min(prev.max(elim_degree_mask(&adj, mask & !(1 << v), v)));
        }
        best[index] = b;
    });

    let full = lattice.full_index();
    let mut counts = lattice.counts_of(full);
    let mut index = full;
    let mut reversed = Vec::with_capacity(n);
    while index != 0 {
        let mask = lattice.mask_of(&counts);
        let mut choice: Option<(usize, usize)> = None;
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let v = lattice.classes[k][c - 1];
            let prev = best[index - lattice.strides[k]];
            if prev.max(elim_degree_mask(&adj, mask & !(1 << v), v)) == best[index]
                && choice.is_none_or(|(_, bv)| v < bv)
            {
                choice = Some((k, v));
            }
        }
        let (k, v) = choice.expect("optimal predecessor exists");
        reversed.push(v);
        counts[k] -= 1;
        index -= lattice.strides[k];
    }
    reversed.reverse();
    Ok(WidthResult {
        value: best[full] as usize,
        witness: reversed,
    })
}

/// Exact pathwidth, as the optimal max-vertex layout cost.
pub fn pathwidth_exact(g: &UGraph, limits: LayoutLimits) -> Result<WidthResult> {
    let r = solve_subset_dp(g, named_problem("vertex_separation")?, limits)?;
    Ok(WidthResult {
        value: r.value as usize,
        witness: r.witness.sequence().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Ordering;

    fn set(n: usize, vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(n, vs.iter().copied()).unwrap()
    }

    #[test]
    fn elim_degree_examples() {
        let k3 = UGraph::complete(3);
        let p3 = UGraph::path(3);
        assert_eq!(elim_degree(&k3, &set(3, &[]), 0).unwrap(), 2);
        assert_eq!(elim_degree(&p3, &set(3, &[0]), 1).unwrap(), 1);
        assert_eq!(elim_degree(&p3, &set(3, &[]), 1).unwrap(), 2);
        assert_eq!(elim_degree(&p3, &set(3, &[1]), 0).unwrap(), 1);
        assert!(elim_degree(&p3, &set(3, &[1]), 1).is_err());
    }

    #[test]
    fn mask_form_matches_set_form() {
        let g = UGraph::new(7, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (6, 4)]).unwrap();
        let adj = g.neighbor_masks();
        for elim in 0u64..1 << 7 {
            for v in (0..7).filter(|v| elim >> v & 1 == 0) {
                let s = VertexSet::from_mask(7, elim);
                assert_eq!(elim_degree_mask(&adj, elim, v) as usize, elim_degree(&g, &s, v).unwrap());
            }
        }
    }

    #[test]
    fn elimination_width_examples() {
        let p3 = UGraph::path(3);
        let seq = |s: &[usize]| Ordering::from_sequence(s.to_vec()).unwrap();
        assert_eq!(elimination_width(&p3, &seq(&[0, 2, 1])).unwrap(), 1);
        assert_eq!(elimination_width(&p3, &seq(&[1, 0, 2])).unwrap(), 2);
        assert_eq!(elimination_width(&UGraph::complete(5), &seq(&[3, 1, 4, 0, 2])).unwrap(), 4);
    }

    #[test]
    fn treewidth_examples() {
        let tw = |g: &UGraph| treewidth_exact(g, WidthLimits::default()).unwrap();
        let star = UGraph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(tw(&star).value, 1);
        assert_eq!(tw(&UGraph::path(6)).value, 1);
        assert_eq!(tw(&UGraph::cycle(5)).value, 2);
        assert_eq!(tw(&UGraph::complete(4)).value, 3);
        assert_eq!(tw(&UGraph::empty(3)).value, 0);
        let g = UGraph::cycle(6);
        let r = tw(&g);
        let order = Ordering::from_sequence(r.witness).unwrap();
        assert_eq!(elimination_width(&g, &order).unwrap(), r.value);
    }

    #[test]
    fn pathwidth_examples() {
        let pw = |g: &UGraph| pathwidth_exact(g, LayoutLimits::default()).unwrap().value;
        assert_eq!(pw(&UGraph::path(7)), 1);
        assert_eq!(pw(&UGraph::complete(3)), 2);
        assert_eq!(pw(&UGraph::cycle(4)), 2);
    }

    #[test]
    fn treewidth_limit() {
        let limits = WidthLimits {
            treewidth_max_states: 1 << 8,
            ..WidthLimits::default()
        };
        assert!(matches!(treewidth_exact(&UGraph::path(10), limits), Err(Error::SizeLimit(_))));
    }
}

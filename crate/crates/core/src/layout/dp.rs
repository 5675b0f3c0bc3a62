//! Dynamic programming over prefix sets.
//!
//! `f(S) = combine(min_{v ∈ S} f(S \ {v}), cost(S))`, where `S` ranges over
//! prefix sets (predecessor-closed for DAGs). Prefix sets are quotiented by
//! twin classes, which keeps replicated instances tractable.

use super::{
    check_direction, prefix_cost_mask, Aggregator, LayoutLimits, LayoutResult, Method, ProblemSpec,
};
use crate::error::{Error, Result};
use crate::graph::{Direction, LayoutGraph, Ordering};
use crate::lattice::{twin_classes, ClassLattice};

/// Whether to merge twin vertices into classes before running the DP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Twins,
    None,
}

pub(crate) fn masks<H: LayoutGraph + ?Sized>(h: &H) -> Result<(Vec<u64>, Vec<u64>)> {
    let n = h.vertex_count();
    if n > 64 {
        return Err(Error::SizeLimit(format!(
            "exact solvers handle at most 64 vertices, got {n}"
        )));
    }
    let to_mask = |list: &[usize]| list.iter().fold(0u64, |m, &w| m | 1 << w);
    let fwd = (0..n).map(|v| to_mask(h.forward(v))).collect();
    let bwd = (0..n).map(|v| to_mask(h.backward(v))).collect();
    Ok((fwd, bwd))
}

pub(crate) fn build_lattice<H: LayoutGraph + ?Sized>(
    h: &H,
    symmetry: Symmetry,
    max_states: usize,
) -> Result<(ClassLattice, Vec<u64>, Vec<u64>)> {
    let (fwd, bwd) = masks(h)?;
    let classes = match symmetry {
        Symmetry::Twins => twin_classes(&fwd, &bwd, h.direction() == Direction::Undirected),
        Symmetry::None => (0..h.vertex_count()).map(|v| vec![v]).collect(),
    };
    let states = ClassLattice::state_count(&classes);
    let lattice = ClassLattice::new(classes, max_states).ok_or_else(|| {
        Error::SizeLimit(format!(
            "subset DP needs {states} states, limit is {max_states}"
        ))
    })?;
    Ok((lattice, fwd, bwd))
}

pub(crate) struct DpOutcome {
    pub value: u64,
    pub sequence: Vec<usize>,
}

const INF: u64 = u64::MAX;

/// Generic prefix-set DP. `cost(mask, is_full)` is the contribution of the
/// prefix `mask`; the empty prefix contributes nothing.
pub(crate) fn prefix_dp(
    lattice: &ClassLattice,
    bwd: &[u64],
    agg: Aggregator,
    cost: impl Fn(u64, bool) -> u64,
) -> DpOutcome {
    let full = lattice.full_index();
    let mut f = vec![INF; lattice.size];
    lattice.for_each_state(|index, counts, mask| {
        if index == 0 {
            f[0] = 0;
            return;
        }
        if !is_closed(mask, bwd) {
            return;
        }
        let mut best = INF;
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                best = best.min(f[index - lattice.strides[k]]);
            }
        }
        if best != INF {
            f[index] = agg.combine(best, cost(mask, index == full));
        }
    });

    // Walk back from the full set, choosing the lowest-id last vertex among
    // those consistent with the optimum.
    let mut sequence = Vec::new();
    let mut index = full;
    let mut counts = lattice.counts_of(index);
    while index != 0 {
        let mask = lattice.mask_of(&counts);
        let here = cost(mask, index == full);
        let mut choice: Option<(usize, usize)> = None;
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let prev = f[index - lattice.strides[k]];
            if prev == INF || agg.combine(prev, here) != f[index] {
                continue;
            }
            let v = lattice.classes[k][c - 1];
            if choice.is_none_or(|(_, best_v)| v < best_v) {
                choice = Some((k, v));
            }
        }
        let (k, v) = choice.expect("optimal parent exists");
        sequence.push(v);
        counts[k] -= 1;
        index -= lattice.strides[k];
    }
    sequence.reverse();
    DpOutcome {
        value: f[full],
        sequence,
    }
}

#[inline]
fn is_closed(mask: u64, bwd: &[u64]) -> bool {
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if bwd[v] & !mask != 0 {
            return false;
        }
    }
    true
}

/// Exact optimum by subset DP with twin compression.
pub fn solve_subset_dp<H: LayoutGraph + ?Sized>(
    h: &H,
    spec: ProblemSpec,
    limits: LayoutLimits,
) -> Result<LayoutResult> {
    solve_subset_dp_with(h, spec, limits, Symmetry::Twins)
}

pub fn solve_subset_dp_with<H: LayoutGraph + ?Sized>(
    h: &H,
    spec: ProblemSpec,
    limits: LayoutLimits,
    symmetry: Symmetry,
) -> Result<LayoutResult> {
    check_direction(h, spec)?;
    let (lattice, fwd, bwd) = build_lattice(h, symmetry, limits.dp_max_states)?;
    let out = prefix_dp(&lattice, &bwd, spec.agg, |mask, _| {
        prefix_cost_mask(&fwd, spec.cost, mask)
    });
    Ok(LayoutResult {
        problem: spec,
        value: out.value,
        witness: Ordering::from_sequence(out.sequence)?,
        method: Method::SubsetDp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Dag, UGraph};
    use crate::layout::{evaluate, named_problem, solve_bruteforce};

    fn dp<H: LayoutGraph>(h: &H, name: &str) -> LayoutResult {
        solve_subset_dp(h, named_problem(name).unwrap(), LayoutLimits::default()).unwrap()
    }

    #[test]
    fn small_optima() {
        assert_eq!(dp(&UGraph::complete(3), "mla").value, 4);
        assert_eq!(dp(&UGraph::complete(3), "vertex_separation").value, 2);
        let pyramid2 = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(dp(&pyramid2, "register_sufficiency").value, 2);
    }

    #[test]
    fn twin_compression_agrees_with_plain_lattice() {
        // K_{2,3} plus a pendant: several twin classes.
        let g = UGraph::new(6, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (4, 5)]).unwrap();
        for spec in ProblemSpec::all().into_iter().filter(|s| s.direction == Direction::Undirected) {
            let a = solve_subset_dp_with(&g, spec, LayoutLimits::default(), Symmetry::Twins).unwrap();
            let b = solve_subset_dp_with(&g, spec, LayoutLimits::default(), Symmetry::None).unwrap();
            let c = solve_bruteforce(&g, spec, LayoutLimits::default()).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.value, c.value);
            assert_eq!(evaluate(&g, spec, &a.witness).unwrap(), a.value);
        }
    }

    #[test]
    fn witness_tie_break_is_deterministic() {
        let k3 = UGraph::complete(3);
        let r = dp(&k3, "mcla");
        assert_eq!(r.witness.sequence(), &[0, 1, 2]);
    }

    #[test]
    fn respects_state_limit() {
        let g = UGraph::path(12);
        let limits = LayoutLimits {
            dp_max_states: 1 << 10,
            ..LayoutLimits::default()
        };
        assert!(matches!(
            solve_subset_dp(&g, named_problem("mla").unwrap(), limits),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn dag_witness_is_topological() {
        let d = Dag::new(5, [(3, 0), (3, 1), (0, 2), (1, 2), (4, 2)]).unwrap();
        for spec in ProblemSpec::all().into_iter().filter(|s| s.direction == Direction::Dag) {
            let r = solve_subset_dp(&d, spec, LayoutLimits::default()).unwrap();
            assert!(d.is_feasible(&r.witness));
            assert_eq!(evaluate(&d, spec, &r.witness).unwrap(), r.value);
        }
    }
}

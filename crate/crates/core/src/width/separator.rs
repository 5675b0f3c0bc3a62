use serde::{Deserialize, Serialize};

use super::{treewidth_exact, WidthLimits};
use crate::error::{Error, Result};
use crate::graph::{UGraph, VertexSet};
use crate::lattice::{twin_classes, ClassLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WMode {
    FullVertexSet,
    MaximizeOverW,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorResult {
    pub value: usize,
    pub w: Vec<usize>,
    pub separator: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorBoundReport {
    pub treewidth: usize,
    pub k_half: usize,
    pub holds: bool,
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|v| mask >> v & 1 == 1).collect()
}

/// Component masks of `G[alive]`.
fn components(adj: &[u64], alive: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = alive;
    while rest != 0 {
        let mut comp = rest & rest.wrapping_neg();
        let mut frontier = comp;
        while frontier != 0 {
            let mut nbrs = 0u64;
            let mut f = frontier;
            while f != 0 {
                nbrs |= adj[f.trailing_zeros() as usize];
                f &= f - 1;
            }
            frontier = nbrs & alive & !comp;
            comp |= frontier;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

#[inline]
fn balanced(comps: &[u64], w: u64) -> bool {
    let total = w.count_ones();
    comps.iter().all(|&c| 2 * (c & w).count_ones() <= total)
}

/// Smallest `S` such that every component of `G - S` holds at most half of
/// `W`, searched by increasing size.
pub fn separator_number_for(g: &UGraph, w: &VertexSet) -> Result<SeparatorResult> {
    let n = g.n();
    if n > 24 {
        return Err(Error::SizeLimit(format!("separator search handles at most 24 vertices, got {n}")));
    }
    let wm = w.to_mask().ok_or_else(|| Error::InvalidParameters("W is over a different universe".into()))?;
    if w.universe() != n {
        return Err(Error::InvalidParameters("W is over a different universe".into()));
    }
    let adj = g.neighbor_masks();
    let all = crate::graph::low_bits(n);
    for size in 0..=n {
        let mut found = None;
        for_each_subset_of_size(n, size, |s| {
            if found.is_none() && balanced(&components(&adj, all & !s), wm) {
                found = Some(s);
            }
        });
        if let Some(s) = found {
            return Ok(SeparatorResult {
                value: size,
                w: bits(wm),
                separator: bits(s),
            });
        }
    }
    unreachable!("removing every vertex always balances")
}

fn for_each_subset_of_size(n: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > n {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << n;
    let mut s = (1u64 << k) - 1;
    while s < limit {
        f(s);
        // Gosper's hack.
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

/// The 1/2-separator number, either for `W = V` or maximized over all `W`.
pub fn half_separator_number(g: &UGraph, mode: WMode, limits: WidthLimits) -> Result<SeparatorResult> {
    match mode {
        WMode::FullVertexSet => full_vertex_set(g, limits.separator_max_states),
        WMode::MaximizeOverW => maximize_over_w(g, limits.separator_max_n),
    }
}

/// `W = V` is preserved by every automorphism, so one canonical subset per
/// twin-class count vector suffices.
fn full_vertex_set(g: &UGraph, max_states: usize) -> Result<SeparatorResult> {
    let n = g.n();
    if n > 64 {
        return Err(Error::SizeLimit(format!("separator search handles at most 64 vertices, got {n}")));
    }
    let adj = g.neighbor_masks();
    let all = crate::graph::low_bits(n);
    let classes = twin_classes(&adj, &vec![0; n], true);
    let states = ClassLattice::state_count(&classes);
    let lattice = ClassLattice::new(classes, max_states).ok_or_else(|| {
        Error::SizeLimit(format!("separator search needs {states} states, limit is {max_states}"))
    })?;
    let mut masks = Vec::with_capacity(lattice.size);
    lattice.for_each_state(|_, _, mask| masks.push(mask));
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let s = masks
        .into_iter()
        .find(|&s| balanced(&components(&adj, all & !s), all))
        .expect("removing every vertex always balances");
    Ok(SeparatorResult {
        value: s.count_ones() as usize,
        w: bits(all),
        separator: bits(s),
    })
}

/// Enumerates every `W`. For each one it only needs to know whether some
/// separator no larger than the best so far exists, which settles most `W`
/// quickly.
fn maximize_over_w(g: &UGraph, max_n: usize) -> Result<SeparatorResult> {
    let n = g.n();
    if n > max_n {
        return Err(Error::SizeLimit(format!(
            "maximizing over W handles at most {max_n} vertices, got {n}"
        )));
    }
    let adj = g.neighbor_masks();
    let all = crate::graph::low_bits(n);
    let mut by_size: Vec<Vec<(u64, Vec<u64>)>> = vec![Vec::new(); n + 1];
    for s in 0..=all {
        by_size[s.count_ones() as usize].push((s, components(&adj, all & !s)));
    }
    let mut best = SeparatorResult {
        value: 0,
        w: Vec::new(),
        separator: Vec::new(),
    };
    for w in 1..=all {
        let cheap = by_size[..=best.value]
            .iter()
            .flatten()
            .any(|(_, comps)| balanced(comps, w));
        if cheap {
            continue;
        }
        let (size, s) = (best.value + 1..=n)
            .find_map(|k| {
                by_size[k]
                    .iter()
                    .find(|(_, comps)| balanced(comps, w))
                    .map(|(s, _)| (k, *s))
            })
            .expect("removing every vertex always balances");
        best = SeparatorResult {
            value: size,
            w: bits(w),
            separator: bits(s),
        };
    }
    Ok(best)
}

/// Compares exact treewidth against the separator number maximized over `W`:
/// the bound holds when `tw + 1 >= K`.
pub fn check_separator_bound(g: &UGraph, limits: WidthLimits) -> Result<SeparatorBoundReport> {
    let treewidth = treewidth_exact(g, limits)?.value;
    let k_half = half_separator_number(g, WMode::MaximizeOverW, limits)?.value;
    Ok(SeparatorBoundReport {
        treewidth,
        k_half,
        holds: treewidth + 1 >= k_half,
    })
}

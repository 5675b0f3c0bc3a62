//! Exhaustive search over feasible orderings. Independent of the subset DP
//! and used as its oracle.

use super::{check_direction, CostKind, LayoutLimits, LayoutResult, Method, ProblemSpec};
use crate::error::{Error, Result};
use crate::graph::{Direction, LayoutGraph, Ordering, VertexId};

/// Per-position costs from interval difference arrays: an edge between
/// ranks `a < b` is counted at positions `a..b`; a vertex at rank `a` whose
/// farthest later neighbor sits at rank `b` is counted at positions `a..b`.
fn aggregate_fast<H: LayoutGraph + ?Sized>(
    h: &H,
    spec: ProblemSpec,
    rank: &[usize],
    diff: &mut [i64],
) -> u64 {
    let n = rank.len();
    diff.iter_mut().for_each(|d| *d = 0);
    match spec.cost {
        CostKind::Edge => {
            for &(u, v) in h.edge_pairs() {
                let (a, b) = (rank[u].min(rank[v]), rank[u].max(rank[v]));
                diff[a] += 1;
                diff[b] -= 1;
            }
        }
        CostKind::Vertex => {
            for u in 0..n {
                let far = h
                    .forward(u)
                    .iter()
                    .map(|&w| rank[w])
                    .filter(|&r| r > rank[u])
                    .max();
                if let Some(b) = far {
                    diff[rank[u]] += 1;
                    diff[b] -= 1;
                }
            }
        }
    }
    let mut running = 0i64;
    let mut acc = 0u64;
    for d in diff.iter().take(n) {
        running += d;
        acc = spec.agg.combine(acc, running as u64);
    }
    acc
}

/// Exact optimum by enumerating every feasible ordering in lexicographic
/// order. The witness is the first optimal ordering found.
pub fn solve_bruteforce<H: LayoutGraph + ?Sized>(
    h: &H,
    spec: ProblemSpec,
    limits: LayoutLimits,
) -> Result<LayoutResult> {
    check_direction(h, spec)?;
    let n = h.vertex_count();
    if n > limits.bruteforce_max_n {
        return Err(Error::SizeLimit(format!(
            "brute force handles at most {} vertices, got {n}",
            limits.bruteforce_max_n
        )));
    }
    let mut search = Search {
        h,
        spec,
        seq: Vec::with_capacity(n),
        placed: vec![false; n],
        rank: vec![0; n],
        diff: vec![0; n + 1],
        best: None,
    };
    search.run();
    let (value, seq) = search.best.expect("every graph has a feasible ordering");
    Ok(LayoutResult {
        problem: spec,
        value,
        witness: Ordering::from_sequence(seq)?,
        method: Method::Bruteforce,
    })
}

struct Search<'a, H: ?Sized> {
    h: &'a H,
    spec: ProblemSpec,
    seq: Vec<VertexId>,
    placed: Vec<bool>,
    rank: Vec<usize>,
    diff: Vec<i64>,
    best: Option<(u64, Vec<VertexId>)>,
}

impl<H: LayoutGraph + ?Sized> Search<'_, H> {
    fn run(&mut self) {
        let n = self.placed.len();
        if self.seq.len() == n {
            let value = aggregate_fast(self.h, self.spec, &self.rank, &mut self.diff);
            if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
                self.best = Some((value, self.seq.clone()));
            }
            return;
        }
        for v in 0..n {
            if self.placed[v] {
                continue;
            }
            if self.spec.direction == Direction::Dag
                && self.h.backward(v).iter().any(|&p| !self.placed[p])
            {
                continue;
            }
            self.placed[v] = true;
            self.rank[v] = self.seq.len();
            self.seq.push(v);
            self.run();
            self.seq.pop();
            self.placed[v] = false;
        }
    }
}

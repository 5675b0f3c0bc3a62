//! Instance transforms: Lengauer's graph/DAG translations, pyramids, and
//! the indegree-2 and single-sink reductions.

use super::{validate_strategy, MoveKind, PebbleMode, PebbleStrategy};
use crate::error::{Error, Result};
use crate::graph::{Dag, UGraph};

/// Undirected graph on the DAG's vertices: every arc, plus an edge between
/// any two vertices with a common successor.
pub fn lengauer_to_undirected(d: &Dag) -> UGraph {
    let mut edges: Vec<(usize, usize)> = d.arcs().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    for w in 0..d.n() {
        let preds = d.predecessors(w);
        for (i, &a) in preds.iter().enumerate() {
            for &b in &preds[i + 1..] {
                edges.push((a.min(b), a.max(b)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    UGraph::new(d.n(), edges).expect("edges are simple")
}

/// Bipartite DAG on `V ∪ E`: edge `i` of `g` becomes node `n + i`, with an
/// arc from each of its endpoints.
pub fn lengauer_to_dag(g: &UGraph) -> Dag {
    let n = g.n();
    let arcs = g
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(i, &(u, v))| [(u, n + i), (v, n + i)]);
    Dag::new(n + g.m(), arcs).expect("arcs point from vertices to edges")
}

/// Index of node `j` on layer `layer` of a size-`d` pyramid, layers stored
/// bottom-up.
fn pyramid_index(d: usize, layer: usize, j: usize) -> usize {
    // Layers 0..layer hold d + (d-1) + ... + (d-layer+1) nodes.
    layer * d - layer * (layer.saturating_sub(1)) / 2 + j
}

/// Pyramid of size `d`: layer `l` has `d - l` nodes and node `(l, j)` has
/// predecessors `(l-1, j)` and `(l-1, j+1)`. The apex is the last node.
pub fn build_pyramid(d: usize) -> Result<Dag> {
    if d == 0 {
        return Err(Error::InvalidParameters("pyramid size must be at least 1".into()));
    }
    let mut arcs = Vec::new();
    for layer in 1..d {
        for j in 0..d - layer {
            let node = pyramid_index(d, layer, j);
            arcs.push((pyramid_index(d, layer - 1, j), node));
            arcs.push((pyramid_index(d, layer - 1, j + 1), node));
        }
    }
    Dag::new(d * (d + 1) / 2, arcs)
}

/// Replaces the in-arcs of every vertex `u` of indegree `k >= 3` by a
/// pyramid of size `k` whose inputs are `u`'s predecessors (by increasing
/// id) and whose apex is `u`. New nodes are appended, per vertex in id
/// order, layer by layer.
pub fn indegree2_transform(d: &Dag) -> Dag {
    let mut next = d.n();
    let mut arcs = Vec::new();
    for u in 0..d.n() {
        let preds = d.predecessors(u);
        let k = preds.len();
        if k <= 2 {
            arcs.extend(preds.iter().map(|&p| (p, u)));
            continue;
        }
        let mut layer: Vec<usize> = preds.to_vec();
        for l in 1..k {
            let row: Vec<usize> = if l == k - 1 {
                vec![u]
            } else {
                let row = (next..next + k - l).collect();
                next += k - l;
                row
            };
            for (j, &node) in row.iter().enumerate() {
                arcs.push((layer[j], node));
                arcs.push((layer[j + 1], node));
            }
            layer = row;
        }
    }
    Dag::new(next, arcs).expect("pyramids keep the DAG acyclic")
}

/// Joins the sinks (by increasing id) with a balanced binary tree: sinks are
/// paired left to right, an odd one out is carried up, until one root
/// remains. DAGs with at most one sink are returned unchanged.
pub fn single_sink_transform(d: &Dag) -> Dag {
    let mut level = d.sinks();
    if level.len() <= 1 {
        return d.clone();
    }
    let mut arcs = d.arcs().to_vec();
    let mut next = d.n();
    while level.len() > 1 {
        let mut up = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            if let [a, b] = *pair {
                arcs.push((a, next));
                arcs.push((b, next));
                up.push(next);
                next += 1;
            } else {
                up.push(pair[0]);
            }
        }
        level = up;
    }
    Dag::new(next, arcs).expect("tree nodes are new sinks")
}

/// Whether, up to the first time every source of the size-`d` pyramid has
/// been pebbled, each configuration holds at least as many pebbles as
/// sources pebbled so far. The strategy must be a valid one-shot black
/// strategy of the pyramid.
pub fn frugal_pyramid_check(d: usize, strategy: &PebbleStrategy) -> Result<bool> {
    let pyramid = build_pyramid(d)?;
    let report = validate_strategy(&pyramid, strategy, PebbleMode::Black);
    if !report.valid || !report.one_shot {
        return Err(Error::InvalidStrategy(match report.violation {
            Some(v) => format!("step {}: {}", v.step, v.reason),
            None => "strategy is not one-shot".into(),
        }));
    }
    let mut pebbles = 0usize;
    let mut sources = 0usize;
    for m in &strategy.moves {
        match m.kind {
            MoveKind::Place => {
                pebbles += 1;
                if m.vertex < d {
                    sources += 1;
                }
            }
            MoveKind::Remove => pebbles -= 1,
        }
        if pebbles < sources {
            return Ok(false);
        }
        if sources == d {
            break;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pebbling::{enumerate_one_shot_black, ordering_to_black_strategy};

    #[test]
    fn lengauer_undirected_examples() {
        let star = Dag::new(3, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(lengauer_to_undirected(&star).edges(), &[(0, 1), (0, 2)]);
        let join = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(lengauer_to_undirected(&join).edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(lengauer_to_undirected(&Dag::new(1, []).unwrap()).m(), 0);
    }

    #[test]
    fn lengauer_dag_examples() {
        let k2 = lengauer_to_dag(&UGraph::complete(2));
        assert_eq!((k2.n(), k2.m()), (3, 2));
        assert_eq!(k2.predecessors(2), &[0, 1]);
        let k3 = lengauer_to_dag(&UGraph::complete(3));
        assert_eq!((k3.n(), k3.m()), (6, 6));
        assert_eq!(lengauer_to_dag(&UGraph::empty(4)).m(), 0);
    }

    #[test]
    fn pyramid_shapes() {
        assert_eq!(build_pyramid(1).unwrap().n(), 1);
        let p2 = build_pyramid(2).unwrap();
        assert_eq!((p2.n(), p2.m()), (3, 2));
        let p4 = build_pyramid(4).unwrap();
        assert_eq!(p4.n(), 10);
        assert_eq!(p4.max_indegree(), 2);
        assert_eq!(p4.sinks(), vec![9]);
        assert_eq!(p4.sources(), vec![0, 1, 2, 3]);
        assert_eq!(p4.predecessors(4), &[0, 1]);
        assert_eq!(p4.predecessors(7), &[4, 5]);
        assert!(build_pyramid(0).is_err());
    }

    #[test]
    fn indegree2_examples() {
        let fan = Dag::new(4, [(0, 3), (1, 3), (2, 3)]).unwrap();
        let t = indegree2_transform(&fan);
        assert_eq!(t.n(), 6);
        assert_eq!(t.max_indegree(), 2);
        assert_eq!(t.predecessors(4), &[0, 1]);
        assert_eq!(t.predecessors(5), &[1, 2]);
        assert_eq!(t.predecessors(3), &[4, 5]);

        let small = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(indegree2_transform(&small), small);
        let p4 = build_pyramid(4).unwrap();
        assert_eq!(indegree2_transform(&p4), p4);

        let wide = Dag::new(6, [(0, 5), (1, 5), (2, 5), (3, 5), (4, 5)]).unwrap();
        let t = indegree2_transform(&wide);
        assert_eq!(t.n(), 6 + 15 - 5 - 1);
        assert_eq!(t.max_indegree(), 2);
    }

    #[test]
    fn single_sink_examples() {
        let two = Dag::new(2, []).unwrap();
        let t = single_sink_transform(&two);
        assert_eq!((t.n(), t.m()), (3, 2));
        assert_eq!(t.sinks(), vec![2]);

        let one = Dag::new(2, [(0, 1)]).unwrap();
        assert_eq!(single_sink_transform(&one), one);

        let four = Dag::new(4, []).unwrap();
        let t = single_sink_transform(&four);
        assert_eq!(t.n(), 7);
        assert_eq!(t.sinks(), vec![6]);
        assert_eq!(t.max_indegree(), 2);

        let three = Dag::new(3, []).unwrap();
        assert_eq!(single_sink_transform(&three).n(), 5);
    }

    #[test]
    fn frugal_examples() {
        let order = crate::graph::Ordering::identity(3);
        let s = ordering_to_black_strategy(&build_pyramid(2).unwrap(), &order).unwrap();
        assert!(frugal_pyramid_check(2, &s).unwrap());

        let single = ordering_to_black_strategy(&build_pyramid(1).unwrap(), &crate::graph::Ordering::identity(1)).unwrap();
        assert!(frugal_pyramid_check(1, &single).unwrap());

        for s in enumerate_one_shot_black(&build_pyramid(3).unwrap(), 1 << 20).unwrap() {
            assert!(frugal_pyramid_check(3, &s).unwrap());
        }

        let bogus = PebbleStrategy::new(vec![]);
        assert!(frugal_pyramid_check(2, &bogus).is_err());
    }
}

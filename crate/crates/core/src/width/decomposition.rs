use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::graph::{Ordering, UGraph, VertexId};
use crate::io::{content_lines, parse_num, parse_vertex};

/// A tree on bag indices `0..bags.len()` with a vertex bag per tree node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<VertexId>>,
    pub tree_edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub valid: bool,
    /// Largest bag size minus one (0 when there are no bags).
    pub width: usize,
    pub violation: Option<String>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// A path decomposition with bags listed in path order.
    pub fn path(bags: Vec<Vec<VertexId>>) -> Self {
        let tree_edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
        Self { bags, tree_edges }
    }
}

/// Checks the tree shape and (T1) coverage of vertices, (T2) coverage of
/// edges and (T3) connectivity of each vertex's bags; with `require_path`
/// the tree must also be a path.
pub fn validate_decomposition(
    g: &UGraph,
    td: &TreeDecomposition,
    require_path: bool,
) -> DecompositionReport {
    let width = td.width();
    let fail = |msg: String| DecompositionReport {
        valid: false,
        width,
        violation: Some(msg),
    };
    let k = td.bags.len();
    if let Some(v) = td.bags.iter().flatten().find(|&&v| v >= g.n()) {
        return fail(format!("bag mentions vertex {v} outside the graph"));
    }
    if k == 0 {
        return if g.n() == 0 {
            DecompositionReport {
                valid: true,
                width,
                violation: None,
            }
        } else {
            fail("no bags for a nonempty graph (T1)".into())
        };
    }

    // Tree shape: k - 1 edges and connected.
    let mut tree_adj = vec![Vec::new(); k];
    for &(a, b) in &td.tree_edges {
        if a >= k || b >= k || a == b {
            return fail(format!("invalid tree edge ({a}, {b})"));
        }
        tree_adj[a].push(b);
        tree_adj[b].push(a);
    }
    if td.tree_edges.len() != k - 1 || reachable(&tree_adj, 0, |_| true).iter().filter(|&&r| r).count() != k {
        return fail("bag graph is not a tree".into());
    }
    if require_path && tree_adj.iter().any(|a| a.len() > 2) {
        return fail("bag tree is not a path".into());
    }

    let mut holder = vec![Vec::new(); g.n()];
    for (t, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            holder[v].push(t);
        }
    }
    if let Some(v) = (0..g.n()).find(|&v| holder[v].is_empty()) {
        return fail(format!("vertex {v} is in no bag (T1)"));
    }
    for &(u, v) in g.edges() {
        if !holder[u].iter().any(|t| td.bags[*t].contains(&v)) {
            return fail(format!("edge ({u}, {v}) is in no bag (T2)"));
        }
    }
    for v in 0..g.n() {
        let inside = |t: usize| td.bags[t].contains(&v);
        let seen = reachable(&tree_adj, holder[v][0], inside);
        if holder[v].iter().any(|&t| !seen[t]) {
            return fail(format!("bags containing vertex {v} are not connected (T3)"));
        }
    }
    DecompositionReport {
        valid: true,
        width,
        violation: None,
    }
}

fn reachable(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(t) = queue.pop_front() {
        for &s in &adj[t] {
            if !seen[s] && allowed(s) {
                seen[s] = true;
                queue.push_back(s);
            }
        }
    }
    seen
}

/// Path decomposition induced by a vertex ordering: the bag at rank `i`
/// holds the vertex placed there plus every earlier vertex that still has a
/// neighbor at rank `i` or later. Its width equals the ordering's
/// max-vertex layout cost.
pub fn path_decomposition_from_ordering(g: &UGraph, order: &Ordering) -> TreeDecomposition {
    let bags = (1..=order.len())
        .map(|i| {
            let mut bag: Vec<VertexId> = order.sequence()[..i - 1]
                .iter()
                .copied()
                .filter(|&u| g.neighbors(u).iter().any(|&w| order.rank(w) >= i))
                .collect();
            bag.push(order.vertex_at(i));
            bag.sort_unstable();
            bag
        })
        .collect();
    TreeDecomposition::path(bags)
}

/// Tree decomposition from an elimination order: each vertex's bag is the
/// vertex plus its later neighbors in the filled graph, hung below the
/// earliest-eliminated of those neighbors.
pub fn tree_decomposition_from_elimination(g: &UGraph, order: &Ordering) -> TreeDecomposition {
    let n = g.n();
    let mut adj: Vec<std::collections::BTreeSet<VertexId>> =
        (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut higher = Vec::with_capacity(n);
    for &v in order.sequence() {
        let nbrs: Vec<VertexId> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nbrs {
            adj[a].remove(&v);
        }
        let mut bag = nbrs.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        higher.push(nbrs);
    }
    // Bag i belongs to the i-th eliminated vertex.
    let mut tree_edges = Vec::new();
    let mut roots = Vec::new();
    for (i, nbrs) in higher.iter().enumerate() {
        match nbrs.iter().map(|&w| order.rank(w) - 1).min() {
            Some(parent) => tree_edges.push((i, parent)),
            None => roots.push(i),
        }
    }
    // Components of the graph give separate trees; chain their roots.
    for w in roots.windows(2) {
        tree_edges.push((w[0], w[1]));
    }
    TreeDecomposition { bags, tree_edges }
}

/// Reads a decomposition: `s td <#bags> <width+1> <n>`, `b <id> <v>...`,
/// and tree edges `e <i> <j>` (a bare `<i> <j>` is accepted too). Ids are
/// 1-based.
pub fn parse_decomposition(text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<VertexId>>> = Vec::new();
    let mut tree_edges = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks[0] {
            "s" => {
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(parse_err(line, "header must be `s td <bags> <width+1> <n>`"));
                }
                let k = parse_num(toks[2], line, "bag count")?;
                header = Some((k, parse_num(toks[3], line, "bag size")?, parse_num(toks[4], line, "vertex count")?));
                bags = vec![None; k];
            }
            "b" => {
                let (k, _, n) = header.ok_or_else(|| parse_err(line, "bag before header"))?;
                if toks.len() < 2 {
                    return Err(parse_err(line, "expected `b <id> <v>...`"));
                }
                let id = parse_vertex(toks[1], line, k)?;
                let bag = toks[2..]
                    .iter()
                    .map(|t| parse_vertex(t, line, n))
                    .collect::<Result<Vec<_>>>()?;
                if bags[id].replace(bag).is_some() {
                    return Err(parse_err(line, format!("bag {} listed twice", id + 1)));
                }
            }
            _ => {
                let (k, _, _) = header.ok_or_else(|| parse_err(line, "tree edge before header"))?;
                let ends = if toks[0] == "e" { &toks[1..] } else { &toks[..] };
                if ends.len() != 2 {
                    return Err(parse_err(line, "expected a tree edge `e <i> <j>`"));
                }
                tree_edges.push((parse_vertex(ends[0], line, k)?, parse_vertex(ends[1], line, k)?));
            }
        }
    }
    let (_, declared, n) = header.ok_or_else(|| parse_err(0, "missing `s td` header"))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::InvalidParameters(format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let td = TreeDecomposition { bags, tree_edges };
    let actual = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    if actual != declared {
        return Err(Error::InvalidParameters(format!(
            "header declares largest bag {declared}, found {actual}"
        )));
    }
    Ok((td, n))
}

pub fn write_decomposition(td: &TreeDecomposition, n: usize) -> String {
    let largest = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = format!("s td {} {} {}\n", td.bags.len(), largest, n);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.tree_edges {
        let _ = writeln!(out, "e {} {}", a + 1, b + 1);
    }
    out
}

//! Edge-list and DOT formats.
//!
//! ```text
//! c a comment
//! p ug 3 3
//! e 1 2
//! e 2 3
//! e 1 3
//! ```
//!
//! DAGs use `p dag <n> <m>` and `a <u> <v>` arc lines. Ids are 1-based on
//! disk and 0-based in memory.

use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::graph::{AnyGraph, Dag, UGraph, VertexId};

/// Content lines of a document: `(1-based line number, tokens)`, skipping
/// blanks and `c` comments.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

pub(crate) fn parse_num(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{tok}`")))
}

/// Parses a 1-based vertex id into a 0-based one.
pub(crate) fn parse_vertex(tok: &str, line: usize, n: usize) -> Result<VertexId> {
    let v = parse_num(tok, line, "vertex id")?;
    if v == 0 || v > n {
        return Err(parse_err(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Undirected,
    Dag,
}

/// Parses an edge-list document into a validated graph.
pub fn load_graph(text: &str) -> Result<AnyGraph> {
    let mut header: Option<(Kind, usize, usize)> = None;
    let mut pairs = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(parse_err(line, "duplicate header"));
                }
                if toks.len() != 4 {
                    return Err(parse_err(line, "header must be `p <ug|dag> <n> <m>`"));
                }
                let kind = match toks[1] {
                    "ug" => Kind::Undirected,
                    "dag" => Kind::Dag,
                    other => return Err(parse_err(line, format!("unknown graph kind `{other}`"))),
                };
                let n = parse_num(toks[2], line, "vertex count")?;
                let m = parse_num(toks[3], line, "edge count")?;
                header = Some((kind, n, m));
            }
            tag @ ("e" | "a") => {
                let (kind, n, _) = header.ok_or_else(|| parse_err(line, "edge before header"))?;
                let expected = if kind == Kind::Undirected { "e" } else { "a" };
                if tag != expected {
                    return Err(parse_err(
                        line,
                        format!("`{tag}` line in a graph that uses `{expected}` lines"),
                    ));
                }
                if toks.len() != 3 {
                    return Err(parse_err(line, format!("expected `{tag} <u> <v>`")));
                }
                let u = parse_vertex(toks[1], line, n)?;
                let v = parse_vertex(toks[2], line, n)?;
                pairs.push((u, v));
            }
            other => return Err(parse_err(line, format!("unknown line type `{other}`"))),
        }
    }
    let (kind, n, m) = header.ok_or_else(|| parse_err(0, "missing `p` header"))?;
    if pairs.len() != m {
        return Err(Error::InvalidGraph(format!(
            "header declares {m} edges but {} were listed",
            pairs.len()
        )));
    }
    Ok(match kind {
        Kind::Undirected => AnyGraph::Undirected(UGraph::new(n, pairs)?),
        Kind::Dag => AnyGraph::Dag(Dag::new(n, pairs)?),
    })
}

pub fn load_ugraph(text: &str) -> Result<UGraph> {
    match load_graph(text)? {
        AnyGraph::Undirected(g) => Ok(g),
        AnyGraph::Dag(_) => Err(Error::DirectionMismatch {
            expected: "undirected",
        }),
    }
}

pub fn load_dag(text: &str) -> Result<Dag> {
    match load_graph(text)? {
        AnyGraph::Dag(d) => Ok(d),
        AnyGraph::Undirected(_) => Err(Error::DirectionMismatch { expected: "dag" }),
    }
}

pub fn write_ugraph(g: &UGraph) -> String {
    let mut out = format!("p ug {} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

pub fn write_dag(d: &Dag) -> String {
    let mut out = format!("p dag {} {}\n", d.n(), d.m());
    for &(u, v) in d.arcs() {
        let _ = writeln!(out, "a {} {}", u + 1, v + 1);
    }
    out
}

pub fn write_graph(g: &AnyGraph) -> String {
    match g {
        AnyGraph::Undirected(g) => write_ugraph(g),
        AnyGraph::Dag(d) => write_dag(d),
    }
}

/// Graphviz rendering with vertices labeled by their 1-based id.
pub fn export_dot(g: &AnyGraph) -> String {
    let (keyword, op, n, pairs) = match g {
        AnyGraph::Undirected(g) => ("graph", "--", g.n(), g.edges()),
        AnyGraph::Dag(d) => ("digraph", "->", d.n(), d.arcs()),
    };
    let mut out = format!("{keyword} G {{\n");
    for v in 1..=n {
        let _ = writeln!(out, "  {v};");
    }
    for &(u, v) in pairs {
        let _ = writeln!(out, "  {} {op} {};", u + 1, v + 1);
    }
    out.push_str("}\n");
    out
}

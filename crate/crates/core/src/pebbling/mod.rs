//! Black and black-white pebbling: strategies, validation, one-shot costs,
//! and instance transforms.
//!
//! A strategy is stored as its move list; configurations are replayed from
//! the empty one. Strategy files hold one move per line:
//!
//! ```text
//! pb 1
//! pb 2
//! pb 3
//! rb 1
//! ```
//!
//! `pb`/`rb` place/remove a black pebble, `pw`/`rw` a white one. Ids are
//! 1-based on disk.

mod search;
mod transforms;

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use search::{enumerate_one_shot_black, exhaustive_one_shot, SearchLimits, SearchResult};
pub use transforms::{
    build_pyramid, frugal_pyramid_check, indegree2_transform, lengauer_to_dag,
    lengauer_to_undirected, single_sink_transform,
};

use crate::error::{parse_err, Error, Result};
use crate::graph::{is_topological, Dag, Ordering, VertexId, VertexSet};
use crate::io::{content_lines, parse_vertex};
use crate::layout::dp::{build_lattice, prefix_dp, Symmetry};
use crate::layout::{named_problem, prefix_cost_mask, solve_subset_dp, Aggregator, CostKind, LayoutLimits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Place,
    Remove,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub color: Color,
    pub vertex: VertexId,
}

impl Move {
    pub fn place_black(vertex: VertexId) -> Self {
        Self { kind: MoveKind::Place, color: Color::Black, vertex }
    }
    pub fn remove_black(vertex: VertexId) -> Self {
        Self { kind: MoveKind::Remove, color: Color::Black, vertex }
    }
    pub fn place_white(vertex: VertexId) -> Self {
        Self { kind: MoveKind::Place, color: Color::White, vertex }
    }
    pub fn remove_white(vertex: VertexId) -> Self {
        Self { kind: MoveKind::Remove, color: Color::White, vertex }
    }

    fn code(&self) -> &'static str {
        match (self.kind, self.color) {
            (MoveKind::Place, Color::Black) => "pb",
            (MoveKind::Remove, Color::Black) => "rb",
            (MoveKind::Place, Color::White) => "pw",
            (MoveKind::Remove, Color::White) => "rw",
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code(), self.vertex + 1)
    }
}

/// Black and white pebble sets; always disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebbleConfig {
    pub black: VertexSet,
    pub white: VertexSet,
}

impl PebbleConfig {
    pub fn empty(n: usize) -> Self {
        Self {
            black: VertexSet::empty(n),
            white: VertexSet::empty(n),
        }
    }

    pub fn pebbled(&self, v: VertexId) -> bool {
        self.black.contains(v) || self.white.contains(v)
    }

    pub fn count(&self) -> usize {
        self.black.len() + self.white.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PebbleStrategy {
    pub moves: Vec<Move>,
}

impl PebbleStrategy {
    pub fn new(moves: Vec<Move>) -> Self {
        Self { moves }
    }

    /// Replays the moves from the empty configuration, yielding
    /// `P_0, ..., P_τ`. Only checks that each move changes the
    /// configuration as written, not the pebbling rules.
    pub fn configs(&self, n: usize) -> Result<Vec<PebbleConfig>> {
        let mut cur = PebbleConfig::empty(n);
        let mut out = vec![cur.clone()];
        for (t, m) in self.moves.iter().enumerate() {
            apply_raw(&mut cur, m).map_err(|e| Error::InvalidStrategy(format!("step {}: {e}", t + 1)))?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Recovers the moves from consecutive configurations, each of which
    /// must differ from the previous one in exactly one vertex.
    pub fn from_configs(configs: &[PebbleConfig]) -> Result<Self> {
        let mut moves = Vec::new();
        for (t, pair) in configs.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            let n = a.black.universe();
            let changed: Vec<VertexId> = (0..n)
                .filter(|&v| a.black.contains(v) != b.black.contains(v) || a.white.contains(v) != b.white.contains(v))
                .collect();
            let [v] = changed[..] else {
                return Err(Error::InvalidStrategy(format!(
                    "configurations {t} and {} differ in {} vertices",
                    t + 1,
                    changed.len()
                )));
            };
            let m = match (a.black.contains(v), a.white.contains(v), b.black.contains(v), b.white.contains(v)) {
                (false, false, true, false) => Move::place_black(v),
                (false, false, false, true) => Move::place_white(v),
                (true, false, false, false) => Move::remove_black(v),
                (false, true, false, false) => Move::remove_white(v),
                _ => {
                    return Err(Error::InvalidStrategy(format!(
                        "vertex {v} changes color between configurations {t} and {}",
                        t + 1
                    )))
                }
            };
            moves.push(m);
        }
        Ok(Self { moves })
    }

    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut moves = Vec::new();
        for (line, toks) in content_lines(text) {
            if toks.len() != 2 {
                return Err(parse_err(line, "expected `<pb|rb|pw|rw> <vertex>`"));
            }
            let v = parse_vertex(toks[1], line, n)?;
            moves.push(match toks[0] {
                "pb" => Move::place_black(v),
                "rb" => Move::remove_black(v),
                "pw" => Move::place_white(v),
                "rw" => Move::remove_white(v),
                other => return Err(parse_err(line, format!("unknown move `{other}`"))),
            });
        }
        Ok(Self { moves })
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        for m in &self.moves {
            let _ = writeln!(out, "{m}");
        }
        out
    }
}

fn apply_raw(cur: &mut PebbleConfig, m: &Move) -> std::result::Result<(), String> {
    let v = m.vertex;
    if v >= cur.black.universe() {
        return Err(format!("vertex {v} out of range"));
    }
    match (m.kind, m.color) {
        (MoveKind::Place, _) if cur.pebbled(v) => return Err(format!("vertex {v} already holds a pebble")),
        (MoveKind::Place, Color::Black) => cur.black.insert(v),
        (MoveKind::Place, Color::White) => cur.white.insert(v),
        (MoveKind::Remove, Color::Black) if !cur.black.contains(v) => {
            return Err(format!("no black pebble on vertex {v}"))
        }
        (MoveKind::Remove, Color::White) if !cur.white.contains(v) => {
            return Err(format!("no white pebble on vertex {v}"))
        }
        (MoveKind::Remove, Color::Black) => cur.black.remove(v),
        (MoveKind::Remove, Color::White) => cur.white.remove(v),
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PebbleMode {
    Black,
    BlackWhite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accounting {
    /// Largest pebble count over every configuration.
    Peak,
    /// Pebble count after the eager removals that follow each placement.
    PostCleanup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Index `t` of the first offending configuration `P_t`.
    pub step: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub valid: bool,
    /// Largest `|B_t ∪ W_t|` over the configurations replayed.
    pub cost: usize,
    pub one_shot: bool,
    pub violation: Option<Violation>,
}

/// Replays `strategy` on `d` under the pebbling rules: empty start and end,
/// every sink pebbled at some point, and each move legal. In black mode any
/// white move is a violation.
pub fn validate_strategy(d: &Dag, strategy: &PebbleStrategy, mode: PebbleMode) -> StrategyReport {
    let n = d.n();
    let mut cur = PebbleConfig::empty(n);
    let mut ever = vec![false; n];
    let mut one_shot = true;
    let mut cost = 0;
    let preds_pebbled = |cur: &PebbleConfig, v: VertexId| d.predecessors(v).iter().all(|&p| cur.pebbled(p));
    let mut violation = None;
    for (i, m) in strategy.moves.iter().enumerate() {
        let step = i + 1;
        let v = m.vertex;
        let rule = if v >= n {
            Some(format!("vertex {} out of range", v + 1))
        } else if mode == PebbleMode::Black && m.color == Color::White {
            Some("white pebble in a black strategy".to_string())
        } else {
            match (m.kind, m.color) {
                (MoveKind::Place, _) if cur.pebbled(v) => Some(format!("vertex {} already holds a pebble", v + 1)),
                (MoveKind::Place, Color::Black) if !preds_pebbled(&cur, v) => {
                    Some(format!("black pebble on vertex {} before its predecessors", v + 1))
                }
                (MoveKind::Remove, Color::Black) if !cur.black.contains(v) => {
                    Some(format!("no black pebble on vertex {}", v + 1))
                }
                (MoveKind::Remove, Color::White) if !cur.white.contains(v) => {
                    Some(format!("no white pebble on vertex {}", v + 1))
                }
                (MoveKind::Remove, Color::White) if !preds_pebbled(&cur, v) => {
                    Some(format!("white pebble removed from vertex {} before its predecessors", v + 1))
                }
                _ => None,
            }
        };
        if let Some(reason) = rule {
            violation = Some(Violation { step, reason });
            break;
        }
        if m.kind == MoveKind::Place {
            if ever[v] {
                one_shot = false;
            }
            ever[v] = true;
        }
        apply_raw(&mut cur, m).expect("move checked above");
        cost = cost.max(cur.count());
    }
    if violation.is_none() {
        let tau = strategy.moves.len();
        if cur.count() != 0 {
            violation = Some(Violation { step: tau, reason: "final configuration is not empty".into() });
        } else if let Some(s) = d.sinks().into_iter().find(|&s| !ever[s]) {
            violation = Some(Violation { step: tau, reason: format!("sink {} is never pebbled", s + 1) });
        }
    }
    StrategyReport {
        valid: violation.is_none(),
        cost,
        one_shot,
        violation,
    }
}

/// Pebbles the vertices in the order `π`, removing a pebble as soon as all
/// successors of its vertex have been pebbled (in increasing vertex order).
pub fn ordering_to_black_strategy(d: &Dag, order: &Ordering) -> Result<PebbleStrategy> {
    if order.len() != d.n() {
        return Err(Error::NotAPermutation(d.n()));
    }
    if !is_topological(d, order) {
        let (from, to) = d
            .arcs()
            .iter()
            .copied()
            .find(|&(u, v)| order.rank(u) > order.rank(v))
            .expect("a violated arc exists");
        return Err(Error::NotTopological { from, to });
    }
    let n = d.n();
    let mut done = vec![false; n];
    let mut held = vec![false; n];
    let mut moves = Vec::with_capacity(2 * n);
    for &v in order.sequence() {
        moves.push(Move::place_black(v));
        done[v] = true;
        held[v] = true;
        for u in 0..n {
            if held[u] && d.successors(u).iter().all(|&w| done[w]) {
                held[u] = false;
                moves.push(Move::remove_black(u));
            }
        }
    }
    Ok(PebbleStrategy { moves })
}

/// Pebble count just before each placement after the first, and at the end:
/// entry `i` is the count after the `i`-th placement and the removals that
/// follow it.
pub fn post_cleanup_profile(strategy: &PebbleStrategy) -> Vec<usize> {
    let mut count = 0usize;
    let mut profile = Vec::new();
    for (i, m) in strategy.moves.iter().enumerate() {
        match m.kind {
            MoveKind::Place => {
                if i > 0 {
                    profile.push(count);
                }
                count += 1;
            }
            MoveKind::Remove => count -= 1,
        }
    }
    if !strategy.moves.is_empty() {
        profile.push(count);
    }
    profile
}

/// Optimal one-shot black pebbling cost.
///
/// `PostCleanup` is the max-vertex layout value, at least 1 for a nonempty
/// DAG. `Peak` minimizes the literal configuration maximum over strategies
/// induced by orderings: placing the `i`-th vertex holds `|V_{i-1}| + 1`
/// pebbles.
pub fn one_shot_black_cost(d: &Dag, accounting: Accounting, limits: LayoutLimits) -> Result<u64> {
    if d.n() == 0 {
        return Ok(0);
    }
    match accounting {
        Accounting::PostCleanup => {
            let r = solve_subset_dp(d, named_problem("register_sufficiency")?, limits)?;
            Ok(r.value.max(1))
        }
        Accounting::Peak => {
            let (lattice, fwd, bwd) = build_lattice(d, Symmetry::Twins, limits.dp_max_states)?;
            let out = prefix_dp(&lattice, &bwd, Aggregator::Max, |mask, is_full| {
                if is_full {
                    0
                } else {
                    prefix_cost_mask(&fwd, CostKind::Vertex, mask) + 1
                }
            });
            // The empty prefix precedes the first placement.
            Ok(out.value.max(1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Dag {
        // e -> u, e -> v with e = 0, u = 1, v = 2.
        Dag::new(3, [(0, 1), (0, 2)]).unwrap()
    }

    fn pyramid2() -> Dag {
        Dag::new(3, [(0, 2), (1, 2)]).unwrap()
    }

    fn seq(s: &[usize]) -> Ordering {
        Ordering::from_sequence(s.to_vec()).unwrap()
    }

    #[test]
    fn validate_examples() {
        let single = Dag::new(1, []).unwrap();
        let s = PebbleStrategy::new(vec![Move::place_black(0), Move::remove_black(0)]);
        let r = validate_strategy(&single, &s, PebbleMode::Black);
        assert!(r.valid && r.one_shot);
        assert_eq!(r.cost, 1);

        let early = PebbleStrategy::new(vec![Move::place_black(1)]);
        let r = validate_strategy(&star(), &early, PebbleMode::Black);
        assert!(!r.valid);
        assert_eq!(r.violation.unwrap().step, 1);

        let p = PebbleStrategy::new(vec![
            Move::place_black(0),
            Move::place_black(1),
            Move::place_black(2),
            Move::remove_black(0),
            Move::remove_black(1),
            Move::remove_black(2),
        ]);
        let r = validate_strategy(&pyramid2(), &p, PebbleMode::Black);
        assert!(r.valid && r.one_shot);
        assert_eq!(r.cost, 3);
    }

    #[test]
    fn validate_rules_and_end_conditions() {
        let d = pyramid2();
        let white = PebbleStrategy::new(vec![
            Move::place_white(0),
            Move::place_black(1),
            Move::place_black(2),
            Move::remove_black(2),
            Move::remove_black(1),
            Move::remove_white(0),
        ]);
        assert!(validate_strategy(&d, &white, PebbleMode::BlackWhite).valid);
        let r = validate_strategy(&d, &white, PebbleMode::Black);
        assert_eq!(r.violation.unwrap().step, 1);

        // White removal needs the predecessors pebbled.
        let bad = PebbleStrategy::new(vec![Move::place_white(2), Move::remove_white(2)]);
        assert_eq!(validate_strategy(&d, &bad, PebbleMode::BlackWhite).violation.unwrap().step, 2);

        let unfinished = PebbleStrategy::new(vec![Move::place_black(0)]);
        let r = validate_strategy(&d, &unfinished, PebbleMode::Black);
        assert!(r.violation.unwrap().reason.contains("not empty"));

        let no_sink = PebbleStrategy::new(vec![Move::place_black(0), Move::remove_black(0)]);
        let r = validate_strategy(&d, &no_sink, PebbleMode::Black);
        assert!(r.violation.unwrap().reason.contains("never pebbled"));

        let twice = PebbleStrategy::new(vec![
            Move::place_black(0),
            Move::remove_black(0),
            Move::place_black(0),
            Move::place_black(1),
            Move::place_black(2),
            Move::remove_black(0),
            Move::remove_black(1),
            Move::remove_black(2),
        ]);
        let r = validate_strategy(&d, &twice, PebbleMode::Black);
        assert!(r.valid && !r.one_shot);
    }

    #[test]
    fn ordering_strategy_examples() {
        let s = ordering_to_black_strategy(&star(), &seq(&[0, 1, 2])).unwrap();
        let r = validate_strategy(&star(), &s, PebbleMode::Black);
        assert!(r.valid && r.one_shot);
        assert_eq!(r.cost, 2);
        assert_eq!(post_cleanup_profile(&s), vec![1, 1, 0]);

        let s = ordering_to_black_strategy(&pyramid2(), &seq(&[0, 1, 2])).unwrap();
        assert_eq!(validate_strategy(&pyramid2(), &s, PebbleMode::Black).cost, 3);
        assert_eq!(post_cleanup_profile(&s), vec![1, 2, 0]);

        let single = Dag::new(1, []).unwrap();
        let s = ordering_to_black_strategy(&single, &seq(&[0])).unwrap();
        assert_eq!(validate_strategy(&single, &s, PebbleMode::Black).cost, 1);

        assert!(matches!(
            ordering_to_black_strategy(&pyramid2(), &seq(&[2, 0, 1])),
            Err(Error::NotTopological { .. })
        ));
    }

    #[test]
    fn one_shot_cost_examples() {
        let l = LayoutLimits::default();
        assert_eq!(one_shot_black_cost(&pyramid2(), Accounting::PostCleanup, l).unwrap(), 2);
        assert_eq!(one_shot_black_cost(&pyramid2(), Accounting::Peak, l).unwrap(), 3);
        let arc = Dag::new(2, [(0, 1)]).unwrap();
        assert_eq!(one_shot_black_cost(&arc, Accounting::PostCleanup, l).unwrap(), 1);
        assert_eq!(one_shot_black_cost(&arc, Accounting::Peak, l).unwrap(), 2);
        let single = Dag::new(1, []).unwrap();
        assert_eq!(one_shot_black_cost(&single, Accounting::PostCleanup, l).unwrap(), 1);
        assert_eq!(one_shot_black_cost(&single, Accounting::Peak, l).unwrap(), 1);
    }

    #[test]
    fn file_and_config_round_trips() {
        let s = ordering_to_black_strategy(&pyramid2(), &seq(&[1, 0, 2])).unwrap();
        let text = s.write();
        assert!(text.starts_with("pb 2\npb 1\npb 3\n"));
        assert_eq!(PebbleStrategy::parse(&text, 3).unwrap(), s);
        assert!(PebbleStrategy::parse("pb 4\n", 3).is_err());
        assert!(PebbleStrategy::parse("xx 1\n", 3).is_err());

        let configs = s.configs(3).unwrap();
        assert_eq!(configs.len(), s.moves.len() + 1);
        assert_eq!(configs.last().unwrap().count(), 0);
        assert_eq!(PebbleStrategy::from_configs(&configs).unwrap(), s);
    }
}

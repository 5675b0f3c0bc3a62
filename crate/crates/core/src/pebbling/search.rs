//! Exhaustive search over one-shot strategies.
//!
//! A one-shot state records, per vertex, whether it is untouched, holds a
//! black or white pebble, or is finished. The search only branches on
//! placements; everything else is forced by these normal-form rules:
//!
//! - a source never gets a white pebble (a black one does the same job);
//! - a sink is pebbled black and cleared in one go;
//! - a pebble is removed as soon as no successor needs it any more, a white
//!   one once its predecessors are also pebbled.
//!
//! Minimizing the peak is then a bottleneck shortest-path problem.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Move, PebbleMode, PebbleStrategy};
use crate::error::{Error, Result};
use crate::graph::Dag;

const NONE: u64 = 0;
const BLACK: u64 = 1;
const WHITE: u64 = 2;
const DONE: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_states: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { max_states: 1 << 22 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub cost: usize,
    pub states: usize,
    #[serde(skip)]
    pub strategy: PebbleStrategy,
}

pub(crate) struct Packed {
    pub n: usize,
    pub preds: Vec<u64>,
    pub succs: Vec<u64>,
}

impl Packed {
    pub fn new(d: &Dag) -> Result<Self> {
        if d.n() > 32 {
            return Err(Error::SizeLimit(format!(
                "exhaustive pebbling search handles at most 32 vertices, got {}",
                d.n()
            )));
        }
        Ok(Self {
            n: d.n(),
            preds: d.predecessor_masks(),
            succs: d.successor_masks(),
        })
    }

    #[inline]
    pub fn status(state: u64, v: usize) -> u64 {
        state >> (2 * v) & 3
    }

    #[inline]
    pub fn with(state: u64, v: usize, s: u64) -> u64 {
        state & !(3 << (2 * v)) | s << (2 * v)
    }

    /// Masks of vertices that hold a pebble and of those whose pebble is no
    /// longer needed by successors (black placed, or finished).
    #[inline]
    pub fn masks(&self, state: u64) -> (u64, u64) {
        let mut pebbled = 0u64;
        let mut passed = 0u64;
        for v in 0..self.n {
            match Self::status(state, v) {
                BLACK => {
                    pebbled |= 1 << v;
                    passed |= 1 << v;
                }
                WHITE => pebbled |= 1 << v,
                DONE => passed |= 1 << v,
                _ => {}
            }
        }
        (pebbled, passed)
    }
}

/// Applies a placement and the forced removals. Returns the new state, the
/// configuration peak reached on the way, and the moves performed.
fn apply(p: &Packed, state: u64, v: usize, color: u64, moves: Option<&mut Vec<Move>>) -> (u64, usize) {
    let (pebbled, _) = p.masks(state);
    let peak = pebbled.count_ones() as usize + 1;
    let mut log = Vec::new();
    let mut s;
    if color == BLACK && p.succs[v] == 0 {
        log.push(Move::place_black(v));
        log.push(Move::remove_black(v));
        s = Packed::with(state, v, DONE);
    } else {
        log.push(if color == BLACK { Move::place_black(v) } else { Move::place_white(v) });
        s = Packed::with(state, v, color);
    }
    loop {
        let (pebbled, passed) = p.masks(s);
        let removable = (0..p.n).find(|&u| match Packed::status(s, u) {
            BLACK => p.succs[u] & !passed == 0,
            WHITE => p.succs[u] & !passed == 0 && p.preds[u] & !pebbled == 0,
            _ => false,
        });
        let Some(u) = removable else { break };
        log.push(if Packed::status(s, u) == BLACK { Move::remove_black(u) } else { Move::remove_white(u) });
        s = Packed::with(s, u, DONE);
    }
    if let Some(m) = moves {
        m.extend(log);
    }
    (s, peak)
}

/// Minimum cost of a one-shot black (or black-white) strategy, with a
/// strategy achieving it.
pub fn exhaustive_one_shot(d: &Dag, mode: PebbleMode, limits: SearchLimits) -> Result<SearchResult> {
    let p = Packed::new(d)?;
    let n = p.n;
    let goal: u64 = (0..n).fold(0, |g, v| g | DONE << (2 * v));
    let mut best: HashMap<u64, (usize, u64, usize, u64)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(0, (0, 0, usize::MAX, NONE));
    heap.push(Reverse((0usize, 0u64)));
    while let Some(Reverse((cost, state))) = heap.pop() {
        if best[&state].0 < cost {
            continue;
        }
        if state == goal {
            return Ok(SearchResult {
                cost,
                states: best.len(),
                strategy: rebuild(&p, &best, goal),
            });
        }
        let (pebbled, _) = p.masks(state);
        for v in 0..n {
            if Packed::status(state, v) != NONE {
                continue;
            }
            let mut colors = Vec::with_capacity(2);
            if p.preds[v] & !pebbled == 0 {
                colors.push(BLACK);
            }
            if mode == PebbleMode::BlackWhite && p.preds[v] != 0 && p.succs[v] != 0 {
                colors.push(WHITE);
            }
            for color in colors {
                let (next, peak) = apply(&p, state, v, color, None);
                let c = cost.max(peak);
                if best.get(&next).is_none_or(|e| c < e.0) {
                    best.insert(next, (c, state, v, color));
                    heap.push(Reverse((c, next)));
                    if best.len() > limits.max_states {
                        return Err(Error::SizeLimit(format!(
                            "pebbling search exceeded {} states",
                            limits.max_states
                        )));
                    }
                }
            }
        }
    }
    unreachable!("pebbling every vertex black in topological order reaches the goal")
}

fn rebuild(p: &Packed, best: &HashMap<u64, (usize, u64, usize, u64)>, goal: u64) -> PebbleStrategy {
    let mut steps = Vec::new();
    let mut s = goal;
    while s != 0 {
        let (_, parent, v, color) = best[&s];
        steps.push((parent, v, color));
        s = parent;
    }
    let mut moves = Vec::new();
    for (parent, v, color) in steps.into_iter().rev() {
        apply(p, parent, v, color, Some(&mut moves));
    }
    PebbleStrategy { moves }
}

/// Every valid one-shot black strategy of `d`, in lexicographic move order.
/// Fails when there are more than `max_strategies`.
pub fn enumerate_one_shot_black(d: &Dag, max_strategies: usize) -> Result<Vec<PebbleStrategy>> {
    let p = Packed::new(d)?;
    let sinks: u64 = (0..p.n).filter(|&v| p.succs[v] == 0).fold(0, |m, v| m | 1 << v);
    let mut alive: HashMap<u64, bool> = HashMap::new();
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(&p, sinks, 0, &mut path, &mut out, &mut alive, max_strategies)?;
    Ok(out)
}

/// States here only use `NONE`, `BLACK` and `DONE`. The end state is any
/// pebble-free state in which every sink is done.
fn walk(
    p: &Packed,
    sinks: u64,
    state: u64,
    path: &mut Vec<Move>,
    out: &mut Vec<PebbleStrategy>,
    alive: &mut HashMap<u64, bool>,
    cap: usize,
) -> Result<bool> {
    if let Some(false) = alive.get(&state) {
        return Ok(false);
    }
    let (pebbled, passed) = p.masks(state);
    let done = passed & !pebbled;
    let mut any = false;
    if pebbled == 0 && done & sinks == sinks && (!path.is_empty() || p.n == 0) {
        if out.len() == cap {
            return Err(Error::SizeLimit(format!("more than {cap} strategies")));
        }
        out.push(PebbleStrategy { moves: path.clone() });
        any = true;
    }
    for v in 0..p.n {
        let (m, next) = match Packed::status(state, v) {
            NONE if p.preds[v] & !pebbled == 0 => (Move::place_black(v), Packed::with(state, v, BLACK)),
            BLACK => (Move::remove_black(v), Packed::with(state, v, DONE)),
            _ => continue,
        };
        path.push(m);
        any |= walk(p, sinks, next, path, out, alive, cap)?;
        path.pop();
    }
    alive.insert(state, any);
    Ok(any)
}

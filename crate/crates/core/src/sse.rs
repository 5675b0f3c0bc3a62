//! Small-set-expansion style instances and Gaussian noise stability.
//!
//! Planted instances are regular graphs with a partition into equal blocks
//! that barely expand. Partitions are stored next to the edge list as
//!
//! ```text
//! partition 2
//! block 1 1 2 3 4
//! block 2 5 6 7 8
//! ```

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{parse_err, Error, Result};
use crate::graph::{cut_edges, expansion, Ordering, UGraph, VertexId, VertexSet};
use crate::io::{content_lines, parse_num, parse_vertex};

const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedInstance {
    pub graph: UGraph,
    pub blocks: Vec<Vec<VertexId>>,
    pub d: usize,
    /// Edges joining different blocks.
    pub cross_edges: usize,
    /// Largest block expansion, exactly.
    pub max_phi: Ratio<u64>,
    /// Smallest `ε` with every block expansion at most `2ε`.
    pub epsilon: f64,
    pub seed: u64,
}

/// Simple `d`-regular graph on `n` vertices by the pairing model, retried
/// until no loops or multi-edges appear. Dense degrees complement a sparse
/// `(n-1-d)`-regular graph.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<UGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_regular(n, d, &mut rng)
}

fn random_regular<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<UGraph> {
    if n == 0 || d >= n || (n * d) % 2 == 1 {
        return Err(Error::InvalidParameters(format!(
            "no simple {d}-regular graph on {n} vertices (need d < n and n·d even)"
        )));
    }
    if 2 * d > n - 1 {
        let sparse = random_regular(n, n - 1 - d, rng)?;
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !sparse.has_edge(u, v));
        return UGraph::new(n, edges);
    }
    let mut points: Vec<VertexId> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        points.shuffle(rng);
        let mut seen = HashSet::new();
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return UGraph::new(n, seen);
    }
    Err(Error::RetriesExhausted {
        attempts: MAX_ATTEMPTS,
        reason: format!("pairing model kept producing non-simple {d}-regular graphs on {n} vertices"),
    })
}

/// `q` random `d`-regular blocks of `block_size` vertices (block `k` holds
/// vertices `k·block_size ..`), then `cross_edges / 2` swaps, each replacing
/// an edge inside one block and an edge inside another by two edges across.
pub fn gen_planted(q: usize, block_size: usize, d: usize, cross_edges: usize, seed: u64) -> Result<PlantedInstance> {
    if q == 0 || d == 0 {
        return Err(Error::InvalidParameters("need at least one block and degree at least 1".into()));
    }
    if cross_edges % 2 == 1 {
        return Err(Error::InvalidParameters("each swap adds two cross edges, so the count must be even".into()));
    }
    if cross_edges > 0 && q < 2 {
        return Err(Error::InvalidParameters("cross edges need at least two blocks".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = q * block_size;
    let blocks: Vec<Vec<VertexId>> = (0..q).map(|k| (k * block_size..(k + 1) * block_size).collect()).collect();
    let block_of = |v: VertexId| v / block_size;

    for _ in 0..MAX_ATTEMPTS {
        let mut edges: HashSet<(VertexId, VertexId)> = HashSet::new();
        for k in 0..q {
            let g = random_regular(block_size, d, &mut rng)?;
            let off = k * block_size;
            edges.extend(g.edges().iter().map(|&(u, v)| (u + off, v + off)));
        }
        let mut swaps = 0;
        let mut stalls = 0;
        while 2 * swaps < cross_edges && stalls < MAX_ATTEMPTS {
            let mut intra: Vec<(VertexId, VertexId)> =
                edges.iter().copied().filter(|&(u, v)| block_of(u) == block_of(v)).collect();
            intra.sort_unstable();
            let (Some(&(a, b)), Some(&(c, e))) = (intra.choose(&mut rng), intra.choose(&mut rng)) else {
                break;
            };
            let key = |x: VertexId, y: VertexId| (x.min(y), x.max(y));
            if block_of(a) == block_of(c) || edges.contains(&key(a, c)) || edges.contains(&key(b, e)) {
                stalls += 1;
                continue;
            }
            edges.remove(&(a, b));
            edges.remove(&(c, e));
            edges.insert(key(a, c));
            edges.insert(key(b, e));
            swaps += 1;
        }
        if 2 * swaps < cross_edges {
            continue;
        }
        let graph = UGraph::new(n, edges)?;
        let mut max_phi = Ratio::from_integer(0u64);
        for b in &blocks {
            max_phi = max_phi.max(expansion(&graph, &VertexSet::from_vertices(n, b.iter().copied())?)?);
        }
        let epsilon = *max_phi.numer() as f64 / *max_phi.denom() as f64 / 2.0;
        return Ok(PlantedInstance {
            graph,
            blocks,
            d,
            cross_edges,
            max_phi,
            epsilon,
            seed,
        });
    }
    Err(Error::RetriesExhausted {
        attempts: MAX_ATTEMPTS,
        reason: format!("could not place {cross_edges} cross edges between {q} blocks of size {block_size}"),
    })
}

/// Blocks in order, each by increasing id.
pub fn block_ordering(inst: &PlantedInstance) -> Ordering {
    let seq = inst
        .blocks
        .iter()
        .flat_map(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b
        })
        .collect();
    Ordering::from_sequence(seq).expect("blocks partition the vertices")
}

/// Edges with both ends in block `k`.
pub fn intra_edges(g: &UGraph, block: &[VertexId]) -> usize {
    let inside: HashSet<VertexId> = block.iter().copied().collect();
    g.edges().iter().filter(|(u, v)| inside.contains(u) && inside.contains(v)).count()
}

/// Edges whose ends lie in different blocks.
pub fn count_cross_edges(g: &UGraph, blocks: &[Vec<VertexId>]) -> Result<usize> {
    let mut twice = 0;
    for b in blocks {
        twice += cut_edges(g, &VertexSet::from_vertices(g.n(), b.iter().copied())?)?;
    }
    Ok(twice / 2)
}

pub fn write_partition(blocks: &[Vec<VertexId>]) -> String {
    let mut out = format!("partition {}\n", blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let _ = write!(out, "block {}", i + 1);
        for v in b {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out
}

/// Parses a partition of `0..n` into blocks, which must be disjoint and
/// cover every vertex.
pub fn parse_partition(text: &str, n: usize) -> Result<Vec<Vec<VertexId>>> {
    let mut q = None;
    let mut blocks: Vec<Option<Vec<VertexId>>> = Vec::new();
    let mut owner = vec![false; n];
    for (line, toks) in content_lines(text) {
        match toks[0] {
            "partition" if toks.len() == 2 => {
                let k = parse_num(toks[1], line, "block count")?;
                q = Some(k);
                blocks = vec![None; k];
            }
            "block" if toks.len() >= 2 => {
                let k = q.ok_or_else(|| parse_err(line, "block before `partition` header"))?;
                let id = parse_vertex(toks[1], line, k)?;
                let mut members = Vec::new();
                for t in &toks[2..] {
                    let v = parse_vertex(t, line, n)?;
                    if std::mem::replace(&mut owner[v], true) {
                        return Err(parse_err(line, format!("vertex {} is in two blocks", v + 1)));
                    }
                    members.push(v);
                }
                if blocks[id].replace(members).is_some() {
                    return Err(parse_err(line, format!("block {} listed twice", id + 1)));
                }
            }
            _ => return Err(parse_err(line, "expected `partition <q>` or `block <i> <v>...`")),
        }
    }
    if q.is_none() {
        return Err(parse_err(0, "missing `partition` header"));
    }
    if let Some(v) = owner.iter().position(|&o| !o) {
        return Err(Error::InvalidParameters(format!("vertex {} is in no block", v + 1)));
    }
    blocks
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::InvalidParameters(format!("block {} missing", i + 1))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseStabilityQuery {
    pub rho: f64,
    pub mu: f64,
}

impl NoiseStabilityQuery {
    pub fn new(rho: f64, mu: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) || !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParameters(format!(
                "need rho in [-1, 1] and mu in [0, 1], got rho={rho}, mu={mu}"
            )));
        }
        Ok(Self { rho, mu })
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// `Γ_ρ(μ) = Pr[X ≤ t ∧ Y ≤ t]` with `t = Φ⁻¹(μ)` and `corr(X, Y) = ρ`,
/// computed from Plackett's identity
/// `Γ_ρ(μ) = μ² + (1/2π) ∫_0^{asin ρ} exp(-t² / (1 + sin θ)) dθ`.
pub fn gamma_rho(q: NoiseStabilityQuery) -> f64 {
    let NoiseStabilityQuery { rho, mu } = q;
    if mu <= 0.0 {
        return 0.0;
    }
    if mu >= 1.0 {
        return 1.0;
    }
    if rho >= 1.0 {
        return mu;
    }
    if rho <= -1.0 {
        return (2.0 * mu - 1.0).max(0.0);
    }
    let normal = std_normal();
    let t = normal.inverse_cdf(mu);
    let base = mu * mu;
    let f = |theta: f64| (-t * t / (1.0 + theta.sin())).exp();
    base + adaptive_simpson(&f, 0.0, rho.asin(), 1e-13, 50) / (2.0 * PI)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let m = (a + b) / 2.0;
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFactReport {
    /// Largest `c` with `Γ_{1-ε}(μ) ≤ μ(1 - c√ε)` at every grid point.
    pub c_witness: f64,
    pub worst_eps: f64,
    pub worst_mu: f64,
    pub holds: bool,
}

/// Log-spaced `ε` from 1e-4 to 1e-1 and `μ` from 0.1 to 0.5 in steps of
/// 0.05.
pub fn default_gamma_grids() -> (Vec<f64>, Vec<f64>) {
    let eps = (0..=12).map(|i| 10f64.powf(-4.0 + 3.0 * i as f64 / 12.0)).collect();
    let mu = (0..=8).map(|i| 0.1 + 0.05 * i as f64).collect();
    (eps, mu)
}

pub fn check_gamma_fact(eps_grid: &[f64], mu_grid: &[f64]) -> Result<GammaFactReport> {
    let mut best: Option<GammaFactReport> = None;
    for &eps in eps_grid {
        for &mu in mu_grid {
            let q = NoiseStabilityQuery::new(1.0 - eps, mu)?;
            if eps <= 0.0 || mu <= 0.0 {
                return Err(Error::InvalidParameters("grid values must be positive".into()));
            }
            let c = (1.0 - gamma_rho(q) / mu) / eps.sqrt();
            if best.as_ref().is_none_or(|b| c < b.c_witness) {
                best = Some(GammaFactReport {
                    c_witness: c,
                    worst_eps: eps,
                    worst_mu: mu,
                    holds: c > 0.0,
                });
            }
        }
    }
    best.ok_or_else(|| Error::InvalidParameters("empty grid".into()))
}

/// No-case expansion bound `1 - (Γ_{1-ε/2}(μ) + γ) / μ`.
pub fn no_case_bound(eps: f64, gamma: f64, mu: f64) -> Result<f64> {
    if mu <= 0.0 {
        return Err(Error::InvalidParameters("mu must be positive".into()));
    }
    if !(0.0..=4.0).contains(&eps) {
        return Err(Error::InvalidParameters(format!("eps must lie in [0, 4], got {eps}")));
    }
    let q = NoiseStabilityQuery::new(1.0 - eps / 2.0, mu)?;
    Ok(1.0 - (gamma_rho(q) + gamma) / mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{evaluate, named_problem};

    /// `Pr[X ≤ t, Y ≤ t]` by conditioning on `X`, integrated with a fine
    /// composite Simpson rule.
    fn gamma_oracle(rho: f64, mu: f64) -> f64 {
        let normal = std_normal();
        let t = normal.inverse_cdf(mu);
        let s = (1.0 - rho * rho).sqrt();
        let f = |x: f64| (-x * x / 2.0).exp() / (2.0 * PI).sqrt() * normal.cdf((t - rho * x) / s);
        let (a, b, k) = (-12.0, t, 200_000);
        let h = (b - a) / k as f64;
        let mut sum = f(a) + f(b);
        for i in 1..k {
            sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    }

    fn g(rho: f64, mu: f64) -> f64 {
        gamma_rho(NoiseStabilityQuery::new(rho, mu).unwrap())
    }

    #[test]
    fn gamma_examples() {
        assert!((g(0.0, 0.5) - 0.25).abs() < 1e-12);
        assert!((g(1.0, 0.3) - 0.3).abs() < 1e-12);
        assert!((g(0.5, 0.5) - 1.0 / 3.0).abs() < 1e-10);
        assert_eq!(g(-1.0, 0.3), 0.0);
        assert!((g(-1.0, 0.7) - 0.4).abs() < 1e-12);
        assert_eq!(g(0.4, 0.0), 0.0);
        assert_eq!(g(0.4, 1.0), 1.0);
    }

    #[test]
    fn gamma_matches_conditional_integral() {
        for &rho in &[-0.9, -0.5, 0.0, 0.3, 0.7, 0.95, 0.999] {
            for &mu in &[0.05, 0.1, 0.3, 0.5, 0.8] {
                let (a, b) = (g(rho, mu), gamma_oracle(rho, mu));
                assert!((a - b).abs() < 1e-8, "rho={rho} mu={mu}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gamma_arcsine_identity_and_bounds() {
        for i in 0..=40 {
            let rho = -1.0 + i as f64 * 0.05;
            let expected = 0.25 + rho.clamp(-1.0, 1.0).asin() / (2.0 * PI);
            assert!((g(rho.clamp(-1.0, 1.0), 0.5) - expected).abs() < 1e-9);
        }
        for i in 0..=10 {
            let rho = i as f64 / 10.0;
            for j in 1..10 {
                let mu = j as f64 / 10.0;
                let v = g(rho, mu);
                assert!(mu * mu - 1e-12 <= v && v <= mu + 1e-12, "rho={rho} mu={mu} v={v}");
                if i > 0 {
                    assert!(g(rho - 0.1, mu) <= v + 1e-12);
                }
                assert!(g(rho, mu - 0.1 + 1e-9) <= v + 1e-12);
            }
        }
    }

    #[test]
    fn gamma_fact_and_no_case() {
        let (eps, mu) = default_gamma_grids();
        let r = check_gamma_fact(&eps, &mu).unwrap();
        assert!(r.holds && r.c_witness > 0.0);
        assert!(g(0.99, 0.5) < 0.5);
        assert!(no_case_bound(0.0, 0.0, 0.5).unwrap().abs() < 1e-12);
        let gap = 0.5 - g(1.0 - 0.01, 0.5);
        assert!(no_case_bound(0.02, gap, 0.5).unwrap().abs() < 1e-12);
        assert!(no_case_bound(0.02, 0.02f64.sqrt() / 10.0, 0.5).unwrap() > 0.0);
        assert!(no_case_bound(0.02, 0.0, 0.0).is_err());
    }

    #[test]
    fn random_regular_examples() {
        let c = gen_random_regular(6, 2, 1).unwrap();
        assert_eq!(c.regular_degree(), Some(2));
        let k4 = gen_random_regular(4, 3, 1).unwrap();
        assert_eq!(k4.m(), 6);
        assert!(gen_random_regular(3, 3, 1).is_err());
        assert!(gen_random_regular(5, 3, 1).is_err());
        assert_eq!(gen_random_regular(10, 4, 9).unwrap(), gen_random_regular(10, 4, 9).unwrap());
        for (n, d) in [(8, 5), (8, 6), (9, 6), (12, 9), (5, 4)] {
            assert_eq!(gen_random_regular(n, d, 2).unwrap().regular_degree(), Some(d));
        }
    }

    #[test]
    fn planted_examples() {
        let p = gen_planted(2, 4, 3, 2, 7).unwrap();
        assert_eq!(p.graph.n(), 8);
        assert_eq!(p.graph.regular_degree(), Some(3));
        assert_eq!(p.cross_edges, 2);
        assert_eq!(count_cross_edges(&p.graph, &p.blocks).unwrap(), 2);
        // Each block loses one internal edge to two cross edges: Φ = 2/12.
        assert_eq!(p.max_phi, Ratio::new(1, 6));

        let single = gen_planted(1, 8, 3, 0, 3).unwrap();
        assert_eq!(single.max_phi, Ratio::from_integer(0));
        assert_eq!(single.graph.regular_degree(), Some(3));

        let split = gen_planted(2, 6, 2, 0, 3).unwrap();
        assert_eq!(count_cross_edges(&split.graph, &split.blocks).unwrap(), 0);
        assert_eq!(split.max_phi, Ratio::from_integer(0));

        assert!(gen_planted(2, 4, 3, 3, 1).is_err());
        assert!(gen_planted(1, 4, 3, 2, 1).is_err());
        assert!(gen_planted(2, 4, 1, 40, 1).is_err());
    }

    #[test]
    fn block_ordering_bound() {
        let p = gen_planted(4, 6, 3, 6, 11).unwrap();
        let order = block_ordering(&p);
        assert_eq!(order.sequence(), &(0..24).collect::<Vec<_>>()[..]);
        let cost = evaluate(&p.graph, named_problem("mcla").unwrap(), &order).unwrap() as usize;
        let densest = p.blocks.iter().map(|b| intra_edges(&p.graph, b)).max().unwrap();
        assert!(cost <= densest + p.cross_edges);
    }

    #[test]
    fn partition_round_trip() {
        let blocks = vec![vec![0, 1], vec![2, 3]];
        let text = write_partition(&blocks);
        assert_eq!(text, "partition 2\nblock 1 1 2\nblock 2 3 4\n");
        assert_eq!(parse_partition(&text, 4).unwrap(), blocks);
        assert!(parse_partition("partition 1\nblock 1 1 2\n", 3).is_err());
        assert!(parse_partition("partition 2\nblock 1 1 2\nblock 2 2 3\n", 3).is_err());
    }
}

//! Acceptance criteria 1-10, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pebblewidth_core::enumerate::{
    all_graphs, connected_dags, connected_graphs, random_connected_graph, random_dag,
};
use pebblewidth_core::layout::{evaluate, named_problem, solve_bruteforce, solve_subset_dp, LayoutLimits};
use pebblewidth_core::sse::{block_ordering, count_cross_edges, gen_planted, intra_edges};
use pebblewidth_core::suites::{run_suite, Corpus, SuiteReport, Suite};
use pebblewidth_core::width::{
    path_decomposition_from_ordering, pathwidth_exact, tree_decomposition_from_elimination, treewidth_exact,
    validate_decomposition, WidthLimits,
};
use pebblewidth_core::{expansion, Direction, Ordering, ProblemSpec, UGraph, VertexSet};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "solver oracle equivalence", budget: secs(60), run: solver_oracle },
    Criterion { id: 2, name: "width identities", budget: secs(120), run: width_identities },
    Criterion { id: 3, name: "separator bound", budget: secs(120), run: separator_bound },
    Criterion { id: 4, name: "DAG reduction lemmas", budget: secs(60), run: dag_lemmas },
    Criterion { id: 5, name: "undirected reduction lemmas", budget: secs(300), run: undirected_lemmas },
    Criterion { id: 6, name: "pebbling lemma", budget: secs(60), run: pebbling_lemma },
    Criterion { id: 7, name: "pyramid and sink transforms", budget: secs(300), run: transforms },
    Criterion { id: 8, name: "Lengauer transforms", budget: secs(300), run: lengauer },
    Criterion { id: 9, name: "noise-stability numerics", budget: secs(30), run: noise_stability },
    Criterion { id: 10, name: "planted yes-instances", budget: secs(30), run: planted },
];

fn main() -> ExitCode {
    let mut passed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= c.budget;
        let pass = ok && in_time;
        passed += pass as usize;
        println!(
            "{} criterion {:>2}: {} ({:.2} s / {} s{}) {}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" },
            detail
        );
    }
    println!("acceptance: {passed}/{} criteria passed", CRITERIA.len());
    if passed == CRITERIA.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn suite(s: Suite) -> Result<SuiteReport, String> {
    run_suite(s, Corpus::Full, 0).map_err(|e| e.to_string())
}

fn summarize(reports: &[SuiteReport]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in reports {
        ok &= r.ok();
        parts.push(format!("{} {}/{}", r.suite, r.passed, r.checks.len()));
        for f in r.failures().take(3) {
            parts.push(format!("[first failures: {} on {}: {} {} {}]", f.check, f.instance, f.lhs, f.relation, f.rhs));
        }
    }
    (ok, parts.join("; "))
}

fn solver_oracle() -> Outcome {
    let limits = LayoutLimits::default();
    let undirected: Vec<UGraph> = (1..=6).flat_map(connected_graphs).collect();
    let dags: Vec<_> = (1..=6).flat_map(connected_dags).collect();
    let mut random_ug = Vec::new();
    let mut random_dags = Vec::new();
    for n in [7, 8] {
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + seed);
            random_ug.push(random_connected_graph(n, 0.3, &mut rng));
            random_dags.push(random_dag(n, 0.4, usize::MAX, &mut rng));
        }
    }
    let mut compared = 0usize;
    let mut mismatches = Vec::new();
    for spec in ProblemSpec::all() {
        let mut check = |h: &dyn Fn(&ProblemSpec) -> Result<(u64, u64), String>, label: String| -> Result<(), String> {
            let (dp, brute) = h(&spec)?;
            compared += 1;
            if dp != brute {
                mismatches.push(format!("{} on {label}: dp {dp} vs brute {brute}", spec.name()));
            }
            Ok(())
        };
        match spec.direction {
            Direction::Undirected => {
                for g in undirected.iter().chain(&random_ug) {
                    check(
                        &|s| {
                            let dp = solve_subset_dp(g, *s, limits).map_err(|e| e.to_string())?;
                            let brute = solve_bruteforce(g, *s, limits).map_err(|e| e.to_string())?;
                            Ok((dp.value, brute.value))
                        },
                        format!("{:?}", g.edges()),
                    )?;
                }
            }
            Direction::Dag => {
                for d in dags.iter().chain(&random_dags) {
                    check(
                        &|s| {
                            let dp = solve_subset_dp(d, *s, limits).map_err(|e| e.to_string())?;
                            let brute = solve_bruteforce(d, *s, limits).map_err(|e| e.to_string())?;
                            Ok((dp.value, brute.value))
                        },
                        format!("{:?}", d.arcs()),
                    )?;
                }
            }
        }
    }
    let detail = format!(
        "{compared} comparisons over 8 problems ({} graphs, {} DAGs), {} mismatches {}",
        undirected.len() + random_ug.len(),
        dags.len() + random_dags.len(),
        mismatches.len(),
        mismatches.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
    );
    Ok((mismatches.is_empty(), detail))
}

fn adjacency(g: &UGraph) -> Vec<u32> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0, |m, &u| m | 1 << u)).collect()
}

/// Largest clique minus one if the graph is chordal, by repeatedly deleting
/// a simplicial vertex.
fn chordal_clique_width(adj: &[u32]) -> Option<usize> {
    let n = adj.len();
    let mut alive: u32 = if n == 0 { 0 } else { (1 << n) - 1 };
    let mut width = 0;
    while alive != 0 {
        let v = (0..n).filter(|&v| alive >> v & 1 == 1).find(|&v| {
            let nb = adj[v] & alive;
            (0..n).filter(|&u| nb >> u & 1 == 1).all(|u| nb & !(adj[u] | 1 << u) == 0)
        })?;
        width = width.max((adj[v] & alive).count_ones() as usize);
        alive &= !(1 << v);
    }
    Some(width)
}

/// Minimum over chordal supergraphs of the largest clique, minus one: the
/// least width of any tree decomposition.
fn treewidth_oracle(g: &UGraph) -> usize {
    let n = g.n();
    let base = adjacency(g);
    let non_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| base[u] >> v & 1 == 0)
        .collect();
    let mut best = n.saturating_sub(1);
    for mask in 0u32..1 << non_edges.len() {
        let mut adj = base.clone();
        for (i, &(u, v)) in non_edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        if let Some(w) = chordal_clique_width(&adj) {
            best = best.min(w);
        }
    }
    best
}

/// Least width of a nice path decomposition: each step introduces a vertex
/// into the bag or forgets one whose neighbors have all been introduced.
fn pathwidth_oracle(g: &UGraph) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    let adj = adjacency(g);
    let all: u32 = (1 << n) - 1;
    for k in 1..=n as u32 {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![(0u32, 0u32)];
        seen.insert((0u32, 0u32));
        while let Some((bag, gone)) = stack.pop() {
            if gone == all {
                return k as usize - 1;
            }
            let introduced = bag | gone;
            let mut next = Vec::new();
            for v in 0..n {
                let bit = 1 << v;
                if introduced & bit == 0 && (bag | bit).count_ones() <= k {
                    next.push((bag | bit, gone));
                }
                if bag & bit != 0 && adj[v] & !introduced == 0 {
                    next.push((bag & !bit, gone | bit));
                }
            }
            for s in next {
                if seen.insert(s) {
                    stack.push(s);
                }
            }
        }
    }
    unreachable!("a single bag of every vertex always works")
}

fn width_identities() -> Outcome {
    let wl = WidthLimits::default();
    let ll = LayoutLimits::default();
    let mut bad = Vec::new();
    let mut count = 0;
    let graphs: Vec<UGraph> = (1..=6).flat_map(all_graphs).collect();
    for g in &graphs {
        let tw = treewidth_exact(g, wl).map_err(|e| e.to_string())?;
        let pw = pathwidth_exact(g, ll).map_err(|e| e.to_string())?;
        let (tw_o, pw_o) = (treewidth_oracle(g), pathwidth_oracle(g));
        let td = tree_decomposition_from_elimination(g, &Ordering::from_sequence(tw.witness.clone()).unwrap());
        let pd = path_decomposition_from_ordering(g, &Ordering::from_sequence(pw.witness.clone()).unwrap());
        let (tr, pr) = (validate_decomposition(g, &td, false), validate_decomposition(g, &pd, true));
        count += 1;
        if tw.value != tw_o || pw.value != pw_o || !tr.valid || !pr.valid || tr.width != tw.value || pr.width != pw.value {
            bad.push(format!("{:?}: tw {} vs {tw_o}, pw {} vs {pw_o}", g.edges(), tw.value, pw.value));
        }
    }
    let mut families = 0;
    let mut family = |label: String, g: &UGraph, tw_expected: usize, pw_expected: Option<usize>| -> Result<(), String> {
        families += 1;
        let tw = treewidth_exact(g, wl).map_err(|e| e.to_string())?.value;
        let pw = pathwidth_exact(g, ll).map_err(|e| e.to_string())?.value;
        if tw != tw_expected || pw_expected.is_some_and(|p| p != pw) {
            bad.push(format!("{label}: tw {tw}, pw {pw}"));
        }
        Ok(())
    };
    for n in 1..=12 {
        family(format!("K{n}"), &UGraph::complete(n), n - 1, Some(n - 1))?;
        if n >= 3 {
            family(format!("C{n}"), &UGraph::cycle(n), 2, Some(2))?;
        }
        if n >= 2 {
            family(format!("P{n}"), &UGraph::path(n), 1, Some(1))?;
            for seed in 0..5u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + n as u64);
                let tree = random_connected_graph(n, 0.0, &mut rng);
                family(format!("tree n={n} seed={seed}"), &tree, 1, None)?;
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("{count} graphs against exhaustive oracles, {families} family instances, {} mismatches {}", bad.len(), bad.iter().take(3).cloned().collect::<Vec<_>>().join("; ")),
    ))
}

fn separator_bound() -> Outcome {
    Ok(summarize(&[suite(Suite::SeparatorBound)?]))
}

fn dag_lemmas() -> Outcome {
    Ok(summarize(&[suite(Suite::DagCompleteness)?, suite(Suite::DagSoundness)?]))
}

fn undirected_lemmas() -> Outcome {
    let reports = [suite(Suite::UndirCompleteness)?, suite(Suite::UndirSoundness)?, suite(Suite::TreewidthChain)?];
    let (ok, mut detail) = summarize(&reports);
    let mut by_lemma: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for f in reports[0].failures() {
        let e = by_lemma.entry(&f.check).or_default();
        e.0 += 1;
        e.1 = e.1.max(f.lhs - f.rhs);
    }
    for (lemma, (n, worst)) in by_lemma {
        detail.push_str(&format!("; {lemma}: {n} violations, worst excess {worst}"));
    }
    Ok((ok, detail))
}

fn pebbling_lemma() -> Outcome {
    Ok(summarize(&[suite(Suite::PebblingLemma)?]))
}

fn transforms() -> Outcome {
    Ok(summarize(&[suite(Suite::PyramidFrugal)?]))
}

fn lengauer() -> Outcome {
    let r = suite(Suite::Lengauer)?;
    let mut residuals: BTreeMap<(String, i64), usize> = BTreeMap::new();
    for c in &r.checks {
        *residuals.entry((c.check.clone(), (c.lhs - c.rhs) as i64)).or_default() += 1;
    }
    let (ok, mut detail) = summarize(std::slice::from_ref(&r));
    let hist: Vec<String> = residuals.iter().map(|((check, res), n)| format!("{check} residual {res:+}: {n}")).collect();
    detail.push_str(&format!("; residuals {}", hist.join(", ")));
    Ok((ok, detail))
}

fn noise_stability() -> Outcome {
    Ok(summarize(&[suite(Suite::Gamma)?]))
}

fn planted() -> Outcome {
    let mcla = named_problem("mcla").map_err(|e| e.to_string())?;
    let mut count = 0;
    let mut bad = Vec::new();
    for q in [2usize, 4] {
        for (block, d) in [(4, 3), (6, 3), (6, 4), (8, 3), (8, 5)] {
            for cross in [0, 2, 4, 6] {
                for seed in 0..4u64 {
                    let inst = gen_planted(q, block, d, cross, seed).map_err(|e| e.to_string())?;
                    let g = &inst.graph;
                    let n = g.n();
                    let mut measured = num_rational::Ratio::from_integer(0u64);
                    for b in &inst.blocks {
                        let s = VertexSet::from_vertices(n, b.iter().copied()).map_err(|e| e.to_string())?;
                        measured = measured.max(expansion(g, &s).map_err(|e| e.to_string())?);
                    }
                    let crossing = count_cross_edges(g, &inst.blocks).map_err(|e| e.to_string())?;
                    let cost = evaluate(g, mcla, &block_ordering(&inst)).map_err(|e| e.to_string())? as usize;
                    let densest = inst.blocks.iter().map(|b| intra_edges(g, b)).max().unwrap_or(0);
                    count += 1;
                    let equal_blocks = inst.blocks.iter().all(|b| b.len() == block);
                    if measured != inst.max_phi
                        || crossing != cross
                        || g.regular_degree() != Some(d)
                        || !equal_blocks
                        || cost > densest + crossing
                    {
                        bad.push(format!(
                            "q={q} block={block} d={d} cross={cross} seed={seed}: phi {measured} vs {}, cross {crossing}, cost {cost} vs {}",
                            inst.max_phi,
                            densest + crossing
                        ));
                    }
                }
            }
        }
    }
    Ok((bad.is_empty(), format!("{count} instances, {} failures {}", bad.len(), bad.iter().take(3).cloned().collect::<Vec<_>>().join("; "))))
}

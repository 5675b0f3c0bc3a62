//! Verify suites: each runs one family of checked inequalities over a
//! corpus of instances and reports every check.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::{all_dags, all_graphs, connected_graphs, random_dag, random_graph};
use crate::error::{Error, Result};
use crate::graph::{Dag, UGraph};
use crate::layout::{named_problem, solve_bruteforce, solve_subset_dp, LayoutLimits};
use crate::pebbling::{
    build_pyramid, enumerate_one_shot_black, exhaustive_one_shot, frugal_pyramid_check, indegree2_transform,
    lengauer_to_dag, lengauer_to_undirected, one_shot_black_cost, ordering_to_black_strategy,
    single_sink_transform, validate_strategy, Accounting, PebbleMode, SearchLimits,
};
use crate::reductions::{
    default_replication, describe, verify_dag_completeness, verify_dag_soundness_bound, verify_treewidth_bound,
    verify_undir_completeness, verify_undir_soundness_bound, LemmaReport, ReductionLimits,
};
use crate::sse::{check_gamma_fact, default_gamma_grids, gamma_rho, NoiseStabilityQuery};
use crate::width::{check_separator_bound, WidthLimits};

/// Additive tolerance for the Lengauer identities.
pub const LENGAUER_TOLERANCE: i64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    DagCompleteness,
    DagSoundness,
    UndirCompleteness,
    UndirSoundness,
    TreewidthChain,
    Lengauer,
    PebblingLemma,
    /// Pyramid frugality and cost, plus the indegree-2 and single-sink
    /// transform bounds.
    PyramidFrugal,
    SeparatorBound,
    Gamma,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::DagCompleteness,
        Suite::DagSoundness,
        Suite::UndirCompleteness,
        Suite::UndirSoundness,
        Suite::TreewidthChain,
        Suite::Lengauer,
        Suite::PebblingLemma,
        Suite::PyramidFrugal,
        Suite::SeparatorBound,
        Suite::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DagCompleteness => "dag-completeness",
            Suite::DagSoundness => "dag-soundness",
            Suite::UndirCompleteness => "undir-completeness",
            Suite::UndirSoundness => "undir-soundness",
            Suite::TreewidthChain => "treewidth-chain",
            Suite::Lengauer => "lengauer",
            Suite::PebblingLemma => "pebbling-lemma",
            Suite::PyramidFrugal => "pyramid-frugal",
            Suite::SeparatorBound => "separator-bound",
            Suite::Gamma => "gamma",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Unknown {
            kind: "suite",
            name: s.to_string(),
        })
    }
}

/// Instance sizes. `Full` is the largest and matches the acceptance sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corpus {
    Tiny,
    Small,
    Full,
}

impl Corpus {
    pub fn name(self) -> &'static str {
        match self {
            Corpus::Tiny => "tiny",
            Corpus::Small => "small",
            Corpus::Full => "full",
        }
    }

    fn pick<T>(self, tiny: T, small: T, full: T) -> T {
        match self {
            Corpus::Tiny => tiny,
            Corpus::Small => small,
            Corpus::Full => full,
        }
    }
}

impl FromStr for Corpus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Corpus::Tiny, Corpus::Small, Corpus::Full]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "corpus",
                name: s.to_string(),
            })
    }
}

/// One check on one instance: `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub instance: String,
    pub lhs: f64,
    pub relation: String,
    pub rhs: f64,
    pub holds: bool,
}

impl CheckRecord {
    fn new(check: &str, instance: &str, lhs: f64, relation: &str, rhs: f64, holds: bool) -> Self {
        Self {
            check: check.into(),
            instance: instance.into(),
            lhs,
            relation: relation.into(),
            rhs,
            holds,
        }
    }

    fn at_most(check: &str, instance: &str, lhs: u64, rhs: u64) -> Self {
        Self::new(check, instance, lhs as f64, "<=", rhs as f64, lhs <= rhs)
    }

    fn at_least(check: &str, instance: &str, lhs: u64, rhs: u64) -> Self {
        Self::new(check, instance, lhs as f64, ">=", rhs as f64, lhs >= rhs)
    }

    fn equal(check: &str, instance: &str, lhs: u64, rhs: u64) -> Self {
        Self::new(check, instance, lhs as f64, "=", rhs as f64, lhs == rhs)
    }

    fn flag(check: &str, instance: &str, ok: bool) -> Self {
        Self::new(check, instance, ok as u8 as f64, "=", 1.0, ok)
    }

    fn close(check: &str, instance: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::new(check, instance, lhs, &format!("within {tol:e}"), rhs, (lhs - rhs).abs() <= tol)
    }
}

impl From<LemmaReport> for CheckRecord {
    fn from(r: LemmaReport) -> Self {
        Self::new(&r.lemma, &r.instance, r.lhs as f64, &r.relation, r.rhs as f64, r.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub corpus: Corpus,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    fn new(suite: Suite, corpus: Corpus, seed: u64, checks: Vec<CheckRecord>) -> Self {
        let failed = checks.iter().filter(|c| !c.holds).count();
        Self {
            suite,
            corpus,
            seed,
            passed: checks.len() - failed,
            failed,
            checks,
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

pub fn run_suite(suite: Suite, corpus: Corpus, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::DagCompleteness => dag_lemmas(corpus, true)?,
        Suite::DagSoundness => dag_lemmas(corpus, false)?,
        Suite::UndirCompleteness => undir_completeness(corpus)?,
        Suite::UndirSoundness => undir_default_r(corpus, false)?,
        Suite::TreewidthChain => undir_default_r(corpus, true)?,
        Suite::Lengauer => lengauer(corpus)?,
        Suite::PebblingLemma => pebbling_lemma(corpus, seed)?,
        Suite::PyramidFrugal => pyramid_and_transforms(corpus, seed)?,
        Suite::SeparatorBound => separator_bound(corpus, seed)?,
        Suite::Gamma => gamma()?,
    };
    Ok(SuiteReport::new(suite, corpus, seed, checks))
}

fn connected_up_to(n: usize) -> Vec<UGraph> {
    (1..=n).flat_map(connected_graphs).collect()
}

fn lemma_records(reports: Vec<LemmaReport>) -> impl Iterator<Item = CheckRecord> {
    reports.into_iter().map(CheckRecord::from)
}

fn dag_lemmas(corpus: Corpus, completeness: bool) -> Result<Vec<CheckRecord>> {
    let limits = ReductionLimits::default();
    let mut out = Vec::new();
    for g in connected_up_to(corpus.pick(3, 4, 5)) {
        let reports = if completeness {
            verify_dag_completeness(&g, &limits)?
        } else {
            verify_dag_soundness_bound(&g, &limits)?
        };
        out.extend(lemma_records(reports));
    }
    Ok(out)
}

fn undir_completeness(corpus: Corpus) -> Result<Vec<CheckRecord>> {
    let limits = ReductionLimits::default();
    let (max_n, max_r) = corpus.pick((3, 2), (4, 3), (4, 3));
    let mut out = Vec::new();
    for g in connected_up_to(max_n) {
        for r in 1..=max_r {
            out.extend(lemma_records(verify_undir_completeness(&g, r, &limits)?));
        }
    }
    Ok(out)
}

fn undir_default_r(corpus: Corpus, treewidth: bool) -> Result<Vec<CheckRecord>> {
    let limits = ReductionLimits::default();
    let graphs = match corpus {
        Corpus::Tiny => vec![UGraph::complete(2), UGraph::path(3)],
        _ => connected_up_to(3),
    };
    let mut out = Vec::new();
    for g in graphs {
        let r = default_replication(&g);
        let reports = if treewidth {
            verify_treewidth_bound(&g, r, &limits)?
        } else {
            verify_undir_soundness_bound(&g, r, &limits)?
        };
        out.extend(lemma_records(reports));
    }
    Ok(out)
}

fn describe_dag(d: &Dag) -> String {
    let arcs: Vec<String> = d.arcs().iter().map(|&(u, v)| format!("{}>{}", u + 1, v + 1)).collect();
    format!("n={} m={} [{}]", d.n(), d.m(), arcs.join(" "))
}

fn within(check: &str, instance: &str, lhs: i64, rhs: i64) -> CheckRecord {
    CheckRecord::new(
        check,
        instance,
        lhs as f64,
        &format!("within {LENGAUER_TOLERANCE}"),
        rhs as f64,
        (lhs - rhs).abs() <= LENGAUER_TOLERANCE,
    )
}

/// Exact residuals of both Lengauer identities against exhaustive
/// black-white one-shot search.
pub fn lengauer_residuals(max_n: usize) -> Result<Vec<CheckRecord>> {
    let limits = LayoutLimits::default();
    let search = SearchLimits::default();
    let vs = named_problem("vertex_separation")?;
    let mut out = Vec::new();
    for n in 1..=max_n {
        for d in all_dags(n) {
            let layout = solve_subset_dp(&lengauer_to_undirected(&d), vs, limits)?.value as i64;
            let bw = exhaustive_one_shot(&d, PebbleMode::BlackWhite, search)?.cost as i64;
            out.push(within("lengauer_dag", &describe_dag(&d), layout - 1, bw));
        }
        for g in all_graphs(n) {
            let layout = solve_subset_dp(&g, vs, limits)?.value as i64;
            let bw = exhaustive_one_shot(&lengauer_to_dag(&g), PebbleMode::BlackWhite, search)?.cost as i64;
            out.push(within("lengauer_graph", &describe(&g), bw + 2, layout));
        }
    }
    Ok(out)
}

fn lengauer(corpus: Corpus) -> Result<Vec<CheckRecord>> {
    lengauer_residuals(corpus.pick(3, 4, 5))
}

/// Peak cost bracketed by the layout value, agreement with exhaustive
/// search, and validity of the ordering-induced strategy.
fn pebbling_checks(d: &Dag, out: &mut Vec<CheckRecord>) -> Result<()> {
    let limits = LayoutLimits::default();
    let name = describe_dag(d);
    let rs = solve_subset_dp(d, named_problem("register_sufficiency")?, limits)?;
    let peak = one_shot_black_cost(d, Accounting::Peak, limits)?;
    out.push(CheckRecord::at_most("peak_lower", &name, rs.value, peak));
    out.push(CheckRecord::at_most("peak_upper", &name, peak, rs.value + 1));
    let searched = exhaustive_one_shot(d, PebbleMode::Black, SearchLimits::default())?.cost as u64;
    out.push(CheckRecord::equal("peak_search", &name, peak, searched));
    for order in [&rs.witness, &d.topological_witness()] {
        let s = ordering_to_black_strategy(d, order)?;
        let report = validate_strategy(d, &s, PebbleMode::Black);
        out.push(CheckRecord::flag("ordering_strategy_valid", &name, report.valid && report.one_shot));
    }
    Ok(())
}

fn random_dags(count: usize, min_n: usize, max_n: usize, max_indegree: usize, seed: u64) -> Vec<Dag> {
    (0..count as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let n = min_n + (i as usize) % (max_n - min_n + 1);
            random_dag(n, 0.4, max_indegree, &mut rng)
        })
        .collect()
}

fn pebbling_lemma(corpus: Corpus, seed: u64) -> Result<Vec<CheckRecord>> {
    let (exhaustive_n, random_count, random_n) = corpus.pick((4, 10, 6), (5, 50, 7), (5, 50, 7));
    let mut out = Vec::new();
    for n in 1..=exhaustive_n {
        for d in all_dags(n) {
            pebbling_checks(&d, &mut out)?;
        }
    }
    for d in random_dags(random_count, random_n, random_n, usize::MAX, seed) {
        pebbling_checks(&d, &mut out)?;
    }
    Ok(out)
}

fn transform_bounds(d: &Dag, out: &mut Vec<CheckRecord>) -> Result<()> {
    let limits = LayoutLimits::default();
    let name = describe_dag(d);
    let indeg = d.max_indegree() as u64;
    let sinks = d.sinks().len() as u64;
    let reduced = indegree2_transform(d);
    let joined = single_sink_transform(d);
    for (accounting, tag) in [(Accounting::Peak, "peak"), (Accounting::PostCleanup, "post_cleanup")] {
        let base = one_shot_black_cost(d, accounting, limits)?;
        let a = one_shot_black_cost(&reduced, accounting, limits)?;
        out.push(CheckRecord::at_least(&format!("indegree2_lower_{tag}"), &name, a, base));
        out.push(CheckRecord::at_most(&format!("indegree2_upper_{tag}"), &name, a, base + indeg));
        let b = one_shot_black_cost(&joined, accounting, limits)?;
        out.push(CheckRecord::at_least(&format!("single_sink_lower_{tag}"), &name, b, base));
        out.push(CheckRecord::at_most(&format!("single_sink_upper_{tag}"), &name, b, base + sinks + 1));
    }
    Ok(())
}

fn pyramid_and_transforms(corpus: Corpus, seed: u64) -> Result<Vec<CheckRecord>> {
    let (max_d, random_count, random_n) = corpus.pick((2, 10, 5), (3, 50, 7), (3, 50, 7));
    let limits = LayoutLimits::default();
    let mut out = Vec::new();
    for size in 1..=max_d {
        let p = build_pyramid(size)?;
        let name = format!("pyramid d={size}");
        let strategies = enumerate_one_shot_black(&p, 1 << 20)?;
        let frugal = strategies
            .iter()
            .map(|s| frugal_pyramid_check(size, s))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|b| b);
        out.push(CheckRecord::flag("pyramid_frugal", &name, frugal && !strategies.is_empty()));
        let brute_peak = strategies
            .iter()
            .map(|s| validate_strategy(&p, s, PebbleMode::Black).cost as u64)
            .min()
            .unwrap_or(0);
        let peak = one_shot_black_cost(&p, Accounting::Peak, limits)?;
        out.push(CheckRecord::equal("pyramid_cost_peak", &name, peak, brute_peak));
        let brute_rs = solve_bruteforce(&p, named_problem("register_sufficiency")?, limits)?.value.max(1);
        let post = one_shot_black_cost(&p, Accounting::PostCleanup, limits)?;
        out.push(CheckRecord::equal("pyramid_cost_post_cleanup", &name, post, brute_rs));
    }
    for d in random_dags(random_count, 2, random_n, 4, seed) {
        transform_bounds(&d, &mut out)?;
    }
    Ok(out)
}

fn separator_bound(corpus: Corpus, seed: u64) -> Result<Vec<CheckRecord>> {
    let (exhaustive_n, random_count) = corpus.pick((5, 10), (7, 20), (8, 50));
    let limits = WidthLimits::default();
    let mut graphs: Vec<UGraph> = (1..=exhaustive_n).flat_map(all_graphs).collect();
    for i in 0..random_count as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
        let n = 6 + (i as usize) % 5;
        graphs.push(random_graph(n, 0.4, &mut rng));
    }
    graphs
        .iter()
        .map(|g| {
            let r = check_separator_bound(g, limits)?;
            Ok(CheckRecord::at_least(
                "treewidth_plus_one_vs_half_separator",
                &describe(g),
                r.treewidth as u64 + 1,
                r.k_half as u64,
            ))
        })
        .collect()
}

fn gamma() -> Result<Vec<CheckRecord>> {
    let g = |rho, mu| -> Result<f64> { Ok(gamma_rho(NoiseStabilityQuery::new(rho, mu)?)) };
    let mut out = Vec::new();
    for i in 0..=20 {
        let mu = i as f64 / 20.0;
        out.push(CheckRecord::close("gamma_independent", &format!("rho=0 mu={mu}"), g(0.0, mu)?, mu * mu, 1e-8));
        out.push(CheckRecord::close("gamma_identical", &format!("rho=1 mu={mu}"), g(1.0, mu)?, mu, 1e-8));
    }
    for i in 0..=40 {
        let rho = (-1.0 + i as f64 * 0.05f64).clamp(-1.0, 1.0);
        let expected = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
        out.push(CheckRecord::close("gamma_arcsine", &format!("rho={rho:.2} mu=0.5"), g(rho, 0.5)?, expected, 1e-6));
    }
    let (eps, mu) = default_gamma_grids();
    let fact = check_gamma_fact(&eps, &mu)?;
    out.push(CheckRecord::new(
        "gamma_fact_witness",
        &format!("eps in [{:e}, {:e}], mu in [{}, {}]", eps[0], eps[eps.len() - 1], mu[0], mu[mu.len() - 1]),
        fact.c_witness,
        ">",
        0.0,
        fact.c_witness > 0.0,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("nosuch".parse::<Suite>().is_err());
        assert_eq!("small".parse::<Corpus>().unwrap(), Corpus::Small);
        assert!("huge".parse::<Corpus>().is_err());
    }

    #[test]
    fn tiny_suites() {
        for s in Suite::ALL {
            let r = run_suite(s, Corpus::Tiny, 0).unwrap();
            assert!(!r.checks.is_empty(), "{s}");
            assert_eq!(r.passed + r.failed, r.checks.len());
            if !matches!(s, Suite::UndirCompleteness | Suite::Lengauer) {
                assert!(r.ok(), "{s}: {:?}", r.failures().next());
            }
        }
    }

    #[test]
    fn lengauer_offsets() {
        let records = lengauer_residuals(4).unwrap();
        for c in &records {
            let residual = c.lhs - c.rhs;
            match c.check.as_str() {
                "lengauer_dag" => assert_eq!(residual, -2.0, "{}", c.instance),
                _ if c.instance.contains(" m=0 ") => assert_eq!(residual, 3.0, "{}", c.instance),
                _ => assert_eq!(residual, 4.0, "{}", c.instance),
            }
        }
    }

    #[test]
    fn report_round_trip() {
        let r = run_suite(Suite::Gamma, Corpus::Tiny, 3).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<SuiteReport>(&text).unwrap(), r);
    }

    #[test]
    fn lemma_record_relation() {
        let r = verify_dag_soundness_bound(&UGraph::path(3), &ReductionLimits::default()).unwrap();
        let c = CheckRecord::from(r[0].clone());
        assert_eq!(c.relation, ">=");
        assert!(c.holds);
    }
}

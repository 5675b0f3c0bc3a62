use proptest::prelude::*;

use pebblewidth_core::io::{load_dag, load_ugraph, write_dag, write_ugraph};
use pebblewidth_core::layout::{cost_profile, evaluate, named_problem, solve_subset_dp, CostKind, LayoutLimits};
use pebblewidth_core::pebbling::{ordering_to_black_strategy, PebbleStrategy};
use pebblewidth_core::sse::{parse_partition, write_partition};
use pebblewidth_core::width::{parse_decomposition, tree_decomposition_from_elimination, write_decomposition};
use pebblewidth_core::{cut_edges, Dag, LayoutResult, Ordering, UGraph, VertexSet};

fn ugraph() -> impl Strategy<Value = UGraph> {
    (1usize..9).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..20).prop_map(move |pairs| {
            let mut edges: Vec<_> = pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            edges.sort_unstable();
            edges.dedup();
            UGraph::new(n, edges).unwrap()
        })
    })
}

fn dag() -> impl Strategy<Value = Dag> {
    (1usize..9).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..20).prop_map(move |pairs| {
            let mut arcs: Vec<_> = pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            arcs.sort_unstable();
            arcs.dedup();
            Dag::new(n, arcs).unwrap()
        })
    })
}

fn with_ordering<G: Clone + std::fmt::Debug + 'static>(
    g: impl Strategy<Value = G>,
    n: fn(&G) -> usize,
) -> impl Strategy<Value = (G, Ordering)> {
    g.prop_flat_map(move |g| {
        let k = n(&g);
        (Just(g), Just((0..k).collect::<Vec<_>>()).prop_shuffle())
    })
    .prop_map(|(g, seq)| (g, Ordering::from_sequence(seq).unwrap()))
}

proptest! {
    #[test]
    fn cut_is_symmetric(g in ugraph(), mask in any::<u64>()) {
        let s = VertexSet::from_mask(g.n(), mask & ((1 << g.n()) - 1));
        prop_assert_eq!(cut_edges(&g, &s).unwrap(), cut_edges(&g, &s.complement()).unwrap());
    }

    #[test]
    fn graph_files_round_trip(g in ugraph(), d in dag()) {
        prop_assert_eq!(load_ugraph(&write_ugraph(&g)).unwrap(), g);
        prop_assert_eq!(load_dag(&write_dag(&d)).unwrap(), d);
    }

    #[test]
    fn vertex_cost_never_exceeds_edge_cost((g, order) in with_ordering(ugraph(), UGraph::n)) {
        let v = cost_profile(&g, CostKind::Vertex, &order).unwrap();
        let e = cost_profile(&g, CostKind::Edge, &order).unwrap();
        prop_assert!(v.iter().zip(&e).all(|(a, b)| a <= b));
    }

    #[test]
    fn igc_is_sum_of_longest_right_edges((g, order) in with_ordering(ugraph(), UGraph::n)) {
        let longest: usize = (0..g.n())
            .map(|u| g.neighbors(u).iter().map(|&w| order.rank(w)).max().unwrap_or(0).saturating_sub(order.rank(u)))
            .sum();
        prop_assert_eq!(evaluate(&g, named_problem("igc").unwrap(), &order).unwrap(), longest as u64);
    }

    #[test]
    fn optimum_bounds_every_ordering((g, order) in with_ordering(ugraph(), UGraph::n)) {
        for name in ["mla", "mcla", "igc", "vertex_separation"] {
            let spec = named_problem(name).unwrap();
            let r = solve_subset_dp(&g, spec, LayoutLimits::default()).unwrap();
            prop_assert_eq!(evaluate(&g, spec, &r.witness).unwrap(), r.value);
            prop_assert!(r.value <= evaluate(&g, spec, &order).unwrap());
        }
    }

    #[test]
    fn records_round_trip(d in dag()) {
        let r = solve_subset_dp(&d, named_problem("dag_mla").unwrap(), LayoutLimits::default()).unwrap();
        let text = serde_json::to_string(&r.to_record()).unwrap();
        let back = LayoutResult::from_record(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, r.clone());
        let s = ordering_to_black_strategy(&d, &r.witness).unwrap();
        prop_assert_eq!(PebbleStrategy::parse(&s.write(), d.n()).unwrap(), s);
    }

    #[test]
    fn decompositions_and_partitions_round_trip((g, order) in with_ordering(ugraph(), UGraph::n), q in 1usize..4) {
        let td = tree_decomposition_from_elimination(&g, &order);
        let (back, n) = parse_decomposition(&write_decomposition(&td, g.n())).unwrap();
        prop_assert_eq!(n, g.n());
        prop_assert_eq!(back, td);
        let blocks: Vec<Vec<usize>> = (0..q).map(|k| (0..g.n()).filter(|v| v % q == k).collect()).collect();
        prop_assert_eq!(parse_partition(&write_partition(&blocks), g.n()).unwrap(), blocks);
    }
}

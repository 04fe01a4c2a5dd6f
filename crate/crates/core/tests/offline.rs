mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use deadline_matching::graph::{build_online_graph, Role};
use deadline_matching::offline::{
    hungarian_bipartite, max_weight, max_weight_matching_exact, offline_optimum, verify_offline_dual, AuctionMarket,
    DualSolution, WarmStart,
};
use deadline_matching::rational::{q, Rational};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_matching_agrees_with_recursion(g in (2usize..=9).prop_flat_map(common::graph)) {
        let m = max_weight_matching_exact(&g).unwrap();
        prop_assert_eq!(m.weight(&g), common::brute_force_max(&g));
        for &(i, j) in m.pairs() {
            prop_assert!(g.weight(i, j).is_positive());
        }
    }

    #[test]
    fn offline_optimum_agrees_with_overlap_oracle(inst in common::instance(8, 3)) {
        let m = offline_optimum(&inst).unwrap();
        prop_assert_eq!(m.weight(&inst.graph), common::brute_force_offline(&inst));
    }

    #[test]
    fn larger_patience_never_hurts(inst in common::instance(8, 3)) {
        let base = max_weight(&build_online_graph(&inst)).unwrap();
        let mut wider = inst.clone();
        wider.deadline += 1;
        prop_assert!(max_weight(&build_online_graph(&wider)).unwrap() >= base);
    }

    #[test]
    fn hungarian_duals_are_optimal(inst in common::bipartite(10, 3)) {
        let (sellers, buyers): (Vec<usize>, Vec<usize>) = {
            let n = inst.n();
            let s = (1..=n).filter(|&v| inst.role(v) == Some(Role::Seller)).collect();
            let b = (1..=n).filter(|&v| inst.role(v) == Some(Role::Buyer)).collect();
            (s, b)
        };
        let edges: Vec<_> = inst.graph.edges().map(|(i, j, w)| (i, j, w.clone())).collect();
        let sol = hungarian_bipartite(&sellers, &buyers, &edges, None).unwrap();
        prop_assert_eq!(&sol.weight, &common::brute_force_max(&inst.graph));
        let dual: Rational = sol.prices.values().chain(sol.margins.values()).sum();
        prop_assert_eq!(&dual, &sol.weight);
        prop_assert!(sol.prices.values().chain(sol.margins.values()).all(|x| !x.is_negative()));
        for (s, b, w) in &edges {
            prop_assert!(&sol.prices[s] + &sol.margins[b] >= *w);
        }
    }

    #[test]
    fn warm_start_matches_cold(inst in common::bipartite(10, 3), cut in 0usize..10) {
        let n = inst.n();
        let sellers: Vec<usize> = (1..=n).filter(|&v| inst.role(v) == Some(Role::Seller)).collect();
        let buyers: Vec<usize> = (1..=n).filter(|&v| inst.role(v) == Some(Role::Buyer)).collect();
        let edges: Vec<_> = inst.graph.edges().map(|(i, j, w)| (i, j, w.clone())).collect();
        let cold = hungarian_bipartite(&sellers, &buyers, &edges, None).unwrap();
        let early = &buyers[..cut.min(buyers.len())];
        let sub: Vec<_> = edges.iter().filter(|e| early.contains(&e.1)).cloned().collect();
        let partial = hungarian_bipartite(&sellers, early, &sub, None).unwrap();
        let warm = WarmStart {
            prices: partial.prices,
            margins: partial.margins,
            matching: partial.matching,
        };
        let hot = hungarian_bipartite(&sellers, &buyers, &edges, Some(&warm)).unwrap();
        prop_assert_eq!(hot.weight, cold.weight);
    }

    /// Each auction step leaves the dual total equal to the matching weight,
    /// prices only rise and margins of buyers already present only fall.
    #[test]
    fn auction_steps_keep_duals_tight(inst in common::bipartite(10, 3)) {
        let mut market = AuctionMarket::new();
        for v in 1..=inst.n() {
            let before_p: BTreeMap<usize, Rational> = market.prices().clone();
            let before_q: BTreeMap<usize, Rational> = market.margins().clone();
            match inst.role(v).unwrap() {
                Role::Seller => market.add_seller(v).unwrap(),
                Role::Buyer => {
                    let bids: Vec<_> = before_p.keys().map(|&s| (s, inst.graph.weight(s, v).clone())).collect();
                    market.add_buyer(v, bids).unwrap();
                }
            }
            market.check_optimality().unwrap();
            prop_assert_eq!(market.dual_total(), market.matching_weight());
            for (s, p) in &before_p {
                prop_assert!(&market.prices()[s] >= p);
            }
            for (b, m) in &before_q {
                prop_assert!(&market.margins()[b] <= m);
            }
        }
    }
}

#[test]
fn single_edge_hungarian() {
    let sol = hungarian_bipartite(&[1], &[2], &[(1, 2, q(5, 1))], None).unwrap();
    assert_eq!(sol.weight, q(5, 1));
    assert_eq!(sol.prices[&1], q(0, 1));
    assert_eq!(sol.margins[&2], q(5, 1));
}

#[test]
fn dual_checker_flags_violations() {
    let g = deadline_matching::graph::WeightedGraph::from_edges(2, &[(1, 2, q(3, 1))]).unwrap();
    let inst = deadline_matching::graph::OnlineInstance::new(g, deadline_matching::graph::ArrivalOrder::identity(2), 1)
        .unwrap();
    let low = DualSolution {
        lambda: vec![q(1, 1), q(1, 1)],
    };
    let rep = verify_offline_dual(&inst, &low, &q(3, 1)).unwrap();
    assert!(!rep.feasible());
    assert!(!rep.weak_duality);
    let ok = DualSolution {
        lambda: vec![q(1, 1), q(2, 1)],
    };
    let rep = verify_offline_dual(&inst, &ok, &q(3, 1)).unwrap();
    assert!(rep.feasible() && rep.weak_duality);
}

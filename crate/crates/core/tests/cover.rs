mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use deadline_matching::cover::certificate::{shift_family, verify_certificate, CoverCertificate};
use deadline_matching::cover::lp::{
    check_set_cover, solve_cover_lp, solve_set_cover, ColumnStrategy, CoverLpVariant, CoverageMode, RowSet,
};
use deadline_matching::cover::mask::{batched_graph, contract, cycle_power, is_cover, mask_add, path_power};
use deadline_matching::cover::periodic::{enumerate_periodic_batchings, is_periodic_order};
use deadline_matching::cover::simplex::PivotRule;
use deadline_matching::cover::transform::extend_cover;
use deadline_matching::graph::{ArrivalOrder, WeightedGraph};
use deadline_matching::offline::max_weight;
use deadline_matching::rational::{q, Rational};

fn lp_certificate(variant: CoverLpVariant) -> CoverCertificate {
    solve_cover_lp(variant, CoverageMode::default(), ColumnStrategy::default(), PivotRule::default())
        .unwrap()
        .certificate
}

fn partition(mask: &WeightedGraph) -> BTreeSet<Vec<usize>> {
    let n = mask.n();
    let mut seen = vec![false; n + 1];
    let mut out = BTreeSet::new();
    for v in 1..=n {
        if seen[v] {
            continue;
        }
        let block: Vec<usize> = (v..=n).filter(|&u| u == v || mask.weight(v, u).is_positive()).collect();
        for &u in &block {
            seen[u] = true;
        }
        out.insert(block);
    }
    out
}

/// The periodic batchings on 8 vertices are exactly the batchings of the
/// 4-periodic arrival orders, and solving over every such order (no
/// deduplication) gives the same LP value as the deduplicated solver.
#[test]
fn dedup_is_sound_on_eight_vertices() {
    let periodic: Vec<ArrivalOrder> = ArrivalOrder::all(8).filter(|s| is_periodic_order(s, 4)).collect();
    assert!(!periodic.is_empty());
    let from_orders: BTreeSet<_> = periodic.iter().map(|s| partition(&batched_graph(s, 1))).collect();
    let enumerated: BTreeSet<_> = enumerate_periodic_batchings(8, 4, 1)
        .unwrap()
        .iter()
        .map(|b| partition(&b.mask()))
        .collect();
    assert_eq!(from_orders, enumerated);

    let columns: Vec<RowSet> = periodic
        .iter()
        .map(|s| {
            let m = batched_graph(s, 1);
            let mut set = RowSet::new(4);
            for i in 0..4 {
                if m.weight(i + 1, i + 2).is_positive() {
                    set.insert(i);
                }
            }
            set
        })
        .collect();
    let all = solve_set_cover(4, &columns, ColumnStrategy::All, PivotRule::Bland).unwrap();
    check_set_cover(4, &columns, &all).unwrap();
    let lp = solve_cover_lp(
        CoverLpVariant::Lp { d: 1 },
        CoverageMode::Literal,
        ColumnStrategy::Generated,
        PivotRule::default(),
    )
    .unwrap();
    assert_eq!(all.value, lp.alpha);
    assert_eq!(lp.alpha, q(2, 1));
}

#[test]
fn small_lp_values_are_stable_across_strategies() {
    for variant in [CoverLpVariant::Lp { d: 1 }, CoverLpVariant::Lp { d: 2 }, CoverLpVariant::LpPrime { k: 2 }, CoverLpVariant::LpPrime { k: 3 }] {
        let mut values = Vec::new();
        for strategy in [ColumnStrategy::All, ColumnStrategy::Pruned, ColumnStrategy::Generated] {
            for rule in [PivotRule::Bland, PivotRule::DantzigThenBland] {
                let sol = solve_cover_lp(variant, CoverageMode::default(), strategy, rule).unwrap();
                let t = variant.target_power();
                assert!(verify_certificate(&sol.certificate, &cycle_power(variant.n(), t).unwrap()).ok());
                let dual: Rational = sol.dual.iter().map(|(_, y)| y).sum();
                assert_eq!(dual, sol.alpha);
                values.push(sol.alpha);
            }
        }
        assert!(values.windows(2).all(|w| w[0] == w[1]), "{variant:?}: {values:?}");
    }
}

#[test]
fn certificates_extend_to_multiples_of_the_period() {
    let cert = lp_certificate(CoverLpVariant::Lp { d: 1 });
    for n in [8, 12, 16, 20, 24] {
        let ext = extend_cover(&cert, n, 1).unwrap();
        assert_eq!(ext.alpha, cert.alpha);
        assert!(verify_certificate(&ext, &cycle_power(n, 1).unwrap()).ok(), "n = {n}");
    }
}

#[test]
fn halved_weights_are_caught() {
    let cert = lp_certificate(CoverLpVariant::Lp { d: 2 });
    let mut bad = cert.clone();
    for c in &mut bad.columns {
        c.lambda = &c.lambda / q(2, 1);
    }
    bad.alpha = bad.lambda_sum();
    let rep = verify_certificate(&bad, &cycle_power(12, 2).unwrap());
    assert!(!rep.ok());
    assert!(!rep.uncovered.is_empty());
    let mut wrong_alpha = cert;
    wrong_alpha.alpha = &wrong_alpha.alpha + q(1, 1);
    assert!(!verify_certificate(&wrong_alpha, &cycle_power(12, 2).unwrap()).alpha_matches);
}

#[test]
fn certificate_json_round_trips() {
    for cert in [
        lp_certificate(CoverLpVariant::Lp { d: 1 }),
        lp_certificate(CoverLpVariant::LpPrime { k: 3 }),
        shift_family(12, 2, &q(1, 3)).unwrap(),
    ] {
        let back = CoverCertificate::from_json(&cert.to_json().unwrap()).unwrap();
        assert_eq!(back.alpha, cert.alpha);
        assert_eq!(back.coverage(), cert.coverage());
    }
}

fn rowsets(rows: usize) -> impl Strategy<Value = Vec<RowSet>> {
    prop::collection::vec(prop::collection::vec(any::<bool>(), rows), 1..12).prop_map(move |cols| {
        let mut out: Vec<RowSet> = cols
            .into_iter()
            .map(|bits| {
                let mut s = RowSet::new(rows);
                for (r, b) in bits.into_iter().enumerate() {
                    if b {
                        s.insert(r);
                    }
                }
                s
            })
            .collect();
        // make the LP feasible
        for r in 0..rows {
            let mut s = RowSet::new(rows);
            s.insert(r);
            out.push(s);
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn set_cover_strategies_agree(cols in (1usize..=7).prop_flat_map(|r| (Just(r), rowsets(r)))) {
        let (rows, cols) = cols;
        let mut values = Vec::new();
        for strategy in [ColumnStrategy::All, ColumnStrategy::Pruned, ColumnStrategy::Generated] {
            let sol = solve_set_cover(rows, &cols, strategy, PivotRule::default()).unwrap();
            check_set_cover(rows, &cols, &sol).unwrap();
            values.push(sol.value);
        }
        prop_assert!(values.windows(2).all(|w| w[0] == w[1]));
        let widest = cols.iter().map(|c| c.len()).max().unwrap();
        prop_assert!(values[0] >= q(rows as i64, widest as i64));
        prop_assert!(values[0] <= q(rows as i64, 1));
    }

    /// A mask dominated by a weighted sum of batched graphs has matching
    /// value at most the weighted sum of the batched values.
    #[test]
    fn cover_bounds_masked_matchings(g in common::graph(8), s in common::order(8)) {
        let cert = lp_certificate(CoverLpVariant::Lp { d: 1 });
        let relabel = |m: &WeightedGraph| {
            let mut out = WeightedGraph::empty(8);
            for (i, j, w) in m.edges() {
                out.set_weight(s.vertex_at(i), s.vertex_at(j), w.clone());
            }
            out
        };
        let lhs = max_weight(&relabel(&cycle_power(8, 1).unwrap()).hadamard(&g).unwrap()).unwrap();
        let rhs: Rational = cert
            .columns
            .iter()
            .map(|c| &c.lambda * max_weight(&relabel(&c.batching.mask()).hadamard(&g).unwrap()).unwrap())
            .sum();
        prop_assert!(lhs <= rhs);
        let path = max_weight(&path_power(&s, 1).hadamard(&g).unwrap()).unwrap();
        prop_assert!(path <= max_weight(&relabel(&cycle_power(8, 1).unwrap()).hadamard(&g).unwrap()).unwrap());
    }

    /// Masking is monotone, positively homogeneous and subadditive.
    #[test]
    fn masked_matching_algebra(g in common::graph(7), h1 in common::graph(7), h2 in common::graph(7), a in 1i64..5) {
        let m = |h: &WeightedGraph| max_weight(&h.hadamard(&g).unwrap()).unwrap();
        let sum = mask_add(&q(1, 1), &h1, &q(1, 1), &h2).unwrap();
        prop_assert!(is_cover(&sum, &h1).unwrap());
        prop_assert!(m(&sum) >= m(&h1));
        prop_assert!(m(&sum) <= m(&h1) + m(&h2));
        let scaled = mask_add(&q(a, 1), &h1, &q(0, 1), &h2).unwrap();
        prop_assert_eq!(m(&scaled), q(a, 1) * m(&h1));
    }

    #[test]
    fn contraction_of_cycle_powers(u in 1usize..4, n in 3usize..8, d in 1usize..6) {
        let reach = d.div_ceil(u);
        prop_assume!(n > 2 * reach && u * n > 2 * d);
        let c = contract(&cycle_power(u * n, d).unwrap(), u).unwrap();
        prop_assert_eq!(c, cycle_power(n, reach).unwrap());
    }
}

//! Strategies and oracles shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;

use deadline_matching::graph::{ArrivalOrder, OnlineInstance, Role, WeightedGraph};
use deadline_matching::rational::{q, Rational};

pub fn weight() -> impl Strategy<Value = Rational> {
    (1i64..=20, 1i64..=6).prop_map(|(a, b)| q(a, b))
}

/// Graph on `n` vertices; each pair is an edge with probability about 3/5.
pub fn graph(n: usize) -> impl Strategy<Value = WeightedGraph> {
    let pairs = n * n.saturating_sub(1) / 2;
    prop::collection::vec(prop::option::weighted(0.6, weight()), pairs).prop_map(move |ws| {
        let mut g = WeightedGraph::empty(n);
        let mut it = ws.into_iter();
        for i in 1..=n {
            for j in i + 1..=n {
                if let Some(w) = it.next().unwrap() {
                    g.set_weight(i, j, w);
                }
            }
        }
        g
    })
}

pub fn order(n: usize) -> impl Strategy<Value = ArrivalOrder> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|seq| ArrivalOrder::from_sequence(&seq).unwrap())
}

/// Instance with `2 ≤ n ≤ max_n`, `1 ≤ d ≤ max_d` and a shuffled order.
pub fn instance(max_n: usize, max_d: usize) -> impl Strategy<Value = OnlineInstance> {
    (2..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        (graph(n), order(n)).prop_map(move |(g, s)| OnlineInstance::new(g, s, d).unwrap())
    })
}

/// Constrained bipartite instance in identity order: edges only from a
/// seller to a later buyer.
pub fn bipartite(max_n: usize, max_d: usize) -> impl Strategy<Value = OnlineInstance> {
    (2..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        (prop::collection::vec(any::<bool>(), n), graph(n)).prop_map(move |(sellers, g)| {
            let roles: Vec<Role> = sellers
                .iter()
                .map(|&s| if s { Role::Seller } else { Role::Buyer })
                .collect();
            let mut h = WeightedGraph::empty(n);
            for (i, j, w) in g.edges() {
                if roles[i - 1] == Role::Seller && roles[j - 1] == Role::Buyer {
                    h.set_weight(i, j, w.clone());
                }
            }
            OnlineInstance::new(h, ArrivalOrder::identity(n), d)
                .unwrap()
                .with_roles(roles)
                .unwrap()
        })
    })
}

/// Maximum matching weight by plain recursion: the lowest free vertex is
/// either left single or paired with some later free vertex.
pub fn brute_force_max(g: &WeightedGraph) -> Rational {
    fn go(g: &WeightedGraph, free: &mut Vec<bool>) -> Rational {
        let Some(i) = (1..free.len()).find(|&v| free[v]) else {
            return Rational::zero();
        };
        free[i] = false;
        let mut best = go(g, free);
        for j in i + 1..free.len() {
            if free[j] && g.weight(i, j).is_positive() {
                free[j] = false;
                best = best.max(g.weight(i, j).clone() + go(g, free));
                free[j] = true;
            }
        }
        free[i] = true;
        best
    }
    let mut free = vec![true; g.n() + 1];
    free[0] = false;
    go(g, &mut free)
}

/// Offline benchmark from first principles: keep the pairs whose stays
/// overlap, then match by brute force.
pub fn brute_force_offline(inst: &OnlineInstance) -> Rational {
    let n = inst.n();
    let mut h = WeightedGraph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let (ai, aj) = (inst.sigma.slot(i), inst.sigma.slot(j));
            let (ci, cj) = (ai + inst.patience(i), aj + inst.patience(j));
            if ai.max(aj) <= ci.min(cj) {
                h.set_weight(i, j, inst.graph.weight(i, j).clone());
            }
        }
    }
    brute_force_max(&h)
}

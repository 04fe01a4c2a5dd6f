//! Seeded random instances for sweeps and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{ArrivalOrder, OnlineInstance, Role, WeightedGraph};
use crate::rational::Rational;

/// Shape of generated instances.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub d: usize,
    /// Probability that a pair is an edge.
    pub density: f64,
    /// Weights are `a/b` with `1 ≤ a ≤ max_numer`, `1 ≤ b ≤ max_denom`.
    pub max_numer: i64,
    pub max_denom: i64,
}

impl RandomSpec {
    pub fn new(n: usize, d: usize) -> Self {
        RandomSpec {
            n,
            d,
            density: 0.6,
            max_numer: 20,
            max_denom: 6,
        }
    }
}

fn weight(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Rational {
    Rational::new(
        rng.random_range(1..=spec.max_numer),
        rng.random_range(1..=spec.max_denom),
    )
}

/// Complete graph with random positive rational weights.
pub fn random_complete_graph(n: usize, seed: u64) -> WeightedGraph {
    let spec = RandomSpec::new(n, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            g.set_weight(i, j, weight(&mut rng, &spec));
        }
    }
    g
}

/// Random graph in identity arrival order with deadline `spec.d`.
pub fn random_instance(spec: &RandomSpec, seed: u64) -> Result<OnlineInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::empty(spec.n);
    for i in 1..=spec.n {
        for j in i + 1..=spec.n {
            if rng.random_bool(spec.density) {
                g.set_weight(i, j, weight(&mut rng, spec));
            }
        }
    }
    OnlineInstance::new(g, ArrivalOrder::identity(spec.n), spec.d)
}

/// Random constrained bipartite instance: roles are drawn uniformly and an
/// edge joins a seller to a buyer only when the seller arrives first.
pub fn random_constrained_bipartite(spec: &RandomSpec, seed: u64) -> Result<OnlineInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let roles: Vec<Role> = (0..spec.n)
        .map(|_| if rng.random_bool(0.5) { Role::Seller } else { Role::Buyer })
        .collect();
    let mut g = WeightedGraph::empty(spec.n);
    for i in 1..=spec.n {
        for j in i + 1..=spec.n {
            if roles[i - 1] == Role::Seller && roles[j - 1] == Role::Buyer && rng.random_bool(spec.density) {
                g.set_weight(i, j, weight(&mut rng, spec));
            }
        }
    }
    OnlineInstance::new(g, ArrivalOrder::identity(spec.n), spec.d)?.with_roles(roles)
}

//! Weighted graphs, arrival orders and online instances.
//!
//! Vertices are numbered `1..=n` throughout. Weights live in a dense upper
//! triangle; a weight of zero means "no edge". A 0/1 weighted graph doubles as
//! a mask for the covering machinery in [`crate::cover`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedGraph {
    n: usize,
    w: Vec<Rational>,
}

/// 0/1 edge masks share the representation of weighted graphs.
pub type GraphMask = WeightedGraph;

impl WeightedGraph {
    pub fn empty(n: usize) -> Self {
        WeightedGraph {
            n,
            w: vec![Rational::zero(); n * n.saturating_sub(1) / 2],
        }
    }

    /// Build from `(i, j, weight)` triples, rejecting self-loops, out of range
    /// vertices, negative weights and duplicates.
    pub fn from_edges(n: usize, edges: &[(usize, usize, Rational)]) -> Result<Self> {
        let mut g = WeightedGraph::empty(n);
        let mut seen = vec![false; g.w.len()];
        for (i, j, w) in edges {
            let (i, j) = (*i, *j);
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if w.is_negative() {
                return Err(Error::NegativeWeight {
                    i,
                    j,
                    weight: w.to_string(),
                });
            }
            let k = g.index(i, j);
            if seen[k] {
                return Err(Error::DuplicateEdge(i.min(j), i.max(j)));
            }
            seen[k] = true;
            g.w[k] = w.clone();
        }
        Ok(g)
    }

    /// Complete graph with every weight equal to `w`.
    pub fn complete(n: usize, w: Rational) -> Self {
        WeightedGraph {
            n,
            w: vec![w; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i - 1, j - 1) } else { (j - 1, i - 1) };
        // rows of the strict upper triangle laid out one after another
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// Weight of `{i, j}`. Panics on `i == j` or out-of-range vertices.
    pub fn weight(&self, i: usize, j: usize) -> &Rational {
        assert!(i != j && i >= 1 && j >= 1 && i <= self.n && j <= self.n);
        &self.w[self.index(i, j)]
    }

    pub fn set_weight(&mut self, i: usize, j: usize, w: Rational) {
        assert!(i != j && i >= 1 && j >= 1 && i <= self.n && j <= self.n);
        let k = self.index(i, j);
        self.w[k] = w;
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.weight(i, j).is_positive()
    }

    /// Positive-weight edges `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        (1..=self.n).flat_map(move |i| {
            (i + 1..=self.n).filter_map(move |j| {
                let w = self.weight(i, j);
                w.is_positive().then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.w.iter().filter(|w| w.is_positive()).count()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        (1..=self.n)
            .filter(move |&u| u != v)
            .filter_map(move |u| {
                let w = self.weight(u, v);
                w.is_positive().then_some((u, w))
            })
    }

    /// Copy with the given vertices' incident edges zeroed.
    pub fn without_vertices(&self, removed: &[usize]) -> Self {
        let mut g = self.clone();
        for &v in removed {
            for u in 1..=self.n {
                if u != v {
                    g.set_weight(u, v, Rational::zero());
                }
            }
        }
        g
    }

    /// Entrywise product, the "masking" `H ∘ G`.
    pub fn hadamard(&self, other: &WeightedGraph) -> Result<Self> {
        self.same_size(other)?;
        Ok(WeightedGraph {
            n: self.n,
            w: self.w.iter().zip(&other.w).map(|(a, b)| a * b).collect(),
        })
    }

    /// `a·self + b·other`.
    pub fn linear_combination(
        &self,
        a: &Rational,
        other: &WeightedGraph,
        b: &Rational,
    ) -> Result<Self> {
        self.same_size(other)?;
        Ok(WeightedGraph {
            n: self.n,
            w: self
                .w
                .iter()
                .zip(&other.w)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Entrywise `self ≥ other`.
    pub fn dominates(&self, other: &WeightedGraph) -> Result<bool> {
        self.same_size(other)?;
        Ok(self.w.iter().zip(&other.w).all(|(a, b)| a >= b))
    }

    fn same_size(&self, other: &WeightedGraph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                what: "graph vertices",
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Relabel: vertex `v` of `self` becomes `perm[v - 1]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut g = WeightedGraph::empty(self.n);
        for (i, j, w) in self.edges() {
            g.set_weight(perm[i - 1], perm[j - 1], w.clone());
        }
        g
    }
}

/// An arrival order σ: vertex `v` arrives at slot `σ(v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrivalOrder {
    slot: Vec<usize>,
    vertex: Vec<usize>,
}

impl ArrivalOrder {
    pub fn identity(n: usize) -> Self {
        ArrivalOrder {
            slot: (1..=n).collect(),
            vertex: (1..=n).collect(),
        }
    }

    /// `slots[v - 1] = σ(v)`; must be a permutation of `1..=n`.
    pub fn from_slots(slots: Vec<usize>) -> Result<Self> {
        let n = slots.len();
        let mut vertex = vec![0; n];
        for (v, &s) in slots.iter().enumerate() {
            if s == 0 || s > n || vertex[s - 1] != 0 {
                return Err(Error::InvalidPermutation(n));
            }
            vertex[s - 1] = v + 1;
        }
        Ok(ArrivalOrder { slot: slots, vertex })
    }

    /// `vertices[t - 1]` arrives at slot `t`.
    pub fn from_sequence(vertices: &[usize]) -> Result<Self> {
        let n = vertices.len();
        let mut slots = vec![0; n];
        for (t, &v) in vertices.iter().enumerate() {
            if v == 0 || v > n || slots[v - 1] != 0 {
                return Err(Error::InvalidPermutation(n));
            }
            slots[v - 1] = t + 1;
        }
        ArrivalOrder::from_slots(slots)
    }

    pub fn n(&self) -> usize {
        self.slot.len()
    }

    pub fn slot(&self, v: usize) -> usize {
        self.slot[v - 1]
    }

    pub fn vertex_at(&self, t: usize) -> usize {
        self.vertex[t - 1]
    }

    pub fn slots(&self) -> &[usize] {
        &self.slot
    }

    /// Vertices in arrival order.
    pub fn sequence(&self) -> &[usize] {
        &self.vertex
    }

    /// `self ∘ other`: vertex `v` goes to `self(other(v))`.
    pub fn compose(&self, other: &ArrivalOrder) -> ArrivalOrder {
        let slots = other.slot.iter().map(|&s| self.slot(s)).collect();
        ArrivalOrder::from_slots(slots).expect("composition of permutations")
    }

    /// Every permutation of `1..=n` in lexicographic order of slot vectors.
    pub fn all(n: usize) -> impl Iterator<Item = ArrivalOrder> {
        let mut cur: Option<Vec<usize>> = Some((1..=n).collect());
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            cur = next_permutation(out.clone());
            Some(ArrivalOrder::from_slots(out).expect("permutation"))
        })
    }
}

fn next_permutation(mut a: Vec<usize>) -> Option<Vec<usize>> {
    if a.len() < 2 {
        return None;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return None;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    Some(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Seller,
    Buyer,
}

/// A graph together with arrival and departure data.
///
/// Vertex `v` arrives at `σ(v)` and becomes critical at `σ(v) + d_v`, where
/// `d_v` is `departures[v - 1]` when present and `deadline` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnlineInstance {
    pub graph: WeightedGraph,
    pub sigma: ArrivalOrder,
    pub deadline: usize,
    pub departures: Option<Vec<usize>>,
    pub roles: Option<Vec<Role>>,
}

impl OnlineInstance {
    pub fn new(graph: WeightedGraph, sigma: ArrivalOrder, deadline: usize) -> Result<Self> {
        let inst = OnlineInstance {
            graph,
            sigma,
            deadline,
            departures: None,
            roles: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_roles(mut self, roles: Vec<Role>) -> Result<Self> {
        self.roles = Some(roles);
        self.validate()?;
        Ok(self)
    }

    pub fn with_departures(mut self, departures: Vec<usize>) -> Result<Self> {
        self.departures = Some(departures);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if self.sigma.n() != n {
            return Err(Error::LengthMismatch {
                what: "sigma",
                expected: n,
                found: self.sigma.n(),
            });
        }
        if let Some(d) = &self.departures {
            if d.len() != n {
                return Err(Error::LengthMismatch {
                    what: "departures",
                    expected: n,
                    found: d.len(),
                });
            }
        }
        if let Some(r) = &self.roles {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    what: "roles",
                    expected: n,
                    found: r.len(),
                });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn patience(&self, v: usize) -> usize {
        match &self.departures {
            Some(d) => d[v - 1],
            None => self.deadline,
        }
    }

    pub fn arrival(&self, v: usize) -> usize {
        self.sigma.slot(v)
    }

    /// The slot at which `v` becomes critical.
    pub fn critical(&self, v: usize) -> usize {
        self.arrival(v) + self.patience(v)
    }

    /// Whether `u` and `v` are ever present together.
    pub fn overlap(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.arrival(u) <= self.arrival(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.arrival(b) <= self.critical(a)
    }

    pub fn role(&self, v: usize) -> Option<Role> {
        self.roles.as_ref().map(|r| r[v - 1])
    }

    /// Same instance with every patience extended by `extra` slots.
    pub fn extended(&self, extra: usize) -> Self {
        let mut out = self.clone();
        out.deadline += extra;
        if let Some(d) = &mut out.departures {
            for x in d.iter_mut() {
                *x += extra;
            }
        }
        out
    }

    pub fn with_sigma(&self, sigma: ArrivalOrder) -> Self {
        let mut out = self.clone();
        out.sigma = sigma;
        out
    }

    /// Check the constrained bipartite shape: roles present, no edge inside a
    /// side, and every seller–buyer edge has the seller arriving first.
    pub fn check_constrained_bipartite(&self) -> Result<()> {
        let roles = self
            .roles
            .as_ref()
            .ok_or_else(|| Error::NotConstrainedBipartite("no roles given".into()))?;
        let g = build_online_graph(self);
        for (i, j, _) in g.edges() {
            let (ri, rj) = (roles[i - 1], roles[j - 1]);
            if ri == rj {
                return Err(Error::NotConstrainedBipartite(format!(
                    "edge ({i}, {j}) joins two {ri:?}s"
                )));
            }
            let (s, b) = if ri == Role::Seller { (i, j) } else { (j, i) };
            if self.arrival(b) < self.arrival(s) {
                return Err(Error::NotConstrainedBipartite(format!(
                    "buyer {b} arrives before seller {s}"
                )));
            }
        }
        Ok(())
    }
}

/// The graph of pairs that are ever present together, i.e. `G_{d,σ}` for
/// deterministic deadlines.
pub fn build_online_graph(inst: &OnlineInstance) -> WeightedGraph {
    let mut g = inst.graph.clone();
    let n = g.n();
    for i in 1..=n {
        for j in i + 1..=n {
            if !inst.overlap(i, j) && !g.weight(i, j).is_zero() {
                g.set_weight(i, j, Rational::zero());
            }
        }
    }
    g
}

/// A set of vertex-disjoint edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new() -> Self {
        Matching::default()
    }

    /// Normalizes each pair to `(min, max)` and sorts; rejects shared vertices.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        pairs.sort_unstable();
        let mut used = std::collections::HashSet::new();
        for &(a, b) in &pairs {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            for v in [a, b] {
                if !used.insert(v) {
                    return Err(Error::NotDisjoint(v));
                }
            }
        }
        Ok(Matching { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pairs.iter().any(|&(a, b)| a == v || b == v)
    }

    pub fn weight(&self, g: &WeightedGraph) -> Rational {
        matching_weight(g, &self.pairs)
    }
}

pub fn matching_weight(g: &WeightedGraph, pairs: &[(usize, usize)]) -> Rational {
    pairs.iter().map(|&(a, b)| g.weight(a, b)).sum()
}

/// A pair finalized at `time`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScheduledPair {
    pub u: usize,
    pub v: usize,
    pub time: usize,
}

/// Check that each pair is a positive edge, both endpoints are present at the
/// stated time, and no vertex is used twice.
pub fn validate_matching(inst: &OnlineInstance, pairs: &[ScheduledPair]) -> Result<()> {
    let n = inst.n();
    let mut used = vec![false; n + 1];
    for p in pairs {
        for v in [p.u, p.v] {
            if v == 0 || v > n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
        }
        if p.u == p.v {
            return Err(Error::SelfLoop(p.u));
        }
        if !inst.graph.has_edge(p.u, p.v) {
            return Err(Error::NotAnEdge(p.u, p.v));
        }
        for v in [p.u, p.v] {
            if p.time < inst.arrival(v) || p.time > inst.critical(v) {
                return Err(Error::Invalid(format!(
                    "vertex {v} is not present at time {} (window {}..={})",
                    p.time,
                    inst.arrival(v),
                    inst.critical(v)
                )));
            }
            if used[v] {
                return Err(Error::NotDisjoint(v));
            }
            used[v] = true;
        }
    }
    Ok(())
}

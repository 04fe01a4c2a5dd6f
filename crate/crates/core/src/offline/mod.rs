//! Exact offline benchmarks.

mod hungarian;

use std::collections::HashMap;

pub use hungarian::{hungarian_bipartite, AuctionMarket, BipartiteSolution, InsertReport, WarmStart};

use crate::error::{Error, Result};
use crate::graph::{build_online_graph, Matching, OnlineInstance, WeightedGraph};
use crate::rational::Rational;

/// Largest vertex count accepted by [`max_weight_matching_exact`].
pub const EXACT_MATCHING_CAP: usize = 24;

/// Maximum-weight matching by dynamic programming over vertex subsets.
///
/// Only positive-weight edges are used, and connected components are solved
/// separately. Among optimal matchings the one with the lexicographically
/// smallest sorted pair list is returned.
pub fn max_weight_matching_exact(g: &WeightedGraph) -> Result<Matching> {
    let n = g.n();
    if n > EXACT_MATCHING_CAP {
        return Err(Error::SizeCap {
            what: "exact matching",
            n,
            cap: EXACT_MATCHING_CAP,
        });
    }
    let mut pairs = Vec::new();
    for comp in components(g) {
        if comp.len() < 2 {
            continue;
        }
        let mut solver = ComponentDp::new(g, &comp);
        let full = (1u32 << comp.len()) - 1;
        solver.value(full);
        pairs.extend(solver.reconstruct(full));
    }
    Matching::from_pairs(pairs)
}

/// Value of a maximum-weight matching.
pub fn max_weight(g: &WeightedGraph) -> Result<Rational> {
    Ok(max_weight_matching_exact(g)?.weight(g))
}

/// `m(G_{d,σ})`, the offline benchmark for one arrival order.
pub fn offline_optimum(inst: &OnlineInstance) -> Result<Matching> {
    max_weight_matching_exact(&build_online_graph(inst))
}

fn components(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut comp = vec![usize::MAX; n + 1];
    let mut out = Vec::new();
    for s in 1..=n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut k = 0;
        while k < members.len() {
            let v = members[k];
            k += 1;
            for (u, _) in g.neighbors(v) {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    members.push(u);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

struct ComponentDp<'a> {
    verts: &'a [usize],
    w: Vec<Vec<Option<Rational>>>,
    memo: HashMap<u32, Rational>,
}

impl<'a> ComponentDp<'a> {
    fn new(g: &WeightedGraph, verts: &'a [usize]) -> Self {
        let k = verts.len();
        let mut w = vec![vec![None; k]; k];
        for a in 0..k {
            for b in a + 1..k {
                let x = g.weight(verts[a], verts[b]);
                if x.is_positive() {
                    w[a][b] = Some(x.clone());
                    w[b][a] = Some(x.clone());
                }
            }
        }
        ComponentDp {
            verts,
            w,
            memo: HashMap::new(),
        }
    }

    fn value(&mut self, mask: u32) -> Rational {
        if mask.count_ones() < 2 {
            return Rational::zero();
        }
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = self.value(rest);
        let mut m = rest;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            if let Some(w) = self.w[i][j].clone() {
                let cand = w + self.value(rest & !(1 << j));
                if cand > best {
                    best = cand;
                }
            }
        }
        self.memo.insert(mask, best.clone());
        best
    }

    /// Walk the memo preferring "match the lowest vertex to the smallest
    /// partner" over "leave it single", which yields the lexicographically
    /// smallest optimal pair list.
    fn reconstruct(&mut self, mut mask: u32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while mask.count_ones() >= 2 {
            let target = self.value(mask);
            let i = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << i);
            let mut chosen = None;
            let mut m = rest;
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                if let Some(w) = self.w[i][j].clone() {
                    if w + self.value(rest & !(1 << j)) == target {
                        chosen = Some(j);
                        break;
                    }
                }
            }
            match chosen {
                Some(j) => {
                    out.push((self.verts[i], self.verts[j]));
                    mask = rest & !(1 << j);
                }
                None => mask = rest,
            }
        }
        out
    }
}

/// Per-vertex dual values `λ_k ≥ 0`, indexed by vertex `k - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSolution {
    pub lambda: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualViolation {
    pub i: usize,
    pub j: usize,
    /// `λ_i + λ_j − v_ij`, negative on a violation.
    pub slack: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualReport {
    pub violations: Vec<DualViolation>,
    pub negative: Vec<usize>,
    pub dual_objective: Rational,
    pub weak_duality: bool,
}

impl DualReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty() && self.negative.is_empty()
    }
}

/// Check `v_ij ≤ λ_i + λ_j` on every edge of `G_{d,σ}` and `Σλ ≥ claimed`.
pub fn verify_offline_dual(
    inst: &OnlineInstance,
    dual: &DualSolution,
    claimed_primal: &Rational,
) -> Result<DualReport> {
    let n = inst.n();
    if dual.lambda.len() != n {
        return Err(Error::LengthMismatch {
            what: "dual vector",
            expected: n,
            found: dual.lambda.len(),
        });
    }
    let g = build_online_graph(inst);
    let lam = |v: usize| &dual.lambda[v - 1];
    let violations = g
        .edges()
        .filter_map(|(i, j, w)| {
            let slack = lam(i) + lam(j) - w;
            slack.is_negative().then_some(DualViolation { i, j, slack })
        })
        .collect();
    let negative = (1..=n).filter(|&v| lam(v).is_negative()).collect();
    let dual_objective: Rational = dual.lambda.iter().sum();
    Ok(DualReport {
        violations,
        negative,
        weak_duality: &dual_objective >= claimed_primal,
        dual_objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ArrivalOrder;
    use crate::rational::q;

    #[test]
    fn dominant_edge_in_triangle() {
        let eps = q(1, 100);
        let g = WeightedGraph::from_edges(3, &[(1, 2, eps.clone()), (2, 3, eps), (3, 1, q(1, 1))])
            .unwrap();
        let m = max_weight_matching_exact(&g).unwrap();
        assert_eq!(m.pairs(), &[(1, 3)]);
        assert_eq!(m.weight(&g), q(1, 1));
    }

    #[test]
    fn ties_pick_lexicographically_smallest() {
        let g = WeightedGraph::complete(4, q(1, 1));
        let m = max_weight_matching_exact(&g).unwrap();
        assert_eq!(m.pairs(), &[(1, 2), (3, 4)]);
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = WeightedGraph::empty(25);
        assert!(matches!(
            max_weight_matching_exact(&g),
            Err(Error::SizeCap { n: 25, .. })
        ));
    }

    #[test]
    fn path_dual_from_middle_vertex() {
        let g = WeightedGraph::from_edges(3, &[(1, 2, q(1, 1))]).unwrap();
        let inst = OnlineInstance::new(g, ArrivalOrder::identity(3), 1).unwrap();
        let dual = DualSolution {
            lambda: vec![q(0, 1), q(1, 1), q(0, 1)],
        };
        let opt = offline_optimum(&inst).unwrap().weight(&inst.graph);
        let r = verify_offline_dual(&inst, &dual, &opt).unwrap();
        assert!(r.feasible() && r.weak_duality);
        assert_eq!(r.dual_objective, q(1, 1));
    }

    #[test]
    fn violated_edge_reports_slack() {
        let g = WeightedGraph::from_edges(2, &[(1, 2, q(3, 1))]).unwrap();
        let inst = OnlineInstance::new(g, ArrivalOrder::identity(2), 1).unwrap();
        let dual = DualSolution {
            lambda: vec![q(1, 1), q(1, 1)],
        };
        let r = verify_offline_dual(&inst, &dual, &q(3, 1)).unwrap();
        assert_eq!(r.violations, vec![DualViolation { i: 1, j: 2, slack: q(-1, 1) }]);
        assert!(!r.weak_duality);
    }

    #[test]
    fn zero_deadline_has_no_edges() {
        let g = WeightedGraph::complete(4, q(1, 1));
        let inst = OnlineInstance::new(g, ArrivalOrder::identity(4), 0).unwrap();
        assert!(offline_optimum(&inst).unwrap().is_empty());
    }
}

//! Maximum-weight bipartite matching with prices, one buyer at a time.
//!
//! Sellers carry prices `p_s ≥ 0`, buyers carry margins `q_b ≥ 0`, and the
//! market keeps the dual constraints `p_s + q_b ≥ v_sb` together with
//! complementary slackness (matched edges tight, unmatched vertices at zero).
//! Inserting a buyer runs the ascending-auction limit: grow an alternating
//! tree along tight edges, raise the prices of reached sellers and lower the
//! margins of reached buyers until either an unmatched seller becomes
//! reachable (augment) or some reached buyer's margin hits zero (that buyer is
//! dropped and the tree path is flipped).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, Default)]
pub struct AuctionMarket {
    prices: BTreeMap<usize, Rational>,
    seller_match: BTreeMap<usize, usize>,
    margins: BTreeMap<usize, Rational>,
    buyer_match: BTreeMap<usize, usize>,
    // buyer -> seller -> positive weight
    edges: BTreeMap<usize, BTreeMap<usize, Rational>>,
}

/// What happened when a buyer joined the market.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertReport {
    /// `max_s v_sb − p_s` before any adjustment, `None` without edges.
    pub bid: Option<Rational>,
    /// The buyer's margin once the market settled.
    pub margin: Rational,
    /// A previously matched buyer that lost its seller.
    pub displaced: Option<usize>,
}

/// Duals and matching for a partially built market.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WarmStart {
    pub prices: BTreeMap<usize, Rational>,
    /// Margins of the buyers already in the market; other buyers are
    /// inserted one by one.
    pub margins: BTreeMap<usize, Rational>,
    /// `(seller, buyer)` pairs.
    pub matching: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteSolution {
    /// `(seller, buyer)` pairs sorted by seller.
    pub matching: Vec<(usize, usize)>,
    pub weight: Rational,
    pub prices: BTreeMap<usize, Rational>,
    pub margins: BTreeMap<usize, Rational>,
}

impl AuctionMarket {
    pub fn new() -> Self {
        AuctionMarket::default()
    }

    pub fn add_seller(&mut self, s: usize) -> Result<()> {
        if self.prices.contains_key(&s) {
            return Err(Error::Invalid(format!("seller {s} already present")));
        }
        self.prices.insert(s, Rational::zero());
        Ok(())
    }

    pub fn price(&self, s: usize) -> Option<&Rational> {
        self.prices.get(&s)
    }

    pub fn margin(&self, b: usize) -> Option<&Rational> {
        self.margins.get(&b)
    }

    pub fn prices(&self) -> &BTreeMap<usize, Rational> {
        &self.prices
    }

    pub fn margins(&self) -> &BTreeMap<usize, Rational> {
        &self.margins
    }

    pub fn match_of_seller(&self, s: usize) -> Option<usize> {
        self.seller_match.get(&s).copied()
    }

    pub fn match_of_buyer(&self, b: usize) -> Option<usize> {
        self.buyer_match.get(&b).copied()
    }

    /// `(seller, buyer)` pairs sorted by seller.
    pub fn matching(&self) -> Vec<(usize, usize)> {
        self.seller_match.iter().map(|(&s, &b)| (s, b)).collect()
    }

    pub fn matching_weight(&self) -> Rational {
        self.seller_match
            .iter()
            .map(|(s, b)| self.edges[b][s].clone())
            .sum()
    }

    /// `Σ p_s + Σ q_b` over everyone in the market.
    pub fn dual_total(&self) -> Rational {
        self.prices.values().chain(self.margins.values()).sum()
    }

    /// Insert buyer `b` with its weights to sellers already in the market.
    /// Nonpositive weights are ignored.
    pub fn add_buyer(
        &mut self,
        b: usize,
        weights: impl IntoIterator<Item = (usize, Rational)>,
    ) -> Result<InsertReport> {
        if self.margins.contains_key(&b) {
            return Err(Error::Invalid(format!("buyer {b} already present")));
        }
        let mut adj = BTreeMap::new();
        for (s, w) in weights {
            if !self.prices.contains_key(&s) {
                return Err(Error::Invalid(format!("buyer {b} bids on absent seller {s}")));
            }
            if w.is_positive() {
                adj.insert(s, w);
            }
        }
        let bid = adj
            .iter()
            .map(|(s, w)| w - &self.prices[s])
            .max();
        let start = bid.clone().unwrap_or_else(Rational::zero).max(Rational::zero());
        self.edges.insert(b, adj);
        self.margins.insert(b, start);
        let displaced = if self.margins[&b].is_positive() {
            self.settle(b)
        } else {
            None
        };
        Ok(InsertReport {
            bid,
            margin: self.margins[&b].clone(),
            displaced,
        })
    }

    /// Remove a seller; returns its partner and final price.
    pub fn remove_seller(&mut self, s: usize) -> Option<(Option<usize>, Rational)> {
        let p = self.prices.remove(&s)?;
        let partner = self.seller_match.remove(&s);
        if let Some(b) = partner {
            self.buyer_match.remove(&b);
        }
        for adj in self.edges.values_mut() {
            adj.remove(&s);
        }
        Some((partner, p))
    }

    /// Remove a buyer; returns its partner and final margin.
    pub fn remove_buyer(&mut self, b: usize) -> Option<(Option<usize>, Rational)> {
        let q = self.margins.remove(&b)?;
        let partner = self.buyer_match.remove(&b);
        if let Some(s) = partner {
            self.seller_match.remove(&s);
        }
        self.edges.remove(&b);
        Some((partner, q))
    }

    /// Runs the alternating-tree auction for buyer `root`, whose margin is
    /// positive. Returns the buyer that was dropped, if any.
    fn settle(&mut self, root: usize) -> Option<usize> {
        loop {
            // blue buyers -> the red seller they were reached through
            let mut blue: BTreeMap<usize, Option<usize>> = BTreeMap::new();
            // red sellers -> the blue buyer that reached them
            let mut red: BTreeMap<usize, usize> = BTreeMap::new();
            let mut queue = VecDeque::from([root]);
            blue.insert(root, None);
            while let Some(x) = queue.pop_front() {
                let qx = &self.margins[&x];
                let own = self.buyer_match.get(&x).copied();
                let tight: Vec<usize> = self.edges[&x]
                    .iter()
                    .filter(|(s, w)| own != Some(**s) && &self.prices[*s] + qx == **w)
                    .map(|(s, _)| *s)
                    .collect();
                for s in tight {
                    if red.contains_key(&s) {
                        continue;
                    }
                    red.insert(s, x);
                    match self.seller_match.get(&s).copied() {
                        None => {
                            self.flip_path(root, s, &red);
                            return None;
                        }
                        Some(y) => {
                            if let std::collections::btree_map::Entry::Vacant(e) = blue.entry(y) {
                                e.insert(Some(s));
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }

            let (low_buyer, delta1) = blue
                .keys()
                .map(|&x| (x, self.margins[&x].clone()))
                .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
                .expect("root is blue");
            let mut delta2: Option<Rational> = None;
            for x in blue.keys() {
                let qx = &self.margins[x];
                for (s, w) in &self.edges[x] {
                    if red.contains_key(s) {
                        continue;
                    }
                    let slack = &self.prices[s] + qx - w;
                    if delta2.as_ref().is_none_or(|d| slack < *d) {
                        delta2 = Some(slack);
                    }
                }
            }
            let delta = match &delta2 {
                Some(d2) if *d2 < delta1 => d2.clone(),
                _ => delta1.clone(),
            };
            for s in red.keys() {
                *self.prices.get_mut(s).unwrap() += &delta;
            }
            for x in blue.keys() {
                *self.margins.get_mut(x).unwrap() -= &delta;
            }
            if delta == delta1 {
                if low_buyer == root {
                    return None;
                }
                let s = blue[&low_buyer].expect("non-root blue buyers are matched");
                self.buyer_match.remove(&low_buyer);
                self.seller_match.remove(&s);
                self.flip_path(root, s, &red);
                return Some(low_buyer);
            }
        }
    }

    /// Match `end` to the buyer that reached it and shift every earlier
    /// match along the tree path back to `root`.
    fn flip_path(&mut self, root: usize, end: usize, red: &BTreeMap<usize, usize>) {
        let mut s = end;
        loop {
            let x = red[&s];
            let prev = self.buyer_match.insert(x, s);
            self.seller_match.insert(s, x);
            if x == root {
                break;
            }
            s = prev.expect("tree buyers other than the root are matched");
        }
    }

    /// Dual feasibility, nonnegativity and complementary slackness.
    pub fn check_optimality(&self) -> Result<()> {
        let fail = |m: String| Err(Error::WarmStart(m));
        for (s, p) in &self.prices {
            if p.is_negative() {
                return fail(format!("price of seller {s} is negative"));
            }
            if !self.seller_match.contains_key(s) && p.is_positive() {
                return fail(format!("unmatched seller {s} has positive price"));
            }
        }
        for (b, q) in &self.margins {
            if q.is_negative() {
                return fail(format!("margin of buyer {b} is negative"));
            }
            if !self.buyer_match.contains_key(b) && q.is_positive() {
                return fail(format!("unmatched buyer {b} has positive margin"));
            }
            for (s, w) in &self.edges[b] {
                let slack = &self.prices[s] + q - w;
                if slack.is_negative() {
                    return fail(format!("edge ({s}, {b}) violates p + q ≥ v"));
                }
                if self.buyer_match.get(b) == Some(s) && !slack.is_zero() {
                    return fail(format!("matched edge ({s}, {b}) is not tight"));
                }
            }
        }
        for (s, b) in &self.seller_match {
            if self.buyer_match.get(b) != Some(s) || !self.edges[b].contains_key(s) {
                return fail(format!("pair ({s}, {b}) is inconsistent"));
            }
        }
        Ok(())
    }
}

/// Solve a bipartite instance, optionally warm-started from optimal duals
/// of a sub-market. Buyers missing from `warm.margins` are inserted in the
/// order given.
pub fn hungarian_bipartite(
    sellers: &[usize],
    buyers: &[usize],
    weights: &[(usize, usize, Rational)],
    warm: Option<&WarmStart>,
) -> Result<BipartiteSolution> {
    let seller_set: BTreeSet<usize> = sellers.iter().copied().collect();
    let buyer_set: BTreeSet<usize> = buyers.iter().copied().collect();
    if seller_set.len() != sellers.len()
        || buyer_set.len() != buyers.len()
        || !seller_set.is_disjoint(&buyer_set)
    {
        return Err(Error::Invalid("sellers and buyers must be distinct".into()));
    }
    let mut adj: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
    for (s, b, w) in weights {
        if !seller_set.contains(s) || !buyer_set.contains(b) {
            return Err(Error::Invalid(format!("edge ({s}, {b}) is not seller-buyer")));
        }
        if w.is_negative() {
            return Err(Error::NegativeWeight {
                i: *s,
                j: *b,
                weight: w.to_string(),
            });
        }
        adj.entry(*b).or_default().insert(*s, w.clone());
    }

    let mut market = AuctionMarket::new();
    for &s in sellers {
        market.add_seller(s)?;
    }
    let empty = WarmStart::default();
    let warm = warm.unwrap_or(&empty);
    for (s, p) in &warm.prices {
        if !seller_set.contains(s) {
            return Err(Error::WarmStart(format!("price for unknown seller {s}")));
        }
        market.prices.insert(*s, p.clone());
    }
    for (b, q) in &warm.margins {
        if !buyer_set.contains(b) {
            return Err(Error::WarmStart(format!("margin for unknown buyer {b}")));
        }
        let edges = adj
            .get(b)
            .map(|m| {
                m.iter()
                    .filter(|(_, w)| w.is_positive())
                    .map(|(s, w)| (*s, w.clone()))
                    .collect()
            })
            .unwrap_or_default();
        market.edges.insert(*b, edges);
        market.margins.insert(*b, q.clone());
    }
    for &(s, b) in &warm.matching {
        if !market.margins.contains_key(&b) || !market.prices.contains_key(&s) {
            return Err(Error::WarmStart(format!("matched pair ({s}, {b}) not in market")));
        }
        if market.seller_match.insert(s, b).is_some() || market.buyer_match.insert(b, s).is_some() {
            return Err(Error::WarmStart(format!("pair ({s}, {b}) reuses a vertex")));
        }
        if !market.edges[&b].contains_key(&s) {
            return Err(Error::WarmStart(format!("pair ({s}, {b}) is not an edge")));
        }
    }
    market.check_optimality()?;

    for &b in buyers {
        if warm.margins.contains_key(&b) {
            continue;
        }
        let edges: Vec<(usize, Rational)> = adj
            .get(&b)
            .map(|m| m.iter().map(|(s, w)| (*s, w.clone())).collect())
            .unwrap_or_default();
        market.add_buyer(b, edges)?;
    }
    Ok(BipartiteSolution {
        matching: market.matching(),
        weight: market.matching_weight(),
        prices: market.prices.clone(),
        margins: market.margins.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn single_edge_keeps_the_surplus_with_the_buyer() {
        let sol = hungarian_bipartite(&[1], &[2], &[(1, 2, q(5, 1))], None).unwrap();
        assert_eq!(sol.matching, vec![(1, 2)]);
        assert_eq!(sol.prices[&1], q(0, 1));
        assert_eq!(sol.margins[&2], q(5, 1));
    }

    #[test]
    fn second_buyer_outbids_the_first() {
        let mut m = AuctionMarket::new();
        m.add_seller(1).unwrap();
        let r1 = m.add_buyer(2, [(1, q(1, 1))]).unwrap();
        assert_eq!(r1.margin, q(1, 1));
        let r2 = m.add_buyer(3, [(1, q(2, 1))]).unwrap();
        assert_eq!(r2.displaced, Some(2));
        assert_eq!(m.matching(), vec![(1, 3)]);
        assert_eq!(m.price(1), Some(&q(1, 1)));
        assert_eq!(m.margin(3), Some(&q(1, 1)));
        assert_eq!(m.margin(2), Some(&q(0, 1)));
        m.check_optimality().unwrap();
    }

    #[test]
    fn left_of_tightness_graph() {
        // sellers 1, 2 and buyer 3 with v13 = 3/5, v23 = 1
        let sol = hungarian_bipartite(&[1, 2], &[3], &[(1, 3, q(3, 5)), (2, 3, q(1, 1))], None)
            .unwrap();
        assert_eq!(sol.matching, vec![(2, 3)]);
        let total: Rational = sol.prices.values().chain(sol.margins.values()).sum();
        assert_eq!(total, q(1, 1));
    }

    #[test]
    fn infeasible_warm_start_is_rejected() {
        let warm = WarmStart {
            prices: BTreeMap::from([(1, q(0, 1))]),
            margins: BTreeMap::from([(2, q(1, 1))]),
            matching: vec![(1, 2)],
        };
        let err = hungarian_bipartite(&[1], &[2], &[(1, 2, q(3, 1))], Some(&warm));
        assert!(matches!(err, Err(Error::WarmStart(_))));
    }

    #[test]
    fn warm_start_matches_cold_solve() {
        let w = vec![
            (1, 4, q(3, 1)),
            (1, 5, q(2, 1)),
            (2, 4, q(4, 1)),
            (2, 6, q(1, 1)),
            (3, 5, q(5, 2)),
            (3, 6, q(3, 1)),
        ];
        let cold = hungarian_bipartite(&[1, 2, 3], &[4, 5, 6], &w, None).unwrap();
        let sub: Vec<_> = w.iter().filter(|e| e.1 != 6).cloned().collect();
        let partial = hungarian_bipartite(&[1, 2, 3], &[4, 5], &sub, None).unwrap();
        let warm = WarmStart {
            prices: partial.prices.clone(),
            margins: partial.margins.clone(),
            matching: partial.matching.clone(),
        };
        let hot = hungarian_bipartite(&[1, 2, 3], &[4, 5, 6], &w, Some(&warm)).unwrap();
        assert_eq!(hot.weight, cold.weight);
    }
}

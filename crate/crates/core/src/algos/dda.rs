use std::collections::BTreeMap;

use crate::engine::{OnlinePolicy, Pair, PolicyContext, RunSetup};
use crate::error::{Error, Result};
use crate::graph::Role;
use crate::offline::AuctionMarket;
use crate::rational::Rational;

/// Dual quantities recorded during a DDA run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DdaLog {
    /// Margin of each buyer right after its own arrival settled.
    pub initial_margin: BTreeMap<usize, Rational>,
    /// Price of each seller when it left.
    pub final_price: BTreeMap<usize, Rational>,
    /// Margin of each buyer when it left.
    pub final_margin: BTreeMap<usize, Rational>,
    /// Price of each seller after every arrival while it was present.
    pub price_paths: BTreeMap<usize, Vec<Rational>>,
    /// Margin of each buyer after every arrival while it was present.
    pub margin_paths: BTreeMap<usize, Vec<Rational>>,
    /// For each buyer arrival, the dual total of the vertices already there,
    /// before and after the auction.
    pub conservation: Vec<(Rational, Rational)>,
}

/// Dynamic deferred acceptance on constrained bipartite inputs.
///
/// Keeps a maximum-weight matching of the present vertices with optimal
/// prices and margins, updating it by one auction per buyer arrival. A seller
/// is finalized with its current buyer when it becomes critical; buyers that
/// lose their seller stay in the market until they leave.
#[derive(Clone, Debug, Default)]
pub struct Dda {
    roles: Vec<Role>,
    market: AuctionMarket,
    log: DdaLog,
}

impl Dda {
    pub fn new() -> Self {
        Dda::default()
    }

    pub fn log(&self) -> &DdaLog {
        &self.log
    }

    pub fn market(&self) -> &AuctionMarket {
        &self.market
    }

    fn snapshot(&mut self) {
        for (s, p) in self.market.prices() {
            self.log.price_paths.entry(*s).or_default().push(p.clone());
        }
        for (b, q) in self.market.margins() {
            self.log.margin_paths.entry(*b).or_default().push(q.clone());
        }
    }
}

impl OnlinePolicy for Dda {
    fn name(&self) -> String {
        "dda".into()
    }

    fn requires_constrained_bipartite(&self) -> bool {
        true
    }

    fn start(&mut self, setup: &RunSetup<'_>) -> Result<()> {
        let roles = setup
            .roles
            .ok_or_else(|| Error::NotConstrainedBipartite("dda needs roles".into()))?;
        self.roles = std::iter::once(Role::Seller).chain(roles.iter().copied()).collect();
        self.market = AuctionMarket::new();
        self.log = DdaLog::default();
        Ok(())
    }

    fn on_arrival(
        &mut self,
        _ctx: &mut PolicyContext<'_>,
        v: usize,
        revealed: &[(usize, Rational)],
    ) -> Result<Vec<Pair>> {
        match self.roles[v] {
            Role::Seller => self.market.add_seller(v)?,
            Role::Buyer => {
                let before = self.market.dual_total();
                let bids: Vec<(usize, Rational)> = revealed
                    .iter()
                    .filter(|(u, _)| self.market.price(*u).is_some())
                    .cloned()
                    .collect();
                let report = self.market.add_buyer(v, bids)?;
                let after = self.market.dual_total() - &report.margin;
                self.log.conservation.push((before, after));
                self.log.initial_margin.insert(v, report.margin);
            }
        }
        self.snapshot();
        Ok(vec![])
    }

    fn on_critical(&mut self, _ctx: &mut PolicyContext<'_>, v: usize) -> Result<Vec<Pair>> {
        match self.roles[v] {
            Role::Seller => {
                let (partner, p) = self.market.remove_seller(v).expect("seller present");
                self.log.final_price.insert(v, p);
                let Some(b) = partner else {
                    return Ok(vec![]);
                };
                let (_, q) = self.market.remove_buyer(b).expect("buyer present");
                self.log.final_margin.insert(b, q);
                Ok(vec![(v, b)])
            }
            Role::Buyer => {
                if let Some((_, q)) = self.market.remove_buyer(v) {
                    self.log.final_margin.insert(v, q);
                }
                Ok(vec![])
            }
        }
    }
}

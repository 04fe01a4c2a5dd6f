use std::collections::BTreeMap;

use crate::engine::{OnlinePolicy, Pair, PolicyContext, RunSetup};
use crate::error::{Error, Result};
use crate::graph::Role;
use crate::rational::Rational;

#[derive(Clone, Debug)]
struct SellerSlot {
    price: Rational,
    tentative: Option<usize>,
}

/// Greedy with free disposal on constrained bipartite inputs.
///
/// A buyer bids once, on arrival, for the seller maximizing `v − p(s)`; a
/// positive margin displaces the seller's previous buyer for good and sets the
/// price to the new weight. Sellers are finalized when critical.
///
/// The naive variant ignores declared roles and assigns each vertex a role
/// by a fair coin on arrival.
#[derive(Clone, Debug)]
pub struct Greedy {
    naive: bool,
    roles: Vec<Option<Role>>,
    sellers: BTreeMap<usize, SellerSlot>,
}

impl Greedy {
    pub fn new() -> Self {
        Greedy {
            naive: false,
            roles: Vec::new(),
            sellers: BTreeMap::new(),
        }
    }

    pub fn naive() -> Self {
        Greedy {
            naive: true,
            ..Greedy::new()
        }
    }

    pub fn price(&self, s: usize) -> Option<&Rational> {
        self.sellers.get(&s).map(|x| &x.price)
    }
}

impl Default for Greedy {
    fn default() -> Self {
        Greedy::new()
    }
}

impl OnlinePolicy for Greedy {
    fn name(&self) -> String {
        if self.naive { "naive-greedy" } else { "greedy" }.into()
    }

    fn requires_constrained_bipartite(&self) -> bool {
        !self.naive
    }

    fn start(&mut self, setup: &RunSetup<'_>) -> Result<()> {
        self.sellers.clear();
        self.roles = vec![None; setup.n + 1];
        if !self.naive {
            let roles = setup
                .roles
                .ok_or_else(|| Error::NotConstrainedBipartite("greedy needs roles".into()))?;
            for (i, r) in roles.iter().enumerate() {
                self.roles[i + 1] = Some(*r);
            }
        }
        Ok(())
    }

    fn on_arrival(
        &mut self,
        ctx: &mut PolicyContext<'_>,
        v: usize,
        revealed: &[(usize, Rational)],
    ) -> Result<Vec<Pair>> {
        if self.naive {
            self.roles[v] = Some(if ctx.flip() { Role::Seller } else { Role::Buyer });
        }
        match self.roles[v] {
            Some(Role::Seller) => {
                self.sellers.insert(
                    v,
                    SellerSlot {
                        price: Rational::zero(),
                        tentative: None,
                    },
                );
            }
            _ => {
                let mut best: Option<(usize, Rational, &Rational)> = None;
                for (u, w) in revealed {
                    let Some(slot) = self.sellers.get(u) else {
                        continue;
                    };
                    if !w.is_positive() {
                        continue;
                    }
                    let margin = w - &slot.price;
                    if best.as_ref().is_none_or(|(_, m, _)| margin > *m) {
                        best = Some((*u, margin, w));
                    }
                }
                if let Some((s, margin, w)) = best {
                    if margin.is_positive() {
                        let w = w.clone();
                        let slot = self.sellers.get_mut(&s).expect("seller present");
                        slot.price = w;
                        slot.tentative = Some(v);
                    }
                }
            }
        }
        Ok(vec![])
    }

    fn on_critical(&mut self, ctx: &mut PolicyContext<'_>, v: usize) -> Result<Vec<Pair>> {
        let Some(slot) = self.sellers.remove(&v) else {
            return Ok(vec![]);
        };
        Ok(match slot.tentative {
            Some(b) if ctx.is_present(b) && !ctx.is_matched(b) => vec![(v, b)],
            _ => vec![],
        })
    }
}

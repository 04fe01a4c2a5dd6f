use crate::engine::{OnlinePolicy, Pair, PolicyContext, RunSetup};
use crate::error::Result;
use crate::offline::DualSolution;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Undetermined,
    Seller,
    Buyer,
}

/// Postponed greedy on arbitrary graphs.
///
/// Every vertex `k` enters a virtual market as a seller copy `s_k` and a
/// buyer copy `b_k`. The buyer copy bids once, greedily, over the seller
/// copies present (its own included, at margin zero). When `k` is critical
/// and `s_k` holds a tentative buyer `b_l`, the pair leaves the virtual market
/// and `k`'s role is settled: by a fair coin if still undetermined. A seller
/// `k` collects `v_kl` and makes `l` a buyer; a buyer `k` makes `l` a seller.
///
/// The stochastic variant collects nothing when `l` is already gone.
#[derive(Clone, Debug, Default)]
pub struct PostponedGreedy {
    guard: bool,
    status: Vec<Status>,
    active: Vec<bool>,
    price: Vec<Rational>,
    tentative: Vec<Option<usize>>,
    margin: Vec<Rational>,
    final_price: Vec<Rational>,
}

impl PostponedGreedy {
    pub fn new() -> Self {
        PostponedGreedy::default()
    }

    /// The variant for random departures.
    pub fn stochastic() -> Self {
        PostponedGreedy {
            guard: true,
            ..PostponedGreedy::default()
        }
    }

    pub fn status(&self, v: usize) -> Status {
        self.status[v]
    }

    /// Price of `s_k` when `k` became critical.
    pub fn final_price(&self, v: usize) -> &Rational {
        &self.final_price[v]
    }

    /// Margin of `b_k`'s bid on arrival.
    pub fn margin(&self, v: usize) -> &Rational {
        &self.margin[v]
    }

    /// `λ_k = p^f(s_k) + q(b_k)`, valid once the run has finished.
    pub fn dual(&self) -> DualSolution {
        DualSolution {
            lambda: (1..self.status.len())
                .map(|k| &self.final_price[k] + &self.margin[k])
                .collect(),
        }
    }

    pub fn total_final_price(&self) -> Rational {
        self.final_price.iter().sum()
    }

    pub fn total_margin(&self) -> Rational {
        self.margin.iter().sum()
    }
}

impl OnlinePolicy for PostponedGreedy {
    fn name(&self) -> String {
        if self.guard { "pg-stochastic" } else { "pg" }.into()
    }

    fn start(&mut self, setup: &RunSetup<'_>) -> Result<()> {
        let n = setup.n + 1;
        self.status = vec![Status::Undetermined; n];
        self.active = vec![false; n];
        self.price = vec![Rational::zero(); n];
        self.tentative = vec![None; n];
        self.margin = vec![Rational::zero(); n];
        self.final_price = vec![Rational::zero(); n];
        Ok(())
    }

    fn on_arrival(
        &mut self,
        _ctx: &mut PolicyContext<'_>,
        k: usize,
        revealed: &[(usize, Rational)],
    ) -> Result<Vec<Pair>> {
        self.active[k] = true;
        // s_k itself is on offer at margin 0
        let mut best: (usize, Rational, Rational) = (k, Rational::zero(), Rational::zero());
        for (u, w) in revealed {
            if !self.active[*u] {
                continue;
            }
            let m = w - &self.price[*u];
            if m > best.1 || (m == best.1 && *u < best.0) {
                best = (*u, m, w.clone());
            }
        }
        let (s, m, w) = best;
        if m.is_positive() {
            self.tentative[s] = Some(k);
            self.price[s] = w;
        }
        self.margin[k] = m;
        Ok(vec![])
    }

    fn on_critical(&mut self, ctx: &mut PolicyContext<'_>, k: usize) -> Result<Vec<Pair>> {
        self.active[k] = false;
        self.final_price[k] = self.price[k].clone();
        let Some(l) = self.tentative[k] else {
            return Ok(vec![]);
        };
        if self.status[k] == Status::Undetermined {
            self.status[k] = if ctx.flip() { Status::Seller } else { Status::Buyer };
        }
        let other = match self.status[k] {
            Status::Seller => Status::Buyer,
            _ => Status::Seller,
        };
        if self.status[l] == Status::Undetermined {
            self.status[l] = other;
        }
        if self.status[k] != Status::Seller {
            return Ok(vec![]);
        }
        if self.guard && (!ctx.is_present(l) || ctx.is_matched(l)) {
            return Ok(vec![]);
        }
        Ok(vec![(k, l)])
    }
}

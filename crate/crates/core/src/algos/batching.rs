use std::collections::HashMap;

use crate::engine::{OnlinePolicy, Pair, PolicyContext, RunSetup};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::offline::max_weight_matching_exact;
use crate::rational::Rational;

/// Index `b ≥ 1` of the batch holding arrival slot `slot` when batches span
/// `window` consecutive slots: `window·(b − 1) < slot ≤ window·b`.
pub fn batch_index(slot: usize, window: usize) -> usize {
    (slot - 1) / window + 1
}

/// Solve a maximum-weight matching on each window of `d + l + 1` consecutive
/// arrivals, once the window's last vertex has arrived, and drop everyone
/// left unmatched. A final short window is solved at the last arrival.
///
/// With lookahead `l` every vertex is kept `l` extra slots, which is how the
/// engine models seeing the next `l` arrivals early.
#[derive(Clone, Debug, Default)]
pub struct Batching {
    lookahead: usize,
    window: usize,
    n: usize,
    arrived: Vec<usize>,
    weights: HashMap<(usize, usize), Rational>,
}

impl Batching {
    pub fn new(lookahead: usize) -> Self {
        Batching {
            lookahead,
            ..Batching::default()
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }
}

impl OnlinePolicy for Batching {
    fn name(&self) -> String {
        match self.lookahead {
            0 => "batching".into(),
            l => format!("batching:{l}"),
        }
    }

    fn lookahead(&self) -> usize {
        self.lookahead
    }

    fn requires_deterministic_deadline(&self) -> bool {
        true
    }

    fn start(&mut self, setup: &RunSetup<'_>) -> Result<()> {
        let d = setup
            .deadline
            .ok_or_else(|| Error::Invalid("batching needs a common deadline".into()))?;
        self.window = d + self.lookahead + 1;
        self.n = setup.n;
        self.arrived.clear();
        self.weights.clear();
        Ok(())
    }

    fn on_arrival(
        &mut self,
        _ctx: &mut PolicyContext<'_>,
        v: usize,
        revealed: &[(usize, Rational)],
    ) -> Result<Vec<Pair>> {
        for (u, w) in revealed {
            if w.is_positive() {
                self.weights.insert(((*u).min(v), (*u).max(v)), w.clone());
            }
        }
        self.arrived.push(v);
        let t = self.arrived.len();
        if !t.is_multiple_of(self.window) && t != self.n {
            return Ok(vec![]);
        }
        let batch = &self.arrived[(t - 1) / self.window * self.window..];
        let mut edges = Vec::new();
        for (a, &x) in batch.iter().enumerate() {
            for (b, &y) in batch.iter().enumerate().skip(a + 1) {
                if let Some(w) = self.weights.get(&(x.min(y), x.max(y))) {
                    edges.push((a + 1, b + 1, w.clone()));
                }
            }
        }
        let local = WeightedGraph::from_edges(batch.len(), &edges)?;
        let m = max_weight_matching_exact(&local)?;
        Ok(m
            .pairs()
            .iter()
            .map(|&(a, b)| (batch[a - 1], batch[b - 1]))
            .collect())
    }

    fn on_critical(&mut self, _ctx: &mut PolicyContext<'_>, _v: usize) -> Result<Vec<Pair>> {
        Ok(vec![])
    }
}

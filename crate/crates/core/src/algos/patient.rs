use std::collections::BTreeMap;

use crate::engine::{OnlinePolicy, Pair, PolicyContext, RunSetup};
use crate::error::Result;
use crate::rational::Rational;

/// Baseline that waits: a critical vertex takes its heaviest present,
/// unmatched neighbor (lowest index on ties).
#[derive(Clone, Debug, Default)]
pub struct Patient {
    adj: Vec<BTreeMap<usize, Rational>>,
}

impl Patient {
    pub fn new() -> Self {
        Patient::default()
    }
}

impl OnlinePolicy for Patient {
    fn name(&self) -> String {
        "patient".into()
    }

    fn start(&mut self, setup: &RunSetup<'_>) -> Result<()> {
        self.adj = vec![BTreeMap::new(); setup.n + 1];
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
                self.adj[v].insert(*u, w.clone());
                self.adj[*u].insert(v, w.clone());
            }
        }
        Ok(vec![])
    }

    fn on_critical(&mut self, ctx: &mut PolicyContext<'_>, v: usize) -> Result<Vec<Pair>> {
        if ctx.is_matched(v) {
            return Ok(vec![]);
        }
        let mut best: Option<(usize, &Rational)> = None;
        for (u, w) in &self.adj[v] {
            if !ctx.is_present(*u) || ctx.is_matched(*u) {
                continue;
            }
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((*u, w));
            }
        }
        Ok(best.map(|(u, _)| vec![(v, u)]).unwrap_or_default())
    }
}

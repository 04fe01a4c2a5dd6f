//! Online matching policies.

mod batching;
mod dda;
mod greedy;
mod patient;
mod pg;

use std::fmt;
use std::str::FromStr;

pub use batching::{batch_index, Batching};
pub use dda::{Dda, DdaLog};
pub use greedy::Greedy;
pub use patient::Patient;
pub use pg::{PostponedGreedy, Status};

use crate::engine::OnlinePolicy;
use crate::error::Error;

/// Policy names accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Greedy,
    NaiveGreedy,
    PostponedGreedy,
    PostponedGreedyStochastic,
    Dda,
    Batching { lookahead: usize },
    Patient,
}

impl PolicyKind {
    pub fn build(self) -> Box<dyn OnlinePolicy + Send> {
        match self {
            PolicyKind::Greedy => Box::new(Greedy::new()),
            PolicyKind::NaiveGreedy => Box::new(Greedy::naive()),
            PolicyKind::PostponedGreedy => Box::new(PostponedGreedy::new()),
            PolicyKind::PostponedGreedyStochastic => Box::new(PostponedGreedy::stochastic()),
            PolicyKind::Dda => Box::new(Dda::new()),
            PolicyKind::Batching { lookahead } => Box::new(Batching::new(lookahead)),
            PolicyKind::Patient => Box::new(Patient::new()),
        }
    }

    /// Whether the policy ever flips a coin.
    pub fn randomized(self) -> bool {
        matches!(
            self,
            PolicyKind::NaiveGreedy
                | PolicyKind::PostponedGreedy
                | PolicyKind::PostponedGreedyStochastic
        )
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Greedy => f.write_str("greedy"),
            PolicyKind::NaiveGreedy => f.write_str("naive-greedy"),
            PolicyKind::PostponedGreedy => f.write_str("pg"),
            PolicyKind::PostponedGreedyStochastic => f.write_str("pg-stochastic"),
            PolicyKind::Dda => f.write_str("dda"),
            PolicyKind::Batching { lookahead: 0 } => f.write_str("batching"),
            PolicyKind::Batching { lookahead } => write!(f, "batching:{lookahead}"),
            PolicyKind::Patient => f.write_str("patient"),
        }
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Invalid(format!("unknown policy {s:?}"));
        Ok(match s.trim() {
            "greedy" => PolicyKind::Greedy,
            "naive-greedy" => PolicyKind::NaiveGreedy,
            "pg" => PolicyKind::PostponedGreedy,
            "pg-stochastic" => PolicyKind::PostponedGreedyStochastic,
            "dda" => PolicyKind::Dda,
            "batching" => PolicyKind::Batching { lookahead: 0 },
            "patient" => PolicyKind::Patient,
            other => {
                let l = other.strip_prefix("batching:").ok_or_else(bad)?;
                PolicyKind::Batching {
                    lookahead: l.parse().map_err(|_| bad())?,
                }
            }
        })
    }
}

//! Online maximum-weight matching when vertices wait a bounded time.
//!
//! Vertices arrive one per slot and stay for `d` slots (or a random
//! patience); a pair can be matched only while both are present. The crate
//! provides the offline benchmark, an event-driven simulator with exact
//! expectations over coin flips, the classic online policies, and tools for
//! building and checking the batching cover certificates that bound the
//! random-order performance of batching.
//!
//! ```
//! use deadline_matching::prelude::*;
//!
//! let g = WeightedGraph::from_edges(3, &[(1, 2, q(1, 1)), (2, 3, q(2, 1))]).unwrap();
//! let inst = OnlineInstance::new(g, ArrivalOrder::identity(3), 1).unwrap();
//! let opt = offline_optimum(&inst).unwrap().weight(&inst.graph);
//! let pg = exact_expectation(&inst, &mut PostponedGreedy::new()).unwrap();
//! assert_eq!(opt, q(2, 1));
//! assert!(pg.value * q(4, 1) >= opt);
//! ```

pub mod algos;
pub mod cover;
pub mod engine;
pub mod error;
pub mod gallery;
pub mod generate;
pub mod graph;
pub mod instance_io;
pub mod offline;
pub mod rational;
pub mod report;
pub mod stochastic;
pub mod surd;

pub use error::{Error, Result};

/// The names most programs need.
pub mod prelude {
    pub use crate::algos::{Batching, Dda, Greedy, Patient, PolicyKind, PostponedGreedy};
    pub use crate::cover::certificate::{verify_certificate, CoverCertificate};
    pub use crate::cover::lp::{solve_cover_lp, CoverLpVariant};
    pub use crate::cover::mask::cycle_power;
    pub use crate::engine::{
        exact_expectation, for_each_branch, simulate, OnlinePolicy, RunResult,
    };
    pub use crate::error::{Error, Result};
    pub use crate::graph::{
        build_online_graph, ArrivalOrder, Matching, OnlineInstance, Role, WeightedGraph,
    };
    pub use crate::offline::{max_weight_matching_exact, offline_optimum, verify_offline_dual};
    pub use crate::rational::{q, Rational};
    pub use crate::stochastic::DepartureModel;
}

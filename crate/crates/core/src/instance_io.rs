//! JSON instance files.
//!
//! ```json
//! {"n": 3, "d": 1, "edges": [[1, 2, "1"], [2, 3, "1/2"]], "sigma": [1, 2, 3]}
//! ```
//!
//! Optional fields: `sigma` (slot of each vertex, default identity),
//! `departures` (per-vertex patience), `roles` (`"seller"`/`"buyer"` per
//! vertex) and `departure_model` (`{"kind": "geometric", "delta": "1/2"}`).
//! Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ArrivalOrder, OnlineInstance, Role, WeightedGraph};
use crate::rational::Rational;
use crate::stochastic::DepartureModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<(usize, usize, Rational)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub departures: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<Vec<Role>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub departure_model: Option<DepartureModel>,
}

impl InstanceFile {
    pub fn from_instance(inst: &OnlineInstance) -> Self {
        let sigma = inst.sigma.slots().to_vec();
        let identity = sigma.iter().enumerate().all(|(i, &s)| s == i + 1);
        InstanceFile {
            n: inst.n(),
            d: inst.deadline,
            edges: inst
                .graph
                .edges()
                .map(|(i, j, w)| (i, j, w.clone()))
                .collect(),
            sigma: (!identity).then_some(sigma),
            departures: inst.departures.clone(),
            roles: inst.roles.clone(),
            departure_model: None,
        }
    }

    /// Build the instance. A `departure_model` is not sampled here; see
    /// [`crate::stochastic::sample_departures`].
    pub fn to_instance(&self) -> Result<OnlineInstance> {
        if self.departures.is_some() && self.departure_model.is_some() {
            return Err(Error::Invalid(
                "give either departures or departure_model, not both".into(),
            ));
        }
        let graph = WeightedGraph::from_edges(self.n, &self.edges)?;
        let sigma = match &self.sigma {
            Some(s) => ArrivalOrder::from_slots(s.clone())?,
            None => ArrivalOrder::identity(self.n),
        };
        let mut inst = OnlineInstance::new(graph, sigma, self.d)?;
        if let Some(d) = &self.departures {
            inst = inst.with_departures(d.clone())?;
        }
        if let Some(r) = &self.roles {
            inst = inst.with_roles(r.clone())?;
        }
        Ok(inst)
    }
}

pub fn parse_instance(json: &str) -> Result<InstanceFile> {
    Ok(serde_json::from_str(json)?)
}

pub fn instance_to_json(inst: &OnlineInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("serializable")
}

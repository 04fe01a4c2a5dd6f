//! Expected performance of policies against the offline optimum.

use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algos::PolicyKind;
use crate::engine::{derive_seed, exact_expectation, simulate};
use crate::error::{Error, Result};
use crate::graph::{ArrivalOrder, OnlineInstance};
use crate::offline::offline_optimum;
use crate::rational::Rational;
use crate::stochastic::{sample_departures, DepartureModel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ArrivalModel {
    /// The instance's own order.
    #[default]
    Fixed,
    /// Uniformly random order.
    Uniform,
}

impl fmt::Display for ArrivalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArrivalModel::Fixed => "fixed",
            ArrivalModel::Uniform => "uniform",
        })
    }
}

impl std::str::FromStr for ArrivalModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(ArrivalModel::Fixed),
            "uniform" => Ok(ArrivalModel::Uniform),
            _ => Err(Error::Invalid(format!("unknown arrival model {s:?}"))),
        }
    }
}

/// Largest number of orders enumerated exactly under [`ArrivalModel::Uniform`].
pub const EXACT_ORDER_CAP: usize = 40_320;

/// Largest estimated number of runs (orders times coin branches) done exactly.
pub const EXACT_RUN_BUDGET: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct ReportConfig {
    pub arrival: ArrivalModel,
    /// Force Monte Carlo with this many samples; `None` means exact when
    /// within the caps and [`ReportConfig::fallback_samples`] otherwise.
    pub samples: Option<u64>,
    pub fallback_samples: u64,
    pub seed: u64,
    /// Random patiences; always estimated by sampling.
    pub departures: Option<DepartureModel>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            arrival: ArrivalModel::Fixed,
            samples: None,
            fallback_samples: 10_000,
            seed: 0,
            departures: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Estimate {
    Exact(Rational),
    Sampled { mean: f64, stderr: f64 },
}

impl Estimate {
    pub fn to_f64(&self) -> f64 {
        match self {
            Estimate::Exact(r) => r.to_f64(),
            Estimate::Sampled { mean, .. } => *mean,
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimate::Exact(r) => write!(f, "{r}"),
            Estimate::Sampled { mean, .. } => write!(f, "{mean:.6}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub instance_id: String,
    pub policy: PolicyKind,
    pub arrival_model: ArrivalModel,
    pub n: usize,
    pub d: usize,
    /// `None` for exact rows.
    pub samples: Option<u64>,
    pub alg: Estimate,
    pub off: Estimate,
    pub ratio: Estimate,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance_id: &'a str,
    policy: String,
    arrival_model: String,
    n: usize,
    d: usize,
    samples_or_exact: String,
    alg_value: String,
    off_value: String,
    ratio: String,
}

fn ratio_of(alg: &Estimate, off: &Estimate) -> Estimate {
    match (alg, off) {
        (Estimate::Exact(a), Estimate::Exact(o)) if o.is_positive() => Estimate::Exact(a / o),
        (Estimate::Exact(_), Estimate::Exact(_)) => Estimate::Exact(Rational::one()),
        _ => {
            let o = off.to_f64();
            Estimate::Sampled {
                mean: if o > 0.0 { alg.to_f64() / o } else { 1.0 },
                stderr: f64::NAN,
            }
        }
    }
}

fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// Whether [`competitive_report`] will compute exactly.
pub fn exact_feasible(inst: &OnlineInstance, policies: &[PolicyKind], cfg: &ReportConfig) -> bool {
    if cfg.samples.is_some() || cfg.departures.is_some() {
        return false;
    }
    let orders = match cfg.arrival {
        ArrivalModel::Fixed => 1,
        ArrivalModel::Uniform => match factorial(inst.n()) {
            Some(f) if f <= EXACT_ORDER_CAP => f,
            _ => return false,
        },
    };
    let branches: u64 = if policies.iter().any(|p| p.randomized()) {
        1u64.checked_shl(inst.n() as u32).unwrap_or(u64::MAX)
    } else {
        1
    };
    (orders as u64).saturating_mul(branches) <= EXACT_RUN_BUDGET
}

/// One row per policy for `inst`.
pub fn competitive_report(
    instance_id: &str,
    inst: &OnlineInstance,
    policies: &[PolicyKind],
    cfg: &ReportConfig,
) -> Result<Vec<ReportRow>> {
    inst.validate()?;
    let row = |policy: PolicyKind, samples, alg: Estimate, off: Estimate| ReportRow {
        instance_id: instance_id.to_string(),
        policy,
        arrival_model: cfg.arrival,
        n: inst.n(),
        d: inst.deadline,
        samples,
        ratio: ratio_of(&alg, &off),
        alg,
        off,
    };
    if exact_feasible(inst, policies, cfg) {
        let orders: Vec<OnlineInstance> = match cfg.arrival {
            ArrivalModel::Fixed => vec![inst.clone()],
            ArrivalModel::Uniform => ArrivalOrder::all(inst.n()).map(|s| inst.with_sigma(s)).collect(),
        };
        let count = Rational::integer(orders.len() as i64);
        let off: Rational = orders
            .par_iter()
            .map(|o| Ok(offline_optimum(o)?.weight(&o.graph)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<Rational>()
            / &count;
        return policies
            .iter()
            .map(|&p| {
                let alg: Rational = orders
                    .par_iter()
                    .map(|o| Ok(exact_expectation(o, &mut p.build())?.value))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .sum::<Rational>()
                    / &count;
                Ok(row(p, None, Estimate::Exact(alg), Estimate::Exact(off.clone())))
            })
            .collect();
    }

    let samples = cfg.samples.unwrap_or(cfg.fallback_samples).max(1);
    let draws: Vec<(f64, Vec<f64>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut run = inst.clone();
            if cfg.arrival == ArrivalModel::Uniform {
                let mut seq: Vec<usize> = (1..=inst.n()).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &format!("sigma:{instance_id}"), i));
                seq.shuffle(&mut rng);
                run = run.with_sigma(ArrivalOrder::from_sequence(&seq)?);
            }
            if let Some(model) = &cfg.departures {
                let seed = derive_seed(cfg.seed, &format!("departures:{instance_id}"), i);
                run = run.with_departures(sample_departures(model, inst.n(), seed)?)?;
            }
            let off = offline_optimum(&run)?.weight(&run.graph).to_f64();
            let algs = policies
                .iter()
                .map(|p| {
                    let seed = derive_seed(cfg.seed, &format!("coins:{instance_id}:{p}"), i);
                    Ok(simulate(&run, &mut p.build(), seed)?.collected.to_f64())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((off, algs))
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = |xs: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = xs.collect();
        let m = v.len() as f64;
        let mean = v.iter().sum::<f64>() / m;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        Estimate::Sampled {
            mean,
            stderr: (var / m).sqrt(),
        }
    };
    let off = stats(&mut draws.iter().map(|(o, _)| *o));
    Ok(policies
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let alg = stats(&mut draws.iter().map(|(_, a)| a[k]));
            row(p, Some(samples), alg, off.clone())
        })
        .collect())
}

/// Write rows with the header
/// `instance_id,policy,arrival_model,n,d,samples_or_exact,alg_value,off_value,ratio`.
pub fn write_csv<W: Write>(out: W, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            instance_id: &r.instance_id,
            policy: r.policy.to_string(),
            arrival_model: r.arrival_model.to_string(),
            n: r.n,
            d: r.d,
            samples_or_exact: r.samples.map_or("exact".to_string(), |s| s.to_string()),
            alg_value: r.alg.to_string(),
            off_value: r.off.to_string(),
            ratio: r.ratio.to_string(),
        })
        .map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{make_instance, parse_params};
    use crate::rational::q;

    #[test]
    fn three_cycle_uniform_batching() {
        let i = make_instance("random-order-3cycle", &parse_params(&["v12=1", "v23=2", "v31=4"]).unwrap()).unwrap();
        let cfg = ReportConfig {
            arrival: ArrivalModel::Uniform,
            ..Default::default()
        };
        let rows = competitive_report("c3", &i.instance, &[PolicyKind::Batching { lookahead: 0 }], &cfg).unwrap();
        assert_eq!(rows[0].alg, Estimate::Exact(q(7, 3)));
        assert_eq!(rows[0].off, Estimate::Exact(q(2 + 4 + 4, 3)));
        assert_eq!(rows[0].samples, None);
    }

    #[test]
    fn vanishing_weights_halve() {
        let i = make_instance("random-order-3cycle", &parse_params(&["v12=1/1000", "v23=1/1000"]).unwrap()).unwrap();
        let cfg = ReportConfig {
            arrival: ArrivalModel::Uniform,
            ..Default::default()
        };
        let rows = competitive_report("c3", &i.instance, &[PolicyKind::Batching { lookahead: 0 }], &cfg).unwrap();
        let Estimate::Exact(r) = &rows[0].ratio else { panic!() };
        assert!((r.to_f64() - 0.5).abs() < 0.01);
    }

    #[test]
    fn csv_is_deterministic() {
        let i = make_instance("pg-tightness", &[]).unwrap();
        let cfg = ReportConfig {
            arrival: ArrivalModel::Uniform,
            samples: Some(200),
            seed: 7,
            ..Default::default()
        };
        let policies = [PolicyKind::PostponedGreedy, PolicyKind::Batching { lookahead: 0 }];
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&mut a, &competitive_report("t", &i.instance, &policies, &cfg).unwrap()).unwrap();
        write_csv(&mut b, &competitive_report("t", &i.instance, &policies, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("instance_id,policy,arrival_model,n,d,samples_or_exact,alg_value,off_value,ratio\n"));
        assert_eq!(text.lines().count(), 3);
    }
}

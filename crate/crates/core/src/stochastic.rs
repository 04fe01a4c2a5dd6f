//! Random departure times.
//!
//! A vertex arriving at slot `t` with patience `d_i` is critical at `t + d_i`.
//! Under [`DepartureModel::Geometric`] the patience counts failures before the
//! first success of a `δ`-coin, so its support is `{0, 1, 2, …}` and its mean
//! is `(1 − δ)/δ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::algos::PostponedGreedy;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DepartureModel {
    Deterministic { d: usize },
    Geometric { delta: Rational },
    /// Finite distribution given as `(value, probability)` pairs.
    Discrete { pmf: Vec<(usize, Rational)> },
    /// One fixed patience per vertex.
    Explicit { offsets: Vec<usize> },
}

/// `deterministic:D`, `geometric:δ`, or the JSON form.
impl std::str::FromStr for DepartureModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let model = if s.starts_with('{') {
            serde_json::from_str(s)?
        } else {
            match s.split_once(':') {
                Some(("deterministic", d)) => DepartureModel::Deterministic {
                    d: d.parse().map_err(|_| Error::Invalid(format!("bad patience {d:?}")))?,
                },
                Some(("geometric", delta)) => DepartureModel::Geometric {
                    delta: delta.parse()?,
                },
                _ => return Err(Error::Invalid(format!("unknown departure model {s:?}"))),
            }
        };
        model.validate()?;
        Ok(model)
    }
}

impl DepartureModel {
    pub fn geometric(delta: Rational) -> Self {
        DepartureModel::Geometric { delta }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DepartureModel::Geometric { delta } => {
                if !delta.is_positive() || *delta >= Rational::one() {
                    return Err(Error::Invalid(format!("geometric rate {delta} not in (0, 1)")));
                }
            }
            DepartureModel::Discrete { pmf } => {
                if pmf.is_empty() || pmf.iter().any(|(_, p)| p.is_negative()) {
                    return Err(Error::Invalid("pmf must be nonempty and nonnegative".into()));
                }
                let total: Rational = pmf.iter().map(|(_, p)| p).sum();
                if total != Rational::one() {
                    return Err(Error::Invalid(format!("pmf sums to {total}, not 1")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `P[X ≥ g]` and `P[X ≥ g, X − g ≤ Y]` for independent copies `X, Y`.
    fn tail_pair(&self, g: usize) -> (Rational, Rational) {
        match self {
            DepartureModel::Deterministic { d } => {
                let hit = if *d >= g { Rational::one() } else { Rational::zero() };
                (hit.clone(), hit)
            }
            DepartureModel::Geometric { delta } => {
                // Σ_{x ≥ g} δ r^x · r^{x−g} = δ r^g / (1 − r²)
                let r = Rational::one() - delta;
                let tail = r.pow(g as i32);
                let joint = delta * &tail / (Rational::one() - &r * &r);
                (tail, joint)
            }
            DepartureModel::Discrete { pmf } => {
                let mut tail = Rational::zero();
                let mut joint = Rational::zero();
                for (x, p) in pmf.iter().filter(|(x, _)| *x >= g) {
                    tail += p;
                    let surv: Rational = pmf
                        .iter()
                        .filter(|(y, _)| *y + g >= *x)
                        .map(|(_, q)| q)
                        .sum();
                    joint += p * surv;
                }
                (tail, joint)
            }
            DepartureModel::Explicit { .. } => unreachable!("handled per vertex"),
        }
    }
}

/// Per-vertex patience draws, reproducible from `seed`.
pub fn sample_departures(model: &DepartureModel, n: usize, seed: u64) -> Result<Vec<usize>> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match model {
        DepartureModel::Deterministic { d } => vec![*d; n],
        DepartureModel::Geometric { delta } => {
            let dist = Geometric::new(delta.to_f64())
                .map_err(|e| Error::Invalid(format!("geometric rate: {e}")))?;
            (0..n).map(|_| dist.sample(&mut rng) as usize).collect()
        }
        DepartureModel::Discrete { pmf } => {
            let dist = WeightedIndex::new(pmf.iter().map(|(_, p)| p.to_f64()))
                .map_err(|e| Error::Invalid(format!("pmf: {e}")))?;
            (0..n).map(|_| pmf[dist.sample(&mut rng)].0).collect()
        }
        DepartureModel::Explicit { offsets } => {
            if offsets.len() != n {
                return Err(Error::LengthMismatch {
                    what: "departure offsets",
                    expected: n,
                    found: offsets.len(),
                });
            }
            offsets.clone()
        }
    })
}

/// `min_{i<j≤horizon} P[i + d_i ≤ j + d_j | i + d_i ≥ j]`, skipping pairs
/// whose conditioning event has probability zero. `None` when every pair is
/// skipped.
pub fn hazard_alpha(model: &DepartureModel, horizon: usize) -> Result<Option<Rational>> {
    model.validate()?;
    let mut best: Option<Rational> = None;
    let mut consider = |p: Rational| {
        best = Some(match best.take() {
            Some(b) => b.min(p),
            None => p,
        });
    };
    match model {
        DepartureModel::Explicit { offsets } => {
            let h = horizon.min(offsets.len());
            for i in 1..=h {
                for j in i + 1..=h {
                    let (di, dj) = (offsets[i - 1], offsets[j - 1]);
                    if i + di >= j {
                        consider(if i + di <= j + dj {
                            Rational::one()
                        } else {
                            Rational::zero()
                        });
                    }
                }
            }
        }
        _ => {
            // iid patience: only the gap j − i matters
            for g in 1..horizon {
                let (tail, joint) = model.tail_pair(g);
                if tail.is_positive() {
                    consider(joint / tail);
                }
            }
        }
    }
    Ok(best)
}

/// Postponed greedy with the departed-partner guard.
pub fn pg_stochastic() -> PostponedGreedy {
    PostponedGreedy::stochastic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn deterministic_samples_are_constant() {
        let m = DepartureModel::Deterministic { d: 3 };
        assert_eq!(sample_departures(&m, 5, 9).unwrap(), vec![3; 5]);
        assert_eq!(hazard_alpha(&m, 6).unwrap(), Some(q(1, 1)));
    }

    #[test]
    fn geometric_alpha_closed_form() {
        for (a, b) in [(1, 2), (1, 3), (9, 10)] {
            let delta = q(a, b);
            let alpha = hazard_alpha(&DepartureModel::geometric(delta.clone()), 8)
                .unwrap()
                .unwrap();
            assert_eq!(alpha, Rational::one() / (q(2, 1) - delta));
            assert!(alpha >= q(1, 2));
        }
    }

    #[test]
    fn bad_rates_are_rejected() {
        assert!(sample_departures(&DepartureModel::geometric(q(0, 1)), 3, 0).is_err());
        assert!(sample_departures(&DepartureModel::geometric(q(1, 1)), 3, 0).is_err());
        let pmf = DepartureModel::Discrete {
            pmf: vec![(0, q(1, 2))],
        };
        assert!(pmf.validate().is_err());
    }

    #[test]
    fn samples_are_reproducible() {
        let m = DepartureModel::geometric(q(1, 2));
        assert_eq!(
            sample_departures(&m, 20, 4).unwrap(),
            sample_departures(&m, 20, 4).unwrap()
        );
    }

    #[test]
    fn parse_short_forms() {
        assert_eq!("geometric:1/2".parse::<DepartureModel>().unwrap(), DepartureModel::geometric(q(1, 2)));
        assert_eq!(
            "deterministic:3".parse::<DepartureModel>().unwrap(),
            DepartureModel::Deterministic { d: 3 }
        );
        assert!(r#"{"kind":"explicit","offsets":[1,2]}"#.parse::<DepartureModel>().is_ok());
        assert!("geometric:2".parse::<DepartureModel>().is_err());
        assert!("poisson:1".parse::<DepartureModel>().is_err());
    }
}

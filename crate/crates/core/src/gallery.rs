//! Named hard instances and the small games behind the lower bounds.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{ArrivalOrder, OnlineInstance, Role, WeightedGraph};
use crate::rational::{q, Rational};
use crate::surd::{ExactField, Surd5};

pub const NAMES: [&str; 5] = [
    "basic-tradeoff",
    "constrained-deterministic-lb",
    "constrained-randomized-lb",
    "pg-tightness",
    "random-order-3cycle",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedInstance {
    pub name: String,
    pub params: BTreeMap<String, Rational>,
    pub instance: OnlineInstance,
}

/// Rational stand-in for `(√5 − 1)/2` used when no `w` is given.
pub fn default_golden_weight() -> Rational {
    q(987, 1597)
}

fn defaults(name: &str) -> Result<Vec<(&'static str, Rational)>> {
    Ok(match name {
        "basic-tradeoff" => vec![("y", q(1, 1))],
        "constrained-deterministic-lb" => vec![("w", default_golden_weight()), ("x", q(1, 1))],
        "constrained-randomized-lb" => vec![("x", q(1, 1))],
        "pg-tightness" => vec![("eps", q(1, 10))],
        "random-order-3cycle" => vec![("v12", q(0, 1)), ("v23", q(0, 1)), ("v31", q(1, 1))],
        _ => {
            return Err(Error::Invalid(format!(
                "unknown gallery instance {name:?}; known: {}",
                NAMES.join(", ")
            )))
        }
    })
}

/// Build a gallery instance; `params` override the defaults by key.
pub fn make_instance(name: &str, params: &[(String, Rational)]) -> Result<NamedInstance> {
    let name = name.to_ascii_lowercase();
    let mut p: BTreeMap<String, Rational> = defaults(&name)?
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    for (k, v) in params {
        match p.get_mut(k) {
            Some(slot) => *slot = v.clone(),
            None => return Err(Error::Invalid(format!("{name} has no parameter {k:?}"))),
        }
    }
    let get = |k: &str| p[k].clone();
    let nonneg = |k: &str| {
        if p[k].is_negative() {
            Err(Error::Invalid(format!("{k} must be nonnegative")))
        } else {
            Ok(())
        }
    };
    let sellers_buyers = vec![Role::Seller, Role::Seller, Role::Buyer, Role::Buyer];
    let instance = match name.as_str() {
        "basic-tradeoff" => {
            nonneg("y")?;
            let g = WeightedGraph::from_edges(3, &[(1, 2, q(1, 1)), (2, 3, get("y"))])?;
            OnlineInstance::new(g, ArrivalOrder::identity(3), 1)?
        }
        "constrained-deterministic-lb" | "constrained-randomized-lb" => {
            let w = if name == "constrained-randomized-lb" {
                q(1, 2)
            } else {
                get("w")
            };
            let x = get("x");
            if !w.is_positive() || w >= Rational::one() {
                return Err(Error::Invalid("w must lie in (0, 1)".into()));
            }
            if x != Rational::zero() && x != Rational::one() {
                return Err(Error::Invalid("x must be 0 or 1".into()));
            }
            let g = WeightedGraph::from_edges(4, &[(1, 3, w), (2, 3, q(1, 1)), (2, 4, x)])?;
            OnlineInstance::new(g, ArrivalOrder::identity(4), 2)?.with_roles(sellers_buyers)?
        }
        "pg-tightness" => {
            let eps = get("eps");
            if !eps.is_positive() || eps >= Rational::one() {
                return Err(Error::Invalid("eps must lie in (0, 1)".into()));
            }
            let g = WeightedGraph::from_edges(
                4,
                &[(1, 3, Rational::one() - eps), (2, 3, q(1, 1)), (2, 4, q(1, 1))],
            )?;
            OnlineInstance::new(g, ArrivalOrder::identity(4), 2)?.with_roles(sellers_buyers)?
        }
        "random-order-3cycle" => {
            for k in ["v12", "v23", "v31"] {
                nonneg(k)?;
            }
            let g = WeightedGraph::from_edges(
                3,
                &[(1, 2, get("v12")), (2, 3, get("v23")), (1, 3, get("v31"))],
            )?;
            OnlineInstance::new(g, ArrivalOrder::identity(3), 1)?
        }
        _ => unreachable!("defaults() rejects unknown names"),
    };
    Ok(NamedInstance {
        name,
        params: p,
        instance,
    })
}

/// Parse `key=value` pairs with rational values.
pub fn parse_params<S: AsRef<str>>(items: &[S]) -> Result<Vec<(String, Rational)>> {
    items
        .iter()
        .map(|s| {
            let s = s.as_ref();
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("expected key=value, got {s:?}")))?;
            Ok((k.trim().to_string(), Rational::from_str(v.trim())?))
        })
        .collect()
}

/// Maximum-weight matching by exhaustion over any exact field (tiny graphs).
pub fn brute_force_matching<F: ExactField>(n: usize, edges: &[(usize, usize, F)]) -> F {
    fn go<F: ExactField>(v: usize, n: usize, used: &mut [bool], edges: &[(usize, usize, F)]) -> F {
        if v > n {
            return F::zero();
        }
        if used[v] {
            return go(v + 1, n, used, edges);
        }
        used[v] = true;
        let mut best = go(v + 1, n, used, edges);
        for (a, b, w) in edges {
            let other = if *a == v {
                *b
            } else if *b == v {
                *a
            } else {
                continue;
            };
            if !used[other] {
                used[other] = true;
                let val = w.clone() + go(v + 1, n, used, edges);
                used[other] = false;
                if val > best {
                    best = val;
                }
            }
        }
        used[v] = false;
        best
    }
    go(1, n, &mut vec![false; n + 1], edges)
}

/// A one-shot decision followed by an adversary's choice; entries are the
/// online-to-offline ratios `payoff[action][choice]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStageGame<F> {
    pub payoff: Vec<Vec<F>>,
}

impl<F: ExactField> TwoStageGame<F> {
    /// Best pure action against a worst-case reply.
    pub fn deterministic_value(&self) -> F {
        self.payoff
            .iter()
            .map(|row| row.iter().min().expect("adversary has a choice").clone())
            .max()
            .expect("at least one action")
    }

    /// `max_p min_x` over mixtures of two actions, with the optimal `p`
    /// (probability of the first action).
    pub fn randomized_value(&self) -> Result<(F, F)> {
        let [r1, r0] = self.payoff.as_slice() else {
            return Err(Error::Invalid("mixed value needs exactly two actions".into()));
        };
        let eval = |p: &F| {
            r1.iter()
                .zip(r0)
                .map(|(a, b)| p.clone() * a.clone() + (F::one() - p.clone()) * b.clone())
                .min()
                .expect("adversary has a choice")
        };
        // the lower envelope of lines is maximized at an end or a crossing
        let mut candidates = vec![F::zero(), F::one()];
        for i in 0..r1.len() {
            for j in i + 1..r1.len() {
                let slope_i = r1[i].clone() - r0[i].clone();
                let slope_j = r1[j].clone() - r0[j].clone();
                if slope_i != slope_j {
                    let p = (r0[j].clone() - r0[i].clone()) / (slope_i - slope_j);
                    if p >= F::zero() && p <= F::one() {
                        candidates.push(p);
                    }
                }
            }
        }
        let mut best: Option<(F, F)> = None;
        for p in candidates {
            let v = eval(&p);
            if best.as_ref().is_none_or(|(bv, bp)| v > *bv || (v == *bv && p < *bp)) {
                best = Some((v, p));
            }
        }
        Ok(best.expect("two candidates at least"))
    }
}

/// The constrained lower-bound game: sellers 1, 2 and buyers 3, 4 with
/// `v13 = w`, `v23 = 1` and `v24 = x` chosen by the adversary after seller 1
/// is either matched to 3 or let go. Online then matches the rest optimally.
pub fn constrained_game<F: ExactField>(w: F, choices: &[F]) -> TwoStageGame<F> {
    let edges = |x: &F| vec![(1, 3, w.clone()), (2, 3, F::one()), (2, 4, x.clone())];
    let offline: Vec<F> = choices.iter().map(|x| brute_force_matching(4, &edges(x))).collect();
    let matched: Vec<F> = choices
        .iter()
        .map(|x| w.clone() + brute_force_matching(4, &[(2, 4, x.clone())]))
        .collect();
    let released: Vec<F> = choices
        .iter()
        .map(|x| brute_force_matching(4, &[(2, 3, F::one()), (2, 4, x.clone())]))
        .collect();
    let ratio = |vals: Vec<F>| {
        vals.into_iter()
            .zip(&offline)
            .map(|(v, o)| v / o.clone())
            .collect()
    };
    TwoStageGame {
        payoff: vec![ratio(matched), ratio(released)],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    Deterministic,
    Randomized,
}

/// Best ratio any online algorithm can guarantee on a lower-bound family,
/// with the adversary choosing `x ∈ {0, 1}` (or the single given `x`).
pub fn optimal_online_bounds(
    family: &str,
    params: &[(String, Rational)],
    mode: BoundMode,
) -> Result<Rational> {
    let inst = make_instance(family, params)?;
    let w = match inst.name.as_str() {
        "constrained-deterministic-lb" => inst.params["w"].clone(),
        "constrained-randomized-lb" => q(1, 2),
        other => return Err(Error::Invalid(format!("{other} is not a lower-bound family"))),
    };
    let choices: Vec<Rational> = if params.iter().any(|(k, _)| k == "x") {
        vec![inst.params["x"].clone()]
    } else {
        vec![q(0, 1), q(1, 1)]
    };
    let game = constrained_game(w, &choices);
    Ok(match mode {
        BoundMode::Deterministic => game.deterministic_value(),
        BoundMode::Randomized => game.randomized_value()?.0,
    })
}

/// The deterministic bound with the golden-ratio weight, exactly.
pub fn golden_deterministic_bound() -> Surd5 {
    let choices = [Surd5::zero(), Surd5::one()];
    constrained_game(Surd5::golden_conjugate(), &choices).deterministic_value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::offline_optimum;

    fn opt(inst: &NamedInstance) -> Rational {
        offline_optimum(&inst.instance).unwrap().weight(&inst.instance.graph)
    }

    fn params(s: &[&str]) -> Vec<(String, Rational)> {
        parse_params(s).unwrap()
    }

    #[test]
    fn tightness_optimum() {
        let i = make_instance("pg-tightness", &params(&["eps=1/10"])).unwrap();
        assert_eq!(opt(&i), q(19, 10));
        i.instance.check_constrained_bipartite().unwrap();
    }

    #[test]
    fn basic_tradeoff_optimum() {
        let i = make_instance("basic-tradeoff", &params(&["y=0"])).unwrap();
        assert_eq!(opt(&i), q(1, 1));
        let i = make_instance("basic-tradeoff", &params(&["y=5"])).unwrap();
        assert_eq!(opt(&i), q(5, 1));
    }

    #[test]
    fn three_cycle_average_optimum() {
        let i = make_instance("random-order-3cycle", &[]).unwrap();
        let orders: Vec<_> = ArrivalOrder::all(3).collect();
        let total: Rational = orders
            .iter()
            .map(|s| {
                let inst = i.instance.with_sigma(s.clone());
                offline_optimum(&inst).unwrap().weight(&inst.graph)
            })
            .sum();
        assert_eq!(total / Rational::integer(orders.len() as i64), q(2, 3));
    }

    #[test]
    fn bad_names_and_params() {
        assert!(make_instance("nope", &[]).is_err());
        assert!(make_instance("pg-tightness", &params(&["eps=1"])).is_err());
        assert!(make_instance("pg-tightness", &params(&["y=1"])).is_err());
        assert!(make_instance("constrained-randomized-lb", &params(&["x=1/2"])).is_err());
        assert!(parse_params(&["eps"]).is_err());
    }

    #[test]
    fn randomized_bound_is_four_fifths() {
        let game = constrained_game(q(1, 2), &[q(0, 1), q(1, 1)]);
        assert_eq!(game.randomized_value().unwrap(), (q(4, 5), q(2, 5)));
        assert_eq!(
            optimal_online_bounds("constrained-randomized-lb", &[], BoundMode::Randomized).unwrap(),
            q(4, 5)
        );
    }

    #[test]
    fn golden_bound_is_exact() {
        assert_eq!(golden_deterministic_bound(), Surd5::golden_conjugate());
    }

    #[test]
    fn rational_weight_bound() {
        // max(w, 1/(1+w))
        let w = q(1, 2);
        let b = optimal_online_bounds(
            "constrained-deterministic-lb",
            &[("w".into(), w)],
            BoundMode::Deterministic,
        )
        .unwrap();
        assert_eq!(b, q(2, 3));
    }

    #[test]
    fn fixed_adversary_gives_one() {
        for x in ["x=0", "x=1"] {
            for mode in [BoundMode::Deterministic, BoundMode::Randomized] {
                let b = optimal_online_bounds("constrained-randomized-lb", &params(&[x]), mode).unwrap();
                assert_eq!(b, Rational::one());
            }
        }
    }
}

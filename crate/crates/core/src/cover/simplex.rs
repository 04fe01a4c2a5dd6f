//! Exact revised simplex over the rationals.
//!
//! Two phases with artificial variables, an explicit dense basis inverse,
//! and either Bland's rule throughout or Dantzig pricing that falls back to
//! Bland's rule after every degenerate pivot. Both rules terminate: a run of
//! degenerate pivots is driven by Bland's rule, which cannot cycle.

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Minimize `objective · x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    Bland,
    #[default]
    DantzigThenBland,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub objective: Rational,
    pub x: Vec<Rational>,
    /// One multiplier per constraint; `objective = duals · rhs`.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

struct Tableau {
    m: usize,
    cols: Vec<Vec<(usize, Rational)>>,
    artificial: Vec<bool>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
    pivots: usize,
}

impl Tableau {
    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.m];
        for (i, &bv) in self.basis.iter().enumerate() {
            let c = &cost[bv];
            if c.is_zero() {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                let b = &self.binv[i][k];
                if !b.is_zero() {
                    *yk += c * b;
                }
            }
        }
        y
    }

    fn column(&self, j: usize) -> Vec<Rational> {
        let mut u = vec![Rational::zero(); self.m];
        for (r, a) in &self.cols[j] {
            for (i, ui) in u.iter_mut().enumerate() {
                let b = &self.binv[i][*r];
                if !b.is_zero() {
                    *ui += b * a;
                }
            }
        }
        u
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[Rational]) {
        let piv = u[r].clone();
        let theta = &self.xb[r] / &piv;
        for i in 0..self.m {
            if i != r && !u[i].is_zero() {
                let t = &theta * &u[i];
                self.xb[i] -= t;
            }
        }
        self.xb[r] = theta;
        let row_r: Vec<Rational> = self.binv[r].iter().map(|x| x / &piv).collect();
        for i in 0..self.m {
            if i == r || u[i].is_zero() {
                continue;
            }
            let f = &u[i];
            for (k, x) in self.binv[i].iter_mut().enumerate() {
                if !row_r[k].is_zero() {
                    *x -= f * &row_r[k];
                }
            }
        }
        self.binv[r] = row_r;
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Optimize `cost` over the current basis; artificial columns never enter.
    fn optimize(&mut self, cost: &[Rational], rule: PivotRule) -> Result<()> {
        let mut bland = rule == PivotRule::Bland;
        loop {
            let y = self.duals(cost);
            let mut entering: Option<(usize, Rational)> = None;
            for j in 0..self.cols.len() {
                if self.is_basic[j] || self.artificial[j] {
                    continue;
                }
                let mut d = cost[j].clone();
                for (r, a) in &self.cols[j] {
                    if !y[*r].is_zero() {
                        d -= &y[*r] * a;
                    }
                }
                if !d.is_negative() {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.as_ref().is_none_or(|(_, best)| d < *best) {
                    entering = Some((j, d));
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };
            let u = self.column(q);
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                let ratio = if self.artificial[self.basis[i]] && self.xb[i].is_zero() && !u[i].is_zero() {
                    // a redundant row's artificial sits at zero and must leave first
                    Rational::zero()
                } else if u[i].is_positive() {
                    &self.xb[i] / &u[i]
                } else {
                    continue;
                };
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, theta)) = leave else {
                return Err(Error::Unbounded);
            };
            if rule == PivotRule::DantzigThenBland {
                bland = theta.is_zero();
            }
            self.pivot(r, q, &u);
        }
    }
}

/// Solve `lp` exactly.
pub fn solve(lp: &LinearProgram, rule: PivotRule) -> Result<LpSolution> {
    Ok(Simplex::new(lp, rule)?.solution())
}

/// An optimal basis that stays available for adding variables and
/// re-optimizing from where the last solve stopped.
pub struct Simplex {
    t: Tableau,
    cost: Vec<Rational>,
    sign: Vec<Rational>,
    var_col: Vec<usize>,
    rule: PivotRule,
}

impl Simplex {
    pub fn new(lp: &LinearProgram, rule: PivotRule) -> Result<Self> {
        let (t, cost, sign) = start(lp, rule)?;
        Ok(Simplex {
            t,
            cost,
            sign,
            var_col: (0..lp.num_vars).collect(),
            rule,
        })
    }

    /// Add a variable with objective coefficient `cost` and constraint
    /// coefficients `coeffs`; returns its index. Call [`Simplex::reoptimize`]
    /// afterwards.
    pub fn add_variable(&mut self, cost: Rational, coeffs: &[(usize, Rational)]) -> Result<usize> {
        let mut col = Vec::with_capacity(coeffs.len());
        for (r, a) in coeffs {
            if *r >= self.t.m {
                return Err(Error::Invalid(format!("constraint {r} out of range")));
            }
            if !a.is_zero() {
                col.push((*r, a * &self.sign[*r]));
            }
        }
        self.t.cols.push(col);
        self.t.artificial.push(false);
        self.t.is_basic.push(false);
        self.cost.push(cost);
        self.var_col.push(self.t.cols.len() - 1);
        Ok(self.var_col.len() - 1)
    }

    pub fn reoptimize(&mut self) -> Result<()> {
        self.t.optimize(&self.cost, self.rule)
    }

    pub fn solution(&self) -> LpSolution {
        let mut x = vec![Rational::zero(); self.var_col.len()];
        let mut pos = vec![usize::MAX; self.t.cols.len()];
        for (j, &c) in self.var_col.iter().enumerate() {
            pos[c] = j;
        }
        for (i, &b) in self.t.basis.iter().enumerate() {
            if pos[b] != usize::MAX {
                x[pos[b]] = self.t.xb[i].clone();
            }
        }
        let y = self.t.duals(&self.cost);
        let duals = y.iter().zip(&self.sign).map(|(a, s)| a * s).collect();
        let objective = x
            .iter()
            .zip(&self.var_col)
            .map(|(a, &c)| a * &self.cost[c])
            .sum();
        LpSolution {
            objective,
            x,
            duals,
            pivots: self.t.pivots,
        }
    }
}

fn start(lp: &LinearProgram, rule: PivotRule) -> Result<(Tableau, Vec<Rational>, Vec<Rational>)> {
    let m = lp.constraints.len();
    let nv = lp.num_vars;
    if lp.objective.len() != nv {
        return Err(Error::LengthMismatch {
            what: "objective",
            expected: nv,
            found: lp.objective.len(),
        });
    }
    let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nv];
    let mut sign = vec![Rational::one(); m];
    let mut rhs = Vec::with_capacity(m);
    let mut rel = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let flip = c.rhs.is_negative();
        if flip {
            sign[i] = -Rational::one();
        }
        for (j, a) in &c.coeffs {
            if *j >= nv {
                return Err(Error::Invalid(format!("variable {j} out of range")));
            }
            if !a.is_zero() {
                cols[*j].push((i, if flip { -a } else { a.clone() }));
            }
        }
        rhs.push(if flip { -&c.rhs } else { c.rhs.clone() });
        rel.push(match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        });
    }
    let mut artificial = vec![false; nv];
    let mut basis = vec![0; m];
    for i in 0..m {
        match rel[i] {
            Relation::Le => {
                basis[i] = cols.len();
                cols.push(vec![(i, Rational::one())]);
                artificial.push(false);
            }
            Relation::Ge => {
                cols.push(vec![(i, -Rational::one())]);
                artificial.push(false);
                basis[i] = cols.len();
                cols.push(vec![(i, Rational::one())]);
                artificial.push(true);
            }
            Relation::Eq => {
                basis[i] = cols.len();
                cols.push(vec![(i, Rational::one())]);
                artificial.push(true);
            }
        }
    }
    let total = cols.len();
    let mut is_basic = vec![false; total];
    for &b in &basis {
        is_basic[b] = true;
    }
    let binv = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| if i == k { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let mut t = Tableau {
        m,
        cols,
        artificial,
        basis,
        is_basic,
        binv,
        xb: rhs,
        pivots: 0,
    };

    if t.artificial.iter().any(|&a| a) {
        let phase1: Vec<Rational> = t
            .artificial
            .iter()
            .map(|&a| if a { Rational::one() } else { Rational::zero() })
            .collect();
        t.optimize(&phase1, rule)?;
        let infeas: Rational = (0..m)
            .filter(|&i| t.artificial[t.basis[i]])
            .map(|i| t.xb[i].clone())
            .sum();
        if infeas.is_positive() {
            return Err(Error::Infeasible);
        }
        for i in 0..m {
            if !t.artificial[t.basis[i]] {
                continue;
            }
            let swap = (0..total).find_map(|j| {
                if t.is_basic[j] || t.artificial[j] {
                    return None;
                }
                let u = t.column(j);
                (!u[i].is_zero()).then_some((j, u))
            });
            if let Some((j, u)) = swap {
                t.pivot(i, j, &u);
            }
        }
    }

    let mut cost = lp.objective.clone();
    cost.resize(total, Rational::zero());
    t.optimize(&cost, rule)?;
    Ok((t, cost, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn c(coeffs: &[(usize, i64)], relation: Relation, rhs: i64) -> Constraint {
        Constraint {
            coeffs: coeffs.iter().map(|&(j, a)| (j, q(a, 1))).collect(),
            relation,
            rhs: q(rhs, 1),
        }
    }

    #[test]
    fn small_covering_lp() {
        // triangle edge cover: min x1+x2+x3, each pair sums to at least 1
        let lp = LinearProgram {
            num_vars: 3,
            objective: vec![q(1, 1); 3],
            constraints: vec![
                c(&[(0, 1), (1, 1)], Relation::Ge, 1),
                c(&[(1, 1), (2, 1)], Relation::Ge, 1),
                c(&[(0, 1), (2, 1)], Relation::Ge, 1),
            ],
        };
        for rule in [PivotRule::Bland, PivotRule::DantzigThenBland] {
            let s = solve(&lp, rule).unwrap();
            assert_eq!(s.objective, q(3, 2));
            let dual_obj: Rational = s.duals.iter().sum();
            assert_eq!(dual_obj, q(3, 2));
        }
    }

    #[test]
    fn maximization_with_le_constraints() {
        // max 3x + 2y  s.t. x + y ≤ 4, x + 3y ≤ 6, x ≤ 3
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![q(-3, 1), q(-2, 1)],
            constraints: vec![
                c(&[(0, 1), (1, 1)], Relation::Le, 4),
                c(&[(0, 1), (1, 3)], Relation::Le, 6),
                c(&[(0, 1)], Relation::Le, 3),
            ],
        };
        let s = solve(&lp, PivotRule::Bland).unwrap();
        assert_eq!(s.objective, q(-11, 1));
        assert_eq!(s.x, vec![q(3, 1), q(1, 1)]);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + y  s.t. x − y = −1, x ≥ 0
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![q(1, 1), q(1, 1)],
            constraints: vec![c(&[(0, 1), (1, -1)], Relation::Eq, -1)],
        };
        let s = solve(&lp, PivotRule::DantzigThenBland).unwrap();
        assert_eq!(s.objective, q(1, 1));
        assert_eq!(s.x, vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let inf = LinearProgram {
            num_vars: 1,
            objective: vec![q(1, 1)],
            constraints: vec![
                c(&[(0, 1)], Relation::Ge, 2),
                c(&[(0, 1)], Relation::Le, 1),
            ],
        };
        assert_eq!(solve(&inf, PivotRule::Bland), Err(Error::Infeasible));
        let unb = LinearProgram {
            num_vars: 1,
            objective: vec![q(-1, 1)],
            constraints: vec![c(&[(0, 1)], Relation::Ge, 1)],
        };
        assert_eq!(solve(&unb, PivotRule::Bland), Err(Error::Unbounded));
    }

    #[test]
    fn adding_variables_warm() {
        // start with only y available, then offer x
        let mut lp = LinearProgram {
            num_vars: 1,
            objective: vec![q(3, 1)],
            constraints: vec![c(&[(0, 1)], Relation::Ge, 2)],
        };
        let mut s = Simplex::new(&lp, PivotRule::DantzigThenBland).unwrap();
        assert_eq!(s.solution().objective, q(6, 1));
        let x = s.add_variable(q(1, 1), &[(0, q(1, 1))]).unwrap();
        s.reoptimize().unwrap();
        let sol = s.solution();
        assert_eq!(sol.objective, q(2, 1));
        assert_eq!(sol.x[x], q(2, 1));
        lp.num_vars = 2;
        lp.objective.push(q(1, 1));
        lp.constraints[0].coeffs.push((1, q(1, 1)));
        assert_eq!(solve(&lp, PivotRule::Bland).unwrap().objective, q(2, 1));
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![q(2, 1), q(1, 1)],
            constraints: vec![
                c(&[(0, 1), (1, 1)], Relation::Eq, 2),
                c(&[(0, 2), (1, 2)], Relation::Eq, 4),
            ],
        };
        let s = solve(&lp, PivotRule::Bland).unwrap();
        assert_eq!(s.objective, q(2, 1));
    }
}

//! The covering LPs over periodic batchings.

use std::collections::HashMap;

use super::certificate::{CoverCertificate, CoverColumn};
use super::periodic::{for_each_periodic_labeling, PeriodicBatching};
use super::simplex::{solve, Constraint, LinearProgram, PivotRule, Relation, Simplex};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoverLpVariant {
    /// Batches of `d + 1` covering `C_{4(d+1)}^d`, period `2(d+1)`.
    Lp { d: usize },
    /// Batches of `k` covering `C_{4k}^k`, period `2k`.
    LpPrime { k: usize },
}

impl CoverLpVariant {
    pub fn batch_size(&self) -> usize {
        match *self {
            CoverLpVariant::Lp { d } => d + 1,
            CoverLpVariant::LpPrime { k } => k,
        }
    }

    pub fn n(&self) -> usize {
        4 * self.batch_size()
    }

    pub fn period(&self) -> usize {
        2 * self.batch_size()
    }

    /// Power of the target cycle.
    pub fn target_power(&self) -> usize {
        match *self {
            CoverLpVariant::Lp { d } => d,
            CoverLpVariant::LpPrime { k } => k,
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            CoverLpVariant::Lp { d } if d >= 1 => Ok(()),
            CoverLpVariant::LpPrime { k } if k >= 2 => Ok(()),
            _ => Err(Error::Invalid(format!("{self:?} has no nontrivial LP"))),
        }
    }
}

/// When a batching counts as covering an edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CoverageMode {
    /// Same batch on the `n`-cycle itself.
    Literal,
    /// Same batch once the periodic pattern is continued past `n`, so the
    /// cover survives [`extend_cover`](super::transform::extend_cover) to any
    /// multiple of the period.
    #[default]
    ExtensionSafe,
}

/// A set of LP rows as a bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowSet(Vec<u64>);

impl RowSet {
    pub fn new(rows: usize) -> Self {
        RowSet(vec![0; rows.div_ceil(64)])
    }

    pub fn insert(&mut self, r: usize) {
        self.0[r / 64] |= 1 << (r % 64);
    }

    pub fn contains(&self, r: usize) -> bool {
        self.0[r / 64] >> (r % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &RowSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&r| self.contains(r))
    }
}

/// Optimum of `min Σλ` subject to every row being covered at least once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverLp {
    pub value: Rational,
    /// Weight of each input column.
    pub lambda: Vec<Rational>,
    /// Dual witness: `y ≥ 0`, `Σ_{r ∈ S} y_r ≤ 1` for every column `S`,
    /// `Σ y = value`.
    pub dual: Vec<Rational>,
    pub distinct_columns: usize,
    pub kept_columns: usize,
    pub pivots: usize,
}

/// How [`solve_set_cover`] treats the column set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ColumnStrategy {
    /// Every input column enters the simplex.
    All,
    /// Identical and dominated columns are dropped first.
    Pruned,
    /// Start from a greedy cover and add columns with negative reduced cost
    /// until none is left.
    #[default]
    Generated,
}

/// Solve the fractional cover LP over `columns`. The dual witness is checked
/// against every input column whatever the strategy.
pub fn solve_set_cover(
    rows: usize,
    columns: &[RowSet],
    strategy: ColumnStrategy,
    rule: PivotRule,
) -> Result<SetCoverLp> {
    if let Some(r) = columns.iter().flat_map(|c| c.iter()).find(|&r| r >= rows) {
        return Err(Error::Invalid(format!("row {r} out of range")));
    }
    let mut first: HashMap<&RowSet, usize> = HashMap::new();
    for (k, c) in columns.iter().enumerate() {
        first.entry(c).or_insert(k);
    }
    let distinct_columns = first.len();
    let mut distinct: Vec<usize> = first.into_values().collect();
    distinct.sort_unstable();

    let (sol, kept) = match strategy {
        ColumnStrategy::All => {
            let kept: Vec<usize> = (0..columns.len()).collect();
            (solve(&restricted(rows, columns, &kept), rule)?, kept)
        }
        ColumnStrategy::Pruned => {
            let mut order = distinct.clone();
            order.sort_by_key(|&k| (std::cmp::Reverse(columns[k].len()), k));
            let mut kept: Vec<usize> = Vec::new();
            for k in order {
                if !kept.iter().any(|&m| columns[k].is_subset(&columns[m])) {
                    kept.push(k);
                }
            }
            kept.sort_unstable();
            (solve(&restricted(rows, columns, &kept), rule)?, kept)
        }
        ColumnStrategy::Generated => {
            let mut kept = greedy_cover(rows, columns, &distinct)?;
            let mut simplex = Simplex::new(&restricted(rows, columns, &kept), rule)?;
            loop {
                let sol = simplex.solution();
                let entering = most_violated(columns, &distinct, &sol.duals, rows.max(8));
                if entering.is_empty() {
                    break (sol, kept);
                }
                for k in entering {
                    let coeffs: Vec<_> = columns[k].iter().map(|r| (r, Rational::one())).collect();
                    simplex.add_variable(Rational::one(), &coeffs)?;
                    kept.push(k);
                }
                simplex.reoptimize()?;
            }
        }
    };
    let mut lambda = vec![Rational::zero(); columns.len()];
    for (x, &k) in kept.iter().enumerate() {
        lambda[k] = sol.x[x].clone();
    }
    let out = SetCoverLp {
        value: sol.objective,
        lambda,
        dual: sol.duals,
        distinct_columns,
        kept_columns: kept.len(),
        pivots: sol.pivots,
    };
    check_set_cover(rows, columns, &out)?;
    Ok(out)
}

fn restricted(rows: usize, columns: &[RowSet], kept: &[usize]) -> LinearProgram {
    let mut constraints: Vec<Constraint> = (0..rows)
        .map(|_| Constraint {
            coeffs: Vec::new(),
            relation: Relation::Ge,
            rhs: Rational::one(),
        })
        .collect();
    for (x, &k) in kept.iter().enumerate() {
        for r in columns[k].iter() {
            constraints[r].coeffs.push((x, Rational::one()));
        }
    }
    LinearProgram {
        num_vars: kept.len(),
        objective: vec![Rational::one(); kept.len()],
        constraints,
    }
}

fn greedy_cover(rows: usize, columns: &[RowSet], candidates: &[usize]) -> Result<Vec<usize>> {
    let mut open = RowSet::new(rows);
    for r in 0..rows {
        open.insert(r);
    }
    let mut chosen = Vec::new();
    while !open.is_empty() {
        let gain = |k: usize| columns[k].iter().filter(|&r| open.contains(r)).count();
        let best = candidates
            .iter()
            .copied()
            .max_by_key(|&k| (gain(k), std::cmp::Reverse(k)))
            .filter(|&k| gain(k) > 0)
            .ok_or(Error::Infeasible)?;
        for r in columns[best].iter() {
            open.0[r / 64] &= !(1 << (r % 64));
        }
        chosen.push(best);
    }
    Ok(chosen)
}

/// Up to `limit` columns whose dual load exceeds one, heaviest first.
fn most_violated(columns: &[RowSet], candidates: &[usize], dual: &[Rational], limit: usize) -> Vec<usize> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    // exact loads on a common denominator; fall back to rationals on overflow
    let den = dual.iter().fold(num_bigint::BigInt::from(1), |acc, y| acc.lcm(y.denom()));
    let scaled: Option<Vec<i128>> = dual
        .iter()
        .map(|y| (y.numer() * (&den / y.denom())).to_i128())
        .collect();
    let mut viol: Vec<(Rational, usize)> = match (scaled, den.to_i128()) {
        (Some(a), Some(d)) => candidates
            .iter()
            .filter_map(|&k| {
                let load: i128 = columns[k].iter().map(|r| a[r]).sum();
                (load > d).then(|| (Rational::from_big(num_rational::BigRational::new(load.into(), d.into())), k))
            })
            .collect(),
        _ => candidates
            .iter()
            .filter_map(|&k| {
                let load: Rational = columns[k].iter().map(|r| dual[r].clone()).sum();
                (load > Rational::one()).then_some((load, k))
            })
            .collect(),
    };
    viol.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    viol.into_iter().take(limit).map(|(_, k)| k).collect()
}

/// Exact primal feasibility, dual feasibility and equal objectives.
pub fn check_set_cover(rows: usize, columns: &[RowSet], sol: &SetCoverLp) -> Result<()> {
    let fail = |m: String| Err(Error::Invalid(m));
    if sol.lambda.iter().any(Rational::is_negative) || sol.dual.iter().any(Rational::is_negative) {
        return fail("negative primal or dual value".into());
    }
    let mut cov = vec![Rational::zero(); rows];
    for (c, l) in columns.iter().zip(&sol.lambda) {
        if !l.is_zero() {
            for r in c.iter() {
                cov[r] += l;
            }
        }
    }
    if let Some(r) = cov.iter().position(|c| *c < Rational::one()) {
        return fail(format!("row {r} covered only {}", cov[r]));
    }
    for (k, c) in columns.iter().enumerate() {
        let load: Rational = c.iter().map(|r| sol.dual[r].clone()).sum();
        if load > Rational::one() {
            return fail(format!("dual overloads column {k}: {load}"));
        }
    }
    let primal: Rational = sol.lambda.iter().sum();
    let dual: Rational = sol.dual.iter().sum();
    if primal != sol.value || dual != sol.value {
        return fail(format!("objectives differ: primal {primal}, dual {dual}, claimed {}", sol.value));
    }
    Ok(())
}

/// Row of the edge `(i, i + δ)` (0-based `i < p`, `1 ≤ δ ≤ t`).
fn row(i: usize, delta: usize, t: usize) -> usize {
    i * t + delta - 1
}

/// Edges of `C_n^t` up to shifts by the period, as covered by `b`.
pub fn coverage_pattern(b: &PeriodicBatching, t: usize, mode: CoverageMode) -> RowSet {
    let (n, p) = (b.n(), b.period());
    let ext;
    let (view, wrap) = match mode {
        CoverageMode::Literal => (b, n),
        CoverageMode::ExtensionSafe => {
            ext = b.extend_to(n + p).expect("n + p is a multiple of the period");
            (&ext, n + p)
        }
    };
    let mut set = RowSet::new(p * t);
    for i in 0..p {
        for delta in 1..=t {
            if view.same_batch(i + 1, (i + delta) % wrap + 1) {
                set.insert(row(i, delta, t));
            }
        }
    }
    set
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverLpSolution {
    pub variant: CoverLpVariant,
    pub mode: CoverageMode,
    pub alpha: Rational,
    pub certificate: CoverCertificate,
    /// `((i, i + δ), y)` for the orbit representatives `i < period`, 1-based.
    pub dual: Vec<((usize, usize), Rational)>,
    pub labelings: usize,
    pub distinct_columns: usize,
    pub kept_columns: usize,
    pub pivots: usize,
}

/// Solve the variant's covering LP exactly.
pub fn solve_cover_lp(
    variant: CoverLpVariant,
    mode: CoverageMode,
    strategy: ColumnStrategy,
    rule: PivotRule,
) -> Result<CoverLpSolution> {
    variant.check()?;
    let (n, p, size, t) = (variant.n(), variant.period(), variant.batch_size(), variant.target_power());
    let mut patterns: Vec<RowSet> = Vec::new();
    let mut batchings: Vec<PeriodicBatching> = Vec::new();
    let mut index: HashMap<RowSet, usize> = HashMap::new();
    let mut labelings = 0;
    for_each_periodic_labeling(n, p, size - 1, |b| {
        labelings += 1;
        let pat = coverage_pattern(b, t, mode);
        index.entry(pat.clone()).or_insert_with(|| {
            patterns.push(pat);
            batchings.push(b.clone());
            patterns.len() - 1
        });
    })?;
    let sol = solve_set_cover(p * t, &patterns, strategy, rule)?;
    let columns = batchings
        .into_iter()
        .zip(&sol.lambda)
        .filter(|(_, l)| l.is_positive())
        .map(|(batching, l)| CoverColumn {
            lambda: l.clone(),
            batching,
        })
        .collect();
    let certificate = CoverCertificate::from_columns(n, size - 1, p, columns)?;
    let dual = (0..p)
        .flat_map(|i| (1..=t).map(move |delta| (i, delta)))
        .map(|(i, delta)| ((i + 1, (i + delta) % n + 1), sol.dual[row(i, delta, t)].clone()))
        .collect();
    Ok(CoverLpSolution {
        variant,
        mode,
        alpha: sol.value,
        certificate,
        dual,
        labelings,
        distinct_columns: sol.distinct_columns,
        kept_columns: sol.kept_columns,
        pivots: sol.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::certificate::verify_certificate;
    use crate::cover::mask::cycle_power;
    use crate::rational::q;

    fn set(rows: usize, members: &[usize]) -> RowSet {
        let mut s = RowSet::new(rows);
        for &m in members {
            s.insert(m);
        }
        s
    }

    #[test]
    fn set_cover_with_and_without_pruning() {
        let cols = vec![
            set(3, &[0, 1]),
            set(3, &[1, 2]),
            set(3, &[0, 2]),
            set(3, &[0]),
            set(3, &[0, 1]),
        ];
        for strategy in [ColumnStrategy::All, ColumnStrategy::Pruned, ColumnStrategy::Generated] {
            let s = solve_set_cover(3, &cols, strategy, PivotRule::Bland).unwrap();
            assert_eq!(s.value, q(3, 2));
        }
        let s = solve_set_cover(3, &cols, ColumnStrategy::Pruned, PivotRule::Bland).unwrap();
        assert_eq!((s.distinct_columns, s.kept_columns), (4, 3));
    }

    #[test]
    fn alpha_one() {
        for mode in [CoverageMode::Literal, CoverageMode::ExtensionSafe] {
            let s = solve_cover_lp(CoverLpVariant::Lp { d: 1 }, mode, ColumnStrategy::default(), PivotRule::default()).unwrap();
            assert_eq!(s.alpha, q(2, 1));
            let r = verify_certificate(&s.certificate, &cycle_power(8, 1).unwrap());
            assert!(r.ok(), "{r}");
            let y: Rational = s.dual.iter().map(|(_, y)| y.clone()).sum();
            assert_eq!(y, q(2, 1));
        }
    }

    #[test]
    fn extension_safe_pattern_is_contained_in_literal() {
        let v = CoverLpVariant::Lp { d: 2 };
        for_each_periodic_labeling(v.n(), v.period(), 2, |b| {
            let z = coverage_pattern(b, 2, CoverageMode::ExtensionSafe);
            let l = coverage_pattern(b, 2, CoverageMode::Literal);
            assert!(z.is_subset(&l));
        })
        .unwrap();
    }
}

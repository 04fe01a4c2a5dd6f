//! Building covers for longer cycles and larger deadlines from small ones.

use super::certificate::{shift_family, CoverCertificate, CoverColumn};
use super::mask::cycle_power;
use super::periodic::PeriodicBatching;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Continue a periodic cover of `C_{n1}^t` to `C_n^t`.
///
/// When the period divides `n` every batching is continued periodically and
/// the weight is unchanged. Otherwise, with `n = p·u + v`, each batching is
/// continued to `p·u` vertices and a block of `v` fresh vertices is spliced
/// in after the `x`-th period for every `x ∈ 1..=u`, forming batches of its
/// own. An edge misses the splice for all but at most two values of `x`, so
/// weights `λ/(u−2)` suffice and the total becomes `α·u/(u−2)`.
pub fn extend_cover(cert: &CoverCertificate, n: usize, t: usize) -> Result<CoverCertificate> {
    let (n1, p, size) = (cert.n, cert.period, cert.d + 1);
    if n < n1 {
        return Err(Error::Invalid(format!("cannot extend from {n1} down to {n} vertices")));
    }
    cycle_power(n, t)?;
    if n.is_multiple_of(p) {
        let columns = cert
            .columns
            .iter()
            .map(|c| {
                Ok(CoverColumn {
                    lambda: c.lambda.clone(),
                    batching: c.batching.extend_to(n)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return CoverCertificate::from_columns(n, cert.d, p, columns);
    }
    let (u, v) = (n / p, n % p);
    if u < 3 {
        return Err(Error::Invalid(format!(
            "{n} vertices hold only {u} periods of {p}; at least 3 are needed"
        )));
    }
    if !n.is_multiple_of(size) {
        return Err(Error::Invalid(format!("batch size {size} does not divide {n}")));
    }
    let spliced_base = p * u / size;
    let scale = Rational::integer((u - 2) as i64).recip();
    let mut columns = Vec::with_capacity(cert.columns.len() * u);
    for c in &cert.columns {
        let base = c.batching.extend_to(p * u)?;
        for x in 1..=u {
            let labels = (1..=n)
                .map(|i| {
                    let l = if i <= p * x {
                        base.label(i)
                    } else if i <= p * x + v {
                        spliced_base + (i - p * x - 1) / size
                    } else {
                        base.label(i - v)
                    };
                    l as u32
                })
                .collect();
            columns.push(CoverColumn {
                lambda: &c.lambda * &scale,
                batching: PeriodicBatching::from_labels(n, size, n, labels)?,
            });
        }
    }
    CoverCertificate::from_columns(n, cert.d, n, columns)
}

/// Which construction [`contract_expand`] used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpandCase {
    /// `k | d+1`: each contracted vertex stands for `(d+1)/k` originals.
    Divisible,
    /// `d+1 = k·u + v` with `0 < v < k`: average over every choice of the
    /// `k·u` residues that are contracted.
    Remainder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandReport {
    pub certificate: CoverCertificate,
    pub case: ExpandCase,
    pub u: usize,
    pub v: usize,
    /// Number of residue subsets averaged over.
    pub subsets: usize,
    /// Weight inflation actually applied: the least factor that makes the
    /// averaged family a cover.
    pub factor: Rational,
    /// `(d+1)d / (ku(ku−1))`, the inverse probability that both ends of an
    /// edge are contracted.
    pub pair_factor: Rational,
    /// `((d+1)/(d+1−v))²`.
    pub square_factor: Rational,
}

/// Turn a periodic cover of `C_{rk}^k` by `k`-batches into a periodic cover
/// of `C_{r(d+1)}^d` by `(d+1)`-batches.
///
/// For a subset `Φ` of `k·u` residues modulo `d+1`, the vertices with residue
/// in `Φ` are grouped `u` at a time in increasing order; group `t` inherits
/// the batch of contracted vertex `t`. The `v` remaining vertices of the
/// `b`-th window of `d+1` join batch `b`.
pub fn contract_expand(cert: &CoverCertificate, d: usize) -> Result<ExpandReport> {
    let k = cert.d + 1;
    if k > d + 1 || k < 2 {
        return Err(Error::Invalid(format!(
            "need 2 ≤ k ≤ d + 1, got k = {k}, d = {d}"
        )));
    }
    if !cert.n.is_multiple_of(k) || !cert.period.is_multiple_of(k) {
        return Err(Error::Invalid("certificate does not batch whole windows".into()));
    }
    let r = cert.n / k;
    let (u, v) = ((d + 1) / k, (d + 1) % k);
    let ku = k * u;
    let n = r * (d + 1);
    let period = cert.period / k * (d + 1);
    let subsets = combinations(d + 1, ku);
    let share = Rational::integer(subsets.len() as i64).recip();

    let mut columns = Vec::with_capacity(subsets.len() * cert.columns.len());
    for phi in &subsets {
        let mut rank_in_phi = vec![usize::MAX; d + 1];
        for (idx, &rho) in phi.iter().enumerate() {
            rank_in_phi[rho] = idx;
        }
        for c in &cert.columns {
            let labels = (0..n)
                .map(|i| {
                    let (b, rho) = (i / (d + 1), i % (d + 1));
                    let l = match rank_in_phi[rho] {
                        usize::MAX => b,
                        idx => c.batching.label((b * ku + idx) / u + 1),
                    };
                    l as u32
                })
                .collect();
            columns.push(CoverColumn {
                lambda: &c.lambda * &share,
                batching: PeriodicBatching::from_labels(n, d + 1, period, labels)?,
            });
        }
    }
    let mut out = CoverCertificate::from_columns(n, d, period, columns)?;

    let coverage = out.coverage();
    let target = cycle_power(n, d)?;
    let least = target
        .edges()
        .map(|(i, j, _)| coverage.weight(i, j).clone())
        .min()
        .ok_or_else(|| Error::Invalid("empty target".into()))?;
    if !least.is_positive() {
        return Err(Error::Invalid("expanded family leaves an edge uncovered".into()));
    }
    let factor = least.recip();
    for c in &mut out.columns {
        c.lambda = &c.lambda * &factor;
    }
    out.alpha = out.lambda_sum();

    let dd = d as i64;
    let kk = ku as i64;
    Ok(ExpandReport {
        certificate: out,
        case: if v == 0 {
            ExpandCase::Divisible
        } else {
            ExpandCase::Remainder
        },
        u,
        v,
        subsets: subsets.len(),
        factor,
        pair_factor: Rational::new((dd + 1) * dd, kk * (kk - 1)),
        square_factor: Rational::new(dd + 1, dd + 1 - v as i64).pow(2),
    })
}

/// All `size`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..size).rev().find(|&i| cur[i] < n - size + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Shift family of `(d+l+1)`-batches with weights `1/(l+1)`: a cover of
/// `C_n^d` for batching with lookahead `l`.
pub fn lookahead_cover(n: usize, d: usize, l: usize) -> Result<CoverCertificate> {
    if !n.is_multiple_of(d + l + 1) {
        return Err(Error::Invalid(format!("{} does not divide {n}", d + l + 1)));
    }
    cycle_power(n, d)?;
    shift_family(n, d + l, &Rational::integer(l as i64 + 1).recip())
}

/// Upper bounds on `α_d` obtained from `α'_k` through the remainder case.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeBound {
    pub d: usize,
    pub k: usize,
    pub v: usize,
    pub alpha_prime_k: f64,
    /// `α'_k ((d+1)/(d+1−v))²`.
    pub square_bound: f64,
    /// `α'_k ((d+1−v)/(d+1))²`, the factor inverted.
    pub inverted_bound: f64,
    /// `α'_k (d+1)d/(ku(ku−1))`.
    pub pair_bound: f64,
    pub reference: f64,
}

/// Reference values of `α'_k` for `k = 2..=13`; approximate beyond 9.
pub const REFERENCE_ALPHA_PRIME: [(usize, f64); 12] = [
    (2, 4.0),
    (3, 3.45),
    (4, 3.17),
    (5, 3.15),
    (6, 3.12),
    (7, 3.09),
    (8, 3.08),
    (9, 3.07),
    (10, 3.20),
    (11, 3.153),
    (12, 3.264),
    (13, 3.318),
];

/// `(d, k, bound)` triples for prime deadlines between 14 and 51.
pub const REFERENCE_PRIME_BOUNDS: [(usize, usize, f64); 9] = [
    (17, 4, 3.58),
    (19, 6, 3.48),
    (23, 11, 3.44),
    (29, 7, 3.31),
    (31, 5, 3.36),
    (37, 6, 3.30),
    (41, 5, 3.31),
    (43, 7, 3.24),
    (47, 9, 3.35),
];

/// Recompute the prime-deadline bounds from `alpha_prime(k)` (falling back
/// to the reference value when it returns `None`).
pub fn prime_bounds(alpha_prime: impl Fn(usize) -> Option<f64>) -> Vec<PrimeBound> {
    REFERENCE_PRIME_BOUNDS
        .iter()
        .map(|&(d, k, reference)| {
            let a = alpha_prime(k).unwrap_or_else(|| {
                REFERENCE_ALPHA_PRIME
                    .iter()
                    .find(|(kk, _)| *kk == k)
                    .map(|(_, a)| *a)
                    .unwrap_or(f64::NAN)
            });
            let v = (d + 1) % k;
            let ku = (d + 1 - v) as f64;
            let ratio = (d + 1) as f64 / ku;
            PrimeBound {
                d,
                k,
                v,
                alpha_prime_k: a,
                square_bound: a * ratio * ratio,
                inverted_bound: a / (ratio * ratio),
                pair_bound: a * ((d + 1) * d) as f64 / (ku * (ku - 1.0)),
                reference,
            }
        })
        .collect()
}

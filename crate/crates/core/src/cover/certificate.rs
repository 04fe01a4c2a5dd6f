//! Weighted families of batchings and their exact verification.

use serde::{Deserialize, Serialize};

use super::mask::cycle_power;
use super::periodic::PeriodicBatching;
use crate::error::{Error, Result};
use crate::graph::GraphMask;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverColumn {
    pub lambda: Rational,
    pub batching: PeriodicBatching,
}

/// A claimed `(alpha, d)`-cover: batchings into `d + 1`-batches with weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertificate {
    pub n: usize,
    pub d: usize,
    pub period: usize,
    pub alpha: Rational,
    pub columns: Vec<CoverColumn>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColumnFile {
    lambda: Rational,
    batches: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    n: usize,
    d: usize,
    period: usize,
    alpha: Rational,
    columns: Vec<ColumnFile>,
}

impl CoverCertificate {
    /// Build from columns, setting `alpha` to the total weight.
    pub fn from_columns(n: usize, d: usize, period: usize, columns: Vec<CoverColumn>) -> Result<Self> {
        let alpha = columns.iter().map(|c| c.lambda.clone()).sum();
        let cert = CoverCertificate {
            n,
            d,
            period,
            alpha,
            columns,
        };
        cert.check_columns()?;
        Ok(cert)
    }

    fn check_columns(&self) -> Result<()> {
        for (k, c) in self.columns.iter().enumerate() {
            let b = &c.batching;
            if b.n() != self.n || b.size() != self.d + 1 || b.period() != self.period {
                return Err(Error::Invalid(format!(
                    "column {k} is not a {}-periodic batching of {} vertices into batches of {}",
                    self.period,
                    self.n,
                    self.d + 1
                )));
            }
        }
        Ok(())
    }

    pub fn lambda_sum(&self) -> Rational {
        self.columns.iter().map(|c| c.lambda.clone()).sum()
    }

    /// `Σ λ_k B(σ_k)`.
    pub fn coverage(&self) -> GraphMask {
        let mut g = GraphMask::empty(self.n);
        for c in &self.columns {
            for batch in c.batching.batches() {
                for (a, &i) in batch.iter().enumerate() {
                    for &j in &batch[a + 1..] {
                        let w = g.weight(i, j) + &c.lambda;
                        g.set_weight(i, j, w);
                    }
                }
            }
        }
        g
    }

    /// Drop columns of zero weight and merge columns with equal batched graphs.
    pub fn normalized(&self) -> Self {
        let mut out: Vec<CoverColumn> = Vec::new();
        for c in &self.columns {
            if c.lambda.is_zero() {
                continue;
            }
            let key = c.batching.partition_key();
            match out.iter_mut().find(|o| o.batching.partition_key() == key) {
                Some(o) => o.lambda += &c.lambda,
                None => out.push(c.clone()),
            }
        }
        CoverCertificate {
            columns: out,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CertificateFile {
            n: self.n,
            d: self.d,
            period: self.period,
            alpha: self.alpha.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| ColumnFile {
                    lambda: c.lambda.clone(),
                    batches: c.batching.representatives(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parse a certificate; each column lists the `period / (d + 1)`
    /// batches that are shifted by multiples of the period.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CertificateFile = serde_json::from_str(text)?;
        let columns = file
            .columns
            .into_iter()
            .map(|c| {
                Ok(CoverColumn {
                    lambda: c.lambda,
                    batching: PeriodicBatching::from_representatives(
                        file.n,
                        file.d + 1,
                        file.period,
                        &c.batches,
                    )?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cert = CoverCertificate {
            n: file.n,
            d: file.d,
            period: file.period,
            alpha: file.alpha,
            columns,
        };
        cert.check_columns()?;
        Ok(cert)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deficit {
    pub i: usize,
    pub j: usize,
    pub required: Rational,
    pub covered: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub lambda_sum: Rational,
    pub alpha_matches: bool,
    pub negative_lambdas: Vec<usize>,
    pub size_mismatch: bool,
    pub uncovered: Vec<Deficit>,
}

impl CoverReport {
    pub fn ok(&self) -> bool {
        self.alpha_matches
            && self.negative_lambdas.is_empty()
            && !self.size_mismatch
            && self.uncovered.is_empty()
    }
}

impl std::fmt::Display for CoverReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok() {
            return write!(f, "ok: alpha = {}", self.lambda_sum);
        }
        if self.size_mismatch {
            writeln!(f, "certificate and target have different sizes")?;
        }
        if !self.alpha_matches {
            writeln!(f, "alpha differs from the total weight {}", self.lambda_sum)?;
        }
        for k in &self.negative_lambdas {
            writeln!(f, "column {k} has negative weight")?;
        }
        for u in &self.uncovered {
            writeln!(
                f,
                "edge ({}, {}): covered {} < {} (deficit {})",
                u.i,
                u.j,
                u.covered,
                u.required,
                &u.required - &u.covered
            )?;
        }
        Ok(())
    }
}

/// Check `Σ λ = alpha`, `λ ≥ 0` and `Σ λ_k B(σ_k) ≥ target` edge by edge.
pub fn verify_certificate(cert: &CoverCertificate, target: &GraphMask) -> CoverReport {
    let lambda_sum = cert.lambda_sum();
    let negative_lambdas = cert
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.lambda.is_negative())
        .map(|(k, _)| k)
        .collect();
    let mut report = CoverReport {
        alpha_matches: lambda_sum == cert.alpha,
        lambda_sum,
        negative_lambdas,
        size_mismatch: target.n() != cert.n,
        uncovered: Vec::new(),
    };
    if report.size_mismatch {
        return report;
    }
    let cov = cert.coverage();
    for i in 1..=cert.n {
        for j in i + 1..=cert.n {
            let need = target.weight(i, j);
            let got = cov.weight(i, j);
            if got < need {
                report.uncovered.push(Deficit {
                    i,
                    j,
                    required: need.clone(),
                    covered: got.clone(),
                });
            }
        }
    }
    report
}

/// Parse a target description `cycle:n:d`.
pub fn parse_target(spec: &str) -> Result<GraphMask> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["cycle", n, d] => {
            let n = n.parse().map_err(|_| Error::Invalid(format!("bad n in {spec:?}")))?;
            let d = d.parse().map_err(|_| Error::Invalid(format!("bad d in {spec:?}")))?;
            cycle_power(n, d)
        }
        _ => Err(Error::Invalid(format!("unknown target {spec:?}, expected cycle:n:d"))),
    }
}

/// The shift family `σ_k(i) = i + k`, `k ∈ 0..=d`, each with weight `lambda`,
/// as batchings into `d + 1`-batches.
pub fn shift_family(n: usize, d: usize, lambda: &Rational) -> Result<CoverCertificate> {
    let size = d + 1;
    if !n.is_multiple_of(size) {
        return Err(Error::Invalid(format!("{size} does not divide {n}")));
    }
    let columns = (0..size)
        .map(|k| {
            let labels = (0..n).map(|v| (((v + k) % n) / size) as u32).collect();
            Ok(CoverColumn {
                lambda: lambda.clone(),
                batching: PeriodicBatching::from_labels(n, size, n, labels)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CoverCertificate::from_columns(n, d, n, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn shift_family_covers_cycle_power() {
        for (n, d) in [(8, 1), (9, 2), (12, 3)] {
            let cert = shift_family(n, d, &Rational::one()).unwrap();
            assert_eq!(cert.alpha, q(d as i64 + 1, 1));
            let r = verify_certificate(&cert, &cycle_power(n, d).unwrap());
            assert!(r.ok(), "{r}");
        }
    }

    #[test]
    fn zeroed_column_is_reported() {
        let mut cert = shift_family(8, 1, &Rational::one()).unwrap();
        cert.columns[0].lambda = Rational::zero();
        let r = verify_certificate(&cert, &cycle_power(8, 1).unwrap());
        assert!(!r.ok());
        assert!(!r.alpha_matches);
        // batches {1,2},{3,4},... were the only cover of the edges (1,2),(3,4),...
        assert_eq!(r.uncovered.len(), 4);
        assert!(r.uncovered.iter().all(|u| u.covered.is_zero() && u.required == Rational::one()));
    }

    #[test]
    fn json_round_trip() {
        let cert = shift_family(6, 2, &q(1, 2)).unwrap();
        let text = cert.to_json().unwrap();
        let back = CoverCertificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn periodic_json_stores_one_period() {
        let b = PeriodicBatching::from_representatives(8, 2, 4, &[vec![1, 2], vec![3, 4]]).unwrap();
        let cert = CoverCertificate::from_columns(
            8,
            1,
            4,
            vec![CoverColumn {
                lambda: Rational::one(),
                batching: b,
            }],
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&cert.to_json().unwrap()).unwrap();
        assert_eq!(v["columns"][0]["batches"], serde_json::json!([[1, 2], [3, 4]]));
        assert_eq!(v["alpha"], "1/1");
        assert_eq!(CoverCertificate::from_json(&cert.to_json().unwrap()).unwrap(), cert);
    }

    #[test]
    fn targets() {
        assert_eq!(parse_target("cycle:8:1").unwrap(), cycle_power(8, 1).unwrap());
        assert!(parse_target("path:8:1").is_err());
        assert!(parse_target("cycle:4:2").is_err());
    }
}

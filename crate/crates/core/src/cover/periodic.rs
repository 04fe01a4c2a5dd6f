use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{ArrivalOrder, GraphMask};
use crate::rational::Rational;

/// A partition of `1..=n` into labeled batches of equal size.
///
/// Labels are `0..n/size` and record the order of the batches in time, which
/// is what lets a periodic batching be continued to a longer horizon. With
/// period `p` (a multiple of `size` dividing `n`) shifting a vertex by `p`
/// shifts its label by `p/size` modulo the number of batches.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicBatching {
    n: usize,
    size: usize,
    period: usize,
    label: Vec<u32>,
}

impl PeriodicBatching {
    /// `labels[v - 1]` is the batch of vertex `v`.
    pub fn from_labels(n: usize, size: usize, period: usize, labels: Vec<u32>) -> Result<Self> {
        let b = PeriodicBatching {
            n,
            size,
            period,
            label: labels,
        };
        b.check()?;
        Ok(b)
    }

    /// The batching induced by arrival order `sigma`: slots `1..=size` form
    /// batch 0 and so on. Its period is `n` unless stated otherwise.
    pub fn from_sigma(sigma: &ArrivalOrder, size: usize) -> Result<Self> {
        let labels = sigma.slots().iter().map(|&s| ((s - 1) / size) as u32).collect();
        PeriodicBatching::from_labels(sigma.n(), size, sigma.n(), labels)
    }

    /// Expand the `period/size` representative batches (labels
    /// `0..period/size` in order) by shifting them by multiples of `period`.
    pub fn from_representatives(
        n: usize,
        size: usize,
        period: usize,
        reps: &[Vec<usize>],
    ) -> Result<Self> {
        Self::check_shape(n, size, period)?;
        let q = period / size;
        if reps.len() != q {
            return Err(Error::LengthMismatch {
                what: "representative batches",
                expected: q,
                found: reps.len(),
            });
        }
        let blocks = n / size;
        let mut label = vec![u32::MAX; n];
        for (k, batch) in reps.iter().enumerate() {
            if batch.len() != size {
                return Err(Error::Invalid(format!("batch {k} has {} vertices", batch.len())));
            }
            for &v in batch {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                for t in 0..n / period {
                    let w = (v - 1 + t * period) % n;
                    let l = ((k + q * t) % blocks) as u32;
                    if label[w] != u32::MAX {
                        return Err(Error::Invalid(format!(
                            "vertex {} lands in two batches",
                            w + 1
                        )));
                    }
                    label[w] = l;
                }
            }
        }
        PeriodicBatching::from_labels(n, size, period, label)
    }

    fn check_shape(n: usize, size: usize, period: usize) -> Result<()> {
        if size == 0 || period == 0 || !n.is_multiple_of(size) || !period.is_multiple_of(size) || !n.is_multiple_of(period) {
            return Err(Error::Invalid(format!(
                "need size | period | n, got size = {size}, period = {period}, n = {n}"
            )));
        }
        Ok(())
    }

    fn check(&self) -> Result<()> {
        Self::check_shape(self.n, self.size, self.period)?;
        if self.label.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "batch labels",
                expected: self.n,
                found: self.label.len(),
            });
        }
        let blocks = self.blocks();
        let mut count = vec![0usize; blocks];
        for &l in &self.label {
            if l as usize >= blocks {
                return Err(Error::Invalid(format!("batch label {l} out of range")));
            }
            count[l as usize] += 1;
        }
        if count.iter().any(|&c| c != self.size) {
            return Err(Error::Invalid("batches must all have the same size".into()));
        }
        let q = self.period / self.size;
        for v in 0..self.n {
            let w = (v + self.period) % self.n;
            if self.label[w] as usize != (self.label[v] as usize + q) % blocks {
                return Err(Error::Invalid(format!("not {}-periodic", self.period)));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn blocks(&self) -> usize {
        self.n / self.size
    }

    pub fn label(&self, v: usize) -> usize {
        self.label[v - 1] as usize
    }

    pub fn same_batch(&self, i: usize, j: usize) -> bool {
        self.label[i - 1] == self.label[j - 1]
    }

    /// All batches in label order, members increasing.
    pub fn batches(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(self.size); self.blocks()];
        for v in 1..=self.n {
            out[self.label(v)].push(v);
        }
        out
    }

    /// The batches with labels `0..period/size`.
    pub fn representatives(&self) -> Vec<Vec<usize>> {
        let mut b = self.batches();
        b.truncate(self.period / self.size);
        b
    }

    /// The batched graph.
    pub fn mask(&self) -> GraphMask {
        let mut g = GraphMask::empty(self.n);
        for batch in self.batches() {
            for (a, &i) in batch.iter().enumerate() {
                for &j in &batch[a + 1..] {
                    g.set_weight(i, j, Rational::one());
                }
            }
        }
        g
    }

    /// Whether the partition (ignoring labels) is invariant under a shift by `p`.
    pub fn partition_is_periodic(&self, p: usize) -> bool {
        let shift = |v: usize| (v - 1 + p) % self.n + 1;
        (1..=self.n).all(|i| {
            (i + 1..=self.n).all(|j| self.same_batch(i, j) == self.same_batch(shift(i), shift(j)))
        })
    }

    /// Continue the periodic pattern to `n2` vertices (a multiple of the period).
    pub fn extend_to(&self, n2: usize) -> Result<Self> {
        Self::check_shape(n2, self.size, self.period)?;
        let q = self.period / self.size;
        let blocks = n2 / self.size;
        let label = (0..n2)
            .map(|v| {
                let (r, t) = (v % self.period, v / self.period);
                ((self.label[r] as usize + q * t) % blocks) as u32
            })
            .collect();
        PeriodicBatching::from_labels(n2, self.size, self.period, label)
    }

    /// The partition with batches renamed in order of first member, which
    /// identifies batchings with the same batched graph.
    pub fn partition_key(&self) -> Vec<u32> {
        let mut rename = vec![u32::MAX; self.blocks()];
        let mut next = 0;
        self.label
            .iter()
            .map(|&l| {
                let r = &mut rename[l as usize];
                if *r == u32::MAX {
                    *r = next;
                    next += 1;
                }
                *r
            })
            .collect()
    }
}

/// Every `p`-periodic labeled batching of `1..=n` into batches of `d + 1`
/// that comes from a `p`-periodic arrival order, up to renaming the residue
/// classes of labels modulo `p/(d+1)`.
///
/// Residue `r ∈ 1..=p` receives a label `c_r + q·t_r` with class
/// `c_r < q = p/(d+1)` (each class used by exactly `d + 1` residues) and
/// offset `t_r < n/p`; vertex `r + t·p` then sits in batch
/// `(c_r + q·(t_r + t)) mod n/(d+1)`.
pub fn enumerate_periodic_labelings(n: usize, p: usize, d: usize) -> Result<Vec<PeriodicBatching>> {
    let mut out = Vec::new();
    for_each_periodic_labeling(n, p, d, |b| out.push(b.clone()))?;
    Ok(out)
}

/// Streaming form of [`enumerate_periodic_labelings`].
pub fn for_each_periodic_labeling(
    n: usize,
    p: usize,
    d: usize,
    mut f: impl FnMut(&PeriodicBatching),
) -> Result<()> {
    let size = d + 1;
    PeriodicBatching::check_shape(n, size, p)?;
    let q = p / size;
    let m = n / p;
    let blocks = n / size;
    let mut classes = vec![0usize; p];
    let mut used = vec![0usize; q];
    let mut scratch = PeriodicBatching {
        n,
        size,
        period: p,
        label: vec![0; n],
    };
    class_assignments(0, p, size, &mut classes, &mut used, &mut |cls| {
        let mut offsets = vec![0usize; p];
        loop {
            for v in 0..n {
                let (r, t) = (v % p, v / p);
                scratch.label[v] = ((cls[r] + q * (offsets[r] + t)) % blocks) as u32;
            }
            f(&scratch);
            // odometer over offsets
            let mut k = 0;
            while k < p {
                offsets[k] += 1;
                if offsets[k] < m {
                    break;
                }
                offsets[k] = 0;
                k += 1;
            }
            if k == p {
                break;
            }
        }
    });
    Ok(())
}

fn class_assignments(
    r: usize,
    p: usize,
    size: usize,
    classes: &mut Vec<usize>,
    used: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if r == p {
        emit(classes);
        return;
    }
    // canonical class naming: a residue may open at most one new class
    let opened = used.iter().take_while(|&&c| c > 0).count();
    for c in 0..used.len().min(opened + 1) {
        if used[c] < size {
            used[c] += 1;
            classes[r] = c;
            class_assignments(r + 1, p, size, classes, used, emit);
            used[c] -= 1;
        }
    }
}

/// Distinct `p`-periodic batchings of `1..=n` into `(d+1)`-batches, one per
/// batched graph.
pub fn enumerate_periodic_batchings(n: usize, p: usize, d: usize) -> Result<Vec<PeriodicBatching>> {
    Ok(dedup_by_partition(enumerate_periodic_labelings(n, p, d)?, None))
}

/// Keep the first batching for each distinct partition, compared after
/// extending to `horizon` vertices when given.
pub fn dedup_by_partition(
    items: Vec<PeriodicBatching>,
    horizon: Option<usize>,
) -> Vec<PeriodicBatching> {
    let mut seen = HashSet::new();
    items
        .into_iter()
        .filter(|b| {
            let key = match horizon {
                Some(h) => b.extend_to(h).expect("horizon is a multiple of the period").partition_key(),
                None => b.partition_key(),
            };
            seen.insert(key)
        })
        .collect()
}

/// Whether `sigma` is `p`-periodic: `σ(i + p) ≡ σ(i) + p (mod n)`.
pub fn is_periodic_order(sigma: &ArrivalOrder, p: usize) -> bool {
    let n = sigma.n();
    (1..=n).all(|i| {
        let j = (i - 1 + p) % n + 1;
        (sigma.slot(i) - 1 + p) % n + 1 == sigma.slot(j)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives_round_trip() {
        let all = enumerate_periodic_labelings(8, 4, 1).unwrap();
        for b in &all {
            let back = PeriodicBatching::from_representatives(8, 2, 4, &b.representatives()).unwrap();
            assert_eq!(&back, b);
        }
    }

    #[test]
    fn periodic_orders_match_enumeration() {
        let mut direct = HashSet::new();
        for sigma in ArrivalOrder::all(8) {
            if is_periodic_order(&sigma, 4) {
                direct.insert(PeriodicBatching::from_sigma(&sigma, 2).unwrap().partition_key());
            }
        }
        let ours: HashSet<_> = enumerate_periodic_batchings(8, 4, 1)
            .unwrap()
            .iter()
            .map(|b| b.partition_key())
            .collect();
        assert_eq!(ours, direct);
    }

    #[test]
    fn outputs_satisfy_invariants() {
        for b in enumerate_periodic_batchings(16, 8, 3).unwrap() {
            assert!(b.partition_is_periodic(8));
            assert!(b.batches().iter().all(|x| x.len() == 4));
        }
    }

    #[test]
    fn divisibility_is_checked() {
        assert!(enumerate_periodic_labelings(8, 3, 1).is_err());
        assert!(enumerate_periodic_labelings(10, 4, 1).is_err());
    }

    #[test]
    fn extension_keeps_pattern() {
        let b = PeriodicBatching::from_labels(8, 2, 4, (0..8).map(|v| v / 2).collect()).unwrap();
        let e = b.extend_to(16).unwrap();
        assert_eq!(e.batches()[5], vec![11, 12]);
        assert_eq!(b.extend_to(8).unwrap(), b);
    }
}

use crate::error::{Error, Result};
use crate::graph::{ArrivalOrder, GraphMask};
use crate::rational::Rational;

/// `C_n^d`: edges between vertices at cyclic distance at most `d`.
pub fn cycle_power(n: usize, d: usize) -> Result<GraphMask> {
    if n <= 2 * d {
        return Err(Error::Invalid(format!(
            "cycle power needs n > 2d, got n = {n}, d = {d}"
        )));
    }
    let mut g = GraphMask::empty(n);
    for i in 1..=n {
        for k in 1..=d {
            let j = (i - 1 + k) % n + 1;
            g.set_weight(i, j, Rational::one());
        }
    }
    Ok(g)
}

/// `P_n^d(σ)`: edges between vertices whose arrival slots differ by at most `d`.
pub fn path_power(sigma: &ArrivalOrder, d: usize) -> GraphMask {
    let n = sigma.n();
    let mut g = GraphMask::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            if sigma.slot(i).abs_diff(sigma.slot(j)) <= d {
                g.set_weight(i, j, Rational::one());
            }
        }
    }
    g
}

/// `B_n^d(σ)`: cliques on the windows of `d + 1` consecutive slots.
pub fn batched_graph(sigma: &ArrivalOrder, d: usize) -> GraphMask {
    let n = sigma.n();
    let mut g = GraphMask::empty(n);
    for i in 1..=n {
        for j in i + 1..=n {
            if (sigma.slot(i) - 1) / (d + 1) == (sigma.slot(j) - 1) / (d + 1) {
                g.set_weight(i, j, Rational::one());
            }
        }
    }
    g
}

/// `a·H + b·H'`.
pub fn mask_add(a: &Rational, h: &GraphMask, b: &Rational, h2: &GraphMask) -> Result<GraphMask> {
    h.linear_combination(a, h2, b)
}

/// Entrywise product `H ∘ H'`.
pub fn mask_mul(h: &GraphMask, h2: &GraphMask) -> Result<GraphMask> {
    h.hadamard(h2)
}

/// Whether `H` covers `H'`, i.e. `H ≥ H'` entrywise.
pub fn is_cover(h: &GraphMask, h2: &GraphMask) -> Result<bool> {
    h.dominates(h2)
}

/// `f_u(H)`: merge each run of `u` consecutive vertices; two groups are
/// adjacent when any of their members are.
pub fn contract(h: &GraphMask, u: usize) -> Result<GraphMask> {
    let n = h.n();
    if u == 0 || !n.is_multiple_of(u) {
        return Err(Error::Invalid(format!("contraction size {u} does not divide {n}")));
    }
    let m = n / u;
    let mut g = GraphMask::empty(m);
    for (i, j, _) in h.edges() {
        let (a, b) = ((i - 1) / u + 1, (j - 1) / u + 1);
        if a != b {
            g.set_weight(a, b, Rational::one());
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn small_cycle_power() {
        let c = cycle_power(4, 1).unwrap();
        let e: Vec<_> = c.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(e, vec![(1, 2), (1, 4), (2, 3), (3, 4)]);
        assert!(cycle_power(4, 2).is_err());
    }

    #[test]
    fn cycle_power_degrees() {
        let c = cycle_power(12, 3).unwrap();
        for v in 1..=12 {
            assert_eq!(c.neighbors(v).count(), 6);
        }
        for (n, d) in [(5, 2), (9, 4), (20, 3)] {
            assert_eq!(cycle_power(n, d).unwrap().edge_count(), n * d);
        }
    }

    #[test]
    fn batched_identity_is_cliques() {
        let b = batched_graph(&ArrivalOrder::identity(8), 1);
        let e: Vec<_> = b.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(e, vec![(1, 2), (3, 4), (5, 6), (7, 8)]);
        let t = batched_graph(&ArrivalOrder::identity(6), 2);
        assert_eq!(t.edge_count(), 6);
    }

    #[test]
    fn contraction_of_cycle_power() {
        let c = cycle_power(12, 3).unwrap();
        assert_eq!(contract(&c, 2).unwrap(), cycle_power(6, 2).unwrap());
    }

    #[test]
    fn trivial_algebra() {
        let h = cycle_power(7, 2).unwrap();
        let h2 = path_power(&ArrivalOrder::identity(7), 1);
        assert_eq!(mask_add(&q(1, 1), &h, &q(0, 1), &h2).unwrap(), h);
        assert!(is_cover(&h, &h2).unwrap());
        assert!(!is_cover(&h2, &h).unwrap());
    }
}

//! Exact ordered fields used by the game evaluator: the rationals and
//! `Q(√5)`, which holds the golden-ratio weights exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::rational::Rational;

/// An exact ordered field.
pub trait ExactField:
    Clone
    + Ord
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: Rational) -> Self;

    fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

impl ExactField for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }
}

/// `a + b√5` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd5 {
    pub a: Rational,
    pub b: Rational,
}

impl Surd5 {
    pub fn new(a: Rational, b: Rational) -> Self {
        Surd5 { a, b }
    }

    /// `(√5 − 1)/2`.
    pub fn golden_conjugate() -> Self {
        Surd5::new(crate::rational::q(-1, 2), crate::rational::q(1, 2))
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * 5f64.sqrt()
    }

    fn signum(&self) -> Ordering {
        let zero = Rational::zero();
        let sa = self.a.cmp(&zero);
        let sb = self.b.cmp(&zero);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // opposite signs: compare a² with 5b²
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * Rational::integer(5);
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }
}

impl fmt::Display for Surd5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}·√5", self.b)
        } else {
            write!(f, "{} + {}·√5", self.a, self.b)
        }
    }
}

impl PartialOrd for Surd5 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd5 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl Add for Surd5 {
    type Output = Surd5;
    fn add(self, o: Surd5) -> Surd5 {
        Surd5::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Surd5 {
    type Output = Surd5;
    fn sub(self, o: Surd5) -> Surd5 {
        Surd5::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Surd5 {
    type Output = Surd5;
    fn neg(self) -> Surd5 {
        Surd5::new(-self.a, -self.b)
    }
}

impl Mul for Surd5 {
    type Output = Surd5;
    fn mul(self, o: Surd5) -> Surd5 {
        let five = Rational::integer(5);
        Surd5::new(
            &self.a * &o.a + five * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}

impl Div for Surd5 {
    type Output = Surd5;
    /// Panics on division by zero.
    fn div(self, o: Surd5) -> Surd5 {
        // multiply by the conjugate a − b√5
        let norm = &o.a * &o.a - Rational::integer(5) * &o.b * &o.b;
        assert!(!norm.is_zero(), "division by zero in Q(√5)");
        let num = self * Surd5::new(o.a, -o.b);
        Surd5::new(num.a / &norm, num.b / &norm)
    }
}

impl ExactField for Surd5 {
    fn from_rational(r: Rational) -> Self {
        Surd5::new(r, Rational::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn golden_identities() {
        let g = Surd5::golden_conjugate();
        // g² + g = 1 and 1/(1+g) = g
        assert_eq!(g.clone() * g.clone() + g.clone(), Surd5::one());
        assert_eq!(Surd5::one() / (Surd5::one() + g.clone()), g);
        assert!((g.to_f64() - 0.6180339887).abs() < 1e-9);
    }

    #[test]
    fn ordering() {
        let g = Surd5::golden_conjugate();
        assert!(g > Surd5::from_rational(q(618, 1000)));
        assert!(g < Surd5::from_rational(q(619, 1000)));
        let s = Surd5::new(q(0, 1), q(1, 1));
        assert!(s > Surd5::from_rational(q(2236, 1000)));
        assert!(-s.clone() < Surd5::zero());
        assert_eq!(s.cmp(&s), Ordering::Equal);
    }
}

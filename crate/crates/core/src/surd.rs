//! Exact arithmetic on numbers of the form `a + b*sqrt(d)`.
//!
//! Several mechanism guards compare an irrational constant times a value
//! against an exactly-known rational (for example `(2+sqrt(6)) * v(i*)`
//! against a brute-force optimum). Deciding these comparisons in floating
//! point could flip a branch and silently break a truthfulness audit, so
//! they are carried out exactly in the quadratic field Q(sqrt(d)).

use crate::num::{sqrt_bounds, Rat};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// `a + b*sqrt(d)` with `a, b, d` rational and `d >= 0`.
///
/// Arithmetic is only defined between values sharing the same radicand `d`
/// (rationals embed with `b = 0` and are compatible with any `d`).
#[derive(Clone, PartialEq)]
pub struct Surd {
    pub a: Rat,
    pub b: Rat,
    pub d: Rat,
}

impl Surd {
    pub fn new(a: Rat, b: Rat, d: Rat) -> Self {
        assert!(!d.is_negative(), "radicand must be non-negative");
        Surd { a, b, d }
    }

    pub fn from_rat(a: Rat) -> Self {
        Surd { a, b: Rat::zero(), d: Rat::zero() }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() || self.d.is_zero()
    }

    fn join_radicand(&self, other: &Surd) -> Rat {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Rat::zero(),
            (false, true) => self.d.clone(),
            (true, false) => other.d.clone(),
            (false, false) => {
                assert_eq!(self.d, other.d, "mixed radicands");
                self.d.clone()
            }
        }
    }

    pub fn add(&self, other: &Surd) -> Surd {
        let d = self.join_radicand(other);
        Surd::new(&self.a + &other.a, &self.b + &other.b, d)
    }

    pub fn sub(&self, other: &Surd) -> Surd {
        let d = self.join_radicand(other);
        Surd::new(&self.a - &other.a, &self.b - &other.b, d)
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        let d = self.join_radicand(other);
        Surd::new(
            &self.a * &other.a + &self.b * &other.b * &d,
            &self.a * &other.b + &self.b * &other.a,
            d,
        )
    }

    pub fn scale(&self, r: &Rat) -> Surd {
        Surd::new(&self.a * r, &self.b * r, self.d.clone())
    }

    pub fn div(&self, other: &Surd) -> Surd {
        // Multiply by the conjugate; the norm a^2 - b^2 d is rational.
        let d = self.join_radicand(other);
        let norm = &other.a * &other.a - &other.b * &other.b * &d;
        assert!(!norm.is_zero(), "division by zero surd");
        let conj = Surd::new(other.a.clone(), -other.b.clone(), d.clone());
        let num = self.mul(&conj);
        Surd::new(num.a / &norm, num.b / &norm, d)
    }

    /// Exact sign of `a + b*sqrt(d)`.
    pub fn sign(&self) -> Ordering {
        let sa = rat_sign(&self.a);
        if self.is_rational() {
            return sa;
        }
        let sb = rat_sign(&self.b);
        match (sa, sb) {
            (Ordering::Equal, s) => s,
            (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            // Opposite signs: compare a^2 against b^2 d; the sign of the
            // dominant magnitude wins, equality means the value is zero.
            (sa, _) => {
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * &self.d;
                match a2.cmp(&b2d) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn cmp_surd(&self, other: &Surd) -> Ordering {
        self.sub(other).sign()
    }

    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        self.cmp_surd(&Surd::from_rat(r.clone()))
    }

    /// Decides `self * v >= rhs` exactly, for rational `v`, `rhs`.
    pub fn times_ge(&self, v: &Rat, rhs: &Rat) -> bool {
        self.scale(v).cmp_rat(rhs) != Ordering::Less
    }

    /// A rational upper bound within `1/2^bits` of the exact value.
    pub fn upper_approx(&self, bits: u32) -> Rat {
        let (lo, hi) = sqrt_bounds(&self.d, bits);
        if self.b.is_negative() {
            &self.a + &self.b * lo
        } else {
            &self.a + &self.b * hi
        }
    }

    /// A rational lower bound within `1/2^bits` of the exact value.
    pub fn lower_approx(&self, bits: u32) -> Rat {
        let (lo, hi) = sqrt_bounds(&self.d, bits);
        if self.b.is_negative() {
            &self.a + &self.b * hi
        } else {
            &self.a + &self.b * lo
        }
    }
}

fn rat_sign(r: &Rat) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{frac, rat};

    fn two_plus_sqrt6() -> Surd {
        Surd::new(rat(2), rat(1), rat(6))
    }

    #[test]
    fn sign_analysis() {
        // 2 + sqrt(6) > 4 since sqrt(6) > 2.
        assert_eq!(two_plus_sqrt6().cmp_rat(&rat(4)), Ordering::Greater);
        // 2 + sqrt(6) < 4.5 since sqrt(6) < 2.5.
        assert_eq!(two_plus_sqrt6().cmp_rat(&frac(9, 2)), Ordering::Less);
        // 3 - sqrt(9) = 0 exactly.
        let zero = Surd::new(rat(3), rat(-1), rat(9));
        assert_eq!(zero.sign(), Ordering::Equal);
        // -1 + sqrt(2) > 0, -3 + sqrt(2) < 0.
        assert_eq!(Surd::new(rat(-1), rat(1), rat(2)).sign(), Ordering::Greater);
        assert_eq!(Surd::new(rat(-3), rat(1), rat(2)).sign(), Ordering::Less);
    }

    #[test]
    fn field_arithmetic() {
        let x = two_plus_sqrt6();
        let y = Surd::new(rat(-1), rat(2), rat(6));
        // (2+sqrt6)(-1+2sqrt6) = -2 + 4sqrt6 - sqrt6 + 12 = 10 + 3sqrt6
        let p = x.mul(&y);
        assert_eq!(p.a, rat(10));
        assert_eq!(p.b, rat(3));
        // Division inverts multiplication.
        let q = p.div(&y);
        assert_eq!(q.cmp_surd(&x), Ordering::Equal);
        assert_eq!(q.a, x.a);
        assert_eq!(q.b, x.b);
    }

    #[test]
    fn guard_comparison() {
        // (2+sqrt6)*2 >= 8 (true: 4+2*2.449 = 8.898...)
        assert!(two_plus_sqrt6().times_ge(&rat(2), &rat(8)));
        // (2+sqrt6)*2 >= 9 (false)
        assert!(!two_plus_sqrt6().times_ge(&rat(2), &rat(9)));
        // Equality counts as >=: (3 - sqrt(4)) * 5 >= 5.
        let one = Surd::new(rat(3), rat(-1), rat(4));
        assert!(one.times_ge(&rat(5), &rat(5)));
    }

    #[test]
    fn approximations_bracket_exact_value() {
        let x = two_plus_sqrt6();
        let up = x.upper_approx(40);
        let lo = x.lower_approx(40);
        assert_eq!(x.cmp_rat(&up), Ordering::Less);
        assert_eq!(x.cmp_rat(&lo), Ordering::Greater);
        assert!(&up - &lo <= frac(1, 1 << 30));
        // Negative coefficient flips which sqrt bound is used.
        let y = Surd::new(rat(10), rat(-1), rat(6));
        assert_eq!(y.cmp_rat(&y.upper_approx(40)), Ordering::Less);
        assert_eq!(y.cmp_rat(&y.lower_approx(40)), Ordering::Greater);
    }
}

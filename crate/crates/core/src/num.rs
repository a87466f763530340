//! Exact rational arithmetic helpers.
//!
//! Every value, weight, cost, budget and payment in this crate is a
//! [`Rat`] (arbitrary-precision rational). Floating point shows up only
//! when rendering reports for humans.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, the only number type used by the algorithms.
pub type Rat = num_rational::BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `n/d`.
pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `1/2^k`.
pub fn pow2_inv(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| format!("bad rational {s:?}: {e}"))
}

/// Renders a rational as `p/q` (or just `p` when the denominator is one).
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// Decimal rendering with `digits` fractional digits, for human-facing columns.
pub fn to_decimal(r: &Rat, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r * Rat::from_integer(scale.clone())).round();
    let neg = scaled.is_negative();
    let mut digits_str = scaled.numer().abs().to_string();
    let d = digits as usize;
    if digits_str.len() <= d {
        digits_str = format!("{}{}", "0".repeat(d + 1 - digits_str.len()), digits_str);
    }
    let split = digits_str.len() - d;
    let (int_part, frac_part) = digits_str.split_at(split);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Approximate value as `f64`, for logging only.
pub fn to_f64(r: &Rat) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators of `values`.
///
/// Multiplying every value by this turns them all into integers.
pub fn denominator_lcm<'a>(values: impl Iterator<Item = &'a Rat>) -> BigInt {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(v.denom());
    }
    l
}

/// Rational lower and upper bounds for `sqrt(x)`, with `upper - lower <= 1/2^bits`.
///
/// Requires `x >= 0`.
pub fn sqrt_bounds(x: &Rat, bits: u32) -> (Rat, Rat) {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    // sqrt(p/q) = sqrt(p*q)/q; scale so the integer sqrt carries enough bits.
    let p = x.numer();
    let q = x.denom();
    let scaled = p * q << (2 * bits);
    let s = scaled.sqrt();
    let denom = q << bits;
    let lower = Rat::new(s.clone(), denom.clone());
    let upper = Rat::new(s + BigInt::one(), denom);
    (lower, upper)
}

/// The unique rational of smallest denominator (then smallest numerator)
/// inside the closed interval `[lo, hi]`.
///
/// Used to snap a bisection bracket onto the exact breakpoint of a
/// piecewise-constant predicate.
pub fn simplest_in_interval(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo <= hi);
    if lo == hi {
        return lo.clone();
    }
    if lo.is_negative() && !hi.is_negative() {
        return Rat::zero();
    }
    if hi.is_negative() {
        return -simplest_in_interval(&-hi.clone(), &-lo.clone());
    }
    simplest_nonneg(lo, hi)
}

fn simplest_nonneg(lo: &Rat, hi: &Rat) -> Rat {
    // Continued-fraction descent: if an integer lies in [lo, hi] take the
    // smallest one, otherwise recurse on the reciprocal of the fractional part.
    let fl = lo.floor();
    let candidate = if fl == *lo { fl.clone() } else { &fl + Rat::one() };
    if candidate <= *hi {
        return candidate;
    }
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    let inner = simplest_nonneg(&hi_frac.recip(), &lo_frac.recip());
    &fl + inner.recip()
}

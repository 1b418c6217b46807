//! Exact rational arithmetic helpers and extended (infinite) bounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Q = Rational64;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn to_f64(x: Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses a decimal literal such as `-12`, `0.25` or `3.` exactly.
pub fn parse_decimal(text: &str) -> Option<Q> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut num: i64 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        num = num.checked_mul(10)?.checked_add(c.to_digit(10)? as i64)?;
    }
    let den = 10i64.checked_pow(frac_part.len() as u32)?;
    let v = Q::new(num, den);
    Some(if neg { -v } else { v })
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub fn from_f64(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let neg = x < 0.0;
    let mut y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    for _ in 0..64 {
        let a = y.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = y - a as f64;
        if frac < 1e-12 || ((p1 as f64 / q1 as f64) - x.abs()).abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = Q::new(p1, q1);
    Some(if neg { -r } else { r })
}

/// Snaps a solver value to a nearby rational, preferring integers.
pub fn snap(x: f64) -> Option<Q> {
    let r = x.round();
    if (x - r).abs() <= 1e-7 && r.abs() < 9e15 {
        return Some(q(r as i64));
    }
    from_f64(x, 1_000_000)
}

/// A rational extended with positive and negative infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtQ {
    NegInf,
    Fin(Q),
    PosInf,
}

impl ExtQ {
    pub fn zero() -> Self {
        ExtQ::Fin(Q::zero())
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtQ::Fin(_))
    }

    pub fn finite(self) -> Option<Q> {
        match self {
            ExtQ::Fin(x) => Some(x),
            _ => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtQ::NegInf => f64::NEG_INFINITY,
            ExtQ::Fin(x) => to_f64(x),
            ExtQ::PosInf => f64::INFINITY,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Multiplication by a finite scalar; `0 * inf` is 0.
    pub fn scale(self, k: Q) -> Self {
        if k.is_zero() {
            return ExtQ::zero();
        }
        match self {
            ExtQ::Fin(x) => ExtQ::Fin(x * k),
            ExtQ::PosInf if k.is_positive() => ExtQ::PosInf,
            ExtQ::PosInf => ExtQ::NegInf,
            ExtQ::NegInf if k.is_positive() => ExtQ::NegInf,
            ExtQ::NegInf => ExtQ::PosInf,
        }
    }
}

impl From<Q> for ExtQ {
    fn from(x: Q) -> Self {
        ExtQ::Fin(x)
    }
}

impl PartialOrd for ExtQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtQ {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtQ::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

/// Addition; `inf + -inf` is not meaningful and yields the left operand.
impl Add for ExtQ {
    type Output = ExtQ;
    fn add(self, other: ExtQ) -> ExtQ {
        match (self, other) {
            (ExtQ::Fin(a), ExtQ::Fin(b)) => ExtQ::Fin(a + b),
            (ExtQ::Fin(_), inf) => inf,
            (inf, _) => inf,
        }
    }
}

impl Add<Q> for ExtQ {
    type Output = ExtQ;
    fn add(self, other: Q) -> ExtQ {
        self + ExtQ::Fin(other)
    }
}

impl Neg for ExtQ {
    type Output = ExtQ;
    fn neg(self) -> ExtQ {
        match self {
            ExtQ::NegInf => ExtQ::PosInf,
            ExtQ::Fin(x) => ExtQ::Fin(-x),
            ExtQ::PosInf => ExtQ::NegInf,
        }
    }
}

impl Mul<Q> for ExtQ {
    type Output = ExtQ;
    fn mul(self, k: Q) -> ExtQ {
        self.scale(k)
    }
}

impl fmt::Display for ExtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtQ::NegInf => f.write_str("-inf"),
            ExtQ::PosInf => f.write_str("inf"),
            ExtQ::Fin(x) => write!(f, "{x}"),
        }
    }
}

/// A closed interval `[lo, hi]` with possibly infinite ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: ExtQ,
    pub hi: ExtQ,
}

impl Interval {
    pub fn point(x: Q) -> Self {
        Interval {
            lo: ExtQ::Fin(x),
            hi: ExtQ::Fin(x),
        }
    }

    pub fn new(lo: ExtQ, hi: ExtQ) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn scale(&self, k: Q) -> Interval {
        if k.is_negative() {
            Interval {
                lo: self.hi.scale(k),
                hi: self.lo.scale(k),
            }
        } else {
            Interval {
                lo: self.lo.scale(k),
                hi: self.hi.scale(k),
            }
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Least common multiple of the denominators of `values` (1 when empty).
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Q>) -> i64 {
    values
        .into_iter()
        .fold(1i64, |acc, v| num_integer::lcm(acc, *v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.25"), Some(qr(1, 4)));
        assert_eq!(parse_decimal("-12"), Some(q(-12)));
        assert_eq!(parse_decimal("3."), Some(q(3)));
        assert_eq!(parse_decimal(".5"), Some(qr(1, 2)));
        assert_eq!(parse_decimal("1e3"), None);
        assert_eq!(parse_decimal("-"), None);
    }

    #[test]
    fn snapping_recovers_simple_fractions() {
        assert_eq!(snap(2.0000000001), Some(q(2)));
        assert_eq!(snap(1.0 / 3.0), Some(qr(1, 3)));
        assert_eq!(snap(-0.75), Some(qr(-3, 4)));
        assert_eq!(snap(f64::INFINITY), None);
    }

    #[test]
    fn extended_order_and_arithmetic() {
        assert!(ExtQ::NegInf < ExtQ::Fin(q(-1000)));
        assert!(ExtQ::Fin(q(1000)) < ExtQ::PosInf);
        assert_eq!(ExtQ::PosInf.scale(q(-2)), ExtQ::NegInf);
        assert_eq!(ExtQ::PosInf.scale(q(0)), ExtQ::zero());
        assert_eq!(ExtQ::Fin(q(2)) + q(3), ExtQ::Fin(q(5)));
        let i = Interval::new(ExtQ::Fin(q(-1)), ExtQ::Fin(q(2))).scale(q(-3));
        assert_eq!(i, Interval::new(ExtQ::Fin(q(-6)), ExtQ::Fin(q(3))));
    }

    #[test]
    fn lcm_of_denominators() {
        assert_eq!(denominator_lcm(&[qr(1, 2), qr(-1, 4), q(3)]), 4);
        assert_eq!(denominator_lcm(&[]), 1);
    }
}

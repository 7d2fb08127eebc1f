//! Numeric literals that stay exact (rational) for as long as arithmetic allows.
//!
//! Every literal of the expression grammar is a terminating decimal, so parsing
//! produces exact rationals. Arithmetic between exact values is carried out in
//! checked `i64` rationals and degrades to `f64` on overflow or when mixed with an
//! inexact operand.

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Largest denominator accepted when turning an `f64` back into an exact value.
const MAX_DYADIC_DENOM: i64 = 1 << 20;

#[derive(Debug, Clone, Copy)]
pub enum Scalar {
    Exact(Rational64),
    Inexact(f64),
}

#[allow(clippy::should_implement_trait)]
impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(Rational64::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(Rational64::new(num, den))
    }

    /// Converts a float, keeping it exact when it is a dyadic rational with a
    /// small denominator (integers, halves, quarters, ...).
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() && x.abs() < 1e15 {
            let scaled = x * MAX_DYADIC_DENOM as f64;
            if scaled.fract() == 0.0 && scaled.abs() < i64::MAX as f64 {
                return Scalar::Exact(Rational64::new(scaled as i64, MAX_DYADIC_DENOM));
            }
        }
        Scalar::Inexact(x)
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Inexact(x) => x,
        }
    }

    pub fn as_exact(self) -> Option<Rational64> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Inexact(_) => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Inexact(x) => x == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Inexact(x) => x == 1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Inexact(x) => x < 0.0,
        }
    }

    pub fn abs(self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Inexact(x) => Scalar::Inexact(x.abs()),
        }
    }

    fn combine(
        self,
        rhs: Self,
        exact: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Self {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, rhs) {
            if let Some(r) = exact(&a, &b) {
                return Scalar::Exact(r);
            }
        }
        Scalar::Inexact(float(self.to_f64(), rhs.to_f64()))
    }

    pub fn add(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }

    /// Division; `None` when the divisor is zero.
    pub fn div(self, rhs: Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        Some(self.combine(rhs, |a, b| a.checked_div(b), |a, b| a / b))
    }

    pub fn neg(self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Inexact(x) => Scalar::Inexact(-x),
        }
    }

    /// Real power with a rational exponent, using the signed real root for odd
    /// denominators. `None` when the value is undefined.
    pub fn pow(self, exponent: Rational64) -> Option<Self> {
        if let Scalar::Exact(base) = self {
            if let Some(r) = exact_pow(base, exponent) {
                return Some(Scalar::Exact(r));
            }
        }
        let value = real_pow(self.to_f64(), exponent)?;
        Some(Scalar::Inexact(value))
    }

    /// Least common multiple of the denominators of exact values; `None` if any
    /// value is inexact or the multiple overflows.
    pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> Option<i64> {
        let mut lcm: i64 = 1;
        for v in values {
            let r = v.as_exact()?;
            let d = *r.denom();
            let g = num_integer::gcd(lcm, d);
            lcm = (lcm / g).checked_mul(d)?;
        }
        Some(lcm)
    }
}

/// Evaluates `base^exponent` over the reals. Odd-denominator exponents take
/// the signed root of negative bases; even denominators on negative bases and
/// non-positive exponents of zero are undefined.
pub fn real_pow(base: f64, exponent: Rational64) -> Option<f64> {
    let p = *exponent.numer();
    let q = *exponent.denom();
    if q == 1 {
        if base == 0.0 && p < 0 {
            return None;
        }
        return Some(match i32::try_from(p) {
            Ok(p) => base.powi(p),
            Err(_) => base.powf(p as f64),
        });
    }
    if base == 0.0 {
        return if p > 0 { Some(0.0) } else { None };
    }
    if base < 0.0 && q % 2 == 0 {
        return None;
    }
    let magnitude = base.abs();
    let root = match q {
        2 => magnitude.sqrt(),
        3 => magnitude.cbrt(),
        _ => magnitude.powf(1.0 / q as f64),
    };
    let mut value = match i32::try_from(p) {
        Ok(p) => root.powi(p),
        Err(_) => root.powf(p as f64),
    };
    if base < 0.0 && p % 2 != 0 {
        value = -value;
    }
    Some(value)
}

fn exact_pow(base: Rational64, exponent: Rational64) -> Option<Rational64> {
    let p = *exponent.numer();
    let q = *exponent.denom();
    let root = if q == 1 {
        base
    } else {
        if base.is_negative() && q % 2 == 0 {
            return None;
        }
        let q32 = u32::try_from(q).ok()?;
        let n = exact_int_root(*base.numer(), q32)?;
        let d = exact_int_root(*base.denom(), q32)?;
        Rational64::new(n, d)
    };
    if root.is_zero() && p < 0 {
        return None;
    }
    let mut acc = Rational64::one();
    for _ in 0..p.unsigned_abs().min(64) {
        acc = acc.checked_mul(&root)?;
    }
    if p.unsigned_abs() > 64 {
        return None;
    }
    if p < 0 {
        acc = Rational64::one().checked_div(&acc)?;
    }
    Some(acc)
}

/// Exact integer `k`-th root (signed for odd `k`), if one exists.
fn exact_int_root(n: i64, k: u32) -> Option<i64> {
    if n < 0 {
        if k.is_multiple_of(2) {
            return None;
        }
        return exact_int_root(n.checked_neg()?, k).map(|r| -r);
    }
    let guess = (n as f64).powf(1.0 / k as f64).round() as i64;
    (guess.saturating_sub(1)..=guess.saturating_add(1))
        .filter(|c| *c >= 0)
        .find(|c| c.checked_pow(k) == Some(n))
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl fmt::Display for Scalar {
    /// Exact values print as `n` or `n/d`; inexact values use the shortest
    /// round-tripping decimal, which the parser reads back exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Inexact(x) => {
                let s = format!("{x}");
                if s.contains('.') || s.contains("inf") || s.contains("NaN") {
                    write!(f, "{s}")
                } else {
                    write!(f, "{s}.0")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Scalar::ratio(2, 6);
        assert_eq!(a, Scalar::ratio(1, 3));
        let b = a.add(Scalar::ratio(2, 3));
        assert!(b.is_one() && b.is_exact());
        assert_eq!(Scalar::int(7).div(Scalar::int(0)), None);
    }

    #[test]
    fn overflow_degrades_to_float() {
        let big = Scalar::int(i64::MAX / 2);
        let p = big.mul(big);
        assert!(!p.is_exact());
        assert!((p.to_f64() - (i64::MAX / 2) as f64 * (i64::MAX / 2) as f64).abs() < 1e20);
    }

    #[test]
    fn signed_roots() {
        assert_eq!(real_pow(-8.0, Rational64::new(1, 3)), Some(-2.0));
        assert_eq!(real_pow(-8.0, Rational64::new(2, 3)), Some(4.0));
        assert_eq!(real_pow(-4.0, Rational64::new(1, 2)), None);
        assert_eq!(real_pow(0.0, Rational64::new(-1, 3)), None);
        assert_eq!(
            Scalar::ratio(-27, 8).pow(Rational64::new(1, 3)),
            Some(Scalar::ratio(-3, 2))
        );
        assert_eq!(
            Scalar::int(2)
                .pow(Rational64::new(1, 3))
                .map(Scalar::is_exact),
            Some(false)
        );
    }

    #[test]
    fn float_conversion() {
        assert!(Scalar::from_f64(-1.0).is_exact());
        assert!(Scalar::from_f64(0.25).is_exact());
        assert!(!Scalar::from_f64(0.1).is_exact());
        assert_eq!(format!("{}", Scalar::ratio(-2, 3)), "-2/3");
        assert_eq!(format!("{}", Scalar::Inexact(3.0)), "3.0");
    }
}

//! The coefficient abstraction shared by matrices and series.
//!
//! Group elements live over p-adic scalars, the symbolic coordinate changes
//! live over polynomials, and the Lie-theoretic bookkeeping lives over exact
//! rationals. All three are rings whose constants depend on runtime context
//! (the prime and precision for p-adics, the variable count for polynomials),
//! so constants are produced from an existing value rather than from a bare
//! `zero()`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Rational, Result};

/// A commutative ring element that knows how to build its own constants.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn vanishes(&self) -> bool;
    /// Multiplicative inverse when it exists in the ring.
    fn try_inv(&self) -> Option<Self>;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }

    fn one_like(&self) -> Self {
        Rational::one()
    }

    fn from_i64_like(&self, n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }

    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// A valuation that may only be known up to a lower bound.
///
/// `Exact(v)` is a certified value, `AtLeast(v)` means every digit below `v`
/// vanished at the working precision, `Infinity` is reserved for values known
/// to be exactly zero (or, for group elements, exactly the identity).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(Rational),
    AtLeast(Rational),
    Infinity,
}

/// Values of the p-valuation on the pro-p Iwahori subgroup share the same
/// three-state encoding as scalar valuations.
pub type PValue = Valuation;

impl Valuation {
    pub fn exact_int(n: i64) -> Self {
        Valuation::Exact(int(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        match self {
            Valuation::Exact(v) => Some(v),
            _ => None,
        }
    }

    /// Largest value the quantity is certainly at least.
    pub fn lower(&self) -> Option<&Rational> {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// `None` encodes +infinity.
    fn upper(&self) -> Option<&Rational> {
        match self {
            Valuation::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn shift(&self, by: &Rational) -> Self {
        match self {
            Valuation::Exact(v) => Valuation::Exact(v + by),
            Valuation::AtLeast(v) => Valuation::AtLeast(v + by),
            Valuation::Infinity => Valuation::Infinity,
        }
    }

    pub fn add(&self, other: &Valuation) -> Self {
        match (self, other) {
            (Valuation::Infinity, _) | (_, Valuation::Infinity) => Valuation::Infinity,
            (Valuation::Exact(a), Valuation::Exact(b)) => Valuation::Exact(a + b),
            (a, b) => Valuation::AtLeast(a.lower().unwrap() + b.lower().unwrap()),
        }
    }

    /// Minimum of two possibly-bounded values.
    pub fn min(&self, other: &Valuation) -> Self {
        Valuation::min_all([self.clone(), other.clone()])
    }

    /// Minimum over a family: exact when the smallest certified value does not
    /// exceed every lower bound.
    pub fn min_all<I: IntoIterator<Item = Valuation>>(items: I) -> Self {
        let mut exact: Option<Rational> = None;
        let mut bound: Option<Rational> = None;
        for item in items {
            match item {
                Valuation::Exact(v) => {
                    if exact.as_ref().is_none_or(|e| v < *e) {
                        exact = Some(v);
                    }
                }
                Valuation::AtLeast(v) => {
                    if bound.as_ref().is_none_or(|b| v < *b) {
                        bound = Some(v);
                    }
                }
                Valuation::Infinity => {}
            }
        }
        match (exact, bound) {
            (None, None) => Valuation::Infinity,
            (Some(e), None) => Valuation::Exact(e),
            (None, Some(b)) => Valuation::AtLeast(b),
            (Some(e), Some(b)) => {
                if e <= b {
                    Valuation::Exact(e)
                } else {
                    Valuation::AtLeast(b)
                }
            }
        }
    }

    /// `Some(answer)` when `self >= other` is decided by the available digits.
    pub fn ge_certain(&self, other: &Valuation) -> Option<bool> {
        // self >= other certainly when lower(self) >= upper(other).
        let certain_true = match (self.lower(), other.upper()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(l), Some(u)) => l >= u,
        };
        if certain_true {
            return Some(true);
        }
        let certain_false = match (self.upper(), other.lower()) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(u), Some(l)) => u < l,
        };
        if certain_false {
            Some(false)
        } else {
            None
        }
    }

    pub fn gt_certain(&self, other: &Valuation) -> Option<bool> {
        other.ge_certain(self).map(|b| !b).or_else(|| {
            // other < self is certain when upper(other) < lower(self)
            match (other.upper(), self.lower()) {
                (Some(u), Some(l)) if u < l => Some(true),
                (Some(_), None) => Some(true),
                _ => None,
            }
        })
    }

    pub fn eq_certain(&self, other: &Valuation) -> Option<bool> {
        match (self, other) {
            (Valuation::Exact(a), Valuation::Exact(b)) => Some(a == b),
            (Valuation::Infinity, Valuation::Infinity) => Some(true),
            (Valuation::Exact(_), Valuation::Infinity) | (Valuation::Infinity, Valuation::Exact(_)) => {
                Some(false)
            }
            (Valuation::Exact(a), Valuation::AtLeast(b)) | (Valuation::AtLeast(b), Valuation::Exact(a)) => {
                if a < b {
                    Some(false)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Total order on exact values; bounded values compare by their bound and
    /// sort after an equal exact value.
    pub fn sort_key_cmp(&self, other: &Valuation) -> Ordering {
        match (self.lower(), other.lower()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(b).then(self.is_exact().cmp(&other.is_exact()).reverse()),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{}", fmt_rational(v)),
            Valuation::AtLeast(v) => write!(f, ">={}", fmt_rational(v)),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den` as a reduced rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text form `a/b` (or `a` for integers).
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not an integer: {t:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(n)?, d))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// p-adic valuation of a non-zero integer.
pub fn vp_bigint(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn vp_rational(q: &Rational, p: u64) -> Option<i64> {
    if Zero::is_zero(q) {
        return None;
    }
    Some(vp_bigint(q.numer(), p) as i64 - vp_bigint(q.denom(), p) as i64)
}

pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// `v_p(n!)` by Legendre's formula.
pub fn vp_factorial(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_all_prefers_exact_below_bound() {
        let v = Valuation::min_all([Valuation::AtLeast(int(3)), Valuation::Exact(ratio(1, 2))]);
        assert_eq!(v, Valuation::Exact(ratio(1, 2)));
        let v = Valuation::min_all([Valuation::AtLeast(int(1)), Valuation::Exact(int(2))]);
        assert_eq!(v, Valuation::AtLeast(int(1)));
        assert_eq!(Valuation::min_all([]), Valuation::Infinity);
    }

    #[test]
    fn certain_comparisons() {
        let a = Valuation::Exact(int(2));
        let b = Valuation::AtLeast(int(3));
        assert_eq!(b.ge_certain(&a), Some(true));
        assert_eq!(a.ge_certain(&b), Some(false));
        assert_eq!(Valuation::AtLeast(int(1)).ge_certain(&a), None);
        assert_eq!(Valuation::Infinity.ge_certain(&Valuation::Infinity), Some(true));
        assert_eq!(a.eq_certain(&Valuation::Exact(int(2))), Some(true));
        assert_eq!(a.eq_certain(&b), Some(false));
    }

    #[test]
    fn rational_helpers() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(vp_rational(&ratio(49, 3), 7), Some(2));
        assert_eq!(vp_rational(&ratio(1, 7), 7), Some(-1));
        assert_eq!(vp_factorial(49, 7), 8);
        assert_eq!(fmt_rational(&ratio(6, 4)), "3/2");
    }
}

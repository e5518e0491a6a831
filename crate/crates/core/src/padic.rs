//! Fixed-precision arithmetic in the valuation ring of `Q_p` and of a pure
//! ramified extension `Q_p(pi)`, `pi^m = p`.
//!
//! An element is stored as `a_0 + a_1 pi + ... + a_{m-1} pi^{m-1}` with
//! `a_j` an integer modulo `p^{K_j}`, where `K_j = ceil((prec - j) / m)`.
//! That is exactly the information in a residue modulo `pi^prec`, and it keeps
//! multiplication to a handful of `u128` products.
//!
//! Precision is absolute and counted in powers of `pi`. Every operation
//! returns the largest precision that the inputs certify:
//!
//! | op        | result precision                                   |
//! |-----------|----------------------------------------------------|
//! | `a + b`   | `min(prec a, prec b)`                              |
//! | `a * b`   | `min(N, prec a + v(b), prec b + v(a))`             |
//! | `inv`     | `prec a` (units only)                              |
//! | `/ pi^k`  | `prec a - k`                                       |
//! | exp, log  | `prec a`                                           |
//!
//! Values whose digits are the complete value (small non-negative integers
//! built from literals, and sums of those) carry an exactness flag so that an
//! exact zero reports valuation infinity instead of `>= N/m`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use smallvec::{smallvec, SmallVec};

use crate::scalar::{is_prime, parse_rational, vp_factorial, vp_u64, Scalar, Valuation};
use crate::{Error, Rational, Result};

type Coeffs = SmallVec<[u64; 2]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScalarRing {
    p: u64,
    ramification: u32,
    precision: u32,
}

impl ScalarRing {
    pub fn new(p: u64, ramification: u32, precision: u32) -> Result<Self> {
        if p <= 2 || !is_prime(p) {
            return Err(Error::InvalidRing(format!("p = {p} must be an odd prime")));
        }
        if ramification == 0 {
            return Err(Error::InvalidRing("ramification must be >= 1".into()));
        }
        if precision == 0 {
            return Err(Error::InvalidRing("precision must be >= 1".into()));
        }
        let digits = precision.div_ceil(ramification);
        if p.checked_pow(digits).is_none() {
            return Err(Error::InvalidRing(format!(
                "p^{digits} does not fit in 64 bits; lower the precision"
            )));
        }
        Ok(ScalarRing { p, ramification, precision })
    }

    /// `Z_p` at precision `n`.
    pub fn rational(p: u64, precision: u32) -> Result<Self> {
        ScalarRing::new(p, 1, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ramification(&self) -> u32 {
        self.ramification
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        ScalarRing::new(self.p, self.ramification, precision)
    }

    /// Valuation cap `N / m`.
    pub fn cap(&self) -> Rational {
        Rational::new(self.precision.into(), self.ramification.into())
    }

    fn m(&self) -> usize {
        self.ramification as usize
    }

    fn digits(&self, prec: u32, j: usize) -> u32 {
        let (prec, m) = (prec as usize, self.m());
        if prec <= j {
            0
        } else {
            (prec - j).div_ceil(m) as u32
        }
    }

    fn modulus(&self, prec: u32, j: usize) -> u64 {
        self.p.pow(self.digits(prec, j))
    }

    fn raw(&self, prec: u32, exact: bool, coeffs: Coeffs) -> Padic {
        let mut x = Padic { ring: *self, prec, exact, coeffs };
        x.reduce();
        x
    }

    pub fn zero(&self) -> Padic {
        Padic { ring: *self, prec: self.precision, exact: true, coeffs: smallvec![0; self.m()] }
    }

    pub fn one(&self) -> Padic {
        self.from_u64(1)
    }

    pub fn from_u64(&self, n: u64) -> Padic {
        let modulus = self.modulus(self.precision, 0);
        let mut coeffs: Coeffs = smallvec![0; self.m()];
        coeffs[0] = n % modulus;
        Padic { ring: *self, prec: self.precision, exact: n < modulus, coeffs }
    }

    pub fn from_i64(&self, n: i64) -> Padic {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Padic {
        let modulus = BigInt::from(self.modulus(self.precision, 0));
        let r = n.mod_floor(&modulus);
        let exact = n.sign() != Sign::Minus && *n < modulus;
        let mut coeffs: Coeffs = smallvec![0; self.m()];
        coeffs[0] = r.to_u64().expect("residue below a 64-bit modulus");
        Padic { ring: *self, prec: self.precision, exact, coeffs }
    }

    /// Embeds a rational with unit denominator.
    pub fn from_rational(&self, q: &Rational) -> Result<Padic> {
        let num = self.from_bigint(q.numer());
        if q.is_integer() {
            return Ok(num);
        }
        let den = self.from_bigint(q.denom());
        let inv = den.inv().map_err(|_| {
            Error::Domain(format!("{q} has a denominator divisible by p = {}", self.p))
        })?;
        Ok(num * inv)
    }

    /// `pi^k` (with `pi = p` when `m = 1`).
    pub fn pi_pow(&self, k: u32) -> Padic {
        if k >= self.precision {
            let mut z = self.zero();
            z.exact = false;
            return z;
        }
        let m = self.ramification;
        let mut coeffs: Coeffs = smallvec![0; self.m()];
        coeffs[(k % m) as usize] = self.p.pow(k / m);
        Padic { ring: *self, prec: self.precision, exact: true, coeffs }
    }

    pub fn uniformizer(&self) -> Padic {
        self.pi_pow(1)
    }

    /// Uniform sample of the residues modulo `pi^N`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Padic {
        let coeffs = (0..self.m())
            .map(|j| rng.gen_range(0..self.modulus(self.precision, j)))
            .collect();
        Padic { ring: *self, prec: self.precision, exact: false, coeffs }
    }

    /// Parses an integer, a rational `a/b`, or a digit expansion such as
    /// `3 + 5*p^2 + O(p^12)` (`pi` in place of `p` when `m > 1`).
    pub fn parse(&self, s: &str) -> Result<Padic> {
        let s = s.trim();
        if !s.contains('p') {
            return self.from_rational(&parse_rational(s)?);
        }
        let mut acc = self.zero();
        let mut prec = self.precision;
        let mut bounded = false;
        for term in s.split('+') {
            let term = term.trim().replace(' ', "");
            if let Some(inner) = term.strip_prefix("O(").and_then(|t| t.strip_suffix(')')) {
                prec = parse_power(inner)?.min(self.precision);
                bounded = true;
                continue;
            }
            let (digit, power) = match term.split_once('*') {
                Some((d, pw)) => (
                    d.parse::<u64>().map_err(|_| Error::Parse(format!("bad digit in {term:?}")))?,
                    parse_power(pw)?,
                ),
                None if term.starts_with('p') => (1, parse_power(&term)?),
                None => (term.parse::<u64>().map_err(|_| Error::Parse(format!("bad term {term:?}")))?, 0),
            };
            acc = acc + self.from_u64(digit) * self.pi_pow(power);
        }
        if bounded {
            acc.exact = false;
            acc = acc.with_prec(prec);
        }
        Ok(acc)
    }
}

fn parse_power(s: &str) -> Result<u32> {
    let rest = s
        .strip_prefix("pi")
        .or_else(|| s.strip_prefix('p'))
        .ok_or_else(|| Error::Parse(format!("expected a power of p in {s:?}")))?;
    if rest.is_empty() {
        return Ok(1);
    }
    rest.strip_prefix('^')
        .and_then(|e| e.parse::<u32>().ok())
        .ok_or_else(|| Error::Parse(format!("bad exponent in {s:?}")))
}

/// Element of the valuation ring at a tracked absolute precision.
#[derive(Clone, Debug)]
pub struct Padic {
    ring: ScalarRing,
    prec: u32,
    exact: bool,
    coeffs: Coeffs,
}

/// Result of inverting a non-unit: `x^{-1} = pi^shift * unit`, with `lost`
/// digits of absolute precision given up by the division.
#[derive(Clone, Debug)]
pub struct FieldInverse {
    pub shift: i64,
    pub unit: Padic,
    pub lost: u32,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

impl Padic {
    pub fn ring(&self) -> ScalarRing {
        self.ring
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    fn reduce(&mut self) {
        for j in 0..self.coeffs.len() {
            let m = self.ring.modulus(self.prec, j);
            self.coeffs[j] %= m;
        }
    }

    /// Precision used when this value multiplies something: exact values are
    /// known to every digit.
    fn effective_prec(&self) -> u64 {
        if self.exact {
            u64::MAX / 4
        } else {
            self.prec as u64
        }
    }

    /// Drops digits at and beyond `pi^prec`.
    pub fn with_prec(&self, prec: u32) -> Padic {
        if prec >= self.prec {
            return self.clone();
        }
        let mut x = self.clone();
        x.prec = prec;
        x.reduce();
        x.exact = self.exact && x.coeffs == self.coeffs;
        if x.exact {
            x.prec = self.prec;
        }
        x
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.prec > 0 && !self.coeffs[0].is_multiple_of(self.ring.p)
    }

    /// Valuation in powers of `pi`; `None` when zero at the working precision.
    pub fn vpi(&self) -> Option<u32> {
        let m = self.ring.ramification;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| m * vp_u64(c, self.ring.p) + j as u32)
            .min()
    }

    /// Valuation normalised by `v(p) = 1`.
    pub fn val(&self) -> Valuation {
        let m = self.ring.ramification;
        match self.vpi() {
            Some(k) => Valuation::Exact(Rational::new(k.into(), m.into())),
            None if self.exact => Valuation::Infinity,
            None => Valuation::AtLeast(Rational::new(self.prec.into(), m.into())),
        }
    }

    /// Residue of the `pi^0` coefficient as an integer in `[0, p^K_0)`.
    pub fn residue(&self) -> u64 {
        self.coeffs[0]
    }

    /// Representative integer (only meaningful for `m = 1`).
    pub fn lift(&self) -> BigInt {
        debug_assert_eq!(self.ring.ramification, 1);
        BigInt::from(self.coeffs[0])
    }

    /// Digits `d_0, ..., d_{prec-1}` in `[0, p)` with `x = sum d_i pi^i`.
    pub fn digits(&self) -> Vec<u64> {
        let p = self.ring.p;
        let mut c: Vec<u64> = self.coeffs.to_vec();
        let mut out = Vec::with_capacity(self.prec as usize);
        for _ in 0..self.prec {
            let d = c[0] % p;
            out.push(d);
            let head = (c[0] - d) / p;
            c.rotate_left(1);
            let last = c.len() - 1;
            c[last] = head;
        }
        out
    }

    fn zip_with(&self, other: &Padic, f: impl Fn(u64, u64, u64) -> u64) -> Padic {
        assert_same_field(self, other);
        let ring = self.ring;
        let prec = min_prec(self, other);
        let coeffs = (0..ring.m())
            .map(|j| {
                let m = ring.modulus(prec, j);
                f(self.coeffs[j] % m, other.coeffs[j] % m, m)
            })
            .collect();
        Padic { ring, prec, exact: false, coeffs }
    }

    fn add_ref(&self, other: &Padic) -> Padic {
        let mut r = self.zip_with(other, add_mod);
        if self.exact && other.exact {
            r.exact = (0..ring_m(self)).all(|j| {
                let m = self.ring.modulus(r.prec, j) as u128;
                (self.coeffs[j] as u128 + other.coeffs[j] as u128) < m
            });
        }
        r
    }

    fn sub_ref(&self, other: &Padic) -> Padic {
        let mut r = self.zip_with(other, |a, b, m| if a >= b { a - b } else { m - (b - a) });
        if self.exact && other.exact {
            r.exact = (0..ring_m(self)).all(|j| self.coeffs[j] >= other.coeffs[j]);
        }
        r
    }

    fn neg_ref(&self) -> Padic {
        let ring = self.ring;
        let coeffs = (0..ring.m())
            .map(|j| {
                let m = ring.modulus(self.prec, j);
                let c = self.coeffs[j] % m;
                if c == 0 {
                    0
                } else {
                    m - c
                }
            })
            .collect();
        Padic { ring, prec: self.prec, exact: self.exact && self.is_zero(), coeffs }
    }

    fn is_exact_one(&self) -> bool {
        self.exact && self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn mul_ref(&self, other: &Padic) -> Padic {
        assert_same_field(self, other);
        let ring = self.ring;
        if self.is_exact_zero() || other.is_exact_zero() {
            return ring.zero();
        }
        if self.is_exact_one() {
            return other.clone();
        }
        if other.is_exact_one() {
            return self.clone();
        }
        let va = self.vpi().map_or(self.prec as u64, u64::from);
        let vb = other.vpi().map_or(other.prec as u64, u64::from);
        let prec = (ring.precision as u64)
            .min(self.effective_prec().saturating_add(vb))
            .min(other.effective_prec().saturating_add(va)) as u32;
        let m = ring.m();
        let mut coeffs: Coeffs = smallvec![0; m];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            let modulus = ring.modulus(prec, k);
            if modulus == 1 {
                continue;
            }
            let mut low = 0u64;
            let mut wrap = 0u64;
            for i in 0..m {
                let a = self.coeffs[i];
                if a == 0 {
                    continue;
                }
                if i <= k {
                    low = add_mod(low, mul_mod(a, other.coeffs[k - i], modulus), modulus);
                }
                let j = k + m - i;
                if j < m {
                    wrap = add_mod(wrap, mul_mod(a, other.coeffs[j], modulus), modulus);
                }
            }
            *slot = add_mod(low, mul_mod(wrap, ring.p, modulus), modulus);
        }
        Padic { ring, prec, exact: false, coeffs }
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self) -> Result<Padic> {
        if !self.is_unit() {
            return Err(Error::NotUnit(self.to_string()));
        }
        if self.is_exact_one() {
            return Ok(self.clone());
        }
        let ring = self.ring;
        let p = ring.p;
        let prec = if self.exact { ring.precision } else { self.prec };
        let a = self.with_prec(prec);
        let mut x = ring.from_u64(pow_mod(self.coeffs[0] % p, p - 2, p)).with_prec(prec);
        x.exact = false;
        let two = ring.from_u64(2);
        let mut good = 1u32;
        while good < prec {
            x = &x * &(&two - &(&a * &x));
            good *= 2;
        }
        let mut x = x.with_prec(prec);
        x.exact = false;
        Ok(x)
    }

    /// Field-mode inverse `x^{-1} = pi^{-k} u^{-1}` for `x = pi^k u`.
    pub fn inv_field(&self) -> Result<FieldInverse> {
        let k = self
            .vpi()
            .ok_or_else(|| Error::Precision(format!("{self} is zero at precision")))?;
        let unit = self.div_pi_pow(k)?.inv()?;
        Ok(FieldInverse { shift: -(k as i64), unit, lost: k })
    }

    pub fn mul_pi_pow(&self, k: u32) -> Padic {
        self * &self.ring.pi_pow(k)
    }

    /// Exact division by `pi^k`; loses `k` digits of absolute precision.
    pub fn div_pi_pow(&self, k: u32) -> Result<Padic> {
        if let Some(v) = self.vpi() {
            if v < k {
                return Err(Error::Domain(format!("{self} is not divisible by pi^{k}")));
            }
        }
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        if k > self.prec {
            return Err(Error::Precision(format!("dividing {self} by pi^{k} leaves no digits")));
        }
        let p = self.ring.p;
        let mut c = self.coeffs.clone();
        for _ in 0..k {
            let head = c[0] / p;
            debug_assert_eq!(c[0] % p, 0);
            c.rotate_left(1);
            let last = c.len() - 1;
            c[last] = head;
        }
        Ok(self.ring.raw(self.prec - k, self.exact, c))
    }

    pub fn pow(&self, mut e: u64) -> Padic {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_convergence(&self, what: &str) -> Result<Option<u32>> {
        let ring = self.ring;
        match self.vpi() {
            None => Ok(None),
            Some(k) => {
                if (k as u64) * (ring.p - 1) > ring.ramification as u64 {
                    Ok(Some(k))
                } else {
                    Err(Error::Domain(format!(
                        "{what}: valuation {}/{} <= 1/(p-1)",
                        k, ring.ramification
                    )))
                }
            }
        }
    }

    /// `exp(x) = sum x^n / n!` for `v(x) > 1/(p-1)`.
    ///
    /// Each term is formed as `pi^(kn - m v_p(n!)) * y^n / (unit part of n!)`
    /// with `x = pi^k y`, so no guard digits are needed.
    pub fn exp(&self) -> Result<Padic> {
        let ring = self.ring;
        let k = match self.check_convergence("exp")? {
            None => {
                let mut one = ring.one().with_prec(self.prec);
                one.exact = self.exact;
                return Ok(one);
            }
            Some(k) => k as u64,
        };
        let (p, m, n_cap) = (ring.p, ring.ramification as u64, ring.precision as u64);
        let y = self.div_pi_pow(k as u32)?;
        let mut sum = ring.one();
        let mut y_pow = ring.one();
        let mut n = 1u64;
        // Terms vanish mod pi^N once kn - m(n-1)/(p-1) >= N.
        while k * n * (p - 1) < n_cap * (p - 1) + m * (n - 1) {
            y_pow = &y_pow * &y;
            let shift = k * n - m * vp_factorial(n, p);
            if shift < n_cap {
                let unit = factorial_unit_part(n, p, ring.modulus(ring.precision, 0));
                let term = (&y_pow * &ring.from_u64(unit).inv()?).mul_pi_pow(shift as u32);
                sum = &sum + &term;
            }
            n += 1;
        }
        Ok(sum.with_prec(self.prec))
    }

    /// `log(u) = sum (-1)^(n+1) (u-1)^n / n` for `v(u - 1) > 1/(p-1)`.
    pub fn log(&self) -> Result<Padic> {
        let ring = self.ring;
        let x = self - &ring.one();
        let k = match x.check_convergence("log")? {
            None => {
                let mut zero = ring.zero().with_prec(x.prec);
                zero.exact = x.exact;
                return Ok(zero);
            }
            Some(k) => k as u64,
        };
        let (p, m, n_cap) = (ring.p, ring.ramification as u64, ring.precision as u64);
        let y = x.div_pi_pow(k as u32)?;
        let mut sum = ring.zero();
        let mut y_pow = ring.one();
        let mut n = 1u64;
        loop {
            // For n >= m the bound kn - m log_p(n) is increasing.
            if n >= m && k * n >= n_cap + m * ilog(n, p) {
                break;
            }
            y_pow = &y_pow * &y;
            let v = vp_u64(n, p) as u64;
            let shift = k * n - m * v;
            if shift < n_cap {
                let unit = n / p.pow(v as u32);
                let term = (&y_pow * &ring.from_u64(unit).inv()?).mul_pi_pow(shift as u32);
                sum = if n % 2 == 1 { &sum + &term } else { &sum - &term };
            }
            n += 1;
        }
        let mut out = sum.with_prec(x.prec);
        out.exact = false;
        Ok(out)
    }

    /// Re-reads an element of `Z_p` inside a ramified extension with the
    /// same prime; absolute precision is preserved.
    pub fn embed(&self, target: ScalarRing) -> Result<Padic> {
        if self.ring.ramification != 1 || self.ring.p != target.p {
            return Err(Error::Invalid("embedding is defined from Z_p only".into()));
        }
        let prec = (self.prec * target.ramification).min(target.precision);
        let mut coeffs: Coeffs = smallvec![0; target.m()];
        coeffs[0] = self.coeffs[0];
        let exact = self.exact && prec == target.precision;
        let mut x = target.raw(prec, exact, coeffs);
        if self.exact {
            x.exact = x.coeffs[0] == self.coeffs[0];
            if x.exact {
                x.prec = target.precision;
            }
        }
        Ok(x)
    }

    /// Rational value of the stored digits when the element is exact.
    pub fn to_rational_exact(&self) -> Option<Rational> {
        if self.exact && self.ring.ramification == 1 {
            Some(Rational::from_integer(BigInt::from(self.coeffs[0])))
        } else {
            None
        }
    }
}

fn ring_m(x: &Padic) -> usize {
    x.ring.m()
}

fn ilog(n: u64, p: u64) -> u64 {
    let mut k = 0;
    let mut q = n;
    while q >= p {
        q /= p;
        k += 1;
    }
    k
}

/// `n! / p^{v_p(n!)}` modulo `modulus`.
fn factorial_unit_part(n: u64, p: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    for i in 1..=n {
        let mut j = i;
        while j % p == 0 {
            j /= p;
        }
        acc = mul_mod(acc, j % modulus, modulus);
    }
    acc
}

fn assert_same_field(a: &Padic, b: &Padic) {
    assert!(
        a.ring.p == b.ring.p && a.ring.ramification == b.ring.ramification,
        "mixed scalar rings: {:?} vs {:?}",
        a.ring,
        b.ring
    );
}

fn min_prec(a: &Padic, b: &Padic) -> u32 {
    match (a.exact, b.exact) {
        (true, true) => a.ring.precision.min(b.ring.precision),
        (true, false) => b.prec,
        (false, true) => a.prec,
        (false, false) => a.prec.min(b.prec),
    }
}

impl PartialEq for Padic {
    /// Equality of residues at the smaller of the two precisions.
    fn eq(&self, other: &Padic) -> bool {
        if self.ring.p != other.ring.p || self.ring.ramification != other.ring.ramification {
            return false;
        }
        let prec = min_prec(self, other);
        self.with_prec(prec).coeffs == other.with_prec(prec).coeffs
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.ring.ramification == 1 { "p" } else { "pi" };
        let mut terms = Vec::new();
        for (i, d) in self.digits().into_iter().enumerate() {
            if d == 0 {
                continue;
            }
            terms.push(match i {
                0 => d.to_string(),
                1 => format!("{d}*{var}"),
                _ => format!("{d}*{var}^{i}"),
            });
        }
        if !self.exact {
            terms.push(format!("O({var}^{})", self.prec));
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(f, "{}", terms.join(" + "))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr for Padic {
            type Output = Padic;
            fn $method(self, rhs: Padic) -> Padic {
                self.$inner(&rhs)
            }
        }
        impl<'a> $tr<&'a Padic> for &'a Padic {
            type Output = Padic;
            fn $method(self, rhs: &'a Padic) -> Padic {
                self.$inner(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

impl Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

impl Scalar for Padic {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }

    fn one_like(&self) -> Self {
        self.ring.one()
    }

    fn from_i64_like(&self, n: i64) -> Self {
        self.ring.from_i64(n)
    }

    fn vanishes(&self) -> bool {
        Padic::is_zero(self)
    }

    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

/// Rational lift of a `Z_p` residue in the symmetric range; used when
/// p-adic data must be handed to exact-rational code.
pub fn symmetric_lift(x: &Padic) -> BigInt {
    let m = BigInt::from(x.ring.modulus(x.prec, 0));
    let r = BigInt::from(x.coeffs[0]);
    if &r * 2 > m {
        r - m
    } else {
        r
    }
}

/// `v_p` of a non-zero rational as a Padic-style valuation.
pub fn rational_val(q: &Rational, p: u64) -> Valuation {
    if q.is_zero() {
        Valuation::Infinity
    } else {
        Valuation::exact_int(crate::scalar::vp_rational(q, p).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zp(n: u32) -> ScalarRing {
        ScalarRing::rational(7, n).unwrap()
    }

    #[test]
    fn valuation_normalisation() {
        let r = zp(12);
        assert_eq!(r.from_u64(7).val(), Valuation::exact_int(1));
        let e = ScalarRing::new(7, 4, 48).unwrap();
        assert_eq!(e.uniformizer().val(), Valuation::Exact(ratio(1, 4)));
        assert_eq!(e.uniformizer().pow(4), e.from_u64(7));
        assert_eq!(r.from_u64(49 + 343).val(), Valuation::exact_int(2));
        assert_eq!(r.zero().val(), Valuation::Infinity);
        let lost = r.from_u64(7).pow(12);
        assert_eq!(lost.val(), Valuation::AtLeast(int(12)));
    }

    #[test]
    fn val_matches_digit_inspection() {
        let r = zp(12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = r.random(&mut rng);
            let first = x.digits().iter().position(|&d| d != 0);
            match first {
                Some(i) => assert_eq!(x.val(), Valuation::exact_int(i as i64)),
                None => assert_eq!(x.val(), Valuation::AtLeast(int(12))),
            }
        }
    }

    #[test]
    fn exp_log_examples() {
        let r = zp(12);
        let p = r.from_u64(7);
        assert_eq!(r.zero().exp().unwrap(), r.one());
        let e = p.exp().unwrap();
        assert_eq!((&e - &r.one()).val(), Valuation::exact_int(1));
        assert_eq!(&e * &e, r.from_u64(14).exp().unwrap());
        assert!(r.one().log().unwrap().is_zero());
        let u = r.from_u64(8);
        assert_eq!((&u * &u).log().unwrap(), &r.from_u64(2) * &u.log().unwrap());
        assert_eq!(u.log().unwrap().exp().unwrap(), u);
        assert!(r.one().exp().is_err());
        assert!(r.from_u64(2).log().is_err());
    }

    #[test]
    fn exp_against_naive_series_over_rationals() {
        // Independent route: sum x^n/n! over Q, then reduce.
        let r = zp(10);
        for x in [7i64, 14, -21, 49 * 3] {
            let mut sum = Rational::zero();
            let mut term = int(1);
            for n in 0..60 {
                if n > 0 {
                    term = term * int(x) / int(n);
                }
                sum += term.clone();
            }
            let expected = r.from_rational(&sum).unwrap();
            assert_eq!(r.from_i64(x).exp().unwrap(), expected, "x = {x}");
        }
    }

    #[test]
    fn ramified_exp_log_round_trip() {
        let e = ScalarRing::new(7, 4, 40).unwrap();
        let x = e.pi_pow(1) * e.from_u64(3);
        let y = x.exp().unwrap();
        assert_eq!((&y - &e.one()).val(), Valuation::Exact(ratio(1, 4)));
        assert_eq!(y.log().unwrap(), x);
        // pi has valuation 1/4 > 1/6, pi^0 does not.
        assert!(e.from_u64(3).exp().is_err());
    }

    #[test]
    fn inverse_and_field_mode() {
        let r = zp(12);
        let u = r.from_u64(8);
        assert_eq!(&u.inv().unwrap() * &u, r.one());
        assert!(r.from_u64(7).inv().is_err());
        let x = r.parse("3*p^2 + O(p^12)").unwrap();
        let fi = x.inv_field().unwrap();
        assert_eq!(fi.shift, -2);
        assert_eq!(fi.lost, 2);
        assert_eq!(fi.unit.precision(), 10);
        assert_eq!(&fi.unit * &r.from_u64(3), r.one().with_prec(10));
        let q = r.from_rational(&ratio(2, 3)).unwrap();
        assert_eq!(&q * &r.from_u64(3), r.from_u64(2));
        assert!(r.from_rational(&ratio(1, 7)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let r = zp(5);
        let x = r.from_u64(3 + 5 * 49);
        assert_eq!(x.to_string(), "3 + 5*p^2");
        let y = r.random(&mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(r.parse(&y.to_string()).unwrap(), y);
        assert_eq!(r.parse("-1").unwrap().to_string(), "6 + 6*p + 6*p^2 + 6*p^3 + 6*p^4 + O(p^5)");
        let e = ScalarRing::new(7, 2, 6).unwrap();
        let z = e.random(&mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(e.parse(&z.to_string()).unwrap(), z);
        assert_eq!(e.uniformizer().to_string(), "1*pi");
    }

    #[test]
    fn ramified_multiplication_matches_integer_model() {
        // In Q_p(pi) with pi^2 = p, (a + b pi)(c + d pi) = (ac + p bd) + (ad + bc) pi.
        let e = ScalarRing::new(7, 2, 8).unwrap();
        let pi = e.uniformizer();
        let mk = |a: u64, b: u64| &e.from_u64(a) + &(&e.from_u64(b) * &pi);
        let (a, b, c, d) = (5u64, 11, 23, 40);
        let lhs = &mk(a, b) * &mk(c, d);
        assert_eq!(lhs, mk(a * c + 7 * b * d, a * d + b * c));
    }

    #[test]
    fn exactness_flags() {
        let r = zp(6);
        assert!(r.zero().is_exact_zero());
        assert!((r.one() - r.one()).is_exact_zero());
        assert!(!(r.from_i64(-1) + r.one()).is_exact());
        assert_eq!((r.from_i64(-1) + r.one()).val(), Valuation::AtLeast(int(6)));
        assert!(r.ring_sanity());
    }

    impl ScalarRing {
        fn ring_sanity(&self) -> bool {
            ScalarRing::new(7, 1, 23).is_err() && ScalarRing::new(3, 1, 40).is_ok()
        }
    }
}

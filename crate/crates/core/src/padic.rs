//! Elements of Q_p at finite absolute precision.
//!
//! A nonzero [`PadicNumber`] stores `p^v * u + O(p^m)` where `u` is a unit
//! reduced modulo `p^(m - v)`. The quantity `m - v` is the relative
//! precision (number of known unit digits). A value whose residue vanishes
//! at its precision is the distinguished zero: its valuation is reported as
//! `None` (+infinity) and its norm as 0, while the precision it was computed
//! at is still carried along so that later products and quotients account
//! for it.
//!
//! Precision propagates with the usual `O(.)` rules:
//!
//! ```text
//! (p^e a + O(p^i)) + (p^f b + O(p^j)) = ...              + O(p^min(i, j))
//! (p^e a + O(p^i)) * (p^f b + O(p^j)) = p^(e+f) a b      + O(p^min(e + j, f + i))
//! (p^e a + O(p^i)) / (p^f b + O(p^j)) = p^(e-f) a / b    + O(p^(e - f + min(i - e, j - f)))
//! ```
//!
//! so precision never increases silently.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{PadicError, Result};

thread_local! {
    static POWERS: RefCell<HashMap<u64, Vec<BigUint>>> = RefCell::new(HashMap::new());
}

/// `p^e` for `e >= 0`, memoized per thread.
pub(crate) fn pow_p(p: u64, e: i64) -> BigUint {
    assert!(e >= 0, "negative exponent {e} for p^e");
    POWERS.with(|cache| {
        let mut cache = cache.borrow_mut();
        let table = cache.entry(p).or_insert_with(|| vec![BigUint::one()]);
        while table.len() <= e as usize {
            let next = table.last().unwrap() * p;
            table.push(next);
        }
        table[e as usize].clone()
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Rejects anything that is not an odd prime.
pub fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if p == 2 {
        return Err(PadicError::UnsupportedPrime(p));
    }
    Ok(())
}

/// `v_p(n)` for a nonzero machine integer.
pub fn valuation_of_u128(mut n: u128, p: u64) -> u32 {
    assert!(n != 0);
    let p = p as u128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// A p-adic absolute value `p^(-v)`, or zero.
///
/// Every norm this crate produces (absolute values, Cauchy rates, fitted
/// constants, Lipschitz estimates) is a power of `p`, so the exponent is all
/// that needs storing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Norm {
    prime: u64,
    valuation: Option<i64>,
}

impl Norm {
    pub fn zero(prime: u64) -> Self {
        Norm { prime, valuation: None }
    }

    pub fn one(prime: u64) -> Self {
        Norm { prime, valuation: Some(0) }
    }

    /// The norm `p^(-valuation)`.
    pub fn from_valuation(prime: u64, valuation: i64) -> Self {
        Norm { prime, valuation: Some(valuation) }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_none()
    }

    /// Multiplies the norm by `p^k`.
    pub fn scale(self, k: i64) -> Self {
        Norm {
            prime: self.prime,
            valuation: self.valuation.map(|v| v - k),
        }
    }

    /// `self / other`, undefined when `other` is zero.
    pub fn ratio(self, other: Norm) -> Option<Norm> {
        let d = other.valuation?;
        Some(Norm {
            prime: self.prime,
            valuation: self.valuation.map(|v| v - d),
        })
    }

    pub fn to_f64(&self) -> f64 {
        match self.valuation {
            None => 0.0,
            Some(v) => (self.prime as f64).powi(-(v as i32)),
        }
    }

    pub fn parse(s: &str, prime: u64) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Norm::zero(prime));
        }
        let (base, exp) = s
            .split_once('^')
            .ok_or_else(|| PadicError::Parse(format!("norm `{s}`")))?;
        let base: u64 = base
            .parse()
            .map_err(|_| PadicError::Parse(format!("norm base `{base}`")))?;
        if base != prime {
            return Err(PadicError::PrimeMismatch(base, prime));
        }
        let exp: i64 = exp
            .parse()
            .map_err(|_| PadicError::Parse(format!("norm exponent `{exp}`")))?;
        Ok(Norm::from_valuation(prime, -exp))
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Norm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.valuation, other.valuation) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.valuation {
            None => write!(f, "0"),
            Some(v) => write!(f, "{}^{}", self.prime, -v),
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    prime: u64,
    /// `None` marks the distinguished zero.
    valuation: Option<i64>,
    unit: BigUint,
    /// Absolute precision: the value is known modulo `p^precision`.
    precision: i64,
}

impl PadicNumber {
    /// Reduces an integer into canonical form modulo `p^m`.
    pub fn from_integer(n: i64, prime: u64, m: i64) -> Result<Self> {
        Self::from_bigint(&BigInt::from(n), prime, m)
    }

    pub fn from_bigint(n: &BigInt, prime: u64, m: i64) -> Result<Self> {
        check_prime(prime)?;
        if m < 1 {
            return Err(PadicError::InvalidPrecision(m));
        }
        Ok(Self::from_bigint_unchecked(n, prime, m))
    }

    pub(crate) fn from_bigint_unchecked(n: &BigInt, prime: u64, m: i64) -> Self {
        let modulus = BigInt::from(pow_p(prime, m.max(0)));
        let r = n.mod_floor(&modulus);
        let r = r.to_biguint().expect("mod_floor is nonnegative");
        Self::from_scaled(prime, 0, r, m)
    }

    pub(crate) fn from_u128(n: u128, prime: u64, m: i64) -> Self {
        Self::from_bigint_unchecked(&BigInt::from(n), prime, m)
    }

    pub(crate) fn from_u64(n: u64, prime: u64, m: i64) -> Self {
        Self::from_u128(n as u128, prime, m)
    }

    /// `num / den` as a p-adic number known modulo `p^m`.
    pub fn from_rational(num: i64, den: i64, prime: u64, m: i64) -> Result<Self> {
        if den == 0 {
            return Err(PadicError::DivisionByZero);
        }
        let extra = valuation_of_u128(den.unsigned_abs() as u128, prime) as i64;
        let n = Self::from_integer(num, prime, m + extra)?;
        let d = Self::from_integer(den, prime, m + 2 * extra)?;
        Ok(n.div(&d)?.truncate(m))
    }

    /// The value `p^valuation * unit` known to absolute precision.
    pub fn from_parts(prime: u64, valuation: i64, unit: BigUint, precision: i64) -> Result<Self> {
        check_prime(prime)?;
        if precision <= valuation {
            return Err(PadicError::InvalidPrecision(precision - valuation));
        }
        Ok(Self::from_scaled(prime, valuation, unit, precision))
    }

    /// Normalizes `p^e * n` (n arbitrary nonnegative) at absolute precision `precision`.
    pub(crate) fn from_scaled(prime: u64, mut e: i64, n: BigUint, precision: i64) -> Self {
        if e >= precision || n.is_zero() {
            return Self::zero(prime, precision);
        }
        let mut n = n % pow_p(prime, precision - e);
        if n.is_zero() {
            return Self::zero(prime, precision);
        }
        let p = BigUint::from(prime);
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        PadicNumber {
            prime,
            valuation: Some(e),
            unit: n,
            precision,
        }
    }

    pub fn zero(prime: u64, precision: i64) -> Self {
        PadicNumber {
            prime,
            valuation: None,
            unit: BigUint::zero(),
            precision,
        }
    }

    pub fn one(prime: u64, precision: i64) -> Self {
        Self::from_scaled(prime, 0, BigUint::one(), precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// `None` stands for +infinity (the zero value).
    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }

    /// The valuation, or for zero the precision it is known to (a lower bound).
    pub fn valuation_bound(&self) -> i64 {
        self.valuation.unwrap_or(self.precision)
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn relative_precision(&self) -> Option<i64> {
        self.valuation.map(|v| self.precision - v)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_none()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation_bound() >= 0
    }

    pub fn norm(&self) -> Norm {
        match self.valuation {
            None => Norm::zero(self.prime),
            Some(v) => Norm::from_valuation(self.prime, v),
        }
    }

    /// Drops digits beyond absolute precision `cap`.
    pub fn truncate(&self, cap: i64) -> Self {
        if cap >= self.precision {
            return self.clone();
        }
        match self.valuation {
            None => Self::zero(self.prime, cap),
            Some(v) => Self::from_scaled(self.prime, v, self.unit.clone(), cap),
        }
    }

    /// Re-normalizes the stored representation; returns an identical value.
    pub fn normalize(&self) -> Self {
        match self.valuation {
            None => Self::zero(self.prime, self.precision),
            Some(v) => Self::from_scaled(self.prime, v, self.unit.clone(), self.precision),
        }
    }

    /// The integer representative in `[0, p^precision)` of an integral value.
    pub fn residue(&self) -> Result<BigUint> {
        if !self.is_integral() {
            return Err(PadicError::NotIntegral(self.to_string()));
        }
        match self.valuation {
            None => Ok(BigUint::zero()),
            Some(v) => Ok(&self.unit * pow_p(self.prime, v)),
        }
    }

    /// Symmetric lift to a signed integer: the representative closest to 0.
    pub fn signed_residue(&self) -> Result<BigInt> {
        let r = BigInt::from(self.residue()?);
        if self.precision <= 0 {
            return Ok(r);
        }
        let modulus = BigInt::from(pow_p(self.prime, self.precision));
        if &r * 2 > modulus {
            Ok(r - modulus)
        } else {
            Ok(r)
        }
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(PadicError::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.add_impl(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.add_impl(&other.neg_impl()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(self.mul_impl(other))
    }

    /// Field division. Fails on a zero divisor, and on a zero dividend whose
    /// quotient would carry no information at all (precision <= 0).
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let Some(f) = other.valuation else {
            return Err(PadicError::DivisionByZero);
        };
        match self.valuation {
            None => {
                let precision = self.precision - f;
                if precision <= 0 {
                    return Err(PadicError::PrecisionExhausted {
                        operation: "div".into(),
                        remaining: precision,
                    });
                }
                Ok(Self::zero(self.prime, precision))
            }
            Some(e) => {
                let rel = (self.precision - e).min(other.precision - f);
                let modulus = pow_p(self.prime, rel);
                let inv = (&other.unit % &modulus)
                    .modinv(&modulus)
                    .expect("unit is invertible");
                let unit = (&self.unit * inv) % &modulus;
                Ok(Self::from_scaled(self.prime, e - f, unit, e - f + rel))
            }
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let Some(f) = self.valuation else {
            return Err(PadicError::DivisionByZero);
        };
        let one = Self::one(self.prime, self.precision - 2 * f);
        let one = if one.precision < self.precision {
            Self::one(self.prime, self.precision)
        } else {
            one
        };
        one.div(self)
    }

    fn add_impl(&self, other: &Self) -> Self {
        let p = self.prime;
        let precision = self.precision.min(other.precision);
        let (ex, ey) = (self.valuation_bound(), other.valuation_bound());
        let e = ex.min(ey);
        if e >= precision {
            return Self::zero(p, precision);
        }
        let mut total = BigUint::zero();
        if self.valuation.is_some() {
            total += &self.unit * pow_p(p, ex - e);
        }
        if other.valuation.is_some() {
            total += &other.unit * pow_p(p, ey - e);
        }
        Self::from_scaled(p, e, total, precision)
    }

    fn neg_impl(&self) -> Self {
        match self.valuation {
            None => self.clone(),
            Some(v) => {
                let modulus = pow_p(self.prime, self.precision - v);
                Self::from_scaled(self.prime, v, modulus - &self.unit, self.precision)
            }
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let p = self.prime;
        let (ex, ey) = (self.valuation_bound(), other.valuation_bound());
        match (self.valuation, other.valuation) {
            (Some(_), Some(_)) => {
                let rel = (self.precision - ex).min(other.precision - ey);
                let unit = (&self.unit * &other.unit) % pow_p(p, rel);
                Self::from_scaled(p, ex + ey, unit, ex + ey + rel)
            }
            _ => Self::zero(p, (ex + other.precision).min(ey + self.precision)),
        }
    }

    pub fn pow(&self, n: u64) -> Self {
        self.pow_big(&BigUint::from(n))
    }

    pub fn pow_big(&self, n: &BigUint) -> Self {
        let mut result = Self::one(self.prime, self.precision.max(1));
        if n.is_zero() {
            return result;
        }
        let bits = n.bits();
        for i in (0..bits).rev() {
            result = &result * &result;
            if n.bit(i) {
                result = &result * self;
            }
        }
        result
    }

    /// Integer power with a possibly negative exponent.
    pub fn pow_signed(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            Ok(self.inverse()?.pow(n.unsigned_abs()))
        }
    }

    /// `x^(p^k)` by `k` successive p-th powers.
    pub fn pow_p_power(&self, k: u32) -> Self {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.pow(self.prime);
        }
        x
    }

    /// Agreement modulo `p^t`: true only when the difference is known to
    /// vanish at that precision.
    pub fn congruent(&self, other: &Self, t: i64) -> bool {
        let d = self - other;
        d.valuation_bound() >= t
    }

    /// Base-p digits of the unit, least significant first (`relative_precision` of them).
    pub fn unit_digits(&self) -> Vec<u64> {
        let Some(r) = self.relative_precision() else {
            return Vec::new();
        };
        let mut digits = Vec::with_capacity(r as usize);
        let p = BigUint::from(self.prime);
        let mut u = self.unit.clone();
        for _ in 0..r {
            let (q, d) = u.div_rem(&p);
            digits.push(d.to_u64().unwrap());
            u = q;
        }
        digits
    }

    /// Parses the canonical rendering produced by `Display`.
    pub fn parse(s: &str) -> Result<Self> {
        let err = || PadicError::Parse(format!("p-adic number `{s}`"));
        let s = s.trim();
        let (prefix, body) = match s.find(" * O(") {
            Some(i) => (Some(&s[..i]), &s[i + 3..]),
            None => (None, s),
        };
        let body = body.strip_prefix("O(").ok_or_else(err)?;
        let (prec_part, digits_part) = body.split_once("): ").ok_or_else(err)?;
        let (prime, precision) = parse_power(prec_part).ok_or_else(err)?;
        check_prime(prime)?;
        let valuation = match prefix {
            Some(pre) => {
                let (pp, v) = parse_power(pre).ok_or_else(err)?;
                if pp != prime {
                    return Err(PadicError::PrimeMismatch(pp, prime));
                }
                v
            }
            None => 0,
        };
        if digits_part.trim() == "0" {
            if prefix.is_some() {
                return Err(err());
            }
            return Ok(Self::zero(prime, precision));
        }
        let mut unit = BigUint::zero();
        for (i, term) in digits_part.split(" + ").enumerate() {
            let (digit, power) = match term.split_once('*') {
                Some((d, pw)) => (d, Some(pw)),
                None => (term, None),
            };
            let expected_power = match i {
                0 => None,
                1 => Some(prime.to_string()),
                _ => Some(format!("{prime}^{i}")),
            };
            if power.map(str::to_string) != expected_power {
                return Err(err());
            }
            let digit: u64 = digit.parse().map_err(|_| err())?;
            if digit >= prime {
                return Err(err());
            }
            unit += pow_p(prime, i as i64) * digit;
        }
        let count = digits_part.split(" + ").count() as i64;
        if count != precision {
            return Err(err());
        }
        if (&unit % prime).is_zero() {
            return Err(err());
        }
        Ok(Self::from_scaled(prime, valuation, unit, valuation + precision))
    }

    /// The p-adic logarithm on `1 + pZ_p`, summed until the remaining terms
    /// vanish at the precision of the argument.
    pub fn log(&self) -> Result<Self> {
        let p = self.prime;
        let one = Self::one(p, self.precision.max(1));
        let u = self - &one;
        let Some(v) = u.valuation else {
            return Ok(Self::zero(p, u.precision));
        };
        if v < 1 || self.valuation != Some(0) {
            return Err(PadicError::OutsideDisc(self.to_string()));
        }
        let target = u.precision;
        let mut sum = Self::zero(p, target);
        let mut power = u.clone();
        let mut n: u64 = 1;
        loop {
            let vn = valuation_of_u128(n as u128, p) as i64;
            // every later term has valuation at least n*v - log_p(n) - 1
            if n as i64 * v - vn >= target && (n as i64) * v - ilog(n, p) - 1 >= target {
                break;
            }
            let divisor = Self::from_u64(n, p, target + vn + 2);
            let term = power.div(&divisor)?;
            sum = if n % 2 == 1 { &sum + &term } else { &sum - &term };
            power = &power * &u;
            n += 1;
        }
        Ok(sum.truncate(target))
    }
}

fn ilog(n: u64, p: u64) -> i64 {
    let mut k = 0;
    let mut x = n;
    while x >= p {
        x /= p;
        k += 1;
    }
    k
}

fn parse_power(s: &str) -> Option<(u64, i64)> {
    let (b, e) = s.trim().split_once('^')?;
    Some((b.parse().ok()?, e.parse().ok()?))
}

/// Canonical rendering: base-p unit digits, least significant first, with a
/// `p^v * ` prefix when the valuation is nonzero. The `O(p^r)` term gives the
/// relative precision `r` (number of unit digits listed), so the absolute
/// precision is `v + r`:
///
/// ```text
/// O(5^4): 3 + 1*5 + 0*5^2 + 2*5^3
/// 5^-2 * O(5^4): 3 + 1*5 + 0*5^2 + 2*5^3
/// O(5^6): 0
/// ```
impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime;
        let Some(v) = self.valuation else {
            return write!(f, "O({p}^{}): 0", self.precision);
        };
        if v != 0 {
            write!(f, "{p}^{v} * ")?;
        }
        let digits = self.unit_digits();
        write!(f, "O({p}^{}): ", digits.len())?;
        for (i, d) in digits.iter().enumerate() {
            match i {
                0 => write!(f, "{d}")?,
                1 => write!(f, " + {d}*{p}")?,
                _ => write!(f, " + {d}*{p}^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// Operator impls panic on a prime mismatch; use the checked_* methods
// where the primes are not already known to agree.
impl Add for &PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: &PadicNumber) -> PadicNumber {
        self.checked_add(rhs).expect("prime mismatch")
    }
}

impl Sub for &PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: &PadicNumber) -> PadicNumber {
        self.checked_sub(rhs).expect("prime mismatch")
    }
}

impl Mul for &PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: &PadicNumber) -> PadicNumber {
        self.checked_mul(rhs).expect("prime mismatch")
    }
}

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_impl()
    }
}

impl Add for PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: PadicNumber) -> PadicNumber {
        &self + &rhs
    }
}

impl Sub for PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: PadicNumber) -> PadicNumber {
        &self - &rhs
    }
}

impl Mul for PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: PadicNumber) -> PadicNumber {
        &self * &rhs
    }
}

impl Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_impl()
    }
}

impl std::iter::Sum for PadicNumber {
    fn sum<I: Iterator<Item = PadicNumber>>(iter: I) -> PadicNumber {
        iter.reduce(|a, b| &a + &b).expect("sum of an empty iterator")
    }
}

/// Tracks digits lost to division during one computation.
#[derive(Clone, Debug, Serialize)]
pub struct PrecisionBudget {
    target_abs_precision: i64,
    loss_log: Vec<(String, i64)>,
}

impl PrecisionBudget {
    pub fn new(target_abs_precision: i64) -> Self {
        PrecisionBudget {
            target_abs_precision,
            loss_log: Vec::new(),
        }
    }

    pub fn target(&self) -> i64 {
        self.target_abs_precision
    }

    pub fn losses(&self) -> &[(String, i64)] {
        &self.loss_log
    }

    pub fn record(&mut self, operation: &str, digits: i64) {
        self.loss_log.push((operation.to_string(), digits));
    }

    pub fn total_loss(&self) -> i64 {
        self.loss_log.iter().map(|(_, d)| d).sum()
    }

    pub fn achieved_precision(&self) -> i64 {
        self.target_abs_precision - self.total_loss()
    }

    /// Divides and logs the digits of absolute precision the quotient lost
    /// against the dividend: `v_p(y)`, plus whatever relative precision `y`
    /// itself was missing. Errors once the budget is spent.
    pub fn div(&mut self, operation: &str, x: &PadicNumber, y: &PadicNumber) -> Result<PadicNumber> {
        let out = x.div(y)?;
        let floor = x.precision().min(self.target_abs_precision);
        self.record(operation, (floor - out.precision()).max(y.valuation_bound()).max(0));
        if self.achieved_precision() <= 0 {
            return Err(PadicError::PrecisionExhausted {
                operation: operation.to_string(),
                remaining: self.achieved_precision(),
            });
        }
        Ok(out)
    }

    pub fn merge(&mut self, other: &PrecisionBudget) {
        self.loss_log.extend(other.loss_log.iter().cloned());
    }
}

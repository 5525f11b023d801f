//! Two-parameter integers `[n]_{ρ,q} = (ρ^n - q^n)/(ρ - q)` and friends.
//!
//! Everything here is computed division-free where possible:
//! `[n]` comes from the splitting rule `[m + n] = q^n [m] + ρ^m [n]`,
//! which keeps `ρ = q` non-degenerate and costs nothing in precision.

use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{PadicError, Result};
use crate::padic::{check_prime, pow_p, PadicNumber};

#[derive(Clone, Debug)]
struct TowerLevel {
    rho: PadicNumber,
    q: PadicNumber,
    bracket: PadicNumber,
}

/// The pair `(ρ, q)` in `1 + pZ_p`, together with the working precision
/// every derived quantity is computed at.
#[derive(Clone, Debug)]
pub struct RhoQParams {
    prime: u64,
    rho: PadicNumber,
    q: PadicNumber,
    precision: i64,
    ratio: PadicNumber,
    tower: Arc<RwLock<Vec<TowerLevel>>>,
    factorials: Arc<RwLock<Vec<PadicNumber>>>,
}

pub(crate) fn check_disc(x: &PadicNumber) -> Result<()> {
    let one = PadicNumber::one(x.prime(), x.precision().max(1));
    if x.valuation() != Some(0) || (x - &one).valuation_bound() < 1 {
        return Err(PadicError::OutsideDisc(x.to_string()));
    }
    Ok(())
}

impl RhoQParams {
    pub fn new(rho: PadicNumber, q: PadicNumber) -> Result<Self> {
        let prime = rho.prime();
        check_prime(prime)?;
        if q.prime() != prime {
            return Err(PadicError::PrimeMismatch(prime, q.prime()));
        }
        check_disc(&rho)?;
        check_disc(&q)?;
        let precision = rho.precision().min(q.precision());
        let rho = rho.truncate(precision);
        let q = q.truncate(precision);
        let ratio = q.div(&rho)?;
        let one = PadicNumber::one(prime, precision);
        let tower = vec![TowerLevel {
            rho: rho.clone(),
            q: q.clone(),
            bracket: one.clone(),
        }];
        Ok(RhoQParams {
            prime,
            rho,
            q,
            precision,
            ratio,
            tower: Arc::new(RwLock::new(tower)),
            factorials: Arc::new(RwLock::new(vec![one])),
        })
    }

    /// `ρ = 1 + k_rho p`, `q = 1 + k_q p`, known to `precision` digits.
    pub fn from_offsets(prime: u64, k_rho: i64, k_q: i64, precision: i64) -> Result<Self> {
        check_prime(prime)?;
        let p = prime as i64;
        let make = |k: i64| {
            let v = k
                .checked_mul(p)
                .and_then(|x| x.checked_add(1))
                .ok_or_else(|| PadicError::Overflow(format!("1 + {k}*{p}")))?;
            PadicNumber::from_integer(v, prime, precision)
        };
        Self::new(make(k_rho)?, make(k_q)?)
    }

    /// `ρ = q = 1`: the classical Haar/Volkenborn setting.
    pub fn classical(prime: u64, precision: i64) -> Result<Self> {
        Self::from_offsets(prime, 0, 0, precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn rho(&self) -> &PadicNumber {
        &self.rho
    }

    pub fn q(&self) -> &PadicNumber {
        &self.q
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// `q / ρ`.
    pub fn ratio(&self) -> &PadicNumber {
        &self.ratio
    }

    pub fn one(&self) -> PadicNumber {
        PadicNumber::one(self.prime, self.precision)
    }

    pub fn zero(&self) -> PadicNumber {
        PadicNumber::zero(self.prime, self.precision)
    }

    pub fn int(&self, n: i64) -> PadicNumber {
        PadicNumber::from_bigint_unchecked(&n.into(), self.prime, self.precision)
    }

    pub fn is_symmetric(&self) -> bool {
        (&self.rho - &self.q).is_zero()
    }

    /// `p^N` as a machine integer.
    pub fn p_pow(&self, n: u32) -> Result<u128> {
        (self.prime as u128)
            .checked_pow(n)
            .ok_or_else(|| PadicError::Overflow(format!("{}^{}", self.prime, n)))
    }

    fn extend_tower(&self, level: u32) {
        let mut tower = self.tower.write().unwrap();
        while tower.len() <= level as usize {
            let last = tower.last().unwrap();
            let step = bracket_p(&last.rho, &last.q, self.prime);
            let next = TowerLevel {
                rho: last.rho.pow(self.prime),
                q: last.q.pow(self.prime),
                bracket: &last.bracket * &step,
            };
            tower.push(next);
        }
    }

    /// `(ρ^{p^N}, q^{p^N})`.
    pub fn tower_powers(&self, level: u32) -> (PadicNumber, PadicNumber) {
        self.extend_tower(level);
        let tower = self.tower.read().unwrap();
        let t = &tower[level as usize];
        (t.rho.clone(), t.q.clone())
    }

    /// `[p^N]_{ρ,q}` via the tower `Π_{i<N} [p]_{ρ^{p^i}, q^{p^i}}`.
    pub fn bracket_p_pow(&self, level: u32) -> PadicNumber {
        self.extend_tower(level);
        self.tower.read().unwrap()[level as usize].bracket.clone()
    }

    /// Parameters `(ρ^{p^N}, q^{p^N})` at the same working precision.
    pub fn lifted(&self, level: u32) -> RhoQParams {
        if level == 0 {
            return self.clone();
        }
        let (rho, q) = self.tower_powers(level);
        RhoQParams::new(rho, q).expect("lifted parameters stay in the disc")
    }

    /// Same `(ρ, q)` truncated to a lower precision.
    pub fn truncated(&self, precision: i64) -> RhoQParams {
        RhoQParams::new(self.rho.truncate(precision), self.q.truncate(precision))
            .expect("truncation keeps parameters valid")
    }

    /// `ν_p(ρ^{p^N} - q^{p^N})`, `None` when `ρ = q`.
    pub fn gap_valuation(&self, level: u32) -> Option<i64> {
        let (r, q) = self.tower_powers(level);
        (&r - &q).valuation()
    }

    /// `[n]_{ρ,q}!`, memoized.
    pub fn factorial(&self, n: usize) -> PadicNumber {
        {
            let cache = self.factorials.read().unwrap();
            if n < cache.len() {
                return cache[n].clone();
            }
        }
        let mut cache = self.factorials.write().unwrap();
        while cache.len() <= n {
            let k = cache.len();
            let next = cache.last().unwrap() * &rhoq_integer(k as u128, self);
            cache.push(next);
        }
        cache[n].clone()
    }
}

impl Serialize for RhoQParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RhoQParams", 4)?;
        st.serialize_field("p", &self.prime)?;
        st.serialize_field("rho", &self.rho)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("precision", &self.precision)?;
        st.end()
    }
}

/// `[p]_{a,b} = Σ_{j<p} a^j b^{p-1-j}`.
fn bracket_p(a: &PadicNumber, b: &PadicNumber, p: u64) -> PadicNumber {
    let mut sum = PadicNumber::zero(a.prime(), a.precision().min(b.precision()));
    let mut apow = PadicNumber::one(a.prime(), a.precision());
    let mut bpow = b.pow(p - 1);
    let binv = b.inverse().expect("unit");
    for _ in 0..p {
        sum = &sum + &(&apow * &bpow);
        apow = &apow * a;
        bpow = &bpow * &binv;
    }
    sum
}

/// `[n]_{ρ,q}` for a nonnegative integer, by binary splitting:
/// `[2k] = (q^k + ρ^k)[k]` and `[k + 1] = q[k] + ρ^k`.
pub fn rhoq_integer(n: u128, params: &RhoQParams) -> PadicNumber {
    rhoq_integer_with(n, &params.rho, &params.q)
}

pub(crate) fn rhoq_integer_with(n: u128, rho: &PadicNumber, q: &PadicNumber) -> PadicNumber {
    let prec = rho.precision().min(q.precision());
    let p = rho.prime();
    let mut bracket = PadicNumber::zero(p, prec);
    let mut rk = PadicNumber::one(p, prec);
    let mut qk = PadicNumber::one(p, prec);
    if n == 0 {
        return bracket;
    }
    for i in (0..128 - n.leading_zeros()).rev() {
        bracket = &(&qk + &rk) * &bracket;
        rk = &rk * &rk;
        qk = &qk * &qk;
        if (n >> i) & 1 == 1 {
            bracket = &(q * &bracket) + &rk;
            rk = &rk * rho;
            qk = &qk * q;
        }
    }
    bracket
}

/// `[x]_q = (1 - q^x)/(1 - q)`, or `x` itself at `q = 1`.
pub fn q_number(x: u128, q: &PadicNumber) -> Result<PadicNumber> {
    check_disc(q)?;
    let one = PadicNumber::one(q.prime(), q.precision());
    Ok(rhoq_integer_with(x, &one, q))
}

/// `[x]_q` for a p-adic exponent. Loses `ν_p(q - 1)` digits to the division.
pub fn q_number_padic(x: &PadicNumber, q: &PadicNumber) -> Result<PadicNumber> {
    check_disc(q)?;
    let one = PadicNumber::one(q.prime(), q.precision());
    let d = &one - q;
    if d.is_zero() {
        return Ok(x.clone());
    }
    let qx = rhoq_power(q, x, q.precision())?;
    (&one - &qx).div(&d)
}

/// `[x]_{ρ,q} = (ρ^x - q^x)/(ρ - q)` for a p-adic exponent; rejected when `ρ = q`.
pub fn rhoq_number(x: &PadicNumber, params: &RhoQParams) -> Result<PadicNumber> {
    let d = params.rho() - params.q();
    if d.is_zero() {
        return Err(PadicError::InvalidArgument(
            "[x] for a non-integer exponent needs rho != q".into(),
        ));
    }
    let m = params.precision();
    let num = &rhoq_power(params.rho(), x, m)? - &rhoq_power(params.q(), x, m)?;
    num.div(&d)
}

/// Gaussian binomial `{n brack k}_{ρ,q} = [n]!/([k]![n-k]!)`, zero for `k > n`.
///
/// The numerator is the falling product `[n][n-1]...[n-k+1]`, so large `n`
/// never needs a large factorial.
pub fn rhoq_binomial(n: u128, k: u128, params: &RhoQParams) -> PadicNumber {
    if k > n {
        return params.zero();
    }
    let k = k.min(n - k);
    let mut num = params.one();
    for j in 0..k {
        num = &num * &rhoq_integer(n - j, params);
    }
    let den = params.factorial(k as usize);
    num.div(&den)
        .expect("factorial of a unit disc parameter is nonzero")
}

pub fn rhoq_factorial(n: usize, params: &RhoQParams) -> PadicNumber {
    params.factorial(n)
}

/// `base^exponent` for `base ∈ 1 + pZ_p` and `exponent ∈ Z_p`, by continuity.
///
/// The exponent is reduced modulo `p^m`; since `base^{p^k} ≡ 1 mod p^{k+1}`,
/// an exponent known only modulo `p^e` determines the result modulo `p^{e+1}`.
pub fn rhoq_power(base: &PadicNumber, exponent: &PadicNumber, m: i64) -> Result<PadicNumber> {
    check_disc(base)?;
    if base.prime() != exponent.prime() {
        return Err(PadicError::PrimeMismatch(base.prime(), exponent.prime()));
    }
    let e = exponent.residue()?;
    let m = m.min(base.precision()).min(exponent.precision() + 1);
    let e = e % pow_p(base.prime(), m.max(0));
    if m < 1 {
        return Err(PadicError::PrecisionExhausted {
            operation: "rhoq_power".into(),
            remaining: m,
        });
    }
    Ok(base.truncate(m).pow_big(&e))
}

/// Integer exponent shortcut; negative exponents go through the inverse.
pub fn rhoq_power_int(base: &PadicNumber, exponent: i128) -> PadicNumber {
    if exponent >= 0 {
        base.pow_big(&BigUint::from(exponent as u128))
    } else {
        let inv = base.inverse().expect("base is a unit");
        inv.pow_big(&BigUint::from(exponent.unsigned_abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, kr: i64, kq: i64, m: i64) -> RhoQParams {
        RhoQParams::from_offsets(p, kr, kq, m).unwrap()
    }

    fn naive(n: u128, p: &RhoQParams) -> PadicNumber {
        let mut s = p.zero();
        for i in 0..n {
            s = &s + &(&p.rho().pow(i as u64) * &p.q().pow((n - 1 - i) as u64));
        }
        s
    }

    #[test]
    fn classical_limit_is_n() {
        let p = RhoQParams::classical(5, 8).unwrap();
        for n in 0..40u128 {
            assert_eq!(rhoq_integer(n, &p), p.int(n as i64));
        }
    }

    #[test]
    fn rho_six_q_one() {
        let p = params(5, 1, 0, 4);
        assert_eq!(rhoq_integer(3, &p), p.int(43));
        let q = PadicNumber::from_integer(6, 5, 4).unwrap();
        assert_eq!(q_number(3, &q).unwrap(), p.int(43));
        assert!(q_number(0, &q).unwrap().is_zero());
        let one = PadicNumber::one(5, 4);
        assert_eq!(q_number(5, &one).unwrap(), p.int(5));
    }

    #[test]
    fn binary_splitting_matches_naive_sum() {
        let p = params(7, 3, -2, 10);
        for n in 0..60u128 {
            assert_eq!(rhoq_integer(n, &p), naive(n, &p), "n = {n}");
        }
    }

    #[test]
    fn quotient_form_when_rho_differs() {
        let p = params(5, 1, 2, 12);
        let d = p.rho() - p.q();
        for n in [1u128, 4, 25, 33] {
            let quotient = (&p.rho().pow(n as u64) - &p.q().pow(n as u64)).div(&d).unwrap();
            assert!(rhoq_integer(n, &p).congruent(&quotient, quotient.precision()));
        }
    }

    #[test]
    fn tower_matches_direct() {
        let p = params(3, 1, 4, 14);
        for level in 0..5u32 {
            let direct = rhoq_integer(3u128.pow(level), &p);
            assert_eq!(p.bracket_p_pow(level).truncate(direct.precision()), direct);
            assert_eq!(p.bracket_p_pow(level).valuation(), Some(level as i64));
        }
    }

    #[test]
    fn gap_valuation_grows_by_one_per_level() {
        let p = params(5, 1, 2, 20);
        let base = p.gap_valuation(0).unwrap();
        for n in 0..5 {
            assert_eq!(p.gap_valuation(n), Some(base + n as i64));
        }
        assert_eq!(params(5, 3, 3, 10).gap_valuation(2), None);
    }

    #[test]
    fn binomial_basics() {
        let c = RhoQParams::classical(5, 10).unwrap();
        assert_eq!(rhoq_binomial(4, 2, &c), c.int(6));
        assert_eq!(rhoq_binomial(9, 0, &c), c.int(1));
        assert!(rhoq_binomial(2, 3, &c).is_zero());
        let p = params(5, 2, 1, 12);
        for n in 0..10u128 {
            assert_eq!(rhoq_binomial(n, n, &p), p.one());
            assert_eq!(rhoq_binomial(n, 1, &p), rhoq_integer(n, &p));
        }
    }

    #[test]
    fn binomial_matches_pascal_recurrence() {
        // {n,k} = q^k {n-1,k} + ρ^{n-k} {n-1,k-1}
        for (kr, kq) in [(0, 1), (2, 3), (4, 4)] {
            let p = params(5, kr, kq, 16);
            let mut row = vec![p.one()];
            for n in 1..=14u128 {
                let mut next = Vec::new();
                for k in 0..=n {
                    let a = if k < n { &p.q().pow(k as u64) * &row[k as usize] } else { p.zero() };
                    let b = if k > 0 {
                        &p.rho().pow((n - k) as u64) * &row[k as usize - 1]
                    } else {
                        p.zero()
                    };
                    next.push(&a + &b);
                }
                row = next;
                for k in 0..=n {
                    let got = rhoq_binomial(n, k, &p);
                    assert!(got.congruent(&row[k as usize], 16 - 3), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn power_continuity() {
        let b = PadicNumber::from_integer(6, 5, 3).unwrap();
        let minus_one = PadicNumber::from_integer(-1, 5, 3).unwrap();
        let inv = rhoq_power(&b, &minus_one, 3).unwrap();
        assert_eq!(&inv * &b, PadicNumber::one(5, 3));

        let m = 6;
        let b = PadicNumber::from_integer(11, 5, m).unwrap();
        let x = PadicNumber::from_integer(1234, 5, 20).unwrap();
        let y = PadicNumber::from_integer(1234 + 5i64.pow(6) * 17, 5, 20).unwrap();
        assert_eq!(rhoq_power(&b, &x, m).unwrap(), rhoq_power(&b, &y, m).unwrap());
        assert_eq!(
            rhoq_power(&b, &PadicNumber::zero(5, 10), m).unwrap(),
            PadicNumber::one(5, m)
        );
        assert!(rhoq_power(&PadicNumber::from_integer(2, 5, 4).unwrap(), &x, 4).is_err());
    }

    #[test]
    fn rhoq_number_agrees_on_integers() {
        let p = params(5, 1, 2, 12);
        let x = p.int(17);
        let v = rhoq_number(&x, &p).unwrap();
        assert!(v.congruent(&rhoq_integer(17, &p), v.precision()));
        assert!(rhoq_number(&x, &params(5, 1, 1, 8)).is_err());
        let q = PadicNumber::from_integer(11, 5, 12).unwrap();
        let qn = q_number_padic(&x, &q).unwrap();
        assert!(qn.congruent(&q_number(17, &q).unwrap(), qn.precision()));
    }

    #[test]
    fn params_validation() {
        let two = PadicNumber::from_integer(2, 5, 4).unwrap();
        let one = PadicNumber::one(5, 4);
        assert!(matches!(RhoQParams::new(two, one), Err(PadicError::OutsideDisc(_))));
        assert!(RhoQParams::from_offsets(4, 1, 1, 4).is_err());
    }
}

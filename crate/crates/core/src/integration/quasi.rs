//! Finite sums `Σ c x^d e^x` with `e ∈ 1 + pZ_p`.
//!
//! The class is closed under sums, products and affine substitution
//! `x -> a + p^N y`, and its sums over `0 <= x < p^K` obey the moment
//! recursion
//!
//! ```text
//! S_d(K) = Σ_{i<=d} C(d, i) S_i(K-1) · p^{(K-1)(d-i)} Σ_{t<p} t^{d-i} W^t,   W = w^{p^{K-1}}
//! ```
//!
//! with `S_d(0) = [d == 0]`, which needs no division at all.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::padic::PadicNumber;

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiTerm {
    pub coeff: PadicNumber,
    pub degree: u32,
    pub base: PadicNumber,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiPolynomial {
    prime: u64,
    /// Values are known modulo `p^precision`.
    precision: i64,
    terms: Vec<QuasiTerm>,
}

fn binomial_table(n: u32) -> Vec<Vec<u128>> {
    let mut rows = vec![vec![1u128]];
    for i in 1..=n as usize {
        let prev = &rows[i - 1];
        let mut row = vec![1u128; i + 1];
        for k in 1..i {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}

impl QuasiPolynomial {
    pub fn zero(prime: u64, precision: i64) -> Self {
        QuasiPolynomial {
            prime,
            precision,
            terms: Vec::new(),
        }
    }

    pub fn constant(c: PadicNumber) -> Self {
        let one = PadicNumber::one(c.prime(), c.precision().max(1));
        Self::from_terms(
            c.prime(),
            c.precision(),
            vec![QuasiTerm {
                coeff: c,
                degree: 0,
                base: one,
            }],
        )
    }

    /// `c x^d e^x`.
    pub fn term(coeff: PadicNumber, degree: u32, base: PadicNumber) -> Self {
        let precision = coeff.precision().min(base.precision());
        Self::from_terms(coeff.prime(), precision, vec![QuasiTerm { coeff, degree, base }])
    }

    pub fn from_terms(prime: u64, precision: i64, terms: Vec<QuasiTerm>) -> Self {
        let mut q = QuasiPolynomial {
            prime,
            precision,
            terms,
        };
        q.combine();
        q
    }

    /// Merges terms whose bases agree to the bases' own precision.
    fn combine(&mut self) {
        let key_prec = self
            .terms
            .iter()
            .map(|t| t.base.precision())
            .min()
            .unwrap_or(1)
            .max(1);
        let mut merged: BTreeMap<(u32, BigUint), QuasiTerm> = BTreeMap::new();
        for t in self.terms.drain(..) {
            // c b^x is known to v(c) + prec(b) when b is
            let term_prec = t.coeff.precision().min(t.coeff.valuation_bound() + key_prec);
            self.precision = self.precision.min(term_prec);
            let key = (t.degree, t.base.truncate(key_prec).residue().expect("unit base"));
            match merged.get_mut(&key) {
                Some(existing) => existing.coeff = &existing.coeff + &t.coeff,
                None => {
                    merged.insert(key, t);
                }
            }
        }
        self.terms = merged.into_values().filter(|t| !t.coeff.is_zero()).collect();
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn terms(&self) -> &[QuasiTerm] {
        &self.terms
    }

    /// Precision for exact integer factors, so that multiplying them into a
    /// coefficient of negative valuation costs nothing.
    fn integer_precision(&self) -> i64 {
        let neg = self
            .terms
            .iter()
            .map(|t| -t.coeff.valuation_bound())
            .max()
            .unwrap_or(0)
            .max(0);
        self.precision.max(1) + neg + 2
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.degree).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(self.prime, self.precision.min(other.precision), terms)
    }

    pub fn scale(&self, c: &PadicNumber) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| QuasiTerm {
                coeff: &t.coeff * c,
                degree: t.degree,
                base: t.base.clone(),
            })
            .collect();
        let precision = self.precision + c.valuation_bound().min(0);
        Self::from_terms(self.prime, precision, terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let minus = PadicNumber::from_integer(-1, self.prime, self.precision.max(other.precision).max(1))
            .expect("valid prime");
        self.add(&other.scale(&minus))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(QuasiTerm {
                    coeff: &a.coeff * &b.coeff,
                    degree: a.degree + b.degree,
                    base: &a.base * &b.base,
                });
            }
        }
        Self::from_terms(self.prime, self.precision.min(other.precision), terms)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(PadicNumber::one(self.prime, self.precision.max(1)));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// `y -> f(offset + p^level y)`.
    pub fn compose_affine(&self, offset: u128, level: u32) -> Self {
        let p = self.prime;
        let prec = self.integer_precision();
        let binom = binomial_table(self.max_degree());
        let a = PadicNumber::from_u128(offset, p, prec + 1);
        let s = PadicNumber::from_bigint_unchecked(
            &crate::padic::pow_p(p, level as i64).into(),
            p,
            prec + level as i64 + 1,
        );
        let mut terms = Vec::new();
        for t in &self.terms {
            let shift = t.base.pow_big(&BigUint::from(offset));
            let new_base = t.base.pow_big(&crate::padic::pow_p(p, level as i64));
            let lead = &t.coeff * &shift;
            for i in 0..=t.degree {
                let c = PadicNumber::from_u128(binom[t.degree as usize][i as usize], p, prec + 1);
                let coeff = &(&(&lead * &c) * &a.pow((t.degree - i) as u64)) * &s.pow(i as u64);
                terms.push(QuasiTerm {
                    coeff,
                    degree: i,
                    base: new_base.clone(),
                });
            }
        }
        Self::from_terms(p, self.precision, terms)
    }

    pub fn eval(&self, x: u128) -> PadicNumber {
        let p = self.prime;
        let prec = self.integer_precision();
        let xp = PadicNumber::from_u128(x, p, prec);
        let e = BigUint::from(x);
        let mut sum = PadicNumber::zero(p, prec);
        for t in &self.terms {
            sum = &sum + &(&(&t.coeff * &xp.pow(t.degree as u64)) * &t.base.pow_big(&e));
        }
        sum.truncate(self.precision)
    }

    /// `Σ_{x < p^K} f(x) w^x` for every `K` in `0..=max_level`.
    pub fn level_sums(&self, weight: &PadicNumber, max_level: u32) -> Vec<PadicNumber> {
        let p = self.prime;
        let prec = self.precision.max(1);
        let mut totals = vec![PadicNumber::zero(p, prec); max_level as usize + 1];
        // group by base so each distinct weight runs the recursion once
        let mut groups: BTreeMap<BigUint, (PadicNumber, Vec<&QuasiTerm>)> = BTreeMap::new();
        for t in &self.terms {
            let w = &t.base * weight;
            let key = w.residue().expect("unit");
            groups.entry(key).or_insert_with(|| (w, Vec::new())).1.push(t);
        }
        for (w, group) in groups.values() {
            let d = group.iter().map(|t| t.degree).max().unwrap_or(0);
            let moments = moment_sums(w, d, max_level);
            for (k, s) in moments.iter().enumerate() {
                for t in group {
                    totals[k] = &totals[k] + &(&t.coeff * &s[t.degree as usize]);
                }
            }
        }
        totals
            .into_iter()
            .map(|v| v.truncate(self.precision))
            .collect()
    }
}

/// `S_d(K) = Σ_{x < p^K} x^d w^x` for `d <= max_degree`, `K <= max_level`.
pub fn moment_sums(w: &PadicNumber, max_degree: u32, max_level: u32) -> Vec<Vec<PadicNumber>> {
    let p = w.prime();
    let prec = w.precision();
    let dd = max_degree as usize;
    let binom = binomial_table(max_degree);
    let mut s0 = vec![PadicNumber::zero(p, prec); dd + 1];
    s0[0] = PadicNumber::one(p, prec);
    let mut out = vec![s0];
    // W = w^{p^{K-1}}
    let mut big_w = w.clone();
    for k in 1..=max_level {
        let prev = &out[k as usize - 1];
        // G(j) = p^{(K-1) j} Σ_t t^j W^t
        let scale = PadicNumber::from_bigint_unchecked(
            &crate::padic::pow_p(p, k as i64 - 1).into(),
            p,
            prec + k as i64,
        );
        let mut g = vec![PadicNumber::zero(p, prec); dd + 1];
        let mut wt = PadicNumber::one(p, prec);
        for t in 0..p {
            let tp = PadicNumber::from_u64(t, p, prec + 1);
            let mut tj = PadicNumber::one(p, prec + 1);
            for gj in g.iter_mut() {
                *gj = &*gj + &(&tj * &wt);
                tj = &tj * &tp;
            }
            wt = &wt * &big_w;
        }
        let mut scale_j = PadicNumber::one(p, prec + k as i64);
        for gj in g.iter_mut() {
            *gj = &*gj * &scale_j;
            scale_j = &scale_j * &scale;
        }
        let mut cur = Vec::with_capacity(dd + 1);
        for d in 0..=dd {
            let mut acc = PadicNumber::zero(p, prec);
            for i in 0..=d {
                let c = PadicNumber::from_u128(binom[d][i], p, prec + 1);
                acc = &acc + &(&(&c * &prev[i]) * &g[d - i]);
            }
            cur.push(acc);
        }
        out.push(cur);
        big_w = big_w.pow(p);
    }
    out
}

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;

use crate::error::{PadicError, Result};
use crate::integration::quasi::QuasiPolynomial;
use crate::mahler::{mahler_evaluate, MahlerSeries};
use crate::padic::PadicNumber;
use crate::rhoq::{rhoq_integer, RhoQParams};

pub type PointwiseFn = dyn Fn(u128) -> PadicNumber + Send + Sync;

#[derive(Clone)]
pub enum Kind {
    /// `Σ c_d x^d`.
    Polynomial(Vec<PadicNumber>),
    /// `Σ a_i [x]^i_{ρ,q}`.
    RhoQPolynomial {
        params: RhoQParams,
        coefficients: Vec<PadicNumber>,
    },
    /// `c^x`.
    Exponential(PadicNumber),
    /// `ρ^{ax} [x]^n_{ρ,q}`.
    MixedProduct { params: RhoQParams, a: i64, n: u32 },
    Mahler(MahlerSeries),
    Combination(Vec<(PadicNumber, IntegrableFunction)>),
    Product(IntegrableFunction, IntegrableFunction),
    /// `y -> f(offset + p^level y)`.
    Affine {
        inner: IntegrableFunction,
        offset: u128,
        level: u32,
    },
    Quasi(QuasiPolynomial),
    Pointwise { name: String, f: Arc<PointwiseFn> },
}

/// A function `Z_p -> Q_p` known through its values at nonnegative integers.
#[derive(Clone)]
pub struct IntegrableFunction {
    prime: u64,
    precision: i64,
    kind: Arc<Kind>,
    name: Option<Arc<str>>,
    quasi: Arc<OnceLock<Option<QuasiPolynomial>>>,
}

impl fmt::Debug for IntegrableFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegrableFunction({})", self.label())
    }
}

impl IntegrableFunction {
    fn from_kind(prime: u64, precision: i64, kind: Kind) -> Self {
        IntegrableFunction {
            prime,
            precision,
            kind: Arc::new(kind),
            name: None,
            quasi: Arc::new(OnceLock::new()),
        }
    }

    pub fn constant(c: PadicNumber) -> Self {
        Self::from_kind(c.prime(), c.precision(), Kind::Polynomial(vec![c]))
    }

    pub fn polynomial(coefficients: Vec<PadicNumber>) -> Self {
        let prime = coefficients[0].prime();
        let precision = coefficients.iter().map(|c| c.precision()).min().unwrap();
        Self::from_kind(prime, precision, Kind::Polynomial(coefficients))
    }

    /// `x^d`.
    pub fn monomial(d: u32, prime: u64, precision: i64) -> Self {
        let mut c = vec![PadicNumber::zero(prime, precision); d as usize + 1];
        c[d as usize] = PadicNumber::one(prime, precision);
        Self::polynomial(c)
    }

    pub fn rhoq_polynomial(params: &RhoQParams, coefficients: Vec<PadicNumber>) -> Self {
        Self::from_kind(
            params.prime(),
            params.precision(),
            Kind::RhoQPolynomial {
                params: params.clone(),
                coefficients,
            },
        )
    }

    /// `[x]^k_{ρ,q}`.
    pub fn rhoq_power_of_x(params: &RhoQParams, k: u32) -> Self {
        let mut c = vec![params.zero(); k as usize + 1];
        c[k as usize] = params.one();
        Self::rhoq_polynomial(params, c)
    }

    pub fn exponential(base: PadicNumber) -> Self {
        Self::from_kind(base.prime(), base.precision(), Kind::Exponential(base))
    }

    /// `(q/ρ)^x`.
    pub fn ratio_power(params: &RhoQParams) -> Self {
        Self::exponential(params.ratio().clone()).named("(q/rho)^x")
    }

    /// Overrides the generated label.
    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn mixed_product(params: &RhoQParams, a: i64, n: u32) -> Self {
        Self::from_kind(
            params.prime(),
            params.precision(),
            Kind::MixedProduct {
                params: params.clone(),
                a,
                n,
            },
        )
    }

    pub fn mahler(series: MahlerSeries) -> Self {
        let prime = series.params().prime();
        let precision = series.precision();
        Self::from_kind(prime, precision, Kind::Mahler(series))
    }

    pub fn quasi(q: QuasiPolynomial) -> Self {
        Self::from_kind(q.prime(), q.precision(), Kind::Quasi(q))
    }

    /// Parses `const:<n>`, `x`, `x^<d>`, `rhoq^<k>`, `ratio`, `exp:<k>`
    /// (base `1 + k p`) or `mixed:<a>:<n>`.
    pub fn from_spec(spec: &str, params: &RhoQParams) -> Result<Self> {
        let p = params.prime();
        let w = params.precision();
        let bad = || PadicError::Parse(format!("function spec `{spec}`"));
        let num = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
        let small = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
        let s = spec.trim();
        Ok(match s {
            "x" => Self::monomial(1, p, w),
            "ratio" => Self::ratio_power(params),
            _ => {
                if let Some(n) = s.strip_prefix("const:") {
                    Self::constant(params.int(num(n)?))
                } else if let Some(d) = s.strip_prefix("x^") {
                    Self::monomial(small(d)?, p, w)
                } else if let Some(k) = s.strip_prefix("rhoq^") {
                    Self::rhoq_power_of_x(params, small(k)?)
                } else if let Some(k) = s.strip_prefix("exp:") {
                    let k = num(k)?;
                    let base = k.checked_mul(p as i64).and_then(|v| v.checked_add(1)).ok_or_else(bad)?;
                    Self::exponential(params.int(base))
                } else if let Some(rest) = s.strip_prefix("mixed:") {
                    let (a, n) = rest.split_once(':').ok_or_else(bad)?;
                    Self::mixed_product(params, num(a)?, small(n)?)
                } else {
                    return Err(bad());
                }
            }
        })
    }

    pub fn pointwise(
        name: &str,
        prime: u64,
        precision: i64,
        f: impl Fn(u128) -> PadicNumber + Send + Sync + 'static,
    ) -> Self {
        Self::from_kind(
            prime,
            precision,
            Kind::Pointwise {
                name: name.to_string(),
                f: Arc::new(f),
            },
        )
    }

    pub fn linear_combination(parts: Vec<(PadicNumber, IntegrableFunction)>) -> Self {
        let prime = parts[0].1.prime;
        let precision = parts
            .iter()
            .map(|(c, f)| c.precision().min(f.precision))
            .min()
            .unwrap();
        Self::from_kind(prime, precision, Kind::Combination(parts))
    }

    pub fn product(a: &IntegrableFunction, b: &IntegrableFunction) -> Self {
        Self::from_kind(
            a.prime,
            a.precision.min(b.precision),
            Kind::Product(a.clone(), b.clone()),
        )
    }

    pub fn affine(&self, offset: u128, level: u32) -> Self {
        Self::from_kind(
            self.prime,
            self.precision,
            Kind::Affine {
                inner: self.clone(),
                offset,
                level,
            },
        )
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.to_string();
        }
        match &*self.kind {
            Kind::Polynomial(c) => {
                let parts: Vec<String> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(d, v)| {
                        let coeff = short(v);
                        match d {
                            0 => coeff,
                            1 if coeff == "1" => "x".to_string(),
                            1 => format!("{coeff}*x"),
                            _ if coeff == "1" => format!("x^{d}"),
                            _ => format!("{coeff}*x^{d}"),
                        }
                    })
                    .collect();
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            }
            Kind::RhoQPolynomial { coefficients, .. } => {
                let parts: Vec<String> = coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(d, v)| {
                        let coeff = short(v);
                        match (d, coeff.as_str()) {
                            (0, _) => coeff,
                            (1, "1") => "[x]".to_string(),
                            (_, "1") => format!("[x]^{d}"),
                            _ => format!("{coeff}*[x]^{d}"),
                        }
                    })
                    .collect();
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            }
            Kind::Exponential(b) => format!("({})^x", short(b)),
            Kind::MixedProduct { a, n, .. } => format!("rho^({a}x)*[x]^{n}"),
            Kind::Mahler(s) => format!("mahler(M={})", s.order()),
            Kind::Combination(parts) => parts
                .iter()
                .map(|(c, f)| format!("{}*({})", short(c), f.label()))
                .collect::<Vec<_>>()
                .join(" + "),
            Kind::Product(a, b) => format!("({})*({})", a.label(), b.label()),
            Kind::Affine { inner, offset, level } => {
                format!("({})({} + {}^{}*y)", inner.label(), offset, self.prime, level)
            }
            Kind::Quasi(q) => format!("quasi({} terms)", q.terms().len()),
            Kind::Pointwise { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, x: u128) -> PadicNumber {
        let p = self.prime;
        match &*self.kind {
            Kind::Polynomial(c) => {
                let xp = PadicNumber::from_u128(x, p, self.precision.max(1));
                horner(c, &xp)
            }
            Kind::RhoQPolynomial {
                params,
                coefficients,
            } => horner(coefficients, &rhoq_integer(x, params)),
            Kind::Exponential(b) => b.pow_big(&BigUint::from(x)),
            Kind::MixedProduct { params, a, n } => {
                let rx = params.rho().pow_big(&BigUint::from(x));
                let rax = if *a >= 0 {
                    rx.pow(*a as u64)
                } else {
                    rx.inverse().expect("unit").pow(a.unsigned_abs())
                };
                &rax * &rhoq_integer(x, params).pow(*n as u64)
            }
            Kind::Mahler(s) => mahler_evaluate(s, x),
            Kind::Combination(parts) => parts
                .iter()
                .map(|(c, f)| c * &f.eval(x))
                .sum(),
            Kind::Product(a, b) => &a.eval(x) * &b.eval(x),
            Kind::Affine { inner, offset, level } => {
                let y = (self.prime as u128)
                    .checked_pow(*level)
                    .and_then(|s| s.checked_mul(x))
                    .and_then(|s| s.checked_add(*offset))
                    .expect("argument overflow");
                inner.eval(y)
            }
            Kind::Quasi(q) => q.eval(x),
            Kind::Pointwise { f, .. } => f(x),
        }
    }

    /// The quasi-polynomial form `Σ c x^d e^x`, when the function has one.
    pub fn to_quasi(&self) -> Option<&QuasiPolynomial> {
        self.quasi.get_or_init(|| self.build_quasi()).as_ref()
    }

    fn build_quasi(&self) -> Option<QuasiPolynomial> {
        let p = self.prime;
        let prec = self.precision.max(1);
        let one = PadicNumber::one(p, prec);
        Some(match &*self.kind {
            Kind::Polynomial(c) => {
                let mut q = QuasiPolynomial::zero(p, prec);
                for (d, v) in c.iter().enumerate() {
                    q = q.add(&QuasiPolynomial::term(v.clone(), d as u32, one.clone()));
                }
                q
            }
            Kind::RhoQPolynomial {
                params,
                coefficients,
            } => {
                let b = bracket_quasi(params, 0);
                let mut q = QuasiPolynomial::zero(p, prec);
                let mut power = QuasiPolynomial::constant(one.clone());
                for c in coefficients {
                    q = q.add(&power.scale(c));
                    power = power.mul(&b);
                }
                q
            }
            Kind::Exponential(b) => QuasiPolynomial::term(one.clone(), 0, b.clone()),
            Kind::MixedProduct { params, a, n } => {
                let base = crate::rhoq::rhoq_power_int(params.rho(), *a as i128);
                QuasiPolynomial::term(params.one(), 0, base).mul(&bracket_quasi(params, 0).pow(*n))
            }
            Kind::Mahler(s) => {
                let mut q = QuasiPolynomial::zero(p, prec);
                for (n, a) in s.coefficients().iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    q = q.add(&gaussian_binomial_quasi(s.params(), n as u32).ok()?.scale(a));
                }
                q
            }
            Kind::Combination(parts) => {
                let mut q = QuasiPolynomial::zero(p, prec);
                for (c, f) in parts {
                    q = q.add(&f.to_quasi()?.scale(c));
                }
                q
            }
            Kind::Product(a, b) => a.to_quasi()?.mul(b.to_quasi()?),
            Kind::Affine { inner, offset, level } => inner.to_quasi()?.compose_affine(*offset, *level),
            Kind::Quasi(q) => q.clone(),
            Kind::Pointwise { .. } => return None,
        })
    }
}

fn short(v: &PadicNumber) -> String {
    match v.signed_residue() {
        Ok(r) if r.bits() < 40 => r.to_string(),
        _ => v.to_string(),
    }
}

fn horner(coefficients: &[PadicNumber], x: &PadicNumber) -> PadicNumber {
    let mut acc = coefficients.last().cloned().expect("nonempty coefficients");
    for c in coefficients.iter().rev().skip(1) {
        acc = &(&acc * x) + c;
    }
    acc
}

/// `[x - j]_{ρ,q}` as a quasi-polynomial in `x`.
pub fn bracket_quasi(params: &RhoQParams, j: u32) -> QuasiPolynomial {
    let rho = params.rho();
    let q = params.q();
    let rho_inv_j = crate::rhoq::rhoq_power_int(rho, -(j as i128));
    if params.is_symmetric() {
        // (x - j) ρ^{x - j - 1}
        let c = &rho_inv_j * &rho.inverse().expect("unit");
        let minus_j = params.int(-(j as i64));
        QuasiPolynomial::term(c.clone(), 1, rho.clone())
            .add(&QuasiPolynomial::term(&c * &minus_j, 0, rho.clone()))
    } else {
        let d = (rho - q).inverse().expect("rho != q");
        let q_inv_j = crate::rhoq::rhoq_power_int(q, -(j as i128));
        QuasiPolynomial::term(&rho_inv_j * &d, 0, rho.clone())
            .sub(&QuasiPolynomial::term(&q_inv_j * &d, 0, q.clone()))
    }
}

/// `{x brack n}_{ρ,q} = Π_{j<n} [x - j] / [n]!` as a quasi-polynomial.
pub fn gaussian_binomial_quasi(params: &RhoQParams, n: u32) -> Result<QuasiPolynomial> {
    let mut q = QuasiPolynomial::constant(params.one());
    for j in 0..n {
        q = q.mul(&bracket_quasi(params, j));
    }
    let inv = params.factorial(n as usize).inverse()?;
    Ok(q.scale(&inv))
}

//! Expansions `f(x) = Σ a_n {x brack n}_{ρ,q}` in the Gaussian binomial basis.
//!
//! Coefficients come from forward substitution on the values `f(0..=M)`:
//! the basis matrix `{i brack n}` is lower triangular with unit diagonal,
//! so no division happens during the solve.

use serde::Serialize;

use crate::error::{PadicError, Result};
use crate::integration::IntegrableFunction;
use crate::padic::{Norm, PadicNumber};
use crate::rhoq::{rhoq_binomial, rhoq_integer, RhoQParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MahlerBasis {
    /// `C(x, n)`, the `ρ = q = 1` case.
    Classical,
    Gaussian,
}

#[derive(Clone, Debug)]
pub struct MahlerSeries {
    params: RhoQParams,
    coefficients: Vec<PadicNumber>,
    basis: MahlerBasis,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientEntry {
    pub n: usize,
    pub value: PadicNumber,
    pub norm: Norm,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayProfile {
    pub norms: Vec<Norm>,
    /// First index from which `|a_n|` never increases again.
    pub monotone_from: usize,
    /// First index from which `|a_n| <= p^{-floor(n/p)}` holds on the computed range.
    pub envelope_from: Option<usize>,
}

impl MahlerSeries {
    pub fn new(params: &RhoQParams, coefficients: Vec<PadicNumber>) -> Self {
        let one = params.one();
        let basis = if params.rho() == &one && params.q() == &one {
            MahlerBasis::Classical
        } else {
            MahlerBasis::Gaussian
        };
        MahlerSeries {
            params: params.clone(),
            coefficients,
            basis,
        }
    }

    pub fn params(&self) -> &RhoQParams {
        &self.params
    }

    pub fn coefficients(&self) -> &[PadicNumber] {
        &self.coefficients
    }

    pub fn basis(&self) -> MahlerBasis {
        self.basis
    }

    /// Highest index `M` (the series has `M + 1` coefficients).
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn precision(&self) -> i64 {
        self.coefficients
            .iter()
            .map(|c| c.precision())
            .min()
            .unwrap_or(self.params.precision())
    }

    pub fn entries(&self) -> Vec<CoefficientEntry> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, c)| CoefficientEntry {
                n,
                value: c.clone(),
                norm: c.norm(),
            })
            .collect()
    }

    pub fn truncated(&self, m: usize) -> MahlerSeries {
        let keep = (m + 1).min(self.coefficients.len());
        MahlerSeries {
            params: self.params.clone(),
            coefficients: self.coefficients[..keep].to_vec(),
            basis: self.basis,
        }
    }

    /// `sup_{n >= m} |a_n|` over the computed range.
    pub fn tail_norm(&self, m: usize) -> Norm {
        self.coefficients
            .iter()
            .skip(m)
            .map(|c| c.norm())
            .max()
            .unwrap_or_else(|| Norm::zero(self.params.prime()))
    }

    pub fn decay_profile(&self) -> DecayProfile {
        let p = self.params.prime();
        let norms: Vec<Norm> = self.coefficients.iter().map(|c| c.norm()).collect();
        let mut monotone_from = norms.len();
        for i in (0..norms.len()).rev() {
            if i + 1 < norms.len() && norms[i + 1] > norms[i] {
                break;
            }
            monotone_from = i;
        }
        let mut envelope_from = None;
        for i in (0..norms.len()).rev() {
            let bound = Norm::from_valuation(p, (i as u64 / p) as i64);
            if norms[i] <= bound {
                envelope_from = Some(i);
            } else {
                break;
            }
        }
        DecayProfile {
            norms,
            monotone_from,
            envelope_from,
        }
    }
}

impl Serialize for MahlerSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MahlerSeries", 3)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("basis", &self.basis)?;
        st.serialize_field("coefficients", &self.entries())?;
        st.end()
    }
}

/// Solves `Σ_n a_n {i brack n} = f(i)` for `i = 0..=m`.
pub fn mahler_coefficients(f: &IntegrableFunction, m: usize, params: &RhoQParams) -> Result<MahlerSeries> {
    if f.prime() != params.prime() {
        return Err(PadicError::PrimeMismatch(f.prime(), params.prime()));
    }
    let values: Vec<PadicNumber> = (0..=m as u128).map(|i| f.eval(i)).collect();
    mahler_from_values(&values, params)
}

pub fn mahler_from_values(values: &[PadicNumber], params: &RhoQParams) -> Result<MahlerSeries> {
    let m = values.len();
    let mut a: Vec<PadicNumber> = Vec::with_capacity(m);
    for i in 0..m {
        let mut r = values[i].clone();
        for (n, an) in a.iter().enumerate() {
            r = &r - &(an * &rhoq_binomial(i as u128, n as u128, params));
        }
        if r.precision() <= 0 {
            return Err(PadicError::PrecisionExhausted {
                operation: "mahler substitution".into(),
                remaining: r.precision(),
            });
        }
        a.push(r);
    }
    Ok(MahlerSeries::new(params, a))
}

/// `Σ_n a_n {x brack n}`, with `{x brack n}` built as `Π_{j<n} [x-j] / [n]!`.
pub fn mahler_evaluate(s: &MahlerSeries, x: u128) -> PadicNumber {
    let params = &s.params;
    let mut total = PadicNumber::zero(params.prime(), s.precision().max(1));
    let mut falling = params.one();
    for (n, a) in s.coefficients.iter().enumerate() {
        if n as u128 > x {
            break;
        }
        if n > 0 {
            falling = &falling * &rhoq_integer(x - (n as u128 - 1), params);
        }
        let basis = falling
            .div(&params.factorial(n))
            .expect("nonzero factorial");
        total = &total + &(a * &basis);
    }
    total
}

/// The partial sum `f_m` as a function usable by the integration routines.
pub fn truncation_polynomial(s: &MahlerSeries, m: usize) -> IntegrableFunction {
    IntegrableFunction::mahler(s.truncated(m))
}

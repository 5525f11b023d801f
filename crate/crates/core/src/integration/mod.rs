//! Volkenborn-type integrals against the `(ρ,q)`-Haar distribution.
//!
//! The level-`N` approximant of `∫ f dμ_{ρ,q}` is
//!
//! ```text
//! A_N = ρ^{p^N} / [p^N]_{ρ,q} · Σ_{x < p^N} f(x) (q/ρ)^x
//! ```
//!
//! Two routes compute it: a pointwise sum (any function) and a closed form
//! through the moment recursion (quasi-polynomial functions only). They share
//! no code beyond the final scaling, so each checks the other.

pub mod function;
pub mod quasi;
pub mod sequence;

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

pub use function::{IntegrableFunction, Kind};
pub use quasi::{QuasiPolynomial, QuasiTerm};
pub use sequence::ApproximantSequence;

use crate::error::{PadicError, Result};
use crate::measure::{lipschitz_estimate, Ball};
use crate::padic::{pow_p, Norm, PadicNumber, PrecisionBudget};
use crate::rhoq::{rhoq_power_int, RhoQParams};

/// Largest number of summands the pointwise route accepts.
pub const DIRECT_LIMIT: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Direct,
    ClosedForm,
    /// Closed form when available, pointwise otherwise.
    Auto,
}

fn pointwise_sum(
    f: &IntegrableFunction,
    weight: &PadicNumber,
    start: u128,
    step: u128,
    count: u128,
) -> Result<PadicNumber> {
    if count > DIRECT_LIMIT {
        return Err(PadicError::InvalidArgument(format!(
            "pointwise sum over {count} points exceeds the limit {DIRECT_LIMIT}"
        )));
    }
    let p = f.prime();
    let chunk = 1024u128;
    let chunks = count.div_ceil(chunk);
    let step_w = weight.pow_big(&step.into());
    let partial: Vec<PadicNumber> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(count);
            let mut w = weight.pow_big(&(start + lo * step).into());
            let mut acc = PadicNumber::zero(p, weight.precision());
            for k in lo..hi {
                acc = &acc + &(&f.eval(start + k * step) * &w);
                w = &w * &step_w;
            }
            acc
        })
        .collect();
    Ok(partial
        .into_iter()
        .fold(PadicNumber::zero(p, weight.precision()), |a, b| &a + &b))
}

/// `ρ^{p^N}/[p^N] · sum`, logging the division.
fn haar_scale(params: &RhoQParams, level: u32, sum: &PadicNumber, budget: &mut PrecisionBudget) -> Result<PadicNumber> {
    let (rho_pn, _) = params.tower_powers(level);
    budget.div("divide by [p^N]", &(&rho_pn * sum), &params.bracket_p_pow(level))
}

/// The level-`N` approximant by direct summation.
pub fn volkenborn_level_direct(f: &IntegrableFunction, params: &RhoQParams, level: u32) -> Result<(PadicNumber, PrecisionBudget)> {
    let mut budget = PrecisionBudget::new(params.precision());
    let count = params.p_pow(level)?;
    let sum = pointwise_sum(f, params.ratio(), 0, 1, count)?;
    Ok((haar_scale(params, level, &sum, &mut budget)?, budget))
}

/// Approximants at every level in `levels`.
pub fn volkenborn_integral(
    f: &IntegrableFunction,
    params: &RhoQParams,
    levels: RangeInclusive<u32>,
    target: i64,
) -> Result<ApproximantSequence> {
    volkenborn_integral_with(f, params, levels, target, Strategy::Auto)
}

pub fn volkenborn_integral_with(
    f: &IntegrableFunction,
    params: &RhoQParams,
    levels: RangeInclusive<u32>,
    target: i64,
    strategy: Strategy,
) -> Result<ApproximantSequence> {
    let mut seq = ApproximantSequence::new(target);
    let quasi = match strategy {
        Strategy::Direct => None,
        Strategy::ClosedForm => Some(f.to_quasi().ok_or_else(|| {
            PadicError::InvalidArgument(format!("{} has no closed form", f.label()))
        })?),
        Strategy::Auto => f.to_quasi(),
    };
    match quasi {
        Some(q) => {
            let sums = q.level_sums(params.ratio(), *levels.end());
            for n in levels {
                let mut budget = PrecisionBudget::new(params.precision());
                let v = haar_scale(params, n, &sums[n as usize], &mut budget)?;
                seq.push(n, v);
            }
        }
        None => {
            for n in levels {
                let (v, _) = volkenborn_level_direct(f, params, n)?;
                seq.push(n, v);
            }
        }
    }
    Ok(seq)
}

/// `β_{n:a}(ρ,q) = ∫ ρ^{ax} [x]^n dμ_{ρ,q}` as an approximant sequence.
pub fn carlitz_bernoulli(
    n: u32,
    a: i64,
    params: &RhoQParams,
    levels: RangeInclusive<u32>,
    target: i64,
) -> Result<ApproximantSequence> {
    let f = IntegrableFunction::mixed_product(params, a, n);
    volkenborn_integral(&f, params, levels, target)
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaZeroComparison {
    pub k: i64,
    /// Limit of the approximants of `∫ ρ^{kx} dμ`.
    pub measured: Option<PadicNumber>,
    /// `F(ρ,q) · log r/(r - 1)` with `r = ρ^{k-1} q`, the exact limit of the geometric sums.
    pub log_closed_form: Option<PadicNumber>,
    /// `k log ρ / log(ρq)`.
    pub log_ratio: Option<PadicNumber>,
    pub measured_matches_closed_form: Option<bool>,
    pub measured_matches_log_ratio: Option<bool>,
}

/// Closed-form limit of `∫ ρ^{kx} dμ_{ρ,q}`.
///
/// With `r = ρ^k q/ρ` the level sums are geometric, and
/// `(r^{p^N} - 1)/p^N -> log r`, `(ρ^{p^N} - q^{p^N})/p^N -> log ρ - log q`.
pub fn beta_zero_closed_form(k: i64, params: &RhoQParams) -> Result<PadicNumber> {
    let rho = params.rho();
    let q = params.q();
    let r = &rhoq_power_int(rho, k as i128) * params.ratio();
    let one = params.one();
    let factor = if params.is_symmetric() {
        rho.clone()
    } else {
        (rho - q).div(&(&rho.log()? - &q.log()?))?
    };
    let geometric = if (&r - &one).is_zero() {
        one
    } else {
        r.log()?.div(&(&r - &one))?
    };
    Ok(&factor * &geometric)
}

pub fn beta_zero_log_ratio(k: i64, params: &RhoQParams) -> Result<PadicNumber> {
    let rho = params.rho();
    let den = (rho * params.q()).log()?;
    if den.is_zero() {
        return Err(PadicError::DivisionByZero);
    }
    (&params.int(k) * &rho.log()?).div(&den)
}

pub fn compare_beta_zero(
    k: i64,
    params: &RhoQParams,
    levels: RangeInclusive<u32>,
    target: i64,
) -> Result<BetaZeroComparison> {
    let seq = carlitz_bernoulli(0, k, params, levels, target)?;
    let measured = seq.best_estimate().cloned();
    let closed = beta_zero_closed_form(k, params).ok();
    let log_ratio = beta_zero_log_ratio(k, params).ok();
    let agree = |a: &Option<PadicNumber>, b: &Option<PadicNumber>| match (a, b) {
        (Some(a), Some(b)) => {
            let t = a.precision().min(b.precision()).min(target);
            Some(a.congruent(b, t))
        }
        _ => None,
    };
    Ok(BetaZeroComparison {
        k,
        measured_matches_closed_form: agree(&measured, &closed),
        measured_matches_log_ratio: agree(&measured, &log_ratio),
        measured,
        log_closed_form: closed,
        log_ratio,
    })
}

/// `μ̃_f(a + p^N Z_p)` at outer level `M = N + inner` by the restricted sum
/// `ρ^{p^M}/[p^M] Σ_{x < p^M, x ≡ a} f(x)(q/ρ)^x`.
pub fn weighted_measure_direct(
    f: &IntegrableFunction,
    params: &RhoQParams,
    ball: &Ball,
    inner: u32,
) -> Result<(PadicNumber, PrecisionBudget)> {
    let big_m = ball.level + inner;
    let step = params.p_pow(ball.level)?;
    let count = params.p_pow(inner)?;
    let sum = pointwise_sum(f, params.ratio(), ball.representative, step, count)?;
    let mut budget = PrecisionBudget::new(params.precision());
    let v = haar_scale(params, big_m, &sum, &mut budget)?;
    Ok((v, budget))
}

/// Inner integrals `J_L = ∫ f(a + p^N y) dμ_{ρ^{p^N}, q^{p^N}}(y)` at levels `1..=max_inner`.
fn lifted_inner_terms(
    f: &IntegrableFunction,
    params: &RhoQParams,
    ball: &Ball,
    max_inner: u32,
    lenient: bool,
) -> Result<Vec<(PadicNumber, PrecisionBudget)>> {
    let lifted = params.lifted(ball.level);
    let g = f.affine(ball.representative, ball.level);
    let mut out = Vec::with_capacity(max_inner as usize);
    match g.to_quasi() {
        Some(q) => {
            let loss = (params.precision() - q.precision()).max(0);
            let sums = q.level_sums(lifted.ratio(), max_inner);
            for l in 1..=max_inner {
                let mut budget = PrecisionBudget::new(params.precision());
                if loss > 0 {
                    budget.record("closed form conversion", loss);
                }
                match haar_scale(&lifted, l, &sums[l as usize], &mut budget) {
                    Ok(v) => out.push((v, budget)),
                    // a low-precision closed form runs out of digits before the cap
                    Err(PadicError::PrecisionExhausted { .. }) if lenient && !out.is_empty() => break,
                    Err(e) => return Err(e),
                }
            }
        }
        None => {
            for l in 1..=max_inner {
                let mut budget = PrecisionBudget::new(params.precision());
                let count = lifted.p_pow(l)?;
                let sum = pointwise_sum(&g, lifted.ratio(), 0, 1, count)?;
                let v = haar_scale(&lifted, l, &sum, &mut budget)?;
                out.push((v, budget));
            }
        }
    }
    Ok(out)
}

/// Result of the lifted evaluation of one ball.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedValue {
    /// `μ̃_f(ball)`.
    pub value: PadicNumber,
    /// `[p^N] μ̃_f(ball) = (q/ρ)^a J`.
    pub rescaled: PadicNumber,
    /// The inner sequence `J_L`.
    pub inner: ApproximantSequence,
    pub converged: bool,
}

/// `μ̃_f(a + p^N Z_p)` via `(q/ρ)^a/[p^N] · ∫ f(a + p^N y) dμ_{ρ^{p^N},q^{p^N}}(y)`,
/// with the inner limit taken until it is stable modulo `p^target`.
pub fn weighted_measure_lifted(
    f: &IntegrableFunction,
    params: &RhoQParams,
    ball: &Ball,
    target: i64,
    max_inner: u32,
) -> Result<WeightedValue> {
    let terms = lifted_inner_terms(f, params, ball, max_inner, true)?;
    let inner = ApproximantSequence::from_terms(target, (1..).zip(terms.into_iter().map(|(v, _)| v)));
    let converged = inner.converged_at().is_some();
    let j = inner.best_estimate().cloned().expect("at least one inner level");
    let lead = params.ratio().pow_big(&ball.representative.into());
    let rescaled = &lead * &j;
    let value = rescaled.div(&params.bracket_p_pow(ball.level))?;
    Ok(WeightedValue {
        value,
        rescaled,
        inner,
        converged,
    })
}

/// The lifted route at one fixed inner level, for level-matched comparison
/// with [`weighted_measure_direct`].
pub fn weighted_measure_lifted_at(
    f: &IntegrableFunction,
    params: &RhoQParams,
    ball: &Ball,
    inner: u32,
) -> Result<(PadicNumber, PrecisionBudget)> {
    let terms = lifted_inner_terms(f, params, ball, inner, false)?;
    let (j, mut budget) = terms.last().expect("inner >= 1").clone();
    let lead = params.ratio().pow_big(&ball.representative.into());
    let v = budget.div("divide by [p^N]", &(&lead * &j), &params.bracket_p_pow(ball.level))?;
    Ok((v, budget))
}

/// Whether `a` and `b` agree to the absolute precision both budgets still guarantee.
pub fn agree_within_budget(a: &PadicNumber, b: &PadicNumber, budget_a: &PrecisionBudget, budget_b: &PrecisionBudget) -> bool {
    let t = budget_a.achieved_precision().min(budget_b.achieved_precision());
    a.congruent(b, t)
}

/// Default inner level cap for a given target.
pub fn default_inner_cap(target: i64) -> u32 {
    (target.max(1) + 4) as u32
}

/// `μ̃_f(ball)` by the lifted route with the default inner cap.
pub fn weighted_measure(f: &IntegrableFunction, params: &RhoQParams, ball: &Ball, target: i64) -> Result<PadicNumber> {
    Ok(weighted_measure_lifted(f, params, ball, target, default_inner_cap(target))?.value)
}

/// Density form of `μ̃_P` at level `n`: a quasi-polynomial `Φ_n` with
/// `μ̃_P(i + p^n Z_p) = Φ_n(i)` for every `i`.
pub fn weighted_density(
    p_fn: &IntegrableFunction,
    params: &RhoQParams,
    level: u32,
    target: i64,
) -> Result<QuasiPolynomial> {
    let pq = p_fn.to_quasi().ok_or_else(|| {
        PadicError::InvalidArgument(format!("{} has no closed form", p_fn.label()))
    })?;
    let prime = params.prime();
    let prec = params.precision();
    let lifted = params.lifted(level);
    // the coefficients and the later sum over p^n balls both eat digits
    let neg = pq.terms().iter().map(|t| -t.coeff.valuation_bound()).max().unwrap_or(0).max(0);
    let target = target + 2 * level as i64 + neg + 2;
    let cap = default_inner_cap(target);
    let bracket_inv = params.bracket_p_pow(level).inverse()?;
    let pn = PadicNumber::from_bigint_unchecked(&pow_p(prime, level as i64).into(), prime, prec + level as i64);
    let mut terms = Vec::new();
    for t in pq.terms() {
        let lifted_base = t.base.pow_big(&pow_p(prime, level as i64));
        let w = &lifted_base * lifted.ratio();
        let moments = quasi::moment_sums(&w, t.degree, cap);
        let mut binom = 1u128;
        for s in 0..=t.degree {
            // B(s) = lim_L ρ'^{p^L}/[p^L]' S_s(L)
            let mut seq = ApproximantSequence::new(target);
            for l in 1..=cap {
                let mut budget = PrecisionBudget::new(prec);
                let v = haar_scale(&lifted, l, &moments[l as usize][s as usize], &mut budget)?;
                if seq.push(l, v) {
                    break;
                }
            }
            let b = seq.best_estimate().cloned().expect("nonempty");
            let c = PadicNumber::from_u128(binom, prime, prec + 1);
            let coeff = &(&(&(&t.coeff * &c) * &pn.pow(s as u64)) * &b) * &bracket_inv;
            terms.push(QuasiTerm {
                coeff,
                degree: t.degree - s,
                base: &t.base * params.ratio(),
            });
            binom = binom * (t.degree - s) as u128 / (s + 1) as u128;
        }
    }
    Ok(QuasiPolynomial::from_terms(prime, prec, terms))
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralIdentity {
    pub g: String,
    pub weight: String,
    /// `∫ g dμ̃_P`.
    pub lhs: ApproximantSequence,
    /// `∫ g P dμ`.
    pub rhs: ApproximantSequence,
    pub ratio: Option<PadicNumber>,
}

/// `∫ g dμ̃_P` by Riemann sums `Σ_{i<p^n} g(i) μ̃_P(i + p^n Z_p)`.
pub fn integral_against_weighted(
    g: &IntegrableFunction,
    p_fn: &IntegrableFunction,
    params: &RhoQParams,
    levels: RangeInclusive<u32>,
    target: i64,
) -> Result<IntegralIdentity> {
    let mut lhs = ApproximantSequence::new(target);
    let gq = g.to_quasi();
    for n in levels.clone() {
        let v = match gq {
            Some(gq) if p_fn.to_quasi().is_some() => {
                let density = weighted_density(p_fn, params, n, target)?;
                let prod = gq.mul(&density);
                let one = params.one();
                prod.level_sums(&one, n)[n as usize].clone()
            }
            _ => riemann_sum_pointwise(g, p_fn, params, n, target)?,
        };
        lhs.push(n, v);
    }
    let gp = IntegrableFunction::product(g, p_fn);
    let rhs = volkenborn_integral(&gp, params, levels, target)?;
    let ratio = match (lhs.best_estimate(), rhs.best_estimate()) {
        (Some(l), Some(r)) if !r.is_zero() => l.div(r).ok(),
        _ => None,
    };
    Ok(IntegralIdentity {
        g: g.label(),
        weight: p_fn.label(),
        lhs,
        rhs,
        ratio,
    })
}

/// The Riemann sum at level `n` ball by ball.
pub fn riemann_sum_pointwise(
    g: &IntegrableFunction,
    p_fn: &IntegrableFunction,
    params: &RhoQParams,
    n: u32,
    target: i64,
) -> Result<PadicNumber> {
    let count = params.p_pow(n)?;
    if count > 1 << 12 {
        return Err(PadicError::InvalidArgument(format!(
            "ball-by-ball Riemann sum over {count} balls is too large"
        )));
    }
    let parts: Vec<Result<PadicNumber>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let ball = Ball::new(i, n, params.prime())?;
            let mu = weighted_measure(p_fn, params, &ball, target)?;
            Ok(&g.eval(i) * &mu)
        })
        .collect();
    let mut acc = PadicNumber::zero(params.prime(), params.precision());
    for v in parts {
        acc = &acc + &v?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct GridNorms {
    pub grid_level: u32,
    pub sup: Norm,
    pub difference_quotient: Norm,
    /// `max(sup, difference_quotient)`.
    pub lipschitz: Norm,
}

/// `‖f‖_∞`, `‖Δ₁f‖_∞` and `‖f‖₁` as maxima over `0 <= x < p^G`.
pub fn grid_norms(f: &IntegrableFunction, grid_level: u32) -> Result<GridNorms> {
    let count = (f.prime() as u128)
        .checked_pow(grid_level)
        .ok_or_else(|| PadicError::Overflow("grid size".into()))?;
    let values: Vec<(u128, PadicNumber)> = (0..count).into_par_iter().map(|x| (x, f.eval(x))).collect();
    let sup = values
        .iter()
        .map(|(_, v)| v.norm())
        .max()
        .unwrap_or_else(|| Norm::zero(f.prime()));
    let dq = lipschitz_estimate(&values)?;
    Ok(GridNorms {
        grid_level,
        sup,
        difference_quotient: dq,
        lipschitz: sup.max(dq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kr: i64, kq: i64) -> RhoQParams {
        RhoQParams::from_offsets(5, kr, kq, 40).unwrap()
    }

    #[test]
    fn classical_identity_integral() {
        let pr = RhoQParams::classical(5, 30).unwrap();
        let f = IntegrableFunction::monomial(1, 5, 30);
        let seq = volkenborn_integral(&f, &pr, 1..=12, 10).unwrap();
        for (n, v) in seq.terms() {
            let want = PadicNumber::from_integer((5i64.pow(*n) - 1) / 2, 5, 30).unwrap();
            assert!(v.congruent(&want, v.precision()));
        }
        let half = PadicNumber::from_rational(-1, 2, 5, 10).unwrap();
        assert_eq!(seq.declared_limit(), Some(&half));
    }

    #[test]
    fn classical_square_gives_one_sixth() {
        let pr = RhoQParams::classical(5, 30).unwrap();
        let f = IntegrableFunction::monomial(2, 5, 30);
        let seq = volkenborn_integral(&f, &pr, 1..=10, 8).unwrap();
        let sixth = PadicNumber::from_rational(1, 6, 5, 8).unwrap();
        assert_eq!(seq.declared_limit(), Some(&sixth));
        // Faulhaber: Σ_{x<p^N} x^2 = p^N (p^N - 1)(2 p^N - 1)/6
        for (n, v) in seq.terms() {
            let pn = 5i64.pow(*n);
            let want = PadicNumber::from_rational((pn - 1) * (2 * pn - 1), 6, 5, 20).unwrap();
            assert!(v.congruent(&want, 20 - *n as i64));
        }
    }

    #[test]
    fn closed_form_and_direct_agree() {
        for (kr, kq) in [(1, 2), (2, 2), (0, 3)] {
            let pr = params(kr, kq);
            let fs = [
                IntegrableFunction::rhoq_power_of_x(&pr, 2),
                IntegrableFunction::ratio_power(&pr),
                IntegrableFunction::mixed_product(&pr, 1, 1),
            ];
            for f in &fs {
                let a = volkenborn_integral_with(f, &pr, 1..=4, 10, Strategy::Direct).unwrap();
                let b = volkenborn_integral_with(f, &pr, 1..=4, 10, Strategy::ClosedForm).unwrap();
                for ((_, x), (_, y)) in a.terms().iter().zip(b.terms()) {
                    let t = x.precision().min(y.precision());
                    assert!(x.congruent(y, t - 2), "{}", f.label());
                }
            }
        }
    }

    #[test]
    fn constant_integrates_to_rho() {
        let pr = params(3, 1);
        let one = IntegrableFunction::constant(pr.one());
        let seq = volkenborn_integral(&one, &pr, 1..=5, 20).unwrap();
        for (_, v) in seq.terms() {
            assert!(v.congruent(pr.rho(), v.precision()));
        }
        assert!(seq.cauchy_rates().iter().all(Norm::is_zero));
    }

    #[test]
    fn q_only_degeneration() {
        // ρ = 1: (1/[p^N]_q) Σ f(x) q^x
        let pr = params(0, 2);
        let q = pr.q().clone();
        let f = IntegrableFunction::monomial(2, 5, 40);
        let seq = volkenborn_integral(&f, &pr, 1..=3, 10).unwrap();
        for (n, v) in seq.terms() {
            let pn = 5u64.pow(*n);
            let mut s = pr.zero();
            let mut qx = pr.one();
            for x in 0..pn {
                s = &s + &(&pr.int((x * x) as i64) * &qx);
                qx = &qx * &q;
            }
            let one = pr.one();
            let qn = (&one - &q.pow(pn)).div(&(&one - &q)).unwrap();
            let want = s.div(&qn).unwrap();
            assert!(v.congruent(&want, want.precision().min(v.precision())));
        }
    }

    #[test]
    fn beta_zero_closed_form_matches_limit() {
        for (kr, kq, k) in [(1, 2, 0), (1, 2, 2), (2, 2, 1), (3, 1, -1)] {
            let pr = params(kr, kq);
            let c = compare_beta_zero(k, &pr, 1..=30, 12).unwrap();
            assert_eq!(c.measured_matches_closed_form, Some(true), "k={k}");
        }
        let pr = params(1, 2);
        let c = compare_beta_zero(0, &pr, 1..=20, 10).unwrap();
        assert!(c.measured.unwrap().congruent(pr.rho(), 10));
    }

    #[test]
    fn direct_and_lifted_match_at_equal_levels() {
        let pr = params(1, 2);
        let f = IntegrableFunction::rhoq_power_of_x(&pr, 2);
        for (a, n) in [(3u128, 1u32), (17, 2), (0, 2)] {
            let ball = Ball::new(a, n, 5).unwrap();
            let (d, bd) = weighted_measure_direct(&f, &pr, &ball, 3).unwrap();
            let (l, bl) = weighted_measure_lifted_at(&f, &pr, &ball, 3).unwrap();
            assert!(agree_within_budget(&d, &l, &bd, &bl), "{d} vs {l}");
        }
    }

    #[test]
    fn density_matches_ball_values() {
        let pr = params(1, 2);
        let f = IntegrableFunction::rhoq_power_of_x(&pr, 2);
        let phi = weighted_density(&f, &pr, 2, 12).unwrap();
        for i in [0u128, 4, 13, 24] {
            let ball = Ball::new(i, 2, 5).unwrap();
            let direct = weighted_measure(&f, &pr, &ball, 12).unwrap();
            assert!(phi.eval(i).congruent(&direct, 12 - 2), "i={i} {} vs {direct}", phi.eval(i));
        }
    }

    #[test]
    fn riemann_routes_agree() {
        let pr = params(1, 2);
        let g = IntegrableFunction::monomial(1, 5, 40);
        let pf = IntegrableFunction::rhoq_power_of_x(&pr, 1);
        let id = integral_against_weighted(&g, &pf, &pr, 1..=2, 12).unwrap();
        for (n, v) in id.lhs.terms() {
            let w = riemann_sum_pointwise(&g, &pf, &pr, *n, 12).unwrap();
            assert!(v.congruent(&w, 12 - 2 * *n as i64));
        }
    }

    #[test]
    fn grid_norms_of_simple_functions() {
        let x = IntegrableFunction::monomial(1, 5, 10);
        let n = grid_norms(&x, 2).unwrap();
        assert_eq!(n.sup, Norm::one(5));
        assert_eq!(n.difference_quotient, Norm::one(5));
        let c = IntegrableFunction::constant(PadicNumber::from_integer(25, 5, 10).unwrap());
        let nc = grid_norms(&c, 2).unwrap();
        assert!(nc.difference_quotient.is_zero());
        assert_eq!(nc.lipschitz, Norm::from_valuation(5, 2));
    }
}

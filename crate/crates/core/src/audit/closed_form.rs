//! Weighted measures of `[x]^k`: strong invariance, the derivative
//! `(q/ρ)^x [x]^k`, the integral identity and the splitting expansion.

use rayon::prelude::*;

use super::{AuditConfig, AuditReport, CheckRecord, SequenceTable, Theorem, Verdict};
use crate::error::Result;
use crate::integration::{carlitz_bernoulli, compare_beta_zero, integral_against_weighted, IntegrableFunction};
use crate::measure::{check_invariance, radon_nikodym_until, InvarianceKind, InvarianceOptions, WeightedDistribution};
use crate::padic::PadicNumber;
use crate::rhoq::{rhoq_integer, RhoQParams};

const RATIO_POINTS: usize = 16;
const MAX_K: u32 = 3;

fn g_battery(params: &RhoQParams) -> Vec<IntegrableFunction> {
    let p = params.prime();
    let w = params.precision();
    vec![
        IntegrableFunction::constant(params.one()),
        IntegrableFunction::monomial(1, p, w),
        IntegrableFunction::monomial(2, p, w),
        IntegrableFunction::ratio_power(params),
    ]
}

fn binomial(k: u32, l: u32) -> i64 {
    (0..l).fold(1i64, |acc, j| acc * (k - j) as i64 / (j + 1) as i64)
}

/// Both sides of `[a + i p^n]^k = Σ_l C(k,l) q^{al} [p^n]^l [i]'^l ρ^{i p^n (k-l)} [a]^{k-l}`.
fn splitting_sides(params: &RhoQParams, k: u32, a: u128, i: u128, n: u32) -> (PadicNumber, PadicNumber) {
    let pn = (params.prime() as u128).pow(n);
    let lhs = rhoq_integer(a + i * pn, params).pow(k as u64);
    let lifted = params.lifted(n);
    let bracket = params.bracket_p_pow(n);
    let inner = rhoq_integer(i, &lifted);
    let ra = rhoq_integer(a, params);
    let qa = params.q().pow_big(&a.into());
    let rho_shift = params.rho().pow_big(&(i * pn).into());
    let mut rhs = params.zero();
    for l in 0..=k {
        let term = &(&(&(&(&params.int(binomial(k, l)) * &qa.pow(l as u64)) * &bracket.pow(l as u64))
            * &inner.pow(l as u64))
            * &rho_shift.pow((k - l) as u64))
            * &ra.pow((k - l) as u64);
        rhs = &rhs + &term;
    }
    (lhs, rhs)
}

pub fn audit_closed_form(config: &AuditConfig) -> Result<AuditReport> {
    let params = config.params()?;
    let p = params.prime();
    let t = config.tolerance;
    let target = config.inner_target();
    let mut report = AuditReport::new(Theorem::ClosedForm, "weighted measures of [x]^k");
    let samples = config.samples()?;
    let points = config.nonzero_samples(RATIO_POINTS, 33);
    let identity_levels = 1..=(t as u32 + 8);
    let gs = g_battery(&params);

    for k in 1..=MAX_K {
        let pk = IntegrableFunction::rhoq_power_of_x(&params, k);
        let label = pk.label();
        let d = WeightedDistribution::new(&pk, &params, target);

        let inv = check_invariance(&d, &params, config.levels(), &samples, &InvarianceOptions::default())?;
        report.check(
            CheckRecord::new(
                format!("{label}: strongly invariant"),
                "delta_N <= C |rho^(p^N) - q^(p^N)| (C p^-N when rho = q) on the level window",
                Verdict::from_bool(inv.kind == InvarianceKind::Strongly),
            )
            .with("kind", format!("{:?}", inv.kind))
            .with("C (gap model)", inv.gap_model.constant)
            .with("C (level model)", inv.level_model.constant)
            .with("better model", &inv.better_model),
        );

        // A(x) against the candidate densities P(x), β_{0:k} P(x) and (q/ρ)^x P(x)
        let beta = compare_beta_zero(k as i64, &params, identity_levels.clone(), t + 2)?;
        let beta_value = beta.measured.clone();
        let rows: Vec<(u128, PadicNumber, PadicNumber)> = points
            .par_iter()
            .map(|&x| {
                let px = pk.eval(x);
                let need = t + px.valuation_bound().max(0) + 2;
                let seq = radon_nikodym_until(&d, &params, x, 1..=(need as u32 + 8), need)?;
                let a = seq.best_estimate().cloned().expect("nonempty");
                Ok((x, a, px))
            })
            .collect::<Result<_>>()?;
        let mut ratios = Vec::new();
        let mut plain_ok = true;
        let mut beta_ok = beta_value.is_some();
        let mut ratio_ok = true;
        for (x, a, px) in &rows {
            let weighted = &params.ratio().pow_big(&(*x).into()) * px;
            ratios.push(a.div(&weighted)?);
            plain_ok &= Verdict::congruence(a, px, t) == Verdict::Pass;
            ratio_ok &= Verdict::congruence(a, &weighted, t) == Verdict::Pass;
            if let Some(b) = &beta_value {
                beta_ok &= Verdict::congruence(a, &(b * px), t) == Verdict::Pass;
            }
        }
        let reference = ratios[0].clone();
        let constancy = Verdict::combine(ratios.iter().map(|r| Verdict::congruence(r, &reference, t)));
        report.check(
            CheckRecord::new(
                format!("{label}: derivative ratio constant"),
                format!("f_mu(x) / ((q/rho)^x [x]^{k}) is one constant mod p^{t} over {RATIO_POINTS} points"),
                constancy,
            )
            .with("constant", config.show(&reference))
            .with("density P(x)", plain_ok)
            .with("density beta_0:k P(x)", beta_ok)
            .with("density (q/rho)^x P(x)", ratio_ok),
        );
        report.constant(format!("{label}: derivative constant"), config.show(&reference));

        // ∫ g dμ̃_P against ∫ g P dμ
        let ids: Vec<_> = gs
            .par_iter()
            .map(|g| integral_against_weighted(g, &pk, &params, identity_levels.clone(), t + 4))
            .collect::<Result<_>>()?;
        // lhs ≡ c rhs with c from the first g whose rhs is nonzero, so a
        // vanishing rhs still gets checked
        let first = ids.iter().find_map(|i| i.ratio.clone());
        let mut verdicts = Vec::new();
        let mut shown = Vec::new();
        for id in &ids {
            match (first.as_ref(), id.lhs.best_estimate(), id.rhs.best_estimate()) {
                (Some(c), Some(l), Some(r)) => {
                    verdicts.push(Verdict::congruence(l, &(c * r), t));
                    let ratio = id.ratio.as_ref().map(|v| config.show(v)).unwrap_or_else(|| "rhs = 0".into());
                    shown.push(format!("{}: {ratio}", id.g));
                }
                _ => {
                    verdicts.push(Verdict::Inconclusive);
                    shown.push(format!("{}: undefined", id.g));
                }
            }
            report.tables.push(SequenceTable::from_sequence(
                format!("{label}: int {} d(mu_P)", id.g),
                &id.lhs,
                config,
            ));
        }
        report.check(
            CheckRecord::new(
                format!("{label}: integral identity"),
                "int g d(mu_P) = c int g P d(mu) with one c over the g battery",
                Verdict::combine(verdicts),
            )
            .with("c", first.as_ref().map(|c| config.show(c)).unwrap_or_default())
            .with("ratios", shown.join("; ")),
        );

        // splitting expansion on every a < p^n, i < p, n in {1, 2}
        let mut split = Vec::new();
        for n in 1..=2u32 {
            for a in 0..(p as u128).pow(n) {
                for i in 0..p as u128 {
                    let (l, r) = splitting_sides(&params, k, a, i, n);
                    split.push(Verdict::congruence(&l, &r, t));
                }
            }
        }
        report.check(
            CheckRecord::new(
                format!("{label}: splitting expansion"),
                "[a + i p^n]^k expands binomially through [p^n] and the lifted bracket",
                Verdict::combine(split.iter().copied()),
            )
            .with("cases", split.len()),
        );

        report.check(
            CheckRecord::new(
                format!("beta_0:{k}"),
                "measured against the log closed form and k log(rho)/log(rho q)",
                Verdict::Measured,
            )
            .with("measured", beta.measured.as_ref().map(|v| config.show(v)).unwrap_or_default())
            .with("log closed form", beta.log_closed_form.as_ref().map(|v| config.show(v)).unwrap_or_default())
            .with("k log(rho)/log(rho q)", beta.log_ratio.as_ref().map(|v| config.show(v)).unwrap_or_default())
            .with("matches closed form", format!("{:?}", beta.measured_matches_closed_form))
            .with("matches log ratio", format!("{:?}", beta.measured_matches_log_ratio)),
        );
    }

    for n in 0..=MAX_K {
        let seq = carlitz_bernoulli(n, 0, &params, identity_levels.clone(), t)?;
        if let Some(b) = seq.best_estimate() {
            report.constant(format!("beta_{n}:0"), config.show(b));
        }
        report.tables.push(SequenceTable::from_sequence(format!("beta_{n}:0"), &seq, config));
    }
    Ok(report.finish())
}

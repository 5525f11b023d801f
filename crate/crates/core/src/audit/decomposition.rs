//! Splitting a strongly invariant distribution into a weighted measure of a
//! Mahler polynomial and a bounded remainder.

use std::sync::Arc;

use rayon::prelude::*;

use super::{AuditConfig, AuditReport, CheckRecord, Theorem, Verdict};
use crate::error::Result;
use crate::integration::IntegrableFunction;
use crate::mahler::{mahler_coefficients, mahler_from_values};
use crate::measure::{radon_nikodym_until, Ball, Distribution, LinearCombination, WeightedDistribution};
use crate::padic::{Norm, PadicNumber};

/// Mahler order used for `h_M`.
const ORDER: usize = 8;

pub fn audit_decomposition(config: &AuditConfig) -> Result<AuditReport> {
    let params = config.params()?;
    let p = params.prime();
    let t = config.tolerance;
    let target = config.inner_target();
    let mut report = AuditReport::new(Theorem::Decomposition, "decomposition into Mahler part and bounded remainder");
    let ratio = IntegrableFunction::ratio_power(&params);
    let inputs = vec![
        ratio.clone(),
        IntegrableFunction::mahler(mahler_coefficients(&ratio, 2, &params)?),
    ];
    let samples = config.samples()?;
    // the quasi conversion of h_M divides by (ρ-q)^n [n]!
    let gap = (params.rho() - params.q()).valuation().unwrap_or(0);
    let loss = ORDER as i64 * gap + params.factorial(ORDER).valuation_bound();
    let need = (target - 4).max(t + 6 + loss);
    let inner = target.max(need + 4);
    for f in &inputs {
        let label = f.label();
        let mu: Arc<dyn Distribution> = Arc::new(WeightedDistribution::new(f, &params, inner));
        let h_values: Vec<PadicNumber> = (0..=ORDER as u128)
            .into_par_iter()
            .map(|i| {
                let seq = radon_nikodym_until(mu.as_ref(), &params, i, 1..=(need as u32 + 8), need)?;
                let fmu = seq.best_estimate().cloned().expect("nonempty");
                Ok(&params.ratio().pow_big(&i.into()).inverse()? * &fmu)
            })
            .collect::<Result<_>>()?;
        let series = mahler_from_values(&h_values, &params)?;
        let h_m = IntegrableFunction::mahler(series.clone());
        let mu1: Arc<dyn Distribution> = Arc::new(WeightedDistribution::new(&h_m, &params, inner));
        let mu2 = LinearCombination::difference(mu.clone(), mu1, params.precision());

        let mut ks = Vec::new();
        for n in config.levels() {
            let vals: Vec<PadicNumber> = samples
                .par_iter()
                .map(|&x| mu2.rescaled(&Ball::containing(x, n, p)?, &params))
                .collect::<Result<_>>()?;
            let floor = vals.iter().map(|v| v.precision()).min().unwrap_or(t);
            let k = vals
                .iter()
                .map(|v| match v.valuation() {
                    // a value that vanishes to its precision is only bounded by it
                    None => Norm::from_valuation(p, v.precision()),
                    Some(_) => v.norm(),
                })
                .max()
                .unwrap_or(Norm::zero(p));
            ks.push((n, k, floor));
        }
        let base = ks[0].1;
        let allowed = base.scale(1).max(Norm::from_valuation(p, t));
        let stable = ks.iter().all(|(_, k, _)| *k <= allowed);
        let resolved = ks.iter().all(|(_, _, floor)| *floor >= t);
        let verdict = match (stable, resolved) {
            (false, _) => Verdict::Fail,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Inconclusive,
        };
        let shown: Vec<String> = ks.iter().map(|(n, k, _)| format!("{n}:{k}")).collect();
        report.check(
            CheckRecord::new(
                format!("{label}: remainder bound stable"),
                format!("K_N = max |[p^N] mu_2| stays within one digit of K_{} (floor p^-{t})", config.min_level),
                verdict,
            )
            .with("K_N", shown.join(" "))
            .with("Mahler order", ORDER)
            .with("min digits", ks.iter().map(|k| k.2).min().unwrap_or(0)),
        );
        let full = mahler_coefficients(f, 2 * ORDER, &params)?;
        report.constant(format!("{label}: C3 (Mahler tail beyond M)"), full.tail_norm(ORDER + 1));
        report.constant(
            format!("{label}: C4 (max K_N)"),
            ks.iter().map(|k| k.1).max().unwrap_or(Norm::zero(p)),
        );
        report.constant(
            format!("{label}: h_M coefficients"),
            series.coefficients().iter().map(|c| c.norm().to_string()).collect::<Vec<_>>().join(" "),
        );
    }
    Ok(report.finish())
}

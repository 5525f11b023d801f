//! Lipschitz continuity of Radon-Nikodym derivatives of strongly invariant distributions.

use std::sync::Arc;

use rayon::prelude::*;

use super::{AuditConfig, AuditReport, CheckRecord, SequenceTable, Theorem, Verdict};
use crate::error::Result;
use crate::integration::IntegrableFunction;
use crate::measure::{
    check_invariance, lipschitz_estimate, radon_nikodym_derivative, Ball, Distribution, InvarianceKind,
    InvarianceOptions, RhoQHaar, WeightedDistribution,
};
use crate::padic::Norm;

/// Grid exponent `M` for the first Lipschitz fit; the second uses `M + 1`.
const GRID: u32 = 2;

pub fn audit_lipschitz(config: &AuditConfig) -> Result<AuditReport> {
    let params = config.params()?;
    let p = params.prime();
    let target = config.inner_target();
    let mut report = AuditReport::new(Theorem::Lipschitz, "Radon-Nikodym derivatives are Lipschitz");
    let inputs: Vec<Arc<dyn Distribution>> = vec![
        Arc::new(RhoQHaar::new(&params)),
        Arc::new(WeightedDistribution::new(
            &IntegrableFunction::rhoq_power_of_x(&params, 2),
            &params,
            target,
        )),
    ];
    let samples = config.samples()?;
    let top = config.max_level;
    for d in &inputs {
        let family = d.family();
        let inv = check_invariance(d.as_ref(), &params, config.levels(), &samples, &InvarianceOptions::default())?;
        report.check(
            CheckRecord::new(
                format!("{family}: strongly invariant"),
                "delta_N <= C |rho^(p^N) - q^(p^N)| (C p^-N when rho = q) on the level window",
                Verdict::from_bool(inv.kind == InvarianceKind::Strongly),
            )
            .with("kind", format!("{:?}", inv.kind))
            .with("C", inv.gap_model.constant),
        );
        let grid_top = (p as u128).pow(GRID + 1);
        let values: Vec<(u128, _)> = (0..grid_top)
            .into_par_iter()
            .map(|x| Ok((x, d.rescaled(&Ball::containing(x, top, p)?, &params)?)))
            .collect::<Result<_>>()?;
        let small = (p as u128).pow(GRID) as usize;
        let c_m = lipschitz_estimate(&values[..small])?;
        let c_m1 = lipschitz_estimate(&values)?;
        report.check(
            CheckRecord::new(
                format!("{family}: Lipschitz constant stable"),
                format!("C1(M+1) <= p * C1(M) with M = {GRID}, values at level {top}"),
                Verdict::from_bool(c_m1 <= c_m.scale(1)),
            )
            .with("C1(M)", c_m)
            .with("C1(M+1)", c_m1),
        );
        report.constant(format!("{family}: C1"), c_m1);
        let sup = values.iter().map(|(_, v)| v.norm()).max().unwrap_or(Norm::zero(p));
        report.constant(format!("{family}: sup |f_d|"), sup);
        let seq = radon_nikodym_derivative(d.as_ref(), &params, 1, 1..=top + 1, config.tolerance)?;
        report.tables.push(SequenceTable::from_sequence(format!("{family}: A_N(1)"), &seq, config));
    }
    Ok(report.finish())
}

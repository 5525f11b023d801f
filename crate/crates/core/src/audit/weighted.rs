//! `μ̃_f` is a distribution: linear in `f`, bounded by `‖f‖₁`, and the two
//! evaluation routes agree.

use rand::Rng;
use rayon::prelude::*;

use super::{battery, AuditConfig, AuditReport, CheckRecord, Theorem, Verdict};
use crate::error::Result;
use crate::integration::{
    agree_within_budget, grid_norms, weighted_measure_direct, weighted_measure_lifted_at, IntegrableFunction,
};
use crate::measure::{Ball, WeightedDistribution};
use crate::padic::{Norm, PadicNumber};

const CROSS_BALLS: usize = 20;
const CROSS_INNER: u32 = 3;
const NORM_GRID: u32 = 3;

pub fn audit_weighted_measure(config: &AuditConfig) -> Result<AuditReport> {
    let params = config.params()?;
    let p = params.prime();
    let w = params.precision();
    let target = config.inner_target();
    let t = config.tolerance;
    let mut report = AuditReport::new(Theorem::WeightedMeasure, "weighted measures are bounded distributions");
    let fs = battery(&params);
    let dists: Vec<WeightedDistribution> = fs.iter().map(|f| WeightedDistribution::new(f, &params, target)).collect();

    // linearity
    let mut rng = config.rng(32);
    let modulus = (p as u128).pow(config.precision as u32);
    let mut jobs = Vec::new();
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            let alpha = rng.gen_range(1..modulus);
            let beta = rng.gen_range(1..modulus);
            let level = rng.gen_range(config.min_level..=config.max_level);
            let a = rng.gen_range(0..(p as u128).pow(level));
            jobs.push((i, j, alpha, beta, Ball::new(a, level, p)?));
        }
    }
    let lin: Vec<Verdict> = jobs
        .par_iter()
        .map(|&(i, j, alpha, beta, ball)| {
            let alpha = PadicNumber::from_bigint(&alpha.into(), p, w)?;
            let beta = PadicNumber::from_bigint(&beta.into(), p, w)?;
            let combo = IntegrableFunction::linear_combination(vec![
                (alpha.clone(), fs[i].clone()),
                (beta.clone(), fs[j].clone()),
            ]);
            let lhs = WeightedDistribution::new(&combo, &params, target).evaluate(&ball)?.rescaled;
            let rhs = &(&alpha * &dists[i].evaluate(&ball)?.rescaled) + &(&beta * &dists[j].evaluate(&ball)?.rescaled);
            Ok(Verdict::congruence(&lhs, &rhs, t))
        })
        .collect::<Result<_>>()?;
    report.check(
        CheckRecord::new(
            "linearity",
            format!("mu_(af+bg) = a mu_f + b mu_g mod p^{t}"),
            Verdict::combine(lin.iter().copied()),
        )
        .with("pairs", jobs.len())
        .with("failures", lin.iter().filter(|v| **v == Verdict::Fail).count()),
    );

    // |[p^N] μ̃_f(ball)| <= ‖f‖₁
    let samples = config.samples()?;
    let mut bound_verdicts = Vec::new();
    let mut violations = 0usize;
    let mut checked = 0usize;
    for (f, d) in fs.iter().zip(&dists) {
        let norms = grid_norms(f, NORM_GRID)?;
        let mut worst = Norm::zero(p);
        let mut m_const = Vec::new();
        for n in config.levels() {
            let rows: Vec<(PadicNumber, PadicNumber)> = samples
                .par_iter()
                .map(|&x| {
                    let v = d.evaluate(&Ball::containing(x, n, p)?)?;
                    Ok((v.rescaled, v.value))
                })
                .collect::<Result<_>>()?;
            let mut level_m = Norm::zero(p);
            for (rescaled, value) in &rows {
                let v = Verdict::norm_at_most(rescaled, norms.lipschitz);
                if v == Verdict::Fail {
                    violations += 1;
                }
                checked += 1;
                bound_verdicts.push(v);
                worst = worst.max(rescaled.norm());
                level_m = level_m.max(value.norm());
            }
            m_const.push(match level_m.ratio(norms.sup) {
                Some(r) => r.to_string(),
                None => "undefined".into(),
            });
        }
        report.constant(format!("{}: |f|_1", f.label()), norms.lipschitz);
        report.constant(format!("{}: max |[p^N] mu_f|", f.label()), worst);
        report.check(
            CheckRecord::new(
                format!("{}: bound constant M_N", f.label()),
                "max_a |mu_f(a + p^N)| / |f|_sup per level",
                Verdict::Measured,
            )
            .with("levels", format!("{}..={}", config.min_level, config.max_level))
            .with("M_N", m_const.join(" ")),
        );
    }
    report.check(
        CheckRecord::new("norm bound", "|[p^N] mu_f(a + p^N)| <= |f|_1", Verdict::combine(bound_verdicts))
            .with("checked", checked)
            .with("violations", violations),
    );

    // direct and lifted routes at a matched outer level
    let mut rng = config.rng(3232);
    let top = config.max_level.min(config.min_level.max(3));
    let cross: Vec<(usize, Ball)> = (0..CROSS_BALLS)
        .map(|_| {
            let i = rng.gen_range(0..fs.len());
            let level = rng.gen_range(config.min_level..=top);
            let a = rng.gen_range(0..(p as u128).pow(level));
            Ok((i, Ball::new(a, level, p)?))
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<(bool, i64)> = cross
        .par_iter()
        .map(|(i, ball)| {
            let (a, ba) = weighted_measure_direct(&fs[*i], &params, ball, CROSS_INNER)?;
            let (b, bb) = weighted_measure_lifted_at(&fs[*i], &params, ball, CROSS_INNER)?;
            let prec = ba.achieved_precision().min(bb.achieved_precision());
            Ok((agree_within_budget(&a, &b, &ba, &bb), prec))
        })
        .collect::<Result<_>>()?;
    let min_prec = outcomes.iter().map(|o| o.1).min().unwrap_or(0);
    report.check(
        CheckRecord::new(
            "direct vs lifted",
            "routes agree to the precision both budgets guarantee",
            Verdict::from_bool(outcomes.iter().all(|o| o.0)),
        )
        .with("balls", CROSS_BALLS)
        .with("disagreements", outcomes.iter().filter(|o| !o.0).count())
        .with("min guaranteed digits", min_prec),
    );
    Ok(report.finish())
}

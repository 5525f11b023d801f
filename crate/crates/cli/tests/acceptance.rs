//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Expected values come from exact integer arithmetic done here, not from the
//! library: arithmetic sums, modular powers and finite differences.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhoq_padic::audit::{audit_decomposition, battery, AuditConfig, AuditReport, Verdict};
use rhoq_padic::integration::{
    agree_within_budget, integral_against_weighted, volkenborn_integral, volkenborn_integral_with,
    weighted_measure_direct, weighted_measure_lifted_at, Strategy,
};
use rhoq_padic::mahler::{mahler_coefficients, mahler_evaluate};
use rhoq_padic::measure::{radon_nikodym_until, RhoQHaar, WeightedDistribution};
use rhoq_padic::rhoq::rhoq_power;
use rhoq_padic::{Ball, Distribution, IntegrableFunction, Norm, PadicNumber, RhoQParams};

const M: i64 = 12;
const W: i64 = 4 * M + 40;
const T: i64 = M - 4;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(n: &BigInt, p: u64, prec: i64) -> PadicNumber {
    PadicNumber::from_bigint(n, p, prec).unwrap()
}

fn pow_u(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// `a` equals `b` to the smaller of the two precisions, and that is at least `floor`.
fn exact(a: &PadicNumber, b: &PadicNumber, floor: i64) -> bool {
    let t = a.precision().min(b.precision());
    t >= floor && a.congruent(b, t)
}

fn default_params() -> RhoQParams {
    RhoQParams::from_offsets(5, 1, 2, W).unwrap()
}

fn random_pairs(count: usize, rng: &mut ChaCha8Rng) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    while out.len() < count {
        let pair = (rng.gen_range(0..625), rng.gen_range(0..625));
        if pair.0 != pair.1 && !out.contains(&pair) {
            out.push(pair);
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = 5u64;
    let params = RhoQParams::from_offsets(p, 0, 0, W).unwrap();
    let x = IntegrableFunction::monomial(1, p, W);
    let seq = volkenborn_integral(&x, &params, 1..=12, 10).map_err(|e| e.to_string())?;
    for n in 1..=6u32 {
        let a = seq.term_at(n).ok_or("missing level")?;
        let pn = BigInt::from(pow_u(p, n));
        let sum = (&pn - 1) / 2;
        ensure(exact(a, &int(&sum, p, W), W - n as i64), || format!("level {n}: {a} != (p^N-1)/2"))?;
        // -1/2 ≡ (p^N - 1)/2 mod p^N
        let half = int(&((&pn - 1) / 2), p, n as i64);
        ensure(a.congruent(&half, n as i64), || format!("level {n}: not -1/2 mod 5^{n}"))?;
    }
    // -1/2 ≡ (5^10 - 1)/2 mod 5^10
    let minus_half = int(&((BigInt::from(pow_u(p, 10)) - 1) / 2), p, 10);
    let limit = seq.declared_limit().ok_or("no declared limit")?;
    ensure(limit.precision() >= 10 && limit.congruent(&minus_half, 10), || {
        format!("declared limit {limit} is not -1/2 mod 5^10")
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("limit declared at N = {}, {elapsed:.2?}", seq.converged_at().unwrap()))
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for p in [3u64, 5, 7] {
        for (kr, kq) in random_pairs(5, rng) {
            let params = RhoQParams::from_offsets(p, kr, kq, W).unwrap();
            let rho = int(&BigInt::from(1 + kr * p as i64), p, W);
            let one = IntegrableFunction::constant(params.one());
            for strategy in [Strategy::Direct, Strategy::ClosedForm] {
                let seq = volkenborn_integral_with(&one, &params, 1..=5, M, strategy).map_err(|e| e.to_string())?;
                for (n, a) in seq.terms() {
                    // dividing by [p^N] costs N digits plus v(rho - q)
                    let floor = W - 2 * *n as i64 - 8;
                    ensure(exact(a, &rho, floor), || {
                        format!("p={p} rho=1+{kr}p q=1+{kq}p N={n} {strategy:?}: {a} != rho")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} approximants equal rho"))
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut balls = 0;
    for p in [3u64, 5, 7] {
        let (kr, kq) = random_pairs(1, rng)[0];
        let params = RhoQParams::from_offsets(p, kr, kq, W).unwrap();
        let mu = RhoQHaar::new(&params);
        for n in 1..=4u32 {
            for a in 0..pow_u(p, n) {
                let ball = Ball::new(a, n, p).unwrap();
                let whole = mu.measure(&ball).map_err(|e| e.to_string())?;
                let mut parts = PadicNumber::zero(p, W);
                for child in ball.children(p).unwrap() {
                    parts = &parts + &mu.measure(&child).map_err(|e| e.to_string())?;
                }
                ensure(exact(&whole, &parts, W - 2 * (n as i64 + 1) - 8), || {
                    format!("p={p} a={a} N={n}: {whole} != {parts}")
                })?;
                balls += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{balls} balls, {elapsed:.2?}"))
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Outcome {
    let params = default_params();
    let p = params.prime();
    let fs = battery(&params);
    let mut worst = i64::MAX;
    for _ in 0..20 {
        let level = rng.gen_range(1..=3u32);
        let ball = Ball::new(rng.gen_range(0..pow_u(p, level)), level, p).unwrap();
        for f in &fs {
            let (d, bd) = weighted_measure_direct(f, &params, &ball, 3).map_err(|e| e.to_string())?;
            let (l, bl) = weighted_measure_lifted_at(f, &params, &ball, 3).map_err(|e| e.to_string())?;
            let digits = bd.achieved_precision().min(bl.achieved_precision());
            worst = worst.min(digits);
            ensure(digits >= M && agree_within_budget(&d, &l, &bd, &bl), || {
                format!("{} on {ball}: direct {d} vs lifted {l} ({digits} digits)", f.label())
            })?;
        }
    }
    Ok(format!("80 evaluations agree, at least {worst} guaranteed digits"))
}

/// `(q/ρ)^x mod p^prec` by modular exponentiation of the integers `1 + kp`.
fn ratio_power_oracle(p: u64, kr: i64, kq: i64, x: u128, prec: i64) -> BigInt {
    let modulus = BigInt::from(p).pow(prec as u32);
    let rho = BigInt::from(1 + kr * p as i64);
    let q = BigInt::from(1 + kq * p as i64);
    let rho_inv = rho.modpow(&(BigInt::from(p).pow(prec as u32 - 1) * (p as i64 - 1) - 1), &modulus);
    let e = BigInt::from(x);
    (q.modpow(&e, &modulus) * rho_inv.modpow(&e, &modulus)) % modulus
}

fn samples(p: u64, rng: &mut ChaCha8Rng) -> Vec<u128> {
    let mut xs: Vec<u128> = (0..p as u128).collect();
    for _ in 0..32 {
        xs.push(rng.gen_range(0..pow_u(p, 5)));
    }
    xs
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Outcome {
    let params = default_params();
    let p = params.prime();
    let mu = RhoQHaar::new(&params);
    let xs = samples(p, rng);
    for &x in &xs {
        let a: Vec<PadicNumber> = (1..=6u32)
            .map(|n| mu.rescaled(&Ball::containing(x, n, p).unwrap(), &params).unwrap())
            .collect();
        for n in 1..=5usize {
            let diff = &a[n] - &a[n - 1];
            ensure(diff.norm() <= Norm::from_valuation(p, n as i64 + 1), || {
                format!("x={x}: |A_{} - A_{n}| = {}", n + 1, diff.norm())
            })?;
        }
        let seq = radon_nikodym_until(&mu, &params, x, 1..=(M as u32 + 4), M - 2).map_err(|e| e.to_string())?;
        let limit = seq.declared_limit().ok_or_else(|| format!("x={x}: no declared limit"))?;
        let oracle = int(&ratio_power_oracle(p, 1, 2, x, M - 2), p, M - 2);
        let exponent = PadicNumber::from_bigint(&BigInt::from(x), p, W).unwrap();
        let by_power = rhoq_power(params.ratio(), &exponent, M).map_err(|e| e.to_string())?;
        ensure(limit.congruent(&oracle, M - 2) && by_power.congruent(&oracle, M - 2), || {
            format!("x={x}: limit {limit} vs (q/rho)^x")
        })?;
    }
    Ok(format!("{} points, limits match (q/rho)^x mod p^{}", xs.len(), M - 2))
}

/// `max(sup |f|, sup |f(x) - f(y)|/|x - y|)` over `x, y < p^3`.
fn lipschitz_norm(f: &IntegrableFunction, p: u64) -> Norm {
    let values: Vec<PadicNumber> = (0..pow_u(p, 3)).map(|x| f.eval(x)).collect();
    let mut best = Norm::zero(p);
    for (x, fx) in values.iter().enumerate() {
        best = best.max(fx.norm());
        for (y, fy) in values.iter().enumerate().skip(x + 1) {
            let v = (y - x).trailing_zeros_base(p);
            best = best.max((fx - fy).norm().scale(v));
        }
    }
    best
}

trait BaseValuation {
    fn trailing_zeros_base(self, p: u64) -> i64;
}

impl BaseValuation for usize {
    fn trailing_zeros_base(mut self, p: u64) -> i64 {
        let mut v = 0;
        while self % p as usize == 0 {
            self /= p as usize;
            v += 1;
        }
        v
    }
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    let params = default_params();
    let p = params.prime();
    let xs = samples(p, rng);
    let mut count = 0;
    let mut violations = Vec::new();
    for f in battery(&params) {
        let bound = lipschitz_norm(&f, p);
        let mu = WeightedDistribution::new(&f, &params, 2 * M + 8);
        for &x in &xs {
            for n in 1..=5u32 {
                let ball = Ball::containing(x, n, p).unwrap();
                let v = mu.rescaled(&ball, &params).map_err(|e| e.to_string())?;
                count += 1;
                if v.norm() > bound {
                    violations.push(format!("{} on {ball}: {} > {bound}", f.label(), v.norm()));
                }
            }
        }
    }
    ensure(violations.is_empty(), || violations.join("; "))?;
    Ok(format!("{count} balls, zero violations"))
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Outcome {
    let params = default_params();
    let p = params.prime();
    let mut xs = Vec::new();
    while xs.len() < 16 {
        let x = rng.gen_range(1..pow_u(p, 4));
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    let gs = [
        IntegrableFunction::constant(params.one()),
        IntegrableFunction::monomial(1, p, W),
        IntegrableFunction::monomial(2, p, W),
        IntegrableFunction::ratio_power(&params),
    ];
    let mut shown = Vec::new();
    for k in 1..=3u32 {
        let pk = IntegrableFunction::rhoq_power_of_x(&params, k);
        let mu = WeightedDistribution::new(&pk, &params, 2 * M + 8);
        let mut ratios = Vec::new();
        for &x in &xs {
            let px = pk.eval(x);
            let need = T + px.valuation_bound().max(0) + 2;
            let seq = radon_nikodym_until(&mu, &params, x, 1..=(need as u32 + 8), need).map_err(|e| e.to_string())?;
            let a = seq.declared_limit().ok_or_else(|| format!("k={k} x={x}: derivative not resolved"))?;
            let weighted = &params.ratio().pow_big(&BigUint::from(x)) * &px;
            ratios.push(a.div(&weighted).map_err(|e| e.to_string())?);
        }
        let c = ratios[0].clone();
        ensure(ratios.iter().all(|r| r.precision() >= T && r.congruent(&c, T)), || {
            format!("k={k}: ratio not constant mod p^{T}")
        })?;
        for g in &gs {
            let id = integral_against_weighted(g, &pk, &params, 1..=(T as u32 + 8), T + 4).map_err(|e| e.to_string())?;
            let (l, r) = (id.lhs.declared_limit(), id.rhs.declared_limit());
            let (l, r) = l.zip(r).ok_or_else(|| format!("k={k} g={}: identity not resolved", id.g))?;
            ensure(l.congruent(&(&c * r), T), || format!("k={k} g={}: lhs {l} != c * rhs {r}", id.g))?;
        }
        shown.push(c.truncate(T).to_string());
    }
    shown.dedup();
    Ok(format!("k = 1..3, c = {}", shown.join(" / ")))
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, j| acc * (n - j) / (j + 1))
}

fn criterion_8() -> Outcome {
    const ORDER: usize = 24;
    let mut count = 0;
    for params in [default_params(), RhoQParams::from_offsets(5, 0, 0, W).unwrap()] {
        let mut fs = battery(&params);
        for spec in ["x^2", "x^3", "rhoq^2", "exp:1", "mixed:1:2"] {
            fs.push(IntegrableFunction::from_spec(spec, &params).unwrap());
        }
        for f in &fs {
            let series = mahler_coefficients(f, ORDER, &params).map_err(|e| e.to_string())?;
            for i in 0..=ORDER as u128 {
                let back = mahler_evaluate(&series, i);
                ensure(exact(&back, &f.eval(i), M), || format!("{} at {i}: {back}", f.label()))?;
            }
            count += 1;
        }
    }
    // classical case against Δ^n f(0) for integer-valued f
    let params = RhoQParams::from_offsets(5, 0, 0, W).unwrap();
    let oracles: [(&str, fn(usize) -> BigInt); 4] = [
        ("x", |k| BigInt::from(k)),
        ("x^2", |k| BigInt::from(k * k)),
        ("x^3", |k| BigInt::from(k).pow(3)),
        ("exp:1", |k| BigInt::from(6).pow(k as u32)),
    ];
    for (spec, f) in oracles {
        let series = mahler_coefficients(&IntegrableFunction::from_spec(spec, &params).unwrap(), ORDER, &params)
            .map_err(|e| e.to_string())?;
        for (n, a) in series.coefficients().iter().enumerate() {
            let delta: BigInt = (0..=n)
                .map(|k| {
                    let term = binomial(n, k) * f(k);
                    if (n - k) % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum();
            ensure(exact(a, &int(&delta, 5, W), W), || format!("{spec}: a_{n} = {a}, expected {delta}"))?;
        }
        count += 1;
    }
    Ok(format!("{count} expansions checked at 0..={ORDER}"))
}

fn check_verdicts(report: &AuditReport, suffix: &str) -> Result<Vec<String>, String> {
    let checks: Vec<_> = report.checks.iter().filter(|c| c.name.ends_with(suffix)).collect();
    ensure(!checks.is_empty(), || format!("no `{suffix}` checks"))?;
    let mut shown = Vec::new();
    for c in checks {
        let measured: Vec<String> = c.measured.iter().map(|q| format!("{}={}", q.name, q.value)).collect();
        ensure(c.verdict == Verdict::Pass, || format!("{}: {:?} ({})", c.name, c.verdict, measured.join(", ")))?;
        shown.push(measured.into_iter().next().unwrap_or_default());
    }
    Ok(shown)
}

fn criterion_9() -> Outcome {
    let report = audit_decomposition(&AuditConfig::default()).map_err(|e| e.to_string())?;
    Ok(check_verdicts(&report, "remainder bound stable")?.join(" | "))
}

fn criterion_10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_rhoq"))
            .args(["audit", "all", "--out", "json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), || format!("exit status {:?}", a.status))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let criteria: Vec<(usize, Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome>)> = vec![
        (1, Box::new(|_| criterion_1())),
        (2, Box::new(criterion_2)),
        (3, Box::new(criterion_3)),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
        (8, Box::new(|_| criterion_8())),
        (9, Box::new(|_| criterion_9())),
        (10, Box::new(|_| criterion_10())),
    ];
    let mut failed = 0;
    for (n, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut rng))).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

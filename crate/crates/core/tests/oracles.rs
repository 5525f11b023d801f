use rhoq_padic::integration::{
    carlitz_bernoulli, volkenborn_integral, volkenborn_integral_with, volkenborn_level_direct, Strategy,
};
use rhoq_padic::measure::{check_invariance, InvarianceKind, InvarianceOptions, ZeroDistribution};
use rhoq_padic::rhoq::{rhoq_binomial, rhoq_integer};
use rhoq_padic::{IntegrableFunction, PadicNumber, RhoQParams};

const W: i64 = 60;

fn classical(p: u64) -> RhoQParams {
    RhoQParams::from_offsets(p, 0, 0, W).unwrap()
}

fn rational(num: i64, den: i64, p: u64, m: i64) -> PadicNumber {
    PadicNumber::from_rational(num, den, p, m).unwrap()
}

fn limit(f: &IntegrableFunction, params: &RhoQParams, target: i64) -> PadicNumber {
    let seq = volkenborn_integral(f, params, 1..=(target as u32 + 4), target).unwrap();
    seq.declared_limit().expect("converges").clone()
}

#[test]
fn classical_volkenborn_gives_bernoulli_numbers() {
    // B_0..B_6 with B_1 = -1/2
    let bernoulli = [(1, 1), (-1, 2), (1, 6), (0, 1), (-1, 30), (0, 1), (1, 42)];
    for p in [5u64, 7, 11] {
        let params = classical(p);
        for (n, &(num, den)) in bernoulli.iter().enumerate() {
            let x_n = IntegrableFunction::monomial(n as u32, p, W);
            let b = limit(&x_n, &params, 12);
            assert!(b.congruent(&rational(num, den, p, 12), 12), "p={p} B_{n} = {b}");
        }
    }
}

#[test]
fn classical_volkenborn_of_exponential() {
    // ∫ a^x = log a / (a - 1)
    let p = 5;
    let params = classical(p);
    let a = PadicNumber::from_integer(1 + 3 * 5, p, W).unwrap();
    let got = limit(&IntegrableFunction::exponential(a.clone()), &params, 12);
    let expected = a.log().unwrap().div(&(&a - &params.one())).unwrap();
    assert!(got.congruent(&expected, 12), "{got} vs {expected}");
}

#[test]
fn direct_and_closed_form_approximants_agree() {
    let params = RhoQParams::from_offsets(3, 2, 7, W).unwrap();
    for spec in ["const:3", "x", "x^3", "rhoq^2", "ratio", "exp:4", "mixed:2:1"] {
        let f = IntegrableFunction::from_spec(spec, &params).unwrap();
        let direct = volkenborn_integral_with(&f, &params, 1..=6, 20, Strategy::Direct).unwrap();
        let closed = volkenborn_integral_with(&f, &params, 1..=6, 20, Strategy::ClosedForm).unwrap();
        for ((n, a), (_, b)) in direct.terms().iter().zip(closed.terms()) {
            let t = a.precision().min(b.precision());
            assert!(t >= W / 2 && a.congruent(b, t), "{spec} level {n}: {a} vs {b}");
        }
    }
}

#[test]
fn level_approximant_of_x_is_an_arithmetic_mean() {
    let p = 7;
    let params = classical(p);
    for n in 1..=4u32 {
        let (v, budget) = volkenborn_level_direct(&IntegrableFunction::monomial(1, p, W), &params, n).unwrap();
        let expected = PadicNumber::from_integer(((p as i64).pow(n) - 1) / 2, p, W).unwrap();
        assert!(v.congruent(&expected, budget.achieved_precision()));
        assert_eq!(budget.total_loss(), n as i64);
    }
}

#[test]
fn carlitz_beta_one_at_the_classical_point_is_minus_half() {
    let params = classical(5);
    let seq = carlitz_bernoulli(1, 0, &params, 1..=14, 10).unwrap();
    let b = seq.declared_limit().unwrap();
    assert!(b.congruent(&rational(-1, 2, 5, 10), 10));
}

#[test]
fn gaussian_binomials_satisfy_pascal() {
    let params = RhoQParams::from_offsets(5, 3, 8, W).unwrap();
    for n in 1..20u128 {
        for k in 1..n {
            // {n k} = q^k {n-1 k} + ρ^{n-k} {n-1 k-1}
            let lhs = rhoq_binomial(n, k, &params);
            let rhs = &(&params.q().pow(k as u64) * &rhoq_binomial(n - 1, k, &params))
                + &(&params.rho().pow((n - k) as u64) * &rhoq_binomial(n - 1, k - 1, &params));
            assert!(lhs.congruent(&rhs, W - 4), "n={n} k={k}");
        }
    }
}

#[test]
fn bracket_of_p_power_has_valuation_level() {
    let params = RhoQParams::from_offsets(3, 1, 5, W).unwrap();
    for n in 0..6u32 {
        assert_eq!(rhoq_integer(3u128.pow(n), &params).valuation(), Some(n as i64));
    }
}

#[test]
fn zero_distribution_is_strongly_invariant() {
    let params = RhoQParams::from_offsets(5, 1, 2, W).unwrap();
    let zero = ZeroDistribution::new(5, W);
    let samples: Vec<u128> = (0..50).collect();
    let report = check_invariance(&zero, &params, 1..=4, &samples, &InvarianceOptions::default()).unwrap();
    assert_eq!(report.kind, InvarianceKind::Strongly);
    assert!(report.gap_model.constant.is_zero());
}

#[test]
fn function_specs() {
    let params = RhoQParams::from_offsets(5, 1, 2, W).unwrap();
    let eval = |s: &str, x: u128| IntegrableFunction::from_spec(s, &params).unwrap().eval(x);
    assert_eq!(eval("const:7", 3), params.int(7));
    assert_eq!(eval("x^3", 4), params.int(64));
    assert_eq!(eval("exp:1", 2), params.int(36));
    assert!(eval("rhoq^1", 5).congruent(&rhoq_integer(5, &params), W));
    for bad in ["", "y", "x^", "exp:z", "mixed:1", "const:"] {
        assert!(IntegrableFunction::from_spec(bad, &params).is_err(), "{bad}");
    }
}

//! Distributions on `Z_p` as functions of balls `a + p^N Z_p`.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PadicError, Result};
use crate::integration::{default_inner_cap, weighted_measure_lifted, ApproximantSequence, IntegrableFunction, WeightedValue};
use crate::padic::{valuation_of_u128, Norm, PadicNumber};
use crate::rhoq::RhoQParams;

/// The ball `representative + p^level Z_p`, with `0 <= representative < p^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Ball {
    pub representative: u128,
    pub level: u32,
}

fn p_pow(p: u64, n: u32) -> Result<u128> {
    (p as u128)
        .checked_pow(n)
        .ok_or_else(|| PadicError::Overflow(format!("{p}^{n}")))
}

impl Ball {
    pub fn new(representative: u128, level: u32, prime: u64) -> Result<Self> {
        if level == 0 {
            return Err(PadicError::InvalidArgument("ball level must be positive".into()));
        }
        if representative >= p_pow(prime, level)? {
            return Err(PadicError::InvalidArgument(format!(
                "representative {representative} is not reduced mod {prime}^{level}"
            )));
        }
        Ok(Ball {
            representative,
            level,
        })
    }

    /// The ball of level `level` around `x`.
    pub fn containing(x: u128, level: u32, prime: u64) -> Result<Self> {
        Self::new(x % p_pow(prime, level)?, level, prime)
    }

    /// The `p` balls of the next level inside this one.
    pub fn children(&self, prime: u64) -> Result<Vec<Ball>> {
        let step = p_pow(prime, self.level)?;
        (0..prime as u128)
            .map(|i| Ball::new(self.representative + i * step, self.level + 1, prime))
            .collect()
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + p^{}", self.representative, self.level)
    }
}

/// A finitely additive `Q_p`-valued function on balls.
pub trait Distribution: Send + Sync {
    fn prime(&self) -> u64;

    fn family(&self) -> String;

    fn measure(&self, ball: &Ball) -> Result<PadicNumber>;

    /// `[p^N]_{ρ,q} · d(ball)`.
    fn rescaled(&self, ball: &Ball, params: &RhoQParams) -> Result<PadicNumber> {
        Ok(&params.bracket_p_pow(ball.level) * &self.measure(ball)?)
    }
}

/// `μ_{ρ,q}(a + p^N Z_p) = ρ^{p^N}/[p^N]_{ρ,q} · (q/ρ)^a`.
#[derive(Clone, Debug)]
pub struct RhoQHaar {
    params: RhoQParams,
}

impl RhoQHaar {
    pub fn new(params: &RhoQParams) -> Self {
        RhoQHaar {
            params: params.clone(),
        }
    }

    fn numerator(&self, ball: &Ball) -> PadicNumber {
        let (rho_pn, _) = self.params.tower_powers(ball.level);
        &rho_pn * &self.params.ratio().pow_big(&ball.representative.into())
    }
}

impl Distribution for RhoQHaar {
    fn prime(&self) -> u64 {
        self.params.prime()
    }

    fn family(&self) -> String {
        "rhoq_haar".into()
    }

    fn measure(&self, ball: &Ball) -> Result<PadicNumber> {
        self.numerator(ball).div(&self.params.bracket_p_pow(ball.level))
    }

    fn rescaled(&self, ball: &Ball, _params: &RhoQParams) -> Result<PadicNumber> {
        Ok(self.numerator(ball))
    }
}

pub fn rhoq_haar_measure(ball: &Ball, params: &RhoQParams) -> Result<PadicNumber> {
    RhoQHaar::new(params).measure(ball)
}

/// `μ̃_{f,ρ,q}`, evaluated through the lifted-parameter route and memoized per ball.
pub struct WeightedDistribution {
    f: IntegrableFunction,
    params: RhoQParams,
    target: i64,
    inner_cap: u32,
    memo: RwLock<HashMap<Ball, WeightedValue>>,
}

impl WeightedDistribution {
    /// `target` is the precision at which inner limits are declared.
    pub fn new(f: &IntegrableFunction, params: &RhoQParams, target: i64) -> Self {
        WeightedDistribution {
            f: f.clone(),
            params: params.clone(),
            target,
            inner_cap: default_inner_cap(target),
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn function(&self) -> &IntegrableFunction {
        &self.f
    }

    pub fn evaluate(&self, ball: &Ball) -> Result<WeightedValue> {
        if let Some(v) = self.memo.read().unwrap().get(ball) {
            return Ok(v.clone());
        }
        let v = weighted_measure_lifted(&self.f, &self.params, ball, self.target, self.inner_cap)?;
        self.memo.write().unwrap().insert(*ball, v.clone());
        Ok(v)
    }
}

impl Distribution for WeightedDistribution {
    fn prime(&self) -> u64 {
        self.params.prime()
    }

    fn family(&self) -> String {
        format!("weighted[{}]", self.f.label())
    }

    fn measure(&self, ball: &Ball) -> Result<PadicNumber> {
        Ok(self.evaluate(ball)?.value)
    }

    fn rescaled(&self, ball: &Ball, _params: &RhoQParams) -> Result<PadicNumber> {
        Ok(self.evaluate(ball)?.rescaled)
    }
}

/// `Σ c_i d_i`.
#[derive(Clone)]
pub struct LinearCombination {
    parts: Vec<(PadicNumber, Arc<dyn Distribution>)>,
}

impl LinearCombination {
    pub fn new(parts: Vec<(PadicNumber, Arc<dyn Distribution>)>) -> Self {
        assert!(!parts.is_empty());
        LinearCombination { parts }
    }

    /// `a - b`.
    pub fn difference(a: Arc<dyn Distribution>, b: Arc<dyn Distribution>, precision: i64) -> Self {
        let p = a.prime();
        let one = PadicNumber::one(p, precision);
        let minus = -&one;
        Self::new(vec![(one, a), (minus, b)])
    }
}

impl Distribution for LinearCombination {
    fn prime(&self) -> u64 {
        self.parts[0].1.prime()
    }

    fn family(&self) -> String {
        self.parts
            .iter()
            .map(|(c, d)| format!("({})*{}", c, d.family()))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn measure(&self, ball: &Ball) -> Result<PadicNumber> {
        let mut acc: Option<PadicNumber> = None;
        for (c, d) in &self.parts {
            let v = c * &d.measure(ball)?;
            acc = Some(match acc {
                None => v,
                Some(a) => &a + &v,
            });
        }
        Ok(acc.unwrap())
    }

    fn rescaled(&self, ball: &Ball, params: &RhoQParams) -> Result<PadicNumber> {
        let mut acc: Option<PadicNumber> = None;
        for (c, d) in &self.parts {
            let v = c * &d.rescaled(ball, params)?;
            acc = Some(match acc {
                None => v,
                Some(a) => &a + &v,
            });
        }
        Ok(acc.unwrap())
    }
}

#[derive(Clone, Debug)]
pub struct ZeroDistribution {
    prime: u64,
    precision: i64,
}

impl ZeroDistribution {
    pub fn new(prime: u64, precision: i64) -> Self {
        ZeroDistribution { prime, precision }
    }
}

impl Distribution for ZeroDistribution {
    fn prime(&self) -> u64 {
        self.prime
    }

    fn family(&self) -> String {
        "zero".into()
    }

    fn measure(&self, _ball: &Ball) -> Result<PadicNumber> {
        Ok(PadicNumber::zero(self.prime, self.precision))
    }

    fn rescaled(&self, _ball: &Ball, _params: &RhoQParams) -> Result<PadicNumber> {
        Ok(PadicNumber::zero(self.prime, self.precision))
    }
}

/// All residues below `p^min_level`, then `extra` seeded pseudo-random integers below `p^max_level`.
pub fn default_samples(prime: u64, min_level: u32, max_level: u32, seed: u64, extra: usize) -> Result<Vec<u128>> {
    let mut out: Vec<u128> = (0..p_pow(prime, min_level)?).collect();
    let top = p_pow(prime, max_level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        let x = rng.gen_range(0..top);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvarianceKind {
    Strongly,
    OneAdmissible,
    Weakly,
    NoneDetected,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InvarianceOptions {
    /// `δ → 0` requires the final `δ <= p^{-threshold}`.
    pub threshold: i64,
    /// Number of trailing `δ` values that must be non-increasing (all when `None`).
    pub window: Option<usize>,
}

impl Default for InvarianceOptions {
    fn default() -> Self {
        InvarianceOptions {
            threshold: 3,
            window: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelEntry {
    pub level: u32,
    pub delta: Norm,
    /// `c_N = max |[p^N] d(ball)|`.
    pub admissible: Norm,
    /// `p^{-ν(ρ^{p^N} - q^{p^N})}`, zero when `ρ = q`.
    pub gap_bound: Norm,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelFit {
    pub model: String,
    pub constant: Norm,
    pub fits: bool,
    /// Largest number of digits by which a later `δ` beats the fitted bound.
    pub max_slack: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub family: String,
    pub kind: InvarianceKind,
    pub weakly: bool,
    pub strongly: bool,
    pub one_admissible: bool,
    pub levels: Vec<LevelEntry>,
    pub gap_model: ModelFit,
    pub level_model: ModelFit,
    pub better_model: String,
    /// Lowest precision among the compared values; zero differences mean "zero to this precision".
    pub resolution: i64,
    pub sample_count: usize,
}

fn tends_to_zero(norms: &[Norm], opts: &InvarianceOptions) -> bool {
    let Some(last) = norms.last() else {
        return false;
    };
    let start = opts.window.map(|w| norms.len().saturating_sub(w)).unwrap_or(0);
    let monotone = norms[start..].windows(2).all(|w| w[1] <= w[0]);
    monotone && (last.is_zero() || last.valuation().unwrap() >= opts.threshold)
}

fn fit_model(name: &str, entries: &[LevelEntry], bound: impl Fn(&LevelEntry) -> Norm) -> ModelFit {
    let p = entries[0].delta.prime();
    let first = &entries[0];
    let b0 = bound(first);
    let constant = if b0.is_zero() {
        if first.delta.is_zero() {
            Norm::zero(p)
        } else {
            return ModelFit {
                model: name.into(),
                constant: first.delta,
                fits: false,
                max_slack: None,
            };
        }
    } else {
        first.delta.ratio(b0).unwrap()
    };
    let mut fits = true;
    let mut max_slack: Option<i64> = None;
    for e in &entries[1..] {
        let b = bound(e);
        let allowed = match (constant.valuation(), b.valuation()) {
            (Some(c), Some(v)) => Norm::from_valuation(p, c + v),
            _ => Norm::zero(p),
        };
        if e.delta > allowed {
            fits = false;
        }
        if let (Some(d), Some(a)) = (e.delta.valuation(), allowed.valuation()) {
            let s = d - a;
            max_slack = Some(max_slack.map_or(s, |m: i64| m.max(s)));
        }
    }
    ModelFit {
        model: name.into(),
        constant,
        fits,
        max_slack,
    }
}

/// Classifies `d` from `δ_N = max_a |[p^N] d(a, N) - [p^{N+1}] d(a, N+1)|`
/// for `N` in `levels` (so values up to level `max + 1` are computed).
pub fn check_invariance(
    d: &dyn Distribution,
    params: &RhoQParams,
    levels: RangeInclusive<u32>,
    samples: &[u128],
    opts: &InvarianceOptions,
) -> Result<InvarianceReport> {
    let p = params.prime();
    let lv: Vec<u32> = levels.clone().collect();
    if lv.is_empty() {
        return Err(PadicError::InvalidArgument("empty level range".into()));
    }
    let all_levels: Vec<u32> = (*levels.start()..=*levels.end() + 1).collect();
    let jobs: Vec<(usize, u32)> = (0..samples.len())
        .flat_map(|i| all_levels.iter().map(move |&n| (i, n)))
        .collect();
    let values: Vec<Result<PadicNumber>> = jobs
        .par_iter()
        .map(|&(i, n)| d.rescaled(&Ball::containing(samples[i], n, p)?, params))
        .collect();
    let mut table: HashMap<(usize, u32), PadicNumber> = HashMap::new();
    let mut resolution = i64::MAX;
    for (job, v) in jobs.iter().zip(values) {
        let v = v?;
        resolution = resolution.min(v.precision());
        table.insert(*job, v);
    }
    let mut entries = Vec::new();
    for &n in &lv {
        let mut delta = Norm::zero(p);
        let mut adm = Norm::zero(p);
        for i in 0..samples.len() {
            let a = &table[&(i, n)];
            let b = &table[&(i, n + 1)];
            delta = delta.max((a - b).norm());
            adm = adm.max(a.norm());
        }
        let gap_bound = match params.gap_valuation(n) {
            Some(v) => Norm::from_valuation(p, v),
            None => Norm::zero(p),
        };
        entries.push(LevelEntry {
            level: n,
            delta,
            admissible: adm,
            gap_bound,
        });
    }
    let deltas: Vec<Norm> = entries.iter().map(|e| e.delta).collect();
    let admissibles: Vec<Norm> = entries.iter().map(|e| e.admissible).collect();
    let weakly = tends_to_zero(&deltas, opts);
    let one_admissible = tends_to_zero(&admissibles, opts);
    let gap_model = fit_model("gap", &entries, |e| e.gap_bound);
    let level_model = fit_model("level", &entries, |e| Norm::from_valuation(p, e.level as i64));
    // ρ = q makes the gap bound vanish identically; the level model stands in
    let strongly = if params.is_symmetric() {
        level_model.fits
    } else {
        gap_model.fits
    };
    let better_model = match (gap_model.fits, level_model.fits) {
        (true, false) => "gap",
        (false, true) => "level",
        (false, false) => "neither",
        (true, true) => match (gap_model.max_slack, level_model.max_slack) {
            (Some(a), Some(b)) if a < b => "gap",
            (Some(a), Some(b)) if b < a => "level",
            _ => "tie",
        },
    }
    .to_string();
    let kind = if strongly {
        InvarianceKind::Strongly
    } else if one_admissible {
        InvarianceKind::OneAdmissible
    } else if weakly {
        InvarianceKind::Weakly
    } else {
        InvarianceKind::NoneDetected
    };
    Ok(InvarianceReport {
        family: d.family(),
        kind,
        weakly,
        strongly,
        one_admissible,
        levels: entries,
        gap_model,
        level_model,
        better_model,
        resolution,
        sample_count: samples.len(),
    })
}

/// `A_N = [p^N] d(x + p^N Z_p)` for `N` in `levels`.
pub fn radon_nikodym_derivative(
    d: &dyn Distribution,
    params: &RhoQParams,
    x: u128,
    levels: RangeInclusive<u32>,
    target: i64,
) -> Result<ApproximantSequence> {
    let mut seq = ApproximantSequence::new(target);
    for n in levels {
        seq.push(n, d.rescaled(&Ball::containing(x, n, params.prime())?, params)?);
    }
    Ok(seq)
}

/// Like [`radon_nikodym_derivative`] but stops once the limit is declared.
///
/// Levels with `p^N <= x` are skipped: there the ball representative is not
/// yet `x`, and two such terms can agree by accident.
pub fn radon_nikodym_until(
    d: &dyn Distribution,
    params: &RhoQParams,
    x: u128,
    levels: RangeInclusive<u32>,
    target: i64,
) -> Result<ApproximantSequence> {
    let mut seq = ApproximantSequence::new(target);
    let mut first = *levels.start();
    while params.p_pow(first)? <= x {
        first += 1;
    }
    for n in first..=*levels.end() {
        if seq.push(n, d.rescaled(&Ball::containing(x, n, params.prime())?, params)?) {
            break;
        }
    }
    Ok(seq)
}

/// `max_{x != y} |f(x) - f(y)| / |x - y|` over the given sample values.
pub fn lipschitz_estimate(values: &[(u128, PadicNumber)]) -> Result<Norm> {
    if values.len() < 2 {
        return Err(PadicError::InsufficientSamples {
            needed: 2,
            got: values.len(),
        });
    }
    let p = values[0].1.prime();
    let best = (0..values.len())
        .into_par_iter()
        .map(|i| {
            let (x, fx) = &values[i];
            let mut m = Norm::zero(p);
            for (y, fy) in &values[i + 1..] {
                if x == y {
                    continue;
                }
                let dx = valuation_of_u128(x.abs_diff(*y), p) as i64;
                if let Some(v) = (fx - fy).valuation() {
                    m = m.max(Norm::from_valuation(p, v - dx));
                }
            }
            m
        })
        .max()
        .unwrap_or(Norm::zero(p));
    Ok(best)
}

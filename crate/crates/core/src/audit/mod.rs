//! Numerical audits of the Lipschitz, weighted-measure, closed-form and
//! decomposition statements, with machine-readable reports.

mod closed_form;
mod decomposition;
mod lipschitz;
mod render;
mod weighted;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PadicError, Result};
use crate::integration::{ApproximantSequence, IntegrableFunction};
use crate::padic::{check_prime, Norm, PadicNumber};
use crate::rhoq::RhoQParams;

pub use render::{render_csv, render_json, render_table};
pub use lipschitz::audit_lipschitz;
pub use weighted::audit_weighted_measure;
pub use closed_form::audit_closed_form;
pub use decomposition::audit_decomposition;

pub const SCHEMA: &str = "rhoq-audit/1";

/// `ρ` or `q`, either as an offset `k` meaning `1 + k p` or as an explicit value.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamSpec {
    Offset(i64),
    Value(PadicNumber),
}

impl ParamSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(k) = s.parse::<i64>() {
            return Ok(ParamSpec::Offset(k));
        }
        Ok(ParamSpec::Value(PadicNumber::parse(s)?))
    }

    pub fn to_padic(&self, prime: u64, precision: i64) -> Result<PadicNumber> {
        match self {
            ParamSpec::Offset(k) => {
                let v = k
                    .checked_mul(prime as i64)
                    .and_then(|x| x.checked_add(1))
                    .ok_or_else(|| PadicError::Overflow(format!("1 + {k}*{prime}")))?;
                PadicNumber::from_integer(v, prime, precision)
            }
            ParamSpec::Value(v) => {
                if v.prime() != prime {
                    return Err(PadicError::PrimeMismatch(v.prime(), prime));
                }
                if v.precision() < precision {
                    return Err(PadicError::InvalidArgument(format!(
                        "explicit value {v} is known to {} digits, the run needs {precision}",
                        v.precision()
                    )));
                }
                Ok(v.truncate(precision))
            }
        }
    }
}

impl fmt::Display for ParamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSpec::Offset(k) => write!(f, "{k}"),
            ParamSpec::Value(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ParamSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Theorem {
    #[serde(rename = "thm31")]
    Lipschitz,
    #[serde(rename = "thm32")]
    WeightedMeasure,
    #[serde(rename = "thm33")]
    ClosedForm,
    #[serde(rename = "thm34")]
    Decomposition,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [
        Theorem::Lipschitz,
        Theorem::WeightedMeasure,
        Theorem::ClosedForm,
        Theorem::Decomposition,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Theorem::Lipschitz => "thm31",
            Theorem::WeightedMeasure => "thm32",
            Theorem::ClosedForm => "thm33",
            Theorem::Decomposition => "thm34",
        }
    }
}

impl FromStr for Theorem {
    type Err = PadicError;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .iter()
            .copied()
            .find(|t| t.id() == s)
            .ok_or_else(|| PadicError::Parse(format!("unknown theorem `{s}`")))
    }
}

/// Parses `a..b` or `a..=b` (both inclusive).
pub fn parse_levels(s: &str) -> Result<(u32, u32)> {
    let err = || PadicError::Parse(format!("level range `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(err)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u32 = a.trim().parse().map_err(|_| err())?;
    let b: u32 = b.trim().parse().map_err(|_| err())?;
    if a > b {
        return Err(err());
    }
    Ok((a, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditConfig {
    pub p: u64,
    /// Target precision `m`: reported values are rendered modulo `p^m`.
    pub precision: i64,
    pub rho: ParamSpec,
    pub q: ParamSpec,
    pub min_level: u32,
    pub max_level: u32,
    pub seed: u64,
    /// Tolerance exponent `t`: congruence checks are modulo `p^t`.
    pub tolerance: i64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            p: 5,
            precision: 12,
            rho: ParamSpec::Offset(1),
            q: ParamSpec::Offset(2),
            min_level: 1,
            max_level: 5,
            seed: 2024,
            tolerance: 8,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        check_prime(self.p)?;
        if self.precision < 4 {
            return Err(PadicError::InvalidPrecision(self.precision));
        }
        if self.min_level == 0 || self.min_level > self.max_level {
            return Err(PadicError::InvalidArgument(format!(
                "level window {}..{} must satisfy 1 <= min <= max",
                self.min_level, self.max_level
            )));
        }
        if self.max_level as i64 > self.precision - 2 {
            return Err(PadicError::InvalidArgument(format!(
                "max level {} exceeds precision - 2 = {}",
                self.max_level,
                self.precision - 2
            )));
        }
        if (self.p as u128).checked_pow(self.max_level + 1).is_none_or(|n| n > 1 << 40) {
            return Err(PadicError::Overflow("level window too large for the prime".into()));
        }
        if self.tolerance < 1 || self.tolerance > self.precision {
            return Err(PadicError::InvalidArgument(format!(
                "tolerance {} must lie in 1..={}",
                self.tolerance, self.precision
            )));
        }
        self.params().map(|_| ())
    }

    /// Precision every internal computation runs at.
    pub fn working_precision(&self) -> i64 {
        4 * self.precision + 40
    }

    /// Precision at which inner limits are declared.
    pub fn inner_target(&self) -> i64 {
        2 * self.precision + 8
    }

    pub fn params(&self) -> Result<RhoQParams> {
        let w = self.working_precision();
        RhoQParams::new(self.rho.to_padic(self.p, w)?, self.q.to_padic(self.p, w)?)
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        self.min_level..=self.max_level
    }

    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// All residues at the smallest level plus 32 seeded integers at the largest.
    pub fn samples(&self) -> Result<Vec<u128>> {
        crate::measure::default_samples(self.p, self.min_level, self.max_level, self.seed, 32)
    }

    /// `count` distinct nonzero integers below `p^max_level`.
    pub fn nonzero_samples(&self, count: usize, salt: u64) -> Vec<u128> {
        let top = (self.p as u128).pow(self.max_level);
        let mut rng = self.rng(salt);
        let mut out = Vec::new();
        while out.len() < count {
            let x = rng.gen_range(1..top);
            if !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    /// Renders a value at the target precision.
    pub fn show(&self, x: &PadicNumber) -> String {
        x.truncate(self.precision + x.valuation_bound().min(0)).to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "MEASURED")]
    Measured,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Measured => "MEASURED",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Fail => "FAIL",
        })
    }
}

impl Verdict {
    /// `a ≡ b mod p^t`. A difference that vanishes only at a precision below
    /// `t` is inconclusive, so tightening `t` never turns FAIL into PASS.
    pub fn congruence(a: &PadicNumber, b: &PadicNumber, t: i64) -> Verdict {
        let d = a - b;
        match d.valuation() {
            Some(v) if v >= t => Verdict::Pass,
            Some(_) => Verdict::Fail,
            None if d.precision() >= t => Verdict::Pass,
            None => Verdict::Inconclusive,
        }
    }

    /// `|x| <= bound`.
    pub fn norm_at_most(x: &PadicNumber, bound: Norm) -> Verdict {
        match x.valuation() {
            Some(_) if x.norm() <= bound => Verdict::Pass,
            Some(_) => Verdict::Fail,
            None if Norm::from_valuation(x.prime(), x.precision()) <= bound => Verdict::Pass,
            None => Verdict::Inconclusive,
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Worst of the checked verdicts; MEASURED only when nothing was checked.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Measured;
        for v in verdicts {
            out = match (out, v) {
                (Verdict::Measured, v) => v,
                (o, Verdict::Measured) => o,
                (o, v) => o.max(v),
            };
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: String,
}

impl Quantity {
    pub fn new(name: impl Into<String>, value: impl fmt::Display) -> Self {
        Quantity {
            name: name.into(),
            value: value.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub relation: String,
    pub measured: Vec<Quantity>,
    pub verdict: Verdict,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, relation: impl Into<String>, verdict: Verdict) -> Self {
        CheckRecord {
            name: name.into(),
            relation: relation.into(),
            measured: Vec::new(),
            verdict,
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: impl fmt::Display) -> Self {
        self.measured.push(Quantity::new(name, value));
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceTable {
    pub name: String,
    pub rows: Vec<SequenceRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceRow {
    pub level: u32,
    pub value: String,
    /// `|A_N - A_{N-1}|`, empty on the first row.
    pub cauchy_rate: String,
}

impl SequenceTable {
    pub fn from_sequence(name: impl Into<String>, seq: &ApproximantSequence, config: &AuditConfig) -> Self {
        let rows = seq
            .terms()
            .iter()
            .enumerate()
            .map(|(i, (n, v))| SequenceRow {
                level: *n,
                value: config.show(v),
                cauchy_rate: if i == 0 {
                    String::new()
                } else {
                    seq.cauchy_rates()[i - 1].to_string()
                },
            })
            .collect();
        SequenceTable {
            name: name.into(),
            rows,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub theorem: String,
    pub title: String,
    pub checks: Vec<CheckRecord>,
    pub constants: Vec<Quantity>,
    pub tables: Vec<SequenceTable>,
    pub verdict: Verdict,
}

impl AuditReport {
    pub fn new(theorem: Theorem, title: &str) -> Self {
        AuditReport {
            theorem: theorem.id().to_string(),
            title: title.to_string(),
            checks: Vec::new(),
            constants: Vec::new(),
            tables: Vec::new(),
            verdict: Verdict::Measured,
        }
    }

    pub fn check(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn constant(&mut self, name: impl Into<String>, value: impl fmt::Display) {
        self.constants.push(Quantity::new(name, value));
    }

    pub fn finish(mut self) -> Self {
        self.verdict = Verdict::combine(self.checks.iter().map(|c| c.verdict));
        self
    }

    /// Report for an audit that could not run at all.
    pub fn errored(theorem: Theorem, err: &PadicError) -> Self {
        let mut r = AuditReport::new(theorem, "audit aborted");
        r.check(CheckRecord::new("run", "audit completes", Verdict::Inconclusive).with("error", err));
        r.finish()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditSuite {
    pub schema: &'static str,
    pub config: AuditConfig,
    pub working_precision: i64,
    pub reports: Vec<AuditReport>,
    pub verdict: Verdict,
}

impl AuditSuite {
    /// 0 when every check passed, 1 on any FAIL, 2 on INCONCLUSIVE without FAIL.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
            _ => 0,
        }
    }
}

pub fn run_theorem(theorem: Theorem, config: &AuditConfig) -> AuditReport {
    let out = match theorem {
        Theorem::Lipschitz => audit_lipschitz(config),
        Theorem::WeightedMeasure => audit_weighted_measure(config),
        Theorem::ClosedForm => audit_closed_form(config),
        Theorem::Decomposition => audit_decomposition(config),
    };
    out.unwrap_or_else(|e| AuditReport::errored(theorem, &e))
}

/// Runs the selected audits in parallel and assembles them in the given order.
pub fn run_audits(theorems: &[Theorem], config: &AuditConfig) -> Result<AuditSuite> {
    config.validate()?;
    let reports: Vec<AuditReport> = theorems.par_iter().map(|t| run_theorem(*t, config)).collect();
    let verdict = Verdict::combine(reports.iter().map(|r| r.verdict));
    Ok(AuditSuite {
        schema: SCHEMA,
        config: config.clone(),
        working_precision: config.working_precision(),
        reports,
        verdict,
    })
}

/// The test battery `{1, x, [x], (q/ρ)^x}`.
pub fn battery(params: &RhoQParams) -> Vec<IntegrableFunction> {
    let p = params.prime();
    let w = params.precision();
    vec![
        IntegrableFunction::constant(params.one()),
        IntegrableFunction::monomial(1, p, w),
        IntegrableFunction::rhoq_power_of_x(params, 1),
        IntegrableFunction::ratio_power(params),
    ]
}

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rhoq_padic::audit::{
    parse_levels, render_csv, render_json, render_table, run_audits, AuditConfig, ParamSpec, SequenceTable, Theorem,
};
use rhoq_padic::integration::{carlitz_bernoulli, volkenborn_integral_with, Strategy};
use rhoq_padic::mahler::{mahler_coefficients, mahler_evaluate};
use rhoq_padic::measure::{radon_nikodym_derivative, Ball, Distribution, RhoQHaar, WeightedDistribution};
use rhoq_padic::{ApproximantSequence, IntegrableFunction, RhoQParams};

#[derive(Parser)]
#[command(name = "rhoq", version, about = "(rho,q)-Haar distributions, Volkenborn integrals and theorem audits")]
struct Cli {
    #[arg(long, global = true, default_value_t = 5)]
    p: u64,
    /// Target precision m (results are shown modulo p^m).
    #[arg(long, global = true, default_value_t = 12)]
    prec: i64,
    /// Integer k for 1 + k p, or a digit string such as "O(5^4): 1 + 1*5".
    #[arg(long, global = true, default_value = "1")]
    rho: String,
    #[arg(long, global = true, default_value = "2")]
    q: String,
    /// Level window, inclusive, e.g. 1..5.
    #[arg(long, global = true, default_value = "1..5")]
    levels: String,
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Tolerance exponent t; defaults to m - 4.
    #[arg(long, global = true)]
    tol: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    out: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Direct,
    Closed,
}

#[derive(Subcommand)]
enum Command {
    /// Measure of the ball a + p^N Z_p under the Haar or a weighted distribution.
    Measure {
        #[arg(long)]
        a: u128,
        #[arg(long)]
        level: u32,
        /// Weight function; omit for the Haar distribution.
        #[arg(long)]
        f: Option<String>,
    },
    /// Volkenborn approximants of f over the level window.
    Integrate {
        #[arg(long)]
        f: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// beta_{n:a} = int rho^{a x} [x]^n.
    Bernoulli {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        a: i64,
    },
    /// Mahler coefficients of f up to the given order.
    Mahler {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 24)]
        order: usize,
    },
    /// Radon-Nikodym approximants [p^N] d(x + p^N Z_p).
    RnDeriv {
        #[arg(long)]
        x: u128,
        /// Weight function; omit for the Haar distribution.
        #[arg(long)]
        f: Option<String>,
    },
    /// Run one audit or all of them.
    Audit {
        /// thm31, thm32, thm33, thm34 or all.
        theorem: String,
    },
}

struct Output {
    json: Value,
    notes: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Output {
    fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.json)? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                String::from_utf8(w.into_inner()?)?
            }
            Format::Table => {
                let mut s = String::new();
                for (k, v) in &self.notes {
                    s += &format!("{k}: {v}\n");
                }
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|i| {
                        self.rows
                            .iter()
                            .map(|r| r[i].len())
                            .chain([self.columns[i].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: &[String]| {
                    let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                if !self.columns.is_empty() {
                    s += &line(&self.columns);
                    for r in &self.rows {
                        s += &line(r);
                    }
                }
                s
            }
        })
    }
}

fn config(cli: &Cli) -> Result<AuditConfig> {
    let (min_level, max_level) = parse_levels(&cli.levels)?;
    Ok(AuditConfig {
        p: cli.p,
        precision: cli.prec,
        rho: ParamSpec::parse(&cli.rho)?,
        q: ParamSpec::parse(&cli.q)?,
        min_level,
        max_level,
        seed: cli.seed,
        tolerance: cli.tol.unwrap_or(cli.prec - 4),
    })
}

fn sequence_output(name: &str, seq: &ApproximantSequence, cfg: &AuditConfig, mut notes: Vec<(String, String)>) -> Output {
    let table = SequenceTable::from_sequence(name, seq, cfg);
    notes.push((
        "declared limit".into(),
        seq.declared_limit().map(|v| cfg.show(v)).unwrap_or_else(|| "not converged".into()),
    ));
    if let Some(n) = seq.converged_at() {
        notes.push(("converged at".into(), n.to_string()));
    }
    Output {
        json: json!({
            "name": name,
            "target": seq.target(),
            "converged_at": seq.converged_at(),
            "declared_limit": seq.declared_limit().map(|v| cfg.show(v)),
            "rows": table.rows,
        }),
        notes,
        columns: vec!["level".into(), "value".into(), "cauchy_rate".into()],
        rows: table
            .rows
            .iter()
            .map(|r| vec![r.level.to_string(), r.value.clone(), r.cauchy_rate.clone()])
            .collect(),
    }
}

fn distribution(f: &Option<String>, params: &RhoQParams, target: i64) -> Result<Box<dyn Distribution>> {
    Ok(match f {
        None => Box::new(RhoQHaar::new(params)),
        Some(spec) => Box::new(WeightedDistribution::new(
            &IntegrableFunction::from_spec(spec, params)?,
            params,
            target,
        )),
    })
}

fn run(cli: &Cli) -> Result<(String, u8)> {
    let cfg = config(cli)?;
    if let Command::Audit { theorem } = &cli.command {
        let theorems: Vec<Theorem> = if theorem == "all" {
            Theorem::ALL.to_vec()
        } else {
            vec![theorem.parse()?]
        };
        let suite = run_audits(&theorems, &cfg)?;
        let text = match cli.out {
            Format::Json => render_json(&suite)?,
            Format::Csv => render_csv(&suite)?,
            Format::Table => render_table(&suite),
        };
        return Ok((text, suite.exit_code() as u8));
    }
    let params = cfg.params().context("invalid rho/q")?;
    let p = params.prime();
    let target = cfg.precision;
    let levels = cfg.min_level..=cfg.max_level;
    let out = match &cli.command {
        Command::Measure { a, level, f } => {
            let d = distribution(f, &params, cfg.inner_target())?;
            let ball = Ball::containing(*a, *level, p)?;
            let value = d.measure(&ball)?;
            let rescaled = d.rescaled(&ball, &params)?;
            let notes = vec![
                ("distribution".to_string(), d.family()),
                ("ball".to_string(), ball.to_string()),
                ("measure".to_string(), cfg.show(&value)),
                ("[p^N] * measure".to_string(), cfg.show(&rescaled)),
            ];
            Output {
                json: json!({
                    "distribution": d.family(),
                    "ball": {"representative": ball.representative.to_string(), "level": ball.level},
                    "measure": cfg.show(&value),
                    "rescaled": cfg.show(&rescaled),
                }),
                notes,
                columns: Vec::new(),
                rows: Vec::new(),
            }
        }
        Command::Integrate { f, strategy } => {
            let func = IntegrableFunction::from_spec(f, &params)?;
            let strategy = match strategy {
                StrategyArg::Auto => Strategy::Auto,
                StrategyArg::Direct => Strategy::Direct,
                StrategyArg::Closed => Strategy::ClosedForm,
            };
            let seq = volkenborn_integral_with(&func, &params, levels, target, strategy)?;
            sequence_output(&format!("int {}", func.label()), &seq, &cfg, vec![("f".into(), func.label())])
        }
        Command::Bernoulli { n, a } => {
            let seq = carlitz_bernoulli(*n, *a, &params, levels, target)?;
            sequence_output(&format!("beta_{n}:{a}"), &seq, &cfg, Vec::new())
        }
        Command::Mahler { f, order } => {
            let func = IntegrableFunction::from_spec(f, &params)?;
            let series = mahler_coefficients(&func, *order, &params)?;
            let roundtrip = (0..=*order as u128).all(|i| {
                let (a, b) = (mahler_evaluate(&series, i), func.eval(i));
                a.congruent(&b, a.precision().min(b.precision()))
            });
            let profile = series.decay_profile();
            let rows: Vec<Vec<String>> = series
                .entries()
                .iter()
                .map(|e| vec![e.n.to_string(), cfg.show(&e.value), e.norm.to_string()])
                .collect();
            Output {
                json: json!({
                    "f": func.label(),
                    "basis": series.basis(),
                    "roundtrip_exact": roundtrip,
                    "monotone_from": profile.monotone_from,
                    "envelope_from": profile.envelope_from,
                    "coefficients": rows.iter().map(|r| json!({"n": r[0], "value": r[1], "norm": r[2]})).collect::<Vec<_>>(),
                }),
                notes: vec![
                    ("f".into(), func.label()),
                    ("basis".into(), format!("{:?}", series.basis())),
                    ("roundtrip exact".into(), roundtrip.to_string()),
                    ("norms non-increasing from".into(), profile.monotone_from.to_string()),
                ],
                columns: vec!["n".into(), "a_n".into(), "|a_n|".into()],
                rows,
            }
        }
        Command::RnDeriv { x, f } => {
            let d = distribution(f, &params, cfg.inner_target())?;
            let seq = radon_nikodym_derivative(d.as_ref(), &params, *x, levels, target)?;
            sequence_output(&format!("A_N({x})"), &seq, &cfg, vec![("distribution".into(), d.family())])
        }
        Command::Audit { .. } => bail!("unreachable"),
    };
    Ok((out.render(cli.out)?, 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

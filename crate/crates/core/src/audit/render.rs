use std::fmt::Write as _;

use super::AuditSuite;
use crate::error::{PadicError, Result};

pub fn render_json(suite: &AuditSuite) -> Result<String> {
    let mut s = serde_json::to_string_pretty(suite).map_err(|e| PadicError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// One row per check quantity, constant and table entry.
pub fn render_csv(suite: &AuditSuite) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| PadicError::Parse(e.to_string());
    w.write_record(["theorem", "section", "name", "key", "value", "verdict"]).map_err(err)?;
    for r in &suite.reports {
        for c in &r.checks {
            let v = c.verdict.to_string();
            w.write_record([&r.theorem, "check", &c.name, "relation", &c.relation, &v]).map_err(err)?;
            for q in &c.measured {
                w.write_record([&r.theorem, "check", &c.name, &q.name, &q.value, &v]).map_err(err)?;
            }
        }
        for q in &r.constants {
            w.write_record([&r.theorem, "constant", &q.name, "value", &q.value, ""]).map_err(err)?;
        }
        for t in &r.tables {
            for row in &t.rows {
                let level = row.level.to_string();
                w.write_record([&r.theorem, "table", &t.name, &level, &row.value, &row.cauchy_rate])
                    .map_err(err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| PadicError::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| PadicError::Parse(e.to_string()))
}

pub fn render_table(suite: &AuditSuite) -> String {
    let mut out = String::new();
    let c = &suite.config;
    let _ = writeln!(
        out,
        "p={} m={} rho={} q={} levels={}..{} seed={} t={} W={}",
        c.p, c.precision, c.rho, c.q, c.min_level, c.max_level, c.seed, c.tolerance, suite.working_precision
    );
    for r in &suite.reports {
        let _ = writeln!(out, "\n== {} {} [{}]", r.theorem, r.title, r.verdict);
        for check in &r.checks {
            let _ = writeln!(out, "  {:<13} {}", check.verdict.to_string(), check.name);
            for q in &check.measured {
                let _ = writeln!(out, "                {} = {}", q.name, q.value);
            }
        }
        if !r.constants.is_empty() {
            let _ = writeln!(out, "  constants");
            for q in &r.constants {
                let _ = writeln!(out, "    {} = {}", q.name, q.value);
            }
        }
    }
    let _ = writeln!(out, "\noverall: {}", suite.verdict);
    out
}

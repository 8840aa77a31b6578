//! Report serialization. The JSON schema is fixed:
//!
//! ```text
//! {"suite", "timestamp", "config", "records", "all_pass"}
//! ```
//!
//! with each record carrying
//! `{"identity_id", "params", "lhs", "rhs", "abs_err", "rel_err", "tol",
//!   "pass", "notes"}`. Every real number is serialized as a decimal with 17
//! significant digits so reports diff cleanly across runs and platforms.

use std::fmt::Write as _;

use glmix_core::mixtures::VerificationRecord;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::suites::{SuiteConfig, SuiteName};

/// A full run: configuration echo plus the sorted records.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub timestamp: String,
    pub config: SuiteConfig,
    pub records: Vec<VerificationRecord>,
    pub all_pass: bool,
}

impl SuiteReport {
    pub fn new(config: SuiteConfig, records: Vec<VerificationRecord>) -> Self {
        let suite = config
            .suites
            .iter()
            .map(SuiteName::as_str)
            .collect::<Vec<_>>()
            .join("+");
        let all_pass = records.iter().all(|r| r.pass);
        let timestamp = OffsetDateTime::now_utc()
            .format(&Rfc3339)
            .unwrap_or_else(|_| "1970-01-01T00:00:00Z".into());
        Self { suite, timestamp, config, records, all_pass }
    }

    pub fn to_json(&self) -> String {
        let mut out = String::with_capacity(256 + self.records.len() * 256);
        out.push_str("{\n");
        let _ = writeln!(out, "  \"suite\": {},", json_string(&self.suite));
        let _ = writeln!(out, "  \"timestamp\": {},", json_string(&self.timestamp));
        out.push_str("  \"config\": {\n");
        let suites = self
            .config
            .suites
            .iter()
            .map(|s| json_string(s.as_str()))
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "    \"suites\": [{suites}],");
        match self.config.abs_tol {
            Some(t) => {
                let _ = writeln!(out, "    \"abs_tol\": {},", json_number(t));
            }
            None => out.push_str("    \"abs_tol\": null,\n"),
        }
        let _ = writeln!(out, "    \"mc_samples\": {},", self.config.mc_samples);
        let _ = writeln!(out, "    \"seed\": {},", self.config.seed);
        match &self.config.output_path {
            Some(p) => {
                let _ = writeln!(out, "    \"output_path\": {},", json_string(p));
            }
            None => out.push_str("    \"output_path\": null,\n"),
        }
        out.push_str("    \"format\": \"json\"\n  },\n");
        out.push_str("  \"records\": [\n");
        for (i, r) in self.records.iter().enumerate() {
            out.push_str("    {");
            let _ = write!(out, "\"identity_id\": {}, ", json_string(&r.identity_id));
            out.push_str("\"params\": {");
            for (k, (name, value)) in r.params.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", json_string(name), json_number(*value));
            }
            out.push_str("}, ");
            let _ = write!(out, "\"lhs\": {}, ", json_number(r.lhs));
            let _ = write!(out, "\"rhs\": {}, ", json_number(r.rhs));
            let _ = write!(out, "\"abs_err\": {}, ", json_number(r.abs_err));
            let _ = write!(out, "\"rel_err\": {}, ", json_number(r.rel_err));
            let _ = write!(out, "\"tol\": {}, ", json_number(r.tol));
            let _ = write!(out, "\"pass\": {}, ", r.pass);
            let _ = write!(out, "\"notes\": {}", json_string(&r.notes));
            out.push_str(if i + 1 < self.records.len() { "},\n" } else { "}\n" });
        }
        out.push_str("  ],\n");
        let _ = writeln!(out, "  \"all_pass\": {}", self.all_pass);
        out.push_str("}\n");
        out
    }
}

/// Decimal with 17 significant digits; non-finite values become null.
pub fn json_number(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    format!("{x:.16e}")
}

/// A value formatted to `digits` significant digits in plain decimal where
/// reasonable, falling back to exponent notation for extreme magnitudes.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= digits as i32 {
        format!("{:.*e}", digits - 1, x)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

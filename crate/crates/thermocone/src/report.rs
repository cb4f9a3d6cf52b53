//! Output envelopes: a JSON wrapper carrying configuration, results, and
//! provenance, and versioned CSV writers for sweep/grid tables and
//! boundary polylines.
//!
//! Both formats are deterministic: field order follows struct declaration,
//! floats print in shortest round-trip form, and the CSV schema is pinned
//! by a leading comment line so downstream parsers can detect drift.

use serde::Serialize;

use crate::entanglement::EntGridRow;
use crate::error::{Result, ThermoconeError};
use crate::sampling::InducedMeasureSpec;
use crate::volumes::{GridRow, SweepRow};

/// Comment line identifying the CSV column layout version.
pub const CSV_SCHEMA_HEADER: &str = "# thermocone-schema v1";

/// Who produced a result and how to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// Master RNG seed (0 when the computation used none).
    pub seed: u64,
    /// Library version that produced the output.
    pub version: &'static str,
}

impl Provenance {
    /// Provenance for the current library version.
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Top-level JSON object: the echoed configuration, the results, and
/// provenance.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    /// Echo of the validated input configuration.
    pub config: C,
    /// The computed results.
    pub results: R,
    /// Seed and version.
    pub provenance: Provenance,
}

impl<C: Serialize, R: Serialize> Envelope<C, R> {
    /// Wraps results with their configuration and provenance.
    pub fn new(config: C, results: R, seed: u64) -> Self {
        Self {
            config,
            results,
            provenance: Provenance::new(seed),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| {
            ThermoconeError::Numerical {
                context: "json",
                message: format!("serialization failed: {e}"),
            }
        })?;
        s.push('\n');
        Ok(s)
    }
}

/// Appends one CSV row of fields (no quoting needed: numeric and
/// hyphen-joined fields only).
fn push_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

/// CSV for a β sweep: one line per (β, permutation) pair.  Columns:
/// state coordinates, β, the three volumes, the standard error (blank for
/// exact results), the permutation (indices joined by `-`), and the kink
/// flag of the row's β.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let dim = rows
        .first()
        .and_then(|r| r.entries.first())
        .map_or(0, |e| e.state.len());
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_HEADER);
    out.push('\n');
    let mut header: Vec<String> = (1..=dim).map(|i| format!("p{i}")).collect();
    header.extend(
        ["beta", "v_future", "v_past", "v_incomparable", "std_error", "permutation", "kink"]
            .map(String::from),
    );
    push_row(&mut out, &header);
    for row in rows {
        for entry in &row.entries {
            let mut fields: Vec<String> = entry.state.iter().map(|x| format!("{x}")).collect();
            fields.push(format!("{}", row.beta));
            fields.push(format!("{}", entry.report.v_future));
            fields.push(format!("{}", entry.report.v_past));
            fields.push(format!("{}", entry.report.v_incomparable));
            fields.push(fmt_opt(entry.report.std_error));
            fields.push(
                entry
                    .permutation
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join("-"),
            );
            fields.push(row.kink.to_string());
            push_row(&mut out, &fields);
        }
    }
    out
}

/// CSV for an isovolumetric grid at one inverse temperature.  Columns:
/// state coordinates, β, the three volumes, and the standard error.
pub fn grid_csv(rows: &[GridRow], beta: &str) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_HEADER);
    out.push('\n');
    push_row(
        &mut out,
        &["p1", "p2", "p3", "beta", "v_future", "v_past", "v_incomparable", "std_error"]
            .map(String::from),
    );
    for row in rows {
        let mut fields: Vec<String> = row.state.iter().map(|x| format!("{x}")).collect();
        fields.push(beta.to_string());
        fields.push(format!("{}", row.report.v_future));
        fields.push(format!("{}", row.report.v_past));
        fields.push(format!("{}", row.report.v_incomparable));
        fields.push(fmt_opt(row.report.std_error));
        push_row(&mut out, &fields);
    }
    out
}

/// CSV for an entanglement grid: the volumes-module schema with the
/// sampling parameters (N, M, n, seed) in extra header-comment lines and a
/// permutation-weight column.
pub fn ent_grid_csv(rows: &[EntGridRow], spec: &InducedMeasureSpec, n: u64) -> String {
    let dim = rows.first().map_or(spec.n_sys(), |r| r.state.len());
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_HEADER);
    out.push('\n');
    out.push_str(&format!(
        "# n_sys={} m_env={} samples={} seed={}\n",
        spec.n_sys(),
        spec.m_env(),
        n,
        spec.seed()
    ));
    let mut header: Vec<String> = (1..=dim).map(|i| format!("l{i}")).collect();
    header.extend(
        ["weight", "v_future", "v_past", "v_incomparable", "std_error"].map(String::from),
    );
    push_row(&mut out, &header);
    for row in rows {
        let mut fields: Vec<String> = row.state.iter().map(|x| format!("{x}")).collect();
        fields.push(row.weight.to_string());
        fields.push(format!("{}", row.report.v_future));
        fields.push(format!("{}", row.report.v_past));
        fields.push(format!("{}", row.report.v_incomparable));
        fields.push(fmt_opt(row.report.std_error));
        push_row(&mut out, &fields);
    }
    out
}

/// CSV for a two-column boundary polyline with caller-chosen column names
/// (e.g. `d,q` for coherence curves, `x,z` for Bloch circles).
pub fn polyline_csv(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_HEADER);
    out.push('\n');
    out.push_str(&format!("{x_label},{y_label}\n"));
    for &(x, y) in points {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

//! Report serialization, grouping views, framework comparison and the cost
//! table export for external graph optimizers.

use crate::aggregate::{Entries, ProfileReport};
use crate::config::FrameworkConfig;
use crate::cost::{CostTuple, OpExtras, SecurityParams};
use crate::error::{Error, Result};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grouping {
    Label,
    Operator,
    ForwardBackward,
}

impl Grouping {
    pub fn parse(text: &str) -> Result<Grouping> {
        match text {
            "label" => Ok(Grouping::Label),
            "operator" => Ok(Grouping::Operator),
            "fb" | "forward-backward" => Ok(Grouping::ForwardBackward),
            other => Err(Error::Request(format!("unknown grouping `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Online,
    Offline,
    Both,
}

impl Phase {
    pub fn parse(text: &str) -> Result<Phase> {
        match text {
            "online" => Ok(Phase::Online),
            "offline" => Ok(Phase::Offline),
            "both" => Ok(Phase::Both),
            other => Err(Error::Request(format!("unknown phase `{other}`"))),
        }
    }
}

/// The operator an entry belongs to: the segment before the first
/// `forward`/`backward` marker; labels without a marker bucket by their last
/// segment, except optimizer steps which keep the `optimizer` name.
pub fn operator_bucket(label: &str) -> &str {
    let segments: Vec<&str> = label.split('-').collect();
    for i in 1..segments.len() {
        if segments[i] == "forward" || segments[i] == "backward" {
            return segments[i - 1];
        }
    }
    if segments.len() >= 2 && segments[segments.len() - 1] == "step" {
        return segments[segments.len() - 2];
    }
    segments[segments.len() - 1]
}

fn phase_bucket(label: &str) -> &'static str {
    for segment in label.split('-') {
        if segment == "backward" {
            return "backward";
        }
    }
    for segment in label.split('-') {
        if segment == "forward" {
            return "forward";
        }
    }
    "other"
}

/// Groups entries into disjoint buckets that sum to the report total.
pub fn group_report(report: &ProfileReport, grouping: Grouping) -> Entries {
    let mut out = Entries::new();
    for (label, cost) in &report.entries {
        let key = match grouping {
            Grouping::Label => label.as_str(),
            Grouping::Operator => operator_bucket(label),
            Grouping::ForwardBackward => phase_bucket(label),
        };
        *out.entry(key.to_string()).or_insert(CostTuple::ZERO) += *cost;
    }
    out
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

pub fn to_json(report: &ProfileReport) -> String {
    serde_json::to_string_pretty(report).expect("reports are serializable")
}

pub fn from_json(text: &str) -> Result<ProfileReport> {
    serde_json::from_str(text).map_err(|e| Error::Request(format!("bad report JSON: {e}")))
}

pub const CSV_HEADER: &str = "label,online_bits,online_rounds,offline_bits,offline_rounds";

pub fn to_csv(report: &ProfileReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (label, c) in &report.entries {
        let _ = writeln!(
            out,
            "{label},{},{},{},{}",
            c.online_bits, c.online_rounds, c.offline_bits, c.offline_rounds
        );
    }
    out
}

/// Parses entries back out of the CSV form (framework/params travel in JSON).
pub fn entries_from_csv(text: &str) -> Result<Entries> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        _ => return Err(Error::Request("missing CSV header".into())),
    }
    let mut entries = Entries::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Request(format!("bad CSV row `{line}`")));
        }
        let val = |i: usize| -> Result<u64> {
            fields[i]
                .parse()
                .map_err(|_| Error::Request(format!("bad CSV number `{}`", fields[i])))
        };
        entries.insert(
            fields[0].to_string(),
            CostTuple::new(val(1)?, val(2)?, val(3)?, val(4)?),
        );
    }
    Ok(entries)
}

/// Human-readable table, sorted by online bits descending, with a total row.
pub fn to_table(report: &ProfileReport, grouping: Grouping, phase: Phase) -> String {
    let entries = group_report(report, grouping);
    let mut rows: Vec<(&String, &CostTuple)> = entries.iter().collect();
    rows.sort_by(|a, b| b.1.online_bits.cmp(&a.1.online_bits).then_with(|| a.0.cmp(b.0)));
    let key_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .chain(["label".len(), "TOTAL".len()])
        .max()
        .unwrap_or(5);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} (k={}, kappa_s={}, kappa={}, f={}, m={})",
        report.framework,
        report.params.k,
        report.params.kappa_s,
        report.params.kappa,
        report.params.f,
        report.params.m
    );
    let header: &[&str] = match phase {
        Phase::Online => &["online_bits", "online_rounds"],
        Phase::Offline => &["offline_bits", "offline_rounds"],
        Phase::Both => &["online_bits", "online_rounds", "offline_bits", "offline_rounds"],
    };
    let _ = write!(out, "{:key_width$}", "label");
    for h in header {
        let _ = write!(out, "  {h:>16}");
    }
    out.push('\n');
    let write_row = |label: &str, c: &CostTuple, out: &mut String| {
        let cols: Vec<u64> = match phase {
            Phase::Online => vec![c.online_bits, c.online_rounds],
            Phase::Offline => vec![c.offline_bits, c.offline_rounds],
            Phase::Both => c.as_array().to_vec(),
        };
        let _ = write!(out, "{label:key_width$}");
        for v in cols {
            let _ = write!(out, "  {v:>16}");
        }
        out.push('\n');
    };
    for (label, cost) in &rows {
        write_row(label, cost, &mut out);
    }
    write_row("TOTAL", &report.total(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// framework comparison
// ---------------------------------------------------------------------------

/// Per-operator share of online communication, one column per framework.
pub struct ComparisonTable {
    pub operators: Vec<String>,
    /// (framework name, share per operator in percent).
    pub columns: Vec<(String, Vec<f64>)>,
}

pub fn compare_frameworks(reports: &[ProfileReport]) -> Result<ComparisonTable> {
    if reports.is_empty() {
        return Err(Error::Request("no reports to compare".into()));
    }
    let fingerprint = &reports[0].fingerprint;
    for r in reports {
        if !r.fingerprint.is_empty() && !fingerprint.is_empty() && r.fingerprint != *fingerprint {
            return Err(Error::Request(
                "reports compare different programs (fingerprint mismatch)".into(),
            ));
        }
    }
    let mut operators: Vec<String> = Vec::new();
    let grouped: Vec<Entries> = reports
        .iter()
        .map(|r| group_report(r, Grouping::Operator))
        .collect();
    for g in &grouped {
        for op in g.keys() {
            if !operators.contains(op) {
                operators.push(op.clone());
            }
        }
    }
    let mut columns = Vec::with_capacity(reports.len());
    for (report, entries) in reports.iter().zip(&grouped) {
        let total = report.total().online_bits as f64;
        let shares = operators
            .iter()
            .map(|op| {
                let bits = entries.get(op).map_or(0, |c| c.online_bits) as f64;
                if total == 0.0 {
                    0.0
                } else {
                    100.0 * bits / total
                }
            })
            .collect();
        columns.push((report.framework.clone(), shares));
    }
    Ok(ComparisonTable { operators, columns })
}

pub fn comparison_to_table(table: &ComparisonTable) -> String {
    let key_width = table
        .operators
        .iter()
        .map(|o| o.len())
        .chain(std::iter::once("operator".len()))
        .max()
        .unwrap_or(8);
    let mut out = String::new();
    let _ = write!(out, "{:key_width$}", "operator");
    for (fw, _) in &table.columns {
        let _ = write!(out, "  {fw:>12}");
    }
    out.push('\n');
    for (i, op) in table.operators.iter().enumerate() {
        let _ = write!(out, "{op:key_width$}");
        for (_, shares) in &table.columns {
            let _ = write!(out, "  {:>11.2}%", shares[i]);
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// cost-model export
// ---------------------------------------------------------------------------

pub const EXPORT_HEADER: &str = "op,p,q,r,online_bits";

/// Evaluates one op over a grid of (p, q, r) dimensions and renders a CSV
/// table mapping each signature to its online bits, for consumption by an
/// external computational-graph optimizer.
pub fn export_cost_table(
    framework: &FrameworkConfig,
    params: &SecurityParams,
    op: &str,
    grid: &[(u64, u64, u64)],
) -> Result<String> {
    let mut out = String::new();
    out.push_str(EXPORT_HEADER);
    out.push('\n');
    for &(p, q, r) in grid {
        let extras = OpExtras::matmul(p, q, r);
        let cost = framework.evaluate(op, params, &extras)?;
        let _ = writeln!(out, "{op},{p},{q},{r},{}", cost.online_bits);
    }
    Ok(out)
}

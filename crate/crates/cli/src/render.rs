//! Rendering of output documents as JSON, sectioned CSV or fixed-width text.
//!
//! Every real number is printed with exactly nine decimal places so output
//! is byte-stable across runs.

use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Number, Value};

use crate::docs::{ClassifyDoc, FuseDoc, ReportDoc, VbsaDoc};
use dsfuse::{ImpactThresholds, OutcomeInterval, SensitivityResult, SourceImpact};

pub const DECIMALS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Table,
}

/// `{:.9}`, with negative zero folded to zero.
pub fn num(v: f64) -> String {
    let s = format!("{v:.DECIMALS$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn fix_decimals(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let text = num(n.as_f64().expect("f64 number"));
            Value::Number(Number::from_str(&text).expect("formatted float is valid JSON"))
        }
        Value::Array(items) => Value::Array(items.into_iter().map(fix_decimals).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, fix_decimals(v))).collect())
        }
        other => other,
    }
}

/// Pretty JSON with sorted keys and fixed-precision reals.
pub fn json<T: Serialize>(doc: &T) -> String {
    let value = serde_json::to_value(doc).expect("documents serialize to JSON");
    let mut out = serde_json::to_string_pretty(&fix_decimals(value)).expect("JSON value prints");
    out.push('\n');
    out
}

/// Accumulates `# section` blocks of CSV records.
struct CsvSections {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvSections {
    fn new() -> Self {
        Self {
            writer: csv::WriterBuilder::new()
                .flexible(true)
                .from_writer(Vec::new()),
        }
    }

    fn section(&mut self, name: &str) -> &mut Self {
        self.writer
            .write_record([format!("# {name}")])
            .expect("in-memory csv");
        self
    }

    fn row<I, S>(&mut self, fields: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory csv");
        self
    }

    fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory csv");
        String::from_utf8(bytes).expect("csv output is utf-8")
    }
}

/// Plain fixed-width table. Numeric columns are right-aligned, the rest left.
struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    fn new<I: IntoIterator<Item = S>, S: Into<String>>(header: I) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate().take(cols) {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
        let numeric: Vec<bool> = (0..cols)
            .map(|i| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(i))
                    .filter(|c| !c.is_empty())
                    .all(|c| c.parse::<f64>().is_ok())
            })
            .collect();
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, cell) in cells.iter().enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                if numeric[i] {
                    s.push_str(&format!("{cell:>w$}", w = widths[i]));
                } else {
                    s.push_str(&format!("{cell:<w$}", w = widths[i]));
                }
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        let total: usize = widths.iter().sum::<usize>() + 2 * (cols.saturating_sub(1));
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

fn masses_table(masses: &std::collections::BTreeMap<String, f64>) -> String {
    let mut t = TextTable::new(["subset", "mass"]);
    for (subset, m) in masses {
        t.row(vec![subset.clone(), num(*m)]);
    }
    t.render()
}

fn intervals_table(intervals: &[OutcomeInterval]) -> String {
    let mut t = TextTable::new(["outcome", "belief", "plausibility", "width"]);
    for i in intervals {
        t.row(vec![
            i.outcome.clone(),
            num(i.belief),
            num(i.plausibility),
            num(i.width),
        ]);
    }
    t.render()
}

fn impact_table(impacts: &[SourceImpact]) -> String {
    let mut t = TextTable::new(["source", "max_u", "level"]);
    for i in impacts {
        t.row(vec![i.source.clone(), num(i.max_u), i.level.to_string()]);
    }
    t.render()
}

fn ranking_table(ranking: &[SensitivityResult]) -> String {
    let mut t = TextTable::new(["rank", "source", "outcome", "var_bel", "var_pl", "score"]);
    for (rank, r) in ranking.iter().enumerate() {
        for (j, o) in r.outcomes.iter().enumerate() {
            let (rank_cell, source_cell, score_cell) = if j == 0 {
                ((rank + 1).to_string(), r.source.clone(), num(r.score))
            } else {
                (String::new(), String::new(), String::new())
            };
            t.row(vec![
                rank_cell,
                source_cell,
                o.outcome.clone(),
                num(o.var_bel),
                num(o.var_pl),
                score_cell,
            ]);
        }
    }
    t.render()
}

fn thresholds_line(t: &ImpactThresholds, derived: bool) -> String {
    format!(
        "thresholds: tau1 = {}, tau2 = {}{}\n",
        num(t.tau1),
        num(t.tau2),
        if derived {
            " (derived from quartiles)"
        } else {
            ""
        }
    )
}

fn csv_masses(w: &mut CsvSections, masses: &std::collections::BTreeMap<String, f64>) {
    w.section("masses").row(["subset", "mass"]);
    for (subset, m) in masses {
        w.row([subset.clone(), num(*m)]);
    }
}

fn csv_intervals(w: &mut CsvSections, intervals: &[OutcomeInterval]) {
    w.section("intervals")
        .row(["outcome", "belief", "plausibility", "width"]);
    for i in intervals {
        w.row([
            i.outcome.clone(),
            num(i.belief),
            num(i.plausibility),
            num(i.width),
        ]);
    }
}

fn csv_thresholds(w: &mut CsvSections, t: &ImpactThresholds, derived: bool) {
    w.section("thresholds")
        .row(["tau1", "tau2", "derived"])
        .row([num(t.tau1), num(t.tau2), derived.to_string()]);
}

fn csv_impact(w: &mut CsvSections, impacts: &[SourceImpact]) {
    w.section("impact").row(["source", "max_u", "level"]);
    for i in impacts {
        w.row([i.source.clone(), num(i.max_u), i.level.to_string()]);
    }
}

fn csv_sensitivity(w: &mut CsvSections, ranking: &[SensitivityResult]) {
    w.section("sensitivity")
        .row(["rank", "source", "score", "outcome", "var_bel", "var_pl"]);
    for (rank, r) in ranking.iter().enumerate() {
        for o in &r.outcomes {
            w.row([
                (rank + 1).to_string(),
                r.source.clone(),
                num(r.score),
                o.outcome.clone(),
                num(o.var_bel),
                num(o.var_pl),
            ]);
        }
    }
}

/// Flat `(source, outcome, var_bel, var_pl)` rows for external plotting.
pub fn plot_data(ranking: &[SensitivityResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["source", "outcome", "var_bel", "var_pl"])
        .expect("in-memory csv");
    for r in ranking {
        for o in &r.outcomes {
            w.write_record([
                r.source.as_str(),
                o.outcome.as_str(),
                &num(o.var_bel),
                &num(o.var_pl),
            ])
            .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn fuse(doc: &FuseDoc, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(doc),
        OutputFormat::Csv => {
            let mut w = CsvSections::new();
            w.section("fusion")
                .row(["rule", "order"])
                .row([doc.rule.to_string(), doc.order.join(" ")]);
            csv_masses(&mut w, &doc.masses);
            csv_intervals(&mut w, &doc.intervals);
            w.finish()
        }
        OutputFormat::Table => format!(
            "rule: {}\norder: {}\n\n{}\n{}",
            doc.rule,
            doc.order.join(" -> "),
            masses_table(&doc.masses),
            intervals_table(&doc.intervals)
        ),
    }
}

pub fn classify(doc: &ClassifyDoc, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(doc),
        OutputFormat::Csv => {
            let mut w = CsvSections::new();
            csv_thresholds(&mut w, &doc.thresholds, doc.thresholds_derived);
            csv_impact(&mut w, &doc.sources);
            w.finish()
        }
        OutputFormat::Table => format!(
            "rule: {}\n{}\n{}",
            doc.rule,
            thresholds_line(&doc.thresholds, doc.thresholds_derived),
            impact_table(&doc.sources)
        ),
    }
}

pub fn vbsa(doc: &VbsaDoc, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(doc),
        OutputFormat::Csv => {
            let mut w = CsvSections::new();
            csv_sensitivity(&mut w, &doc.ranking);
            w.finish()
        }
        OutputFormat::Table => format!("rule: {}\n\n{}", doc.rule, ranking_table(&doc.ranking)),
    }
}

pub fn report(doc: &ReportDoc, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(doc),
        OutputFormat::Csv => {
            let mut w = CsvSections::new();
            w.section("metadata")
                .row(["key", "value"])
                .row(["tool", doc.tool.name.as_str()])
                .row(["version", doc.tool.version.as_str()])
                .row(["title", doc.scenario.title.as_str()])
                .row(["rule", doc.rule.name()])
                .row(["order", doc.order.join(" ").as_str()]);
            csv_masses(&mut w, &doc.masses);
            csv_intervals(&mut w, &doc.intervals);
            csv_thresholds(&mut w, &doc.thresholds, doc.thresholds_derived);
            csv_impact(&mut w, &doc.impact);
            csv_sensitivity(&mut w, &doc.sensitivity);
            w.finish()
        }
        OutputFormat::Table => {
            let mut out = format!(
                "{} {}\nscenario: {}\nsources: {}, outcomes: {}, edges: {}\nrule: {}\norder: {}\n",
                doc.tool.name,
                doc.tool.version,
                doc.scenario.title,
                doc.scenario.sources,
                doc.scenario.outcomes.len(),
                doc.scenario.edges,
                doc.rule,
                doc.order.join(" -> "),
            );
            out.push_str("\nfused masses\n");
            out.push_str(&masses_table(&doc.masses));
            out.push_str("\nintervals\n");
            out.push_str(&intervals_table(&doc.intervals));
            out.push('\n');
            out.push_str(&thresholds_line(&doc.thresholds, doc.thresholds_derived));
            out.push_str(&impact_table(&doc.impact));
            out.push_str("\nsensitivity\n");
            out.push_str(&ranking_table(&doc.sensitivity));
            out
        }
    }
}

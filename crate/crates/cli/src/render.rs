use std::fmt::Write as _;

use anyhow::Result;
use serde::Serialize;
use uqrs::classify::{IsoClass, IsoTable};

use crate::{OutputFormat, TableFormat};

#[derive(Serialize, Clone, Copy)]
pub struct PrimeCheck {
    pub p: u64,
    pub formula: u64,
    pub enumerated: u64,
}

#[derive(Serialize)]
struct ClassRecord<'a> {
    row: usize,
    representative: (u64, u64),
    members: &'a [(u64, u64)],
    m: u64,
    ell_prime: u64,
    dimension: Option<&'a str>,
    double: Option<bool>,
    standard: bool,
}

#[derive(Serialize)]
struct ClassifyJson<'a> {
    command: &'static str,
    family: String,
    order: u64,
    sl_rank: usize,
    classes: Vec<ClassRecord<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prime_check: Option<PrimeCheck>,
}

#[derive(Serialize)]
pub struct DimensionReport {
    pub command: &'static str,
    pub rank: usize,
    pub order: u64,
    pub x: i64,
    pub y: i64,
    pub scope: String,
    pub counted: u64,
    pub formula: u64,
    pub exponent: u32,
}

#[derive(Serialize)]
pub struct RefComparison {
    pub available: bool,
    pub reference: Option<String>,
    pub reference_total: Option<u64>,
    pub identical: Option<bool>,
    /// (dimension, computed multiplicity, reference multiplicity).
    pub rows: Vec<(u64, u64, u64)>,
}

#[derive(Serialize)]
pub struct DistReport {
    pub command: &'static str,
    pub rank: usize,
    pub order: u64,
    pub x: i64,
    pub y: i64,
    pub distribution: String,
    pub entries: Vec<(u64, u64)>,
    pub total: u64,
    pub expected_total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<RefComparison>,
}

#[derive(Serialize)]
pub struct SkewReport {
    pub command: &'static str,
    pub rank: usize,
    pub order: u64,
    pub x: i64,
    pub y: i64,
    pub g: String,
    pub h: String,
    pub dimension: usize,
    pub basis: Vec<String>,
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn pair_list(members: &[(u64, u64)]) -> String {
    members
        .iter()
        .map(|(x, y)| format!("({x},{y})"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn record(i: usize, c: &IsoClass) -> ClassRecord<'_> {
    ClassRecord {
        row: i + 1,
        representative: c.representative(),
        members: &c.members,
        m: c.m,
        ell_prime: c.ell_prime,
        dimension: c.dimension.as_deref(),
        double: c.double,
        standard: c.standard,
    }
}

fn flag(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

pub fn classify(table: &IsoTable, check: Option<&PrimeCheck>, format: TableFormat) -> Result<String> {
    let records: Vec<ClassRecord> = table.classes.iter().enumerate().map(|(i, c)| record(i, c)).collect();
    let mut out = String::new();
    match format {
        TableFormat::Json => {
            return json(&ClassifyJson {
                command: "classify",
                family: table.family.to_string(),
                order: table.order,
                sl_rank: table.sl_rank,
                classes: records,
                prime_check: check.copied(),
            })
        }
        TableFormat::Markdown => {
            writeln!(out, "Type {}, L = {}: {} classes", table.family, table.order, records.len())?;
            writeln!(out)?;
            writeln!(out, "| # | pairs | m | l' | dimension | double | standard |")?;
            writeln!(out, "|---|---|---|---|---|---|---|")?;
            for r in &records {
                writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    r.row,
                    pair_list(r.members),
                    r.m,
                    r.ell_prime,
                    r.dimension.map_or("-".to_string(), |d| d.replace("(n+2)(n-1)", &format!("{}", dim_exponent(table.sl_rank)))),
                    flag(r.double),
                    if r.standard { "yes" } else { "no" }
                )?;
            }
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["row", "representative", "members", "m", "ell_prime", "dimension", "double", "standard"])?;
            for r in &records {
                w.write_record([
                    r.row.to_string(),
                    format!("({},{})", r.representative.0, r.representative.1),
                    pair_list(r.members),
                    r.m.to_string(),
                    r.ell_prime.to_string(),
                    r.dimension.unwrap_or("").to_string(),
                    r.double.map_or(String::new(), |b| b.to_string()),
                    r.standard.to_string(),
                ])?;
            }
            out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        }
    }
    if let Some(c) = check {
        writeln!(
            out,
            "{}prime check p = {}: closed form {}, enumeration {}: {}",
            if format == TableFormat::Csv { "# " } else { "\n" },
            c.p,
            c.formula,
            c.enumerated,
            if c.formula == c.enumerated { "ok" } else { "MISMATCH" }
        )?;
    }
    Ok(out)
}

fn dim_exponent(n: usize) -> usize {
    (n + 2) * (n - 1)
}

pub fn dimension(r: &DimensionReport, format: OutputFormat) -> Result<String> {
    if format == OutputFormat::Json {
        return json(r);
    }
    let mut out = String::new();
    writeln!(out, "sl_{} L = {} (x, y) = ({}, {}) {}", r.rank, r.order, r.x, r.y, r.scope)?;
    writeln!(out, "counted dimension: {}", r.counted)?;
    writeln!(
        out,
        "formula: {}^{} = {} ({})",
        r.order,
        r.exponent,
        r.formula,
        if r.counted == r.formula { "ok" } else { "MISMATCH" }
    )?;
    Ok(out)
}

pub fn distribution(r: &DistReport, format: OutputFormat) -> Result<String> {
    if format == OutputFormat::Json {
        return json(r);
    }
    let mut out = String::new();
    writeln!(out, "{}", r.distribution)?;
    writeln!(out, "total: {} (expected {})", r.total, r.expected_total)?;
    if let Some(c) = &r.comparison {
        match (&c.reference, c.identical) {
            (Some(reference), Some(true)) => writeln!(out, "reference list: {reference}\nmatch: identical")?,
            (Some(reference), _) => {
                writeln!(out, "reference list: {reference} (total {})", c.reference_total.unwrap_or(0))?;
                writeln!(out, "differences (computed vs reference):")?;
                for (d, a, b) in &c.rows {
                    writeln!(out, "  dim {d}: {a} vs {b} ({:+})", *a as i64 - *b as i64)?;
                }
            }
            _ => writeln!(out, "no reference list for these parameters")?,
        }
    }
    Ok(out)
}

pub fn skew(r: &SkewReport, format: OutputFormat) -> Result<String> {
    if format == OutputFormat::Json {
        return json(r);
    }
    let mut out = String::new();
    writeln!(out, "dim P_{{{}, {}}} = {}", r.g, r.h, r.dimension)?;
    for b in &r.basis {
        writeln!(out, "  {b}")?;
    }
    Ok(out)
}

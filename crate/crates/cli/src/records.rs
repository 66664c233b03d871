//! CSV input and output formats.
//!
//! All files are comma-delimited UTF-8 with a header row, decimal-point
//! floats serialized in shortest round-trip form, and infinite endpoints as
//! the literals `inf` / `-inf`. Absent interval fields are empty strings.

use crate::errors::{CliError, CliResult};
use sdci_core::interval::{Interval, SignDecision};
use sdci_core::selection::{SelectionResult, Unit};
use std::io::Read;

/// One row of the `id,estimate[,sd]` input format.
pub fn read_units(reader: impl Read) -> CliResult<(Vec<Unit>, bool)> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let has_sd = match cols.as_slice() {
        ["id", "estimate"] => false,
        ["id", "estimate", "sd"] => true,
        other => {
            return Err(CliError::Parse(format!(
                "expected header id,estimate[,sd], got {other:?}"
            )))
        }
    };
    let mut units = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| -> CliResult<f64> {
            row.get(i)
                .ok_or_else(|| CliError::Parse(format!("line {line}: missing field {i}")))?
                .parse::<f64>()
                .map_err(|e| CliError::Parse(format!("line {line}: {e}")))
        };
        let id = row
            .get(0)
            .ok_or_else(|| CliError::Parse(format!("line {line}: missing id")))?
            .to_string();
        let estimate = field(1)?;
        let sd = if has_sd { field(2)? } else { 1.0 };
        units.push(Unit { id, estimate, sd });
    }
    Ok((units, has_sd))
}

/// One row of the selection output format.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputRow {
    pub id: String,
    pub selected: bool,
    pub decision: SignDecision,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub lower_closed: Option<bool>,
    pub upper_closed: Option<bool>,
    pub adjusted_alpha: f64,
}

pub const OUTPUT_HEADER: [&str; 8] = [
    "id",
    "selected",
    "decision",
    "lower",
    "upper",
    "lower_closed",
    "upper_closed",
    "adjusted_alpha",
];

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn fmt_opt_bool(v: Option<bool>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<T>()
        .map(Some)
        .map_err(|_| CliError::Parse(format!("bad {what}: {s:?}")))
}

impl OutputRow {
    pub fn from_selection(result: &SelectionResult) -> Vec<OutputRow> {
        result
            .units
            .iter()
            .map(|u| OutputRow {
                id: u.id.clone(),
                selected: u.selected,
                decision: u.decision,
                lower: u.interval.as_ref().map(Interval::lower),
                upper: u.interval.as_ref().map(Interval::upper),
                lower_closed: u.interval.as_ref().map(Interval::lower_closed),
                upper_closed: u.interval.as_ref().map(Interval::upper_closed),
                adjusted_alpha: result.adjusted_alpha,
            })
            .collect()
    }

    /// Applies a strictly increasing transform to both endpoints (used to map
    /// z-scale intervals back to the correlation scale).
    pub fn map_endpoints(&mut self, f: impl Fn(f64) -> f64) {
        self.lower = self.lower.map(&f);
        self.upper = self.upper.map(&f);
    }

    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.id.clone(),
            self.selected.to_string(),
            self.decision.as_str().to_string(),
            fmt_opt_f64(self.lower),
            fmt_opt_f64(self.upper),
            fmt_opt_bool(self.lower_closed),
            fmt_opt_bool(self.upper_closed),
            format!("{}", self.adjusted_alpha),
        ]
    }

    pub fn from_record(row: &csv::StringRecord) -> CliResult<OutputRow> {
        if row.len() != OUTPUT_HEADER.len() {
            return Err(CliError::Parse(format!(
                "expected {} fields, got {}",
                OUTPUT_HEADER.len(),
                row.len()
            )));
        }
        let decision = row[2]
            .parse::<SignDecision>()
            .map_err(|e| CliError::Parse(format!("bad decision: {e}")))?;
        Ok(OutputRow {
            id: row[0].to_string(),
            selected: row[1]
                .parse()
                .map_err(|_| CliError::Parse(format!("bad selected flag: {:?}", &row[1])))?,
            decision,
            lower: parse_opt(&row[3], "lower endpoint")?,
            upper: parse_opt(&row[4], "upper endpoint")?,
            lower_closed: parse_opt(&row[5], "lower_closed flag")?,
            upper_closed: parse_opt(&row[6], "upper_closed flag")?,
            adjusted_alpha: row[7]
                .parse()
                .map_err(|_| CliError::Parse(format!("bad adjusted_alpha: {:?}", &row[7])))?,
        })
    }
}

pub fn write_output_rows(rows: &[OutputRow], out: impl std::io::Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(OUTPUT_HEADER)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_output_rows(reader: impl Read) -> CliResult<Vec<OutputRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != OUTPUT_HEADER {
        return Err(CliError::Parse(format!(
            "unexpected output header {headers:?}"
        )));
    }
    rdr.records()
        .map(|row| OutputRow::from_record(&row?))
        .collect()
}

/// GWAS input: `id,n10,n11,n12,n20,n21,n22` (controls then cases by
/// minor-allele count).
pub fn read_tables(reader: impl Read) -> CliResult<Vec<(String, sdci_core::bivariate::Table2x3)>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["id", "n10", "n11", "n12", "n20", "n21", "n22"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Parse(format!(
            "expected header {expected:?}, got {headers:?}"
        )));
    }
    let mut tables = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let count = |i: usize| -> CliResult<u64> {
            row.get(i)
                .ok_or_else(|| CliError::Parse(format!("line {line}: missing field {i}")))?
                .parse::<u64>()
                .map_err(|e| CliError::Parse(format!("line {line}: {e}")))
        };
        tables.push((
            row.get(0).unwrap_or("").to_string(),
            sdci_core::bivariate::Table2x3::new(
                [count(1)?, count(2)?, count(3)?],
                [count(4)?, count(5)?, count(6)?],
            ),
        ));
    }
    Ok(tables)
}

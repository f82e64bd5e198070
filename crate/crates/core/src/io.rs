//! Text formats: unit-suffixed quantities, grids, and the fixed-column
//! CSV/JSON tables every dataset is written as.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mode::{Family, Geometry, ModeId, Parity};
use crate::spectrum::{ChartRow, FlowRow, Spectrum, SpectrumEntry};

/// Version tag written at the top of every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Column order of every emitted table.
pub const TABLE_COLUMNS: [&str; 12] = [
    "r_m",
    "R_m",
    "eps",
    "family",
    "parity",
    "k",
    "n",
    "m",
    "F",
    "f_hz",
    "multiplicity",
    "extrapolated",
];

/// Nine significant digits, lowercase exponent.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

/// Plain decimal with twelve significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Rounds through [`fmt_num`] so JSON and CSV carry the same digits.
pub fn rounded(x: f64) -> f64 {
    fmt_num(x).parse().expect("formatted float parses")
}

pub fn parse_f64(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: `{s}` is not finite")));
    }
    Ok(v)
}

/// Reads `family,parity,k,n,m` from the first five fields; all-empty means
/// "unlabeled".
pub fn parse_mode_fields(record: &csv::StringRecord, line: usize) -> Result<Option<ModeId>> {
    let field = |i: usize| record.get(i).unwrap_or("").trim();
    if (0..5).all(|i| field(i).is_empty() || (i == 1 && field(i) == "0")) {
        return Ok(None);
    }
    let family = match field(0).to_ascii_uppercase().as_str() {
        "TE" => Family::TE,
        "TM" => Family::TM,
        other => {
            return Err(Error::Parse(format!(
                "line {line}: unknown family `{other}`"
            )))
        }
    };
    let parity_text = field(1).trim_start_matches('+');
    let parity_sign: i8 = if parity_text.is_empty() {
        0
    } else {
        parity_text
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: bad parity `{}`", field(1))))?
    };
    let index = |i: usize| {
        field(i)
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("line {line}: bad mode index `{}`", field(i))))
    };
    Ok(Some(ModeId {
        family,
        parity: Parity::from_sign(parity_sign)?,
        k: index(2)?,
        n: index(3)?,
        m: index(4)?,
    }))
}

fn split_unit(s: &str) -> (&str, &str) {
    let s = s.trim();
    let idx = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_alphabetic())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    // a trailing exponent such as `1e` is not a unit
    if idx < s.len() && s[idx..].eq_ignore_ascii_case("e") {
        return (s, "");
    }
    (&s[..idx], &s[idx..])
}

/// Length with optional `mm`, `cm`, `um` or `m` suffix; bare numbers are metres.
pub fn parse_length(s: &str) -> Result<f64> {
    let (num, unit) = split_unit(s);
    let scale = match unit {
        "" | "m" => 1.0,
        "cm" => 1e-2,
        "mm" => 1e-3,
        "um" => 1e-6,
        other => {
            return Err(Error::Parse(format!(
                "unknown length unit `{other}` in `{s}`"
            )))
        }
    };
    Ok(parse_f64(num, 0).map_err(|_| Error::Parse(format!("bad length `{s}`")))? * scale)
}

/// Frequency with optional `Hz`, `kHz`, `MHz` or `GHz` suffix (case-insensitive).
pub fn parse_frequency(s: &str) -> Result<f64> {
    let (num, unit) = split_unit(s);
    let scale = match unit.to_ascii_lowercase().as_str() {
        "" | "hz" => 1.0,
        "khz" => 1e3,
        "mhz" => 1e6,
        "ghz" => 1e9,
        other => {
            return Err(Error::Parse(format!(
                "unknown frequency unit `{other}` in `{s}`"
            )))
        }
    };
    Ok(parse_f64(num, 0).map_err(|_| Error::Parse(format!("bad frequency `{s}`")))? * scale)
}

/// `start:stop:step` (stop inclusive) or a single value.
pub fn parse_grid(s: &str, parse: impl Fn(&str) -> Result<f64>) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [single] => vec![parse(single)?],
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::Parse(format!(
                    "grid `{s}` needs a positive step and stop >= start"
                )));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            if count > 10_000_000 {
                return Err(Error::Parse(format!("grid `{s}` has too many points")));
            }
            (0..=count).map(|i| start + i as f64 * step).collect()
        }
        _ => return Err(Error::Parse(format!("grid `{s}` is not start:stop:step"))),
    };
    check_grid(&grid)?;
    Ok(grid)
}

/// Comma-separated list of values or grids, concatenated.
pub fn parse_list(s: &str, parse: impl Fn(&str) -> Result<f64> + Copy) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        out.extend(parse_grid(item, parse)?);
    }
    check_grid(&out)?;
    Ok(out)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parse("grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// One line of an emitted table. Columns that do not apply stay empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub r_m: Option<f64>,
    pub major_m: Option<f64>,
    pub eps: f64,
    pub mode: ModeId,
    pub f_dimensionless: f64,
    pub f_hz: Option<f64>,
    pub multiplicity: u8,
    pub extrapolated: bool,
}

fn radii(geometry: &Geometry) -> (Option<f64>, Option<f64>) {
    match *geometry {
        Geometry::Torus { minor, major } => (Some(minor), Some(major)),
        Geometry::Cylinder { diameter, .. } => (Some(0.5 * diameter), None),
        _ => (None, None),
    }
}

impl TableRow {
    pub fn from_entry(geometry: &Geometry, eps: f64, e: &SpectrumEntry) -> Self {
        let (r_m, major_m) = radii(geometry);
        Self {
            r_m,
            major_m,
            eps,
            mode: e.mode,
            f_dimensionless: e.f_dimensionless,
            f_hz: Some(e.frequency),
            multiplicity: e.multiplicity,
            extrapolated: e.extrapolated,
        }
    }

    pub fn from_flow(row: &FlowRow) -> Self {
        Self {
            r_m: None,
            major_m: None,
            eps: row.eps,
            mode: row.mode,
            f_dimensionless: row.f_dimensionless,
            f_hz: None,
            multiplicity: row.mode.multiplicity(),
            extrapolated: row.extrapolated,
        }
    }

    pub fn from_chart(row: &ChartRow) -> Self {
        Self {
            r_m: Some(row.minor),
            major_m: Some(row.major),
            eps: row.eps,
            mode: row.entry.mode,
            f_dimensionless: row.entry.f_dimensionless,
            f_hz: Some(row.entry.frequency),
            multiplicity: row.entry.multiplicity,
            extrapolated: row.entry.extrapolated,
        }
    }

    fn fields(&self) -> [String; 12] {
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        [
            opt(self.r_m),
            opt(self.major_m),
            fmt_num(self.eps),
            self.mode.family.to_string(),
            self.mode.parity.sign().to_string(),
            self.mode.k.to_string(),
            self.mode.n.to_string(),
            self.mode.m.to_string(),
            fmt_num(self.f_dimensionless),
            opt(self.f_hz),
            self.multiplicity.to_string(),
            self.extrapolated.to_string(),
        ]
    }

    fn to_json(self) -> Value {
        let opt = |v: Option<f64>| v.map(rounded);
        json!({
            "r_m": opt(self.r_m),
            "R_m": opt(self.major_m),
            "eps": rounded(self.eps),
            "family": self.mode.family.to_string(),
            "parity": self.mode.parity.sign(),
            "k": self.mode.k,
            "n": self.mode.n,
            "m": self.mode.m,
            "F": rounded(self.f_dimensionless),
            "f_hz": opt(self.f_hz),
            "multiplicity": self.multiplicity,
            "extrapolated": self.extrapolated,
        })
    }
}

pub fn spectrum_rows(spectrum: &Spectrum) -> Vec<TableRow> {
    spectrum
        .entries
        .iter()
        .map(|e| TableRow::from_entry(&spectrum.geometry, spectrum.eps, e))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(TABLE_COLUMNS)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// `{"schema": 1, "table": name, "meta": ..., "rows": [...]}` with keys in
/// insertion order.
pub fn table_json(name: &str, meta: Value, rows: &[TableRow]) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "table": name,
        "meta": meta,
        "columns": TABLE_COLUMNS,
        "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    })
}

pub fn write_table<W: Write>(
    format: Format,
    name: &str,
    meta: Value,
    rows: &[TableRow],
    mut out: W,
) -> Result<()> {
    match format {
        Format::Csv => write_table_csv(rows, out),
        Format::Json => write_json(&table_json(name, meta, rows), &mut out),
    }
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Reads a table written by [`write_table_csv`].
pub fn read_table_csv<R: std::io::Read>(reader: R) -> Result<Vec<TableRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let head: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if head != TABLE_COLUMNS {
        return Err(Error::Parse(format!("unexpected table header {head:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let opt = |j: usize| -> Result<Option<f64>> {
            if record[j].is_empty() {
                Ok(None)
            } else {
                parse_f64(&record[j], line).map(Some)
            }
        };
        let mode_fields = csv::StringRecord::from(vec![
            &record[3], &record[4], &record[5], &record[6], &record[7],
        ]);
        rows.push(TableRow {
            r_m: opt(0)?,
            major_m: opt(1)?,
            eps: parse_f64(&record[2], line)?,
            mode: parse_mode_fields(&mode_fields, line)?
                .ok_or_else(|| Error::Parse(format!("line {line}: missing mode")))?,
            f_dimensionless: parse_f64(&record[8], line)?,
            f_hz: opt(9)?,
            multiplicity: record[10]
                .parse()
                .map_err(|_| Error::Parse(format!("line {line}: bad multiplicity")))?,
            extrapolated: record[11]
                .parse()
                .map_err(|_| Error::Parse(format!("line {line}: bad flag")))?,
        });
    }
    Ok(rows)
}

//! CSV and JSON-lines tables with a metadata header.
//!
//! CSV reals use 17 significant digits (`{:.16e}`), JSON reals the shortest
//! round-tripping form; unbounded values are the string `inf` in both, and
//! absent values are an empty field / `null`.

use std::collections::HashMap;
use std::io::Write;
use std::str::FromStr;

use super::{HarnessError, ARTIFACT_VERSION};
use crate::error_analysis::RNG_ALGORITHM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            other => Err(format!("unknown format `{other}` (expected csv or jsonl)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Missing,
    Text(String),
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

fn special_real(x: f64) -> Option<&'static str> {
    if x.is_nan() {
        Some("nan")
    } else if x == f64::INFINITY {
        Some("inf")
    } else if x == f64::NEG_INFINITY {
        Some("-inf")
    } else {
        None
    }
}

impl Cell {
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Real(x) => special_real(*x).map_or_else(|| format!("{x:.16e}"), str::to_string),
            Cell::Missing => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Real(x) => match special_real(*x) {
                Some(s) => format!("\"{s}\""),
                None => serde_json::to_string(x).expect("finite f64"),
            },
            Cell::Missing => "null".into(),
            Cell::Text(s) => serde_json::to_string(s).expect("string"),
        }
    }
}

/// Parsed field values, keyed by column name, as text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldMap(pub HashMap<String, String>);

impl FieldMap {
    fn raw(&self, name: &str) -> Result<&str, String> {
        self.0
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| format!("missing column `{name}`"))
    }

    pub fn real(&self, name: &str) -> Result<f64, String> {
        let s = self.raw(name)?;
        s.parse()
            .map_err(|_| format!("column `{name}`: `{s}` is not a number"))
    }

    pub fn opt_real(&self, name: &str) -> Result<Option<f64>, String> {
        if self.raw(name)?.is_empty() {
            Ok(None)
        } else {
            self.real(name).map(Some)
        }
    }

    pub fn int(&self, name: &str) -> Result<u64, String> {
        let s = self.raw(name)?;
        s.parse()
            .map_err(|_| format!("column `{name}`: `{s}` is not an integer"))
    }

    pub fn text(&self, name: &str) -> Result<String, String> {
        self.raw(name).map(str::to_string)
    }
}

/// A table row type with a fixed column set.
pub trait Record: Sized {
    const COLUMNS: &'static [&'static str];

    /// One cell per entry of [`Record::COLUMNS`], in order.
    fn cells(&self) -> Vec<Cell>;

    fn from_fields(fields: &FieldMap) -> Result<Self, String>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub seed: u64,
    pub rng: String,
    pub artifact_version: String,
}

impl Metadata {
    pub fn new(command: &str, seed: u64) -> Self {
        Metadata {
            command: command.into(),
            seed,
            rng: RNG_ALGORITHM.into(),
            artifact_version: ARTIFACT_VERSION.into(),
        }
    }

    fn entries(&self) -> [(&'static str, Cell); 4] {
        [
            (
                "artifact_version",
                Cell::Text(self.artifact_version.clone()),
            ),
            ("command", Cell::Text(self.command.clone())),
            ("rng", Cell::Text(self.rng.clone())),
            ("seed", Cell::Int(self.seed)),
        ]
    }

    fn from_pairs(pairs: &HashMap<String, String>) -> Result<Self, String> {
        let get = |k: &str| {
            pairs
                .get(k)
                .cloned()
                .ok_or_else(|| format!("metadata is missing `{k}`"))
        };
        Ok(Metadata {
            command: get("command")?,
            seed: get("seed")?
                .parse()
                .map_err(|_| "metadata `seed` is not an integer".to_string())?,
            rng: get("rng")?,
            artifact_version: get("artifact_version")?,
        })
    }
}

pub fn emit<R: Record, W: Write>(
    out: &mut W,
    format: Format,
    meta: &Metadata,
    rows: &[R],
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            for (k, v) in meta.entries() {
                writeln!(out, "# {k}: {}", v.to_csv())?;
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut *out);
            w.write_record(R::COLUMNS).map_err(csv_io)?;
            for row in rows {
                w.write_record(row.cells().iter().map(Cell::to_csv))
                    .map_err(csv_io)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let meta_obj = object(meta.entries().iter().map(|(k, v)| (*k, v)));
            writeln!(out, "{{\"metadata\":{meta_obj}}}")?;
            for row in rows {
                let cells = row.cells();
                writeln!(
                    out,
                    "{}",
                    object(R::COLUMNS.iter().copied().zip(cells.iter()))
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn object<'a>(pairs: impl Iterator<Item = (&'a str, &'a Cell)>) -> String {
    let body: Vec<String> = pairs
        .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).expect("key"), v.to_json()))
        .collect();
    format!("{{{}}}", body.join(","))
}

fn csv_io(e: csv::Error) -> HarnessError {
    HarnessError::Io(e.to_string())
}

/// A table read back from emitted text.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<FieldMap>,
}

impl ParsedTable {
    pub fn parse(text: &str, format: Format) -> Result<Self, String> {
        match format {
            Format::Csv => parse_csv(text),
            Format::Jsonl => parse_jsonl(text),
        }
    }

    pub fn records<R: Record>(&self) -> Result<Vec<R>, String> {
        self.rows.iter().map(R::from_fields).collect()
    }
}

fn parse_csv(text: &str) -> Result<ParsedTable, String> {
    let mut pairs = HashMap::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let (k, v) = line[1..]
            .split_once(':')
            .ok_or_else(|| format!("bad metadata line `{line}`"))?;
        pairs.insert(k.trim().to_string(), v.trim().to_string());
    }
    let metadata = Metadata::from_pairs(&pairs)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let map = columns
            .iter()
            .cloned()
            .zip(record.iter().map(str::to_string))
            .collect();
        rows.push(FieldMap(map));
    }
    Ok(ParsedTable {
        metadata,
        columns,
        rows,
    })
}

fn json_text(v: &serde_json::Value) -> Result<String, String> {
    match v {
        serde_json::Value::Null => Ok(String::new()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::String(s) => Ok(s.clone()),
        other => Err(format!("unexpected value {other}")),
    }
}

fn json_object(line: &str) -> Result<serde_json::Map<String, serde_json::Value>, String> {
    match serde_json::from_str(line).map_err(|e| e.to_string())? {
        serde_json::Value::Object(m) => Ok(m),
        _ => Err(format!("expected a JSON object: `{line}`")),
    }
}

fn parse_jsonl(text: &str) -> Result<ParsedTable, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or("empty input")?;
    let meta = json_object(first)?;
    let meta = match meta.get("metadata") {
        Some(serde_json::Value::Object(m)) => m,
        _ => return Err("first line must be a metadata object".into()),
    };
    let pairs = meta
        .iter()
        .map(|(k, v)| Ok((k.clone(), json_text(v)?)))
        .collect::<Result<_, String>>()?;
    let metadata = Metadata::from_pairs(&pairs)?;
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in lines {
        let obj = json_object(line)?;
        if columns.is_empty() {
            columns = obj.keys().cloned().collect();
        }
        let map = obj
            .iter()
            .map(|(k, v)| Ok((k.clone(), json_text(v)?)))
            .collect::<Result<_, String>>()?;
        rows.push(FieldMap(map));
    }
    Ok(ParsedTable {
        metadata,
        columns,
        rows,
    })
}

//! CSV tables and JSON sidecars.

use crate::scenario::Scenario;
use crate::CliError;
use renyi_core::{ExtendedValue, Reason};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct Options {
    pub out: PathBuf,
    /// Divide logarithmic columns by `ln 2`.
    pub bits: bool,
}

/// One CSV field.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    /// A logarithmic quantity, rescaled by `--bits`.
    Log(f64),
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn log(v: &ExtendedValue) -> Cell {
        if v.reason == Reason::NotEvaluated {
            Cell::Empty
        } else {
            Cell::Log(v.value)
        }
    }

    pub fn num(v: &ExtendedValue) -> Cell {
        if v.reason == Reason::NotEvaluated {
            Cell::Empty
        } else {
            Cell::Num(v.value)
        }
    }

    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn render(&self, bits: bool) -> Option<String> {
        let float = |x: f64| if x.is_nan() { None } else { Some(format_f64(x)) };
        match self {
            Cell::Log(x) if bits => float(x / std::f64::consts::LN_2),
            Cell::Log(x) | Cell::Num(x) => float(*x),
            Cell::Int(n) => Some(n.to_string()),
            Cell::Text(s) => Some(s.clone()),
            Cell::Bool(b) => Some(b.to_string()),
            Cell::Empty => Some(String::new()),
        }
    }
}

/// Shortest round-trip representation, in exponent form for very small or
/// very large magnitudes.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    /// File stem inside the output directory.
    pub stem: String,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(stem: impl Into<String>, header: &'static [&'static str]) -> Self {
        Self { stem: stem.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// CSV bytes, or a numerical failure naming the first NaN.
    pub fn to_csv(&self, bits: bool) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header).map_err(|e| CliError::Io(e.to_string()))?;
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = row
                .iter()
                .zip(self.header)
                .map(|(c, h)| {
                    c.render(bits).ok_or_else(|| CliError::Numerical(format!("{}: NaN in column {h} of row {}", self.stem, i + 1)))
                })
                .collect::<Result<_, _>>()?;
            w.write_record(&fields).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// The JSON file written next to each command's CSV output. Values are in
/// nats at full precision regardless of `--bits`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar<T> {
    pub command: String,
    pub version: String,
    pub csv_units: String,
    pub csv_files: Vec<String>,
    pub scenario: Scenario,
    pub results: T,
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Render everything first so that a NaN anywhere leaves no partial output.
pub fn write_outputs<T: Serialize>(
    opts: &Options,
    command: &str,
    scenario: &Scenario,
    tables: &[Table],
    results: T,
) -> Result<Vec<PathBuf>, CliError> {
    let rendered: Vec<(String, Vec<u8>)> =
        tables.iter().map(|t| Ok((format!("{}.csv", t.stem), t.to_csv(opts.bits)?))).collect::<Result<_, CliError>>()?;
    let sidecar = Sidecar {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        csv_units: if opts.bits { "bits" } else { "nats" }.to_string(),
        csv_files: rendered.iter().map(|(n, _)| n.clone()).collect(),
        scenario: scenario.clone(),
        results,
    };
    let mut json = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Io(e.to_string()))?;
    json.push('\n');
    std::fs::create_dir_all(&opts.out).map_err(|e| CliError::Io(format!("{}: {e}", opts.out.display())))?;
    let mut written = Vec::new();
    for (name, bytes) in rendered {
        let path = opts.out.join(name);
        write(&path, &bytes)?;
        written.push(path);
    }
    let path = opts.out.join(format!("{command}.json"));
    write(&path, json.as_bytes())?;
    written.push(path);
    Ok(written)
}

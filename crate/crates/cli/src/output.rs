use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use bec_core::sweep::{GridStatus, PhaseRow, SweepRow};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// The CSV columns, in order.
#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub dimension: u8,
    pub coupling: f64,
    pub atoms: Option<u64>,
    pub classification: String,
    pub sigma_min: Option<f64>,
    pub rms_var: Option<f64>,
    pub rms_grid: Option<f64>,
    pub energy_var: Option<f64>,
    pub energy_grid: Option<f64>,
    pub barrier: Option<f64>,
}

impl From<&SweepRow> for CsvRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            dimension: r.dimension.get(),
            coupling: r.coupling,
            atoms: r.atom_count,
            classification: r.classification.as_str().to_owned(),
            sigma_min: r.sigma_min,
            rms_var: r.rms_radius_variational,
            rms_grid: r.rms_radius_grid,
            energy_var: r.energy_variational,
            energy_grid: r.energy_grid,
            barrier: r.barrier,
        }
    }
}

/// A CSV row plus the fields that only JSON and the table carry.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    #[serde(flatten)]
    pub csv: CsvRow,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_status: Option<GridStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
}

impl From<&SweepRow> for Row {
    fn from(r: &SweepRow) -> Self {
        Self {
            csv: r.into(),
            grid_status: r.grid_status,
            boundary: None,
        }
    }
}

impl From<&PhaseRow> for Row {
    fn from(r: &PhaseRow) -> Self {
        Self {
            boundary: Some(r.boundary),
            ..Row::from(&r.row)
        }
    }
}

/// Everything a command produces; rendered in the requested format.
pub struct Document {
    pub command: &'static str,
    /// Command-specific JSON fields (merged next to `schema_version`).
    pub json: Value,
    pub rows: Vec<Row>,
    /// Human-readable text printed above the row table.
    pub summary: String,
}

impl Document {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Table => {
                let mut out = self.summary.clone();
                if !self.rows.is_empty() {
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    out.push_str(&table(&self.rows));
                }
                Ok(out)
            }
            Format::Csv => csv_text(&self.rows),
            Format::Json => {
                let mut doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                });
                if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, &self.json) {
                    doc.extend(extra.clone());
                }
                if !self.rows.is_empty() {
                    doc["rows"] = serde_json::to_value(&self.rows).expect("rows serialize");
                }
                let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
                text.push('\n');
                Ok(text)
            }
        }
    }
}

const CSV_HEADER: [&str; 10] = [
    "dimension",
    "coupling",
    "atoms",
    "classification",
    "sigma_min",
    "rms_var",
    "rms_grid",
    "energy_var",
    "energy_grid",
    "barrier",
];

fn csv_text(rows: &[Row]) -> Result<String, CliError> {
    let fail = |e: csv::Error| CliError::Usage(format!("csv output failed: {e}"));
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(CSV_HEADER).map_err(fail)?;
    for row in rows {
        writer.serialize(&row.csv).map_err(fail)?;
    }
    let bytes = writer.into_inner().map_err(|e| fail(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x:.6}"))
}

fn table(rows: &[Row]) -> String {
    let with_boundary = rows.iter().any(|r| r.boundary.is_some());
    let mut header = vec!["d", "g", "atoms", "class", "sigma_min", "rms_var", "rms_grid", "E_var", "E_grid", "barrier"];
    if with_boundary {
        header.push("boundary");
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let c = &r.csv;
            let mut line = vec![
                c.dimension.to_string(),
                format!("{:.6}", c.coupling),
                c.atoms.map_or_else(|| "-".into(), |n| n.to_string()),
                c.classification.clone(),
                cell(c.sigma_min),
                cell(c.rms_var),
                cell(c.rms_grid),
                cell(c.energy_var),
                cell(c.energy_grid),
                cell(c.barrier),
            ];
            if with_boundary {
                line.push(if r.boundary == Some(true) { "*".into() } else { String::new() });
            }
            line
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|j| body.iter().map(|l| l[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let mut emit = |cells: &[&str]| {
        let line: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    };
    emit(&header);
    for line in &body {
        emit(&line.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

pub fn write(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            // A closed pipe is not worth a distinct exit code.
            let _ = stdout.write_all(text.as_bytes());
            let _ = stdout.flush();
            Ok(())
        }
    }
}

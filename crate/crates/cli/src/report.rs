use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// Scientific outcome of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    /// Plain computation with nothing to judge.
    None,
}

impl From<angval::extendability::Verdict> for Outcome {
    fn from(v: angval::extendability::Verdict) -> Self {
        use angval::extendability::Verdict;
        match v {
            Verdict::Pass => Outcome::Pass,
            Verdict::Fail => Outcome::Fail,
            Verdict::Inconclusive => Outcome::Inconclusive,
        }
    }
}

/// Rows for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }
}

/// What every subcommand returns.
pub struct Output {
    pub result: Value,
    pub table: Table,
    pub verdict: Outcome,
}

#[derive(Serialize)]
pub struct ExperimentReport {
    pub command: Vec<String>,
    pub subcommand: String,
    pub seed: u64,
    pub samples: usize,
    pub workers: usize,
    pub tol: Option<f64>,
    pub verdict: Outcome,
    pub wall_clock_seconds: f64,
    pub result: Value,
}

pub fn emit(report: &ExperimentReport, table: &Table, format: Format, out: Option<&Path>) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, report)?;
            buf.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&table.headers)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    match out {
        Some(path) => std::fs::write(path, &buf).with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

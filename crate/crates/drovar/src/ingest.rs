//! CSV input. Bound subcommands read `rho`, `phi` and an optional `weight`
//! column; `robust` reads scenario columns `r1..rd` and an optional `weight`.
//! Weights are normalized and zero-weight rows are dropped.

use std::fs::File;
use std::path::Path;

use drovar_core::measures::normalize;
use drovar_core::{EmpiricalMeasure, ProblemData, ScenarioMatrix};

use crate::error::{CliError, Result};

/// Header plus numeric rows of a CSV file.
struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            rows.push(record.map_err(csv_err)?.iter().map(str::to_owned).collect());
        }
        if headers.iter().all(String::is_empty) || rows.is_empty() {
            return Err(CliError::EmptyFile(path.to_path_buf()));
        }
        Ok(Self { headers, rows })
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.position(name).ok_or_else(|| CliError::MissingColumn(name.to_owned()))
    }

    /// Parses column `col`; rows are numbered from 1 after the header.
    fn column(&self, col: usize) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let text = row.get(col).map_or("", String::as_str);
                match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(CliError::BadCell {
                        row: i + 1,
                        column: self.headers[col].clone(),
                        text: text.to_owned(),
                    }),
                }
            })
            .collect()
    }

    /// Baseline from the `weight` column (uniform without one) and the kept row indices.
    fn baseline(&self) -> Result<(EmpiricalMeasure, Vec<usize>)> {
        match self.position("weight") {
            Some(col) => {
                let n = normalize(&self.column(col)?)?;
                Ok((n.measure, n.kept))
            }
            None => Ok((EmpiricalMeasure::uniform(self.rows.len())?, (0..self.rows.len()).collect())),
        }
    }
}

fn pick(values: &[f64], kept: &[usize]) -> Vec<f64> {
    kept.iter().map(|&i| values[i]).collect()
}

/// Reads `rho`, `phi` and optional `weight` columns.
pub fn ingest_bound_csv(path: &Path) -> Result<(EmpiricalMeasure, ProblemData)> {
    let table = Table::read(path)?;
    let rho_col = table.require("rho")?;
    let phi_col = table.require("phi")?;
    let rho = table.column(rho_col)?;
    let phi = table.column(phi_col)?;
    let (p, kept) = table.baseline()?;
    let data = ProblemData::new(pick(&rho, &kept), pick(&phi, &kept))?;
    Ok((p, data))
}

/// Reads scenario columns `r1, r2, ...` (contiguous from `r1`) and optional `weight`.
pub fn ingest_scenario_csv(path: &Path) -> Result<ScenarioMatrix> {
    let table = Table::read(path)?;
    let mut cols = vec![table.require("r1")?];
    while let Some(c) = table.position(&format!("r{}", cols.len() + 1)) {
        cols.push(c);
    }
    let columns = cols.iter().map(|&c| table.column(c)).collect::<Result<Vec<_>>>()?;
    let (p, kept) = table.baseline()?;
    let rows = kept.iter().map(|&i| columns.iter().map(|c| c[i]).collect()).collect();
    Ok(ScenarioMatrix::new(rows, p)?)
}

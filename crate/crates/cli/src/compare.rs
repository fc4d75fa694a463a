//! Column-wise comparison of two trajectory CSV files.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::Format("empty file".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        if header.first().map(String::as_str) != Some("t") {
            return Err(CliError::Format("first column must be 't'".into()));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| CliError::Format(format!("row {}: {e}", i + 1)))?;
            if row.len() != header.len() {
                return Err(CliError::Format(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDeviation {
    pub column: String,
    pub max_abs: f64,
    pub at_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison(pub Vec<ColumnDeviation>);

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:>24} {:>24}", "column", "max |a - b|", "at t")?;
        for c in &self.0 {
            writeln!(f, "{:<14} {:>24.16e} {:>24.16e}", c.column, c.max_abs, c.at_t)?;
        }
        Ok(())
    }
}

/// Per-column maximum absolute deviation and the time at which it occurs.
pub fn compare(a: &CsvTable, b: &CsvTable) -> Result<Comparison> {
    if a.header != b.header {
        return Err(CliError::Format(format!(
            "headers differ: [{}] vs [{}]",
            a.header.join(","),
            b.header.join(",")
        )));
    }
    if a.rows.len() != b.rows.len() {
        return Err(CliError::Format(format!("row counts differ: {} vs {}", a.rows.len(), b.rows.len())));
    }
    if let Some((i, _)) = a
        .rows
        .iter()
        .zip(&b.rows)
        .enumerate()
        .find(|(_, (x, y))| (x[0] - y[0]).abs() > 1e-12 * x[0].abs().max(1.0))
    {
        return Err(CliError::Format(format!("time grids differ at row {}", i + 1)));
    }
    let columns = (1..a.header.len())
        .map(|c| {
            let (mut max_abs, mut at_t) = (0.0, a.rows.first().map_or(0.0, |r| r[0]));
            for (x, y) in a.rows.iter().zip(&b.rows) {
                let d = (x[c] - y[c]).abs();
                if d > max_abs {
                    max_abs = d;
                    at_t = x[0];
                }
            }
            ColumnDeviation {
                column: a.header[c].clone(),
                max_abs,
                at_t,
            }
        })
        .collect();
    Ok(Comparison(columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: &str = "t,rho00\n0,1\n1,0.5\n2,0.25\n";

    #[test]
    fn self_comparison_is_zero() {
        let a = CsvTable::parse(A).unwrap();
        let c = compare(&a, &a).unwrap();
        assert_eq!(c.0.len(), 1);
        assert_eq!(c.0[0].max_abs, 0.0);
    }

    #[test]
    fn reports_location_of_largest_deviation() {
        let a = CsvTable::parse(A).unwrap();
        let b = CsvTable::parse("t,rho00\n0,1\n1,0.4\n2,0.3\n").unwrap();
        let c = compare(&a, &b).unwrap();
        assert!((c.0[0].max_abs - 0.1).abs() < 1e-15);
        assert_eq!(c.0[0].at_t, 1.0);
    }

    #[test]
    fn rejects_mismatches() {
        let a = CsvTable::parse(A).unwrap();
        let other_header = CsvTable::parse("t,re_rho_0_0\n0,1\n1,0.5\n2,0.25\n").unwrap();
        assert!(matches!(compare(&a, &other_header), Err(CliError::Format(_))));
        let short = CsvTable::parse("t,rho00\n0,1\n").unwrap();
        assert!(matches!(compare(&a, &short), Err(CliError::Format(_))));
        let shifted = CsvTable::parse("t,rho00\n0,1\n1.5,0.5\n2,0.25\n").unwrap();
        assert!(matches!(compare(&a, &shifted), Err(CliError::Format(_))));
        assert!(CsvTable::parse("x,rho00\n").is_err());
        assert!(CsvTable::parse("t,rho00\n0,1,2\n").is_err());
        assert!(CsvTable::parse("t,rho00\n0,abc\n").is_err());
    }
}

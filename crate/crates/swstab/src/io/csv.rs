//! Column series as CSV with a header row and round-trippable floats.

use std::fmt::Write as _;
use std::path::Path;

use crate::dynamics::MonitorTrace;
use crate::error::{Error, Result};

/// Named columns of equal length.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(names: &[&str], columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::invalid("one name per column is required"));
        }
        if let Some(n) = columns.first().map(Vec::len) {
            if columns.iter().any(|c| c.len() != n) {
                return Err(Error::invalid("columns must have equal length"));
            }
        }
        Ok(Series {
            names: names.iter().map(|s| s.to_string()).collect(),
            columns,
        })
    }

    /// One column per monitored quantity, named as in [`MonitorTrace::COLUMNS`].
    pub fn from_trace(trace: &MonitorTrace) -> Self {
        Series {
            names: MonitorTrace::COLUMNS.iter().map(|s| s.to_string()).collect(),
            columns: trace.columns().iter().map(|c| c.to_vec()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map(Vec::len).unwrap_or(0)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[i])
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.names.join(",");
        s.push('\n');
        for r in 0..self.rows() {
            for (i, c) in self.columns.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                write!(s, "{:.16e}", c[r]).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("csv has no header row"))?;
        let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut columns = vec![Vec::new(); names.len()];
        for (row, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != names.len() {
                return Err(Error::invalid(format!(
                    "csv row {} has {} cells, expected {}",
                    row + 2,
                    cells.len(),
                    names.len()
                )));
            }
            for (col, cell) in columns.iter_mut().zip(cells) {
                let v = cell.trim().parse::<f64>().map_err(|e| {
                    Error::invalid(format!("csv row {}: `{}`: {e}", row + 2, cell.trim()))
                })?;
                col.push(v);
            }
        }
        Ok(Series { names, columns })
    }
}

pub fn write_series(path: &Path, series: &Series) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::write(path, series.to_csv()).map_err(|e| Error::io(path, e))
}

pub fn write_trace(path: &Path, trace: &MonitorTrace) -> Result<()> {
    write_series(path, &Series::from_trace(trace))
}

pub fn read_series(path: &Path) -> Result<Series> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Series::from_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_roundtrip_exactly() {
        let s = Series::new(
            &["t", "v"],
            vec![vec![0.0, 0.1, 1e-300], vec![std::f64::consts::PI, -2.5e17, 1.0 / 3.0]],
        )
        .unwrap();
        let back = Series::from_csv(&s.to_csv()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn empty_trace_is_header_only() {
        let text = Series::from_trace(&MonitorTrace::default()).to_csv();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("t,h_sw,h_ha,"));
    }
}

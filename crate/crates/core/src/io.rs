//! Whitespace-separated columnar text files with a `#` header line naming
//! each column and its unit, e.g. `# x[1] re_psi[1] im_psi[1]`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::{Error, Result};

/// Column name plus unit label.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: &str, unit: &str, values: Vec<f64>) -> Self {
        Column { name: name.into(), unit: unit.into(), values }
    }

    pub fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }
}

pub fn format_columns(cols: &[Column]) -> Result<String> {
    let rows = cols.first().map_or(0, |c| c.values.len());
    if cols.iter().any(|c| c.values.len() != rows) {
        return Err(Error::Domain("columns differ in length".into()));
    }
    let mut out = String::from("#");
    for c in cols {
        write!(out, " {}", c.header()).unwrap();
    }
    out.push('\n');
    for r in 0..rows {
        let line: Vec<String> = cols.iter().map(|c| format!("{:.17e}", c.values[r])).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_columns(path: &Path, cols: &[Column]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, format_columns(cols)?)?;
    Ok(())
}

pub fn parse_columns(text: &str) -> Result<Vec<Column>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .and_then(|l| l.trim().strip_prefix('#'))
        .ok_or_else(|| Error::Config("columnar file must start with a '#' header".into()))?;
    let mut cols: Vec<Column> = header
        .split_whitespace()
        .map(|h| match h.split_once('[') {
            Some((n, u)) => Column::new(n, u.trim_end_matches(']'), Vec::new()),
            None => Column::new(h, "1", Vec::new()),
        })
        .collect();
    for (row, l) in lines.enumerate() {
        if l.trim_start().starts_with('#') {
            continue;
        }
        let vals: Vec<&str> = l.split_whitespace().collect();
        if vals.len() != cols.len() {
            return Err(Error::Config(format!("row {row} has {} values, header has {}", vals.len(), cols.len())));
        }
        for (c, v) in cols.iter_mut().zip(vals) {
            c.values.push(v.parse().map_err(|_| Error::Config(format!("row {row}: bad number {v:?}")))?);
        }
    }
    Ok(cols)
}

pub fn read_columns(path: &Path) -> Result<Vec<Column>> {
    parse_columns(&fs::read_to_string(path)?)
}

/// Look a column up by name.
pub fn column<'a>(cols: &'a [Column], name: &str) -> Result<&'a Column> {
    cols.iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::Config(format!("missing column {name:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let cols = vec![
            Column::new("x", "1/m", vec![0.1, -2.5e-7, 3.0]),
            Column::new("re_psi", "1", vec![1.0 / 3.0, 0.0, -1e300]),
        ];
        let text = format_columns(&cols).unwrap();
        assert!(text.starts_with("# x[1/m] re_psi[1]\n"));
        assert_eq!(parse_columns(&text).unwrap(), cols);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(parse_columns("# a[1] b[1]\n1 2\n3\n").is_err());
        assert!(parse_columns("1 2\n").is_err());
    }
}

//! Numeric CSV input with line-numbered diagnostics.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::CliError;

/// Parses a numeric CSV. A first row containing a non-numeric field is taken
/// as a header. Every data row must have the same number of finite fields.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let display = path.display();
    let file = File::open(path).map_err(|e| CliError::input(format!("{display}: {e}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("{display}: {e}")))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, usize> = record
            .iter()
            .enumerate()
            .map(|(c, f)| f.parse::<f64>().map_err(|_| c))
            .collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if rows == 0 && cols.is_none() && k == 0 => {
                cols = Some(record.len());
                continue;
            }
            Err(c) => {
                return Err(CliError::input(format!(
                    "{display}:{line}: field {} (`{}`) is not a number",
                    c + 1,
                    &record[c]
                )))
            }
        };
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(CliError::input(format!(
                "{display}:{line}: field {} is not finite",
                c + 1
            )));
        }
        match cols {
            Some(c) if c != row.len() => {
                return Err(CliError::input(format!(
                    "{display}:{line}: expected {c} fields, found {}",
                    row.len()
                )))
            }
            _ => cols = Some(row.len()),
        }
        values.extend(row);
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::input(format!("{display}: no data rows")));
    }
    let cols = cols.expect("set with the first row");
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

/// A single-column numeric CSV, optionally with a header.
pub fn read_vector(path: &Path) -> Result<DVector<f64>, CliError> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(CliError::input(format!(
            "{}: expected one column, found {}",
            path.display(),
            m.ncols()
        )));
    }
    Ok(m.column(0).into_owned())
}

pub fn write_column(path: &Path, header: &str, values: &[f64]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let io = |e: csv::Error| CliError::io(path, e);
    w.write_record([header]).map_err(io)?;
    for v in values {
        w.write_record([slope_core::lambda::format_f64(*v)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_is_optional() {
        let a = read_matrix(temp("a,b\n1,2\n3,4\n").path()).unwrap();
        let b = read_matrix(temp("1,2\n3,4\n").path()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[(1, 0)], 3.0);
    }

    #[test]
    fn diagnostics_name_the_line() {
        let e = read_matrix(temp("1,2\n3,x\n").path()).unwrap_err();
        assert!(e.message.contains(":2:"), "{}", e.message);
        let e = read_matrix(temp("1,2\n3\n").path()).unwrap_err();
        assert!(
            e.message.contains(":2:") && e.message.contains("expected 2"),
            "{}",
            e.message
        );
        let e = read_matrix(temp("1,2\nNaN,4\n").path()).unwrap_err();
        assert!(e.message.contains("not finite"), "{}", e.message);
        assert!(read_matrix(temp("").path()).is_err());
        assert!(read_vector(temp("1,2\n").path()).is_err());
    }
}

//! One-column CSV representation of a sequence: a `lambda` header line
//! followed by one value per line, written with 17 significant digits.

use std::io::{BufRead, Write};

use crate::error::{Result, SlopeError};
use crate::sorted_l1::LambdaSequence;

pub const LAMBDA_HEADER: &str = "lambda";

/// Formats a float so that parsing it back yields the same bits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_lambda_csv<W: Write>(seq: &LambdaSequence, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{LAMBDA_HEADER}")?;
    for v in seq.as_slice() {
        writeln!(out, "{}", format_f64(*v))?;
    }
    Ok(())
}

/// Parses the format written by [`write_lambda_csv`]; errors carry 1-based
/// line numbers.
pub fn read_lambda_csv<R: BufRead>(input: R) -> Result<LambdaSequence> {
    let mut values = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| SlopeError::InvalidArgument(format!("line {lineno}: {e}")))?;
        let field = line.trim();
        if k == 0 {
            if field != LAMBDA_HEADER {
                return Err(SlopeError::InvalidArgument(format!(
                    "line 1: expected header `{LAMBDA_HEADER}`, found `{field}`"
                )));
            }
            continue;
        }
        if field.is_empty() {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| {
            SlopeError::InvalidArgument(format!("line {lineno}: `{field}` is not a number"))
        })?;
        values.push(v);
    }
    LambdaSequence::new(values)
}

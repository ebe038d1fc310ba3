use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::CliError;

/// Writes a CSV file through `body`, mapping I/O failures to the path.
pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(CliError::io(path))
}

/// Writes one CSV record.
pub fn csv_line(w: &mut dyn Write, fields: &[String]) -> io::Result<()> {
    writeln!(w, "{}", fields.join(","))
}

/// `value <= tol`, false for NaN.
pub fn within(value: f64, tol: f64) -> bool {
    value <= tol
}

/// Compact display of a fitted parameter: 10 decimals, trailing zeros dropped.
pub fn short(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" => "0".to_string(),
        _ => s.to_string(),
    }
}

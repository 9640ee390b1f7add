use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// Writes flat rows as CSV, or as a JSON array of objects with the same keys.
pub fn emit<T: Serialize>(rows: &[T], format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            w.flush().map_err(|e| CliError::Runtime(e.to_string()))?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, rows).map_err(|e| CliError::Runtime(e.to_string()))?;
            buf.push(b'\n');
        }
    }
    match out {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(&buf)
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        let kind = if self.code == 2 { "numerical" } else { "validation" };
        serde_json::json!({ "error": self.message, "kind": kind }).to_string()
    }
}

impl From<nonclass_core::Error> for CliError {
    fn from(e: nonclass_core::Error) -> Self {
        CliError {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

/// 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::validation(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::validation(format!("cannot write to stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

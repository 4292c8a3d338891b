//! Deterministic text output: fixed 12-significant-digit scientific notation,
//! comma-separated CSV with LF line endings, and a stdout-or-file sink.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Format a number with 12 significant digits, locale-independent.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Optional number: empty field when absent.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Where a command writes its primary artifact.
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from_path(path: Option<PathBuf>) -> Self {
        match path {
            Some(p) => Sink::File(p),
            None => Sink::Stdout,
        }
    }

    pub fn is_file(&self) -> bool {
        matches!(self, Sink::File(_))
    }

    /// Write the full artifact at once; partial files are never left behind
    /// on formatting errors because the content is built up front.
    pub fn write(&self, content: &str) -> Result<(), CliError> {
        match self {
            Sink::Stdout => {
                std::io::stdout()
                    .write_all(content.as_bytes())
                    .map_err(|e| CliError::numerical(format!("stdout: {e}")))?;
            }
            Sink::File(path) => {
                write_file(path, content)?;
            }
        }
        Ok(())
    }
}

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::numerical(format!("cannot write {}: {e}", path.display())))
}

/// CSV builder: header first, LF endings, no quoting (fields never contain
/// commas).
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv { buf, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-0.0005345223943), "-5.34522394300e-4");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn csv_shape() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(&["1".into(), num(2.0)]);
        assert_eq!(csv.finish(), "a,b\n1,2.00000000000e0\n");
    }
}

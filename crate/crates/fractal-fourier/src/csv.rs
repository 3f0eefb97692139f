//! Minimal CSV dialect: `,` separator, `\n` line endings, and `# key=value`
//! metadata lines ahead of the header. Fields never contain separators,
//! so no quoting is needed.

use std::fmt::Write as _;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CsvDoc {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest form that still carries 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Replaces characters the dialect cannot carry inside a field.
pub fn field(text: &str) -> String {
    text.chars()
        .map(|c| if matches!(c, ',' | '\n' | '\r') { ';' } else { c })
        .collect()
}

impl CsvDoc {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            meta: Vec::new(),
            header: header.iter().map(|h| h.as_ref().to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.meta.push((key.to_owned(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, reason: &str| CliError::Csv {
            line,
            reason: reason.to_owned(),
        };
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| bad(text.lines().count(), "missing final newline"))?;
        let mut doc = Self::default();
        let mut header_seen = false;
        for (i, line) in body.split('\n').enumerate() {
            let n = i + 1;
            if !header_seen {
                if let Some(rest) = line.strip_prefix("# ") {
                    let (k, v) = rest.split_once('=').ok_or_else(|| bad(n, "metadata without '='"))?;
                    doc.meta.push((k.to_owned(), v.to_owned()));
                    continue;
                }
                doc.header = line.split(',').map(str::to_owned).collect();
                header_seen = true;
                continue;
            }
            let row: Vec<String> = line.split(',').map(str::to_owned).collect();
            if row.len() != doc.header.len() {
                return Err(bad(n, "field count differs from header"));
            }
            doc.rows.push(row);
        }
        if !header_seen {
            return Err(bad(0, "no header line"));
        }
        Ok(doc)
    }
}

//! Minimal CSV: fields never contain commas, quotes or newlines, numbers use
//! the shortest representation that parses back to the same `f64`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Rust's `Display` for `f64` is already the shortest round-trip form.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // no "-0"
        "0".into()
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Row builder that keeps values in header order.
pub struct Row(Vec<(String, String)>);

impl Row {
    pub fn new() -> Self {
        Row(Vec::new())
    }

    pub fn s(mut self, k: &str, v: impl Into<String>) -> Self {
        self.0.push((k.into(), v.into()));
        self
    }

    pub fn f(self, k: &str, v: f64) -> Self {
        self.s(k, fmt_f64(v))
    }

    pub fn i(self, k: &str, v: impl std::fmt::Display) -> Self {
        let v = v.to_string();
        self.s(k, v)
    }

    pub fn b(self, k: &str, v: bool) -> Self {
        self.s(k, if v { "true" } else { "false" })
    }
}

impl Default for Row {
    fn default() -> Self {
        Row::new()
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; its keys must be the header, in order.
    pub fn push(&mut self, row: Row) {
        let keys: Vec<&str> = row.0.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, self.header, "row keys must match the header");
        debug_assert!(row.0.iter().all(|(_, v)| !v.contains([',', '\n', '"'])));
        self.rows.push(row.0.into_iter().map(|(_, v)| v).collect());
    }

    /// Builds the header from the first row.
    pub fn from_rows(rows: Vec<Row>) -> Self {
        let header = rows.first().map(|r| r.0.iter().map(|(k, _)| k.clone()).collect()).unwrap_or_default();
        let mut t = Table { header, rows: Vec::new() };
        for r in rows {
            t.push(r);
        }
        t
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Self {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().map(|h| h.split(',').map(|s| s.trim().to_string()).collect()).unwrap_or_default();
        let rows = lines.map(|l| l.split(',').map(|s| s.trim().to_string()).collect()).collect();
        Table { header, rows }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Names in `required` that the header lacks.
    pub fn missing(&self, required: &[&str]) -> Vec<String> {
        required.iter().filter(|c| self.column(c).is_none()).map(|c| c.to_string()).collect()
    }

    pub fn get(&self, row: usize, name: &str) -> Option<&str> {
        self.column(name).and_then(|c| self.rows.get(row)?.get(c)).map(String::as_str)
    }

    pub fn num(&self, row: usize, name: &str) -> f64 {
        self.get(row, name).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN)
    }

    pub fn flag(&self, row: usize, name: &str) -> bool {
        self.get(row, name) == Some("true")
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5, f64::MAX] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(2.0), "2");
        assert_eq!(fmt_f64(-0.0), "0");
    }

    #[test]
    fn render_and_parse() {
        let mut t = Table::new(&["a", "b"]);
        t.push(Row::new().f("a", 0.5).b("b", true));
        let back = Table::parse(&t.render());
        assert_eq!(back, t);
        assert_eq!(back.num(0, "a"), 0.5);
        assert!(back.flag(0, "b"));
        assert_eq!(back.missing(&["a", "c"]), vec!["c".to_string()]);
    }
}

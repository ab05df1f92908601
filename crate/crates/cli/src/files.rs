//! Plain-text point, potential and kernel files. `#` starts a comment,
//! columns are separated by whitespace.
//!
//! Points: a `window <c_1> … <c_d> <half_side>` line, then one point per line.
//! Potentials: `r v(r)` rows plus an `r_max <value>` line; `inf` marks a hard core.
//! Kernels: `r g(r)` rows.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use palmdt::geom::{AxisBox, PointConfiguration};
use palmdt::process::PairPotential;

use crate::csv::fmt_f64;

#[derive(Debug)]
pub struct FileError {
    pub path: PathBuf,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}: {}", self.path.display(), self.line, self.message)
        } else {
            write!(f, "{}: {}", self.path.display(), self.message)
        }
    }
}

impl std::error::Error for FileError {}

/// Non-comment lines split into fields, with their line numbers.
fn rows(path: &Path) -> Result<Vec<(usize, Vec<String>)>, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError { path: path.into(), line: 0, message: e.to_string() })?;
    Ok(text
        .lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let body = l.split('#').next().unwrap_or("");
            let f: Vec<String> = body.split_whitespace().map(String::from).collect();
            (!f.is_empty()).then_some((i + 1, f))
        })
        .collect())
}

fn num(path: &Path, line: usize, s: &str) -> Result<f64, FileError> {
    s.parse().map_err(|_| FileError { path: path.into(), line, message: format!("expected a number, got {s:?}") })
}

pub fn read_points(path: &Path) -> Result<PointConfiguration, FileError> {
    let rows = rows(path)?;
    let fail = |line, message: String| FileError { path: path.into(), line, message };
    let Some((wl, head)) = rows.first() else {
        return Err(fail(0, "empty point file (expected a window line)".into()));
    };
    if head[0] != "window" || head.len() < 3 {
        return Err(fail(*wl, "first line must be `window <c_1> … <c_d> <half_side>`".into()));
    }
    let vals = head[1..].iter().map(|s| num(path, *wl, s)).collect::<Result<Vec<_>, _>>()?;
    let d = vals.len() - 1;
    let window = AxisBox::new(vals[..d].to_vec(), vals[d]).map_err(|e| fail(*wl, e.to_string()))?;
    let mut coords = Vec::new();
    for (line, f) in &rows[1..] {
        if f.len() != d {
            return Err(fail(*line, format!("expected {d} coordinates, got {}", f.len())));
        }
        for s in f {
            coords.push(num(path, *line, s)?);
        }
    }
    PointConfiguration::from_flat(window, coords).map_err(|e| fail(0, e.to_string()))
}

pub fn format_points(cfg: &PointConfiguration) -> String {
    let w = cfg.window();
    let mut s = String::from("# palmdt points\nwindow");
    for c in w.center() {
        s.push(' ');
        s.push_str(&fmt_f64(*c));
    }
    s.push(' ');
    s.push_str(&fmt_f64(w.half_side()));
    s.push('\n');
    for p in cfg.points() {
        let cols: Vec<String> = p.iter().map(|&x| fmt_f64(x)).collect();
        s.push_str(&cols.join(" "));
        s.push('\n');
    }
    s
}

pub fn read_potential(path: &Path) -> Result<PairPotential, FileError> {
    let (mut r, mut v, mut r_max) = (Vec::new(), Vec::new(), None);
    let fail = |line, message: String| FileError { path: path.into(), line, message };
    for (line, f) in rows(path)? {
        match (f[0].as_str(), f.len()) {
            ("r_max", 2) => r_max = Some(num(path, line, &f[1])?),
            (_, 2) => {
                r.push(num(path, line, &f[0])?);
                v.push(num(path, line, &f[1])?);
            }
            _ => return Err(fail(line, "expected `r v` or `r_max <value>`".into())),
        }
    }
    let r_max = r_max.ok_or_else(|| fail(0, "missing `r_max <value>` line".into()))?;
    PairPotential::table(r, v, r_max).map_err(|e| fail(0, e.to_string()))
}

pub fn read_kernel(path: &Path) -> Result<(Vec<f64>, Vec<f64>), FileError> {
    let (mut r, mut g) = (Vec::new(), Vec::new());
    for (line, f) in rows(path)? {
        if f.len() != 2 {
            return Err(FileError { path: path.into(), line, message: "expected `r g`".into() });
        }
        r.push(num(path, line, &f[0])?);
        g.push(num(path, line, &f[1])?);
    }
    Ok((r, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_survive_a_write_and_read() {
        let dir = tempfile::tempdir().unwrap();
        let w = AxisBox::centered(2, 3.0).unwrap();
        let cfg = PointConfiguration::from_flat(w, vec![0.1, -2.5, 1.0 / 3.0, 2.0]).unwrap();
        let p = dir.path().join("pts.txt");
        fs::write(&p, format_points(&cfg)).unwrap();
        assert_eq!(read_points(&p).unwrap(), cfg);
    }

    #[test]
    fn potential_table_with_hard_core() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pot.txt");
        fs::write(&p, "# strauss-like\n0 inf\n0.1 inf\n0.1000001 1\n0.5 1\nr_max 0.5\n").unwrap();
        let pot = read_potential(&p).unwrap();
        assert!(matches!(pot, PairPotential::Table { .. }));
        fs::write(&p, "0 1\n").unwrap();
        assert!(read_potential(&p).unwrap_err().message.contains("r_max"));
        fs::write(&p, "0 1 2\n").unwrap();
        assert_eq!(read_potential(&p).unwrap_err().line, 1);
    }
}

//! Static SVG figures for the experiment CSVs. Each kind checks its required
//! columns first; an empty body still produces the axes.

use std::fmt::{self, Write};

use crate::csv::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    LogLogVoid,
    PhiVsP,
    ClusterCdf,
    PalmTrace,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [PlotKind::LogLogVoid, PlotKind::PhiVsP, PlotKind::ClusterCdf, PlotKind::PalmTrace];

    pub fn tag(self) -> &'static str {
        match self {
            PlotKind::LogLogVoid => "loglog-void",
            PlotKind::PhiVsP => "phi-vs-p",
            PlotKind::ClusterCdf => "cluster-cdf",
            PlotKind::PalmTrace => "palm-trace",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == s)
    }

    pub fn required(self) -> &'static [&'static str] {
        match self {
            PlotKind::LogLogVoid => &["ell", "frequency", "std_error", "intensity", "dim", "alpha", "log_kappa"],
            PlotKind::PhiVsP => &["p", "R", "phi", "phi_se", "bound"],
            PlotKind::ClusterCdf => &["p", "largest_size"],
            PlotKind::PalmTrace => &["quantity", "exponent", "route", "n", "running_mean"],
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub kind: &'static str,
    pub missing: Vec<String>,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CSV does not fit plot kind {}: missing columns {}", self.kind, self.missing.join(", "))
    }
}

impl std::error::Error for SchemaError {}

/// A mark drawn in data coordinates.
enum Mark {
    Point { x: f64, y: f64, series: usize },
    ErrorBar { x: f64, lo: f64, hi: f64, series: usize },
    Line { pts: Vec<(f64, f64)>, series: usize, dashed: bool },
}

struct Figure {
    title: String,
    xlabel: String,
    ylabel: String,
    marks: Vec<Mark>,
    legend: Vec<String>,
}

const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const W: f64 = 640.0;
const H: f64 = 440.0;
const ML: f64 = 70.0;
const MR: f64 = 150.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;

/// Distinct values of `col` in first-seen order.
fn groups(t: &Table, col: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in 0..t.rows.len() {
        let v = t.get(r, col).unwrap_or("").to_string();
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

pub fn render(kind: PlotKind, t: &Table) -> Result<String, SchemaError> {
    let missing = t.missing(kind.required());
    if !missing.is_empty() {
        return Err(SchemaError { kind: kind.tag(), missing });
    }
    let fig = match kind {
        PlotKind::LogLogVoid => loglog_void(t),
        PlotKind::PhiVsP => phi_vs_p(t),
        PlotKind::ClusterCdf => cluster_cdf(t),
        PlotKind::PalmTrace => palm_trace(t),
    };
    Ok(draw(&fig))
}

/// `ln P(void)` against `ln ℓ`, with the fitted line and, when the
/// intensity is known, the Poisson curve `−m(2ℓ)^d`.
fn loglog_void(t: &Table) -> Figure {
    let mut marks = Vec::new();
    let mut xs = Vec::new();
    for r in 0..t.rows.len() {
        let (ell, f, se) = (t.num(r, "ell"), t.num(r, "frequency"), t.num(r, "std_error"));
        if !(ell > 0.0) {
            continue;
        }
        xs.push(ell.ln());
        if f > 0.0 {
            marks.push(Mark::Point { x: ell.ln(), y: f.ln(), series: 0 });
            let lo = (f - se).max(f * 1e-3);
            marks.push(Mark::ErrorBar { x: ell.ln(), lo: lo.ln(), hi: (f + se).ln(), series: 0 });
        }
    }
    let mut legend = vec!["estimate".to_string()];
    if !t.rows.is_empty() && !xs.is_empty() {
        let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let span: Vec<f64> = (0..=40).map(|i| lo + (hi - lo) * i as f64 / 40.0).collect();
        let (alpha, kappa) = (t.num(0, "alpha"), t.num(0, "log_kappa"));
        if alpha.is_finite() && kappa.is_finite() {
            marks.push(Mark::Line { pts: span.iter().map(|&x| (x, kappa - alpha * x)).collect(), series: 1, dashed: true });
            legend.push("fitted line".into());
        }
        let (m, d) = (t.num(0, "intensity"), t.num(0, "dim"));
        if m.is_finite() && d >= 1.0 {
            let pts = span.iter().map(|&x| (x, -m * (2.0 * x.exp()).powf(d))).collect();
            marks.push(Mark::Line { pts, series: 2, dashed: false });
            legend.push("Poisson".into());
        }
    }
    Figure { title: "void probability".into(), xlabel: "ln ell".into(), ylabel: "ln P(void)".into(), marks, legend }
}

/// `φ̂` per `R` against `p`, with each `R`'s bound where the row claims it.
fn phi_vs_p(t: &Table) -> Figure {
    let rs = groups(t, "R");
    let mut marks = Vec::new();
    for (s, rv) in rs.iter().enumerate() {
        let mut rows: Vec<usize> = (0..t.rows.len()).filter(|&r| t.get(r, "R") == Some(rv.as_str())).collect();
        rows.sort_by(|&a, &b| t.num(a, "p").total_cmp(&t.num(b, "p")));
        let mut bound = Vec::new();
        for r in rows {
            let (p, phi, se) = (t.num(r, "p"), t.num(r, "phi"), t.num(r, "phi_se"));
            marks.push(Mark::Point { x: p, y: phi, series: s });
            marks.push(Mark::ErrorBar { x: p, lo: phi - se, hi: phi + se, series: s });
            let b = t.num(r, "bound");
            let applicable = t.column("applicable").is_none() || t.flag(r, "applicable");
            if applicable && b.is_finite() && b <= 1.0 {
                bound.push((p, b));
            }
        }
        if bound.len() > 1 {
            marks.push(Mark::Line { pts: bound, series: s, dashed: true });
        }
    }
    let legend = rs.iter().map(|r| format!("R = {r}")).collect();
    Figure { title: "open-box probability".into(), xlabel: "p".into(), ylabel: "phi".into(), marks, legend }
}

/// Empirical CDF of the largest cluster size, one curve per `p`.
fn cluster_cdf(t: &Table) -> Figure {
    let ps = groups(t, "p");
    let mut marks = Vec::new();
    for (s, pv) in ps.iter().enumerate() {
        let mut v: Vec<f64> =
            (0..t.rows.len()).filter(|&r| t.get(r, "p") == Some(pv.as_str())).map(|r| t.num(r, "largest_size")).collect();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mut pts = Vec::new();
        for (i, &x) in v.iter().enumerate() {
            pts.push((x, i as f64 / n));
            pts.push((x, (i + 1) as f64 / n));
        }
        marks.push(Mark::Line { pts, series: s, dashed: false });
    }
    let legend = ps.iter().map(|p| format!("p = {p}")).collect();
    Figure { title: "largest cluster".into(), xlabel: "size".into(), ylabel: "ECDF".into(), marks, legend }
}

/// Running means against the replicate count, one curve per estimator.
fn palm_trace(t: &Table) -> Figure {
    let key = |r: usize| {
        format!("{} {} {}", t.get(r, "quantity").unwrap_or(""), t.get(r, "exponent").unwrap_or(""), t.get(r, "route").unwrap_or(""))
    };
    let mut names: Vec<String> = Vec::new();
    let mut marks = Vec::new();
    for r in 0..t.rows.len() {
        let k = key(r);
        if !names.contains(&k) {
            names.push(k);
        }
    }
    for (s, name) in names.iter().enumerate() {
        let pts = (0..t.rows.len()).filter(|&r| &key(r) == name).map(|r| (t.num(r, "n"), t.num(r, "running_mean"))).collect();
        marks.push(Mark::Line { pts, series: s, dashed: false });
    }
    Figure { title: "Palm estimate trace".into(), xlabel: "replicates".into(), ylabel: "running mean".into(), marks, legend: names }
}

fn extent(fig: &Figure) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut add = |x: f64, y: f64| {
        if x.is_finite() && y.is_finite() {
            b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
        }
    };
    for m in &fig.marks {
        match m {
            Mark::Point { x, y, .. } => add(*x, *y),
            Mark::ErrorBar { x, lo, hi, .. } => {
                add(*x, *lo);
                add(*x, *hi);
            }
            Mark::Line { pts, .. } => pts.iter().for_each(|&(x, y)| add(x, y)),
        }
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| if hi - lo < 1e-12 { (lo - 0.5, hi + 0.5) } else { (lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)) };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw(fig: &Figure) -> String {
    let (x0, x1, y0, y1) = extent(fig);
    let (pw, ph) = (W - ML - MR, H - MT - MB);
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MT + ph - (y - y0) / (y1 - y0) * ph;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, ML + pw / 2.0, esc(&fig.title));
    // axes
    let _ = writeln!(s, r#"<g class="axes" stroke="black"><line x1="{ML}" y1="{}" x2="{}" y2="{}"/><line x1="{ML}" y1="{MT}" x2="{ML}" y2="{}"/></g>"#, MT + ph, ML + pw, MT + ph, MT + ph);
    for i in 0..=4 {
        let (fx, fy) = (x0 + (x1 - x0) * i as f64 / 4.0, y0 + (y1 - y0) * i as f64 / 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(fx), MT + ph + 16.0, tick(fx));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, ML - 6.0, sy(fy) + 4.0, tick(fy));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, ML + pw / 2.0, H - 14.0, esc(&fig.xlabel));
    let _ = writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#, MT + ph / 2.0, MT + ph / 2.0, esc(&fig.ylabel));
    for m in &fig.marks {
        match m {
            Mark::Point { x, y, series } if x.is_finite() && y.is_finite() => {
                let _ = writeln!(s, r#"<circle class="mark" cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, sx(*x), sy(*y), COLORS[series % 8]);
            }
            Mark::ErrorBar { x, lo, hi, series } if x.is_finite() && lo.is_finite() && hi.is_finite() => {
                let _ = writeln!(s, r#"<line class="errorbar" x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{3}"/>"#, sx(*x), sy(*lo), sy(*hi), COLORS[series % 8]);
            }
            Mark::Line { pts, series, dashed } => {
                let path: Vec<String> = pts.iter().filter(|(x, y)| x.is_finite() && y.is_finite()).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                if path.len() > 1 {
                    let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(s, r#"<polyline class="mark" fill="none" stroke="{}"{dash} points="{}"/>"#, COLORS[series % 8], path.join(" "));
                }
            }
            _ => {}
        }
    }
    for (i, name) in fig.legend.iter().enumerate() {
        let y = MT + 10.0 + 18.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{}</text>"#, W - MR + 12.0, y - 9.0, COLORS[i % 8], W - MR + 28.0, y, esc(name));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        let t = format!("{v:.3}");
        t.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_lists_every_missing_column() {
        let t = Table::parse("p,phi\n0.5,0.1\n");
        let e = render(PlotKind::PhiVsP, &t).unwrap_err();
        assert_eq!(e.missing, vec!["R", "phi_se", "bound"]);
    }

    #[test]
    fn empty_body_draws_axes_only() {
        for k in PlotKind::ALL {
            let t = Table::parse(&(k.required().join(",") + "\n"));
            let svg = render(k, &t).unwrap();
            assert!(svg.contains(r#"class="axes""#));
            assert!(!svg.contains(r#"class="mark""#), "{}", k.tag());
        }
    }

    #[test]
    fn void_overlays_poisson_curve() {
        let t = Table::parse(
            "ell,frequency,std_error,intensity,dim,alpha,log_kappa\n0.25,0.78,0.01,1,2,2,0\n0.5,0.37,0.01,1,2,2,0\n",
        );
        let svg = render(PlotKind::LogLogVoid, &t).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("Poisson"));
    }
}

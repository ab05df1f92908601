//! Line-oriented experiment configs: `key=value`, `#` comments, grids as
//! comma-separated numbers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use palmdt::conductance::ConductanceLaw;
use palmdt::moments::Route;
use palmdt::process::{GibbsSpec, PairPotential, ProcessSpec};

use crate::files;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub path: Option<PathBuf>,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.path {
            write!(f, "{}:", p.display())?;
        }
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Moments,
    Void,
    Palm,
    Chain,
    Percolation,
    ZdProcess,
    SepCheck,
    GeometrySelftest,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Moments,
        Experiment::Void,
        Experiment::Palm,
        Experiment::Chain,
        Experiment::Percolation,
        Experiment::ZdProcess,
        Experiment::SepCheck,
        Experiment::GeometrySelftest,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Experiment::Moments => "moments",
            Experiment::Void => "void",
            Experiment::Palm => "palm",
            Experiment::Chain => "chain",
            Experiment::Percolation => "percolation",
            Experiment::ZdProcess => "zdprocess",
            Experiment::SepCheck => "sepcheck",
            Experiment::GeometrySelftest => "geometry-selftest",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.tag() == s)
    }
}

/// One `key=value` line, with the 1-based position of the value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub process: ProcessSpec,
    pub conductance: ConductanceLaw,
    pub grids: BTreeMap<String, Vec<f64>>,
    pub replicates: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub dim: usize,
    /// Other numeric settings (`window_half`, `core_half`, `n_max`, ...).
    pub options: BTreeMap<String, f64>,
    pub quantities: Vec<String>,
    pub routes: Vec<Route>,
    /// The entries as read, for the run manifest.
    pub entries: Vec<Entry>,
}

const GRIDS: [&str; 11] = ["ell", "L", "gamma", "p", "R", "t0", "beta", "zeta", "order", "alpha", "half"];
const OPTIONS: [&str; 7] = ["window_half", "core_half", "n_max", "lattice_half", "mgf_half", "locality_samples", "dim"];

impl ExperimentConfig {
    pub fn grid(&self, name: &str) -> &[f64] {
        self.grids.get(name).map_or(&[], Vec::as_slice)
    }

    pub fn option(&self, name: &str, default: f64) -> f64 {
        self.options.get(name).copied().unwrap_or(default)
    }
}

/// Splits `text` into entries. Blank lines and `#` comments are skipped;
/// a `#` after a value starts a trailing comment.
pub fn tokenize(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            let col = body.len() - body.trim_start().len() + 1;
            return Err(err(line, col, format!("expected key=value, got {:?}", body.trim())));
        };
        let key = body[..eq].trim();
        let key_col = body.len() - body.trim_start().len() + 1;
        if key.is_empty() {
            return Err(err(line, key_col, "missing key before '='".into()));
        }
        if key.contains(char::is_whitespace) {
            return Err(err(line, key_col, format!("key {key:?} contains whitespace")));
        }
        let rest = &body[eq + 1..];
        let value = rest.trim();
        let column = eq + 2 + (rest.len() - rest.trim_start().len());
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(err(line, key_col, format!("duplicate key {key:?} (first set on line {})", prev.line)));
        }
        out.push(Entry { key: key.into(), value: value.into(), line, column });
    }
    Ok(out)
}

fn err(line: usize, column: usize, message: String) -> ConfigError {
    ConfigError { path: None, line, column, message }
}

fn at(e: &Entry, message: String) -> ConfigError {
    err(e.line, e.column, message)
}

fn number(e: &Entry) -> Result<f64, ConfigError> {
    let x: f64 = e.value.parse().map_err(|_| at(e, format!("{}: expected a number, got {:?}", e.key, e.value)))?;
    if !x.is_finite() {
        return Err(at(e, format!("{}: value must be finite", e.key)));
    }
    Ok(x)
}

fn integer(e: &Entry, min: u64) -> Result<u64, ConfigError> {
    let x: u64 = e.value.parse().map_err(|_| at(e, format!("{}: expected an integer, got {:?}", e.key, e.value)))?;
    if x < min {
        return Err(at(e, format!("{}: must be at least {min}, got {x}", e.key)));
    }
    Ok(x)
}

/// Comma-separated numbers; reports the column of the offending item.
fn grid(e: &Entry) -> Result<Vec<f64>, ConfigError> {
    if e.value.is_empty() {
        return Err(at(e, format!("{}: grid must not be empty", e.key)));
    }
    let mut out = Vec::new();
    let mut col = e.column;
    for item in e.value.split(',') {
        let lead = item.len() - item.trim_start().len();
        let t = item.trim();
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => out.push(x),
            _ => return Err(err(e.line, col + lead, format!("{}: expected a number, got {t:?}", e.key))),
        }
        col += item.len() + 1;
    }
    Ok(out)
}

fn resolve(base: Option<&Path>, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    }
}

/// The process described by `process=` and the `param.*` entries (plus
/// `potential=`/`boundary=` files for Gibbs). Defaults to Poisson with
/// intensity 1.
pub fn parse_process(entries: &[Entry], base: Option<&Path>) -> Result<ProcessSpec, ConfigError> {
    let find = |k: &str| entries.iter().find(|e| e.key == k);
    let tag_entry = find("process");
    let tag = tag_entry.map_or("poisson", |e| e.value.as_str());
    let params: Vec<&Entry> = entries.iter().filter(|e| e.key.starts_with("param.")).collect();
    let known: &[&str] = match tag {
        "poisson" => &["m", "intensity"],
        "matern_cluster" => &["parent_intensity", "mean_offspring", "radius"],
        "matern_hardcore" => &["proposal_intensity", "radius"],
        "gibbs" => &["z", "beta", "burn_in", "gap", "strauss_strength", "strauss_radius", "hardcore_radius"],
        _ => {
            let e = tag_entry.expect("default tag is known");
            return Err(at(e, format!("unknown process {tag:?} (poisson, matern_cluster, matern_hardcore, gibbs)")));
        }
    };
    let mut vals: BTreeMap<&str, (f64, &Entry)> = BTreeMap::new();
    for e in &params {
        let name = &e.key["param.".len()..];
        if !known.contains(&name) {
            return Err(err(e.line, 1, format!("unknown parameter {name:?} for process {tag} (expected one of {known:?})")));
        }
        vals.insert(name, (number(e)?, e));
    }
    let missing = |name: &str| {
        let (line, col) = tag_entry.map_or((1, 1), |e| (e.line, e.column));
        err(line, col, format!("process {tag} needs param.{name}"))
    };
    let get = |name: &str| vals.get(name).map(|v| v.0).ok_or_else(|| missing(name));
    let spec = match tag {
        "poisson" => ProcessSpec::poisson(vals.get("m").or(vals.get("intensity")).map_or(1.0, |v| v.0)),
        "matern_cluster" => ProcessSpec::MaternCluster {
            parent_intensity: get("parent_intensity")?,
            mean_offspring: get("mean_offspring")?,
            radius: get("radius")?,
        },
        "matern_hardcore" => {
            ProcessSpec::MaternHardcore { proposal_intensity: get("proposal_intensity")?, radius: get("radius")? }
        }
        _ => {
            let potential = if let Some(e) = find("potential") {
                files::read_potential(&resolve(base, &e.value)).map_err(|m| at(e, m.to_string()))?
            } else if vals.contains_key("strauss_strength") || vals.contains_key("strauss_radius") {
                PairPotential::Strauss { strength: get("strauss_strength")?, radius: get("strauss_radius")? }
            } else if let Some(&(radius, _)) = vals.get("hardcore_radius") {
                PairPotential::HardCore { radius }
            } else {
                return Err(missing("strauss_strength (or potential=<file>, or param.hardcore_radius)"));
            };
            let mut g = GibbsSpec::new(get("z")?, vals.get("beta").map_or(1.0, |v| v.0), potential);
            for (name, slot) in [("burn_in", &mut g.burn_in), ("gap", &mut g.gap)] {
                if let Some(&(x, e)) = vals.get(name) {
                    if x.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&x) {
                        return Err(at(e, format!("param.{name} must be a nonnegative integer")));
                    }
                    *slot = x as u32;
                }
            }
            if let Some(e) = find("boundary") {
                g.boundary = Some(files::read_points(&resolve(base, &e.value)).map_err(|m| at(e, m.to_string()))?);
            }
            ProcessSpec::Gibbs(g)
        }
    };
    spec.validate().map_err(|m| {
        let (line, col) = tag_entry.map_or((1, 1), |e| (e.line, e.column));
        err(line, col, m.to_string())
    })?;
    Ok(spec)
}

/// The law from `conductance=` and its `conductance.*` entries; unit
/// conductances by default.
pub fn parse_conductance(entries: &[Entry], base: Option<&Path>) -> Result<ConductanceLaw, ConfigError> {
    let tag_entry = entries.iter().find(|e| e.key == "conductance");
    let tag = tag_entry.map_or("unit", |e| e.value.as_str());
    let sub: BTreeMap<&str, &Entry> =
        entries.iter().filter_map(|e| e.key.strip_prefix("conductance.").map(|k| (k, e))).collect();
    let known: &[&str] = match tag {
        "unit" => &[],
        "constant" => &["c"],
        "uniform" => &["lo", "hi"],
        "lognormal" => &["mu", "sigma"],
        "distance_kernel" => &["file"],
        _ => {
            let e = tag_entry.expect("default tag is known");
            return Err(at(e, format!("unknown conductance law {tag:?} (unit, constant, uniform, lognormal, distance_kernel)")));
        }
    };
    for (k, e) in &sub {
        if !known.contains(k) {
            return Err(err(e.line, 1, format!("unknown setting conductance.{k} for law {tag}")));
        }
    }
    let need = |k: &str| -> Result<&Entry, ConfigError> {
        sub.get(k).copied().ok_or_else(|| {
            let (line, col) = tag_entry.map_or((1, 1), |e| (e.line, e.column));
            err(line, col, format!("conductance law {tag} needs conductance.{k}"))
        })
    };
    let law = match tag {
        "unit" => ConductanceLaw::Unit,
        "constant" => ConductanceLaw::Constant(number(need("c")?)?),
        "uniform" => ConductanceLaw::Uniform { lo: number(need("lo")?)?, hi: number(need("hi")?)? },
        "lognormal" => ConductanceLaw::LogNormal { mu: number(need("mu")?)?, sigma: number(need("sigma")?)? },
        _ => {
            let e = need("file")?;
            let (r, g) = files::read_kernel(&resolve(base, &e.value)).map_err(|m| at(e, m.to_string()))?;
            ConductanceLaw::DistanceKernel { r, g }
        }
    };
    law.validate().map_err(|m| {
        let (line, col) = tag_entry.map_or((1, 1), |e| (e.line, e.column));
        err(line, col, m.to_string())
    })?;
    Ok(law)
}

fn default_grid(exp: Experiment, name: &str) -> Option<Vec<f64>> {
    let g = match (exp, name) {
        (Experiment::Moments, "gamma") => vec![1.0, 2.0, 3.0],
        (Experiment::Void, "ell") => vec![0.25, 0.5, 0.75, 1.0],
        (Experiment::Palm, "order") => vec![1.0],
        (Experiment::Palm, "zeta") => vec![1.0],
        (Experiment::Palm, "half") => vec![1.0],
        (Experiment::Chain, "beta") => vec![2.0],
        (Experiment::Percolation, "p") => (1..=9).map(|k| k as f64 / 10.0).collect(),
        (Experiment::Percolation, "R") => vec![4.0, 8.0, 16.0, 32.0],
        (Experiment::ZdProcess, "p") => vec![0.3, 0.6, 0.9],
        (Experiment::ZdProcess, "R") => vec![8.0],
        (Experiment::SepCheck, "t0") => vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0],
        _ => return None,
    };
    Some(g)
}

/// Parses a whole config. Relative file paths resolve against `base`.
pub fn parse_config(text: &str, base: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
    let entries = tokenize(text)?;
    let find = |k: &str| entries.iter().find(|e| e.key == k);
    for e in &entries {
        let k = e.key.as_str();
        let ok = matches!(
            k,
            "experiment" | "process" | "potential" | "boundary" | "conductance" | "replicates" | "seed" | "output" | "quantity" | "routes"
        ) || k.starts_with("param.")
            || k.starts_with("conductance.")
            || k.strip_prefix("grid.").is_some_and(|g| GRIDS.contains(&g))
            || OPTIONS.contains(&k);
        if !ok {
            return Err(err(e.line, 1, format!("unknown key {k:?}")));
        }
    }
    let exp_entry = find("experiment").ok_or_else(|| err(1, 1, "missing experiment=<tag>".into()))?;
    let experiment = Experiment::parse(&exp_entry.value).ok_or_else(|| {
        let tags: Vec<&str> = Experiment::ALL.iter().map(|e| e.tag()).collect();
        at(exp_entry, format!("unknown experiment {:?} (one of {})", exp_entry.value, tags.join(", ")))
    })?;
    let process = parse_process(&entries, base)?;
    let conductance = parse_conductance(&entries, base)?;

    let mut grids = BTreeMap::new();
    for e in entries.iter().filter(|e| e.key.starts_with("grid.")) {
        let name = &e.key["grid.".len()..];
        let g = grid(e)?;
        if name == "L" && g.iter().any(|l| *l < 1.0 || l.fract() != 0.0) {
            return Err(at(e, "grid.L takes integers >= 1".into()));
        }
        if name == "p" && g.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(at(e, "grid.p takes probabilities in [0, 1]".into()));
        }
        grids.insert(name.to_string(), g);
    }
    for name in GRIDS {
        if !grids.contains_key(name) {
            if let Some(g) = default_grid(experiment, name) {
                grids.insert(name.to_string(), g);
            }
        }
    }
    let mut options = BTreeMap::new();
    for e in entries.iter().filter(|e| OPTIONS.contains(&e.key.as_str())) {
        let x = number(e)?;
        if x < 0.0 {
            return Err(at(e, format!("{} must be >= 0", e.key)));
        }
        options.insert(e.key.clone(), x);
    }
    let dim = match find("dim") {
        Some(e) => {
            let d = integer(e, 1)? as usize;
            if d > 3 {
                return Err(at(e, format!("dim must be 1, 2 or 3, got {d}")));
            }
            d
        }
        None => 2,
    };
    let replicates = find("replicates").map_or(Ok(1000), |e| integer(e, 1))? as usize;
    let seed = find("seed").map_or(Ok(0), |e| integer(e, 0))?;
    let output_dir = find("output").map_or_else(|| PathBuf::from("out").join(experiment.tag()), |e| PathBuf::from(&e.value));

    let quantities: Vec<String> = match find("quantity") {
        Some(e) => e.value.split(',').map(|s| s.trim().to_string()).collect(),
        None => vec!["deg_p".into()],
    };
    if let Some(e) = find("quantity") {
        for q in &quantities {
            if !matches!(q.as_str(), "zeta_sum" | "lambda0" | "lambda2" | "deg_p" | "mu_p" | "nu_p" | "box_count") {
                return Err(at(e, format!("unknown quantity {q:?}")));
            }
        }
    }
    let routes = match find("routes") {
        Some(e) => e
            .value
            .split(',')
            .map(|s| match s.trim() {
                "slivnyak" => Ok(Route::Slivnyak),
                "campbell" => Ok(Route::Campbell),
                other => Err(at(e, format!("unknown route {other:?} (slivnyak, campbell)"))),
            })
            .collect::<Result<Vec<_>, _>>()?,
        None if matches!(process, ProcessSpec::Poisson { .. }) => vec![Route::Slivnyak, Route::Campbell],
        None => vec![Route::Campbell],
    };
    Ok(ExperimentConfig {
        experiment,
        process,
        conductance,
        grids,
        replicates,
        seed,
        output_dir,
        dim,
        options,
        quantities,
        routes,
        entries,
    })
}

/// Reads and parses a config file; errors carry the path.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: Some(path.to_path_buf()),
        line: 0,
        column: 0,
        message: format!("cannot read config: {e}"),
    })?;
    parse_config(&text, path.parent()).map_err(|mut e| {
        e.path = Some(path.to_path_buf());
        e
    })
}

/// A commas-free description of the process, for CSV rows.
pub fn describe_process(spec: &ProcessSpec) -> String {
    match spec {
        ProcessSpec::Poisson { intensity } => format!("poisson(m={intensity})"),
        ProcessSpec::MaternCluster { parent_intensity, mean_offspring, radius } => {
            format!("matern_cluster(parent_intensity={parent_intensity};mean_offspring={mean_offspring};radius={radius})")
        }
        ProcessSpec::MaternHardcore { proposal_intensity, radius } => {
            format!("matern_hardcore(proposal_intensity={proposal_intensity};radius={radius})")
        }
        ProcessSpec::Gibbs(g) => {
            let pot = match &g.potential {
                PairPotential::Strauss { strength, radius } => format!("strauss({strength};{radius})"),
                PairPotential::HardCore { radius } => format!("hardcore({radius})"),
                PairPotential::Table { r, r_max, .. } => format!("table({} knots;r_max={r_max})", r.len()),
            };
            format!(
                "gibbs(z={};beta={};potential={pot};burn_in={};gap={}{})",
                g.activity,
                g.beta,
                g.burn_in,
                g.gap,
                if g.boundary.is_some() { ";boundary" } else { "" }
            )
        }
    }
}

pub fn describe_law(law: &ConductanceLaw) -> String {
    match law {
        ConductanceLaw::Unit => "unit".into(),
        ConductanceLaw::Constant(c) => format!("constant({c})"),
        ConductanceLaw::Uniform { lo, hi } => format!("uniform({lo};{hi})"),
        ConductanceLaw::LogNormal { mu, sigma } => format!("lognormal({mu};{sigma})"),
        ConductanceLaw::DistanceKernel { r, .. } => format!("distance_kernel({} knots)", r.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_example() {
        let c = parse_config(
            "# Poisson moments\nexperiment=moments\nprocess=poisson\nparam.m=1\ngrid.gamma=1,2,3\nreplicates=100000\nseed=42\n",
            None,
        )
        .unwrap();
        assert_eq!(c.experiment, Experiment::Moments);
        assert_eq!(c.process, ProcessSpec::poisson(1.0));
        assert_eq!(c.grid("gamma"), &[1.0, 2.0, 3.0]);
        assert_eq!((c.replicates, c.seed), (100_000, 42));
        assert_eq!(c.output_dir, PathBuf::from("out/moments"));
    }

    #[test]
    fn errors_point_at_the_value() {
        let e = parse_config("experiment=void\ngrid.ell=0.5, x,1\n", None).unwrap_err();
        assert_eq!((e.line, e.column), (2, 15), "{e}");
        let e = parse_config("experiment=moments\n  replicates = zero\n", None).unwrap_err();
        assert_eq!((e.line, e.column), (2, 16), "{e}");
        let e = parse_config("experiment=moments\nnonsense\n", None).unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        let e = parse_config("experiment=flying\n", None).unwrap_err();
        assert_eq!((e.line, e.column), (1, 12));
        let e = parse_config("seed=1\n", None).unwrap_err();
        assert!(e.message.contains("missing experiment"));
        let e = parse_config("experiment=void\nseed=1\nseed=2\n", None).unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn empty_grid_and_bad_params_are_rejected() {
        assert!(parse_config("experiment=void\ngrid.ell=\n", None).is_err());
        let e = parse_config("experiment=moments\nprocess=poisson\nparam.lambda=2\n", None).unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_config("experiment=moments\nprocess=poisson\nparam.m=-1\n", None).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_config("experiment=moments\nreplicates=0\n", None).is_err());
        assert!(parse_config("experiment=moments\ngrid.L=1.5\n", None).is_err());
    }

    #[test]
    fn gibbs_and_laws() {
        let c = parse_config(
            "experiment=moments\nprocess=gibbs\nparam.z=1.5\nparam.beta=0\nparam.strauss_strength=1\nparam.strauss_radius=0.2\nparam.burn_in=50\nconductance=uniform\nconductance.lo=0.5\nconductance.hi=2 # bounded\n",
            None,
        )
        .unwrap();
        let ProcessSpec::Gibbs(g) = &c.process else { panic!() };
        assert_eq!((g.activity, g.beta, g.burn_in), (1.5, 0.0, 50));
        assert_eq!(c.conductance, ConductanceLaw::Uniform { lo: 0.5, hi: 2.0 });
        assert!(parse_config("experiment=moments\nprocess=gibbs\nparam.z=1\n", None).is_err());
        assert!(parse_config("experiment=sepcheck\nconductance=uniform\nconductance.lo=1\n", None).is_err());
    }

    #[test]
    fn defaults_fill_missing_grids() {
        let c = parse_config("experiment=percolation\n", None).unwrap();
        assert_eq!(c.grid("R"), &[4.0, 8.0, 16.0, 32.0]);
        assert_eq!(c.grid("p").len(), 9);
        assert_eq!(c.routes, vec![Route::Slivnyak, Route::Campbell]);
    }
}

//! One function per experiment tag, each returning its CSV tables. Every
//! row carries the seed, the replicate count and the parameters needed to
//! re-run it alone.

use anyhow::{bail, Context, Result};
use palmdt::exec::Executor;
use palmdt::moments::{
    chain_study, check_mgf_bound, check_moment_inequalities, estimate_palm_box_count, estimate_palm_moment,
    estimate_rho_gamma, estimate_void_probability, PalmMomentSettings, PalmQuantity,
};
use palmdt::percolation::{locality_check, phi_study, sep_check, zd_study};
use palmdt::selftest::run_selftest;
use palmdt::stats::EstimateReport;

use crate::config::{describe_law, describe_process, Experiment, ExperimentConfig};
use crate::csv::{Row, Table};

pub type Outputs = Vec<(String, Table)>;

pub fn run_experiment<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let out = match cfg.experiment {
        Experiment::Moments => moments(cfg, exec),
        Experiment::Void => void(cfg, exec),
        Experiment::Palm => palm(cfg, exec),
        Experiment::Chain => chain(cfg, exec),
        Experiment::Percolation => percolation(cfg, exec),
        Experiment::ZdProcess => zdprocess(cfg, exec),
        Experiment::SepCheck => sepcheck(cfg, exec),
        Experiment::GeometrySelftest => selftest(cfg),
    };
    out.with_context(|| format!("{} experiment", cfg.experiment.tag()))
}

fn base(cfg: &ExperimentConfig) -> Row {
    Row::new().s("process", describe_process(&cfg.process))
}

fn tail(row: Row, replicates: usize, seed: u64) -> Row {
    row.i("replicates", replicates).i("seed", seed).b("single_replicate", replicates == 1)
}

fn nonempty<'a>(cfg: &'a ExperimentConfig, name: &str) -> Result<&'a [f64]> {
    let g = cfg.grid(name);
    if g.is_empty() {
        bail!("grid.{name} is required for the {} experiment", cfg.experiment.tag());
    }
    Ok(g)
}

fn moments<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let (d, n, seed) = (cfg.dim, cfg.replicates, cfg.seed);
    let gammas = nonempty(cfg, "gamma")?;
    let mut rho = Vec::new();
    for &g in gammas {
        let r = estimate_rho_gamma(&cfg.process, d, g, n, seed, exec)?;
        rho.push(tail(base(cfg).i("dim", d).f("gamma", g).f("estimate", r.estimate).f("std_error", r.std_error), n, seed));
    }
    let mut out = vec![("rho.csv".to_string(), Table::from_rows(rho))];
    let ls = cfg.grid("L");
    if !ls.is_empty() {
        let ls: Vec<u32> = ls.iter().map(|&l| l as u32).collect();
        let rows = check_moment_inequalities(&cfg.process, d, &ls, gammas, n, seed, exec)?;
        let rows = rows
            .iter()
            .map(|r| {
                base(cfg)
                    .i("dim", d)
                    .s("kind", r.kind.tag())
                    .i("L", r.l)
                    .f("gamma", r.gamma)
                    .f("left", r.left)
                    .f("left_se", r.left_se)
                    .f("right", r.right)
                    .f("right_se", r.right_se)
                    .b("violated", r.violated)
                    .i("replicates", n)
                    .i("seed", seed)
            })
            .collect();
        out.push(("inequalities.csv".into(), Table::from_rows(rows)));
    }
    let alphas = cfg.grid("alpha");
    if !alphas.is_empty() {
        let half = cfg.option("mgf_half", 0.5);
        let mut rows = Vec::new();
        for &a in alphas {
            let m = check_mgf_bound(&cfg.process, d, half, a, n, seed, exec)?;
            rows.push(tail(
                base(cfg)
                    .i("dim", d)
                    .f("alpha", a)
                    .f("half_side", half)
                    .f("volume", m.volume)
                    .f("activity", m.activity)
                    .f("beta", m.beta)
                    .f("stability", m.stability)
                    .f("estimate", m.estimate)
                    .f("std_error", m.std_error)
                    .f("bound", m.bound)
                    .f("bound_unreduced", m.bound_unreduced)
                    .b("holds", m.holds),
                n,
                seed,
            ));
        }
        out.push(("mgf.csv".into(), Table::from_rows(rows)));
    }
    Ok(out)
}

fn void<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let (d, n, seed) = (cfg.dim, cfg.replicates, cfg.seed);
    let fit = estimate_void_probability(&cfg.process, d, nonempty(cfg, "ell")?, n, seed, exec)?;
    let m = cfg.process.intensity(d).unwrap_or(f64::NAN);
    let rows = fit
        .points
        .iter()
        .map(|p| {
            tail(
                base(cfg)
                    .i("dim", d)
                    .f("intensity", m)
                    .f("ell", p.ell)
                    .i("voids", p.voids)
                    .f("frequency", p.frequency)
                    .f("std_error", p.std_error)
                    .b("censored", p.censored)
                    .f("upper_bound", p.upper_bound)
                    .f("alpha", fit.alpha)
                    .f("alpha_se", fit.alpha_se)
                    .f("log_kappa", fit.log_kappa)
                    .f("curvature", fit.curvature)
                    .f("curvature_se", fit.curvature_se)
                    .b("super_polynomial", fit.super_polynomial)
                    .i("fitted", fit.fitted),
                n,
                seed,
            )
        })
        .collect();
    Ok(vec![("void.csv".into(), Table::from_rows(rows))])
}

fn palm<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let (n, seed) = (cfg.replicates, cfg.seed);
    let settings = PalmMomentSettings {
        window_half: cfg.option("window_half", 7.0),
        core_half: cfg.option("core_half", 3.0),
        replicates: n,
        seed,
    };
    let (mut rows, mut trace) = (Vec::new(), Vec::new());
    for q in &cfg.quantities {
        let exponents: Vec<Option<f64>> = match q.as_str() {
            "zeta_sum" => nonempty(cfg, "zeta")?.iter().map(|&x| Some(x)).collect(),
            "box_count" => nonempty(cfg, "half")?.iter().map(|&x| Some(x)).collect(),
            "lambda0" | "lambda2" => vec![None],
            _ => nonempty(cfg, "order")?.iter().map(|&x| Some(x)).collect(),
        };
        for x in exponents {
            for &route in &cfg.routes {
                let r: EstimateReport = if q == "box_count" {
                    estimate_palm_box_count(&cfg.process, cfg.dim, x.expect("half-side"), route, n, seed, exec)?
                } else {
                    let pq = PalmQuantity::parse(q, x.unwrap_or(1.0))?;
                    estimate_palm_moment(pq, &cfg.process, &cfg.conductance, route, &settings, exec)?
                };
                let xs = x.map_or(String::new(), crate::csv::fmt_f64);
                rows.push(tail(
                    base(cfg)
                        .s("quantity", q.as_str())
                        .s("exponent", xs.clone())
                        .s("route", route.tag())
                        .s("conductance", describe_law(&cfg.conductance))
                        .f("estimate", r.estimate)
                        .f("std_error", r.std_error)
                        .f("discard_fraction", r.discard_fraction)
                        .f("intensity", r.intensity.unwrap_or(f64::NAN))
                        .f("window_half", settings.window_half)
                        .f("core_half", settings.core_half),
                    n,
                    seed,
                ));
                for &(k, v) in &r.trace {
                    trace.push(
                        Row::new()
                            .s("quantity", q.as_str())
                            .s("exponent", xs.clone())
                            .s("route", route.tag())
                            .i("n", k)
                            .f("running_mean", v)
                            .i("replicates", n)
                            .i("seed", seed),
                    );
                }
            }
        }
    }
    let mut trace_t = Table::new(&["quantity", "exponent", "route", "n", "running_mean", "replicates", "seed"]);
    for r in trace {
        trace_t.push(r);
    }
    Ok(vec![("palm.csv".into(), Table::from_rows(rows)), ("trace.csv".into(), trace_t)])
}

fn chain<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let (n, seed) = (cfg.replicates, cfg.seed);
    let n_max = cfg.option("n_max", 3.0) as usize;
    let (mut rows, mut levels) = (Vec::new(), Vec::new());
    for &beta in nonempty(cfg, "beta")? {
        let half = cfg.option("window_half", beta.powi(n_max as i32) * 2.5 + 2.0);
        let st = chain_study(&cfg.process, beta, n_max, half, n, seed, exec)?;
        let checked = st.pass + st.fail;
        rows.push(
            base(cfg)
                .f("beta", beta)
                .i("n_max", n_max)
                .f("window_half", half)
                .i("pass", st.pass)
                .i("fail", st.fail)
                .i("vacuous", st.vacuous)
                .i("contaminated", st.contaminated)
                .i("region_failures", st.region_failures)
                .i("any_a", st.any_a)
                .f("pass_fraction", if checked > 0 { st.pass as f64 / checked as f64 } else { f64::NAN })
                .i("replicates", n)
                .i("seed", seed),
        );
        for (lvl, (&hits, &dec)) in st.a_hits.iter().zip(&st.a_decided).enumerate() {
            levels.push(
                base(cfg)
                    .f("beta", beta)
                    .i("n", lvl)
                    .i("decided", dec)
                    .i("a_count", hits)
                    .f("a_frequency", if dec > 0 { hits as f64 / dec as f64 } else { f64::NAN })
                    .i("replicates", n)
                    .i("seed", seed),
            );
        }
    }
    Ok(vec![("chain.csv".into(), Table::from_rows(rows)), ("levels.csv".into(), Table::from_rows(levels))])
}

/// Every replicate's flags and largest-cluster sizes are nondecreasing in `p`.
fn coupled_monotone(ps: &[f64], open: &[Vec<bool>], spanning: &[Vec<bool>], largest: &[Vec<usize>]) -> bool {
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by(|&a, &b| ps[a].total_cmp(&ps[b]));
    let ok_b = |v: &Vec<bool>| order.windows(2).all(|w| v[w[0]] <= v[w[1]]);
    open.iter().all(ok_b)
        && spanning.iter().all(ok_b)
        && largest.iter().all(|v| order.windows(2).all(|w| v[w[0]] <= v[w[1]]))
}

fn percolation<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let (n, seed) = (cfg.replicates, cfg.seed);
    let ps = nonempty(cfg, "p")?;
    let (mut rows, mut clusters) = (Vec::new(), Vec::new());
    for &r in nonempty(cfg, "R")? {
        let st = phi_study(&cfg.process, ps, r, n, seed, exec)?;
        let monotone = coupled_monotone(ps, &st.open, &st.spanning, &st.largest);
        for row in &st.rows {
            rows.push(tail(
                base(cfg)
                    .f("p", row.p)
                    .f("R", row.r)
                    .f("phi", row.phi)
                    .f("phi_se", row.phi_se)
                    .f("a1", row.a1)
                    .f("a2", row.a2)
                    .f("a3", row.a3)
                    .f("bad", row.bad)
                    .f("bad_se", row.bad_se)
                    .f("p_r3", row.p_r3)
                    .f("bound", row.bound)
                    .b("applicable", row.applicable)
                    .b("holds", row.holds)
                    .f("spanning", row.spanning)
                    .f("largest_q50", row.largest_q50)
                    .f("largest_q90", row.largest_q90)
                    .b("monotone", monotone)
                    .i("ambiguous", st.ambiguous)
                    .i("ipa1_failures", st.ipa1_failures),
                n,
                seed,
            ));
        }
        for (k, rep) in st.largest.iter().enumerate() {
            for (j, &p) in ps.iter().enumerate() {
                clusters.push(
                    base(cfg)
                        .f("p", p)
                        .f("R", r)
                        .i("replicate", k)
                        .i("largest_size", rep[j])
                        .b("spanning", st.spanning[k][j])
                        .b("open", st.open[k][j])
                        .i("replicates", n)
                        .i("seed", seed),
                );
            }
        }
    }
    Ok(vec![("phi.csv".into(), Table::from_rows(rows)), ("clusters.csv".into(), Table::from_rows(clusters))])
}

fn zdprocess<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let (n, seed) = (cfg.replicates, cfg.seed);
    let ps = nonempty(cfg, "p")?;
    let half = cfg.option("lattice_half", 5.0) as i64;
    let samples = cfg.option("locality_samples", 0.0) as usize;
    let (mut rows, mut loc) = (Vec::new(), Vec::new());
    for &r in nonempty(cfg, "R")? {
        for z in zd_study(&cfg.process, ps, r, half, n, seed, exec)? {
            rows.push(
                base(cfg)
                    .f("p", z.p)
                    .f("R", z.r)
                    .i("lattice_half", z.lattice_half)
                    .i("inclusion_pass", z.inclusion_pass)
                    .i("inclusion_vacuous", z.inclusion_vacuous)
                    .i("closed_crossed", z.closed_crossed)
                    .f("eta_open", z.eta_open)
                    .f("eta_open_se", z.eta_open_se)
                    .f("eta_spanning", z.eta_spanning)
                    .f("eta_largest_mean", z.eta_largest_mean)
                    .f("eta_largest_q90", z.eta_largest_q90)
                    .i("ambiguous_sites", z.ambiguous_sites)
                    .i("replicates", n)
                    .i("seed", seed),
            );
        }
        if samples > 0 {
            let l = locality_check(&cfg.process, ps, r, 1, samples, seed, exec)?;
            loc.push(
                base(cfg)
                    .f("R", r)
                    .i("lattice_half", 1)
                    .i("sites", l.sites)
                    .i("agreed", l.agreed)
                    .b("pass", l.sites > 0 && l.agreed == l.sites)
                    .i("replicates", samples)
                    .i("seed", seed),
            );
        }
    }
    let mut out = vec![("zd.csv".to_string(), Table::from_rows(rows))];
    if samples > 0 {
        out.push(("locality.csv".into(), Table::from_rows(loc)));
    }
    Ok(out)
}

fn sepcheck<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outputs> {
    let (n, seed) = (cfg.replicates, cfg.seed);
    let half = cfg.option("window_half", 20.0);
    let rows = sep_check(&cfg.process, &cfg.conductance, half, nonempty(cfg, "t0")?, n, seed, exec)?;
    let rows = rows
        .iter()
        .map(|r| {
            base(cfg)
                .s("conductance", describe_law(&cfg.conductance))
                .f("t0", r.t0)
                .f("c_star", r.c_star)
                .f("keep_bound", r.keep_bound)
                .f("window_side", r.window_side)
                .i("spanning_count", r.spanning_count)
                .f("spanning_frequency", r.spanning_frequency)
                .f("largest_size_mean", r.largest_size_mean)
                .f("largest_size_q50", r.largest_size_q50)
                .f("largest_size_q99", r.largest_size_q99)
                .f("largest_diameter_mean", r.largest_diameter_mean)
                .f("largest_diameter_max", r.largest_diameter_max)
                .f("mean_cluster_size", r.mean_cluster_size)
                .b("subcritical", r.subcritical)
                .i("replicates", r.replicates)
                .i("seed", r.seed)
        })
        .collect();
    Ok(vec![("sep.csv".into(), Table::from_rows(rows))])
}

fn selftest(cfg: &ExperimentConfig) -> Result<Outputs> {
    Ok(vec![("selftest.csv".into(), selftest_table(cfg.seed)?)])
}

pub fn selftest_table(seed: u64) -> Result<Table> {
    let rep = run_selftest(seed)?;
    Ok(Table::from_rows(
        rep.checks
            .iter()
            .map(|c| {
                Row::new()
                    .s("check", c.name.as_str())
                    .i("cases", c.cases)
                    .i("passed", c.passed)
                    .b("pass", c.pass())
                    .i("replicates", c.cases)
                    .i("seed", seed)
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_check_sorts_by_p() {
        let ps = [0.9, 0.1];
        assert!(coupled_monotone(&ps, &[vec![true, false]], &[vec![false, false]], &[vec![5, 2]]));
        assert!(!coupled_monotone(&ps, &[vec![false, true]], &[vec![false, false]], &[vec![5, 2]]));
    }
}

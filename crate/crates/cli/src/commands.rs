use std::io::{BufWriter, Write};

use serde_json::{json, Value};
use tablewalk::combinatorics::LemmaReport;
use tablewalk::group::{group_order, run_walk, run_walk_observed, TableState, TrajectoryRecord, WalkConfig};
use tablewalk::spectral::{
    distribution_from_spectrum, enumerate_spectrum, exact_tv_from_spectrum, l2_bound, min_upper_c,
    mixing_time, theorem_times, Inversion, Spectrum, TheoremTimes,
};
use tablewalk::wilson::{mc_tv_lower_bound_curve, wilson_time, WilsonStatistic};
use tablewalk::Error;

use crate::args::{Format, Suite};
use crate::config::ExperimentConfig;
use crate::output::{json_document, Cell, Header, Table};
use crate::suites::{Cosines, Plan};
use crate::CliError;

/// Rendered output plus whether a verification failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub counterexample: bool,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, counterexample: false }
    }
}

pub const TV_CURVE_TRIALS: u64 = 2000;
pub const WILSON_TRIALS: u64 = 10_000;
pub const T_MIX_SEARCH: u64 = 100_000;

fn times_json(t: &TheoremTimes) -> Value {
    json!({"c": t.c, "t_nq": t.t_nq, "delta_nq": t.delta_nq, "t_upper": t.t_upper, "t_lower": t.t_lower})
}

fn time_range(cfg: &ExperimentConfig, t_max_default: u64, step_default: u64) -> Result<Vec<u64>, CliError> {
    let t_min = cfg.t_min.unwrap_or(0);
    let t_max = cfg.t_max.unwrap_or(t_max_default.max(t_min));
    let step = cfg.t_step.unwrap_or(step_default);
    if step == 0 || t_max < t_min {
        return Err(CliError::Usage(format!("bad time range {t_min}..={t_max} step {step}")));
    }
    Ok((t_min..=t_max).step_by(step as usize).collect())
}

/// Start-margin warnings for sizes outside the cutoff theorem.
pub fn size_warnings(n: usize) -> Vec<String> {
    let mut w = Vec::new();
    if n < 4 {
        w.push("the cutoff theorem requires n >= 4; time constants are reported but not guaranteed".to_string());
    }
    if n == 2 {
        w.push(
            "for n = 2 the walk is the same as the lazy random walk on Z/qZ, which is known to not have cutoff"
                .to_string(),
        );
    }
    w
}

pub fn sample(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.single_n()?;
    let q = cfg.single_q()?;
    let row_sums = cfg.row_sums.clone().unwrap_or_else(|| vec![0; n]);
    let col_sums = cfg.col_sums.clone().unwrap_or_else(|| vec![0; n]);
    let c = cfg.c.unwrap_or_else(|| min_upper_c(n));
    let times = theorem_times(n, q, c)?;
    let steps = match cfg.steps {
        Some(s) => s,
        None => {
            let t = times.t_upper.ceil();
            if t >= u64::MAX as f64 {
                return Err(CliError::Usage(format!("default budget {t} does not fit; pass --steps")));
            }
            t as u64
        }
    };
    let walk = WalkConfig {
        n,
        q,
        row_sums: row_sums.clone(),
        col_sums: col_sums.clone(),
        seed: cfg.seed(),
        steps,
        lazy: cfg.lazy.unwrap_or(false),
    };
    walk.validate()?;
    let start = TableState::canonical(n, q, &row_sums, &col_sums)?;
    let warnings = size_warnings(n);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let end = match &cfg.trajectory {
        None => run_walk(&walk, &start)?,
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut out = BufWriter::new(file);
            let stat = WilsonStatistic::new(n, q)?;
            let with_f = stat.f_max > 0;
            let mut failure = None;
            let end = run_walk_observed(&walk, &start, |t, state| {
                if failure.is_some() {
                    return;
                }
                let rec = TrajectoryRecord {
                    t,
                    state_digest: state.digest(),
                    f_value: with_f.then(|| stat.statistic_f_table(state, &start).expect("same shape")),
                };
                let line = serde_json::to_string(&rec).expect("record serializes");
                if let Err(e) = writeln!(out, "{line}") {
                    failure = Some(e);
                }
            })?;
            if let Some(e) = failure {
                return Err(CliError::io(path, e));
            }
            out.flush().map_err(|e| CliError::io(path, e))?;
            end
        }
    };
    let header = Header::new(
        "sample",
        walk.seed,
        json!({
            "n": n, "q": q, "row_sums": row_sums, "col_sums": col_sums, "steps": steps,
            "lazy": walk.lazy, "theorem_times": times_json(&times), "warnings": warnings,
        }),
    );
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json_document(&header, json!({ "table": end })),
        Format::Csv => {
            let rows: String = end
                .rows()
                .iter()
                .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(",") + "\n")
                .collect();
            header.comment_lines() + &rows
        }
    };
    Ok(Outcome::ok(text))
}

fn spectrum_or_reason(n: usize, q: u32, cap: u128) -> Result<Result<Spectrum, &'static str>, CliError> {
    match enumerate_spectrum(n, q, cap) {
        Ok(s) => Ok(Ok(s)),
        Err(Error::CapExceeded { .. }) => Ok(Err("group too large")),
        Err(e) => Err(e.into()),
    }
}

pub fn tv_curve(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.single_n()?;
    let q = cfg.single_q()?;
    let ts = time_range(cfg, 60, 1)?;
    let trials = cfg.trials.unwrap_or(TV_CURVE_TRIALS);
    let cap = cfg.cap();
    let seed = cfg.seed();
    let spec = spectrum_or_reason(n, q, cap)?;
    let mc = if trials > 0 {
        Some(mc_tv_lower_bound_curve(&WalkConfig::zero_sums(n, q, seed, 0), &ts, trials)?)
    } else {
        None
    };
    let mut table = Table::new(&["t", "exact_tv", "l2_bound", "mc_lower", "reason"]);
    for (i, &t) in ts.iter().enumerate() {
        let mc_cell = Cell::opt_float(mc.as_ref().map(|m| m[i].estimate));
        let row = match &spec {
            Ok(s) => vec![
                Cell::from(t),
                Cell::Float(exact_tv_from_spectrum(s, t)),
                Cell::Float(l2_bound(s, t)),
                mc_cell,
                Cell::Empty,
            ],
            Err(reason) => vec![Cell::from(t), Cell::Empty, Cell::Empty, mc_cell, Cell::Text(reason.to_string())],
        };
        table.push(row);
    }
    let t_mix = spec.as_ref().ok().and_then(|s| mixing_time(s, 0.25, T_MIX_SEARCH));
    let header = Header::new(
        "tv-curve",
        seed,
        json!({
            "n": n, "q": q, "t": ts_json(&ts), "trials": trials, "max_group_size": cap.to_string(),
            "t_mix_quarter": t_mix,
        }),
    );
    Ok(Outcome::ok(table.render(&header, cfg.format())?))
}

fn ts_json(ts: &[u64]) -> Value {
    json!({"min": ts.first(), "max": ts.last(), "count": ts.len()})
}

pub fn cutoff_table(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let ns = match cfg.n_list() {
        v if v.is_empty() => vec![3, 4],
        v => v,
    };
    let qs = match cfg.q_list() {
        v if v.is_empty() => vec![2, 3],
        v => v,
    };
    let cap = cfg.cap();
    let search = cfg.t_max.unwrap_or(T_MIX_SEARCH);
    let mut table = Table::new(&[
        "n", "q", "c_lower", "c_upper", "t_nq", "delta_nq", "delta_ratio", "t_lower", "t_upper", "t_mix_quarter",
        "bracket",
    ]);
    for &n in &ns {
        for &q in &qs {
            // c = 1 gives d >= 1/2 up to t_lower; the upper default is the
            // smallest c the theorem covers, far below 1/4.
            let lo = theorem_times(n, q, cfg.c.unwrap_or(1.0))?;
            let hi = theorem_times(n, q, cfg.c.unwrap_or_else(|| min_upper_c(n)))?;
            let t_mix = match group_order(n, q) {
                Some(g) if g <= cap => mixing_time(&enumerate_spectrum(n, q, cap)?, 0.25, search),
                _ => None,
            };
            let bracket = match t_mix {
                Some(t) if n >= 4 => {
                    let ok = lo.t_lower <= t as f64 && t as f64 <= hi.t_upper.ceil();
                    Cell::Text(if ok { "ok" } else { "violated" }.into())
                }
                _ => Cell::Empty,
            };
            table.push(vec![
                Cell::from(n),
                Cell::from(q),
                Cell::Float(lo.c),
                Cell::Float(hi.c),
                Cell::Float(lo.t_nq),
                Cell::Float(lo.delta_nq),
                Cell::Float(lo.delta_nq / lo.t_nq),
                Cell::Float(lo.t_lower),
                Cell::Float(hi.t_upper),
                t_mix.map_or(Cell::Empty, Cell::from),
                bracket,
            ]);
        }
    }
    let header = Header::new(
        "cutoff-table",
        cfg.seed(),
        json!({"n": ns, "q": qs, "c": cfg.c, "max_group_size": cap.to_string(), "t_mix_search": search}),
    );
    Ok(Outcome::ok(table.render(&header, cfg.format())?))
}

/// `(n, q, trials, seed)` from `key=value` words.
type Params = (Option<usize>, Option<u32>, Option<u64>, Option<u64>);

/// `key=value` words after the verify flags.
fn parse_params(params: &[String]) -> Result<Params, CliError> {
    let (mut n, mut q, mut trials, mut seed) = (None, None, None, None);
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value, got {p:?}")))?;
        let bad = || CliError::Usage(format!("bad value in {p:?}"));
        match k {
            "n" => n = Some(v.parse().map_err(|_| bad())?),
            "q" => q = Some(v.parse().map_err(|_| bad())?),
            "trials" => trials = Some(v.parse().map_err(|_| bad())?),
            "seed" => seed = Some(v.parse().map_err(|_| bad())?),
            _ => return Err(CliError::Usage(format!("unknown parameter {k:?} (use n, q, trials, seed)"))),
        }
    }
    Ok((n, q, trials, seed))
}

pub fn verify(cfg: &ExperimentConfig, params: &[String], mutant: Option<u32>) -> Result<Outcome, CliError> {
    let (pn, pq, ptrials, pseed) = parse_params(params)?;
    let n = pn.or_else(|| cfg.single_n().ok());
    let q = pq.or_else(|| cfg.single_q().ok());
    let instance = match (n, q) {
        (Some(n), Some(q)) => Some((n, q)),
        (None, None) => None,
        _ => return Err(CliError::Usage("give both n and q, or neither".into())),
    };
    let suite = cfg.suite.unwrap_or(Suite::All);
    let seed = pseed.unwrap_or(cfg.seed());
    let plan = Plan {
        exhaustive_only: cfg.exhaustive.unwrap_or(false),
        instance,
        trials: ptrials.or(cfg.trials),
        seed,
        cosines: Cosines { flip: mutant },
        ..Plan::new(suite)
    };
    let reports: Vec<LemmaReport> = plan.run()?;
    let passed = reports.iter().all(LemmaReport::passed);
    for r in reports.iter().filter(|r| !r.passed()) {
        eprintln!("counterexample: {} ({}): {}", r.lemma, r.mode, r.counterexamples[0]);
    }
    let mut params_echo = json!({
        "suite": suite, "exhaustive": plan.exhaustive_only, "instance": instance,
        "trials": plan.trials,
    });
    if let Some(a) = mutant {
        params_echo["mutant_flip_cosine"] = json!(a);
    }
    let header = Header::new("verify", seed, params_echo);
    Ok(Outcome {
        text: json_document(&header, json!({"passed": passed, "reports": reports})),
        counterexample: !passed,
    })
}

pub fn spectrum(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.single_n()?;
    let q = cfg.single_q()?;
    let cap = cfg.cap();
    let spec = enumerate_spectrum(n, q, cap)?;
    let mut table = Table::new(&["index", "eigenvalue"]);
    for (i, &l) in spec.eigenvalues().iter().enumerate() {
        table.push(vec![Cell::from(i), Cell::Float(l)]);
    }
    let header = Header::new(
        "spectrum",
        cfg.seed(),
        json!({"n": n, "q": q, "max_group_size": cap.to_string(), "min": spec.min(),
               "second_largest_modulus": spec.second_largest_modulus()}),
    );
    Ok(Outcome::ok(table.render(&header, cfg.format())?))
}

pub fn distribution(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.single_n()?;
    let q = cfg.single_q()?;
    let t = cfg.steps.unwrap_or(0);
    let cap = cfg.cap();
    let spec = enumerate_spectrum(n, q, cap)?;
    let p = distribution_from_spectrum(&spec, t, Inversion::Auto);
    let mut table = Table::new(&["index", "probability"]);
    for (i, &v) in p.iter().enumerate() {
        table.push(vec![Cell::from(i), Cell::Float(v)]);
    }
    let header = Header::new(
        "distribution",
        cfg.seed(),
        json!({"n": n, "q": q, "steps": t, "max_group_size": cap.to_string(),
               "tv_to_uniform": tablewalk::spectral::tv_to_uniform(&p)}),
    );
    Ok(Outcome::ok(table.render(&header, cfg.format())?))
}

pub fn wilson(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = cfg.single_n()?;
    let q = cfg.single_q()?;
    let eps = cfg.eps.unwrap_or(0.75);
    let wt = wilson_time(n, q, eps)?;
    let stat = WilsonStatistic::new(n, q)?;
    let t_max = if wt > 0.0 { (2.0 * wt).ceil() as u64 } else { 50 };
    let ts = time_range(cfg, t_max, (t_max / 20).max(1))?;
    let trials = cfg.trials.unwrap_or(WILSON_TRIALS);
    let seed = cfg.seed();
    let est = mc_tv_lower_bound_curve(&WalkConfig::zero_sums(n, q, seed, 0), &ts, trials)?;
    let mut table = Table::new(&["t", "tv_lower_estimate", "wilson_guarantee", "trials"]);
    for e in &est {
        table.push(vec![Cell::from(e.t), Cell::Float(e.estimate), Cell::Float(stat.guarantee(e.t as f64)), Cell::from(e.trials)]);
    }
    let header = Header::new(
        "wilson",
        seed,
        json!({"n": n, "q": q, "eps": eps, "wilson_time": wt, "gamma": stat.gamma, "f_max": stat.f_max,
               "r": stat.r, "t": ts_json(&ts), "trials": trials}),
    );
    Ok(Outcome::ok(table.render(&header, cfg.format())?))
}

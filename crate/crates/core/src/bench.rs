//! Seed sweeps over planner variants with per-variant aggregates.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::environment::Scenario;
use crate::planner::{Budget, Planner, Variant};

/// One planning run of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub variant: String,
    pub seed: u64,
    pub success: bool,
    pub path_length: Option<f64>,
    pub t_tfs: f64,
    pub t_ttfp: Option<f64>,
    pub t_total: f64,
    pub iterations: u64,
    pub first_solution_iteration: Option<u64>,
    /// Set when the planner could not start, e.g. an infeasible spot.
    pub error: Option<String>,
}

/// Mean and sample standard deviation; `None` for an empty sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, sd })
    }
}

/// Aggregate row; statistics cover successful runs only. Times in ms.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub variant: String,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub path_length: Option<MeanSd>,
    pub t_tfs_ms: Option<MeanSd>,
    pub t_ttfp_ms: Option<MeanSd>,
    pub t_total_ms: Option<f64>,
    pub first_solution_iteration: Option<MeanSd>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub runs: Vec<RunRecord>,
}

/// Seeds `base, base + 1, …`.
pub fn seeds(base: u64, n_runs: usize) -> Vec<u64> {
    (0..n_runs as u64).map(|k| base.wrapping_add(k)).collect()
}

pub fn run_once(scn: &Scenario, variant: Variant, seed: u64, budget: Budget) -> RunRecord {
    let mut rec = RunRecord {
        variant: variant.name(),
        seed,
        success: false,
        path_length: None,
        t_tfs: 0.0,
        t_ttfp: None,
        t_total: 0.0,
        iterations: 0,
        first_solution_iteration: None,
        error: None,
    };
    match Planner::new(scn, variant, seed) {
        Ok(mut p) => {
            p.run(budget);
            let r = p.result(variant);
            rec.success = r.succeeded();
            rec.path_length = r.best_length;
            rec.t_tfs = r.stats.t_tfs;
            rec.t_ttfp = r.stats.t_ttfp;
            rec.t_total = r.stats.t_total;
            rec.iterations = r.stats.iterations;
            rec.first_solution_iteration = r.stats.first_solution_iteration;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

pub fn aggregate(variant: &str, runs: &[RunRecord]) -> BenchRow {
    let ok: Vec<&RunRecord> = runs.iter().filter(|r| r.success).collect();
    let collect = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(|r| f(r)).collect() };
    let totals = collect(&|r| Some(r.t_total * 1e3));
    BenchRow {
        variant: variant.to_string(),
        runs: runs.len(),
        successes: ok.len(),
        success_rate: if runs.is_empty() {
            0.0
        } else {
            100.0 * ok.len() as f64 / runs.len() as f64
        },
        path_length: MeanSd::of(&collect(&|r| r.path_length)),
        t_tfs_ms: MeanSd::of(&collect(&|r| Some(r.t_tfs * 1e3))),
        t_ttfp_ms: MeanSd::of(&collect(&|r| r.t_ttfp.map(|t| t * 1e3))),
        t_total_ms: MeanSd::of(&totals).map(|m| m.mean),
        first_solution_iteration: MeanSd::of(&collect(&|r| r.first_solution_iteration.map(|i| i as f64))),
    }
}

/// Runs every variant on `n_runs` seeds starting at the scenario seed. Runs
/// execute in parallel; each planner stays sequential.
pub fn run_bench(scn: &Scenario, variants: &[Variant], n_runs: usize, budget: Budget) -> BenchReport {
    assert!(n_runs >= 1, "n_runs must be at least 1");
    assert!(!variants.is_empty(), "at least one variant is required");
    let jobs: Vec<(Variant, u64)> = variants
        .iter()
        .flat_map(|&v| seeds(scn.seed, n_runs).into_iter().map(move |s| (v, s)))
        .collect();
    let runs: Vec<RunRecord> = jobs.par_iter().map(|&(v, s)| run_once(scn, v, s, budget)).collect();
    let rows = variants
        .iter()
        .map(|v| {
            let name = v.name();
            let mine: Vec<RunRecord> = runs.iter().filter(|r| r.variant == name).cloned().collect();
            aggregate(&name, &mine)
        })
        .collect();
    BenchReport { rows, runs }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Host description written at the top of human-readable reports.
pub fn machine_info() -> String {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "# host: {} {} ({} logical CPUs); timings are machine-specific",
        std::env::consts::OS,
        std::env::consts::ARCH,
        cpus
    )
}

impl BenchReport {
    pub fn runs_csv(&self) -> String {
        let mut out = String::from(
            "variant,seed,success,path_length_m,t_tfs_ms,t_ttfp_ms,t_total_ms,iterations,first_solution_iteration,error\n",
        );
        for r in &self.runs {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.variant,
                r.seed,
                r.success,
                cell(r.path_length),
                r.t_tfs * 1e3,
                cell(r.t_ttfp.map(|t| t * 1e3)),
                r.t_total * 1e3,
                r.iterations,
                r.first_solution_iteration.map_or_else(String::new, |i| i.to_string()),
                r.error.as_deref().unwrap_or("").replace(',', ";"),
            )
            .unwrap();
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "variant,runs,successes,success_rate_pct,path_length_mean_m,path_length_sd_m,t_tfs_mean_ms,t_tfs_sd_ms,t_ttfp_mean_ms,t_ttfp_sd_ms,t_total_mean_ms,first_iteration_mean\n",
        );
        for r in &self.rows {
            let m = |v: Option<MeanSd>| (cell(v.map(|x| x.mean)), cell(v.map(|x| x.sd)));
            let (lm, ls) = m(r.path_length);
            let (fm, fs) = m(r.t_tfs_ms);
            let (pm, ps) = m(r.t_ttfp_ms);
            writeln!(
                out,
                "{},{},{},{},{lm},{ls},{fm},{fs},{pm},{ps},{},{}",
                r.variant,
                r.runs,
                r.successes,
                r.success_rate,
                cell(r.t_total_ms),
                cell(r.first_solution_iteration.map(|x| x.mean)),
            )
            .unwrap();
        }
        out
    }

    /// Fixed-width table with the usual success / length / timing columns.
    pub fn table(&self) -> String {
        let pm = |v: Option<MeanSd>, prec: usize| {
            v.map_or_else(
                || "-".to_string(),
                |x| format!("{:.p$} ± {:.p$}", x.mean, x.sd, p = prec),
            )
        };
        let mut out = machine_info();
        out.push('\n');
        writeln!(
            out,
            "{:<22} {:>8} {:>16} {:>18} {:>18} {:>12}",
            "variant", "success", "length [m]", "t_tfs [ms]", "t_ttfp [ms]", "t_total [ms]"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<22} {:>7.0}% {:>16} {:>18} {:>18} {:>12}",
                r.variant,
                r.success_rate,
                pm(r.path_length, 2),
                pm(r.t_tfs_ms, 1),
                pm(r.t_ttfp_ms, 1),
                r.t_total_ms.map_or("-".into(), |t| format!("{t:.0}")),
            )
            .unwrap();
        }
        out
    }
}

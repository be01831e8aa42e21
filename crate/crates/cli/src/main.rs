use std::fmt::Write as _;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use cctree::bench::{run_bench, MeanSd};
use cctree::environment::Scenario;
use cctree::io;
use cctree::planner::{Budget, Planner, Variant};
use cctree::render::{branch_polylines, render_svg, tree_polylines, RenderInput};
use cctree::tracking::{simulate_tracking, SimConfig, TrackingReport};

#[derive(Parser)]
#[command(name = "cctree", version, about = "Continuous-curvature target tree parking planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario and write the path, history and stats.
    Plan {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        /// Also write plan.svg with the RRT tree.
        #[arg(long)]
        svg: bool,
    },
    /// Sweep seeds over planner variants.
    Bench {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
        /// Extra variants to run; the default pair is min_cost_tree and fixed_l_tree(0).
        #[arg(long = "with")]
        extra: Vec<String>,
        /// Runs per variant.
        #[arg(long, default_value_t = 100)]
        repeat: usize,
    },
    /// Plan (or load a path) and simulate tracking it.
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        /// Track this path CSV instead of planning.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Also plan and track with the discontinuous tree and compare.
        #[arg(long)]
        compare_discontinuous: bool,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Draw a scenario with an optional path and target tree.
    Render {
        scenario: PathBuf,
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Body outline spacing along the path, meters.
        #[arg(long)]
        footprints: Option<f64>,
        #[arg(long, default_value = "scene.svg")]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct RunFlags {
    #[arg(long)]
    seed: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long, conflicts_with = "iters")]
    tmax: Option<f64>,
    /// Iteration budget; makes runs reproducible.
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value = "min_cost_tree")]
    variant: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Failure classes with their exit codes.
enum Failure {
    Input(anyhow::Error),
    NoPath(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Plan { scenario, run, svg } => cmd_plan(&scenario, &run, svg),
        Command::Bench {
            scenarios,
            run,
            extra,
            repeat,
        } => cmd_bench(&scenarios, &run, &extra, repeat),
        Command::Simulate {
            scenario,
            run,
            path,
            compare_discontinuous,
            repeat,
        } => cmd_simulate(&scenario, &run, path.as_deref(), compare_discontinuous, repeat),
        Command::Render {
            scenario,
            path,
            tree,
            footprints,
            out,
        } => cmd_render(&scenario, path.as_deref(), tree.as_deref(), footprints, &out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::NoPath(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario(file: &FsPath, run: &RunFlags) -> Result<Scenario> {
    let mut scn = Scenario::load(file).with_context(|| format!("reading scenario {}", file.display()))?;
    if let Some(seed) = run.seed {
        scn.seed = seed;
    }
    if let Some(tau) = run.tau {
        scn.planner.tau = tau;
    }
    if let Some(n) = run.iters {
        scn.planner = scn.planner.with_budget(Budget::Iterations(n));
    } else if let Some(t) = run.tmax {
        scn.planner = scn.planner.with_budget(Budget::Time(t));
    }
    scn.validate().context("invalid scenario after applying flags")?;
    Ok(scn)
}

fn parse_variant(s: &str) -> Result<Variant> {
    Variant::parse(s).ok_or_else(|| {
        anyhow!(
            "unknown variant {s:?}; expected min_cost_tree, fixed_l_tree(<l>), discontinuous_tree or no_tree_baseline"
        )
    })
}

fn write(dir: &FsPath, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let file = dir.join(name);
    fs::write(&file, text).with_context(|| format!("writing {}", file.display()))
}

fn stem(file: &FsPath) -> String {
    file.file_stem()
        .map_or("scenario".into(), |s| s.to_string_lossy().into_owned())
}

fn start_planner(scn: &Scenario, variant: Variant, seed: u64) -> Result<Planner> {
    Planner::new(scn, variant, seed).map_err(|e| anyhow!(e))
}

fn cmd_plan(file: &FsPath, run: &RunFlags, svg: bool) -> Result<(), Failure> {
    let scn = load_scenario(file, run)?;
    let variant = parse_variant(&run.variant)?;
    let mut planner = start_planner(&scn, variant, scn.seed)?;
    planner.run(scn.planner.budget());
    let result = planner.result(variant);
    write(&run.out, "history.csv", &io::history_to_csv(&result.history))?;
    write(&run.out, "stats.txt", &io::stats_to_text(&result))?;
    write(&run.out, "tree.csv", &io::tree_to_csv(planner.target()))?;
    if svg {
        let input = RenderInput {
            path: result.best_path.as_ref(),
            tree: tree_polylines(planner.target()),
            rrt: Some(planner.tree()),
            footprint_every: Some(2.0),
        };
        write(&run.out, "plan.svg", &render_svg(&scn, &input))?;
    }
    match &result.best_path {
        Some(path) => {
            write(&run.out, "path.csv", &io::path_to_csv(path))?;
            println!(
                "{}: path {:.3} m, {} switches, {} iterations",
                variant.name(),
                path.length(),
                path.direction_switches(),
                result.stats.iterations
            );
            Ok(())
        }
        None => Err(Failure::NoPath(format!(
            "no path found after {} iterations",
            result.stats.iterations
        ))),
    }
}

fn cmd_bench(files: &[PathBuf], run: &RunFlags, extra: &[String], repeat: usize) -> Result<(), Failure> {
    if repeat == 0 {
        return Err(anyhow!("--repeat must be at least 1").into());
    }
    let mut variants = vec![parse_variant(&run.variant)?];
    if extra.is_empty() && run.variant == "min_cost_tree" {
        variants.push(Variant::FixedL(0.0));
    }
    for v in extra {
        variants.push(parse_variant(v)?);
    }
    for file in files {
        let scn = load_scenario(file, run)?;
        let report = run_bench(&scn, &variants, repeat, scn.planner.budget());
        let name = stem(file);
        write(&run.out, &format!("{name}_runs.csv"), &report.runs_csv())?;
        write(&run.out, &format!("{name}_summary.csv"), &report.summary_csv())?;
        let table = format!("{name}\n{}", report.table());
        write(&run.out, &format!("{name}_table.txt"), &table)?;
        print!("{table}");
    }
    Ok(())
}

struct SimRun {
    label: String,
    report: TrackingReport,
}

fn plan_and_track(scn: &Scenario, variant: Variant, seed: u64, cfg: &SimConfig) -> Result<SimRun, Failure> {
    let mut planner = start_planner(scn, variant, seed)?;
    planner.run(scn.planner.budget());
    let result = planner.result(variant);
    let path = result.best_path.ok_or_else(|| {
        Failure::NoPath(format!(
            "{} seed {seed}: no path found after {} iterations",
            variant.name(),
            result.stats.iterations
        ))
    })?;
    let report = simulate_tracking(&path, scn, cfg).map_err(|e| anyhow!(e))?;
    Ok(SimRun {
        label: format!("{}_seed{seed}", variant.name()),
        report,
    })
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = v.collect();
    MeanSd::of(&xs).map_or(f64::NAN, |m| m.mean)
}

fn variant_summary(name: &str, runs: &[SimRun]) -> String {
    let mut out = String::new();
    writeln!(out, "[{name}]").unwrap();
    writeln!(out, "runs={}", runs.len()).unwrap();
    writeln!(
        out,
        "mean_orientation_alignment_error_rad={}",
        mean(runs.iter().map(|r| r.report.orientation_alignment_error))
    )
    .unwrap();
    writeln!(
        out,
        "mean_lateral_alignment_error_m={}",
        mean(runs.iter().map(|r| r.report.lateral_alignment_error))
    )
    .unwrap();
    writeln!(
        out,
        "mean_cross_track_m={}",
        mean(runs.iter().map(|r| r.report.mean_cross_track))
    )
    .unwrap();
    writeln!(
        out,
        "max_cross_track_m={}",
        runs.iter().map(|r| r.report.max_cross_track).fold(0.0, f64::max)
    )
    .unwrap();
    out
}

fn cmd_simulate(
    file: &FsPath,
    run: &RunFlags,
    path_file: Option<&FsPath>,
    compare: bool,
    repeat: usize,
) -> Result<(), Failure> {
    let scn = load_scenario(file, run)?;
    let cfg = SimConfig::default();
    if let Some(pf) = path_file {
        let path = io::read_path_csv(pf).with_context(|| format!("reading path {}", pf.display()))?;
        let report = simulate_tracking(&path, &scn, &cfg).map_err(|e| anyhow!(e))?;
        write(&run.out, "tracking.csv", &io::tracking_to_csv(&report))?;
        let summary = io::tracking_summary(&report);
        write(&run.out, "tracking_summary.txt", &summary)?;
        print!("{summary}");
        return Ok(());
    }
    if repeat == 0 {
        return Err(anyhow!("--repeat must be at least 1").into());
    }
    let mut variants = vec![parse_variant(&run.variant)?];
    if compare && variants[0] != Variant::Discontinuous {
        variants.push(Variant::Discontinuous);
    }
    let mut summary = String::new();
    let mut per_variant: Vec<Vec<SimRun>> = Vec::new();
    for &v in &variants {
        let mut runs = Vec::new();
        for k in 0..repeat as u64 {
            let r = plan_and_track(&scn, v, scn.seed.wrapping_add(k), &cfg)?;
            write(
                &run.out,
                &format!("tracking_{}.csv", r.label),
                &io::tracking_to_csv(&r.report),
            )?;
            write(
                &run.out,
                &format!("tracking_{}_summary.txt", r.label),
                &io::tracking_summary(&r.report),
            )?;
            runs.push(r);
        }
        summary.push_str(&variant_summary(&v.name(), &runs));
        per_variant.push(runs);
    }
    if per_variant.len() == 2 {
        let wins = per_variant[0]
            .iter()
            .zip(&per_variant[1])
            .filter(|(a, b)| a.report.orientation_alignment_error < b.report.orientation_alignment_error)
            .count();
        writeln!(summary, "[comparison]\nlower_orientation_error_runs={wins}/{repeat}").unwrap();
    }
    write(&run.out, "summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_render(
    file: &FsPath,
    path_file: Option<&FsPath>,
    tree_file: Option<&FsPath>,
    footprints: Option<f64>,
    out: &FsPath,
) -> Result<(), Failure> {
    let scn = Scenario::load(file).with_context(|| format!("reading scenario {}", file.display()))?;
    let path = path_file
        .map(|p| io::read_path_csv(p).with_context(|| format!("reading path {}", p.display())))
        .transpose()?;
    let tree = match tree_file {
        Some(t) => branch_polylines(&io::read_tree_csv(t).with_context(|| format!("reading tree {}", t.display()))?),
        None => Vec::new(),
    };
    let input = RenderInput {
        path: path.as_ref(),
        tree,
        rrt: None,
        footprint_every: footprints,
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(out, render_svg(&scn, &input)).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

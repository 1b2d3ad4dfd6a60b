use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use zero_lab::export::{events_log, profiles_csv, trace_csv, write_binary};
use zero_lab::harness::standard_checks;
use zero_lab::model::{build_scenario, ScenarioConfig, Side};
use zero_lab::plot::{fronts_svg, z_staircase_svg, zero_curves_svg};
use zero_lab::scenarios::{builtin, random_linear, random_radial, BUILTINS};
use zero_lab::solver::solve_trajectory;
use zero_lab::suite::{render_table, run_suite, SuiteOptions, CRITERIA};
use zero_lab::zeros::{classify_side, trace_trajectory, MomentClassification};

#[derive(Parser)]
#[command(name = "zero-lab", version, about = "Zero-number experiments for one-dimensional parabolic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write its trace, events and report.
    Run {
        /// JSON config file, or `builtin:NAME`.
        scenario: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Run the checker suite on the trajectory.
        #[arg(long)]
        checks: bool,
        /// Write SVG figures under `plots/`.
        #[arg(long)]
        plots: bool,
        /// Seed for the random builtins `linear-K` and `radial-K`.
        #[arg(long, env = "ZERO_LAB_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run the acceptance criteria and print a pass/fail table.
    Suite {
        /// Criterion id, tag or part of a name.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, env = "ZERO_LAB_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// List builtin scenarios and acceptance criteria.
    List,
}

#[derive(Serialize)]
struct RunManifest {
    scenario: String,
    config_hash: String,
    seed: u64,
    outputs: Vec<String>,
    wall_time_s: f64,
}

fn load(source: &str, seed: u64) -> Result<ScenarioConfig> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let random = |prefix: &str| name.strip_prefix(prefix).and_then(|k| k.parse::<u64>().ok());
        let cfg = if let Some(k) = random("linear-") {
            random_linear(seed, k)
        } else if let Some(k) = random("radial-") {
            random_radial(seed, k)
        } else {
            builtin(name).with_context(|| format!("unknown builtin `{name}`; see `zero-lab list`"))?
        };
        cfg.validate().context("model")?;
        return Ok(cfg);
    }
    let text = fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
    build_scenario(&text).with_context(|| format!("model: {source}"))
}

/// One line per side: Z-run lengths and the set of moment labels.
fn moment_summary(moments: &[MomentClassification; 2]) -> String {
    let mut s = String::new();
    for side in Side::BOTH {
        let mc = &moments[side.index() - 1];
        let mut labels: Vec<String> = mc.labels().iter().map(|l| l.to_string()).collect();
        labels.push("N".into());
        labels.sort();
        labels.dedup();
        let runs = if mc.longest_run() <= 1 { "no ZZ-runs".to_string() } else { format!("longest Z-run {} samples", mc.longest_run()) };
        s.push_str(&format!("{}: {runs}; moments ⊆ {{{}}}\n", side.name(), labels.join(",")));
    }
    s
}

fn write(dir: &Path, rel: &str, contents: impl AsRef<[u8]>, outputs: &mut Vec<String>) -> Result<()> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, contents).with_context(|| format!("export: writing {}", path.display()))?;
    outputs.push(rel.to_string());
    Ok(())
}

/// Returns whether every requested check passed.
fn run(source: &str, out: &Path, checks: bool, plots: bool, seed: u64) -> Result<bool> {
    let started = Instant::now();
    let cfg = load(source, seed)?;
    let config_json = cfg.to_json();
    let config_hash = hex::encode(Sha256::digest(config_json.as_bytes()));
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let traj = solve_trajectory(&cfg).context("solver")?;
    let zt = trace_trajectory(&traj, &cfg.tolerances).context("zeros")?;
    let moments = [
        classify_side(&traj, Side::Left, &cfg.tolerances).context("zeros")?,
        classify_side(&traj, Side::Right, &cfg.tolerances).context("zeros")?,
    ];

    let mut outputs = Vec::new();
    write(out, "config.json", &config_json, &mut outputs)?;
    write(out, "trace.csv", trace_csv(&traj, &zt), &mut outputs)?;
    write(out, "events.log", events_log(&zt, &moments), &mut outputs)?;

    let counts = zt.counts();
    let mut report = format!("scenario {}\nconfig sha256 {config_hash}\n", cfg.name);
    report.push_str(&format!(
        "samples {}, Z {} -> {}, drops {}\n",
        counts.len(),
        counts.first().copied().unwrap_or(0),
        counts.last().copied().unwrap_or(0),
        zt.drops.len()
    ));
    report.push_str(&moment_summary(&moments));
    let mut passed = true;
    if checks {
        let sc = standard_checks(&traj, &cfg.tolerances, &cfg.boundary).context("harness")?;
        passed = sc.passed();
        for r in &sc.reports {
            report.push_str(&format!("\n{r}"));
        }
        report.push_str(&format!("\nverdict: {}\n", if passed { "PASS" } else { "FAIL" }));
    }
    write(out, "report.txt", &report, &mut outputs)?;

    if plots {
        write(out, "plots/z_staircase.svg", z_staircase_svg(&zt), &mut outputs)?;
        write(out, "plots/zero_curves.svg", zero_curves_svg(&zt), &mut outputs)?;
        if let Some(f) = &traj.fronts {
            write(out, "plots/fronts.svg", fronts_svg(f), &mut outputs)?;
        }
    }
    if cfg.output.profiles {
        write(out, "profiles.csv", profiles_csv(&traj.snapshots), &mut outputs)?;
        let mut bin = Vec::new();
        write_binary(&traj.snapshots, &mut bin).context("export")?;
        write(out, "snapshots.bin", bin, &mut outputs)?;
    }

    let manifest = RunManifest { scenario: cfg.name.clone(), config_hash, seed, outputs, wall_time_s: started.elapsed().as_secs_f64() };
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    print!("{report}");
    println!("outputs written to {}", out.display());
    Ok(passed)
}

fn suite(filter: Option<String>, seed: u64, jobs: usize) -> Result<bool> {
    let results = run_suite(&SuiteOptions { filter: filter.clone(), seed, jobs })?;
    if results.is_empty() {
        bail!("no criterion matches filter {:?}", filter.unwrap_or_default());
    }
    print!("{}", render_table(&results));
    Ok(results.iter().all(|r| r.passed))
}

fn list() {
    println!("builtin scenarios (use builtin:NAME):");
    for name in BUILTINS {
        println!("  {name}");
    }
    println!("  linear-K, radial-K  (random, K ≥ 0, drawn from --seed)");
    println!("acceptance criteria:");
    for c in CRITERIA {
        println!("  {:<4} {} [{}]", c.id, c.name, c.tags.join(", "));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { scenario, out, checks, plots, seed } => run(&scenario, &out, checks, plots, seed),
        Command::Suite { filter, seed, jobs } => suite(filter, seed, jobs),
        Command::List => {
            list();
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

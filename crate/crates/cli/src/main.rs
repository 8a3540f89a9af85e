//! `hmlab`: rate experiments, property checks and bound calculators.

mod bounds;
mod verify;

use clap::{Parser, Subcommand};
use hinge_minimax::harness::{
    emit_report, read_rows_file, read_summary, render_svg, run_with_estimator, summarize, workers_from_env,
    ConfiguredEstimator, ExperimentConfig, RateReport,
};
use hinge_minimax::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hmlab", version, about = "Hinge-loss rate experiments and minimax bound tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the rate experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; defaults to `output.dir` of the config, relative to the config file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; overrides HMLAB_WORKERS.
        #[arg(long)]
        workers: Option<usize>,
        /// Exit with status 1 when the slope check fails.
        #[arg(long)]
        strict: bool,
    },
    /// Run a property suite.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// One-shot bound calculators; results are printed as JSON.
    Bounds {
        #[command(subcommand)]
        calc: bounds::Calc,
    },
    /// Re-render the plot (and summary) from a rows CSV.
    Plot {
        csv: PathBuf,
        /// Summary JSON supplying name, theory exponent and acceptance band.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Theory exponent `e` of `n^{-e}` when no summary is given.
        #[arg(long)]
        theory: Option<f64>,
        /// Output SVG; defaults to the CSV path with an `.svg` extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_report(rep: &RateReport) {
    for s in &rep.per_n {
        println!("n={:<6} median01={:.6e} mean01={:.6e} failed={}", s.n, s.median01, s.mean01, s.failed);
    }
    match &rep.fit {
        Some(f) => println!(
            "slope {:.4} ± {:.4} (R² {:.4}), theory {:.4}, {}",
            f.slope,
            f.ci_halfwidth,
            f.r_squared,
            rep.theory_slope(),
            if rep.passed { "PASS" } else { "FAIL" }
        ),
        None => println!("fit failed: {}", rep.fit_error.as_deref().unwrap_or("unknown")),
    }
    if rep.warnings > 0 {
        println!("warning: {} rows excluded from the fit", rep.warnings);
    }
}

fn run(config: &Path, out: Option<PathBuf>, workers: Option<usize>) -> Result<RateReport> {
    let cfg = ExperimentConfig::load(config)?;
    let dist = cfg.distribution.build(None)?;
    let rep = run_with_estimator(&cfg, &dist, &ConfiguredEstimator(cfg.estimator.clone()), workers.or_else(workers_from_env))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let dir = out.unwrap_or_else(|| base.join(cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"))));
    let files = emit_report(&rep, &dir, &cfg.name)?;
    print_report(&rep);
    println!("wrote {}, {}, {}", files.csv.display(), files.json.display(), files.svg.display());
    Ok(rep)
}

fn plot(csv: &Path, summary: Option<PathBuf>, theory: Option<f64>, out: Option<PathBuf>) -> Result<()> {
    let rows = read_rows_file(csv)?;
    let (name, seed, expo, band) = match summary {
        Some(p) => {
            let s = read_summary(&p)?;
            (s.name, s.master_seed, s.theory_exponent, s.accept_band)
        }
        None => {
            let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment").to_string();
            let e = theory.ok_or_else(|| Error::param("give --summary or --theory"))?;
            (stem, 0, e, None)
        }
    };
    let rep = summarize(&name, seed, rows, theory.unwrap_or(expo), band);
    let out = out.unwrap_or_else(|| csv.with_extension("svg"));
    std::fs::write(&out, render_svg(&rep)).map_err(|e| Error::io(&out, e))?;
    print_report(&rep);
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run { config, out, workers, strict } => {
            run(&config, out, workers).map(|r| if strict && !r.passed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Cmd::Verify { suite, seed } => verify::run(suite, seed),
        Cmd::Bounds { calc } => bounds::run(calc).map(|_| ExitCode::SUCCESS),
        Cmd::Plot { csv, summary, theory, out } => plot(&csv, summary, theory, out).map(|_| ExitCode::SUCCESS),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

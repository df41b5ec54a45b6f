//! `weylqed`: run bath, emitter, and spin-model experiments from strict
//! TOML configs and emit plot-ready CSV/JSON artifacts with a hashed
//! manifest.
//!
//! Exit codes: 0 success, 2 invalid invocation or config, 3 numerical
//! failure (partial outputs removed).

mod config;
mod output;
mod recipes;
mod run;

use clap::Parser;
use config::{ExperimentConfig, ExperimentKind};
use output::ArtifactSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "weylqed",
    about = "Quantum emitters coupled to a photonic Weyl lattice: experiments in, CSV/JSON artifacts out",
    disable_help_subcommand = true,
    arg_required_else_help = false
)]
struct Cli {
    /// Experiment kind (bands|dos|dynamics|boundstate|spinbands|berry|nodes),
    /// a bundled recipe name (fig1b .. fig4f), or `list`.
    target: Option<String>,

    /// Config file (TOML). Required for experiment kinds; overrides the
    /// bundled config when used with a recipe name.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default: ./out/<target>).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker thread cap for momentum-grid parallelism.
    #[arg(long)]
    jobs: Option<usize>,

    /// Deterministic mode: single-threaded reductions and 17-significant-
    /// digit floats (outputs are byte-stable across reruns either way; this
    /// pins the thread count too).
    #[arg(long)]
    deterministic: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let Some(target) = cli.target.as_deref() else {
        eprintln!("error: no experiment specified");
        eprintln!("usage: weylqed <experiment|recipe|list> [--config FILE] [--out DIR] [--jobs N] [--deterministic]");
        eprintln!("run `weylqed list` for the bundled recipes");
        return ExitCode::from(2);
    };

    if target == "list" {
        println!("bundled recipes:");
        for r in recipes::all() {
            println!("  {:12} {}", r.name, r.description);
        }
        println!("\nexperiment kinds: bands dos dynamics boundstate spinbands berry nodes");
        return ExitCode::SUCCESS;
    }

    let threads = if cli.deterministic { 1 } else { cli.jobs.unwrap_or(0) };
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} worker threads: {e}");
            return ExitCode::from(2);
        }
    }

    // resolve the config text: experiment kinds need --config, recipes
    // carry their own (overridable)
    let config_text = if let Some(recipe) = recipes::find(target) {
        match &cli.config {
            Some(path) => match std::fs::read_to_string(path) {
                Ok(text) => text,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            },
            None => recipe.config.to_string(),
        }
    } else if ExperimentKind::parse(target).is_some() {
        let Some(path) = &cli.config else {
            eprintln!("error: experiment `{target}` needs --config FILE");
            return ExitCode::from(2);
        };
        match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
    } else {
        eprintln!("error: unknown experiment or recipe `{target}`; run `weylqed list`");
        return ExitCode::from(2);
    };

    let cfg = match ExperimentConfig::from_toml(&config_text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(kind) = ExperimentKind::parse(target) {
        if cfg.experiment != kind {
            eprintln!(
                "error: config declares experiment {:?} but `{target}` was requested",
                cfg.experiment
            );
            return ExitCode::from(2);
        }
    }

    let out_dir = cli
        .out
        .unwrap_or_else(|| PathBuf::from("out").join(target));
    let mut artifacts = match ArtifactSet::new(&out_dir) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };

    let started = Instant::now();
    match run::execute(&cfg, &mut artifacts) {
        Ok(summary) => {
            let echo = serde_json::to_value(&cfg).expect("config echo");
            if let Err(e) = artifacts.write_json("summary.json", &summary) {
                eprintln!("error: {e:#}");
                artifacts.remove_all();
                return ExitCode::from(3);
            }
            match artifacts.finish(&echo, started.elapsed().as_secs_f64(), cli.deterministic) {
                Ok(path) => {
                    println!("wrote {}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(3)
                }
            }
        }
        Err(e) => {
            artifacts.remove_all();
            if e.downcast_ref::<run::NumericalFailureError>().is_some() {
                eprintln!("error: {e:#}");
                ExitCode::from(3)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        }
    }
}

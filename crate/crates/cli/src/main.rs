//! Command-line harness: generate benchmarks, run experiments, ablations,
//! and sweeps, and pretty-print report files.
//!
//! All data goes to files under `--out` with fixed names; stdout carries a
//! human summary table only. Exit codes: 0 success, 1 config/data error,
//! 2 bad flags.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fscil_core::dataio;
use fscil_core::datagen;
use fscil_core::protocol::{self, RunReport, SweepParam};
use fscil_core::types::{ExperimentConfig, LabeledFeature};

#[derive(Parser)]
#[command(name = "fscil", version, about = "Feature-space few-shot class-incremental learning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic benchmark and write per-session feature files.
    Gen {
        /// Experiment config file (key=value lines).
        #[arg(long)]
        config: PathBuf,
        /// Master seed override; beats the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one experiment under the config's strategy; writes report.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all four strategies on the identical benchmark; writes ablation.csv.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one experiment per grid value of a parameter; writes sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// One of: unlabeled_count, base_to_novel_ratio, m, alpha.
        #[arg(long)]
        param: String,
        /// Comma-separated grid values.
        #[arg(long)]
        values: String,
    },
    /// Pretty-print an existing report file.
    Report {
        /// Report file produced by run/ablate/sweep.
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> fscil_core::Result<()> {
    match command {
        Command::Gen { config, seed, out } => {
            let config = load_config(&config, seed)?;
            gen_benchmark(&config, &out)
        }
        Command::Run { config, seed, out } => {
            let config = load_config(&config, seed)?;
            let report = protocol::run_experiment(&config)?;
            std::fs::create_dir_all(&out)?;
            dataio::write_report(&out.join("report.csv"), &report)?;
            print_summary(std::slice::from_ref(&report));
            Ok(())
        }
        Command::Ablate { config, seed, out } => {
            let config = load_config(&config, seed)?;
            let reports = protocol::run_ablation(&config)?;
            std::fs::create_dir_all(&out)?;
            dataio::write_reports(&out.join("ablation.csv"), &reports)?;
            print_summary(&reports);
            Ok(())
        }
        Command::Sweep {
            config,
            seed,
            out,
            param,
            values,
        } => {
            let config = load_config(&config, seed)?;
            let param = SweepParam::parse(&param)?;
            let values = parse_values(&values)?;
            let reports = protocol::sweep(&config, param, &values)?;
            std::fs::create_dir_all(&out)?;
            dataio::write_reports(&out.join("sweep.csv"), &reports)?;
            print_summary(&reports);
            Ok(())
        }
        Command::Report { input } => {
            let reports = dataio::read_report(&input)?;
            print_summary(&reports);
            Ok(())
        }
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> fscil_core::Result<ExperimentConfig> {
    let mut config = dataio::read_config(path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn parse_values(raw: &str) -> fscil_core::Result<Vec<f64>> {
    raw.split(',')
        .map(|v| {
            v.trim().parse::<f64>().map_err(|_| {
                fscil_core::Error::InvalidConfig(format!("invalid sweep value {v:?}"))
            })
        })
        .collect()
}

fn gen_benchmark(config: &ExperimentConfig, out: &Path) -> fscil_core::Result<()> {
    let sessions = datagen::generate_benchmark(config)?;
    std::fs::create_dir_all(out)?;
    for s in &sessions {
        let t = s.session_index;
        dataio::write_features(&out.join(format!("session_{t}_labeled.csv")), &s.labeled)?;
        if !s.unlabeled.is_empty() {
            // Hidden truth rides in the class column; consumers treat the
            // pool file's labels as diagnostics, not training data.
            let pool: Vec<LabeledFeature> = s
                .unlabeled
                .iter()
                .map(|p| LabeledFeature::new(p.feature.clone(), p.hidden_class))
                .collect();
            dataio::write_features(&out.join(format!("session_{t}_unlabeled.csv")), &pool)?;
        }
        dataio::write_features(&out.join(format!("session_{t}_test.csv")), &s.test)?;
    }
    println!(
        "benchmark: {} sessions, {} classes, dim {}",
        sessions.len(),
        config.total_class_count(),
        config.dim
    );
    Ok(())
}

fn print_summary(reports: &[RunReport]) {
    if reports.is_empty() {
        return;
    }
    let session_count = reports[0].sessions.len();
    let label_width = reports
        .iter()
        .map(|r| r.label.len())
        .max()
        .unwrap_or(3)
        .max(3);
    print!("{:<label_width$}", "run");
    for t in 0..session_count {
        print!(" {:>7}", format!("s{t}"));
    }
    println!(" {:>7}", "Avg");
    for r in reports {
        print!("{:<label_width$}", r.label);
        for s in &r.sessions {
            print!(" {:>7.2}", s.acc_all);
        }
        println!(" {:>7.2}", r.avg_all);
    }
}

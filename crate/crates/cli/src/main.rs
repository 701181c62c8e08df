//! Command-line front end for the slotted-Aloha multi-base-station
//! simulator.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on I/O
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aloha_sic_core::analysis::{
    and_or_tree, coverage_probability, load_threshold_lower_bound, peak_throughput_lower_bound,
    single_station_threshold, AsymptoticParams,
};
use aloha_sic_core::error::Error;
use aloha_sic_core::fixtures;
use aloha_sic_core::harness::{emit_csv, max_reliable_load, run_sweep, ExperimentConfig};
use aloha_sic_core::traffic::TemporalDegreeDistribution;

#[derive(Parser)]
#[command(
    name = "aloha-sic",
    about = "Framed slotted Aloha with cooperating base stations: Monte Carlo sweeps and asymptotic analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo load sweep from a JSON config and write a CSV.
    Sweep {
        /// Path to the JSON experiment config.
        #[arg(long)]
        config: PathBuf,
    },
    /// And-or-tree point estimate of the collection probability.
    Analyze {
        /// Mean spatial degree.
        #[arg(long)]
        delta: f64,
        /// Normalized load, users per station per slot.
        #[arg(long = "G")]
        load: f64,
        /// Temporal degree distribution as comma-separated q:prob pairs,
        /// e.g. "2:1.0" or "2:0.5,3:0.5".
        #[arg(long, value_parser = parse_dist)]
        dist: TemporalDegreeDistribution,
        /// Iteration cap.
        #[arg(long = "S", default_value_t = 10_000)]
        iterations: usize,
    },
    /// Single-station threshold load and the cooperative-threshold bound.
    Threshold {
        /// Temporal degree distribution as comma-separated q:prob pairs.
        #[arg(long, value_parser = parse_dist)]
        dist: TemporalDegreeDistribution,
        /// Bisection tolerance on the threshold.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Mean spatial degrees to report bounds for.
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
    },
    /// Run the hand-verified decoding fixtures and print their traces.
    Fixtures,
}

fn parse_dist(text: &str) -> Result<TemporalDegreeDistribution, String> {
    let mut pairs = Vec::new();
    for part in text.split(',') {
        let (q, p) = part
            .split_once(':')
            .ok_or_else(|| format!("expected q:prob, got '{part}'"))?;
        let q: usize = q
            .trim()
            .parse()
            .map_err(|e| format!("bad degree '{q}': {e}"))?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|e| format!("bad probability '{p}': {e}"))?;
        pairs.push((q, p));
    }
    TemporalDegreeDistribution::from_pairs(&pairs).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with success status
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep { config } => {
            let text =
                std::fs::read_to_string(&config).map_err(|e| Error::io(config.clone(), e))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            eprintln!(
                "sweep: m={} tau={} delta={} points={} runs/point={}",
                cfg.m,
                cfg.tau,
                cfg.delta,
                cfg.load_grid.len(),
                cfg.runs_per_point
            );
            let records = run_sweep(&cfg)?;
            emit_csv(&records, &cfg.output_path)?;
            println!("wrote {} records to {}", records.len(), cfg.output_path.display());
            for decoder in &cfg.decoders {
                let rows: Vec<_> = records
                    .iter()
                    .filter(|r| r.decoder == *decoder)
                    .cloned()
                    .collect();
                let g = max_reliable_load(&rows, cfg.epsilon)?.unwrap_or(0.0);
                println!("G_bullet[{decoder}] (epsilon={}) = {g:.6}", cfg.epsilon);
            }
            Ok(())
        }
        Command::Analyze {
            delta,
            load,
            dist,
            iterations,
        } => {
            let params = AsymptoticParams::new(delta, load, dist)?;
            let out = and_or_tree(&params, iterations)?;
            println!(
                "delta = {delta}, G = {load}, lambda = {}",
                params.dist().mean_degree()
            );
            println!("p_S = {:.6} after {} iterations", out.p, out.iterations);
            println!("P(collect) estimate = {:.6}", out.collect_probability);
            Ok(())
        }
        Command::Threshold { dist, tol, delta } => {
            let h_star = single_station_threshold(&dist, tol)?;
            println!("H* = {h_star:.6} (single-station threshold, tol {tol:e})");
            for d in delta {
                let bound = load_threshold_lower_bound(d, h_star);
                let peak = peak_throughput_lower_bound(d, h_star);
                println!(
                    "delta = {d}: G* >= {bound:.6}, peak T >= {peak:.6}, coverage = {:.6}",
                    coverage_probability(d)
                );
            }
            Ok(())
        }
        Command::Fixtures => {
            print!("{}", fixtures::report());
            Ok(())
        }
    }
}

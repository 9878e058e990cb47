use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dindex::commands;
use dindex::sweep::threads_from_env;
use dindex::{Result, RunConfig};
use dindex_core::synth::SynthParams;
use serde_json::json;

/// Disruption index trajectories and their temporal stability metrics.
#[derive(Parser)]
#[command(name = "dindex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load tab-separated publication and edge files into a snapshot.
    Ingest {
        #[arg(long)]
        pubs: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write a seeded synthetic corpus as pubs.tsv and edges.tsv.
    Generate(GenerateArgs),
    /// Compute D for every publication and window; writes trajectories.csv.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write report sections from the snapshot and trajectory dump.
    Report {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the sweep with the brute-force oracle on every cell.
    OracleCheck {
        /// Largest corpus the oracle accepts.
        #[arg(long, default_value_t = dindex_core::oracle::DEFAULT_LIMIT)]
        limit: usize,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Working directory, config file and settings shared by the analysis
/// commands. The config file overrides flags.
#[derive(Args)]
struct RunArgs {
    /// Working directory holding the snapshot, dump and report.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// `key = value` file applied after the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Skip the first line of the input files.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    header: Option<String>,
    #[arg(long)]
    min_year: Option<String>,
    #[arg(long)]
    max_year: Option<String>,
    #[arg(long)]
    min_refs: Option<String>,
    #[arg(long)]
    min_cites: Option<String>,
    /// Largest window to sweep, or `auto`.
    #[arg(long)]
    t_max: Option<String>,
    /// Only count reference citers from strictly later years in N_R.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    nr_strictly_after: Option<String>,
    /// `yearly` or `final` cutoffs for the recoded tables.
    #[arg(long)]
    recode_threshold: Option<String>,
    /// Quantile of the highly disruptive thresholds.
    #[arg(long)]
    q: Option<String>,
    /// Window cap of the capped sign table.
    #[arg(long)]
    cap: Option<String>,
    /// Final-D groups per sign for grouped correlations.
    #[arg(long)]
    bins: Option<String>,
    /// Comma-separated `mean` / `q<fraction>` list.
    #[arg(long)]
    aggregators: Option<String>,
    #[arg(long)]
    grid_refs: Option<String>,
    #[arg(long)]
    grid_cites: Option<String>,
    /// Comma-separated section names, `all` or `none`.
    #[arg(long)]
    sections: Option<String>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let flags = [
            ("header", &self.header),
            ("min_year", &self.min_year),
            ("max_year", &self.max_year),
            ("min_refs", &self.min_refs),
            ("min_cites", &self.min_cites),
            ("t_max", &self.t_max),
            ("nr_strictly_after", &self.nr_strictly_after),
            ("recode_threshold", &self.recode_threshold),
            ("q", &self.q),
            ("cap", &self.cap),
            ("bins", &self.bins),
            ("aggregators", &self.aggregators),
            ("grid_refs", &self.grid_refs),
            ("grid_cites", &self.grid_cites),
            ("sections", &self.sections),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 300)]
    n_pubs: usize,
    #[arg(long, default_value_t = 1990)]
    year_start: i32,
    #[arg(long, default_value_t = 2020)]
    year_end: i32,
    /// `fixed:K`, `uniform:MIN:MAX` or `heavy:MIN:MAX:EXPONENT`.
    #[arg(long, default_value = "uniform:3:12")]
    refs: String,
    /// `uniform` or `preferential:STRENGTH`.
    #[arg(long, default_value = "preferential:1")]
    attachment: String,
    /// Probability that a reference points to a later publication.
    #[arg(long, default_value_t = 0.0)]
    backedge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: Cli) -> Result<serde_json::Value> {
    let threads = threads_from_env();
    match cli.command {
        Command::Ingest { pubs, edges, run } => {
            let cfg = run.config()?;
            let stats = commands::ingest(&pubs, &edges, &run.out, &cfg)?;
            Ok(json!({ "command": "ingest", "stats": commands::stats_json(&stats) }))
        }
        Command::Generate(g) => {
            let params = SynthParams {
                n_pubs: g.n_pubs,
                year_span: (g.year_start, g.year_end),
                refs: commands::parse_refs(&g.refs)?,
                attachment: commands::parse_attachment(&g.attachment)?,
                backedge_prob: g.backedge_prob,
                seed: g.seed,
            };
            let m = commands::generate(&params, &g.out)?;
            Ok(json!({ "command": "generate", "counts": m["counts"] }))
        }
        Command::Sweep { run } => {
            let rows = commands::sweep(&run.out, &run.config()?, threads)?;
            Ok(json!({ "command": "sweep", "rows": rows, "file": out_file(&run.out, commands::TRAJECTORIES) }))
        }
        Command::Report { run } => {
            let files = commands::report(&run.out, &run.config()?, threads)?;
            Ok(json!({ "command": "report", "files": files }))
        }
        Command::OracleCheck { limit, run } => {
            let s = commands::oracle_check(&run.out, &run.config()?, limit, threads)?;
            Ok(json!({
                "command": "oracle-check",
                "publications": s.publications,
                "cells": s.cells,
                "mismatches": s.mismatches,
            }))
        }
    }
}

fn out_file(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}


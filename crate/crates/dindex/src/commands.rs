//! The work behind each subcommand. Every command reads from and writes
//! into one working directory.

use std::path::{Path, PathBuf};

use dindex_core::oracle::{oracle_trajectory, OracleConfig};
use dindex_core::synth::{generate as synth_generate, Attachment, RefsDist, SynthParams};
use dindex_core::{Corpus, DTrajectory, IngestConfig, IngestStats};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::report;
use crate::{dump, fsutil, snapshot, sweep, text};

pub const PUBS: &str = "pubs.tsv";
pub const EDGES: &str = "edges.tsv";
pub const SNAPSHOT: &str = "corpus.snap";
pub const TRAJECTORIES: &str = "trajectories.csv";
pub const REPORT_DIR: &str = "report";
pub const MANIFEST: &str = "manifest.json";

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn digests(paths: &[&Path]) -> Result<Value> {
    paths
        .iter()
        .map(|p| Ok(json!({ "file": file_name(p), "sha256": fsutil::sha256_file(p)? })))
        .collect::<Result<Vec<_>>>()
        .map(Value::Array)
}

fn manifest(command: &str, cfg: Option<&RunConfig>, inputs: &[&Path], outputs: &[&Path]) -> Result<Value> {
    let mut m = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "inputs": digests(inputs)?,
        "outputs": digests(outputs)?,
    });
    if let Some(cfg) = cfg {
        m["config"] = serde_json::to_value(cfg).expect("config serializes");
        m["config_fingerprint"] = cfg.fingerprint().into();
    }
    Ok(m)
}

pub fn stats_json(s: &IngestStats) -> Value {
    json!({
        "publications_loaded": s.publications_loaded,
        "duplicate_publications": s.duplicate_publications,
        "edges_read": s.edges_read,
        "edges_loaded": s.edges_loaded,
        "self_citations_dropped": s.self_citations_dropped,
        "dangling_edges_dropped": s.dangling_edges_dropped,
        "duplicate_edges_dropped": s.duplicate_edges_dropped,
        "backward_in_time_edges": s.backward_in_time_edges,
    })
}

/// Parses `fixed:K`, `uniform:MIN:MAX` or `heavy:MIN:MAX:EXPONENT`.
pub fn parse_refs(s: &str) -> Result<RefsDist> {
    let bad = || Error::Config(format!("invalid reference distribution {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let num = |k: usize| parts.get(k).and_then(|p| p.parse::<u32>().ok()).ok_or_else(bad);
    match (parts[0], parts.len()) {
        ("fixed", 2) => Ok(RefsDist::Fixed(num(1)?)),
        ("uniform", 3) => Ok(RefsDist::Uniform { min: num(1)?, max: num(2)? }),
        ("heavy", 4) => Ok(RefsDist::HeavyTail {
            min: num(1)?,
            max: num(2)?,
            exponent: parts[3].parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// Parses `uniform` or `preferential:STRENGTH`.
pub fn parse_attachment(s: &str) -> Result<Attachment> {
    match s.split_once(':') {
        None if s == "uniform" => Ok(Attachment::Uniform),
        None if s == "preferential" => Ok(Attachment::Preferential { strength: 1.0 }),
        Some(("preferential", k)) => k
            .parse()
            .map(|strength| Attachment::Preferential { strength })
            .map_err(|_| Error::Config(format!("invalid attachment strength {k:?}"))),
        _ => Err(Error::Config(format!("invalid attachment {s:?}"))),
    }
}

fn describe_refs(r: RefsDist) -> String {
    match r {
        RefsDist::Fixed(k) => format!("fixed:{k}"),
        RefsDist::Uniform { min, max } => format!("uniform:{min}:{max}"),
        RefsDist::HeavyTail { min, max, exponent } => format!("heavy:{min}:{max}:{exponent}"),
    }
}

fn describe_attachment(a: Attachment) -> String {
    match a {
        Attachment::Uniform => "uniform".into(),
        Attachment::Preferential { strength } => format!("preferential:{strength}"),
    }
}

/// Writes `pubs.tsv`, `edges.tsv` and a manifest recording the seed.
pub fn generate(params: &SynthParams, out: &Path) -> Result<Value> {
    let s = synth_generate(params)?;
    let (pubs, edges) = (out.join(PUBS), out.join(EDGES));
    text::write_synth(&s, &pubs, &edges)?;
    let mut m = manifest("generate", None, &[], &[&pubs, &edges])?;
    m["params"] = json!({
        "n_pubs": params.n_pubs,
        "year_start": params.year_span.0,
        "year_end": params.year_span.1,
        "refs": describe_refs(params.refs),
        "attachment": describe_attachment(params.attachment),
        "backedge_prob": params.backedge_prob,
        "seed": params.seed,
    });
    m["counts"] = json!({ "publications": s.publications.len(), "edges": s.edges.len() });
    fsutil::write_json(&out.join("generate_manifest.json"), &m)?;
    Ok(m)
}

/// Loads the text files and writes the snapshot and ingest manifest.
pub fn ingest(pubs: &Path, edges: &Path, out: &Path, cfg: &RunConfig) -> Result<IngestStats> {
    let opts = text::LoadOptions {
        ingest: IngestConfig { min_year: cfg.min_year, max_year: cfg.max_year },
        header: cfg.header,
    };
    let (corpus, stats) = text::load_corpus(pubs, edges, &opts)?;
    let snap = out.join(SNAPSHOT);
    snapshot::write(&corpus, &snap)?;
    let mut m = manifest("ingest", Some(cfg), &[pubs, edges], &[&snap])?;
    m["stats"] = stats_json(&stats);
    fsutil::write_json(&out.join("ingest_manifest.json"), &m)?;
    Ok(stats)
}

pub fn load_snapshot(out: &Path) -> Result<Corpus> {
    let snap = out.join(SNAPSHOT);
    if !snap.exists() {
        return Err(Error::MissingPrerequisite { what: format!("corpus snapshot {}", snap.display()), command: "ingest" });
    }
    snapshot::read(&snap)
}

fn load_trajectories(out: &Path, c: &Corpus, cfg: &RunConfig) -> Result<Vec<DTrajectory>> {
    let path = out.join(TRAJECTORIES);
    if !path.exists() {
        return Err(Error::MissingPrerequisite { what: format!("trajectory dump {}", path.display()), command: "sweep" });
    }
    dump::read(c, cfg.rule(), &path)
}

/// Sweeps the snapshot and writes the trajectory dump. Returns the number
/// of dumped rows.
pub fn sweep(out: &Path, cfg: &RunConfig, threads: Option<usize>) -> Result<usize> {
    let c = load_snapshot(out)?;
    let trajs = sweep::parallel_sweep(&c, cfg.engine(), cfg.t_max(), threads);
    let path = out.join(TRAJECTORIES);
    dump::write(&trajs, &path)?;
    let snap = out.join(SNAPSHOT);
    fsutil::write_json(&out.join("sweep_manifest.json"), &manifest("sweep", Some(cfg), &[&snap], &[&path])?)?;
    Ok(trajs.iter().map(|t| t.cells.len() + usize::from(!t.is_complete())).sum())
}

/// Writes the requested sections into `out/report/` plus a manifest.
/// Returns the report file names.
pub fn report(out: &Path, cfg: &RunConfig, threads: Option<usize>) -> Result<Vec<String>> {
    let dir = out.join(REPORT_DIR);
    let snap = out.join(SNAPSHOT);
    let c = load_snapshot(out)?;
    let needs_dump = cfg.sections.iter().any(|s| s.needs_trajectories());
    let trajs = if needs_dump { Some(load_trajectories(out, &c, cfg)?) } else { None };
    std::fs::create_dir_all(&dir).map_err(Error::io(&dir))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    let files: Vec<Vec<String>> = pool.install(|| {
        cfg.sections
            .par_iter()
            .map(|&s| {
                log::info!("report: {}", s.name());
                report::run_section(s, &c, trajs.as_deref(), cfg, &dir)
            })
            .collect::<Result<_>>()
    })?;
    let files: Vec<String> = files.into_iter().flatten().collect();

    let mut inputs: Vec<PathBuf> = vec![snap];
    if needs_dump {
        inputs.push(out.join(TRAJECTORIES));
    }
    let outputs: Vec<PathBuf> = files.iter().map(|f| dir.join(f)).collect();
    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let output_refs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
    let mut m = manifest("report", Some(cfg), &input_refs, &output_refs)?;
    m["sections"] = json!(cfg.sections.iter().map(|s| s.name()).collect::<Vec<_>>());
    fsutil::write_json(&dir.join(MANIFEST), &m)?;
    Ok(files)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSummary {
    pub publications: u64,
    pub cells: u64,
    pub mismatches: u64,
}

/// Compares the sweep against the oracle on every cell.
pub fn oracle_check(out: &Path, cfg: &RunConfig, limit: usize, threads: Option<usize>) -> Result<OracleSummary> {
    let c = load_snapshot(out)?;
    let ocfg = OracleConfig { rule: cfg.rule(), nr_strictly_after: cfg.nr_strictly_after, limit };
    let trajs = sweep::parallel_sweep(&c, cfg.engine(), dindex_core::TMax::Auto, threads);
    let mut summary = OracleSummary { publications: c.len() as u64, cells: 0, mismatches: 0 };
    for traj in &trajs {
        let o = oracle_trajectory(&c, traj.publication, &ocfg)?;
        let mut cells: Vec<_> = traj.cells.iter().map(|x| (x.value, x.components)).collect();
        cells.push((traj.final_cell.value, traj.final_cell.components));
        let mut expected = o.cells.clone();
        expected.push(o.final_cell);
        summary.cells += expected.len() as u64;
        summary.mismatches += cells.iter().zip(&expected).filter(|(a, b)| a != b).count() as u64;
        summary.mismatches += cells.len().abs_diff(expected.len()) as u64;
    }
    if summary.mismatches > 0 {
        return Err(Error::OracleMismatch { mismatches: summary.mismatches, cells: summary.cells });
    }
    Ok(summary)
}

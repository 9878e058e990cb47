//! Report sections and their CSV files.

use std::path::{Path, PathBuf};

use dindex_core::classify::{classify_all, distribution_table, Cutoff, DistributionRow, LabelScheme};
use dindex_core::metrics::{self, GridCell, Group, HdThresholds, MetricSeries};
use dindex_core::{CorrelationMethod, Corpus, DTrajectory};
use serde::Serialize;

use crate::config::{RecodeThreshold, RunConfig};
use crate::error::{Error, Result};
use crate::fsutil;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    CtlGrid,
    SydGrid,
    Correlations,
    Hd,
    Consistency,
    Volatility,
    Ranks,
    Transitions,
}

/// Percentiles of the D distribution reported per window.
pub const D_QUANTILES: [f64; 11] = [0.001, 0.005, 0.05, 0.1, 0.2, 0.5, 0.8, 0.9, 0.95, 0.995, 0.999];

impl Section {
    pub const ALL: [Section; 8] = [
        Section::CtlGrid,
        Section::SydGrid,
        Section::Correlations,
        Section::Hd,
        Section::Consistency,
        Section::Volatility,
        Section::Ranks,
        Section::Transitions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::CtlGrid => "ctl_grid",
            Section::SydGrid => "syd_grid",
            Section::Correlations => "correlations",
            Section::Hd => "hd",
            Section::Consistency => "consistency",
            Section::Volatility => "volatility",
            Section::Ranks => "ranks",
            Section::Transitions => "transitions",
        }
    }

    pub fn parse(s: &str) -> Option<Section> {
        Section::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Comma-separated names, `all`, or `none`.
    pub fn parse_list(s: &str) -> Result<Vec<Section>> {
        match s.trim() {
            "all" => return Ok(Section::ALL.to_vec()),
            "none" | "" => return Ok(Vec::new()),
            _ => {}
        }
        let mut out: Vec<Section> = s
            .split(',')
            .map(str::trim)
            .map(|name| Section::parse(name).ok_or_else(|| Error::Config(format!("unknown section {name:?}"))))
            .collect::<Result<_>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn needs_trajectories(self) -> bool {
        self != Section::CtlGrid
    }
}

/// Names of the transition tables, in output order.
pub fn transition_files(cap: u32) -> [String; 4] {
    [
        "transitions_sign.csv".into(),
        format!("transitions_sign_cap{cap}.csv"),
        "transitions_top.csv".into(),
        "transitions_bottom.csv".into(),
    ]
}

pub fn section_files(section: Section, cfg: &RunConfig) -> Vec<String> {
    match section {
        Section::Transitions => transition_files(cfg.cap).to_vec(),
        s => vec![format!("{}.csv", s.name())],
    }
}

#[derive(Serialize)]
struct MetricRow<'a> {
    metric: &'a str,
    t: usize,
    value: Option<f64>,
    population: u64,
}

pub fn write_metric_csv(path: &Path, series: &[MetricSeries]) -> Result<()> {
    fsutil::write_atomic(path, |w| {
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        csv.write_record(["metric", "t", "value", "population"])?;
        for s in series {
            for t in 0..s.len() {
                csv.serialize(MetricRow { metric: &s.name, t, value: s.values[t], population: s.population[t] })?;
            }
        }
        csv.flush()
    })
}

pub fn write_grid_csv(path: &Path, cells: &[GridCell]) -> Result<()> {
    fsutil::write_atomic(path, |w| {
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        csv.write_record(["aggregator", "min_refs", "min_cites", "value", "population"])?;
        for c in cells {
            csv.serialize((c.aggregator.name(), c.thresholds.min_refs, c.thresholds.min_cites, c.value, c.population))?;
        }
        csv.flush()
    })
}

pub fn write_table_csv(path: &Path, rows: &[DistributionRow]) -> Result<()> {
    fsutil::write_atomic(path, |w| {
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        csv.write_record(["group", "label", "count", "proportion_pct"])?;
        for r in rows {
            let pct = r.proportion_pct.map(|p| format!("{p:.2}")).unwrap_or_default();
            csv.write_record([r.group.name(), &r.label, &r.count.to_string(), &pct])?;
        }
        csv.flush()
    })
}

/// `1 - q`, rounded so that 0.9 gives exactly 0.1.
pub fn complement(q: f64) -> f64 {
    ((1.0 - q) * 1e12).round() / 1e12
}

fn constant(name: &str, value: Option<f64>, population: u64, len: usize) -> MetricSeries {
    MetricSeries { name: name.into(), values: vec![value; len], population: vec![population; len] }
}

fn thresholds_series(th: &HdThresholds, trajs: &[DTrajectory], name: &str) -> [MetricSeries; 2] {
    let len = th.yearly.len();
    let finals = trajs.iter().filter(|t| t.final_value().is_some()).count() as u64;
    let mut yearly = metrics::quantile_series(trajs, th.q);
    yearly.name = format!("yearly_{name}_threshold");
    [yearly, constant(&format!("final_{name}_threshold"), th.final_threshold, finals, len)]
}

fn cutoff(th: &HdThresholds, mode: RecodeThreshold) -> Cutoff {
    match mode {
        RecodeThreshold::Yearly => Cutoff::yearly(th),
        // undefined final threshold means no publication has a final D
        RecodeThreshold::Final => Cutoff::final_of(th).unwrap_or(Cutoff::Yearly(Vec::new())),
    }
}

/// Computes one section and writes its files into `dir`. Returns the file
/// names written.
pub fn run_section(
    section: Section,
    c: &Corpus,
    trajs: Option<&[DTrajectory]>,
    cfg: &RunConfig,
    dir: &Path,
) -> Result<Vec<String>> {
    let file = |name: &str| -> PathBuf { dir.join(name) };
    let files = section_files(section, cfg);
    let need = || trajs.expect("caller loads trajectories for sections that need them");
    match section {
        Section::CtlGrid => {
            let cells = metrics::ctl_grid(c, &cfg.aggregators, &cfg.grid_refs, &cfg.grid_cites)?;
            write_grid_csv(&file(&files[0]), &cells)?;
        }
        Section::SydGrid => {
            let cells = metrics::syd_grid(c, need(), &cfg.aggregators, &cfg.grid_refs, &cfg.grid_cites)?;
            write_grid_csv(&file(&files[0]), &cells)?;
        }
        Section::Correlations => {
            let trajs = need();
            let mut groups = vec![Group::All];
            for disruptive in [true, false] {
                groups.extend((0..cfg.bins).map(|k| Group::FinalDBin { disruptive, k, groups: cfg.bins }));
            }
            let mut series = Vec::new();
            for g in groups {
                for m in CorrelationMethod::ALL {
                    series.push(metrics::temporal_correlation_series(trajs, m, g));
                }
            }
            write_metric_csv(&file(&files[0]), &series)?;
        }
        Section::Hd => {
            let trajs = need();
            let th = metrics::hd_thresholds(trajs, cfg.q);
            let mut series: Vec<MetricSeries> = thresholds_series(&th, trajs, "hd").into();
            series.extend(metrics::hd_ratio_series(trajs, &th));
            series.extend(D_QUANTILES.iter().map(|&q| metrics::quantile_series(trajs, q)));
            write_metric_csv(&file(&files[0]), &series)?;
        }
        Section::Consistency => {
            let trajs = need();
            let series = metrics::consistency_series(trajs, trajs.len() as u64)?;
            write_metric_csv(&file(&files[0]), &series)?;
        }
        Section::Volatility => {
            let v = metrics::volatility_series(need());
            let zeros = MetricSeries {
                name: "percentage_change_zero_excluded".into(),
                values: v
                    .zero_excluded
                    .iter()
                    .zip(&v.absolute.population)
                    .map(|(&z, &pairs)| (pairs > 0).then_some(z as f64))
                    .collect(),
                population: v.absolute.population.clone(),
            };
            write_metric_csv(&file(&files[0]), &[v.percentage, v.absolute, zeros])?;
        }
        Section::Ranks => {
            let r = metrics::normalized_rank_series(need());
            write_metric_csv(&file(&files[0]), &[r.all, r.rising, r.falling])?;
        }
        Section::Transitions => {
            let trajs = need();
            let top = metrics::hd_thresholds(trajs, cfg.q);
            let bottom = metrics::hd_thresholds(trajs, complement(cfg.q));
            let schemes = [
                (LabelScheme::Sign, None),
                (LabelScheme::Sign, Some(cfg.cap as usize)),
                (LabelScheme::Top(cutoff(&top, cfg.recode_threshold)), None),
                (LabelScheme::Bottom(cutoff(&bottom, cfg.recode_threshold)), None),
            ];
            for ((scheme, cap), name) in schemes.iter().zip(&files) {
                let records = classify_all(trajs, scheme, *cap)?;
                write_table_csv(&file(name), &distribution_table(&records))?;
            }
        }
    }
    Ok(files)
}

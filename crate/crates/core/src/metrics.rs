//! Aggregate temporal metrics over a corpus and its D trajectories.
//!
//! Functions taking `trajs: &[DTrajectory]` expect the output of a sweep:
//! one trajectory per publication, in corpus index order, although most of
//! them only look at the trajectories themselves.
//!
//! Window-versus-final metrics (correlations, highly-disruptive ratios,
//! consistency) read `d_p^t` through [`DTrajectory::value_at`], which holds
//! the final value for windows past a publication's horizon. Year-to-year
//! change metrics (volatility, rank changes) only use observed windows.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{effective_lag, Corpus, CorpusError, PublicationId, Window};
use crate::engine::DTrajectory;
use crate::stats::{self, cmp_f64, CorrelationMethod};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("citation rank must be at least 1")]
    ZeroCitationRank,
    #[error("empty population")]
    EmptyPopulation,
    #[error("total publication count is zero")]
    NoPublications,
    #[error("trajectories are not aligned with the corpus")]
    Misaligned,
}

/// Reduction of a list of numbers to one value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregator {
    Mean,
    /// Nearest-rank quantile, `q` in `[0, 1]`.
    Quantile(f64),
}

impl Aggregator {
    pub fn apply(&self, values: &[f64]) -> Option<f64> {
        match *self {
            Aggregator::Mean => stats::mean(values),
            Aggregator::Quantile(q) => stats::quantile(values, q),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Aggregator::Mean => String::from("mean"),
            Aggregator::Quantile(q) => format!("q{}", q),
        }
    }

    /// Parses `mean` or `q<fraction>`.
    pub fn parse(s: &str) -> Option<Aggregator> {
        if s == "mean" {
            return Some(Aggregator::Mean);
        }
        let q: f64 = s.strip_prefix('q')?.parse().ok()?;
        (0.0..=1.0).contains(&q).then_some(Aggregator::Quantile(q))
    }
}

/// Population filter: at least `min_refs` references and `min_cites` final
/// citations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdPair {
    pub min_refs: u32,
    pub min_cites: u32,
}

/// One value per elapsed year `t = 0..values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub name: String,
    pub values: Vec<Option<f64>>,
    pub population: Vec<u64>,
}

impl MetricSeries {
    fn new(name: impl Into<String>, len: usize) -> Self {
        MetricSeries { name: name.into(), values: vec![None; len], population: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// An aggregated value and the number of inputs it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub value: f64,
    pub population: u64,
}

/// Number of windows any metric series spans: the longest observed
/// trajectory.
pub fn series_len(trajs: &[DTrajectory]) -> usize {
    trajs.iter().map(|t| t.cells.len()).max().unwrap_or(0)
}

/// `D > 0`. Zero counts as consolidating.
#[inline]
pub fn is_disruptive(d: f64) -> bool {
    d > 0.0
}

fn check_aligned(c: &Corpus, trajs: &[DTrajectory]) -> Result<(), MetricsError> {
    if trajs.len() != c.len() || trajs.iter().zip(c.ids()).any(|(t, id)| t.publication != *id) {
        return Err(MetricsError::Misaligned);
    }
    Ok(())
}

// ---------------------------------------------------------------- lags

/// Years until publication `i` received its `x`-th citation, or `None` if
/// it never did.
pub fn citation_time_lag_at(c: &Corpus, i: u32, x: u32) -> Option<u32> {
    if x == 0 {
        return None;
    }
    c.citer_years(i).get(x as usize - 1).map(|&y| effective_lag(y, c.year(i)))
}

pub fn citation_time_lag(c: &Corpus, id: PublicationId, x: u32) -> Result<Option<u32>, MetricsError> {
    if x == 0 {
        return Err(MetricsError::ZeroCitationRank);
    }
    Ok(citation_time_lag_at(c, c.require(id)?, x))
}

fn in_population(c: &Corpus, i: u32, thr: ThresholdPair) -> bool {
    c.references(i).len() >= thr.min_refs as usize && c.citation_count_at(i, Window::Final) >= thr.min_cites as usize
}

/// `f` over the lags to the `min_cites`-th citation of every publication
/// passing `thr`.
pub fn agg_ctl(c: &Corpus, f: Aggregator, thr: ThresholdPair) -> Result<Aggregate, MetricsError> {
    if thr.min_cites == 0 {
        return Err(MetricsError::ZeroCitationRank);
    }
    let lags: Vec<f64> = (0..c.len() as u32)
        .filter(|&i| in_population(c, i, thr))
        .filter_map(|i| citation_time_lag_at(c, i, thr.min_cites))
        .map(|l| l as f64)
        .collect();
    aggregate(f, &lags)
}

fn aggregate(f: Aggregator, values: &[f64]) -> Result<Aggregate, MetricsError> {
    f.apply(values)
        .map(|value| Aggregate { value, population: values.len() as u64 })
        .ok_or(MetricsError::EmptyPopulation)
}

// -------------------------------------------------------- stabilization

/// First observed window from which every non-NULL D shares the sign of the
/// final D. `None` for an all-NULL trajectory.
pub fn stabilized_year(traj: &DTrajectory) -> Option<u32> {
    let first = traj.first_defined()?;
    let final_sign = is_disruptive(traj.final_value()?);
    let last_mismatch = traj
        .cells
        .iter()
        .rposition(|c| c.value.get().is_some_and(|d| is_disruptive(d) != final_sign));
    Some(match last_mismatch {
        Some(k) => k + 1,
        None => first,
    } as u32)
}

/// `max(lag to the x-th citation, stabilized year)`.
pub fn selected_stabilized_year(c: &Corpus, traj: &DTrajectory, x: u32) -> Result<Option<u32>, MetricsError> {
    let lag = citation_time_lag(c, traj.publication, x)?;
    Ok(match (lag, stabilized_year(traj)) {
        (Some(l), Some(s)) => Some(l.max(s)),
        _ => None,
    })
}

/// `f` over selected stabilized years (citation rank `min_cites`) of every
/// publication passing `thr`. Publications whose D never becomes defined
/// are left out.
pub fn agg_selected_syd(
    c: &Corpus,
    trajs: &[DTrajectory],
    f: Aggregator,
    thr: ThresholdPair,
) -> Result<Aggregate, MetricsError> {
    check_aligned(c, trajs)?;
    if thr.min_cites == 0 {
        return Err(MetricsError::ZeroCitationRank);
    }
    let mut values = Vec::new();
    for i in 0..c.len() as u32 {
        if !in_population(c, i, thr) {
            continue;
        }
        let traj = &trajs[i as usize];
        if let (Some(l), Some(s)) = (citation_time_lag_at(c, i, thr.min_cites), stabilized_year(traj)) {
            values.push(l.max(s) as f64);
        }
    }
    aggregate(f, &values)
}

/// One cell of a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub aggregator: Aggregator,
    pub thresholds: ThresholdPair,
    pub value: Option<f64>,
    pub population: u64,
}

fn grid(
    aggregators: &[Aggregator],
    refs: &[u32],
    cites: &[u32],
    mut cell: impl FnMut(Aggregator, ThresholdPair) -> Result<Aggregate, MetricsError>,
) -> Result<Vec<GridCell>, MetricsError> {
    let mut out = Vec::with_capacity(aggregators.len() * refs.len() * cites.len());
    for &aggregator in aggregators {
        for &min_refs in refs {
            for &min_cites in cites {
                let thresholds = ThresholdPair { min_refs, min_cites };
                let (value, population) = match cell(aggregator, thresholds) {
                    Ok(a) => (Some(a.value), a.population),
                    Err(MetricsError::EmptyPopulation) => (None, 0),
                    Err(e) => return Err(e),
                };
                out.push(GridCell { aggregator, thresholds, value, population });
            }
        }
    }
    Ok(out)
}

/// [`agg_ctl`] over every `(aggregator, min_refs, min_cites)` combination.
pub fn ctl_grid(c: &Corpus, aggregators: &[Aggregator], refs: &[u32], cites: &[u32]) -> Result<Vec<GridCell>, MetricsError> {
    grid(aggregators, refs, cites, |f, thr| agg_ctl(c, f, thr))
}

/// [`agg_selected_syd`] over every `(aggregator, min_refs, min_cites)` combination.
pub fn syd_grid(
    c: &Corpus,
    trajs: &[DTrajectory],
    aggregators: &[Aggregator],
    refs: &[u32],
    cites: &[u32],
) -> Result<Vec<GridCell>, MetricsError> {
    check_aligned(c, trajs)?;
    grid(aggregators, refs, cites, |f, thr| agg_selected_syd(c, trajs, f, thr))
}

// ---------------------------------------------------------- correlation

/// Which publications enter a correlation series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    All,
    /// Publications with final D of the given sign, split into `groups`
    /// equal-count bins by ascending final D; bin `k` (0-based).
    FinalDBin { disruptive: bool, k: usize, groups: usize },
}

impl Group {
    pub fn name(&self) -> String {
        match *self {
            Group::All => String::from("all"),
            Group::FinalDBin { disruptive, k, groups } => format!(
                "{}_bin{}of{}",
                if disruptive { "disruptive" } else { "consolidating" },
                k + 1,
                groups
            ),
        }
    }
}

/// Indices of trajectories in `group`.
pub fn group_members(trajs: &[DTrajectory], group: Group) -> Vec<usize> {
    match group {
        Group::All => (0..trajs.len()).collect(),
        Group::FinalDBin { disruptive, k, groups } => {
            let mut members: Vec<(f64, PublicationId, usize)> = trajs
                .iter()
                .enumerate()
                .filter_map(|(i, t)| t.final_value().map(|d| (d, t.publication, i)))
                .filter(|&(d, _, _)| is_disruptive(d) == disruptive)
                .collect();
            members.sort_by(|a, b| cmp_f64(a.0, b.0).then(a.1.cmp(&b.1)));
            let m = members.len();
            let (lo, hi) = (k * m / groups, (k + 1) * m / groups);
            let mut idx: Vec<usize> = members[lo.min(m)..hi.min(m)].iter().map(|x| x.2).collect();
            idx.sort_unstable();
            idx
        }
    }
}

/// Per window `t`, the correlation of `(d_p^t, d_p^final)` over group
/// members with non-NULL `d_p^t`. NULL where fewer than two pairs exist or
/// the coefficient is undefined.
pub fn temporal_correlation_series(trajs: &[DTrajectory], method: CorrelationMethod, group: Group) -> MetricSeries {
    let len = series_len(trajs);
    let members = group_members(trajs, group);
    let mut out = MetricSeries::new(format!("{}_{}", method.name(), group.name()), len);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for t in 0..len {
        xs.clear();
        ys.clear();
        for &i in &members {
            if let (Some(d), Some(f)) = (trajs[i].value_at(t), trajs[i].final_value()) {
                xs.push(d);
                ys.push(f);
            }
        }
        out.population[t] = xs.len() as u64;
        out.values[t] = stats::correlation(&xs, &ys, method).ok();
    }
    out
}

// ------------------------------------------------------ highly disruptive

/// Yearly and final quantile thresholds of D.
#[derive(Debug, Clone, PartialEq)]
pub struct HdThresholds {
    pub q: f64,
    /// Quantile of non-NULL `d_p^t`, per `t`.
    pub yearly: Vec<Option<f64>>,
    /// Quantile of non-NULL final D.
    pub final_threshold: Option<f64>,
}

/// Non-NULL `d_p^t` values.
fn values_at(trajs: &[DTrajectory], t: usize) -> Vec<f64> {
    trajs.iter().filter_map(|tr| tr.value_at(t)).collect()
}

/// Nearest-rank `q`-quantile of D per window and of final D (`q = 0.9`
/// gives the highly-disruptive thresholds).
pub fn hd_thresholds(trajs: &[DTrajectory], q: f64) -> HdThresholds {
    let yearly = (0..series_len(trajs)).map(|t| stats::quantile(&values_at(trajs, t), q)).collect();
    let finals: Vec<f64> = trajs.iter().filter_map(|t| t.final_value()).collect();
    HdThresholds { q, yearly, final_threshold: stats::quantile(&finals, q) }
}

/// Per-window nearest-rank quantile of D.
pub fn quantile_series(trajs: &[DTrajectory], q: f64) -> MetricSeries {
    let len = series_len(trajs);
    let mut out = MetricSeries::new(format!("d_quantile_q{}", q), len);
    for t in 0..len {
        let vals = values_at(trajs, t);
        out.population[t] = vals.len() as u64;
        out.values[t] = stats::quantile(&vals, q);
    }
    out
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Yearly highly-disruptive ratio, overlapping ratio, and early-identified
/// ratio, in that order.
pub fn hd_ratio_series(trajs: &[DTrajectory], th: &HdThresholds) -> [MetricSeries; 3] {
    let len = series_len(trajs).min(th.yearly.len());
    let mut yearly = MetricSeries::new("yearly_hd_ratio", len);
    let mut overlapping = MetricSeries::new("overlapping_ratio", len);
    let mut early = MetricSeries::new("early_identified_ratio", len);
    let final_top: Vec<bool> = trajs
        .iter()
        .map(|t| match (t.final_value(), th.final_threshold) {
            (Some(d), Some(f)) => d >= f,
            _ => false,
        })
        .collect();
    let final_top_count = final_top.iter().filter(|&&b| b).count() as u64;
    for t in 0..len {
        let (mut available, mut top, mut both) = (0u64, 0u64, 0u64);
        for (tr, &is_final_top) in trajs.iter().zip(&final_top) {
            let Some(d) = tr.value_at(t) else { continue };
            available += 1;
            if th.yearly[t].is_some_and(|y| d >= y) {
                top += 1;
                both += is_final_top as u64;
            }
        }
        yearly.values[t] = ratio(top, available);
        yearly.population[t] = available;
        overlapping.values[t] = ratio(both, top);
        overlapping.population[t] = top;
        early.values[t] = ratio(both, final_top_count);
        early.population[t] = final_top_count;
    }
    [yearly, overlapping, early]
}

// ----------------------------------------------------------- consistency

/// Available ratio, consistent ratio, and yearly consistent ratio, in that
/// order. `n` is the total publication count.
pub fn consistency_series(trajs: &[DTrajectory], n: u64) -> Result<[MetricSeries; 3], MetricsError> {
    if n == 0 {
        return Err(MetricsError::NoPublications);
    }
    let len = series_len(trajs);
    let mut available = MetricSeries::new("available_ratio", len);
    let mut consistent = MetricSeries::new("consistent_ratio", len);
    let mut yearly = MetricSeries::new("yearly_consistent_ratio", len);
    for t in 0..len {
        let (mut avail, mut same) = (0u64, 0u64);
        for tr in trajs {
            if let Some(d) = tr.value_at(t) {
                avail += 1;
                if tr.final_value().is_some_and(|f| is_disruptive(f) == is_disruptive(d)) {
                    same += 1;
                }
            }
        }
        available.values[t] = ratio(avail, n);
        available.population[t] = n;
        consistent.values[t] = ratio(same, n);
        consistent.population[t] = n;
        yearly.values[t] = ratio(same, avail);
        yearly.population[t] = avail;
    }
    Ok([available, consistent, yearly])
}

// ------------------------------------------------------------ volatility

#[derive(Debug, Clone, PartialEq)]
pub struct Volatility {
    /// Mean `|d^{t+1} - d^t| / |d^t|` over pairs with `d^t != 0`.
    pub percentage: MetricSeries,
    /// Mean `|d^{t+1} - d^t|`.
    pub absolute: MetricSeries,
    /// Pairs left out of `percentage` because `d^t = 0`.
    pub zero_excluded: Vec<u64>,
}

/// Year-over-year change in D, indexed by the earlier window `t`.
pub fn volatility_series(trajs: &[DTrajectory]) -> Volatility {
    let len = series_len(trajs);
    let mut pct = MetricSeries::new("percentage_change", len);
    let mut abs = MetricSeries::new("absolute_change", len);
    let mut zero_excluded = vec![0u64; len];
    let (mut pct_vals, mut abs_vals) = (Vec::new(), Vec::new());
    for t in 0..len {
        pct_vals.clear();
        abs_vals.clear();
        for tr in trajs {
            if let (Some(a), Some(b)) = (tr.value(t), tr.value(t + 1)) {
                let change = (b - a).abs();
                abs_vals.push(change);
                if a == 0.0 {
                    zero_excluded[t] += 1;
                } else {
                    pct_vals.push(change / a.abs());
                }
            }
        }
        pct.values[t] = stats::mean(&pct_vals);
        pct.population[t] = pct_vals.len() as u64;
        abs.values[t] = stats::mean(&abs_vals);
        abs.population[t] = abs_vals.len() as u64;
    }
    Volatility { percentage: pct, absolute: abs, zero_excluded }
}

// ----------------------------------------------------------------- ranks

/// `100 * (average rank - 1) / (m - 1)` for each value; `None` if `m < 2`.
pub fn normalized_ranks(values: &[f64]) -> Option<Vec<f64>> {
    let m = values.len();
    if m < 2 {
        return None;
    }
    // one rounding step, so equal true ranks compare equal across cohort sizes
    let span = (m - 1) as f64;
    Some(stats::average_ranks(values).into_iter().map(|r| 100.0 * (r - 1.0) / span).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankChange {
    /// Mean `|Rank(t+1) - Rank(t)|` over all publications.
    pub all: MetricSeries,
    /// Restricted to `Rank(t+1) > Rank(t)`.
    pub rising: MetricSeries,
    /// Restricted to `Rank(t+1) < Rank(t)`.
    pub falling: MetricSeries,
}

/// Change of the 0-100 normalized rank within publication-year cohorts.
pub fn normalized_rank_series(trajs: &[DTrajectory]) -> RankChange {
    let len = series_len(trajs);
    let mut cohorts: Vec<(i32, usize)> = trajs.iter().enumerate().map(|(i, t)| (t.publication_year, i)).collect();
    cohorts.sort_unstable();

    // rank[i][t] for observed, cohort-ranked cells
    let mut ranks: Vec<Vec<Option<f64>>> = trajs.iter().map(|t| vec![None; t.cells.len()]).collect();
    let mut start = 0;
    while start < cohorts.len() {
        let year = cohorts[start].0;
        let end = start + cohorts[start..].iter().take_while(|c| c.0 == year).count();
        let members: Vec<usize> = cohorts[start..end].iter().map(|c| c.1).collect();
        for t in 0..len {
            let (idx, vals): (Vec<usize>, Vec<f64>) =
                members.iter().filter_map(|&i| trajs[i].value(t).map(|d| (i, d))).unzip();
            if let Some(r) = normalized_ranks(&vals) {
                for (i, r) in idx.into_iter().zip(r) {
                    ranks[i][t] = Some(r);
                }
            }
        }
        start = end;
    }

    let mut all = MetricSeries::new("rank_change", len);
    let mut rising = MetricSeries::new("rank_change_rising", len);
    let mut falling = MetricSeries::new("rank_change_falling", len);
    for t in 0..len {
        let (mut a, mut r, mut f) = (Vec::new(), Vec::new(), Vec::new());
        for row in &ranks {
            if let (Some(Some(x)), Some(Some(y))) = (row.get(t), row.get(t + 1)) {
                let change = (y - x).abs();
                a.push(change);
                match cmp_f64(*y, *x) {
                    core::cmp::Ordering::Greater => r.push(change),
                    core::cmp::Ordering::Less => f.push(change),
                    core::cmp::Ordering::Equal => {}
                }
            }
        }
        for (series, vals) in [(&mut all, &a), (&mut rising, &r), (&mut falling, &f)] {
            series.values[t] = stats::mean(vals);
            series.population[t] = vals.len() as u64;
        }
    }
    RankChange { all, rising, falling }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, IngestConfig, PublicationId};
    use crate::engine::{DCell, DComponents, DValue};

    pub(crate) fn traj(id: u64, year: i32, horizon: u32, ds: &[Option<f64>]) -> DTrajectory {
        let cell = |d: Option<f64>| DCell {
            components: DComponents::default(),
            value: d.map(DValue::Value).unwrap_or(DValue::Ineligible),
        };
        DTrajectory {
            publication: PublicationId(id),
            publication_year: year,
            horizon,
            cells: ds.iter().map(|&d| cell(d)).collect(),
            final_cell: cell(*ds.last().unwrap()),
        }
    }

    fn corpus_with_citations() -> Corpus {
        let mut b = CorpusBuilder::new(IngestConfig::default());
        for (id, y) in [(1, 2000), (2, 2001), (3, 2001), (4, 2003), (5, 1990)] {
            b.add_publication(PublicationId(id), y).unwrap();
        }
        for (s, d) in [(2, 1), (3, 1), (4, 1), (1, 5), (2, 5)] {
            b.add_edge(PublicationId(s), PublicationId(d));
        }
        b.freeze().0
    }

    #[test]
    fn lags() {
        let c = corpus_with_citations();
        let a = PublicationId(1);
        assert_eq!(citation_time_lag(&c, a, 1).unwrap(), Some(1));
        assert_eq!(citation_time_lag(&c, a, 2).unwrap(), Some(1));
        assert_eq!(citation_time_lag(&c, a, 3).unwrap(), Some(3));
        assert_eq!(citation_time_lag(&c, a, 4).unwrap(), None);
        assert_eq!(citation_time_lag(&c, a, 0), Err(MetricsError::ZeroCitationRank));
    }

    #[test]
    fn aggregated_lags() {
        let c = corpus_with_citations();
        // x=0 refs, y=2 cites: pub 1 (lag 1) and pub 5 (lag 2000->? 5@1990 cited 2000,2001: lag 11)
        let a = agg_ctl(&c, Aggregator::Mean, ThresholdPair { min_refs: 1, min_cites: 2 }).unwrap();
        assert_eq!(a, Aggregate { value: 1.0, population: 1 });
        let a = agg_ctl(&c, Aggregator::Mean, ThresholdPair { min_refs: 0, min_cites: 2 }).unwrap();
        assert_eq!(a, Aggregate { value: 6.0, population: 2 });
        assert_eq!(
            agg_ctl(&c, Aggregator::Mean, ThresholdPair { min_refs: 9, min_cites: 1 }),
            Err(MetricsError::EmptyPopulation)
        );
    }

    #[test]
    fn aggregator_examples() {
        assert_eq!(Aggregator::Mean.apply(&[1.0, 3.0]), Some(2.0));
        assert_eq!(Aggregator::Quantile(0.5).apply(&[1.0, 2.0, 9.0]), Some(2.0));
        assert_eq!(Aggregator::Mean.apply(&[3.0]), Some(3.0));
        assert_eq!(Aggregator::Quantile(0.8).apply(&[1.0, 2.0, 3.0, 4.0, 5.0]), Some(4.0));
        assert_eq!(Aggregator::parse("q0.8"), Some(Aggregator::Quantile(0.8)));
        assert_eq!(Aggregator::parse("mean"), Some(Aggregator::Mean));
        assert_eq!(Aggregator::parse("q1.5"), None);
    }

    #[test]
    fn syd_examples() {
        assert_eq!(stabilized_year(&traj(1, 2000, 3, &[None, Some(0.1), Some(0.2), Some(0.3)])), Some(1));
        assert_eq!(stabilized_year(&traj(1, 2000, 3, &[None, Some(-0.1), Some(0.2), Some(0.3)])), Some(2));
        assert_eq!(stabilized_year(&traj(1, 2000, 2, &[None, None, None])), None);
        // zero is consolidating
        assert_eq!(stabilized_year(&traj(1, 2000, 2, &[Some(-0.2), Some(0.0), Some(0.0)])), Some(0));
    }

    #[test]
    fn selected_syd_takes_max() {
        let c = corpus_with_citations();
        // pub 1: lag to 3rd citation 3, SYD 1
        let t = traj(1, 2000, 3, &[None, Some(0.1), Some(0.2), Some(0.3)]);
        assert_eq!(selected_stabilized_year(&c, &t, 3).unwrap(), Some(3));
        assert_eq!(selected_stabilized_year(&c, &t, 1).unwrap(), Some(1));
        assert_eq!(selected_stabilized_year(&c, &t, 4).unwrap(), None);
    }

    #[test]
    fn hd_threshold_arithmetic() {
        let trajs: Vec<_> = (0..10).map(|k| traj(k, 2000, 0, &[Some(k as f64 / 10.0)])).collect();
        let th = hd_thresholds(&trajs, 0.9);
        assert_eq!(th.yearly, vec![Some(0.8)]);
        assert_eq!(th.final_threshold, Some(0.8));
        let same: Vec<_> = (0..4).map(|k| traj(k, 2000, 0, &[Some(0.25)])).collect();
        assert_eq!(hd_thresholds(&same, 0.9).yearly, vec![Some(0.25)]);
        let [yearly, overlapping, early] = hd_ratio_series(&trajs, &th);
        assert_eq!(yearly.values[0], Some(0.2));
        assert_eq!(overlapping.values[0], Some(1.0));
        assert_eq!(early.values[0], Some(1.0));
    }

    #[test]
    fn consistency_identities() {
        let trajs = vec![
            traj(1, 2000, 2, &[None, Some(0.1), Some(-0.1)]),
            traj(2, 2000, 2, &[Some(0.2), Some(0.3), Some(0.1)]),
            traj(3, 2000, 2, &[None, None, None]),
        ];
        let [avail, cons, yearly] = consistency_series(&trajs, 3).unwrap();
        assert_eq!(avail.values, vec![Some(1.0 / 3.0), Some(2.0 / 3.0), Some(2.0 / 3.0)]);
        assert_eq!(cons.values, vec![Some(1.0 / 3.0), Some(1.0 / 3.0), Some(2.0 / 3.0)]);
        assert_eq!(yearly.values, vec![Some(1.0), Some(0.5), Some(1.0)]);
        assert_eq!(consistency_series(&trajs, 0), Err(MetricsError::NoPublications));
    }

    #[test]
    fn volatility_examples() {
        let trajs = vec![traj(1, 2000, 1, &[Some(0.5), Some(0.4)]), traj(2, 2000, 1, &[Some(0.0), Some(0.4)])];
        let v = volatility_series(&trajs);
        assert!((v.percentage.values[0].unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(v.percentage.population[0], 1);
        assert_eq!(v.zero_excluded[0], 1);
        assert!((v.absolute.values[0].unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(v.absolute.values[1], None);
    }

    #[test]
    fn normalized_rank_examples() {
        assert_eq!(normalized_ranks(&[0.1, 0.2, 0.3]), Some(vec![0.0, 50.0, 100.0]));
        assert_eq!(normalized_ranks(&[0.1, 0.1, 0.3]), Some(vec![25.0, 25.0, 100.0]));
        assert_eq!(normalized_ranks(&[0.1]), None);
    }

    #[test]
    fn rank_change_split() {
        let trajs = vec![
            traj(1, 2000, 1, &[Some(0.1), Some(0.3)]),
            traj(2, 2000, 1, &[Some(0.2), Some(0.2)]),
            traj(3, 2000, 1, &[Some(0.3), Some(0.1)]),
        ];
        let r = normalized_rank_series(&trajs);
        assert_eq!(r.all.values[0], Some(200.0 / 3.0));
        assert_eq!(r.rising.values[0], Some(100.0));
        assert_eq!(r.falling.values[0], Some(100.0));
        assert_eq!(r.all.population[0], 3);
    }

    #[test]
    fn correlation_series_ends_at_one() {
        let trajs = vec![
            traj(1, 2000, 2, &[Some(0.5), Some(0.1), Some(0.2)]),
            traj(2, 2000, 2, &[None, Some(0.4), Some(0.6)]),
            traj(3, 2000, 2, &[Some(-0.3), Some(-0.2), Some(-0.1)]),
        ];
        for m in CorrelationMethod::ALL {
            let s = temporal_correlation_series(&trajs, m, Group::All);
            assert_eq!(s.values[2], Some(1.0));
            assert_eq!(s.population, vec![2, 3, 3]);
        }
        let flat = vec![traj(1, 2000, 0, &[Some(0.2)]), traj(2, 2000, 0, &[Some(0.2)])];
        assert_eq!(temporal_correlation_series(&flat, CorrelationMethod::Pearson, Group::All).values, vec![None]);
    }

    #[test]
    fn final_bins_are_equal_count() {
        let trajs: Vec<_> = (0..10).map(|k| traj(k, 2000, 0, &[Some(0.05 + k as f64 / 100.0)])).collect();
        let sizes: Vec<usize> = (0..5)
            .map(|k| group_members(&trajs, Group::FinalDBin { disruptive: true, k, groups: 5 }).len())
            .collect();
        assert_eq!(sizes, vec![2; 5]);
        assert_eq!(group_members(&trajs, Group::FinalDBin { disruptive: true, k: 0, groups: 5 }), vec![0, 1]);
        assert!(group_members(&trajs, Group::FinalDBin { disruptive: false, k: 0, groups: 5 }).is_empty());
    }

    #[test]
    fn saturation_past_horizon() {
        // horizon 0 trajectory seen at t=2 holds its final value
        let trajs = vec![traj(1, 2002, 0, &[Some(0.3)]), traj(2, 2000, 2, &[None, None, Some(0.1)])];
        let [avail, _, _] = consistency_series(&trajs, 2).unwrap();
        assert_eq!(avail.values, vec![Some(0.5), Some(0.5), Some(1.0)]);
    }
}

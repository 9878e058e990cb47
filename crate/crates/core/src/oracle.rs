//! Slow reference implementations, written straight from the definitions.
//!
//! Nothing here calls into [`crate::engine`], [`crate::metrics`],
//! [`crate::stats`] or [`crate::classify`]; only [`Corpus`] accessors and
//! plain data types are shared. Every function favors obviousness over
//! speed, so inputs must stay small.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, PublicationId, Window, Year};
use crate::engine::{DComponents, DTrajectory, DValue, EligibilityRule};

/// Largest corpus the D oracle accepts by default.
pub const DEFAULT_LIMIT: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("corpus has {n} publications, oracle limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("unknown publication {0}")]
    UnknownPublication(PublicationId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub rule: EligibilityRule,
    pub nr_strictly_after: bool,
    pub limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { rule: EligibilityRule::default(), nr_strictly_after: false, limit: DEFAULT_LIMIT }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Forward,
    Both,
    ReferenceOnly,
}

/// Every other publication that plays a role for `p`, with the number of
/// years after `p` it appeared (0 if earlier).
fn contributors(c: &Corpus, p: u32, cfg: &OracleConfig) -> Vec<(i64, Role)> {
    let refs_of = |q: u32| -> BTreeSet<u32> { c.references(q).iter().copied().collect() };
    let fp_refs = refs_of(p);
    let fp_year = c.year(p) as i64;
    let mut out = Vec::new();
    for q in 0..c.len() as u32 {
        if q == p {
            continue;
        }
        let q_refs = refs_of(q);
        let cites_fp = q_refs.contains(&p);
        let cites_a_ref = q_refs.iter().any(|r| fp_refs.contains(r));
        let q_year = c.year(q) as i64;
        let elapsed = if q_year > fp_year { q_year - fp_year } else { 0 };
        let after_fp = if cfg.nr_strictly_after { q_year > fp_year } else { q_year >= fp_year };
        let role = if cites_fp && cites_a_ref {
            Role::Both
        } else if cites_fp {
            Role::Forward
        } else if cites_a_ref && after_fp {
            Role::ReferenceOnly
        } else {
            continue;
        };
        out.push((elapsed, role));
    }
    out
}

fn tally(contribs: &[(i64, Role)], t: Option<i64>) -> DComponents {
    let mut d = DComponents::default();
    for &(elapsed, role) in contribs {
        if t.is_some_and(|t| elapsed > t) {
            continue;
        }
        match role {
            Role::Forward => d.n_f += 1,
            Role::Both => d.n_b += 1,
            Role::ReferenceOnly => d.n_r += 1,
        }
    }
    d
}

fn value_of(c: &Corpus, p: u32, d: DComponents, rule: EligibilityRule) -> DValue {
    let refs = c.references(p).len() as u64;
    let cites = d.n_f as u64 + d.n_b as u64;
    if refs < rule.min_refs as u64 || cites < rule.min_cites as u64 {
        return DValue::Ineligible;
    }
    let total = d.n_f as u64 + d.n_b as u64 + d.n_r as u64;
    if total == 0 {
        return DValue::ZeroDenominator;
    }
    DValue::Value((d.n_f as f64 - d.n_b as f64) / total as f64)
}

fn check(c: &Corpus, cfg: &OracleConfig) -> Result<(), OracleError> {
    if c.len() > cfg.limit {
        return Err(OracleError::TooLarge { n: c.len(), limit: cfg.limit });
    }
    Ok(())
}

/// D of one publication at one window.
pub fn oracle_d(c: &Corpus, id: PublicationId, window: Window, cfg: &OracleConfig) -> Result<(DValue, DComponents), OracleError> {
    check(c, cfg)?;
    let p = c.index_of(id).ok_or(OracleError::UnknownPublication(id))?;
    let t = match window {
        Window::Years(t) => Some(t as i64),
        Window::Final => None,
    };
    let d = tally(&contributors(c, p, cfg), t);
    Ok((value_of(c, p, d, cfg.rule), d))
}

/// Oracle counterpart of a swept trajectory: cells for
/// `t = 0..=end_year - year(p)` and the unbounded window.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrajectory {
    pub publication: PublicationId,
    pub year: Year,
    pub horizon: usize,
    pub cells: Vec<(DValue, DComponents)>,
    pub final_cell: (DValue, DComponents),
}

/// Every window of one publication; the contributor scan is done once and
/// re-tallied per window.
pub fn oracle_trajectory(c: &Corpus, id: PublicationId, cfg: &OracleConfig) -> Result<OracleTrajectory, OracleError> {
    check(c, cfg)?;
    let p = c.index_of(id).ok_or(OracleError::UnknownPublication(id))?;
    let contribs = contributors(c, p, cfg);
    let end = c.years().iter().copied().max().unwrap_or(c.year(p));
    let horizon = (end as i64 - c.year(p) as i64).max(0) as usize;
    let cells = (0..=horizon)
        .map(|t| {
            let d = tally(&contribs, Some(t as i64));
            (value_of(c, p, d, cfg.rule), d)
        })
        .collect();
    let d = tally(&contribs, None);
    Ok(OracleTrajectory { publication: id, year: c.year(p), horizon, cells, final_cell: (value_of(c, p, d, cfg.rule), d) })
}

// ------------------------------------------------------------ metrics

/// Plain D series used as oracle metric input.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub publication: PublicationId,
    pub year: Year,
    pub horizon: usize,
    /// Observed windows.
    pub values: Vec<Option<f64>>,
    pub final_value: Option<f64>,
}

impl Series {
    pub fn from_trajectory(t: &DTrajectory) -> Series {
        Series {
            publication: t.publication,
            year: t.publication_year,
            horizon: t.horizon as usize,
            values: t.cells.iter().map(|c| c.value.get()).collect(),
            final_value: t.final_cell.value.get(),
        }
    }

    pub fn from_oracle(t: &OracleTrajectory) -> Series {
        Series {
            publication: t.publication,
            year: t.year,
            horizon: t.horizon,
            values: t.cells.iter().map(|c| c.0.get()).collect(),
            final_value: t.final_cell.0.get(),
        }
    }

    /// Observed value, or the final value once the window covers all data.
    pub fn at(&self, t: usize) -> Option<f64> {
        if t < self.values.len() {
            self.values[t]
        } else if t >= self.horizon {
            self.final_value
        } else {
            None
        }
    }

    fn observed(&self, t: usize) -> Option<f64> {
        self.values.get(t).copied().flatten()
    }
}

pub fn span(series: &[Series]) -> usize {
    series.iter().map(|s| s.values.len()).max().unwrap_or(0)
}

fn positive(x: f64) -> bool {
    x > 0.0
}

/// Years until `x` citations, by counting citers window by window.
pub fn ctl(c: &Corpus, id: PublicationId, x: u32) -> Option<u32> {
    let p = c.index_of(id)?;
    let end = c.years().iter().copied().max()?;
    let yp = c.year(p);
    let mut t = 0u32;
    loop {
        if yp as i64 + t as i64 > end as i64 {
            return None;
        }
        let count = (0..c.len() as u32)
            .filter(|&q| c.references(q).contains(&p) && (c.year(q) as i64) <= yp as i64 + t as i64)
            .count();
        if count >= x as usize {
            return Some(t);
        }
        t += 1;
    }
}

/// Mean, or nearest-rank quantile by counting: the smallest sample value
/// with at least `ceil(q n)` sample values at or below it.
pub fn aggregate(values: &[f64], quantile: Option<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let Some(q) = quantile else {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return Some(s / values.len() as f64);
    };
    let n = values.len();
    let mut k = 1usize;
    while k < n && (k as f64) < q * n as f64 - 1e-9 * (q * n as f64).max(1.0) {
        k += 1;
    }
    let mut best: Option<f64> = None;
    for &v in values {
        let at_or_below = values.iter().filter(|&&w| w <= v).count();
        if at_or_below >= k && best.is_none_or(|b| v < b) {
            best = Some(v);
        }
    }
    best
}

/// Stabilized year by trying every start window.
pub fn syd(s: &Series) -> Option<u32> {
    let f = s.final_value?;
    for t in 0..s.values.len() {
        if s.values[t].is_none() {
            continue;
        }
        if (t..s.values.len()).all(|k| s.values[k].is_none_or(|d| positive(d) == positive(f))) {
            return Some(t as u32);
        }
    }
    None
}

fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / libm::sqrt(sxx * syy))
}

/// 1-based average rank by counting smaller and equal values.
pub fn rank(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let less = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&rank(x), &rank(y))
}

/// Tau-a and tau-b by enumerating all pairs.
pub fn kendall(x: &[f64], y: &[f64]) -> Option<(f64, Option<f64>)> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let (mut conc, mut disc, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tie_x += 1;
            }
            if dy == 0.0 {
                tie_y += 1;
            }
            if dx * dy > 0.0 {
                conc += 1;
            } else if dx * dy < 0.0 {
                disc += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let a = (conc - disc) as f64 / pairs as f64;
    let b = if pairs == tie_x || pairs == tie_y {
        None
    } else {
        Some((conc - disc) as f64 / libm::sqrt(((pairs - tie_x) * (pairs - tie_y)) as f64))
    };
    Some((a, b))
}

pub fn lin_ccc(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let (cov, vx, vy) = (sxy / n, sxx / n, syy / n);
    Some(2.0 * cov / (vx + vy + (mx - my) * (mx - my)))
}

/// Indices of series whose final D has the given sign, cut into `groups`
/// equal-count bins by ascending `(final, id)`; returns bin `k`.
pub fn final_bin(series: &[Series], disruptive: bool, k: usize, groups: usize) -> Vec<usize> {
    let mut keyed: BTreeMap<(u64, PublicationId), usize> = BTreeMap::new();
    for (i, s) in series.iter().enumerate() {
        if let Some(f) = s.final_value {
            if positive(f) == disruptive {
                keyed.insert((order_key(f), s.publication), i);
            }
        }
    }
    let m = keyed.len();
    let mut out: Vec<usize> = keyed.values().copied().skip(k * m / groups).take((k + 1) * m / groups - k * m / groups).collect();
    out.sort_unstable();
    out
}

/// Monotone map from non-NaN reals to integers.
fn order_key(x: f64) -> u64 {
    let x = if x == 0.0 { 0.0 } else { x };
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// Correlation method names as used in reports.
pub fn correlation(name: &str, x: &[f64], y: &[f64]) -> Option<f64> {
    match name {
        "pearson" => pearson(x, y),
        "spearman" => spearman(x, y),
        "kendall_a" => kendall(x, y).map(|k| k.0),
        "kendall_b" => kendall(x, y).and_then(|k| k.1),
        "lin_ccc" => lin_ccc(x, y),
        _ => None,
    }
}

/// Per-window correlation between `d^t` and final D over `members`.
pub fn correlation_series(series: &[Series], members: &[usize], name: &str) -> Vec<Option<f64>> {
    (0..span(series))
        .map(|t| {
            let (mut x, mut y) = (Vec::new(), Vec::new());
            for &i in members {
                if let (Some(d), Some(f)) = (series[i].at(t), series[i].final_value) {
                    x.push(d);
                    y.push(f);
                }
            }
            correlation(name, &x, &y)
        })
        .collect()
}

/// `(yearly thresholds, final threshold)` at quantile `q`.
pub fn thresholds(series: &[Series], q: f64) -> (Vec<Option<f64>>, Option<f64>) {
    let yearly = (0..span(series))
        .map(|t| {
            let vals: Vec<f64> = series.iter().filter_map(|s| s.at(t)).collect();
            aggregate(&vals, Some(q))
        })
        .collect();
    let finals: Vec<f64> = series.iter().filter_map(|s| s.final_value).collect();
    (yearly, aggregate(&finals, Some(q)))
}

/// Yearly, overlapping and early-identified ratios via set algebra.
pub fn hd_ratios(series: &[Series], yearly: &[Option<f64>], fht: Option<f64>) -> [Vec<Option<f64>>; 3] {
    let final_top: BTreeSet<usize> = series
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!((s.final_value, fht), (Some(d), Some(f)) if d >= f))
        .map(|(i, _)| i)
        .collect();
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for t in 0..span(series) {
        let available: BTreeSet<usize> = (0..series.len()).filter(|&i| series[i].at(t).is_some()).collect();
        let top: BTreeSet<usize> = available
            .iter()
            .copied()
            .filter(|&i| matches!((series[i].at(t), yearly[t]), (Some(d), Some(y)) if d >= y))
            .collect();
        let both: BTreeSet<usize> = top.intersection(&final_top).copied().collect();
        let div = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
        out[0].push(div(top.len(), available.len()));
        out[1].push(div(both.len(), top.len()));
        out[2].push(div(both.len(), final_top.len()));
    }
    out
}

/// Available, consistent and yearly consistent ratios.
pub fn consistency(series: &[Series], n: usize) -> [Vec<Option<f64>>; 3] {
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for t in 0..span(series) {
        let available = series.iter().filter(|s| s.at(t).is_some()).count();
        let consistent = series
            .iter()
            .filter(|s| matches!((s.at(t), s.final_value), (Some(d), Some(f)) if positive(d) == positive(f)))
            .count();
        out[0].push(Some(available as f64 / n as f64));
        out[1].push(Some(consistent as f64 / n as f64));
        out[2].push((available > 0).then(|| consistent as f64 / available as f64));
    }
    out
}

/// Mean percentage change, mean absolute change, and zero-excluded counts.
pub fn volatility(series: &[Series]) -> (Vec<Option<f64>>, Vec<Option<f64>>, Vec<u64>) {
    let (mut pct, mut abs, mut zeros) = (Vec::new(), Vec::new(), Vec::new());
    for t in 0..span(series) {
        let (mut p, mut a, mut z) = (Vec::new(), Vec::new(), 0u64);
        for s in series {
            if let (Some(x), Some(y)) = (s.observed(t), s.observed(t + 1)) {
                a.push((y - x).abs());
                if x == 0.0 {
                    z += 1;
                } else {
                    p.push((y - x).abs() / x.abs());
                }
            }
        }
        pct.push((!p.is_empty()).then(|| mean(&p)));
        abs.push((!a.is_empty()).then(|| mean(&a)));
        zeros.push(z);
    }
    (pct, abs, zeros)
}

/// Mean rank change overall, rising, falling.
pub fn rank_changes(series: &[Series]) -> [Vec<Option<f64>>; 3] {
    let len = span(series);
    let norm_rank = |t: usize, i: usize| -> Option<f64> {
        let d = series[i].observed(t)?;
        let cohort: Vec<f64> =
            series.iter().filter(|s| s.year == series[i].year).filter_map(|s| s.observed(t)).collect();
        if cohort.len() < 2 {
            return None;
        }
        let less = cohort.iter().filter(|&&b| b < d).count() as f64;
        let equal = cohort.iter().filter(|&&b| b == d).count() as f64;
        Some(100.0 * (less + (equal + 1.0) / 2.0 - 1.0) / (cohort.len() - 1) as f64)
    };
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for t in 0..len {
        let (mut all, mut up, mut down) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..series.len() {
            if let (Some(a), Some(b)) = (norm_rank(t, i), norm_rank(t + 1, i)) {
                all.push((b - a).abs());
                if b > a {
                    up.push(b - a);
                } else if b < a {
                    down.push(a - b);
                }
            }
        }
        for (slot, v) in out.iter_mut().zip([all, up, down]) {
            slot.push((!v.is_empty()).then(|| mean(&v)));
        }
    }
    out
}

/// Threshold source for recoded labels.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleScheme {
    Sign,
    Top(Vec<Option<f64>>),
    Bottom(Vec<Option<f64>>),
}

/// `'D'`/`'C'` string from the first defined window to the last observed
/// one (or `cap`).
pub fn labels(s: &Series, scheme: &OracleScheme, cap: Option<usize>) -> String {
    let mut out = String::new();
    let mut started = false;
    for t in 0..s.values.len() {
        if cap.is_some_and(|c| t > c) {
            break;
        }
        let Some(d) = s.values[t] else { continue };
        started = true;
        let disruptive = match scheme {
            OracleScheme::Sign => d > 0.0,
            OracleScheme::Top(th) => d >= th[t].expect("threshold"),
            OracleScheme::Bottom(th) => !(d <= th[t].expect("threshold")),
        };
        out.push(if disruptive { 'D' } else { 'C' });
    }
    debug_assert!(started || out.is_empty());
    out
}

/// Category name and transition count of a label string.
pub fn category(labels: &str) -> (&'static str, usize) {
    let flips = labels.as_bytes().windows(2).filter(|w| w[0] != w[1]).count();
    let only = |s: &str, ch: char| !s.is_empty() && s.chars().all(|c| c == ch);
    let split = |ch: char| -> Option<(&str, &str)> {
        let cut = labels.find(|c| c != ch)?;
        Some(labels.split_at(cut))
    };
    let name = if only(labels, 'D') || only(labels, 'C') {
        "Stable"
    } else if let Some((head, tail)) = split('D').filter(|(h, t)| only(h, 'D') && only(t, 'C')) {
        let _ = tail;
        if head.len() == 1 { "Disruptive consolidating" } else { ">1 disruptive consolidating" }
    } else if let Some((head, _)) = split('C').filter(|(h, t)| only(h, 'C') && only(t, 'D')) {
        if head.len() == 1 { "Consolidating disruptive" } else { ">1 consolidating disruptive" }
    } else {
        "Highly unstable"
    };
    (name, flips)
}

/// Category counts and, for highly unstable records, counts per
/// transition number.
pub fn tally_categories(label_strings: &[String]) -> (BTreeMap<&'static str, u64>, BTreeMap<usize, u64>) {
    let mut cats = BTreeMap::new();
    let mut flips = BTreeMap::new();
    for l in label_strings.iter().filter(|l| !l.is_empty()) {
        let (name, k) = category(l);
        *cats.entry(name).or_insert(0) += 1;
        if name == "Highly unstable" {
            *flips.entry(k).or_insert(0) += 1;
        }
    }
    (cats, flips)
}

/// Oracle helper for tests that need a full grid cell: the population and
/// raw values for `(min_refs, min_cites)`.
pub fn population(c: &Corpus, min_refs: u32, min_cites: u32) -> Vec<u32> {
    (0..c.len() as u32)
        .filter(|&p| {
            let refs = c.references(p).len();
            let cites = (0..c.len() as u32).filter(|&q| c.references(q).contains(&p)).count();
            refs >= min_refs as usize && cites >= min_cites as usize
        })
        .collect()
}

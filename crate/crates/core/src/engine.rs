//! Disruption index computation.
//!
//! For a focal publication `p` and a window `t`, let `W` be the publications
//! whose effective lag relative to `p` is at most `t`. Then
//!
//!  - `N_F`: members of `W` citing `p` and none of `p`'s references,
//!  - `N_B`: members of `W` citing `p` and at least one of its references,
//!  - `N_R`: members of `W` other than `p`, published no earlier than `p`
//!    (strictly later with `nr_strictly_after`), citing at least one
//!    reference of `p` but not `p` itself,
//!
//! and `D = (N_F - N_B) / (N_F + N_B + N_R)`.
//!
//! Three routes compute the same numbers: [`Engine::compute_d`] evaluates a
//! single window from sorted adjacency, [`Engine::sweep_one`] buckets every
//! contributor by lag once and prefix-sums, and [`Engine::extend_window`]
//! appends one year to an existing trajectory.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{effective_lag, Corpus, CorpusError, PublicationId, Window, Year};

/// Minimum reference and in-window citation counts before D is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EligibilityRule {
    pub min_refs: u32,
    pub min_cites: u32,
}

impl Default for EligibilityRule {
    fn default() -> Self {
        EligibilityRule { min_refs: 5, min_cites: 5 }
    }
}

impl EligibilityRule {
    pub const NONE: EligibilityRule = EligibilityRule { min_refs: 0, min_cites: 0 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineConfig {
    pub rule: EligibilityRule,
    /// Count only reference-citers published strictly after the focal year
    /// in `N_R`. Off by default: same-year reference-citers are counted.
    pub nr_strictly_after: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct DComponents {
    pub n_f: u32,
    pub n_b: u32,
    pub n_r: u32,
}

impl DComponents {
    /// In-window citations of the focal publication.
    pub fn citations(&self) -> u32 {
        self.n_f + self.n_b
    }

    fn plus(self, other: DComponents) -> DComponents {
        DComponents { n_f: self.n_f + other.n_f, n_b: self.n_b + other.n_b, n_r: self.n_r + other.n_r }
    }
}

/// A D value, or the reason it is NULL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DValue {
    Value(f64),
    Ineligible,
    /// Eligible but `N_F + N_B + N_R = 0`; only reachable with `min_cites = 0`.
    ZeroDenominator,
}

impl DValue {
    pub fn get(&self) -> Option<f64> {
        match *self {
            DValue::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        self.get().is_none()
    }

    /// Applies the eligibility rule and the D formula.
    pub fn evaluate(c: DComponents, reference_count: usize, rule: EligibilityRule) -> DValue {
        if reference_count < rule.min_refs as usize || c.citations() < rule.min_cites {
            return DValue::Ineligible;
        }
        let denominator = c.n_f + c.n_b + c.n_r;
        if denominator == 0 {
            return DValue::ZeroDenominator;
        }
        DValue::Value((c.n_f as f64 - c.n_b as f64) / denominator as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DCell {
    pub components: DComponents,
    pub value: DValue,
}

/// Yearly D values of one publication.
#[derive(Debug, Clone, PartialEq)]
pub struct DTrajectory {
    pub publication: PublicationId,
    pub publication_year: Year,
    /// `end_year - publication_year`: the last window that can add citations.
    pub horizon: u32,
    /// Cells for `t = 0..cells.len()`; at most `horizon + 1` of them.
    pub cells: Vec<DCell>,
    /// The unbounded window.
    pub final_cell: DCell,
}

impl DTrajectory {
    /// D at an observed window, `None` when NULL or not computed.
    pub fn value(&self, t: usize) -> Option<f64> {
        self.cells.get(t).and_then(|c| c.value.get())
    }

    /// D at window `t`, saturating to the final value for `t >= horizon`:
    /// windows past the end of the data contain every citer.
    pub fn value_at(&self, t: usize) -> Option<f64> {
        if t < self.cells.len() {
            self.cells[t].value.get()
        } else if t >= self.horizon as usize {
            self.final_cell.value.get()
        } else {
            None
        }
    }

    pub fn final_value(&self) -> Option<f64> {
        self.final_cell.value.get()
    }

    /// First observed window with a non-NULL value.
    pub fn first_defined(&self) -> Option<usize> {
        self.cells.iter().position(|c| !c.value.is_null())
    }

    pub fn is_complete(&self) -> bool {
        self.cells.len() == self.horizon as usize + 1
    }
}

/// Upper bound on swept windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TMax {
    /// Up to each publication's own horizon.
    #[default]
    Auto,
    Years(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("window {got} requested but trajectory is valid through {} windows", expected)]
    WindowOutOfOrder { expected: usize, got: u32 },
    #[error("window {t} is past the horizon {horizon}")]
    BeyondHorizon { t: u32, horizon: u32 },
}

/// Reusable per-thread marker arrays for [`Engine::sweep_one`].
#[derive(Debug, Clone)]
pub struct SweepScratch {
    cites_focal: Vec<u32>,
    is_reference: Vec<u32>,
    seen: Vec<u32>,
    stamp: u32,
    buckets: Vec<DComponents>,
}

impl SweepScratch {
    pub fn new(corpus: &Corpus) -> Self {
        let n = corpus.len();
        SweepScratch { cites_focal: vec![0; n], is_reference: vec![0; n], seen: vec![0; n], stamp: 0, buckets: Vec::new() }
    }

    fn next_stamp(&mut self) -> u32 {
        if self.stamp == u32::MAX {
            self.cites_focal.fill(0);
            self.is_reference.fill(0);
            self.seen.fill(0);
            self.stamp = 0;
        }
        self.stamp += 1;
        self.stamp
    }
}

/// Disruption computations over one corpus with one configuration.
#[derive(Debug, Clone, Copy)]
pub struct Engine<'c> {
    corpus: &'c Corpus,
    config: EngineConfig,
}

impl<'c> Engine<'c> {
    pub fn new(corpus: &'c Corpus, config: EngineConfig) -> Self {
        Engine { corpus, config }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    fn cell(&self, i: u32, components: DComponents) -> DCell {
        let value = DValue::evaluate(components, self.corpus.references(i).len(), self.config.rule);
        DCell { components, value }
    }

    fn nr_first_year(&self, i: u32) -> i64 {
        self.corpus.year(i) as i64 + self.config.nr_strictly_after as i64
    }

    pub fn compute_d(&self, id: PublicationId, window: Window) -> Result<DCell, EngineError> {
        Ok(self.compute_at(self.corpus.require(id)?, window))
    }

    pub fn compute_at(&self, i: u32, window: Window) -> DCell {
        let last = match window {
            Window::Final => i64::MAX,
            Window::Years(t) => self.corpus.year(i) as i64 + t as i64,
        };
        self.cell(i, self.contributions(i, i64::MIN, last))
    }

    /// Contributors whose publication year lies in `[from, to]`.
    fn contributions(&self, i: u32, from: i64, to: i64) -> DComponents {
        let c = self.corpus;
        let refs = c.references(i);
        let in_range = |y: Year| (y as i64) >= from && (y as i64) <= to;

        let mut out = DComponents::default();
        for (&q, &y) in c.citers(i).iter().zip(c.citer_years(i)) {
            if !in_range(y) {
                continue;
            }
            if sorted_intersect(c, c.references(q), refs) {
                out.n_b += 1;
            } else {
                out.n_f += 1;
            }
        }

        let from = from.max(self.nr_first_year(i));
        let mut candidates = Vec::new();
        for &r in refs {
            let years = c.citer_years(r);
            let lo = years.partition_point(|&y| (y as i64) < from);
            let hi = years.partition_point(|&y| (y as i64) <= to);
            if lo < hi {
                candidates.extend_from_slice(&c.citers(r)[lo..hi]);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        out.n_r = candidates.iter().filter(|&&q| q != i && !c.cites(q, i)).count() as u32;
        out
    }

    /// An empty trajectory for `id` with the final cell filled in, ready for
    /// [`Engine::extend_window`] from `t = 0`.
    pub fn seed_trajectory(&self, id: PublicationId) -> Result<DTrajectory, EngineError> {
        let i = self.corpus.require(id)?;
        Ok(DTrajectory {
            publication: id,
            publication_year: self.corpus.year(i),
            horizon: self.corpus.horizon(i),
            cells: Vec::new(),
            final_cell: self.compute_at(i, Window::Final),
        })
    }

    /// Appends window `t`, looking only at contributors whose effective lag
    /// is exactly `t`.
    pub fn extend_window(&self, traj: &DTrajectory, t: u32) -> Result<DTrajectory, EngineError> {
        if traj.cells.len() != t as usize {
            return Err(EngineError::WindowOutOfOrder { expected: traj.cells.len(), got: t });
        }
        if t > traj.horizon {
            return Err(EngineError::BeyondHorizon { t, horizon: traj.horizon });
        }
        let i = self.corpus.require(traj.publication)?;
        let y0 = self.corpus.year(i) as i64;
        let delta = if t == 0 {
            self.contributions(i, i64::MIN, y0)
        } else {
            self.contributions(i, y0 + t as i64, y0 + t as i64)
        };
        let previous = traj.cells.last().map(|c| c.components).unwrap_or_default();
        let mut next = traj.clone();
        next.cells.push(self.cell(i, previous.plus(delta)));
        Ok(next)
    }

    /// Full trajectory of publication index `i` for `t = 0..=min(t_max, horizon)`.
    pub fn sweep_one(&self, i: u32, t_max: TMax, scratch: &mut SweepScratch) -> DTrajectory {
        let c = self.corpus;
        let horizon = c.horizon(i);
        let last = match t_max {
            TMax::Auto => horizon,
            TMax::Years(t) => t.min(horizon),
        } as usize;
        let overflow = last + 1;
        let y0 = c.year(i);
        let stamp = scratch.next_stamp();
        scratch.buckets.clear();
        scratch.buckets.resize(last + 2, DComponents::default());

        let refs = c.references(i);
        for &r in refs {
            scratch.is_reference[r as usize] = stamp;
        }
        for (&q, &y) in c.citers(i).iter().zip(c.citer_years(i)) {
            scratch.cites_focal[q as usize] = stamp;
            let slot = (effective_lag(y, y0) as usize).min(overflow);
            if c.references(q).iter().any(|&r| scratch.is_reference[r as usize] == stamp) {
                scratch.buckets[slot].n_b += 1;
            } else {
                scratch.buckets[slot].n_f += 1;
            }
        }
        let from = self.nr_first_year(i);
        for &r in refs {
            let years = c.citer_years(r);
            let start = years.partition_point(|&y| (y as i64) < from);
            for (&q, &y) in c.citers(r)[start..].iter().zip(&years[start..]) {
                let q_idx = q as usize;
                if q == i || scratch.cites_focal[q_idx] == stamp || scratch.seen[q_idx] == stamp {
                    continue;
                }
                scratch.seen[q_idx] = stamp;
                let slot = (effective_lag(y, y0) as usize).min(overflow);
                scratch.buckets[slot].n_r += 1;
            }
        }

        let mut running = DComponents::default();
        let mut cells = Vec::with_capacity(last + 1);
        for bucket in &scratch.buckets[..=last] {
            running = running.plus(*bucket);
            cells.push(self.cell(i, running));
        }
        let total = running.plus(scratch.buckets[overflow]);
        DTrajectory { publication: c.id(i), publication_year: y0, horizon, cells, final_cell: self.cell(i, total) }
    }

    /// Sequential sweep over every publication, in id order.
    pub fn sweep(&self, t_max: TMax) -> Vec<DTrajectory> {
        let mut scratch = SweepScratch::new(self.corpus);
        (0..self.corpus.len() as u32).map(|i| self.sweep_one(i, t_max, &mut scratch)).collect()
    }
}

/// Whether two `(year, index)`-sorted reference lists share an element.
fn sorted_intersect(c: &Corpus, a: &[u32], b: &[u32]) -> bool {
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        let ka = (c.year(a[x]), a[x]);
        let kb = (c.year(b[y]), b[y]);
        match ka.cmp(&kb) {
            core::cmp::Ordering::Less => x += 1,
            core::cmp::Ordering::Greater => y += 1,
            core::cmp::Ordering::Equal => return true,
        }
    }
    false
}

//! Disruptive/consolidating label sequences and trajectory categories.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::PublicationId;
use crate::engine::DTrajectory;
use crate::metrics::{is_disruptive, HdThresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Disruptive,
    Consolidating,
}

impl Label {
    pub fn symbol(self) -> char {
        match self {
            Label::Disruptive => 'D',
            Label::Consolidating => 'C',
        }
    }
}

/// Per-window threshold used by the recoded schemes.
#[derive(Debug, Clone, PartialEq)]
pub enum Cutoff {
    /// One threshold per window `t`.
    Yearly(Vec<Option<f64>>),
    /// The same threshold for every window.
    Final(f64),
}

impl Cutoff {
    pub fn yearly(th: &HdThresholds) -> Cutoff {
        Cutoff::Yearly(th.yearly.clone())
    }

    /// `None` if the final threshold is undefined.
    pub fn final_of(th: &HdThresholds) -> Option<Cutoff> {
        th.final_threshold.map(Cutoff::Final)
    }

    fn at(&self, t: usize) -> Option<f64> {
        match self {
            Cutoff::Yearly(v) => v.get(t).copied().flatten(),
            Cutoff::Final(x) => Some(*x),
        }
    }
}

/// How a D value becomes a label.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelScheme {
    /// Disruptive iff `D > 0`.
    Sign,
    /// Disruptive iff `D >=` the upper cutoff (90th percentile).
    Top(Cutoff),
    /// Consolidating iff `D <=` the lower cutoff (10th percentile).
    Bottom(Cutoff),
}

impl LabelScheme {
    fn label(&self, t: usize, d: f64) -> Result<Label, ClassifyError> {
        let disruptive = match self {
            LabelScheme::Sign => is_disruptive(d),
            LabelScheme::Top(c) => d >= c.at(t).ok_or(ClassifyError::MissingThreshold(t))?,
            LabelScheme::Bottom(c) => d > c.at(t).ok_or(ClassifyError::MissingThreshold(t))?,
        };
        Ok(if disruptive { Label::Disruptive } else { Label::Consolidating })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("no threshold available for window {0}")]
    MissingThreshold(usize),
    #[error("cannot classify an empty label sequence")]
    EmptyLabels,
}

/// The six trajectory categories. Declaration order is table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Stable,
    /// Consolidating for two or more windows, then disruptive for good.
    Gt1ConsolidatingDisruptive,
    /// Disruptive for two or more windows, then consolidating for good.
    Gt1DisruptiveConsolidating,
    ConsolidatingDisruptive,
    DisruptiveConsolidating,
    /// Two or more transitions.
    HighlyUnstable,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Stable,
        Category::Gt1ConsolidatingDisruptive,
        Category::Gt1DisruptiveConsolidating,
        Category::ConsolidatingDisruptive,
        Category::DisruptiveConsolidating,
        Category::HighlyUnstable,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::Stable => "Stable",
            Category::Gt1ConsolidatingDisruptive => ">1 consolidating disruptive",
            Category::Gt1DisruptiveConsolidating => ">1 disruptive consolidating",
            Category::ConsolidatingDisruptive => "Consolidating disruptive",
            Category::DisruptiveConsolidating => "Disruptive consolidating",
            Category::HighlyUnstable => "Highly unstable",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryRecord {
    pub publication: PublicationId,
    pub labels: Vec<Label>,
    pub transitions: usize,
    pub category: Category,
}

/// Labels from the first window with a defined D through the last observed
/// window, or through `cap` if smaller. Empty if D is never defined in that
/// range.
pub fn label_sequence(traj: &DTrajectory, scheme: &LabelScheme, cap: Option<usize>) -> Result<Vec<Label>, ClassifyError> {
    let Some(first) = traj.first_defined() else { return Ok(Vec::new()) };
    let last = match cap {
        Some(c) => c.min(traj.cells.len() - 1),
        None => traj.cells.len() - 1,
    };
    let mut out = Vec::with_capacity(last.saturating_sub(first) + 1);
    for t in first..=last {
        // NULL cannot follow a defined value
        if let Some(d) = traj.value(t) {
            out.push(scheme.label(t, d)?);
        }
    }
    Ok(out)
}

/// Category and number of adjacent label changes.
pub fn classify(labels: &[Label]) -> Result<(Category, usize), ClassifyError> {
    let first = *labels.first().ok_or(ClassifyError::EmptyLabels)?;
    let transitions = labels.windows(2).filter(|w| w[0] != w[1]).count();
    let initial_run = labels.iter().take_while(|&&l| l == first).count();
    let category = match (transitions, first, initial_run) {
        (0, _, _) => Category::Stable,
        (1, Label::Disruptive, 1) => Category::DisruptiveConsolidating,
        (1, Label::Consolidating, 1) => Category::ConsolidatingDisruptive,
        (1, Label::Disruptive, _) => Category::Gt1DisruptiveConsolidating,
        (1, Label::Consolidating, _) => Category::Gt1ConsolidatingDisruptive,
        _ => Category::HighlyUnstable,
    };
    Ok((category, transitions))
}

/// Records for every trajectory with a non-empty label sequence.
pub fn classify_all(
    trajs: &[DTrajectory],
    scheme: &LabelScheme,
    cap: Option<usize>,
) -> Result<Vec<TrajectoryRecord>, ClassifyError> {
    let mut out = Vec::new();
    for traj in trajs {
        let labels = label_sequence(traj, scheme, cap)?;
        if labels.is_empty() {
            continue;
        }
        let (category, transitions) = classify(&labels)?;
        out.push(TrajectoryRecord { publication: traj.publication, labels, transitions, category });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowGroup {
    Category,
    TransitionCount,
}

impl RowGroup {
    pub fn name(self) -> &'static str {
        match self {
            RowGroup::Category => "Category",
            RowGroup::TransitionCount => "TransitionCount",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow {
    pub group: RowGroup,
    pub label: alloc::string::String,
    pub count: u64,
    /// Percent of all classified records; `None` when there are none.
    pub proportion_pct: Option<f64>,
}

/// Category counts followed by one row per transition count from 2 up to
/// the largest observed (zero rows included).
pub fn distribution_table(records: &[TrajectoryRecord]) -> Vec<DistributionRow> {
    use alloc::string::ToString;
    let total = records.len() as u64;
    let pct = |count: u64| (total > 0).then(|| 100.0 * count as f64 / total as f64);

    let mut per_category = [0u64; 6];
    let max_transitions = records.iter().map(|r| r.transitions).max().unwrap_or(0);
    let mut per_transitions = vec![0u64; max_transitions + 1];
    for r in records {
        per_category[r.category as usize] += 1;
        if r.category == Category::HighlyUnstable {
            per_transitions[r.transitions] += 1;
        }
    }
    let mut rows: Vec<DistributionRow> = Category::ALL
        .iter()
        .map(|&c| DistributionRow {
            group: RowGroup::Category,
            label: c.label().to_string(),
            count: per_category[c as usize],
            proportion_pct: pct(per_category[c as usize]),
        })
        .collect();
    for (k, &count) in per_transitions.iter().enumerate().skip(2) {
        rows.push(DistributionRow {
            group: RowGroup::TransitionCount,
            label: k.to_string(),
            count,
            proportion_pct: pct(count),
        });
    }
    rows
}

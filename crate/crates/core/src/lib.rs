//! Disruption index (D) trajectories over expanding citation windows.
//!
//! The crate is `no_std` with `alloc`. It holds the pure algorithmic parts:
//!
//!  - [`corpus`]: a frozen, year-indexed citation graph in CSR form.
//!  - [`engine`]: `N_F`, `N_B`, `N_R` and `D` for any window, a batch sweep
//!    over all windows, and an incremental window extension.
//!  - [`stats`]: nearest-rank quantiles, average ranks, and the Pearson,
//!    Spearman, Kendall and Lin concordance coefficients.
//!  - [`metrics`]: citation time lags, stabilization years, window-vs-final
//!    correlations, highly-disruptive ratios, sign consistency, volatility.
//!  - [`classify`]: disruptive/consolidating label sequences, transition
//!    counting and the six trajectory categories.
//!  - [`synth`]: seeded synthetic corpora.
//!  - [`oracle`]: slow, straight-from-definition reference implementations
//!    used to check everything above.
//!
//! File formats, snapshots, parallel sweeps and the CLI live in the `dindex`
//! crate.

#![no_std]

extern crate alloc;

pub mod classify;
pub mod corpus;
pub mod engine;
pub mod metrics;
pub mod oracle;
pub mod stats;
pub mod synth;

pub use classify::{Category, Label, LabelScheme, TrajectoryRecord};
pub use corpus::{Corpus, CorpusBuilder, CorpusError, IngestConfig, IngestStats, PublicationId, Window, Year};
pub use engine::{DCell, DComponents, DTrajectory, DValue, EligibilityRule, Engine, EngineConfig, EngineError, TMax};
pub use metrics::{Aggregator, MetricSeries, MetricsError, ThresholdPair};
pub use stats::{CorrelationError, CorrelationMethod};

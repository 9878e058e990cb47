//! Seeded synthetic citation corpora.
//!
//! Publications get uniform random years in the span and distinct random
//! ids. Each publication then draws a reference count and picks that many
//! distinct targets among publications from the same or earlier years,
//! either uniformly or with probability proportional to
//! `1 + strength * citations so far`. With probability `backedge_prob` a
//! single reference instead points to a strictly later publication.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, CorpusBuilder, IngestConfig, PublicationId, Year};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefsDist {
    Fixed(u32),
    /// Inclusive range.
    Uniform { min: u32, max: u32 },
    /// Discrete Pareto with tail exponent `exponent > 1`, truncated at `max`.
    HeavyTail { min: u32, max: u32, exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attachment {
    Uniform,
    Preferential { strength: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub n_pubs: usize,
    /// Inclusive year span.
    pub year_span: (Year, Year),
    pub refs: RefsDist,
    pub attachment: Attachment,
    pub backedge_prob: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_pubs: 300,
            year_span: (1990, 2020),
            refs: RefsDist::Uniform { min: 3, max: 12 },
            attachment: Attachment::Preferential { strength: 1.0 },
            backedge_prob: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("n_pubs must be at least 1")]
    NoPublications,
    #[error("year span start is after its end")]
    InvalidYearSpan,
    #[error("invalid reference distribution: {0}")]
    InvalidRefs(&'static str),
    #[error("backedge probability must lie in [0, 1]")]
    InvalidProbability,
    #[error("attachment strength must be finite and non-negative")]
    InvalidStrength,
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_pubs == 0 {
            return Err(SynthError::NoPublications);
        }
        if self.year_span.0 > self.year_span.1 {
            return Err(SynthError::InvalidYearSpan);
        }
        match self.refs {
            RefsDist::Fixed(_) => {}
            RefsDist::Uniform { min, max } if min > max => return Err(SynthError::InvalidRefs("min > max")),
            RefsDist::HeavyTail { min, max, exponent } => {
                if min == 0 || min > max {
                    return Err(SynthError::InvalidRefs("heavy tail needs 1 <= min <= max"));
                }
                if !(exponent > 1.0) || !exponent.is_finite() {
                    return Err(SynthError::InvalidRefs("heavy tail exponent must exceed 1"));
                }
            }
            RefsDist::Uniform { .. } => {}
        }
        if !(0.0..=1.0).contains(&self.backedge_prob) {
            return Err(SynthError::InvalidProbability);
        }
        if let Attachment::Preferential { strength } = self.attachment {
            if !(strength >= 0.0) || !strength.is_finite() {
                return Err(SynthError::InvalidStrength);
            }
        }
        Ok(())
    }
}

/// Generated records in generation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthCorpus {
    pub publications: Vec<(PublicationId, Year)>,
    pub edges: Vec<(PublicationId, PublicationId)>,
}

impl SynthCorpus {
    pub fn build(&self) -> Corpus {
        let mut b = CorpusBuilder::new(IngestConfig::default());
        for &(id, y) in &self.publications {
            b.add_publication(id, y).expect("generated years are consistent");
        }
        for &(s, d) in &self.edges {
            b.add_edge(s, d);
        }
        b.freeze().0
    }
}

/// Fenwick tree over non-negative weights.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0.0; n + 1] }
    }

    fn add(&mut self, i: usize, w: f64) {
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += w;
            k += k & k.wrapping_neg();
        }
    }

    fn prefix(&self, end: usize) -> f64 {
        let mut s = 0.0;
        let mut k = end;
        while k > 0 {
            s += self.tree[k];
            k -= k & k.wrapping_neg();
        }
        s
    }

    /// Smallest `i` with `prefix(i + 1) > target`.
    fn find(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

fn draw_refs(rng: &mut ChaCha8Rng, dist: RefsDist) -> usize {
    match dist {
        RefsDist::Fixed(k) => k as usize,
        RefsDist::Uniform { min, max } => rng.gen_range(min..=max) as usize,
        RefsDist::HeavyTail { min, max, exponent } => {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let k = libm::floor(min as f64 * libm::pow(u, -1.0 / (exponent - 1.0)));
            (k.min(max as f64) as usize).max(min as usize)
        }
    }
}

pub fn generate(params: &SynthParams) -> Result<SynthCorpus, SynthError> {
    params.validate()?;
    let n = params.n_pubs;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut years: Vec<Year> = (0..n).map(|_| rng.gen_range(params.year_span.0..=params.year_span.1)).collect();
    years.sort_unstable();
    let mut seen = BTreeSet::new();
    let mut ids = Vec::with_capacity(n);
    while ids.len() < n {
        let id = rng.gen::<u64>() >> 1;
        if seen.insert(id) {
            ids.push(PublicationId(id));
        }
    }

    let strength = match params.attachment {
        Attachment::Uniform => 0.0,
        Attachment::Preferential { strength } => strength,
    };
    let mut weights = Fenwick::new(n);
    for i in 0..n {
        weights.add(i, 1.0);
    }

    let mut edges = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..n {
        // candidates: every other publication no later than year i
        let eligible = years.partition_point(|&y| y <= years[i]);
        let later = n - eligible;
        let want = draw_refs(&mut rng, params.refs).min(eligible - 1 + later);
        chosen.clear();
        let mut attempts = 0;
        while chosen.len() < want && attempts < 64 * (want + 1) {
            attempts += 1;
            let target = if later > 0 && params.backedge_prob > 0.0 && rng.gen_bool(params.backedge_prob) {
                eligible + rng.gen_range(0..later)
            } else if eligible > 1 {
                if strength == 0.0 {
                    rng.gen_range(0..eligible)
                } else {
                    let total = weights.prefix(eligible);
                    weights.find(rng.gen::<f64>() * total).min(eligible - 1)
                }
            } else {
                continue;
            };
            if target != i && !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &j in &chosen {
            edges.push((ids[i], ids[j]));
            if strength > 0.0 {
                weights.add(j, strength);
            }
        }
    }

    let publications = ids.iter().copied().zip(years.iter().copied()).collect();
    Ok(SynthCorpus { publications, edges })
}

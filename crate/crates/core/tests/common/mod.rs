#![allow(dead_code)]

use dindex_core::synth::{generate, Attachment, RefsDist, SynthParams};
use dindex_core::Corpus;

/// Varied small corpus for seed `seed`: 20..=300 publications over at most
/// 40 years, mixing reference distributions, attachment and back edges.
pub fn small_corpus(seed: u64) -> Corpus {
    generate(&small_params(seed)).unwrap().build()
}

pub fn small_params(seed: u64) -> SynthParams {
    let n_pubs = 20 + (seed.wrapping_mul(7919) % 281) as usize;
    let span = 1 + (seed.wrapping_mul(104_729) % 40) as i32;
    let refs = match seed % 3 {
        0 => RefsDist::Uniform { min: 0, max: 12 },
        1 => RefsDist::HeavyTail { min: 2, max: 40, exponent: 2.5 },
        _ => RefsDist::Fixed(6),
    };
    let attachment = if seed.is_multiple_of(2) { Attachment::Preferential { strength: 1.5 } } else { Attachment::Uniform };
    let backedge_prob = if seed.is_multiple_of(5) { 0.05 } else { 0.0 };
    SynthParams { n_pubs, year_span: (1980, 1980 + span - 1), refs, attachment, backedge_prob, seed }
}

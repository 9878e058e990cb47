//! Tab-separated publication and edge files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dindex_core::synth::SynthCorpus;
use dindex_core::{Corpus, CorpusBuilder, IngestConfig, IngestStats, PublicationId, Year};

use crate::error::{Error, Result};
use crate::fsutil;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub ingest: IngestConfig,
    /// Skip the first line of both files.
    pub header: bool,
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

/// Calls `f(line_number, fields)` for every non-blank data line of a
/// two-column file.
fn for_each_record(path: &Path, header: bool, mut f: impl FnMut(u64, &str, &str) -> Result<()>) -> Result<()> {
    let file = File::open(path).map_err(Error::io(path))?;
    let mut reader = BufReader::new(file);
    let mut buf = String::new();
    let mut line_no = 0u64;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => parse_err(path, line_no + 1, "not valid UTF-8"),
            _ => Error::Io { path: path.to_path_buf(), source: e },
        })?;
        if n == 0 {
            return Ok(());
        }
        line_no += 1;
        if header && line_no == 1 {
            continue;
        }
        let line = buf.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => f(line_no, a.trim(), b.trim())?,
            _ => return Err(parse_err(path, line_no, "expected exactly two tab-separated fields")),
        }
    }
}

fn parse_id(path: &Path, line: u64, s: &str) -> Result<PublicationId> {
    s.parse::<u64>().map(PublicationId).map_err(|_| parse_err(path, line, format!("invalid publication id {s:?}")))
}

/// Reads `id<TAB>year` and `citing<TAB>cited` files into a frozen corpus.
pub fn load_corpus(pubs: &Path, edges: &Path, opts: &LoadOptions) -> Result<(Corpus, IngestStats)> {
    let mut b = CorpusBuilder::new(opts.ingest);
    for_each_record(pubs, opts.header, |line, id, year| {
        let id = parse_id(pubs, line, id)?;
        let year: Year = year.parse().map_err(|_| parse_err(pubs, line, format!("invalid year {year:?}")))?;
        b.add_publication(id, year).map_err(|e| parse_err(pubs, line, e.to_string()))
    })?;
    for_each_record(edges, opts.header, |line, citing, cited| {
        b.add_edge(parse_id(edges, line, citing)?, parse_id(edges, line, cited)?);
        Ok(())
    })?;
    Ok(b.freeze())
}

/// Writes a generated corpus in the ingestion grammar, without headers.
pub fn write_synth(s: &SynthCorpus, pubs: &Path, edges: &Path) -> Result<()> {
    fsutil::write_atomic(pubs, |w| {
        for (id, year) in &s.publications {
            writeln!(w, "{id}\t{year}")?;
        }
        Ok(())
    })?;
    fsutil::write_atomic(edges, |w| {
        for (a, b) in &s.edges {
            writeln!(w, "{a}\t{b}")?;
        }
        Ok(())
    })
}

/// Writes a frozen corpus back out, sorted by id.
pub fn write_corpus(c: &Corpus, pubs: &Path, edges: &Path) -> Result<()> {
    fsutil::write_atomic(pubs, |w| {
        for i in 0..c.len() as u32 {
            writeln!(w, "{}\t{}", c.id(i), c.year(i))?;
        }
        Ok(())
    })?;
    fsutil::write_atomic(edges, |w: &mut BufWriter<File>| {
        for i in 0..c.len() as u32 {
            let mut refs: Vec<PublicationId> = c.references(i).iter().map(|&r| c.id(r)).collect();
            refs.sort_unstable();
            for r in refs {
                writeln!(w, "{}\t{}", c.id(i), r)?;
            }
        }
        Ok(())
    })
}

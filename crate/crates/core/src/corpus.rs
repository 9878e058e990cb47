//! Frozen citation corpus.
//!
//! Publications are stored densely, indexed `0..len()` in ascending
//! [`PublicationId`] order. Both adjacency directions are kept in CSR form and
//! every list is sorted by `(year, index)` ascending, so a citation window
//! `t` is always a prefix of a publication's citer list.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Calendar year.
pub type Year = i32;

/// Opaque 64-bit publication identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PublicationId(pub u64);

impl fmt::Display for PublicationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for PublicationId {
    fn from(v: u64) -> Self {
        PublicationId(v)
    }
}

/// Citation window: elapsed whole years after publication, or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Years(u32),
    Final,
}

/// Years between a cited and a citing publication, clamped at zero so that
/// backward-in-time citations land in the publication-year window.
#[inline]
pub fn effective_lag(citer_year: Year, cited_year: Year) -> u32 {
    if citer_year <= cited_year {
        0
    } else {
        (citer_year as i64 - cited_year as i64) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("publication {id} listed with conflicting years {first} and {second}")]
    ConflictingYear { id: PublicationId, first: Year, second: Year },
    #[error("publication {id} has year {year} outside [{min}, {max}]")]
    YearOutOfRange { id: PublicationId, year: Year, min: Year, max: Year },
    #[error("unknown publication {0}")]
    UnknownPublication(PublicationId),
    #[error("invalid adjacency: {0}")]
    InvalidAdjacency(&'static str),
}

/// Sanity bounds applied while ingesting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestConfig {
    pub min_year: Year,
    pub max_year: Year,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig { min_year: 0, max_year: 9999 }
    }
}

/// Counters collected while building a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Distinct publications retained.
    pub publications_loaded: u64,
    /// Repeated publication records that agreed on the year.
    pub duplicate_publications: u64,
    /// Edge records offered to the builder.
    pub edges_read: u64,
    /// Distinct edges retained.
    pub edges_loaded: u64,
    pub self_citations_dropped: u64,
    pub dangling_edges_dropped: u64,
    pub duplicate_edges_dropped: u64,
    /// Retained edges whose citer is older than the cited publication.
    pub backward_in_time_edges: u64,
}

/// Single-writer accumulator; [`CorpusBuilder::freeze`] produces the
/// immutable [`Corpus`].
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    config: IngestConfig,
    years: BTreeMap<PublicationId, Year>,
    edges: Vec<(PublicationId, PublicationId)>,
    stats: IngestStats,
}

impl CorpusBuilder {
    pub fn new(config: IngestConfig) -> Self {
        CorpusBuilder { config, ..Default::default() }
    }

    pub fn add_publication(&mut self, id: PublicationId, year: Year) -> Result<(), CorpusError> {
        if year < self.config.min_year || year > self.config.max_year {
            return Err(CorpusError::YearOutOfRange {
                id,
                year,
                min: self.config.min_year,
                max: self.config.max_year,
            });
        }
        match self.years.get(&id) {
            Some(&first) if first != year => Err(CorpusError::ConflictingYear { id, first, second: year }),
            Some(_) => {
                self.stats.duplicate_publications += 1;
                Ok(())
            }
            None => {
                self.years.insert(id, year);
                Ok(())
            }
        }
    }

    /// Records `citing -> cited`. Endpoints are resolved at freeze time, so
    /// edges may be added before their publications.
    pub fn add_edge(&mut self, citing: PublicationId, cited: PublicationId) {
        self.stats.edges_read += 1;
        if citing == cited {
            self.stats.self_citations_dropped += 1;
        } else {
            self.edges.push((citing, cited));
        }
    }

    pub fn freeze(self) -> (Corpus, IngestStats) {
        let CorpusBuilder { years: year_map, edges, mut stats, .. } = self;
        let (ids, years): (Vec<_>, Vec<_>) = year_map.into_iter().unzip();
        let lookup = |id: PublicationId| ids.binary_search(&id).ok().map(|i| i as u32);

        let mut resolved = Vec::with_capacity(edges.len());
        for (citing, cited) in edges {
            match (lookup(citing), lookup(cited)) {
                (Some(s), Some(d)) => resolved.push((s, d)),
                _ => stats.dangling_edges_dropped += 1,
            }
        }
        resolved.sort_unstable();
        let before = resolved.len();
        resolved.dedup();
        stats.duplicate_edges_dropped = (before - resolved.len()) as u64;
        stats.edges_loaded = resolved.len() as u64;
        stats.publications_loaded = ids.len() as u64;
        stats.backward_in_time_edges =
            resolved.iter().filter(|&&(s, d)| years[s as usize] < years[d as usize]).count() as u64;

        (Corpus::assemble(ids, years, &resolved), stats)
    }
}

/// Immutable citation graph. Safe to share across threads for read-only
/// queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    ids: Vec<PublicationId>,
    years: Vec<Year>,
    cites_offsets: Vec<usize>,
    cites: Vec<u32>,
    cited_by_offsets: Vec<usize>,
    cited_by: Vec<u32>,
    cited_by_years: Vec<Year>,
    end_year: Option<Year>,
}

impl Corpus {
    /// Builds both CSR directions from deduplicated, self-loop free index
    /// pairs `(citing, cited)`.
    fn assemble(ids: Vec<PublicationId>, years: Vec<Year>, edges: &[(u32, u32)]) -> Corpus {
        let n = ids.len();
        let key = |i: u32| (years[i as usize], i);

        let mut cites_offsets = vec![0usize; n + 1];
        let mut cited_by_offsets = vec![0usize; n + 1];
        for &(s, d) in edges {
            cites_offsets[s as usize + 1] += 1;
            cited_by_offsets[d as usize + 1] += 1;
        }
        for i in 0..n {
            cites_offsets[i + 1] += cites_offsets[i];
            cited_by_offsets[i + 1] += cited_by_offsets[i];
        }
        let mut cites = vec![0u32; edges.len()];
        let mut cited_by = vec![0u32; edges.len()];
        let mut fill_out = cites_offsets.clone();
        let mut fill_in = cited_by_offsets.clone();
        for &(s, d) in edges {
            cites[fill_out[s as usize]] = d;
            fill_out[s as usize] += 1;
            cited_by[fill_in[d as usize]] = s;
            fill_in[d as usize] += 1;
        }
        for i in 0..n {
            cites[cites_offsets[i]..cites_offsets[i + 1]].sort_unstable_by_key(|&j| key(j));
            cited_by[cited_by_offsets[i]..cited_by_offsets[i + 1]].sort_unstable_by_key(|&j| key(j));
        }
        let cited_by_years = cited_by.iter().map(|&j| years[j as usize]).collect();
        let end_year = years.iter().copied().max();
        Corpus { ids, years, cites_offsets, cites, cited_by_offsets, cited_by, cited_by_years, end_year }
    }

    /// Rebuilds a corpus from its forward adjacency, as stored in snapshots.
    /// `offsets` has `ids.len() + 1` entries indexing into `targets`.
    pub fn from_adjacency(
        ids: Vec<PublicationId>,
        years: Vec<Year>,
        offsets: &[usize],
        targets: &[u32],
    ) -> Result<Corpus, CorpusError> {
        let n = ids.len();
        if years.len() != n || offsets.len() != n + 1 {
            return Err(CorpusError::InvalidAdjacency("length mismatch"));
        }
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CorpusError::InvalidAdjacency("ids not strictly ascending"));
        }
        if offsets[0] != 0 || offsets[n] != targets.len() || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(CorpusError::InvalidAdjacency("offsets not monotone"));
        }
        let mut edges = Vec::with_capacity(targets.len());
        for s in 0..n {
            for &d in &targets[offsets[s]..offsets[s + 1]] {
                if d as usize >= n {
                    return Err(CorpusError::InvalidAdjacency("target out of range"));
                }
                if d as usize == s {
                    return Err(CorpusError::InvalidAdjacency("self-citation"));
                }
                edges.push((s as u32, d));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(CorpusError::InvalidAdjacency("duplicate edge"));
        }
        Ok(Corpus::assemble(ids, years, &edges))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.cites.len()
    }

    /// Last calendar year with any publication; `None` for an empty corpus.
    pub fn end_year(&self) -> Option<Year> {
        self.end_year
    }

    pub fn ids(&self) -> &[PublicationId] {
        &self.ids
    }

    pub fn years(&self) -> &[Year] {
        &self.years
    }

    pub fn index_of(&self, id: PublicationId) -> Option<u32> {
        self.ids.binary_search(&id).ok().map(|i| i as u32)
    }

    pub fn require(&self, id: PublicationId) -> Result<u32, CorpusError> {
        self.index_of(id).ok_or(CorpusError::UnknownPublication(id))
    }

    #[inline]
    pub fn id(&self, i: u32) -> PublicationId {
        self.ids[i as usize]
    }

    #[inline]
    pub fn year(&self, i: u32) -> Year {
        self.years[i as usize]
    }

    /// Publications cited by `i`, sorted by `(year, index)`.
    #[inline]
    pub fn references(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.cites[self.cites_offsets[i]..self.cites_offsets[i + 1]]
    }

    /// Publications citing `i`, sorted by `(year, index)`.
    #[inline]
    pub fn citers(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.cited_by[self.cited_by_offsets[i]..self.cited_by_offsets[i + 1]]
    }

    /// Years of [`Corpus::citers`], position for position.
    #[inline]
    pub fn citer_years(&self, i: u32) -> &[Year] {
        let i = i as usize;
        &self.cited_by_years[self.cited_by_offsets[i]..self.cited_by_offsets[i + 1]]
    }

    /// Forward adjacency in CSR form: `(offsets, targets)`.
    pub fn forward_csr(&self) -> (&[usize], &[u32]) {
        (&self.cites_offsets, &self.cites)
    }

    /// Largest window that still adds citations: `end_year - year(i)`.
    pub fn horizon(&self, i: u32) -> u32 {
        let end = self.end_year.unwrap_or(self.year(i));
        effective_lag(end, self.year(i))
    }

    /// Whether `citer` cites `cited`, by binary search on the sorted list.
    pub fn cites(&self, citer: u32, cited: u32) -> bool {
        let key = (self.year(cited), cited);
        self.references(citer).binary_search_by_key(&key, |&j| (self.year(j), j)).is_ok()
    }

    pub fn reference_count(&self, id: PublicationId) -> Result<usize, CorpusError> {
        Ok(self.references(self.require(id)?).len())
    }

    pub fn citation_count(&self, id: PublicationId, window: Window) -> Result<usize, CorpusError> {
        Ok(self.citation_count_at(self.require(id)?, window))
    }

    /// Number of citers whose effective lag is within `window`.
    pub fn citation_count_at(&self, i: u32, window: Window) -> usize {
        let years = self.citer_years(i);
        match window {
            Window::Final => years.len(),
            Window::Years(t) => {
                let last = self.year(i) as i64 + t as i64;
                years.partition_point(|&y| (y as i64) <= last)
            }
        }
    }
}

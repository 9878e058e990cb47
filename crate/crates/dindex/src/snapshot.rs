//! Binary corpus snapshot.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "DINDEXSN"
//! version  u32      currently 1
//! n        u64      publications
//! m        u64      edges
//! ids      n × u64  ascending
//! years    n × i32
//! offsets  (n+1) × u64, forward adjacency row starts
//! targets  m × u32  cited publication indices
//! digest   32 bytes SHA-256 of everything above
//! ```

use std::io::Write;
use std::path::Path;

use dindex_core::{Corpus, PublicationId};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fsutil;

pub const MAGIC: &[u8; 8] = b"DINDEXSN";
pub const VERSION: u32 = 1;

pub fn encode(c: &Corpus) -> Vec<u8> {
    let (offsets, targets) = c.forward_csr();
    let n = c.len();
    let mut out = Vec::with_capacity(8 + 4 + 16 + n * 20 + 8 + targets.len() * 4 + 32);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(targets.len() as u64).to_le_bytes());
    for id in c.ids() {
        out.extend_from_slice(&id.0.to_le_bytes());
    }
    for y in c.years() {
        out.extend_from_slice(&y.to_le_bytes());
    }
    for &o in offsets {
        out.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for t in targets {
        out.extend_from_slice(&t.to_le_bytes());
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos.checked_add(k)?)?;
        self.pos += k;
        Some(s)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn i32(&mut self) -> Option<i32> {
        self.take(4).map(|b| i32::from_le_bytes(b.try_into().unwrap()))
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> std::result::Result<Corpus, String> {
    if bytes.len() < MAGIC.len() + 4 + 32 || &bytes[..8] != MAGIC {
        return Err("not a corpus snapshot".into());
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    let mut cur = Cursor { bytes: body, pos: 8 };
    let version = cur.u32().ok_or("truncated header")?;
    if version != VERSION {
        return Err(format!("unsupported snapshot version {version}, expected {VERSION}"));
    }
    if Sha256::digest(body).as_slice() != digest {
        return Err("checksum mismatch".into());
    }
    let truncated = || String::from("truncated snapshot");
    let n = cur.u64().ok_or_else(truncated)? as usize;
    let m = cur.u64().ok_or_else(truncated)? as usize;
    // guard allocations against corrupt counts
    if n.saturating_mul(20).saturating_add(m.saturating_mul(4)) > body.len() {
        return Err(truncated());
    }
    let ids = (0..n).map(|_| cur.u64().map(PublicationId)).collect::<Option<Vec<_>>>().ok_or_else(truncated)?;
    let years = (0..n).map(|_| cur.i32()).collect::<Option<Vec<_>>>().ok_or_else(truncated)?;
    let offsets =
        (0..=n).map(|_| cur.u64().map(|o| o as usize)).collect::<Option<Vec<_>>>().ok_or_else(truncated)?;
    let targets = (0..m).map(|_| cur.u32()).collect::<Option<Vec<_>>>().ok_or_else(truncated)?;
    if cur.pos != body.len() {
        return Err("trailing bytes".into());
    }
    Corpus::from_adjacency(ids, years, &offsets, &targets).map_err(|e| e.to_string())
}

pub fn write(c: &Corpus, path: &Path) -> Result<()> {
    let bytes = encode(c);
    fsutil::write_atomic(path, |w| w.write_all(&bytes))
}

pub fn read(path: &Path) -> Result<Corpus> {
    let bytes = std::fs::read(path).map_err(Error::io(path))?;
    decode(&bytes).map_err(|message| Error::Format { path: path.to_path_buf(), message })
}

//! Binary checkpoints of a [`MarkovStream`].
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes   "MKVSTRM\0"
//! version  u16
//! length   u64       payload length in bytes
//! payload  length bytes
//! checksum 32 bytes  SHA-256 of the payload
//! ```
//!
//! Payload: `prefix_emitted: u8`, `emitted: u64`, `distinct: u64`,
//! `last_max: opt-int`, `ceiling: opt-int`, `frontier_len: u64`, then the
//! frontier triples in ascending `(max, y, x)` order, three ints each.
//! An int is a sign byte (`0` for nonnegative), a `u32` byte count and the
//! little-endian magnitude; an opt-int is a presence byte followed by an int.
//!
//! The frontier is written sorted, so equal streams always produce identical
//! bytes.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::enumeration::{FrontierNode, MarkovStream};
use crate::error::{Error, Result};
use crate::markov::MarkovTriple;

pub const MAGIC: &[u8; 8] = b"MKVSTRM\0";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 8 + 2 + 8;
const CHECKSUM_LEN: usize = 32;

fn put_int(out: &mut Vec<u8>, v: &BigUint) {
    let bytes = v.to_bytes_le();
    out.push(0);
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(&bytes);
}

fn put_opt(out: &mut Vec<u8>, v: Option<&BigUint>) {
    match v {
        Some(v) => {
            out.push(1);
            put_int(out, v);
        }
        None => out.push(0),
    }
}

pub fn checkpoint(stream: &MarkovStream) -> Vec<u8> {
    let mut payload = Vec::new();
    payload.push(stream.prefix_emitted);
    payload.extend_from_slice(&stream.emitted.to_le_bytes());
    payload.extend_from_slice(&stream.distinct.to_le_bytes());
    put_opt(&mut payload, stream.last_max.as_ref());
    put_opt(&mut payload, stream.ceiling.as_ref());
    let mut nodes: Vec<&FrontierNode> = stream.heap.iter().map(|Reverse(n)| n).collect();
    nodes.sort();
    payload.extend_from_slice(&(nodes.len() as u64).to_le_bytes());
    for n in nodes {
        for e in n.triple.entries() {
            put_int(&mut payload, e);
        }
    }

    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + CHECKSUM_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&Sha256::digest(&payload));
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::CheckpointCorrupt("truncated payload"));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn int(&mut self) -> Result<BigUint> {
        if self.u8()? != 0 {
            return Err(Error::CheckpointCorrupt("negative integer"));
        }
        let len = u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize;
        Ok(BigUint::from_bytes_le(self.take(len)?))
    }

    fn opt(&mut self) -> Result<Option<BigUint>> {
        match self.u8()? {
            0 => Ok(None),
            1 => self.int().map(Some),
            _ => Err(Error::CheckpointCorrupt("bad presence byte")),
        }
    }
}

pub fn restore(blob: &[u8]) -> Result<MarkovStream> {
    if blob.len() < HEADER_LEN + CHECKSUM_LEN || &blob[..8] != MAGIC {
        return Err(Error::CheckpointCorrupt("missing header"));
    }
    let version = u16::from_le_bytes([blob[8], blob[9]]);
    if version != VERSION {
        return Err(Error::CheckpointVersion { found: version, expected: VERSION });
    }
    let len = u64::from_le_bytes(blob[10..18].try_into().expect("8 bytes")) as usize;
    if blob.len() != HEADER_LEN + len + CHECKSUM_LEN {
        return Err(Error::CheckpointCorrupt("length mismatch"));
    }
    let payload = &blob[HEADER_LEN..HEADER_LEN + len];
    if Sha256::digest(payload).as_slice() != &blob[HEADER_LEN + len..] {
        return Err(Error::CheckpointCorrupt("checksum mismatch"));
    }

    let mut r = Reader { buf: payload };
    let prefix_emitted = r.u8()?;
    if prefix_emitted > 2 {
        return Err(Error::CheckpointCorrupt("bad prefix counter"));
    }
    let emitted = r.u64()?;
    let distinct = r.u64()?;
    let last_max = r.opt()?;
    let ceiling = r.opt()?;
    let count = r.u64()?;
    let mut heap = BinaryHeap::new();
    for _ in 0..count {
        let (x, y, z) = (r.int()?, r.int()?, r.int()?);
        let t = MarkovTriple::new(x, y, z)
            .map_err(|_| Error::CheckpointCorrupt("frontier entry is not a Markov triple"))?;
        heap.push(Reverse(FrontierNode::new(t)));
    }
    if !r.buf.is_empty() {
        return Err(Error::CheckpointCorrupt("trailing bytes"));
    }
    Ok(MarkovStream {
        prefix_emitted,
        heap,
        emitted,
        distinct,
        last_max,
        ceiling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_prefix_roundtrip() {
        let s = MarkovStream::new();
        let mut back = restore(&checkpoint(&s)).unwrap();
        assert_eq!(back.next_markov().unwrap().max, 1u32.into());
    }

    #[test]
    fn resume_matches_uninterrupted() {
        let mut a = MarkovStream::new();
        let head: Vec<_> = a.by_ref().take(100).collect();
        let blob = checkpoint(&a);
        let mut b = restore(&blob).unwrap();
        assert_eq!(checkpoint(&b), blob);
        let tail_a: Vec<_> = a.by_ref().take(100).collect();
        let tail_b: Vec<_> = b.by_ref().take(100).collect();
        assert_eq!(tail_a, tail_b);
        assert_eq!(checkpoint(&a), checkpoint(&b));
        assert_eq!(head.len(), 100);
    }

    #[test]
    fn corruption_is_detected() {
        let mut s = MarkovStream::new();
        s.by_ref().take(20).for_each(drop);
        let blob = checkpoint(&s);
        let mut bad = blob.clone();
        bad[HEADER_LEN + 3] ^= 0x40;
        assert_eq!(restore(&bad), Err(Error::CheckpointCorrupt("checksum mismatch")));
        assert!(matches!(restore(&blob[..blob.len() - 1]), Err(Error::CheckpointCorrupt(_))));
        assert!(matches!(restore(b"garbage"), Err(Error::CheckpointCorrupt(_))));
    }

    #[test]
    fn version_mismatch_is_distinct() {
        let mut blob = checkpoint(&MarkovStream::new());
        blob[8] = 9;
        assert_eq!(
            restore(&blob),
            Err(Error::CheckpointVersion { found: 9, expected: VERSION })
        );
    }

    #[test]
    fn ceiling_survives() {
        let mut s = MarkovStream::with_ceiling(1000u32.into());
        s.by_ref().take(4).for_each(drop);
        let b = restore(&checkpoint(&s)).unwrap();
        assert_eq!(b.ceiling(), Some(&1000u32.into()));
        assert_eq!(b.collect::<Vec<_>>(), s.collect::<Vec<_>>());
    }
}

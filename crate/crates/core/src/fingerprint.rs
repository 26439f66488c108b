//! Content digests, token trigram fingerprints and trigram similarity.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};
use sha1::{Digest as _, Sha1};

use crate::error::CoreError;
use crate::lex::TokenStream;
use crate::model::Digest;
use crate::scalar::Scalar;

/// Multiset of 3-token windows, each window hashed to a 64-bit key.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrigramFingerprint {
    /// `(key, multiplicity)` sorted by key, multiplicities nonzero.
    pub trigrams: Vec<(u64, u32)>,
    /// Total window count, `max(token_count - 2, 0)`.
    pub cardinality: u64,
    pub token_count: usize,
}

impl TrigramFingerprint {
    pub fn is_empty(&self) -> bool {
        self.trigrams.is_empty()
    }

    pub fn distinct(&self) -> u64 {
        self.trigrams.len() as u64
    }

    /// Size under the given overlap semantics.
    pub fn size(&self, overlap: Overlap) -> u64 {
        match overlap {
            Overlap::Multiset => self.cardinality,
            Overlap::Set => self.distinct(),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.trigrams.iter().map(|&(k, _)| k)
    }
}

/// Whether repeated trigram windows count once or with multiplicity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overlap {
    #[default]
    Multiset,
    Set,
}

impl fmt::Display for Overlap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overlap::Multiset => "multiset",
            Overlap::Set => "set",
        })
    }
}

impl FromStr for Overlap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multiset" => Ok(Overlap::Multiset),
            "set" => Ok(Overlap::Set),
            other => Err(format!("unknown overlap semantics {other:?} (multiset or set)")),
        }
    }
}

pub fn trigram_key(window: &[String]) -> u64 {
    let mut hasher = FnvHasher::default();
    for token in window {
        hasher.write(token.as_bytes());
        // 0xff never occurs in UTF-8, so token boundaries are unambiguous.
        hasher.write_u8(0xff);
    }
    hasher.finish()
}

pub fn fingerprint(stream: &TokenStream) -> TrigramFingerprint {
    let mut keys: Vec<u64> = stream.tokens.windows(3).map(trigram_key).collect();
    keys.sort_unstable();
    let cardinality = keys.len() as u64;
    let mut trigrams: Vec<(u64, u32)> = Vec::new();
    for key in keys {
        match trigrams.last_mut() {
            Some((k, n)) if *k == key => *n += 1,
            _ => trigrams.push((key, 1)),
        }
    }
    TrigramFingerprint {
        trigrams,
        cardinality,
        token_count: stream.tokens.len(),
    }
}

/// SHA-1 of the raw bytes.
pub fn digest(content: &[u8]) -> Digest {
    let out = Sha1::digest(content);
    let mut bytes = [0u8; 20];
    bytes.copy_from_slice(&out);
    Digest(bytes)
}

/// `(|A ∩ B|, |A ∪ B|)` using min/max multiplicities, or plain set
/// intersection/union under [`Overlap::Set`].
pub fn overlap_counts(a: &TrigramFingerprint, b: &TrigramFingerprint, overlap: Overlap) -> (u64, u64) {
    let (mut i, mut j) = (0, 0);
    let (mut inter, mut union) = (0u64, 0u64);
    let weight = |n: u32| match overlap {
        Overlap::Multiset => n as u64,
        Overlap::Set => 1,
    };
    while i < a.trigrams.len() && j < b.trigrams.len() {
        let (ka, na) = a.trigrams[i];
        let (kb, nb) = b.trigrams[j];
        match ka.cmp(&kb) {
            Ordering::Less => {
                union += weight(na);
                i += 1;
            }
            Ordering::Greater => {
                union += weight(nb);
                j += 1;
            }
            Ordering::Equal => {
                inter += weight(na.min(nb));
                union += weight(na.max(nb));
                i += 1;
                j += 1;
            }
        }
    }
    union += a.trigrams[i..].iter().map(|&(_, n)| weight(n)).sum::<u64>();
    union += b.trigrams[j..].iter().map(|&(_, n)| weight(n)).sum::<u64>();
    (inter, union)
}

/// Jaccard similarity of two fingerprints.
///
/// Two empty fingerprints compare as 1 when both files have the same token
/// count (below three), and 0 otherwise.
pub fn similarity<S: Scalar>(a: &TrigramFingerprint, b: &TrigramFingerprint, overlap: Overlap) -> S {
    if a.is_empty() && b.is_empty() {
        return if a.token_count == b.token_count && a.token_count < 3 {
            S::one()
        } else {
            S::zero()
        };
    }
    let (inter, union) = overlap_counts(a, b, overlap);
    S::from_ratio(inter, union)
}

/// Upper bound on [`similarity`] from sizes alone: `min / max`.
pub fn size_bound<S: Scalar>(a: u64, b: u64) -> S {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi == 0 {
        S::one()
    } else {
        S::from_ratio(lo, hi)
    }
}

/// Parses a threshold and checks it lies in `(0, 1]`.
pub fn parse_threshold<S: Scalar>(value: f64) -> Result<S, CoreError> {
    S::from_f64(value)
        .filter(|t| t.is_unit_threshold())
        .ok_or_else(|| CoreError::InvalidThreshold(value.to_string()))
}

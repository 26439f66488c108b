use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::fingerprint::{self, Overlap};
use crate::model::{Digest, ExtensionMap, ProjectId, SnapshotId};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Identical,
    Similar,
}

/// One destination file paired with the origin file it was copied from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FileCorrespondence<S: Scalar = f64> {
    pub dest_path: String,
    pub origin_path: String,
    pub kind: MatchKind,
    pub similarity: S,
    pub dest_digest: Digest,
    pub origin_digest: Digest,
}

impl<S: Scalar> FileCorrespondence<S> {
    pub fn is_identical(&self) -> bool {
        self.kind == MatchKind::Identical
    }
}

/// A snapshot of one producer proposed as the origin of part of a query
/// snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateOrigin<S: Scalar = f64> {
    pub producer: ProjectId,
    pub origin: SnapshotId,
    pub origin_tag: String,
    pub origin_time: i64,
    /// Sorted by destination path.
    pub correspondences: Vec<FileCorrespondence<S>>,
}

impl<S: Scalar> CandidateOrigin<S> {
    pub fn n_files(&self) -> usize {
        self.correspondences.len()
    }

    pub fn n_identical(&self) -> usize {
        self.correspondences.iter().filter(|c| c.is_identical()).count()
    }

    /// Sort key: larger file sets, then more identical files, then older
    /// snapshots first; producer id and tag break what remains.
    pub fn rank(&self) -> (Reverse<usize>, Reverse<usize>, i64, &ProjectId, &str) {
        (
            Reverse(self.n_files()),
            Reverse(self.n_identical()),
            self.origin_time,
            &self.producer,
            &self.origin_tag,
        )
    }
}

/// A clone-and-own relation from an origin snapshot to a destination
/// snapshot. Serializes in the report's link schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CloneLink<S: Scalar = f64> {
    pub producer: ProjectId,
    pub origin_tag: String,
    pub origin_time: i64,
    pub consumer: ProjectId,
    pub dest_tag: String,
    pub dest_time: i64,
    pub files: Vec<FileCorrespondence<S>>,
}

impl<S: Scalar> CloneLink<S> {
    pub fn link_time(&self) -> i64 {
        self.dest_time
    }

    pub fn n_files(&self) -> usize {
        self.files.len()
    }

    pub fn n_identical(&self) -> usize {
        self.files.iter().filter(|c| c.is_identical()).count()
    }

    pub(crate) fn sort_key(&self) -> (i64, &ProjectId, &str, &ProjectId, &str) {
        (
            self.dest_time,
            &self.consumer,
            &self.dest_tag,
            &self.producer,
            &self.origin_tag,
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Producer id, then tag name, both lexicographic.
    #[default]
    ProducerThenTag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DetectionConfig<S: Scalar = f64> {
    pub similarity_threshold: S,
    pub min_files: usize,
    pub overlap: Overlap,
    pub extensions: ExtensionMap,
    pub tie_break: TieBreak,
}

impl<S: Scalar> Default for DetectionConfig<S> {
    fn default() -> Self {
        DetectionConfig {
            similarity_threshold: S::from_ratio(4, 5),
            min_files: 20,
            overlap: Overlap::Multiset,
            extensions: ExtensionMap::default(),
            tie_break: TieBreak::ProducerThenTag,
        }
    }
}

impl<S: Scalar> DetectionConfig<S> {
    pub fn with_threshold(mut self, value: f64) -> Result<Self, CoreError> {
        self.similarity_threshold = fingerprint::parse_threshold(value)?;
        Ok(self)
    }

    pub fn with_min_files(mut self, min_files: usize) -> Self {
        self.min_files = min_files;
        self
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if !self.similarity_threshold.is_unit_threshold() {
            return Err(CoreError::InvalidThreshold(self.similarity_threshold.to_string()));
        }
        if self.min_files == 0 {
            return Err(CoreError::InvalidMinFiles);
        }
        Ok(())
    }
}

//! Reconstruction of software supply chain maps: directed networks of
//! clone-and-own file set reuse between version-controlled projects.
//!
//! Files are tokenized ([`lex`]), reduced to token trigram fingerprints
//! ([`fingerprint`]) and indexed corpus-wide ([`index`]). [`detect`] finds the
//! origin snapshot of every reused file set, and [`chain`] assembles the
//! resulting links into maps and computes network metrics over them.
//!
//! Similarity scores are generic over [`Scalar`]; the aliases below fix the
//! common choices.

pub mod chain;
pub mod detect;
pub mod error;
pub mod fingerprint;
pub mod index;
pub mod lex;
pub mod model;
pub mod scalar;

pub use error::CoreError;
pub use fingerprint::{Overlap, TrigramFingerprint};
pub use index::{CorpusIndex, FileOccurrence};
pub use model::{
    Corpus, CorpusBuilder, Digest, ExtensionMap, FileRecord, FingerprintId, Language, Project,
    ProjectId, Snapshot, SnapshotId,
};
pub use scalar::{Exact, Scalar};

/// Detection settings with `f64` scores.
pub type Config = detect::DetectionConfig<f64>;
/// Detection settings with exact rational scores.
pub type ExactConfig = detect::DetectionConfig<Exact>;
/// Detection settings with `f32` scores.
pub type ConfigF32 = detect::DetectionConfig<f32>;

pub type Report = detect::DetectionReport<f64>;
pub type ExactReport = detect::DetectionReport<Exact>;
pub type ReportF32 = detect::DetectionReport<f32>;

pub type Link = detect::CloneLink<f64>;
pub type ExactLink = detect::CloneLink<Exact>;

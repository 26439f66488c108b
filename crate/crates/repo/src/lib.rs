//! Corpus construction for supply chain analysis: manifests, tagged
//! snapshots read from Git repositories, and synthetic ecosystems with
//! planted clone-and-own operations.

pub mod error;
pub mod git;
pub mod ingest;
pub mod manifest;
pub mod synth;

pub use error::RepoError;
pub use ingest::{enumerate_snapshots, ingest, read_blob, Ingested, ProjectSummary, SnapshotListing};
pub use manifest::{enumerate_projects, Manifest, ManifestWarning};

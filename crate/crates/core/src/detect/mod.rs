//! Clone-and-own origin detection.
//!
//! For each tagged snapshot the search runs in three stages: gather earlier
//! snapshots of other projects that share identical or similar files, keep the
//! best candidate per producer, and give each destination file to a single
//! producer. The resulting temporal links are then filtered against the
//! consumer's own history, returning reuse and a minimum file set size.

pub mod audit;
pub mod candidates;
pub mod history;
pub mod report;
pub mod suspicious;
pub mod types;

pub use audit::{AuditEntry, Rule};
pub use candidates::{resolve_overlaps, select_project_winner, Detector};
pub use history::SelfHistory;
pub use report::{detect_all, Detection, DetectionReport, StepCount, SweepRow};
pub use suspicious::prune_suspicious;
pub use types::{CandidateOrigin, CloneLink, DetectionConfig, FileCorrespondence, MatchKind, TieBreak};

use thiserror::Error;

use crate::model::{Digest, ProjectId};

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("unknown language {0:?} (expected c, cpp or java)")]
    UnknownLanguage(String),
    #[error("duplicate project id {0}")]
    DuplicateProject(ProjectId),
    #[error("snapshot references unknown project {0}")]
    UnknownProject(ProjectId),
    #[error("duplicate snapshot {project}@{tag}")]
    DuplicateSnapshot { project: ProjectId, tag: String },
    #[error("snapshot {project}@{tag} lists {path} twice")]
    DuplicatePath {
        project: ProjectId,
        tag: String,
        path: String,
    },
    #[error("no fingerprint stored for digest {0}")]
    MissingFingerprint(Digest),
    #[error("similarity threshold must lie in (0, 1], got {0}")]
    InvalidThreshold(String),
    #[error("min_files must be at least 1")]
    InvalidMinFiles,
    #[error("unsupported export format {0:?} (supported: json, dot, csv)")]
    UnknownFormat(String),
    #[error("unsupported map schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

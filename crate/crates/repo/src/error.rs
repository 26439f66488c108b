use std::path::PathBuf;

use scmap_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("cannot read manifest {path}: {source}")]
    ManifestRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest {path}, row {row}: {message}")]
    ManifestParse {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("duplicate project ids in manifest: {}", format_duplicates(.0))]
    DuplicateIds(Vec<(String, Vec<usize>)>),
    #[error("git {command} failed in {repo}: {message}")]
    Git {
        repo: PathBuf,
        command: String,
        message: String,
    },
    #[error("{path} does not exist in snapshot {project}@{tag}")]
    MissingPath {
        project: String,
        tag: String,
        path: String,
    },
    #[error("plan operation {index}: {message}")]
    PlanOperation { index: usize, message: String },
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("report and ground truth describe different corpora: {0}")]
    CorpusMismatch(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_duplicates(dups: &[(String, Vec<usize>)]) -> String {
    dups.iter()
        .map(|(id, rows)| {
            let rows: Vec<String> = rows.iter().map(|r| r.to_string()).collect();
            format!("{id:?} at rows {}", rows.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

//! Corpus manifests: which repositories make up a corpus.
//!
//! Three layouts are accepted, told apart by the first non-blank character:
//! a JSON array of `{id, name, repo_path}` objects, one such object per line,
//! or tab-separated `id name repo_path` rows with an optional header. `name`
//! defaults to the id; relative repository paths are resolved against the
//! manifest's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use scmap_core::Project;
use serde::Deserialize;

use crate::error::RepoError;

#[derive(Debug, Deserialize)]
struct Row {
    id: String,
    #[serde(default)]
    name: Option<String>,
    repo_path: PathBuf,
}

/// A manifest row that was not turned into a project.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestWarning {
    /// 1-based row number.
    pub row: usize,
    pub id: String,
    pub repo_path: PathBuf,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct Manifest {
    pub projects: Vec<Project>,
    pub warnings: Vec<ManifestWarning>,
}

/// Reads a manifest. Rows whose repository directory is missing are reported
/// as warnings and left out; duplicate ids are fatal.
pub fn enumerate_projects(path: &Path) -> Result<Manifest, RepoError> {
    let text = fs::read_to_string(path).map_err(|source| RepoError::ManifestRead {
        path: path.to_owned(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let rows = parse(&text, path)?;

    let mut seen: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (row, r) in &rows {
        seen.entry(r.id.as_str()).or_default().push(*row);
    }
    let duplicates: Vec<(String, Vec<usize>)> = seen
        .into_iter()
        .filter(|(_, rows)| rows.len() > 1)
        .map(|(id, rows)| (id.to_owned(), rows))
        .collect();
    if !duplicates.is_empty() {
        return Err(RepoError::DuplicateIds(duplicates));
    }

    let mut manifest = Manifest::default();
    for (row, r) in rows {
        let repo_path = if r.repo_path.is_absolute() {
            r.repo_path.clone()
        } else {
            base.join(&r.repo_path)
        };
        if !repo_path.is_dir() {
            log::warn!("manifest row {row}: repository {} for {} not found", repo_path.display(), r.id);
            manifest.warnings.push(ManifestWarning {
                row,
                id: r.id,
                repo_path,
                reason: "repository directory not found".into(),
            });
            continue;
        }
        manifest.projects.push(Project {
            id: r.id.as_str().into(),
            name: r.name.unwrap_or(r.id),
            repo_path,
        });
    }
    Ok(manifest)
}

fn parse(text: &str, path: &Path) -> Result<Vec<(usize, Row)>, RepoError> {
    let err = |row: usize, message: String| RepoError::ManifestParse {
        path: path.to_owned(),
        row,
        message,
    };
    match text.trim_start().chars().next() {
        None => Ok(Vec::new()),
        Some('[') => {
            let rows: Vec<Row> = serde_json::from_str(text).map_err(|e| err(0, e.to_string()))?;
            Ok(rows.into_iter().enumerate().map(|(i, r)| (i + 1, r)).collect())
        }
        Some('{') => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l)
                    .map(|r| (i + 1, r))
                    .map_err(|e| err(i + 1, e.to_string()))
            })
            .collect(),
        Some(_) => {
            let mut reader = csv::ReaderBuilder::new()
                .delimiter(b'\t')
                .has_headers(false)
                .flexible(true)
                .comment(Some(b'#'))
                .from_reader(text.as_bytes());
            let mut rows = Vec::new();
            for record in reader.records() {
                let record = record.map_err(|e| err(0, e.to_string()))?;
                let row = record.position().map_or(0, |p| p.line() as usize);
                let fields: Vec<&str> = record.iter().map(str::trim).collect();
                if fields.iter().all(|f| f.is_empty()) || fields.first() == Some(&"id") && rows.is_empty() {
                    continue;
                }
                let (id, name, repo) = match fields.as_slice() {
                    [id, repo] => (*id, None, *repo),
                    [id, name, repo] => (*id, Some(name.to_string()), *repo),
                    _ => return Err(err(row, format!("expected 2 or 3 tab-separated fields, got {}", fields.len()))),
                };
                if id.is_empty() || repo.is_empty() {
                    return Err(err(row, "empty id or repo_path".into()));
                }
                rows.push((
                    row,
                    Row {
                        id: id.to_owned(),
                        name: name.filter(|n| !n.is_empty()),
                        repo_path: PathBuf::from(repo),
                    },
                ));
            }
            Ok(rows)
        }
    }
}

//! Tagged snapshots and source files of a corpus of repositories.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use scmap_core::fingerprint::{self, TrigramFingerprint};
use scmap_core::lex;
use scmap_core::model::{DraftFile, SnapshotDraft};
use scmap_core::{Corpus, CorpusBuilder, Digest, ExtensionMap, Language, Project, Snapshot};
use serde::{Deserialize, Serialize};

use crate::error::RepoError;
use crate::git::GitRepo;

/// Snapshots of one project, before fingerprint ids are assigned.
#[derive(Debug, Default)]
pub struct SnapshotListing {
    pub drafts: Vec<SnapshotDraft>,
    /// One entry per distinct (digest, language).
    pub fingerprints: Vec<(Digest, Language, TrigramFingerprint)>,
    pub warnings: Vec<String>,
}

/// Reads every tag of `project`'s repository. Tags naming the same commit
/// yield one snapshot under the lexicographically smallest tag; tags that
/// don't lead to a commit and snapshots without matching source files are
/// skipped.
pub fn enumerate_snapshots(project: &Project, extensions: &ExtensionMap) -> Result<SnapshotListing, RepoError> {
    let repo = GitRepo::open(&project.repo_path)?;
    let mut listing = SnapshotListing::default();
    let (tags, unresolved) = repo.resolve_tags()?;
    for tag in unresolved {
        listing.warnings.push(format!("{}: tag {tag} does not name a commit", project.id));
    }

    let mut by_commit: BTreeMap<String, (String, i64)> = BTreeMap::new();
    for t in tags {
        // Tags arrive sorted, so the first tag seen for a commit is the smallest.
        by_commit.entry(t.commit).or_insert((t.tag, t.commit_time));
    }
    let mut commits: Vec<(String, String, i64)> = by_commit
        .into_iter()
        .map(|(commit, (tag, time))| (commit, tag, time))
        .collect();
    commits.sort_by(|a, b| (a.2, &a.1).cmp(&(b.2, &b.1)));

    let mut batch = repo.cat_file()?;
    // Blob contents already seen, keyed by blob id and language.
    let mut seen: HashMap<(String, Language), (Digest, usize)> = HashMap::new();
    let mut fingerprints: BTreeMap<(Digest, Language), TrigramFingerprint> = BTreeMap::new();
    for (commit, tag, commit_time) in commits {
        if commit_time <= 0 {
            listing
                .warnings
                .push(format!("{}: tag {tag} has non-positive commit time {commit_time}", project.id));
            continue;
        }
        let mut files = Vec::new();
        let mut fresh = Vec::new();
        for entry in repo.tree(&commit)? {
            let Some(language) = extensions.language_of(&entry.path) else {
                continue;
            };
            let key = (entry.blob.clone(), language);
            if !seen.contains_key(&key) {
                let blob = batch.get(&entry.blob)?.ok_or_else(|| RepoError::MissingPath {
                    project: project.id.to_string(),
                    tag: tag.clone(),
                    path: entry.path.clone(),
                })?;
                fresh.push((key.clone(), blob.data));
                // Reserve the key so repeated blobs in one tree are read once.
                seen.insert(key.clone(), (Digest([0; 20]), 0));
            }
            files.push((entry.path, key));
        }
        let computed: Vec<_> = fresh
            .into_par_iter()
            .map(|(key, bytes)| {
                let stream = lex::tokenize(&bytes, key.1);
                let fp = fingerprint::fingerprint(&stream);
                (key, fingerprint::digest(&bytes), stream.tokens.len(), fp)
            })
            .collect();
        for (key, digest, tokens, fp) in computed {
            fingerprints.entry((digest, key.1)).or_insert(fp);
            seen.insert(key, (digest, tokens));
        }
        if files.is_empty() {
            log::debug!("{}: tag {tag} has no source files", project.id);
            continue;
        }
        let files = files
            .into_iter()
            .map(|(path, key)| {
                let (digest, token_count) = seen[&key];
                DraftFile {
                    path,
                    digest,
                    language: key.1,
                    token_count,
                }
            })
            .collect();
        listing.drafts.push(SnapshotDraft {
            project_id: project.id.clone(),
            tag,
            commit,
            commit_time,
            files,
        });
    }
    listing.fingerprints = fingerprints
        .into_iter()
        .map(|((digest, language), fp)| (digest, language, fp))
        .collect();
    Ok(listing)
}

/// Bytes of `path` in a snapshot.
pub fn read_blob(project: &Project, snapshot: &Snapshot, path: &str) -> Result<Vec<u8>, RepoError> {
    let repo = GitRepo::open(&project.repo_path)?;
    let missing = || RepoError::MissingPath {
        project: project.id.to_string(),
        tag: snapshot.tag.clone(),
        path: path.to_owned(),
    };
    let obj = repo
        .cat_file()?
        .get(&format!("{}:{path}", snapshot.commit))?
        .ok_or_else(missing)?;
    if obj.kind != "blob" {
        return Err(missing());
    }
    Ok(obj.data)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectSummary {
    pub id: String,
    pub snapshots: usize,
    /// Files summed over snapshots.
    pub files: usize,
    pub unique_files: usize,
}

#[derive(Debug)]
pub struct Ingested {
    pub corpus: Corpus,
    pub summaries: Vec<ProjectSummary>,
    /// Skipped tags and projects that could not be read.
    pub warnings: Vec<String>,
}

/// Enumerates all projects in parallel and assembles the corpus. A project
/// whose repository can't be read is left out with a warning. Projects
/// without any snapshot are kept in the corpus but contribute nothing.
pub fn ingest(projects: &[Project], extensions: &ExtensionMap) -> Result<Ingested, RepoError> {
    let listings: Vec<_> = projects
        .par_iter()
        .map(|p| (p, enumerate_snapshots(p, extensions)))
        .collect();

    let mut builder = CorpusBuilder::new();
    let mut summaries = Vec::new();
    let mut warnings = Vec::new();
    for (project, listing) in listings {
        let listing = match listing {
            Ok(l) => l,
            Err(e) => {
                let message = format!("{}: skipped: {e}", project.id);
                log::warn!("{message}");
                warnings.push(message);
                continue;
            }
        };
        for w in &listing.warnings {
            log::warn!("{w}");
        }
        warnings.extend(listing.warnings);
        let unique: BTreeSet<Digest> = listing
            .drafts
            .iter()
            .flat_map(|d| d.files.iter().map(|f| f.digest))
            .collect();
        summaries.push(ProjectSummary {
            id: project.id.to_string(),
            snapshots: listing.drafts.len(),
            files: listing.drafts.iter().map(|d| d.files.len()).sum(),
            unique_files: unique.len(),
        });
        builder.add_project(project.clone());
        for (digest, language, fp) in listing.fingerprints {
            builder.add_fingerprint(digest, language, fp);
        }
        for draft in listing.drafts {
            builder.add_draft(draft);
        }
    }
    summaries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Ingested {
        corpus: builder.build()?,
        summaries,
        warnings,
    })
}

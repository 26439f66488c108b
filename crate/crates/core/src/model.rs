//! Projects, tagged snapshots and the files they contain.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CoreError;
use crate::fingerprint::{self, TrigramFingerprint};
use crate::lex;

/// Corpus-unique project identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectId(pub String);

impl ProjectId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProjectId {
    fn from(s: &str) -> Self {
        ProjectId(s.to_owned())
    }
}

impl From<String> for ProjectId {
    fn from(s: String) -> Self {
        ProjectId(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub id: ProjectId,
    pub name: String,
    pub repo_path: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Language {
    C,
    Cpp,
    Java,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::C, Language::Cpp, Language::Java];

    pub fn as_str(self) -> &'static str {
        match self {
            Language::C => "c",
            Language::Cpp => "cpp",
            Language::Java => "java",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c" => Ok(Language::C),
            "cpp" | "c++" | "cxx" => Ok(Language::Cpp),
            "java" => Ok(Language::Java),
            _ => Err(CoreError::UnknownLanguage(s.to_owned())),
        }
    }
}

impl Serialize for Language {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Language {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// File extension (without the dot, lower case) to source language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtensionMap(BTreeMap<String, Language>);

impl Default for ExtensionMap {
    fn default() -> Self {
        let pairs = [
            ("c", Language::C),
            ("h", Language::C),
            ("cc", Language::Cpp),
            ("cpp", Language::Cpp),
            ("cxx", Language::Cpp),
            ("hpp", Language::Cpp),
            ("hh", Language::Cpp),
            ("java", Language::Java),
        ];
        ExtensionMap(pairs.into_iter().map(|(e, l)| (e.to_owned(), l)).collect())
    }
}

impl ExtensionMap {
    pub fn new(entries: impl IntoIterator<Item = (String, Language)>) -> Self {
        ExtensionMap(
            entries
                .into_iter()
                .map(|(e, l)| (e.trim_start_matches('.').to_ascii_lowercase(), l))
                .collect(),
        )
    }

    /// Default map restricted to the given languages.
    pub fn for_languages(languages: &[Language]) -> Self {
        let mut map = Self::default();
        map.0.retain(|_, l| languages.contains(l));
        map
    }

    pub fn language_of(&self, path: &str) -> Option<Language> {
        let name = path.rsplit('/').next().unwrap_or(path);
        let (stem, ext) = name.rsplit_once('.')?;
        if stem.is_empty() {
            return None;
        }
        self.0.get(&ext.to_ascii_lowercase()).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Language)> {
        self.0.iter().map(|(e, l)| (e.as_str(), *l))
    }
}

/// 160-bit SHA-1 digest of a file's raw bytes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub [u8; 20]);

impl Digest {
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<Digest> {
        if s.len() != 40 || !s.is_ascii() {
            return None;
        }
        let mut out = [0u8; 20];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok()?;
        }
        Some(Digest(out))
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Digest::from_hex(&s).ok_or_else(|| serde::de::Error::custom(format!("bad digest {s:?}")))
    }
}

/// Index into a [`FingerprintStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FingerprintId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub digest: Digest,
    pub language: Language,
    pub fingerprint_id: FingerprintId,
    pub token_count: usize,
}

/// Tagged state of one project.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub project_id: ProjectId,
    pub tag: String,
    /// Commit the tag resolves to (hex object id, or any stable label for
    /// in-memory corpora).
    pub commit: String,
    /// Committer time of the tagged commit, seconds since the epoch.
    pub commit_time: i64,
    /// Sorted by path, paths unique.
    pub files: Vec<FileRecord>,
}

impl Snapshot {
    pub fn file(&self, path: &str) -> Option<&FileRecord> {
        self.files
            .binary_search_by(|f| f.path.as_str().cmp(path))
            .ok()
            .map(|i| &self.files[i])
    }
}

/// Position of a snapshot inside [`Corpus::snapshots`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SnapshotId(pub u32);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoredFingerprint {
    pub digest: Digest,
    pub fingerprint: TrigramFingerprint,
}

/// Trigram fingerprints, one per unique file digest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<StoredFingerprint>", into = "Vec<StoredFingerprint>")]
pub struct FingerprintStore {
    entries: Vec<StoredFingerprint>,
    by_digest: HashMap<Digest, FingerprintId>,
}

impl From<Vec<StoredFingerprint>> for FingerprintStore {
    fn from(mut entries: Vec<StoredFingerprint>) -> Self {
        entries.sort_by(|a, b| a.digest.cmp(&b.digest));
        entries.dedup_by(|a, b| a.digest == b.digest);
        let by_digest = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.digest, FingerprintId(i as u32)))
            .collect();
        FingerprintStore { entries, by_digest }
    }
}

impl From<FingerprintStore> for Vec<StoredFingerprint> {
    fn from(store: FingerprintStore) -> Self {
        store.entries
    }
}

impl FingerprintStore {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: FingerprintId) -> &TrigramFingerprint {
        &self.entries[id.0 as usize].fingerprint
    }

    pub fn digest(&self, id: FingerprintId) -> Digest {
        self.entries[id.0 as usize].digest
    }

    pub fn id_of(&self, digest: &Digest) -> Option<FingerprintId> {
        self.by_digest.get(digest).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FingerprintId, &StoredFingerprint)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (FingerprintId(i as u32), e))
    }
}

/// A file of a snapshot before fingerprint ids are assigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DraftFile {
    pub path: String,
    pub digest: Digest,
    pub language: Language,
    pub token_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapshotDraft {
    pub project_id: ProjectId,
    pub tag: String,
    pub commit: String,
    pub commit_time: i64,
    pub files: Vec<DraftFile>,
}

/// Everything detection needs: projects, their tagged snapshots and the
/// fingerprint of every unique file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub projects: Vec<Project>,
    /// Sorted by project id, then commit time, then tag.
    pub snapshots: Vec<Snapshot>,
    pub fingerprints: FingerprintStore,
}

impl Corpus {
    pub fn snapshot(&self, id: SnapshotId) -> &Snapshot {
        &self.snapshots[id.0 as usize]
    }

    pub fn snapshot_ids(&self) -> impl Iterator<Item = SnapshotId> {
        (0..self.snapshots.len() as u32).map(SnapshotId)
    }

    pub fn project(&self, id: &ProjectId) -> Option<&Project> {
        self.projects.iter().find(|p| &p.id == id)
    }

    pub fn find_snapshot(&self, project: &ProjectId, tag: &str) -> Option<SnapshotId> {
        self.snapshots
            .iter()
            .position(|s| &s.project_id == project && s.tag == tag)
            .map(|i| SnapshotId(i as u32))
    }

    /// Number of distinct file digests.
    pub fn unique_files(&self) -> usize {
        self.fingerprints.len()
    }

    /// Projects that own at least one snapshot.
    pub fn projects_with_snapshots(&self) -> usize {
        let mut n = 0;
        let mut last: Option<&ProjectId> = None;
        for s in &self.snapshots {
            if last != Some(&s.project_id) {
                n += 1;
                last = Some(&s.project_id);
            }
        }
        n
    }

    /// Stable digest over the corpus contents, used to validate caches.
    pub fn content_key(&self) -> Digest {
        let mut text = String::new();
        for s in &self.snapshots {
            text.push_str(&format!("{}\0{}\0{}\0{}\n", s.project_id, s.tag, s.commit, s.commit_time));
            for f in &s.files {
                text.push_str(&format!("{}\0{}\n", f.path, f.digest));
            }
        }
        fingerprint::digest(text.as_bytes())
    }
}

/// Assembles a [`Corpus`] from snapshot drafts and per-digest fingerprints.
///
/// Fingerprint ids are assigned in digest order, so the result does not depend
/// on the order drafts were added in.
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    projects: Vec<Project>,
    drafts: Vec<SnapshotDraft>,
    fingerprints: BTreeMap<Digest, (Language, TrigramFingerprint)>,
}

impl CorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_project(&mut self, project: Project) -> &mut Self {
        self.projects.push(project);
        self
    }

    pub fn add_fingerprint(&mut self, digest: Digest, language: Language, fp: TrigramFingerprint) {
        // Same bytes under two languages: keep the lowest language so the
        // outcome is independent of insertion order.
        match self.fingerprints.get(&digest) {
            Some((existing, _)) if *existing <= language => {}
            _ => {
                self.fingerprints.insert(digest, (language, fp));
            }
        }
    }

    pub fn add_draft(&mut self, draft: SnapshotDraft) -> &mut Self {
        self.drafts.push(draft);
        self
    }

    /// Tokenizes and fingerprints `files` directly. Registers the project on
    /// first use with `repo_path` left empty.
    pub fn add_snapshot_bytes<P, B>(
        &mut self,
        project: &str,
        tag: &str,
        commit_time: i64,
        files: impl IntoIterator<Item = (P, B)>,
    ) -> &mut Self
    where
        P: AsRef<str>,
        B: AsRef<[u8]>,
    {
        let extensions = ExtensionMap::default();
        if !self.projects.iter().any(|p| p.id.as_str() == project) {
            self.projects.push(Project {
                id: project.into(),
                name: project.to_owned(),
                repo_path: PathBuf::new(),
            });
        }
        let mut draft_files = Vec::new();
        for (path, bytes) in files {
            let path = path.as_ref();
            let bytes = bytes.as_ref();
            let language = extensions.language_of(path).unwrap_or(Language::C);
            let stream = lex::tokenize(bytes, language);
            let fp = fingerprint::fingerprint(&stream);
            let digest = fingerprint::digest(bytes);
            draft_files.push(DraftFile {
                path: path.to_owned(),
                digest,
                language,
                token_count: stream.tokens.len(),
            });
            self.add_fingerprint(digest, language, fp);
        }
        self.drafts.push(SnapshotDraft {
            project_id: project.into(),
            tag: tag.to_owned(),
            commit: format!("{project}@{tag}"),
            commit_time,
            files: draft_files,
        });
        self
    }

    pub fn build(self) -> Result<Corpus, CoreError> {
        let CorpusBuilder {
            mut projects,
            mut drafts,
            fingerprints,
        } = self;
        projects.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in projects.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(CoreError::DuplicateProject(pair[0].id.clone()));
            }
        }
        let store = FingerprintStore::from(
            fingerprints
                .into_iter()
                .map(|(digest, (_, fingerprint))| StoredFingerprint {
                    digest,
                    fingerprint,
                })
                .collect::<Vec<_>>(),
        );
        drafts.sort_by(|a, b| {
            (&a.project_id, a.commit_time, &a.tag).cmp(&(&b.project_id, b.commit_time, &b.tag))
        });
        for pair in drafts.windows(2) {
            if pair[0].project_id == pair[1].project_id && pair[0].tag == pair[1].tag {
                return Err(CoreError::DuplicateSnapshot {
                    project: pair[0].project_id.clone(),
                    tag: pair[0].tag.clone(),
                });
            }
        }
        let mut snapshots = Vec::with_capacity(drafts.len());
        for draft in drafts {
            if projects.binary_search_by(|p| p.id.cmp(&draft.project_id)).is_err() {
                return Err(CoreError::UnknownProject(draft.project_id));
            }
            let mut files = Vec::with_capacity(draft.files.len());
            for f in draft.files {
                let fingerprint_id = store
                    .id_of(&f.digest)
                    .ok_or(CoreError::MissingFingerprint(f.digest))?;
                files.push(FileRecord {
                    path: f.path,
                    digest: f.digest,
                    language: f.language,
                    fingerprint_id,
                    token_count: f.token_count,
                });
            }
            files.sort_by(|a, b| a.path.cmp(&b.path));
            if let Some(pair) = files.windows(2).find(|w| w[0].path == w[1].path) {
                return Err(CoreError::DuplicatePath {
                    project: draft.project_id,
                    tag: draft.tag,
                    path: pair[0].path.clone(),
                });
            }
            snapshots.push(Snapshot {
                project_id: draft.project_id,
                tag: draft.tag,
                commit: draft.commit,
                commit_time: draft.commit_time,
                files,
            });
        }
        Ok(Corpus {
            projects,
            snapshots,
            fingerprints: store,
        })
    }
}

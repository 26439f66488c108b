use std::collections::{BTreeSet, HashMap, HashSet};

use scmap_core::Language;
use serde::{Deserialize, Serialize};

use crate::error::RepoError;
use crate::synth::source::MutationKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcosystemPlan {
    pub seed: u64,
    pub projects: Vec<ProjectPlan>,
    #[serde(default)]
    pub operations: Vec<Operation>,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub expect: Expectation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectPlan {
    pub id: String,
    #[serde(default = "default_language")]
    pub language: Language,
    pub snapshots: Vec<SnapshotPlan>,
    /// Own files in the first snapshot.
    #[serde(default = "default_initial_files")]
    pub initial_files: usize,
    /// Own files added by every later snapshot.
    #[serde(default = "default_files_added")]
    pub files_added: usize,
    /// Fraction of own files edited by every later snapshot.
    #[serde(default = "default_edit_fraction")]
    pub edit_fraction: f64,
    /// Inclusive range of statements per generated file.
    #[serde(default = "default_statements")]
    pub statements: (usize, usize),
}

fn default_language() -> Language {
    Language::C
}
fn default_initial_files() -> usize {
    30
}
fn default_files_added() -> usize {
    2
}
fn default_edit_fraction() -> f64 {
    0.2
}
fn default_statements() -> (usize, usize) {
    (12, 24)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotPlan {
    pub tag: String,
    /// Committer timestamp, seconds since the epoch.
    pub time: i64,
    #[serde(default)]
    pub annotated: bool,
    /// Extra tags on the same commit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
}

impl SnapshotPlan {
    /// The tag ingestion keeps: the smallest of the snapshot's tags.
    pub fn canonical_tag(&self) -> &str {
        self.aliases.iter().map(String::as_str).fold(self.tag.as_str(), |a, b| a.min(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SnapshotRef {
    pub project: String,
    pub tag: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpRole {
    #[default]
    Planted,
    /// An older, smaller copy from the same producer meant to compete with a
    /// planted operation.
    Decoy,
    /// Incidental small overlap.
    Noise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operation {
    pub origin: SnapshotRef,
    pub consumer: SnapshotRef,
    pub n_files: usize,
    /// Per mutated file: expected fraction of tokens or lines touched.
    #[serde(default)]
    pub mutation_rate: f64,
    /// Fraction of the copied files that are mutated.
    #[serde(default = "default_mutated_fraction")]
    pub mutated_fraction: f64,
    #[serde(default)]
    pub mutation_kind: MutationKind,
    /// Copy files the origin project itself received before its own.
    #[serde(default)]
    pub include_received: bool,
    /// Prefer the origin paths selected by an earlier operation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub files_like: Option<usize>,
    /// Mutations are toned down until every mutated file keeps at least this
    /// similarity to its origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_similarity: Option<f64>,
    #[serde(default)]
    pub role: OpRole,
}

fn default_mutated_fraction() -> f64 {
    1.0
}

impl Operation {
    pub fn copy(origin: (&str, &str), consumer: (&str, &str), n_files: usize) -> Self {
        Operation {
            origin: SnapshotRef {
                project: origin.0.into(),
                tag: origin.1.into(),
            },
            consumer: SnapshotRef {
                project: consumer.0.into(),
                tag: consumer.1.into(),
            },
            n_files,
            mutation_rate: 0.0,
            mutated_fraction: 1.0,
            mutation_kind: MutationKind::Substitute,
            include_received: false,
            files_like: None,
            min_similarity: None,
            role: OpRole::Planted,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Extra unrelated files in every project's first snapshot.
    #[serde(default)]
    pub random_files: usize,
    /// Small copies between random projects, added by the generator.
    #[serde(default)]
    pub incidental_overlaps: usize,
    #[serde(default = "default_incidental_size")]
    pub incidental_size: usize,
}

fn default_incidental_size() -> usize {
    3
}

/// Detection settings under which planted links are judged detectable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub min_files: usize,
    pub similarity_threshold: f64,
}

impl Default for Expectation {
    fn default() -> Self {
        Expectation {
            min_files: 20,
            similarity_threshold: 0.8,
        }
    }
}

impl EcosystemPlan {
    pub fn from_json(text: &str) -> Result<Self, RepoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String, RepoError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn project(&self, id: &str) -> Option<&ProjectPlan> {
        self.projects.iter().find(|p| p.id == id)
    }

    pub fn snapshot(&self, r: &SnapshotRef) -> Option<(usize, &SnapshotPlan)> {
        self.project(&r.project)?
            .snapshots
            .iter()
            .enumerate()
            .find(|(_, s)| s.tag == r.tag)
    }

    pub fn validate(&self) -> Result<(), RepoError> {
        let mut ids = HashSet::new();
        for p in &self.projects {
            if p.id.is_empty() || p.id.contains(['/', '\t', '\n']) {
                return Err(RepoError::Plan(format!("unusable project id {:?}", p.id)));
            }
            if !ids.insert(&p.id) {
                return Err(RepoError::Plan(format!("duplicate project id {}", p.id)));
            }
            if p.snapshots.is_empty() {
                return Err(RepoError::Plan(format!("{} has no snapshots", p.id)));
            }
            if p.initial_files == 0 {
                return Err(RepoError::Plan(format!("{} starts without files", p.id)));
            }
            if !(0.0..=1.0).contains(&p.edit_fraction) {
                return Err(RepoError::Plan(format!("{}: edit_fraction outside [0, 1]", p.id)));
            }
            if p.statements.0 == 0 || p.statements.0 > p.statements.1 {
                return Err(RepoError::Plan(format!("{}: bad statement range", p.id)));
            }
            let mut tags = HashSet::new();
            for (i, s) in p.snapshots.iter().enumerate() {
                for t in std::iter::once(&s.tag).chain(&s.aliases) {
                    if !tags.insert(t) {
                        return Err(RepoError::Plan(format!("{}: tag {t} used twice", p.id)));
                    }
                }
                if s.time <= 0 {
                    return Err(RepoError::Plan(format!("{}@{}: time must be positive", p.id, s.tag)));
                }
                if i > 0 && s.time <= p.snapshots[i - 1].time {
                    return Err(RepoError::Plan(format!("{}@{}: snapshot times must increase", p.id, s.tag)));
                }
            }
        }
        for (index, op) in self.operations.iter().enumerate() {
            let fail = |message: String| Err(RepoError::PlanOperation { index, message });
            let Some((_, origin)) = self.snapshot(&op.origin) else {
                return fail(format!("unknown origin {}@{}", op.origin.project, op.origin.tag));
            };
            let Some((_, dest)) = self.snapshot(&op.consumer) else {
                return fail(format!("unknown consumer {}@{}", op.consumer.project, op.consumer.tag));
            };
            if op.origin.project == op.consumer.project {
                return fail("origin and consumer are the same project".into());
            }
            if origin.time >= dest.time {
                return fail(format!(
                    "consumer time {} is not after origin time {}",
                    dest.time, origin.time
                ));
            }
            if op.n_files == 0 {
                return fail("n_files must be at least 1".into());
            }
            if !(0.0..=1.0).contains(&op.mutation_rate) || !(0.0..=1.0).contains(&op.mutated_fraction) {
                return fail("mutation_rate and mutated_fraction must lie in [0, 1]".into());
            }
            if op.min_similarity.is_some_and(|s| !(s > 0.0 && s <= 1.0)) {
                return fail("min_similarity must lie in (0, 1]".into());
            }
            if op.files_like.is_some_and(|j| j >= index) {
                return fail("files_like must name an earlier operation".into());
            }
        }
        if self.expect.min_files == 0 || !(self.expect.similarity_threshold > 0.0 && self.expect.similarity_threshold <= 1.0) {
            return Err(RepoError::Plan("bad detection expectation".into()));
        }
        Ok(())
    }
}

/// Keeps copy operations from making origins ambiguous: no project pair is
/// used twice or in both directions, the two ends of an operation never
/// share a producer, and no two projects share more than one producer.
/// Otherwise a project holding copies from two producers can outnumber
/// either producer as a candidate origin for another project holding the
/// same copies.
#[derive(Clone, Debug, Default)]
pub struct PairRules {
    edges: BTreeSet<(String, String)>,
    received: HashMap<String, BTreeSet<String>>,
}

impl PairRules {
    pub fn from_operations<'a>(ops: impl IntoIterator<Item = &'a Operation>) -> Self {
        let mut rules = PairRules::default();
        for op in ops {
            rules.add(&op.origin.project, &op.consumer.project);
        }
        rules
    }

    fn add(&mut self, producer: &str, consumer: &str) {
        self.edges.insert((producer.to_owned(), consumer.to_owned()));
        self.received.entry(consumer.to_owned()).or_default().insert(producer.to_owned());
    }

    pub fn allows(&self, producer: &str, consumer: &str) -> bool {
        if producer == consumer
            || self.edges.contains(&(producer.to_owned(), consumer.to_owned()))
            || self.edges.contains(&(consumer.to_owned(), producer.to_owned()))
        {
            return false;
        }
        let mut trial = self.clone();
        trial.add(producer, consumer);
        let empty = BTreeSet::new();
        let edges_ok = trial.edges.iter().all(|(a, b)| {
            let ra = trial.received.get(a).unwrap_or(&empty);
            let rb = trial.received.get(b).unwrap_or(&empty);
            ra.is_disjoint(rb)
        });
        let mine = &trial.received[consumer];
        edges_ok
            && trial
                .received
                .iter()
                .filter(|(other, _)| other.as_str() != consumer)
                .all(|(_, theirs)| mine.intersection(theirs).count() <= 1)
    }

    /// Records the pair if allowed.
    pub fn try_add(&mut self, producer: &str, consumer: &str) -> bool {
        let ok = self.allows(producer, consumer);
        if ok {
            self.add(producer, consumer);
        }
        ok
    }
}

use scmap_core::detect::MatchKind;
use scmap_core::{Digest, ProjectId};
use serde::{Deserialize, Serialize};

use crate::error::RepoError;
use crate::synth::plan::OpRole;

pub const TRUTH_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthFile {
    pub dest_path: String,
    pub origin_path: String,
    pub kind: MatchKind,
    pub dest_digest: Digest,
    pub origin_digest: Digest,
}

/// A planted copy, in the report's link layout without similarity values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthLink {
    pub producer: ProjectId,
    pub origin_tag: String,
    pub origin_time: i64,
    pub consumer: ProjectId,
    pub dest_tag: String,
    pub dest_time: i64,
    pub files: Vec<TruthFile>,
    /// Index into the plan's operations (generated noise comes last).
    pub operation: usize,
    pub role: OpRole,
    pub expected_detectable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub undetectable_reason: Option<String>,
}

impl TruthLink {
    pub fn n_files(&self) -> usize {
        self.files.len()
    }
}

/// One copied file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantRecord {
    pub operation: usize,
    pub consumer: ProjectId,
    pub dest_tag: String,
    pub dest_path: String,
    pub origin_path: String,
    pub mutated: bool,
    /// Multiset trigram similarity to the origin file.
    pub similarity: f64,
}

/// One generated tagged snapshot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedSnapshot {
    pub project: ProjectId,
    /// The tag ingestion is expected to report.
    pub tag: String,
    pub all_tags: Vec<String>,
    pub commit_time: i64,
    pub annotated: bool,
    pub n_files: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub schema_version: u32,
    pub seed: u64,
    pub projects: Vec<ProjectId>,
    pub snapshots: Vec<PlantedSnapshot>,
    pub links: Vec<TruthLink>,
    pub plants: Vec<PlantRecord>,
}

impl GroundTruth {
    pub fn to_json(&self) -> Result<String, RepoError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, RepoError> {
        let truth: GroundTruth = serde_json::from_str(text)?;
        if truth.schema_version != TRUTH_SCHEMA_VERSION {
            return Err(RepoError::Plan(format!(
                "ground truth schema version {} (expected {TRUTH_SCHEMA_VERSION})",
                truth.schema_version
            )));
        }
        Ok(truth)
    }

    pub fn detectable(&self) -> impl Iterator<Item = &TruthLink> {
        self.links.iter().filter(|l| l.expected_detectable)
    }
}

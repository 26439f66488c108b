use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::audit::AuditEntry;
use crate::detect::candidates::Detector;
use crate::detect::history::SelfHistory;
use crate::detect::suspicious;
use crate::detect::types::{CloneLink, DetectionConfig, FileCorrespondence};
use crate::error::CoreError;
use crate::index::CorpusIndex;
use crate::model::{Corpus, Digest, ProjectId};
use crate::scalar::Scalar;

/// One row of the stepwise table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCount {
    pub step: String,
    /// Projects taking part in at least one link (step 0: projects with
    /// tagged source files).
    pub n_projects: usize,
    /// `None` for step 0.
    pub n_links: Option<usize>,
    /// Correspondences summed over links (step 0: unique files).
    pub n_files: usize,
    /// Distinct destination digests.
    pub n_unique_files: usize,
}

/// Producer, consumer and destination digests of one link at some step.
#[derive(Clone, Debug)]
pub struct StepLink {
    pub producer: ProjectId,
    pub consumer: ProjectId,
    pub files: Vec<Digest>,
}

impl StepLink {
    pub fn of<S: Scalar>(producer: &ProjectId, consumer: &ProjectId, files: &[FileCorrespondence<S>]) -> Self {
        StepLink {
            producer: producer.clone(),
            consumer: consumer.clone(),
            files: files.iter().map(|c| c.dest_digest).collect(),
        }
    }
}

fn count<'a>(step: &str, links: impl IntoIterator<Item = &'a StepLink>) -> StepCount {
    let mut projects = HashSet::new();
    let mut digests = HashSet::new();
    let (mut n_links, mut n_files) = (0, 0);
    for l in links {
        n_links += 1;
        n_files += l.files.len();
        projects.insert(&l.producer);
        projects.insert(&l.consumer);
        digests.extend(l.files.iter().copied());
    }
    StepCount {
        step: step.to_owned(),
        n_projects: projects.len(),
        n_links: Some(n_links),
        n_files,
        n_unique_files: digests.len(),
    }
}

fn count_links<S: Scalar>(step: &str, links: &[CloneLink<S>]) -> StepCount {
    let summary: Vec<StepLink> = links
        .iter()
        .map(|l| StepLink::of(&l.producer, &l.consumer, &l.files))
        .collect();
    count(step, &summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct DetectionReport<S: Scalar = f64> {
    pub config: DetectionConfig<S>,
    pub stepwise: Vec<StepCount>,
    pub links: Vec<CloneLink<S>>,
}

impl<S: Scalar> DetectionReport<S> {
    pub fn to_json(&self) -> Result<String, CoreError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CoreError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Result of a full detection run.
#[derive(Clone, Debug)]
pub struct Detection<S: Scalar = f64> {
    pub report: DetectionReport<S>,
    /// Everything removed along the way, in pipeline order.
    pub audit: Vec<AuditEntry>,
    /// Links after Step 5 rule 1, before the file-count minimum.
    pub before_min_files: Vec<CloneLink<S>>,
}

/// Row of a minimum-file-count sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub min_files: usize,
    pub n_projects: usize,
    pub n_links: usize,
}

impl<S: Scalar> Detection<S> {
    /// Re-applies only the final size rule at each threshold.
    pub fn sweep(&self, thresholds: impl IntoIterator<Item = usize>) -> Vec<SweepRow> {
        thresholds
            .into_iter()
            .map(|min_files| {
                let kept: Vec<_> = self
                    .before_min_files
                    .iter()
                    .filter(|l| l.n_files() >= min_files)
                    .collect();
                let projects: HashSet<_> = kept
                    .iter()
                    .flat_map(|l| [&l.producer, &l.consumer])
                    .collect();
                SweepRow {
                    min_files,
                    n_projects: projects.len(),
                    n_links: kept.len(),
                }
            })
            .collect()
    }
}

/// Steps 1 to 5 over every tagged snapshot of the corpus.
pub fn detect_all<S: Scalar>(corpus: &Corpus, config: DetectionConfig<S>) -> Result<Detection<S>, CoreError> {
    config.validate()?;
    let index = CorpusIndex::build(corpus, config.overlap)?;
    let detector = Detector::new(&index, config.clone());

    let per_snapshot: Vec<_> = corpus
        .snapshot_ids()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|sid| {
            let mut audit = Vec::new();
            let outcome = detector.search(sid, &mut audit);
            (outcome, audit)
        })
        .collect();

    let mut audit = Vec::new();
    let mut step1 = Vec::new();
    let mut step2 = Vec::new();
    let mut temporal = Vec::new();
    for (outcome, entries) in per_snapshot {
        step1.extend(outcome.step1);
        step2.extend(outcome.step2);
        temporal.extend(outcome.links);
        audit.extend(entries);
    }

    let mut stepwise = vec![StepCount {
        step: "0".into(),
        n_projects: corpus.projects_with_snapshots(),
        n_links: None,
        n_files: corpus.unique_files(),
        n_unique_files: corpus.unique_files(),
    }];
    stepwise.push(count("1", &step1));
    stepwise.push(count("2", &step2));
    stepwise.push(count_links("3", &temporal));

    let history = SelfHistory::new(&index);
    let pruned: Vec<_> = temporal
        .into_par_iter()
        .map(|link| {
            let mut entries = Vec::new();
            let link = history.prune(link, &mut entries);
            (link, entries)
        })
        .collect();
    let mut links = Vec::new();
    for (link, entries) in pruned {
        audit.extend(entries);
        if !link.files.is_empty() {
            links.push(link);
        }
    }
    stepwise.push(count_links("4", &links));

    let links = suspicious::remove_returning(links, &mut audit);
    stepwise.push(count_links("5-1", &links));
    let before_min_files = links.clone();
    let mut links = suspicious::remove_small(links, config.min_files, &mut audit);
    stepwise.push(count_links("5-2", &links));

    links.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    for entry in &audit {
        log::debug!("{entry}");
    }
    Ok(Detection {
        report: DetectionReport {
            config,
            stepwise,
            links,
        },
        audit,
        before_min_files,
    })
}

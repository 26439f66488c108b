//! Removal of correspondences explained by the consumer's own history.

use std::collections::HashMap;

use crate::detect::audit::{AuditEntry, Rule};
use crate::detect::types::CloneLink;
use crate::index::CorpusIndex;
use crate::model::{Digest, ProjectId, SnapshotId};
use crate::scalar::Scalar;

/// Tagged-snapshot history of every project.
pub struct SelfHistory<'c> {
    index: &'c CorpusIndex<'c>,
    /// Snapshots of each project in commit-time order.
    timelines: HashMap<&'c ProjectId, Vec<SnapshotId>>,
}

impl<'c> SelfHistory<'c> {
    pub fn new(index: &'c CorpusIndex<'c>) -> Self {
        let corpus = index.corpus();
        let mut timelines: HashMap<&ProjectId, Vec<SnapshotId>> = HashMap::new();
        for sid in corpus.snapshot_ids() {
            timelines.entry(&corpus.snapshot(sid).project_id).or_default().push(sid);
        }
        for list in timelines.values_mut() {
            list.sort_by_key(|&sid| {
                let s = corpus.snapshot(sid);
                (s.commit_time, s.tag.as_str())
            });
        }
        SelfHistory { index, timelines }
    }

    /// True when a file with this digest occurs in a snapshot of `project`
    /// committed strictly before `before`.
    pub fn occurs_before(&self, project: &ProjectId, digest: &Digest, before: i64) -> bool {
        match self.index.corpus().fingerprints.id_of(digest) {
            Some(id) => self.index.occurrences_in(id, project, before).next().is_some(),
            None => false,
        }
    }

    /// Content of the earliest tagged occurrence of `path` in `project`,
    /// ignoring snapshots after `until`.
    pub fn earliest_at_path(&self, project: &ProjectId, path: &str, until: i64) -> Option<Digest> {
        let corpus = self.index.corpus();
        self.timelines
            .get(project)?
            .iter()
            .map(|&sid| corpus.snapshot(sid))
            .take_while(|s| s.commit_time <= until)
            .find_map(|s| s.file(path).map(|f| f.digest))
    }

    /// Step 4. Drops every correspondence whose destination file more likely
    /// came from the consumer's own past:
    ///
    /// * the destination content already existed in an earlier consumer
    ///   snapshot (for identical pairs predating the origin this is case I;
    ///   otherwise the destination is an unchanged update of its own file);
    /// * case II: a similar pair whose origin content appeared earlier in the
    ///   consumer;
    /// * case III: a similar pair whose origin file started out, at the same
    ///   producer path, as content that appeared earlier in the consumer.
    pub fn prune<S: Scalar>(&self, mut link: CloneLink<S>, audit: &mut Vec<AuditEntry>) -> CloneLink<S> {
        let consumer = link.consumer.clone();
        let origin = (link.producer.clone(), link.origin_tag.clone());
        let dest = (link.consumer.clone(), link.dest_tag.clone());
        let (origin_time, dest_time) = (link.origin_time, link.dest_time);
        link.files.retain(|c| {
            let rule = if self.occurs_before(&consumer, &c.dest_digest, dest_time) {
                if c.is_identical() && self.occurs_before(&consumer, &c.dest_digest, origin_time) {
                    Some(Rule::PreexistingIdentical)
                } else {
                    Some(Rule::OwnUpdate)
                }
            } else if c.is_identical() {
                None
            } else if self.occurs_before(&consumer, &c.origin_digest, dest_time) {
                Some(Rule::PreexistingOrigin)
            } else {
                self.earliest_at_path(&origin.0, &c.origin_path, origin_time)
                    .filter(|ancestor| self.occurs_before(&consumer, ancestor, dest_time))
                    .map(|_| Rule::TransferredBack)
            };
            if let Some(rule) = rule {
                audit.push(
                    AuditEntry::new("4", rule, (&origin.0, &origin.1), (&dest.0, &dest.1))
                        .path(&c.dest_path),
                );
            }
            rule.is_none()
        });
        link
    }
}

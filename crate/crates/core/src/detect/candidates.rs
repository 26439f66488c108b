//! Per-snapshot origin search: collect candidates, pick one winner per
//! producer, and settle destination files claimed by several producers.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use crate::detect::audit::{AuditEntry, Rule};
use crate::detect::report::StepLink;
use crate::detect::types::{CandidateOrigin, CloneLink, DetectionConfig, FileCorrespondence, MatchKind};
use crate::index::CorpusIndex;
use crate::model::{FingerprintId, SnapshotId};
use crate::scalar::Scalar;

/// Corpus index plus a lazily filled table of similar fingerprints, shared by
/// all query snapshots.
pub struct Detector<'c, S: Scalar> {
    index: &'c CorpusIndex<'c>,
    config: DetectionConfig<S>,
    similar: Vec<OnceLock<Vec<(FingerprintId, S)>>>,
}

struct Pair<S> {
    dest: usize,
    origin: usize,
    kind: MatchKind,
    similarity: S,
}

impl<'c, S: Scalar> Detector<'c, S> {
    pub fn new(index: &'c CorpusIndex<'c>, config: DetectionConfig<S>) -> Self {
        let n = index.corpus().fingerprints.len();
        Detector {
            index,
            config,
            similar: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn index(&self) -> &'c CorpusIndex<'c> {
        self.index
    }

    pub fn config(&self) -> &DetectionConfig<S> {
        &self.config
    }

    fn similar_to(&self, id: FingerprintId) -> &[(FingerprintId, S)] {
        self.similar[id.0 as usize].get_or_init(|| {
            let fp = self.index.corpus().fingerprints.get(id);
            self.index.similar_fingerprints(fp, self.config.similarity_threshold)
        })
    }

    /// Step 1. Every earlier snapshot of another project holding an identical
    /// or similar file becomes a candidate; inside a candidate each query file
    /// pairs with at most one origin file and vice versa, identical pairs
    /// first, then by descending similarity, then by path.
    pub fn collect_candidates(&self, query: SnapshotId) -> Vec<CandidateOrigin<S>> {
        let corpus = self.index.corpus();
        let snap = corpus.snapshot(query);
        let mut by_snapshot: BTreeMap<SnapshotId, Vec<Pair<S>>> = BTreeMap::new();
        for (dest, file) in snap.files.iter().enumerate() {
            for &(id, similarity) in self.similar_to(file.fingerprint_id) {
                let (kind, similarity) = if id == file.fingerprint_id {
                    (MatchKind::Identical, S::one())
                } else {
                    (MatchKind::Similar, similarity)
                };
                for occ in self
                    .index
                    .occurrences_of(id, snap.commit_time, Some(&snap.project_id))
                {
                    let origin_snap = corpus.snapshot(occ.snapshot);
                    let origin = origin_snap
                        .files
                        .binary_search_by(|f| f.path.as_str().cmp(occ.path))
                        .expect("occurrence path present in its snapshot");
                    by_snapshot.entry(occ.snapshot).or_default().push(Pair {
                        dest,
                        origin,
                        kind,
                        similarity,
                    });
                }
            }
        }

        by_snapshot
            .into_iter()
            .map(|(sid, mut pairs)| {
                let origin_snap = corpus.snapshot(sid);
                pairs.sort_by(|a, b| {
                    a.kind
                        .cmp(&b.kind)
                        .then_with(|| b.similarity.partial_cmp(&a.similarity).unwrap())
                        .then_with(|| snap.files[a.dest].path.cmp(&snap.files[b.dest].path))
                        .then_with(|| {
                            origin_snap.files[a.origin].path.cmp(&origin_snap.files[b.origin].path)
                        })
                });
                let mut used_dest = HashSet::new();
                let mut used_origin = HashSet::new();
                let mut correspondences = Vec::new();
                for p in pairs {
                    if used_dest.contains(&p.dest) || used_origin.contains(&p.origin) {
                        continue;
                    }
                    used_dest.insert(p.dest);
                    used_origin.insert(p.origin);
                    let d = &snap.files[p.dest];
                    let o = &origin_snap.files[p.origin];
                    correspondences.push(FileCorrespondence {
                        dest_path: d.path.clone(),
                        origin_path: o.path.clone(),
                        kind: p.kind,
                        similarity: p.similarity,
                        dest_digest: d.digest,
                        origin_digest: o.digest,
                    });
                }
                correspondences.sort_by(|a, b| a.dest_path.cmp(&b.dest_path));
                CandidateOrigin {
                    producer: origin_snap.project_id.clone(),
                    origin: sid,
                    origin_tag: origin_snap.tag.clone(),
                    origin_time: origin_snap.commit_time,
                    correspondences,
                }
            })
            .collect()
    }

    /// Steps 1 to 3 for one query snapshot. Returns the Step-1 candidates,
    /// the Step-2 winners and the temporal links left after Step 3.
    pub fn search(&self, query: SnapshotId, audit: &mut Vec<AuditEntry>) -> SearchOutcome<S> {
        let corpus = self.index.corpus();
        let snap = corpus.snapshot(query);
        let candidates = self.collect_candidates(query);

        let mut by_producer: BTreeMap<_, Vec<CandidateOrigin<S>>> = BTreeMap::new();
        for c in &candidates {
            by_producer.entry(c.producer.clone()).or_default().push(c.clone());
        }
        let mut winners = Vec::new();
        for (_, group) in by_producer {
            let winner = select_project_winner(&group).clone();
            for lost in group.iter().filter(|c| c.origin != winner.origin) {
                audit.push(
                    AuditEntry::new(
                        "2",
                        Rule::C2C3C4,
                        (&lost.producer, &lost.origin_tag),
                        (&snap.project_id, &snap.tag),
                    )
                    .detail(format!("lost to {}@{}", winner.producer, winner.origin_tag)),
                );
            }
            winners.push(winner);
        }

        let step2: Vec<StepLink> = winners
            .iter()
            .map(|w| StepLink::of(&w.producer, &snap.project_id, &w.correspondences))
            .collect();
        let resolved = resolve_overlaps(winners, |loser, winner, path| {
            audit.push(
                AuditEntry::new(
                    "3",
                    Rule::C5,
                    (&loser.producer, &loser.origin_tag),
                    (&snap.project_id, &snap.tag),
                )
                .path(path)
                .detail(format!("claimed by {}@{}", winner.producer, winner.origin_tag)),
            );
        });
        SearchOutcome {
            step1: candidates
                .iter()
                .map(|c| StepLink::of(&c.producer, &snap.project_id, &c.correspondences))
                .collect(),
            step2,
            links: resolved.iter().map(|w| self.to_link(query, w)).collect(),
        }
    }

    fn to_link(&self, query: SnapshotId, c: &CandidateOrigin<S>) -> CloneLink<S> {
        let snap = self.index.corpus().snapshot(query);
        CloneLink {
            producer: c.producer.clone(),
            origin_tag: c.origin_tag.clone(),
            origin_time: c.origin_time,
            consumer: snap.project_id.clone(),
            dest_tag: snap.tag.clone(),
            dest_time: snap.commit_time,
            files: c.correspondences.clone(),
        }
    }
}

pub struct SearchOutcome<S: Scalar> {
    pub step1: Vec<StepLink>,
    pub step2: Vec<StepLink>,
    /// Temporal links after Step 3.
    pub links: Vec<CloneLink<S>>,
}

/// Step 2. The first candidate by [`CandidateOrigin::rank`]. `candidates`
/// must be nonempty.
pub fn select_project_winner<S: Scalar>(candidates: &[CandidateOrigin<S>]) -> &CandidateOrigin<S> {
    candidates
        .iter()
        .min_by(|a, b| a.rank().cmp(&b.rank()))
        .expect("select_project_winner needs at least one candidate")
}

/// Step 3. Each destination file claimed by several winners stays with the
/// best-ranked one; winners left without files are dropped. `on_loss` sees
/// every reassigned file as `(loser, winner, dest_path)`.
pub fn resolve_overlaps<S: Scalar>(
    mut winners: Vec<CandidateOrigin<S>>,
    mut on_loss: impl FnMut(&CandidateOrigin<S>, &CandidateOrigin<S>, &str),
) -> Vec<CandidateOrigin<S>> {
    winners.sort_by(|a, b| a.rank().cmp(&b.rank()));
    let mut owner: BTreeMap<String, usize> = BTreeMap::new();
    for (i, w) in winners.iter().enumerate() {
        for c in &w.correspondences {
            owner.entry(c.dest_path.clone()).or_insert(i);
        }
    }
    let mut kept = Vec::new();
    for (i, w) in winners.iter().enumerate() {
        let mut w2 = w.clone();
        w2.correspondences.retain(|c| {
            let o = owner[&c.dest_path];
            if o != i {
                on_loss(w, &winners[o], &c.dest_path);
            }
            o == i
        });
        if !w2.correspondences.is_empty() {
            kept.push(w2);
        }
    }
    kept.sort_by(|a, b| (&a.producer, &a.origin_tag).cmp(&(&b.producer, &b.origin_tag)));
    kept
}

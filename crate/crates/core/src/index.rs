//! Corpus-wide lookup of identical and similar files.
//!
//! Identical files are found through the digest of their bytes. Similar files
//! go through an inverted trigram index with prefix filtering: trigram
//! elements are ordered rare-first, and only the shortest query prefix that
//! must share an element with any sufficiently similar file is probed. A
//! multiset is treated as the set of `(key, i)` pairs for `i` up to the key's
//! multiplicity, which makes multiset Jaccard an ordinary set Jaccard and keeps
//! the filter exact.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::CoreError;
use crate::fingerprint::{self, Overlap, TrigramFingerprint};
use crate::model::{Corpus, Digest, FingerprintId, ProjectId, SnapshotId};
use crate::scalar::Scalar;

/// Where one file occurs in the corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FileOccurrence<'c> {
    pub project_id: &'c ProjectId,
    pub snapshot: SnapshotId,
    pub tag: &'c str,
    pub commit_time: i64,
    pub path: &'c str,
    pub digest: Digest,
    pub fingerprint_id: FingerprintId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Occ {
    time: i64,
    project: u32,
    snapshot: SnapshotId,
    file: u32,
}

pub struct CorpusIndex<'c> {
    corpus: &'c Corpus,
    overlap: Overlap,
    project_ids: Vec<&'c ProjectId>,
    /// Per fingerprint, occurrences sorted by commit time.
    occurrences: Vec<Vec<Occ>>,
    /// Trigram key to `(fingerprint, multiplicity)`, sorted by multiplicity
    /// descending then id, so the holders of `(key, i)` form a prefix.
    postings: HashMap<u64, Vec<(FingerprintId, u32)>>,
    /// Fingerprints with no trigram, keyed by token count.
    short: HashMap<usize, Vec<FingerprintId>>,
}

impl<'c> CorpusIndex<'c> {
    pub fn build(corpus: &'c Corpus, overlap: Overlap) -> Result<Self, CoreError> {
        let mut project_ids: Vec<&ProjectId> = corpus.projects.iter().map(|p| &p.id).collect();
        project_ids.sort();
        let mut seen = std::collections::HashSet::new();
        for s in &corpus.snapshots {
            if !seen.insert((&s.project_id, s.tag.as_str())) {
                return Err(CoreError::DuplicateSnapshot {
                    project: s.project_id.clone(),
                    tag: s.tag.clone(),
                });
            }
        }

        let mut occurrences = vec![Vec::new(); corpus.fingerprints.len()];
        for sid in corpus.snapshot_ids() {
            let snap = corpus.snapshot(sid);
            let project = project_ids
                .binary_search(&&snap.project_id)
                .map_err(|_| CoreError::UnknownProject(snap.project_id.clone()))?
                as u32;
            for (i, f) in snap.files.iter().enumerate() {
                occurrences[f.fingerprint_id.0 as usize].push(Occ {
                    time: snap.commit_time,
                    project,
                    snapshot: sid,
                    file: i as u32,
                });
            }
        }
        occurrences.par_iter_mut().for_each(|list| list.sort_unstable());

        let mut postings: HashMap<u64, Vec<(FingerprintId, u32)>> = HashMap::new();
        let mut short: HashMap<usize, Vec<FingerprintId>> = HashMap::new();
        for (id, stored) in corpus.fingerprints.iter() {
            let fp = &stored.fingerprint;
            if fp.is_empty() {
                short.entry(fp.token_count).or_default().push(id);
            }
            for &(key, n) in &fp.trigrams {
                let n = match overlap {
                    Overlap::Multiset => n,
                    Overlap::Set => 1,
                };
                postings.entry(key).or_default().push((id, n));
            }
        }
        postings
            .par_iter_mut()
            .for_each(|(_, list)| list.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0))));

        Ok(CorpusIndex {
            corpus,
            overlap,
            project_ids,
            occurrences,
            postings,
            short,
        })
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn overlap(&self) -> Overlap {
        self.overlap
    }

    fn view(&self, occ: &Occ) -> FileOccurrence<'c> {
        let snap = self.corpus.snapshot(occ.snapshot);
        let file = &snap.files[occ.file as usize];
        FileOccurrence {
            project_id: &snap.project_id,
            snapshot: occ.snapshot,
            tag: &snap.tag,
            commit_time: snap.commit_time,
            path: &file.path,
            digest: file.digest,
            fingerprint_id: file.fingerprint_id,
        }
    }

    fn project_slot(&self, project: &ProjectId) -> Option<u32> {
        self.project_ids.binary_search(&project).ok().map(|i| i as u32)
    }

    /// Occurrences of a fingerprint strictly before `before`, outside `exclude`.
    pub fn occurrences_of(
        &self,
        id: FingerprintId,
        before: i64,
        exclude: Option<&ProjectId>,
    ) -> impl Iterator<Item = FileOccurrence<'c>> + '_ {
        let list = &self.occurrences[id.0 as usize];
        let end = list.partition_point(|o| o.time < before);
        let skip = exclude.and_then(|p| self.project_slot(p));
        list[..end]
            .iter()
            .filter(move |o| Some(o.project) != skip)
            .map(move |o| self.view(o))
    }

    /// Occurrences of a fingerprint inside one project strictly before `before`.
    pub fn occurrences_in(
        &self,
        id: FingerprintId,
        project: &ProjectId,
        before: i64,
    ) -> impl Iterator<Item = FileOccurrence<'c>> + '_ {
        let list = &self.occurrences[id.0 as usize];
        let end = list.partition_point(|o| o.time < before);
        let want = self.project_slot(project);
        list[..end]
            .iter()
            .filter(move |o| Some(o.project) == want)
            .map(move |o| self.view(o))
    }

    /// Files byte-identical to `digest` committed strictly before `before` in
    /// projects other than `exclude`.
    pub fn query_identical(
        &self,
        digest: &Digest,
        before: i64,
        exclude: &ProjectId,
    ) -> Vec<FileOccurrence<'c>> {
        match self.corpus.fingerprints.id_of(digest) {
            Some(id) => self.occurrences_of(id, before, Some(exclude)).collect(),
            None => Vec::new(),
        }
    }

    /// Stored fingerprints with similarity at least `threshold` to `fp`,
    /// sorted by id.
    pub fn similar_fingerprints<S: Scalar>(
        &self,
        fp: &TrigramFingerprint,
        threshold: S,
    ) -> Vec<(FingerprintId, S)> {
        let overlap = self.overlap;
        if fp.is_empty() {
            if fp.token_count >= 3 {
                return Vec::new();
            }
            return self
                .short
                .get(&fp.token_count)
                .map(|ids| ids.iter().map(|&id| (id, S::one())).collect())
                .unwrap_or_default();
        }

        let size = fp.size(overlap);
        // Smallest overlap any match needs: inter / |x| >= inter / union >= t.
        let min_overlap = smallest_count_reaching(size, threshold);
        if min_overlap == 0 {
            // Threshold too low to prune anything.
            let mut all: Vec<_> = self
                .corpus
                .fingerprints
                .iter()
                .filter_map(|(id, stored)| {
                    let s: S = fingerprint::similarity(fp, &stored.fingerprint, overlap);
                    (s >= threshold).then_some((id, s))
                })
                .collect();
            all.sort_by_key(|&(id, _)| id);
            return all;
        }
        let prefix_len = (size - min_overlap + 1) as usize;

        // Elements (key, i), rarest first.
        let mut elements: Vec<(usize, u64, u32)> = Vec::with_capacity(size as usize);
        for &(key, n) in &fp.trigrams {
            let reps = match overlap {
                Overlap::Multiset => n,
                Overlap::Set => 1,
            };
            let posting = self.postings.get(&key).map(Vec::as_slice).unwrap_or(&[]);
            for i in 1..=reps {
                let df = posting.partition_point(|&(_, m)| m >= i);
                elements.push((df, key, i));
            }
        }
        elements.sort_unstable();

        let mut candidates: Vec<FingerprintId> = Vec::new();
        for &(df, key, _) in elements.iter().take(prefix_len) {
            if df == 0 {
                continue;
            }
            candidates.extend(self.postings[&key][..df].iter().map(|&(id, _)| id));
        }
        candidates.sort_unstable();
        candidates.dedup();

        candidates
            .into_iter()
            .filter_map(|id| {
                let other = self.corpus.fingerprints.get(id);
                if fingerprint::size_bound::<S>(size, other.size(overlap)) < threshold {
                    return None;
                }
                let s: S = fingerprint::similarity(fp, other, overlap);
                (s >= threshold).then_some((id, s))
            })
            .collect()
    }

    /// Files with similarity at least `threshold` to `fp`, committed strictly
    /// before `before` outside `exclude`. Identical files are included.
    pub fn query_similar<S: Scalar>(
        &self,
        fp: &TrigramFingerprint,
        threshold: S,
        before: i64,
        exclude: &ProjectId,
    ) -> Vec<(FileOccurrence<'c>, S)> {
        let mut out = Vec::new();
        for (id, s) in self.similar_fingerprints(fp, threshold) {
            out.extend(self.occurrences_of(id, before, Some(exclude)).map(|o| (o, s)));
        }
        out.sort_by(|a, b| occurrence_order(&a.0, &b.0));
        out
    }
}

/// Commit time, then project, tag and path.
pub fn occurrence_order(a: &FileOccurrence<'_>, b: &FileOccurrence<'_>) -> std::cmp::Ordering {
    (a.commit_time, a.project_id, a.tag, a.path).cmp(&(b.commit_time, b.project_id, b.tag, b.path))
}

/// Smallest `k` in `0..=n` with `k / n >= t`.
fn smallest_count_reaching<S: Scalar>(n: u64, t: S) -> u64 {
    let (mut lo, mut hi) = (0u64, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if S::from_ratio(mid, n) >= t {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

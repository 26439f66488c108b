//! Brute-force origin detection over raw file bytes. Every pair of files is
//! compared directly with token-string trigrams; nothing is indexed, hashed
//! or cached.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};

use scmap_core::{lex, CorpusBuilder, Corpus, Language};

#[derive(Clone, Debug)]
pub struct RawSnapshot {
    pub project: String,
    pub tag: String,
    pub time: i64,
    pub files: Vec<(String, Vec<u8>)>,
}

#[derive(Clone, Debug, Default)]
pub struct RawCorpus {
    pub snapshots: Vec<RawSnapshot>,
}

impl RawCorpus {
    pub fn add(&mut self, project: &str, tag: &str, time: i64, files: &[(&str, &str)]) -> &mut Self {
        self.snapshots.push(RawSnapshot {
            project: project.into(),
            tag: tag.into(),
            time,
            files: files.iter().map(|(p, b)| (p.to_string(), b.as_bytes().to_vec())).collect(),
        });
        self
    }

    pub fn corpus(&self) -> Corpus {
        let mut b = CorpusBuilder::new();
        for s in &self.snapshots {
            b.add_snapshot_bytes(&s.project, &s.tag, s.time, s.files.iter().map(|(p, c)| (p, c)));
        }
        b.build().expect("raw corpus builds")
    }
}

/// Similarity as an unreduced fraction.
#[derive(Clone, Copy, Debug)]
pub struct Frac(pub u64, pub u64);

impl Frac {
    pub fn cmp(self, other: Frac) -> Ordering {
        (self.0 as u128 * other.1 as u128).cmp(&(other.0 as u128 * self.1 as u128))
    }

    pub fn eq(self, other: Frac) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

struct File {
    path: String,
    bytes: Vec<u8>,
    grams: BTreeMap<Vec<String>, u64>,
    tokens: usize,
}

fn language_of(path: &str) -> Language {
    if path.ends_with(".java") {
        Language::Java
    } else if [".cc", ".cpp", ".cxx", ".hpp", ".hh"].iter().any(|e| path.ends_with(e)) {
        Language::Cpp
    } else {
        Language::C
    }
}

impl File {
    fn new(path: &str, bytes: &[u8]) -> File {
        let tokens = lex::tokenize(bytes, language_of(path)).tokens;
        let mut grams = BTreeMap::new();
        for w in tokens.windows(3) {
            *grams.entry(w.to_vec()).or_insert(0) += 1;
        }
        File {
            path: path.into(),
            bytes: bytes.to_vec(),
            grams,
            tokens: tokens.len(),
        }
    }
}

/// Multiset trigram Jaccard. Files too short for a single trigram are equal
/// exactly when their token counts agree.
fn similarity(a: &File, b: &File) -> Frac {
    if a.grams.is_empty() && b.grams.is_empty() {
        return if a.tokens == b.tokens && a.tokens < 3 { Frac(1, 1) } else { Frac(0, 1) };
    }
    let keys: BTreeSet<&Vec<String>> = a.grams.keys().chain(b.grams.keys()).collect();
    let (mut inter, mut union) = (0, 0);
    for k in keys {
        let (x, y) = (a.grams.get(k).copied().unwrap_or(0), b.grams.get(k).copied().unwrap_or(0));
        inter += x.min(y);
        union += x.max(y);
    }
    Frac(inter, union)
}

struct Snap {
    project: String,
    tag: String,
    time: i64,
    files: Vec<File>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pair {
    pub dest_path: String,
    pub origin_path: String,
    pub identical: bool,
    /// Reduced numerator and denominator.
    pub similarity: (u64, u64),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    pub producer: String,
    pub origin_tag: String,
    pub origin_time: i64,
    pub files: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Link {
    pub producer: String,
    pub origin_tag: String,
    pub origin_time: i64,
    pub consumer: String,
    pub dest_tag: String,
    pub dest_time: i64,
    pub files: Vec<Pair>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn reduced(f: Frac) -> (u64, u64) {
    if f.0 == 0 {
        return (0, 1);
    }
    let g = gcd(f.0, f.1);
    (f.0 / g, f.1 / g)
}

pub struct Oracle {
    snaps: Vec<Snap>,
    /// Threshold as `num / den`.
    threshold: Frac,
    min_files: usize,
}

fn rank(c: &Candidate) -> (Reverse<usize>, Reverse<usize>, i64, String, String) {
    (
        Reverse(c.files.len()),
        Reverse(c.files.iter().filter(|p| p.identical).count()),
        c.origin_time,
        c.producer.clone(),
        c.origin_tag.clone(),
    )
}

impl Oracle {
    pub fn new(raw: &RawCorpus, threshold: (u64, u64), min_files: usize) -> Oracle {
        let snaps = raw
            .snapshots
            .iter()
            .map(|s| Snap {
                project: s.project.clone(),
                tag: s.tag.clone(),
                time: s.time,
                files: s.files.iter().map(|(p, b)| File::new(p, b)).collect(),
            })
            .collect();
        Oracle {
            snaps,
            threshold: Frac(threshold.0, threshold.1),
            min_files,
        }
    }

    fn find(&self, project: &str, tag: &str) -> usize {
        self.snaps
            .iter()
            .position(|s| s.project == project && s.tag == tag)
            .expect("known snapshot")
    }

    /// Every earlier file of another project at least as similar as the
    /// threshold: `(project, tag, path, similarity)`, sorted.
    pub fn similar_files(&self, project: &str, tag: &str, path: &str) -> Vec<(String, String, String, (u64, u64))> {
        let q = &self.snaps[self.find(project, tag)];
        let f = q.files.iter().find(|f| f.path == path).expect("known path");
        let mut out = Vec::new();
        for s in self.snaps.iter().filter(|s| s.project != q.project && s.time < q.time) {
            for o in &s.files {
                let sim = similarity(f, o);
                if sim.cmp(self.threshold) != Ordering::Less {
                    out.push((s.project.clone(), s.tag.clone(), o.path.clone(), reduced(sim)));
                }
            }
        }
        out.sort();
        out
    }

    /// Step 1 for one query snapshot, sorted by producer and tag.
    pub fn candidates(&self, project: &str, tag: &str) -> Vec<Candidate> {
        let q = &self.snaps[self.find(project, tag)];
        let mut out = Vec::new();
        for s in self.snaps.iter().filter(|s| s.project != q.project && s.time < q.time) {
            let mut pairs = Vec::new();
            for (di, d) in q.files.iter().enumerate() {
                for (oi, o) in s.files.iter().enumerate() {
                    let identical = d.bytes == o.bytes;
                    let sim = if identical { Frac(1, 1) } else { similarity(d, o) };
                    if identical || sim.cmp(self.threshold) != Ordering::Less {
                        pairs.push((di, oi, identical, sim));
                    }
                }
            }
            pairs.sort_by(|a, b| {
                b.2.cmp(&a.2)
                    .then_with(|| b.3.cmp(a.3))
                    .then_with(|| q.files[a.0].path.cmp(&q.files[b.0].path))
                    .then_with(|| s.files[a.1].path.cmp(&s.files[b.1].path))
            });
            let (mut used_d, mut used_o) = (BTreeSet::new(), BTreeSet::new());
            let mut files = Vec::new();
            for (di, oi, identical, sim) in pairs {
                if used_d.contains(&di) || used_o.contains(&oi) {
                    continue;
                }
                used_d.insert(di);
                used_o.insert(oi);
                files.push(Pair {
                    dest_path: q.files[di].path.clone(),
                    origin_path: s.files[oi].path.clone(),
                    identical,
                    similarity: reduced(sim),
                });
            }
            if !files.is_empty() {
                files.sort();
                out.push(Candidate {
                    producer: s.project.clone(),
                    origin_tag: s.tag.clone(),
                    origin_time: s.time,
                    files,
                });
            }
        }
        out.sort_by(|a, b| (&a.producer, &a.origin_tag).cmp(&(&b.producer, &b.origin_tag)));
        out
    }

    /// Steps 1 to 3 for one query snapshot.
    pub fn temporal_links(&self, project: &str, tag: &str) -> Vec<Link> {
        let q = &self.snaps[self.find(project, tag)];
        let mut by_producer: BTreeMap<String, Vec<Candidate>> = BTreeMap::new();
        for c in self.candidates(project, tag) {
            by_producer.entry(c.producer.clone()).or_default().push(c);
        }
        let mut winners: Vec<Candidate> = by_producer
            .into_values()
            .map(|group| group.into_iter().min_by_key(rank).unwrap())
            .collect();
        winners.sort_by_key(rank);
        let mut taken = BTreeSet::new();
        let mut links = Vec::new();
        for w in winners {
            let files: Vec<Pair> = w
                .files
                .into_iter()
                .filter(|p| taken.insert(p.dest_path.clone()))
                .collect();
            if !files.is_empty() {
                links.push(Link {
                    producer: w.producer,
                    origin_tag: w.origin_tag,
                    origin_time: w.origin_time,
                    consumer: q.project.clone(),
                    dest_tag: q.tag.clone(),
                    dest_time: q.time,
                    files,
                });
            }
        }
        links
    }

    fn bytes_of(&self, project: &str, tag: &str, path: &str) -> &[u8] {
        let s = &self.snaps[self.find(project, tag)];
        &s.files.iter().find(|f| f.path == path).unwrap().bytes
    }

    fn in_project_before(&self, project: &str, bytes: &[u8], before: i64) -> bool {
        self.snaps
            .iter()
            .filter(|s| s.project == project && s.time < before)
            .any(|s| s.files.iter().any(|f| f.bytes == bytes))
    }

    /// Content at `path` in the earliest snapshot of `project` holding that
    /// path, not looking past `until`.
    fn earliest_at(&self, project: &str, path: &str, until: i64) -> Option<&[u8]> {
        let mut history: Vec<&Snap> = self
            .snaps
            .iter()
            .filter(|s| s.project == project && s.time <= until)
            .collect();
        history.sort_by(|a, b| (a.time, &a.tag).cmp(&(b.time, &b.tag)));
        history
            .into_iter()
            .find_map(|s| s.files.iter().find(|f| f.path == path).map(|f| &f.bytes[..]))
    }

    /// Step 4 for one link.
    pub fn prune_history(&self, mut link: Link) -> Link {
        let files = std::mem::take(&mut link.files);
        for p in files {
            let dest = self.bytes_of(&link.consumer, &link.dest_tag, &p.dest_path);
            let origin = self.bytes_of(&link.producer, &link.origin_tag, &p.origin_path);
            let drop = self.in_project_before(&link.consumer, dest, link.dest_time)
                || (!p.identical
                    && (self.in_project_before(&link.consumer, origin, link.dest_time)
                        || self
                            .earliest_at(&link.producer, &p.origin_path, link.origin_time)
                            .is_some_and(|a| self.in_project_before(&link.consumer, a, link.dest_time))));
            if !drop {
                link.files.push(p);
            }
        }
        link
    }

    /// Steps 1 to 5 over the whole corpus, sorted.
    pub fn detect(&self) -> Vec<Link> {
        let mut links: Vec<Link> = self
            .snaps
            .iter()
            .flat_map(|s| self.temporal_links(&s.project, &s.tag))
            .map(|l| self.prune_history(l))
            .filter(|l| !l.files.is_empty())
            .collect();

        let first = |links: &[Link], p: &str, c: &str| {
            links
                .iter()
                .filter(|l| l.producer == p && l.consumer == c)
                .map(|l| l.dest_time)
                .min()
        };
        let keep: Vec<bool> = links
            .iter()
            .map(|l| {
                let forward = first(&links, &l.producer, &l.consumer).unwrap();
                match first(&links, &l.consumer, &l.producer) {
                    None => true,
                    Some(reverse) if forward < reverse => true,
                    Some(reverse) if forward == reverse => l.dest_time <= forward,
                    Some(_) => false,
                }
            })
            .collect();
        let mut it = keep.into_iter();
        links.retain(|_| it.next().unwrap());
        links.retain(|l| l.files.len() >= self.min_files);
        links.sort();
        links
    }
}

/// Canonical form of detected links, comparable with [`Oracle::detect`].
pub fn canonical(links: &[scmap_core::ExactLink]) -> Vec<Link> {
    let mut out: Vec<Link> = links
        .iter()
        .map(|l| {
            let mut files: Vec<Pair> = l
                .files
                .iter()
                .map(|c| Pair {
                    dest_path: c.dest_path.clone(),
                    origin_path: c.origin_path.clone(),
                    identical: c.is_identical(),
                    similarity: (*c.similarity.numer() as u64, *c.similarity.denom() as u64),
                })
                .collect();
            files.sort();
            Link {
                producer: l.producer.to_string(),
                origin_tag: l.origin_tag.clone(),
                origin_time: l.origin_time,
                consumer: l.consumer.to_string(),
                dest_tag: l.dest_tag.clone(),
                dest_time: l.dest_time,
                files,
            }
        })
        .collect();
    out.sort();
    out
}

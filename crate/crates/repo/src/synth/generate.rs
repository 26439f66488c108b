use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use scmap_core::detect::MatchKind;
use scmap_core::fingerprint::{self, Overlap};
use scmap_core::{lex, Corpus, CorpusBuilder, Exact, ExtensionMap, Language};

use crate::error::RepoError;
use crate::synth::plan::{EcosystemPlan, OpRole, Operation, PairRules, SnapshotRef};
use crate::synth::source::{self, MutationKind};
use crate::synth::truth::{GroundTruth, PlantRecord, PlantedSnapshot, TruthFile, TruthLink, TRUTH_SCHEMA_VERSION};

type Bytes = Arc<[u8]>;

const OP_STREAM: u64 = 1 << 32;
const NOISE_STREAM: u64 = 1 << 33;
/// How many times a mutation is toned down before the file is copied as is.
const CALIBRATION_ROUNDS: usize = 8;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug)]
pub struct GeneratedSnapshot {
    pub tag: String,
    pub aliases: Vec<String>,
    pub annotated: bool,
    pub time: i64,
    pub files: BTreeMap<String, Bytes>,
}

impl GeneratedSnapshot {
    pub fn canonical_tag(&self) -> &str {
        self.aliases.iter().map(String::as_str).fold(self.tag.as_str(), |a, b| a.min(b))
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedRepo {
    pub project: String,
    pub snapshots: Vec<GeneratedSnapshot>,
}

/// A generated corpus held in memory, with its ground truth.
#[derive(Clone, Debug)]
pub struct Ecosystem {
    /// The input plan with generated noise operations appended.
    pub plan: EcosystemPlan,
    pub repos: Vec<GeneratedRepo>,
    pub truth: GroundTruth,
}

/// Own files of one project at every snapshot, and which paths each
/// snapshot added or edited.
struct OwnHistory {
    states: Vec<BTreeMap<String, Bytes>>,
    fresh: Vec<BTreeSet<String>>,
}

fn own_path(language: Language, project: &str, k: usize, word: &str) -> String {
    match language {
        Language::C => format!("src/m{k:03}_{word}.c"),
        Language::Cpp => format!("src/m{k:03}_{word}.cpp"),
        Language::Java => format!("src/main/java/{project}/M{k:03}{word}.java"),
    }
}

fn evolve_own(plan: &EcosystemPlan, index: usize) -> OwnHistory {
    let p = &plan.projects[index];
    let mut rng = rng_for(plan.seed, index as u64);
    let mut files: BTreeMap<String, Bytes> = BTreeMap::new();
    let mut next = 0;
    let mut add = |rng: &mut ChaCha8Rng, files: &mut BTreeMap<String, Bytes>, dir: Option<&str>| {
        let word = source::identifier(rng);
        let path = match dir {
            None => own_path(p.language, &p.id, next, &word),
            Some(d) => format!("{d}/r{next:03}_{word}.{}", ext_of(p.language)),
        };
        next += 1;
        let statements = rng.gen_range(p.statements.0..=p.statements.1);
        let text = source::random_source(rng, p.language, statements);
        files.insert(path.clone(), Arc::from(text.into_bytes()));
        path
    };

    let mut states = Vec::new();
    let mut fresh = Vec::new();
    for s in 0..p.snapshots.len() {
        let mut changed = BTreeSet::new();
        if s == 0 {
            for _ in 0..p.initial_files {
                changed.insert(add(&mut rng, &mut files, None));
            }
            for _ in 0..plan.noise.random_files {
                changed.insert(add(&mut rng, &mut files, Some("misc")));
            }
        } else {
            let paths: Vec<String> = files.keys().cloned().collect();
            let n_edit = (p.edit_fraction * paths.len() as f64).round() as usize;
            for path in paths.choose_multiple(&mut rng, n_edit) {
                let old = String::from_utf8_lossy(&files[path]).into_owned();
                let mut new = source::mutate(&mut rng, &old, MutationKind::Mixed, 0.06);
                if new == old {
                    new = source::mutate(&mut rng, &old, MutationKind::Insert, 0.01);
                }
                files.insert(path.clone(), Arc::from(new.into_bytes()));
                changed.insert(path.clone());
            }
            for _ in 0..p.files_added {
                changed.insert(add(&mut rng, &mut files, None));
            }
        }
        states.push(files.clone());
        fresh.push(changed);
    }
    OwnHistory { states, fresh }
}

fn ext_of(language: Language) -> &'static str {
    match language {
        Language::C => "c",
        Language::Cpp => "cpp",
        Language::Java => "java",
    }
}

struct Resolved {
    producer: usize,
    origin: usize,
    consumer: usize,
    dest: usize,
}

struct Builder<'a> {
    plan: &'a EcosystemPlan,
    ops: &'a [Operation],
    resolved: Vec<Resolved>,
    own: Vec<OwnHistory>,
    selections: Vec<Option<Vec<String>>>,
    in_progress: Vec<bool>,
}

fn dest_path(producer: &str, origin_path: &str) -> String {
    format!("ext/{producer}/{origin_path}")
}

impl Builder<'_> {
    fn resolve(plan: &EcosystemPlan, op: &Operation) -> Resolved {
        let pos = |r: &SnapshotRef| {
            let p = plan.projects.iter().position(|p| p.id == r.project).expect("validated");
            let s = plan.snapshot(r).expect("validated").0;
            (p, s)
        };
        let (producer, origin) = pos(&op.origin);
        let (consumer, dest) = pos(&op.consumer);
        Resolved {
            producer,
            origin,
            consumer,
            dest,
        }
    }

    /// Paths the origin project received up to snapshot `at`.
    fn received_paths(&mut self, project: usize, at: usize) -> Result<Vec<String>, RepoError> {
        let mut out = Vec::new();
        for k in 0..self.ops.len() {
            let r = &self.resolved[k];
            if r.consumer == project && r.dest <= at {
                let producer = self.plan.projects[r.producer].id.clone();
                out.extend(self.select(k)?.iter().map(|p| dest_path(&producer, p)));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Origin paths copied by operation `k`, in selection order.
    fn select(&mut self, k: usize) -> Result<Vec<String>, RepoError> {
        if let Some(s) = &self.selections[k] {
            return Ok(s.clone());
        }
        if self.in_progress[k] {
            return Err(RepoError::PlanOperation {
                index: k,
                message: "operations depend on each other in a cycle".into(),
            });
        }
        self.in_progress[k] = true;
        let ops = self.ops;
        let op = &ops[k];
        let (producer, origin) = (self.resolved[k].producer, self.resolved[k].origin);
        let mut rng = rng_for(self.plan.seed, OP_STREAM + k as u64);

        let mut order: Vec<String> = Vec::new();
        if op.include_received {
            order.extend(self.received_paths(producer, origin)?);
        }
        if let Some(j) = op.files_like {
            let like = self.select(j)?;
            let own = &self.own[producer].states[origin];
            order.extend(like.into_iter().filter(|p| own.contains_key(p)));
        }
        let own = &self.own[producer].states[origin];
        let fresh = &self.own[producer].fresh[origin];
        let mut new: Vec<&String> = fresh.iter().collect();
        let mut rest: Vec<&String> = own.keys().filter(|p| !fresh.contains(*p)).collect();
        new.shuffle(&mut rng);
        rest.shuffle(&mut rng);
        order.extend(new.into_iter().chain(rest).cloned());

        let mut seen = BTreeSet::new();
        order.retain(|p| seen.insert(p.clone()));
        if order.len() < op.n_files {
            return Err(RepoError::PlanOperation {
                index: k,
                message: format!(
                    "{}@{} has only {} files to copy, {} requested",
                    op.origin.project,
                    op.origin.tag,
                    order.len(),
                    op.n_files
                ),
            });
        }
        order.truncate(op.n_files);
        self.in_progress[k] = false;
        self.selections[k] = Some(order.clone());
        Ok(order)
    }
}

fn similarity_of(a: &[u8], b: &[u8], language: Language) -> Exact {
    let fa = fingerprint::fingerprint(&lex::tokenize(a, language));
    let fb = fingerprint::fingerprint(&lex::tokenize(b, language));
    fingerprint::similarity(&fa, &fb, Overlap::Multiset)
}

fn language_of(path: &str) -> Language {
    ExtensionMap::default().language_of(path).unwrap_or(Language::C)
}

/// Mutates `original`, toning the rate down until the result keeps at least
/// `floor` similarity; falls back to an exact copy.
fn calibrated_mutation(
    rng: &mut ChaCha8Rng,
    original: &[u8],
    language: Language,
    kind: MutationKind,
    rate: f64,
    floor: Option<Exact>,
) -> Vec<u8> {
    let text = String::from_utf8_lossy(original);
    let mut rate = rate;
    for _ in 0..CALIBRATION_ROUNDS {
        let mutated = source::mutate(rng, &text, kind, rate).into_bytes();
        match floor {
            Some(f) if similarity_of(original, &mutated, language) < f => rate *= 0.6,
            _ => return mutated,
        }
    }
    original.to_vec()
}

/// Adds the plan's incidental overlaps as noise operations.
fn noise_operations(plan: &EcosystemPlan, own_counts: &[Vec<usize>]) -> Vec<Operation> {
    let mut rng = rng_for(plan.seed, NOISE_STREAM);
    let mut rules = PairRules::from_operations(&plan.operations);
    let mut out = Vec::new();
    let size = plan.noise.incidental_size.max(1);
    let n = plan.projects.len();
    if n < 2 {
        return out;
    }
    let mut attempts = 0;
    while out.len() < plan.noise.incidental_overlaps && attempts < 1000 {
        attempts += 1;
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (pa, pb) = (&plan.projects[a], &plan.projects[b]);
        let sa = rng.gen_range(0..pa.snapshots.len());
        let later: Vec<usize> = (0..pb.snapshots.len())
            .filter(|&t| pb.snapshots[t].time > pa.snapshots[sa].time)
            .collect();
        let Some(&sb) = later.choose(&mut rng) else { continue };
        if own_counts[a][sa] < size || !rules.allows(&pa.id, &pb.id) {
            continue;
        }
        rules.try_add(&pa.id, &pb.id);
        let mut op = Operation::copy((&pa.id, &pa.snapshots[sa].tag), (&pb.id, &pb.snapshots[sb].tag), size);
        op.role = OpRole::Noise;
        out.push(op);
    }
    out
}

/// Builds the whole ecosystem in memory. A pure function of the plan.
pub fn build(plan: &EcosystemPlan) -> Result<Ecosystem, RepoError> {
    plan.validate()?;
    let own: Vec<OwnHistory> = (0..plan.projects.len())
        .into_par_iter()
        .map(|i| evolve_own(plan, i))
        .collect();
    let own_counts: Vec<Vec<usize>> = own.iter().map(|h| h.states.iter().map(|s| s.len()).collect()).collect();

    let mut full = plan.clone();
    full.operations.extend(noise_operations(plan, &own_counts));
    let ops = &full.operations;
    let resolved: Vec<Resolved> = ops.iter().map(|op| Builder::resolve(&full, op)).collect();
    let mut b = Builder {
        plan: &full,
        ops,
        resolved,
        own,
        selections: vec![None; ops.len()],
        in_progress: vec![false; ops.len()],
    };
    for k in 0..ops.len() {
        b.select(k)?;
    }

    let threshold: Exact = fingerprint::parse_threshold(full.expect.similarity_threshold)?;
    let mut order: Vec<usize> = (0..ops.len()).collect();
    order.sort_by_key(|&k| (full.snapshot(&ops[k].consumer).unwrap().1.time, k));

    // Received files per project: (dest snapshot, path, bytes).
    let mut received: Vec<BTreeMap<String, (usize, Bytes)>> = vec![BTreeMap::new(); full.projects.len()];
    let mut links: Vec<Option<TruthLink>> = vec![None; ops.len()];
    let mut plants = Vec::new();
    for k in order {
        let op = &ops[k];
        let r = &b.resolved[k];
        let producer = &full.projects[r.producer];
        let consumer = &full.projects[r.consumer];
        let origin_snap = &producer.snapshots[r.origin];
        let dest_snap = &consumer.snapshots[r.dest];
        let selection = b.selections[k].clone().expect("selected");
        let mut rng = rng_for(full.seed, OP_STREAM + k as u64);
        rng.set_word_pos(1 << 20);

        let n_mutated = if op.mutation_rate > 0.0 {
            (op.mutated_fraction * selection.len() as f64).round() as usize
        } else {
            0
        };
        let mut idx: Vec<usize> = (0..selection.len()).collect();
        idx.shuffle(&mut rng);
        let mutated: BTreeSet<usize> = idx.into_iter().take(n_mutated).collect();
        let floor = op.min_similarity.map(fingerprint::parse_threshold::<Exact>).transpose()?;

        let mut files = Vec::new();
        let mut lowest: Option<(Exact, String)> = None;
        for (i, origin_path) in selection.iter().enumerate() {
            let origin_bytes = b.own[r.producer].states[r.origin]
                .get(origin_path)
                .cloned()
                .or_else(|| {
                    received[r.producer]
                        .get(origin_path)
                        .filter(|(at, _)| *at <= r.origin)
                        .map(|(_, bytes)| bytes.clone())
                })
                .ok_or_else(|| RepoError::PlanOperation {
                    index: k,
                    message: format!("{origin_path} missing from {}@{}", producer.id, origin_snap.tag),
                })?;
            let language = language_of(origin_path);
            let dest_bytes: Bytes = if mutated.contains(&i) {
                Arc::from(calibrated_mutation(
                    &mut rng,
                    &origin_bytes,
                    language,
                    op.mutation_kind,
                    op.mutation_rate,
                    floor,
                ))
            } else {
                origin_bytes.clone()
            };
            let sim = similarity_of(&origin_bytes, &dest_bytes, language);
            if lowest.as_ref().is_none_or(|(s, _)| sim < *s) {
                lowest = Some((sim, origin_path.clone()));
            }
            let path = dest_path(&producer.id, origin_path);
            if received[r.consumer].contains_key(&path) {
                return Err(RepoError::PlanOperation {
                    index: k,
                    message: format!("{}@{} already received {path}", consumer.id, dest_snap.tag),
                });
            }
            received[r.consumer].insert(path.clone(), (r.dest, dest_bytes.clone()));
            let kind = if dest_bytes == origin_bytes {
                MatchKind::Identical
            } else {
                MatchKind::Similar
            };
            plants.push(PlantRecord {
                operation: k,
                consumer: consumer.id.as_str().into(),
                dest_tag: dest_snap.canonical_tag().to_owned(),
                dest_path: path.clone(),
                origin_path: origin_path.clone(),
                mutated: kind == MatchKind::Similar,
                similarity: scmap_core::Scalar::to_f64(sim),
            });
            files.push(TruthFile {
                dest_path: path,
                origin_path: origin_path.clone(),
                kind,
                dest_digest: fingerprint::digest(&dest_bytes),
                origin_digest: fingerprint::digest(&origin_bytes),
            });
        }
        files.sort_by(|a, b| a.dest_path.cmp(&b.dest_path));

        let undetectable_reason = if files.len() < full.expect.min_files {
            Some(format!("{} files < min_files {}", files.len(), full.expect.min_files))
        } else {
            lowest
                .filter(|(s, _)| *s < threshold)
                .map(|(s, path)| format!("{path} keeps similarity {:.3} < threshold", scmap_core::Scalar::to_f64(s)))
        };
        links[k] = Some(TruthLink {
            producer: producer.id.as_str().into(),
            origin_tag: origin_snap.canonical_tag().to_owned(),
            origin_time: origin_snap.time,
            consumer: consumer.id.as_str().into(),
            dest_tag: dest_snap.canonical_tag().to_owned(),
            dest_time: dest_snap.time,
            files,
            operation: k,
            role: op.role,
            expected_detectable: undetectable_reason.is_none(),
            undetectable_reason,
        });
    }

    let mut repos = Vec::new();
    let mut snapshots = Vec::new();
    for (pi, p) in full.projects.iter().enumerate() {
        let mut gen = Vec::new();
        for (si, s) in p.snapshots.iter().enumerate() {
            let mut files = b.own[pi].states[si].clone();
            for (path, (at, bytes)) in &received[pi] {
                if *at <= si {
                    files.insert(path.clone(), bytes.clone());
                }
            }
            let mut all_tags = vec![s.tag.clone()];
            all_tags.extend(s.aliases.iter().cloned());
            all_tags.sort();
            snapshots.push(PlantedSnapshot {
                project: p.id.as_str().into(),
                tag: s.canonical_tag().to_owned(),
                all_tags,
                commit_time: s.time,
                annotated: s.annotated,
                n_files: files.len(),
            });
            gen.push(GeneratedSnapshot {
                tag: s.tag.clone(),
                aliases: s.aliases.clone(),
                annotated: s.annotated,
                time: s.time,
                files,
            });
        }
        repos.push(GeneratedRepo {
            project: p.id.clone(),
            snapshots: gen,
        });
    }

    let mut projects: Vec<_> = full.projects.iter().map(|p| p.id.as_str().into()).collect();
    projects.sort();
    let truth = GroundTruth {
        schema_version: TRUTH_SCHEMA_VERSION,
        seed: full.seed,
        projects,
        snapshots,
        links: links.into_iter().map(|l| l.expect("every operation planted")).collect(),
        plants,
    };
    Ok(Ecosystem {
        plan: full,
        repos,
        truth,
    })
}

/// Builds the ecosystem and writes it under `out_dir`: one bare repository
/// per project in `repos/`, plus `manifest.tsv`, `plan.json` and
/// `ground_truth.json`.
pub fn generate(plan: &EcosystemPlan, out_dir: &Path) -> Result<Ecosystem, RepoError> {
    let eco = build(plan)?;
    eco.write(out_dir)?;
    Ok(eco)
}

impl Ecosystem {
    pub fn repo(&self, project: &str) -> Option<&GeneratedRepo> {
        self.repos.iter().find(|r| r.project == project)
    }

    /// Bytes of a generated file, looked up by any of the snapshot's tags.
    pub fn file(&self, project: &str, tag: &str, path: &str) -> Option<&[u8]> {
        self.repo(project)?
            .snapshots
            .iter()
            .find(|s| s.tag == tag || s.aliases.iter().any(|a| a == tag))?
            .files
            .get(path)
            .map(|b| &b[..])
    }

    /// The corpus ingestion would produce, built without Git. Commit ids are
    /// placeholders.
    pub fn corpus(&self) -> Result<Corpus, RepoError> {
        let mut builder = CorpusBuilder::new();
        for repo in &self.repos {
            for s in &repo.snapshots {
                builder.add_snapshot_bytes(&repo.project, s.canonical_tag(), s.time, s.files.iter().map(|(p, b)| (p, &b[..])));
            }
        }
        Ok(builder.build()?)
    }

    pub fn manifest_path(out_dir: &Path) -> PathBuf {
        out_dir.join("manifest.tsv")
    }

    pub fn write(&self, out_dir: &Path) -> Result<(), RepoError> {
        let repos_dir = out_dir.join("repos");
        fs::create_dir_all(&repos_dir)?;
        self.repos
            .par_iter()
            .map(|r| write_repo(r, &repos_dir.join(format!("{}.git", r.project))))
            .collect::<Result<Vec<()>, _>>()?;
        let mut manifest = String::from("id\tname\trepo_path\n");
        for r in &self.repos {
            manifest.push_str(&format!("{0}\t{0}\trepos/{0}.git\n", r.project));
        }
        fs::write(Self::manifest_path(out_dir), manifest)?;
        fs::write(out_dir.join("plan.json"), self.plan.to_json()?)?;
        fs::write(out_dir.join("ground_truth.json"), self.truth.to_json()?)?;
        Ok(())
    }
}

fn git_failure(dir: &Path, command: &str, message: impl Into<String>) -> RepoError {
    RepoError::Git {
        repo: dir.to_owned(),
        command: command.into(),
        message: message.into(),
    }
}

fn fast_import_stream(repo: &GeneratedRepo) -> Vec<u8> {
    const WHO: &str = "Synth <synth@example.invalid>";
    let mut s: Vec<u8> = Vec::new();
    for (i, snap) in repo.snapshots.iter().enumerate() {
        let mark = i + 1;
        let msg = format!("{} {}\n", repo.project, snap.tag);
        let _ = write!(
            s,
            "commit refs/heads/main\nmark :{mark}\nauthor {WHO} {} +0000\ncommitter {WHO} {} +0000\ndata {}\n{msg}",
            snap.time - 3600,
            snap.time,
            msg.len()
        );
        s.extend_from_slice(b"deleteall\n");
        for (path, bytes) in &snap.files {
            let _ = write!(s, "M 100644 inline {path}\ndata {}\n", bytes.len());
            s.extend_from_slice(bytes);
            s.push(b'\n');
        }
        s.push(b'\n');
        let mut tags = vec![snap.tag.clone()];
        tags.extend(snap.aliases.iter().cloned());
        for tag in tags {
            if snap.annotated {
                let note = format!("release {tag}\n");
                let _ = write!(
                    s,
                    "tag {tag}\nfrom :{mark}\ntagger {WHO} {} +0000\ndata {}\n{note}\n",
                    snap.time + 1800,
                    note.len()
                );
            } else {
                let _ = write!(s, "reset refs/tags/{tag}\nfrom :{mark}\n\n");
            }
        }
    }
    s.extend_from_slice(b"done\n");
    s
}

fn write_repo(repo: &GeneratedRepo, dir: &Path) -> Result<(), RepoError> {
    if dir.exists() {
        fs::remove_dir_all(dir)?;
    }
    let init = Command::new("git")
        .args(["init", "--bare", "-q"])
        .arg(dir)
        .output()
        .map_err(|e| git_failure(dir, "init", e.to_string()))?;
    if !init.status.success() {
        return Err(git_failure(dir, "init", String::from_utf8_lossy(&init.stderr)));
    }
    let mut child = Command::new("git")
        .arg("-C")
        .arg(dir)
        .args(["fast-import", "--quiet", "--done"])
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| git_failure(dir, "fast-import", e.to_string()))?;
    let stream = fast_import_stream(repo);
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(&stream)
        .map_err(|e| git_failure(dir, "fast-import", e.to_string()))?;
    let out = child
        .wait_with_output()
        .map_err(|e| git_failure(dir, "fast-import", e.to_string()))?;
    if !out.status.success() {
        return Err(git_failure(dir, "fast-import", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(())
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p scmap-cli --test acceptance`. The process exits
//! nonzero when any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

mod scenarios;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use scmap_core::chain::MetricsReport;
use scmap_core::detect::{detect_all, Detection, Detector};
use scmap_core::{fingerprint, Config, CorpusIndex, Exact, ExactConfig, ExactLink, ExtensionMap, Overlap, Scalar};
use scmap_repo::synth::{self, random_plan, EcosystemPlan, Expectation, NoiseSpec, Operation, ProjectPlan, RandomPlanParams, SnapshotPlan, TruthLink};
use scmap_repo::{enumerate_projects, ingest};
use support::corpora::random_corpus;
use support::invariants::check_invariants;
use support::oracle::{canonical, Oracle};

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {:.2} s, limit {:.0} s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn exact_config(min_files: usize) -> ExactConfig {
    ExactConfig {
        similarity_threshold: Exact::from_ratio(4, 5),
        ..ExactConfig::default()
    }
    .with_min_files(min_files)
}

/// `(producer, origin tag, consumer, dest tag, dest paths)` per link, sorted.
fn summarize(links: &[ExactLink]) -> Vec<(String, String, String, String, Vec<String>)> {
    let mut out: Vec<_> = links
        .iter()
        .map(|l| {
            let mut paths: Vec<String> = l.files.iter().map(|c| c.dest_path.clone()).collect();
            paths.sort();
            (l.producer.to_string(), l.origin_tag.clone(), l.consumer.to_string(), l.dest_tag.clone(), paths)
        })
        .collect();
    out.sort();
    out
}

fn expected(links: &[scenarios::Expected]) -> Vec<(String, String, String, String, Vec<String>)> {
    let mut out: Vec<_> = links
        .iter()
        .map(|(p, o, c, d, paths)| {
            (p.to_string(), o.to_string(), c.to_string(), d.to_string(), paths.iter().map(|s| s.to_string()).collect())
        })
        .collect();
    out.sort();
    out
}

/// Detects on the scenario and compares against the stated links and the
/// brute-force oracle.
fn run_scenario(s: &scenarios::Scenario) -> Result<Detection<Exact>, String> {
    let detection = detect_all(&s.raw.corpus(), exact_config(1)).map_err(|e| e.to_string())?;
    let got = summarize(&detection.report.links);
    ensure(got == expected(&s.links), || format!("{}: got {got:?}", s.name))?;
    let oracle = Oracle::new(&s.raw, (4, 5), 1).detect();
    ensure(canonical(&detection.report.links) == oracle, || format!("{}: oracle disagrees", s.name))?;
    Ok(detection)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let scenarios = scenarios::criteria();
    for s in &scenarios {
        run_scenario(s)?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} scenarios", scenarios.len()))
}

fn criterion_2() -> Outcome {
    run_scenario(&scenarios::worked_example())?;
    let removals = scenarios::removals();
    for r in &removals {
        let d = run_scenario(&r.scenario)?;
        let hit = d
            .audit
            .iter()
            .any(|e| e.rule.to_string() == r.rule && e.consumer.as_str() == "C" && e.dest_tag == "v2");
        ensure(hit, || format!("{}: no [{}] removal of C@v2 in the audit", r.scenario.name, r.rule))?;
    }
    Ok(format!("worked example and {} removal cases", removals.len()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut queries = 0;
    let mut candidates = 0;
    for seed in 0..50 {
        let raw = random_corpus(seed, 10, 60);
        let corpus = raw.corpus();
        let oracle = Oracle::new(&raw, (4, 5), 1);
        let index = CorpusIndex::build(&corpus, Overlap::Multiset).map_err(|e| e.to_string())?;
        let detector = Detector::new(&index, exact_config(1));
        for sid in corpus.snapshot_ids() {
            let snap = corpus.snapshot(sid);
            let mut got: Vec<_> = detector
                .collect_candidates(sid)
                .into_iter()
                .map(|c| {
                    let link = ExactLink {
                        producer: c.producer,
                        origin_tag: c.origin_tag,
                        origin_time: c.origin_time,
                        consumer: snap.project_id.clone(),
                        dest_tag: snap.tag.clone(),
                        dest_time: snap.commit_time,
                        files: c.correspondences,
                    };
                    let l = canonical(&[link]).remove(0);
                    (l.producer, l.origin_tag, l.origin_time, l.files)
                })
                .collect();
            got.sort();
            let want: Vec<_> = oracle
                .candidates(snap.project_id.as_str(), &snap.tag)
                .into_iter()
                .map(|c| (c.producer, c.origin_tag, c.origin_time, c.files))
                .collect();
            ensure(got == want, || format!("seed {seed}, query {}@{}", snap.project_id, snap.tag))?;
            queries += 1;
            candidates += want.len();
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{queries} queries, {candidates} candidates, 100% agreement"))
}

/// Writes the plan's repositories, ingests them through Git and detects.
fn through_git(plan: &EcosystemPlan, dir: &Path, config: Config) -> Result<(synth::Ecosystem, Detection<f64>), String> {
    let eco = synth::generate(plan, dir).map_err(|e| e.to_string())?;
    let manifest = enumerate_projects(&synth::Ecosystem::manifest_path(dir)).map_err(|e| e.to_string())?;
    let ingested = ingest(&manifest.projects, &ExtensionMap::default()).map_err(|e| e.to_string())?;
    let detection = detect_all(&ingested.corpus, config).map_err(|e| e.to_string())?;
    Ok((eco, detection))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let params = RandomPlanParams::default();
    let (mut expected, mut matched, mut detected) = (0, 0, 0);
    let mut worst_recall = 1.0f64;
    for seed in 0..20 {
        let plan = random_plan(seed, &params);
        let planted = plan.operations.iter().filter(|o| o.role == synth::OpRole::Planted).count();
        ensure((10..=40).contains(&planted), || format!("seed {seed}: {planted} planted operations"))?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (eco, detection) = through_git(&plan, dir.path(), Config::default())?;
        let s = synth::score(&detection.report, &eco.truth).map_err(|e| e.to_string())?;
        ensure(s.origin_accuracy == 1.0, || format!("seed {seed}: origin accuracy {}, wrong {:?}", s.origin_accuracy, s.wrong_origin))?;
        ensure(s.link_precision == 1.0, || format!("seed {seed}: link precision {}, spurious {:?}", s.link_precision, s.spurious))?;
        ensure(s.link_recall >= 0.95, || format!("seed {seed}: link recall {}, missed {:?}", s.link_recall, s.missed))?;
        worst_recall = worst_recall.min(s.link_recall);
        expected += s.n_expected;
        matched += s.n_matched;
        detected += s.n_detected;
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!(
        "20 ecosystems, {matched}/{expected} expected links found, {detected} detected, worst recall {worst_recall:.3}"
    ))
}

fn criterion_5() -> Outcome {
    let mut links = 0;
    for seed in 0..40 {
        let raw = random_corpus(1000 + seed, 10, 60);
        let corpus = raw.corpus();
        let threshold = [(1, 2), (7, 10), (4, 5), (1, 1)][seed as usize % 4];
        let config = ExactConfig {
            similarity_threshold: Exact::from_ratio(threshold.0, threshold.1),
            ..ExactConfig::default()
        }
        .with_min_files(1 + seed as usize % 3);
        check_invariants(&corpus, config.clone());
        links += detect_all(&corpus, config).map_err(|e| e.to_string())?.report.links.len();

        let fps: Vec<_> = corpus.fingerprints.iter().map(|(_, s)| &s.fingerprint).collect();
        for a in fps.iter().take(25) {
            let own: Exact = fingerprint::similarity(a, a, Overlap::Multiset);
            ensure(own == Exact::from_ratio(1, 1), || format!("seed {seed}: self-similarity {own}"))?;
            for b in fps.iter().take(25) {
                let ab: Exact = fingerprint::similarity(a, b, Overlap::Multiset);
                let ba: Exact = fingerprint::similarity(b, a, Overlap::Multiset);
                ensure(ab == ba, || format!("seed {seed}: similarity {ab} vs {ba}"))?;
            }
        }
    }
    Ok(format!("40 corpora, {links} links checked"))
}

fn project(id: &str, times: &[i64], initial_files: usize) -> ProjectPlan {
    ProjectPlan {
        id: id.into(),
        language: scmap_core::Language::C,
        snapshots: times
            .iter()
            .enumerate()
            .map(|(i, &time)| SnapshotPlan {
                tag: format!("v{}", i + 1),
                time,
                annotated: false,
                aliases: Vec::new(),
            })
            .collect(),
        initial_files,
        files_added: 0,
        edit_fraction: 0.0,
        statements: (12, 24),
    }
}

const DAY: i64 = 86_400;
const T0: i64 = 1_300_000_000;

fn plan(seed: u64, projects: Vec<ProjectPlan>, operations: Vec<Operation>, min_files: usize) -> EcosystemPlan {
    EcosystemPlan {
        seed,
        projects,
        operations,
        noise: NoiseSpec::default(),
        expect: Expectation {
            min_files,
            similarity_threshold: 0.8,
        },
    }
}

/// Member projects of the planted links with at least `min_files` files.
fn planted_members(links: &[TruthLink], min_files: usize) -> usize {
    links
        .iter()
        .filter(|l| l.n_files() >= min_files)
        .flat_map(|l| [l.producer.to_string(), l.consumer.to_string()])
        .collect::<BTreeSet<_>>()
        .len()
}

fn criterion_6() -> Outcome {
    let sizes = [5usize, 10, 20, 30, 50];
    let mut projects = Vec::new();
    let mut operations = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let (p, c) = (format!("prod{n:02}"), format!("cons{n:02}"));
        projects.push(project(&p, &[T0 + i as i64 * DAY], n + 5));
        projects.push(project(&c, &[T0 + 30 * DAY, T0 + (60 + i as i64) * DAY], 25));
        operations.push(Operation::copy((&p, "v1"), (&c, "v2"), n));
    }
    let plan = plan(6, projects, operations, 5);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (eco, detection) = through_git(&plan, dir.path(), Config::default().with_min_files(5))?;

    let rows = detection.sweep(sizes);
    let got: Vec<usize> = rows.iter().map(|r| r.n_projects).collect();
    let want: Vec<usize> = sizes.iter().map(|&m| planted_members(&eco.truth.links, m)).collect();
    ensure(got == want, || format!("members {got:?}, plant log {want:?}"))?;
    ensure(got.windows(2).all(|w| w[0] >= w[1]), || format!("members {got:?} increase"))?;
    Ok(format!(
        "members at min files {sizes:?}: {}",
        got.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
    ))
}

/// Longest time-consistent producer-to-consumer chain over planted links,
/// by exhaustive search.
fn longest_chain(links: &[TruthLink]) -> usize {
    fn from(links: &[TruthLink], last: &TruthLink, seen: &mut Vec<String>) -> usize {
        let mut best = 0;
        for l in links {
            if l.producer == last.consumer && l.origin_time >= last.dest_time && !seen.contains(&l.consumer.to_string()) {
                seen.push(l.consumer.to_string());
                best = best.max(1 + from(links, l, seen));
                seen.pop();
            }
        }
        best
    }
    links
        .iter()
        .map(|l| 1 + from(links, l, &mut vec![l.producer.to_string(), l.consumer.to_string()]))
        .max()
        .unwrap_or(0)
}

/// Longest run of planted copies passing the same file content along.
fn longest_file_path(links: &[TruthLink]) -> usize {
    let mut memo: HashMap<(usize, usize), usize> = HashMap::new();
    fn walk(links: &[TruthLink], li: usize, fi: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if let Some(&n) = memo.get(&(li, fi)) {
            return n;
        }
        let (l, f) = (&links[li], &links[li].files[fi]);
        let mut best = 1;
        for (mi, m) in links.iter().enumerate() {
            if m.producer != l.consumer || m.origin_time < l.dest_time {
                continue;
            }
            for (gi, g) in m.files.iter().enumerate() {
                if g.origin_digest == f.dest_digest {
                    best = best.max(1 + walk(links, mi, gi, memo));
                }
            }
        }
        memo.insert((li, fi), best);
        best
    }
    (0..links.len())
        .flat_map(|li| (0..links[li].files.len()).map(move |fi| (li, fi)))
        .map(|(li, fi)| walk(links, li, fi, &mut memo))
        .max()
        .unwrap_or(0)
}

fn criterion_7() -> Outcome {
    let mut projects = vec![project("hub", &[T0], 30)];
    let mut operations = Vec::new();
    for k in 0..6 {
        let c = format!("user{k}");
        projects.push(project(&c, &[T0 + 10 * DAY, T0 + (20 + k) * DAY], 25));
        operations.push(Operation::copy(("hub", "v1"), (&c, "v2"), 20));
    }
    // chain0 -> chain1 -> ... -> chain4, each passing on its own files.
    // A single snapshot both receives and passes on, so the origin of every
    // later copy is exactly as old as the copy it received.
    for k in 0..5i64 {
        projects.push(project(&format!("chain{k}"), &[T0 + 100 * k * DAY], 25));
        if k > 0 {
            operations.push(Operation::copy((&format!("chain{}", k - 1), "v1"), (&format!("chain{k}"), "v1"), 20));
        }
    }
    // relay0 -> relay1 -> relay2 -> relay3, each passing on everything it
    // received plus some of its own files.
    for k in 0..4i64 {
        let times: Vec<i64> = if k == 0 { vec![T0] } else { vec![T0 + (100 * k - 50) * DAY, T0 + 100 * k * DAY] };
        projects.push(project(&format!("relay{k}"), &times, 25));
        if k > 0 {
            let origin_tag = if k == 1 { "v1" } else { "v2" };
            let mut op = Operation::copy((&format!("relay{}", k - 1), origin_tag), (&format!("relay{k}"), "v2"), 20 + 5 * (k as usize - 1));
            op.include_received = true;
            operations.push(op);
        }
    }
    let plan = plan(7, projects, operations, 20);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (eco, detection) = through_git(&plan, dir.path(), Config::default())?;
    let s = synth::score(&detection.report, &eco.truth).map_err(|e| e.to_string())?;
    ensure(s.link_precision == 1.0 && s.link_recall == 1.0 && s.origin_accuracy == 1.0, || format!("{s:?}"))?;

    let truth = &eco.truth.links;
    let mut consumers: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for l in truth {
        consumers.entry(l.producer.to_string()).or_default().insert(l.consumer.to_string());
    }
    let want_hubs: Vec<(String, usize)> = consumers
        .into_iter()
        .filter(|(_, c)| c.len() > 5)
        .map(|(p, c)| (p, c.len()))
        .collect();
    let (want_chain, want_path) = (longest_chain(truth), longest_file_path(truth));
    ensure(want_hubs == [("hub".to_string(), 6)] && want_chain == 4 && want_path == 3, || {
        format!("plant log gives hubs {want_hubs:?}, chain {want_chain}, path {want_path}")
    })?;

    let m = MetricsReport::compute(&detection.report.links, 5);
    let got_hubs: Vec<(String, usize)> = m.degree.hubs.iter().map(|(p, d)| (p.to_string(), *d)).collect();
    let got_chain = m.project_chains.keys().max().copied().unwrap_or(0);
    let got_path = m.file_paths.keys().max().copied().unwrap_or(0);
    ensure(got_hubs == want_hubs, || format!("hubs {got_hubs:?}, expected {want_hubs:?}"))?;
    ensure(got_chain == want_chain, || format!("longest project chain {got_chain}, expected {want_chain}"))?;
    ensure(got_path == want_path, || format!("longest file path {got_path}, expected {want_path}"))?;
    Ok(format!("hubs {got_hubs:?}, project chain max {got_chain}, file path max {got_path}"))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 7] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(message)
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail}; {secs:.2} s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail}; {secs:.2} s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Properties every detection result must satisfy.

use std::collections::{BTreeMap, BTreeSet};

use scmap_core::detect::detect_all;
use scmap_core::{Corpus, ExactConfig, ProjectId};

/// Panics with the violated property.
pub fn check_invariants(corpus: &Corpus, config: ExactConfig) {
    let d = detect_all(corpus, config.clone()).unwrap();
    let links = &d.report.links;

    let mut dest_paths: BTreeMap<(&ProjectId, &str), BTreeSet<&str>> = BTreeMap::new();
    let mut first: BTreeMap<(&ProjectId, &ProjectId), i64> = BTreeMap::new();
    for l in links {
        assert!(l.origin_time < l.dest_time, "C1: {}@{} -> {}@{}", l.producer, l.origin_tag, l.consumer, l.dest_tag);
        assert_ne!(l.producer, l.consumer);
        assert!(l.n_files() >= config.min_files, "min_files");
        let seen = dest_paths.entry((&l.consumer, &l.dest_tag)).or_default();
        for c in &l.files {
            assert!(seen.insert(&c.dest_path), "C5: {} claimed twice", c.dest_path);
            assert_eq!(c.is_identical(), c.dest_digest == c.origin_digest);
            assert!(c.similarity >= config.similarity_threshold);
        }
        let t = first.entry((&l.producer, &l.consumer)).or_insert(i64::MAX);
        *t = (*t).min(l.link_time());
    }
    for l in links {
        if let Some(&reverse) = first.get(&(&l.consumer, &l.producer)) {
            assert!(l.link_time() <= reverse, "rule 1: {}->{} after the reverse direction", l.producer, l.consumer);
        }
    }

    // The snapshot-level graph is acyclic: a topological order exists.
    let mut nodes: BTreeSet<(&ProjectId, &str)> = BTreeSet::new();
    let mut indegree: BTreeMap<(&ProjectId, &str), usize> = BTreeMap::new();
    let mut out: BTreeMap<(&ProjectId, &str), Vec<(&ProjectId, &str)>> = BTreeMap::new();
    for l in links {
        let (a, b) = ((&l.producer, l.origin_tag.as_str()), (&l.consumer, l.dest_tag.as_str()));
        nodes.insert(a);
        nodes.insert(b);
        out.entry(a).or_default().push(b);
        *indegree.entry(b).or_default() += 1;
    }
    let mut ready: Vec<_> = nodes.iter().copied().filter(|n| !indegree.contains_key(n)).collect();
    let mut visited = 0;
    while let Some(n) = ready.pop() {
        visited += 1;
        for &m in out.get(&n).into_iter().flatten() {
            let d = indegree.get_mut(&m).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(m);
            }
        }
    }
    assert_eq!(visited, nodes.len(), "snapshot graph has a cycle");

    let counts: Vec<usize> = d.report.stepwise[2..].iter().map(|r| r.n_links.unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "stepwise {counts:?}");

    let again = detect_all(corpus, config).unwrap();
    assert_eq!(d.report.to_json().unwrap(), again.report.to_json().unwrap(), "determinism");
}

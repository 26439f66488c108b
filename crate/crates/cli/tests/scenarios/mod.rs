//! Mini-corpora for the detection criteria and the worked algorithm example.
//!
//! File bodies are 42 distinct identifiers, so a file has 40 trigrams and
//! changing one token away from the ends removes 3 of them: one change gives
//! similarity 37/43 (about 0.86) to the original, two changes 34/46 (about
//! 0.74). With the 0.8 threshold one edit keeps a file similar and two edits
//! do not.

use crate::support::oracle::RawCorpus;

pub fn body(name: &str, changed: &[usize]) -> String {
    (0..42)
        .map(|i| {
            if changed.contains(&i) {
                format!("{name}_{i}_x")
            } else {
                format!("{name}_{i}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `(path, body)` for each name, unchanged.
pub fn files(names: &[&str]) -> Vec<(String, String)> {
    names.iter().map(|n| (format!("{n}.c"), body(n, &[]))).collect()
}

pub fn edited(names: &[&str], changed: &[usize]) -> Vec<(String, String)> {
    names.iter().map(|n| (format!("{n}.c"), body(n, changed))).collect()
}

pub fn add(raw: &mut RawCorpus, project: &str, tag: &str, time: i64, files: &[(String, String)]) {
    let refs: Vec<(&str, &str)> = files.iter().map(|(p, b)| (p.as_str(), b.as_str())).collect();
    raw.add(project, tag, time, &refs);
}

/// `(producer, origin tag, consumer, dest tag, dest paths)`.
pub type Expected = (&'static str, &'static str, &'static str, &'static str, Vec<&'static str>);

pub struct Scenario {
    pub name: &'static str,
    pub raw: RawCorpus,
    /// Every final link, sorted.
    pub links: Vec<Expected>,
}

/// C1: an identical file set committed later, or at the same moment, is
/// never an origin.
fn c1() -> Scenario {
    let mut raw = RawCorpus::default();
    add(&mut raw, "P", "v1", 100, &files(&["a", "b", "c"]));
    add(&mut raw, "C", "v1", 200, &files(&["a", "b", "c"]));
    add(&mut raw, "S", "v1", 200, &files(&["a", "b"]));
    add(&mut raw, "Q", "v1", 300, &files(&["a", "b", "c"]));
    Scenario {
        name: "C1 origins come from the past",
        raw,
        links: vec![
            ("P", "v1", "C", "v1", vec!["a.c", "b.c", "c.c"]),
            ("P", "v1", "Q", "v1", vec!["a.c", "b.c", "c.c"]),
            ("P", "v1", "S", "v1", vec!["a.c", "b.c"]),
        ],
    }
}

/// C2: P's snapshots match one, two and three of C's files.
fn c2() -> Scenario {
    let mut raw = RawCorpus::default();
    add(&mut raw, "P", "v1", 100, &files(&["a"]));
    add(&mut raw, "P", "v2", 200, &files(&["a", "b"]));
    add(&mut raw, "P", "v3", 300, &files(&["a", "b", "c"]));
    add(&mut raw, "C", "v1", 400, &files(&["a", "b", "c", "z"]));
    Scenario {
        name: "C2 largest file sets",
        raw,
        links: vec![("P", "v3", "C", "v1", vec!["a.c", "b.c", "c.c"])],
    }
}

/// C3: both P snapshots match three files, the first one
/// identically, the second one only by similarity.
fn c3() -> Scenario {
    let mut raw = RawCorpus::default();
    add(&mut raw, "P", "v1", 100, &files(&["a", "b", "c"]));
    let mut v2 = edited(&["a", "b"], &[20]);
    v2.extend(files(&["c"]));
    add(&mut raw, "P", "v2", 200, &v2);
    add(&mut raw, "C", "v1", 300, &files(&["a", "b", "c"]));
    Scenario {
        name: "C3 most similar file sets",
        raw,
        links: vec![("P", "v1", "C", "v1", vec!["a.c", "b.c", "c.c"])],
    }
}

/// C4: P and Q hold the same files; Q's snapshot is older.
fn c4() -> Scenario {
    let mut raw = RawCorpus::default();
    add(&mut raw, "Q", "v1", 100, &files(&["a", "b", "c"]));
    add(&mut raw, "P", "v1", 200, &files(&["x"]));
    add(&mut raw, "P", "v2", 300, &files(&["a", "b", "c"]));
    add(&mut raw, "C", "v1", 400, &files(&["a", "b", "c"]));
    Scenario {
        name: "C4 oldest file sets",
        raw,
        links: vec![
            ("Q", "v1", "C", "v1", vec!["a.c", "b.c", "c.c"]),
            ("Q", "v1", "P", "v2", vec!["a.c", "b.c", "c.c"]),
        ],
    }
}

/// C5: file c is found in both P and Q; P covers more of C.
fn c5() -> Scenario {
    let mut raw = RawCorpus::default();
    add(&mut raw, "P", "v1", 100, &files(&["a", "b", "c"]));
    add(&mut raw, "Q", "v1", 150, &files(&["c", "d"]));
    add(&mut raw, "C", "v1", 300, &files(&["a", "b", "c", "d"]));
    Scenario {
        name: "C5 single origins",
        raw,
        links: vec![
            ("P", "v1", "C", "v1", vec!["a.c", "b.c", "c.c"]),
            ("P", "v1", "Q", "v1", vec!["c.c"]),
            ("Q", "v1", "C", "v1", vec!["d.c"]),
        ],
    }
}

/// C6: P took its files from C; both projects then edit them
/// and C's second snapshot looks like P's second snapshot.
fn c6() -> Scenario {
    let mut raw = RawCorpus::default();
    add(&mut raw, "C", "v1", 100, &files(&["a", "b", "c"]));
    add(&mut raw, "P", "v1", 200, &files(&["a", "b", "c"]));
    add(&mut raw, "P", "v2", 300, &edited(&["a", "b", "c"], &[10]));
    add(&mut raw, "C", "v2", 400, &edited(&["a", "b", "c"], &[10, 30]));
    Scenario {
        name: "C6 update rather than clone-and-own",
        raw,
        links: vec![("C", "v1", "P", "v1", vec!["a.c", "b.c", "c.c"])],
    }
}

pub fn criteria() -> Vec<Scenario> {
    vec![c1(), c2(), c3(), c4(), c5(), c6()]
}

/// Query X = {a..e}; U, V and W hold matches in five snapshots. U wins with
/// its second snapshot, V's best snapshot loses c to U and d to the older W,
/// so V disappears at Step 3.
pub fn worked_example() -> Scenario {
    let mut raw = RawCorpus::default();
    add(&mut raw, "U", "u1", 100, &files(&["a", "b"]));
    add(&mut raw, "W", "w1", 150, &files(&["d", "e"]));
    add(&mut raw, "U", "u2", 200, &files(&["a", "b", "c"]));
    add(&mut raw, "V", "v1", 300, &files(&["c"]));
    add(&mut raw, "V", "v2", 400, &files(&["c", "d"]));
    add(&mut raw, "X", "x1", 1000, &files(&["a", "b", "c", "d", "e"]));
    Scenario {
        name: "Steps 1-3 worked example",
        raw,
        links: vec![
            ("U", "u2", "V", "v1", vec!["c.c"]),
            ("U", "u2", "X", "x1", vec!["a.c", "b.c", "c.c"]),
            ("W", "w1", "V", "v2", vec!["d.c"]),
            ("W", "w1", "X", "x1", vec!["d.c", "e.c"]),
        ],
    }
}

/// A Step-4 scenario and the audit rule expected to remove C's second
/// snapshot's correspondences.
pub struct Removal {
    pub scenario: Scenario,
    pub rule: &'static str,
}

/// Step 4 removals. In each, C's first snapshot is copied identically
/// into P, and a later link from P back into C must be removed.
pub fn removals() -> Vec<Removal> {
    // Case I: P's copy comes back to C unchanged.
    let mut d = RawCorpus::default();
    add(&mut d, "C", "v1", 100, &files(&["f"]));
    add(&mut d, "P", "v1", 200, &files(&["f"]));
    let mut c2 = files(&["f"]);
    c2.extend(files(&["g"]));
    add(&mut d, "C", "v2", 300, &c2);

    // Case II: C edits its own file; P's identical copy of the original looks
    // like an origin.
    let mut e = RawCorpus::default();
    add(&mut e, "C", "v1", 100, &files(&["h"]));
    add(&mut e, "P", "v1", 200, &files(&["h"]));
    add(&mut e, "C", "v2", 300, &edited(&["h"], &[15]));

    // Case III: P edits its copy; C's later edit is similar to P's version only.
    let mut f = RawCorpus::default();
    add(&mut f, "C", "v1", 100, &files(&["k"]));
    add(&mut f, "P", "v1", 200, &files(&["k"]));
    add(&mut f, "P", "v2", 300, &edited(&["k"], &[10]));
    add(&mut f, "C", "v2", 400, &edited(&["k"], &[10, 30]));

    vec![
        Removal {
            scenario: Scenario {
                name: "Step 4-I identical file predates the origin",
                raw: d,
                links: vec![("C", "v1", "P", "v1", vec!["f.c"])],
            },
            rule: "C6/4-I",
        },
        Removal {
            scenario: Scenario {
                name: "Step 4-II origin file already in the consumer",
                raw: e,
                links: vec![("C", "v1", "P", "v1", vec!["h.c"])],
            },
            rule: "C6/4-II",
        },
        Removal {
            scenario: Scenario {
                name: "Step 4-III origin file came from the consumer",
                raw: f,
                links: vec![("C", "v1", "P", "v1", vec!["k.c"])],
            },
            rule: "C6/4-III",
        },
    ]
}

//! Small random corpora with many exact and near copies across projects.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{RawCorpus, RawSnapshot};

const WORDS: &[&str] = &[
    "a", "b", "c", "n", "i", "x", "buf", "len", "ptr", "node", "next", "val", "int", "char", "if", "for",
    "return", "while", "(", ")", "{", "}", ";", "=", "+", "*", "[", "]", ",", "0", "1",
];

fn text(rng: &mut ChaCha8Rng, tokens: usize) -> Vec<String> {
    (0..tokens).map(|_| WORDS.choose(rng).unwrap().to_string()).collect()
}

fn mutate(rng: &mut ChaCha8Rng, tokens: &[String]) -> Vec<String> {
    let mut out = tokens.to_vec();
    for _ in 0..rng.gen_range(1..=2) {
        if out.is_empty() {
            break;
        }
        let i = rng.gen_range(0..out.len());
        match rng.gen_range(0..3) {
            0 => out[i] = WORDS.choose(rng).unwrap().to_string(),
            1 => out.insert(i, WORDS.choose(rng).unwrap().to_string()),
            _ => {
                out.remove(i);
            }
        }
    }
    out
}

fn render(tokens: &[String]) -> Vec<u8> {
    let mut s = String::new();
    for line in tokens.chunks(6) {
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s.into_bytes()
}

/// At most `max_projects` projects with at most `max_files` files each,
/// counted over all of a project's snapshots.
pub fn random_corpus(seed: u64, max_projects: usize, max_files: usize) -> RawCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families: Vec<Vec<String>> = (0..24)
        .map(|_| {
            let n = match rng.gen_range(0..10) {
                0 => rng.gen_range(0..3),
                _ => rng.gen_range(8..40),
            };
            text(&mut rng, n)
        })
        .collect();
    let n_projects = rng.gen_range(2..=max_projects);
    let mut raw = RawCorpus::default();
    for p in 0..n_projects {
        let n_snapshots = rng.gen_range(1..=4);
        let per_snapshot = (max_files / n_snapshots).clamp(1, 15);
        // Few distinct times so ties across projects occur.
        let mut time = rng.gen_range(1..6) * 100;
        let mut files: Vec<(String, Vec<String>)> = Vec::new();
        for s in 0..n_snapshots {
            if s > 0 {
                time += rng.gen_range(1..4) * 100;
                for f in files.iter_mut() {
                    if rng.gen_bool(0.3) {
                        f.1 = mutate(&mut rng, &f.1);
                    }
                }
                files.retain(|_| rng.gen_bool(0.8));
            }
            let target = rng.gen_range(1..=per_snapshot);
            while files.len() < target {
                let family = families.choose(&mut rng).unwrap();
                let tokens = match rng.gen_range(0..10) {
                    0..=3 => family.clone(),
                    4..=7 => mutate(&mut rng, family),
                    _ => {
                        let n = rng.gen_range(5..30);
                        text(&mut rng, n)
                    }
                };
                let path = format!("src/f{}.c", rng.gen_range(0..40));
                if !files.iter().any(|(q, _)| *q == path) {
                    files.push((path, tokens));
                }
            }
            raw.snapshots.push(RawSnapshot {
                project: format!("p{p}"),
                tag: format!("v{s}"),
                time,
                files: files.iter().map(|(path, t)| (path.clone(), render(t))).collect(),
            });
        }
    }
    raw
}

use std::collections::{BTreeSet, HashSet};

use scmap_core::detect::DetectionReport;
use scmap_core::{ProjectId, Scalar};
use serde::{Deserialize, Serialize};

use crate::error::RepoError;
use crate::synth::truth::GroundTruth;

/// (producer, origin tag, consumer, destination tag).
pub type LinkKey = (String, String, String, String);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub link_precision: f64,
    pub link_recall: f64,
    pub file_precision: f64,
    pub file_recall: f64,
    /// Over detectable planted links whose files were (partly) attributed
    /// by some detected link: the share attributed only to the planted
    /// origin snapshot.
    pub origin_accuracy: f64,
    pub n_detected: usize,
    pub n_expected: usize,
    pub n_undetectable: usize,
    pub n_matched: usize,
    pub missed: Vec<LinkKey>,
    pub spurious: Vec<LinkKey>,
    pub wrong_origin: Vec<LinkKey>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn key(p: &ProjectId, ot: &str, c: &ProjectId, dt: &str) -> LinkKey {
    (p.to_string(), ot.to_owned(), c.to_string(), dt.to_owned())
}

/// Compares detected links with planted ones. A detected link matches when
/// producer, origin snapshot, consumer and destination snapshot all agree.
/// Precision counts matches against every planted link; recall only counts
/// planted links expected to be detectable.
pub fn score<S: Scalar>(report: &DetectionReport<S>, truth: &GroundTruth) -> Result<Scores, RepoError> {
    let known: HashSet<&ProjectId> = truth.projects.iter().collect();
    for l in &report.links {
        for p in [&l.producer, &l.consumer] {
            if !known.contains(p) {
                return Err(RepoError::CorpusMismatch(format!("project {p} is not in the ground truth")));
            }
        }
    }

    let planted: HashSet<LinkKey> = truth
        .links
        .iter()
        .map(|l| key(&l.producer, &l.origin_tag, &l.consumer, &l.dest_tag))
        .collect();
    let expected: Vec<_> = truth.detectable().collect();
    let detected: HashSet<LinkKey> = report
        .links
        .iter()
        .map(|l| key(&l.producer, &l.origin_tag, &l.consumer, &l.dest_tag))
        .collect();

    let mut spurious: Vec<LinkKey> = detected.iter().filter(|k| !planted.contains(*k)).cloned().collect();
    spurious.sort();
    let mut missed = Vec::new();
    let mut n_matched = 0;
    for t in &expected {
        let k = key(&t.producer, &t.origin_tag, &t.consumer, &t.dest_tag);
        if detected.contains(&k) {
            n_matched += 1;
        } else {
            missed.push(k);
        }
    }

    type FileKey = (LinkKey, String, String);
    let planted_files: HashSet<FileKey> = truth
        .links
        .iter()
        .flat_map(|l| {
            let k = key(&l.producer, &l.origin_tag, &l.consumer, &l.dest_tag);
            l.files.iter().map(move |f| (k.clone(), f.dest_path.clone(), f.origin_path.clone()))
        })
        .collect();
    let detected_files: HashSet<FileKey> = report
        .links
        .iter()
        .flat_map(|l| {
            let k = key(&l.producer, &l.origin_tag, &l.consumer, &l.dest_tag);
            l.files.iter().map(move |f| (k.clone(), f.dest_path.clone(), f.origin_path.clone()))
        })
        .collect();
    let expected_files: Vec<FileKey> = expected
        .iter()
        .flat_map(|l| {
            let k = key(&l.producer, &l.origin_tag, &l.consumer, &l.dest_tag);
            l.files.iter().map(move |f| (k.clone(), f.dest_path.clone(), f.origin_path.clone()))
        })
        .collect();
    let file_hits = detected_files.iter().filter(|f| planted_files.contains(*f)).count();
    let file_found = expected_files.iter().filter(|f| detected_files.contains(*f)).count();

    let mut considered = 0;
    let mut wrong_origin = Vec::new();
    for t in &expected {
        let paths: BTreeSet<&str> = t.files.iter().map(|f| f.dest_path.as_str()).collect();
        let attributed: Vec<_> = report
            .links
            .iter()
            .filter(|l| l.consumer == t.consumer && l.dest_tag == t.dest_tag)
            .filter(|l| l.files.iter().any(|f| paths.contains(f.dest_path.as_str())))
            .collect();
        if attributed.is_empty() {
            continue;
        }
        considered += 1;
        if attributed
            .iter()
            .any(|l| l.producer != t.producer || l.origin_tag != t.origin_tag)
        {
            wrong_origin.push(key(&t.producer, &t.origin_tag, &t.consumer, &t.dest_tag));
        }
    }

    Ok(Scores {
        link_precision: ratio(detected.len() - spurious.len(), detected.len()),
        link_recall: ratio(n_matched, expected.len()),
        file_precision: ratio(file_hits, detected_files.len()),
        file_recall: ratio(file_found, expected_files.len()),
        origin_accuracy: ratio(considered - wrong_origin.len(), considered),
        n_detected: detected.len(),
        n_expected: expected.len(),
        n_undetectable: truth.links.len() - expected.len(),
        n_matched,
        missed,
        spurious,
        wrong_origin,
    })
}

//! Step 5: one-way reuse and minimum file set size.

use std::collections::HashMap;

use crate::detect::audit::{AuditEntry, Rule};
use crate::detect::types::CloneLink;
use crate::model::ProjectId;
use crate::scalar::Scalar;

/// Rule 1. Between two projects the direction of the oldest link wins: links
/// in the other direction that are newer than it are removed. When both
/// directions start at the same time, only links newer than that time go.
pub fn remove_returning<S: Scalar>(
    links: Vec<CloneLink<S>>,
    audit: &mut Vec<AuditEntry>,
) -> Vec<CloneLink<S>> {
    let mut first: HashMap<(&ProjectId, &ProjectId), i64> = HashMap::new();
    for l in &links {
        let t = first.entry((&l.producer, &l.consumer)).or_insert(i64::MAX);
        *t = (*t).min(l.link_time());
    }
    let keep: Vec<bool> = links
        .iter()
        .map(|l| {
            let forward = first[&(&l.producer, &l.consumer)];
            match first.get(&(&l.consumer, &l.producer)) {
                None => true,
                Some(&reverse) if forward < reverse => true,
                Some(&reverse) if forward == reverse => l.link_time() <= forward,
                Some(_) => false,
            }
        })
        .collect();
    let mut out = Vec::with_capacity(links.len());
    for (l, keep) in links.into_iter().zip(keep) {
        if keep {
            out.push(l);
        } else {
            audit.push(
                AuditEntry::new(
                    "5-1",
                    Rule::ReturningReuse,
                    (&l.producer, &l.origin_tag),
                    (&l.consumer, &l.dest_tag),
                )
                .detail("an older link runs the other way"),
            );
        }
    }
    out
}

/// Rule 2. Drops links with fewer than `min_files` correspondences.
pub fn remove_small<S: Scalar>(
    links: Vec<CloneLink<S>>,
    min_files: usize,
    audit: &mut Vec<AuditEntry>,
) -> Vec<CloneLink<S>> {
    links
        .into_iter()
        .filter(|l| {
            let keep = l.n_files() >= min_files;
            if !keep {
                audit.push(
                    AuditEntry::new(
                        "5-2",
                        Rule::SmallFileSet,
                        (&l.producer, &l.origin_tag),
                        (&l.consumer, &l.dest_tag),
                    )
                    .detail(format!("{} files < {min_files}", l.n_files())),
                );
            }
            keep
        })
        .collect()
}

/// Both Step-5 rules, in order.
pub fn prune_suspicious<S: Scalar>(
    links: Vec<CloneLink<S>>,
    min_files: usize,
    audit: &mut Vec<AuditEntry>,
) -> Vec<CloneLink<S>> {
    let links = remove_returning(links, audit);
    remove_small(links, min_files, audit)
}

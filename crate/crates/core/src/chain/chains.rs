use std::collections::{BTreeMap, HashMap, HashSet};

use crate::detect::CloneLink;
use crate::model::{Digest, ProjectId};
use crate::scalar::Scalar;

/// Maximal time-consistent project chains, as sequences of link indices.
///
/// A chain `l1, ..., lk` has `consumer(li) == producer(li+1)` and
/// `dest_time(li) <= origin_time(li+1)`, and never visits a project twice. It
/// is maximal when no link can be prepended or appended under the same rules.
pub fn project_chains<S: Scalar>(links: &[CloneLink<S>]) -> Vec<Vec<usize>> {
    let mut by_producer: HashMap<&ProjectId, Vec<usize>> = HashMap::new();
    let mut by_consumer: HashMap<&ProjectId, Vec<usize>> = HashMap::new();
    for (i, l) in links.iter().enumerate() {
        by_producer.entry(&l.producer).or_default().push(i);
        by_consumer.entry(&l.consumer).or_default().push(i);
    }
    let walk = ChainWalk {
        links,
        by_producer,
        by_consumer,
    };
    let mut out = Vec::new();
    for start in 0..links.len() {
        let l = &links[start];
        let mut visited: HashSet<&ProjectId> = [&l.producer, &l.consumer].into_iter().collect();
        let mut path = vec![start];
        walk.extend(&mut path, &mut visited, &mut out);
    }
    out
}

struct ChainWalk<'a, S: Scalar> {
    links: &'a [CloneLink<S>],
    by_producer: HashMap<&'a ProjectId, Vec<usize>>,
    by_consumer: HashMap<&'a ProjectId, Vec<usize>>,
}

impl<'a, S: Scalar> ChainWalk<'a, S> {
    fn extend(&self, path: &mut Vec<usize>, visited: &mut HashSet<&'a ProjectId>, out: &mut Vec<Vec<usize>>) {
        let last = &self.links[*path.last().unwrap()];
        let mut extended = false;
        for &next in self.by_producer.get(&last.consumer).into_iter().flatten() {
            let l = &self.links[next];
            if l.origin_time >= last.dest_time && !visited.contains(&l.consumer) {
                extended = true;
                visited.insert(&l.consumer);
                path.push(next);
                self.extend(path, visited, out);
                path.pop();
                visited.remove(&l.consumer);
            }
        }
        if !extended && !self.prependable(path[0], visited) {
            out.push(path.clone());
        }
    }

    fn prependable(&self, first: usize, visited: &HashSet<&ProjectId>) -> bool {
        let first = &self.links[first];
        self.by_consumer
            .get(&first.producer)
            .into_iter()
            .flatten()
            .map(|&i| &self.links[i])
            .any(|l| l.dest_time <= first.origin_time && !visited.contains(&l.producer))
    }
}

/// Number of maximal project chains of each length (in links).
pub fn project_chain_lengths<S: Scalar>(links: &[CloneLink<S>]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for chain in project_chains(links) {
        *h.entry(chain.len()).or_insert(0) += 1;
    }
    h
}

/// Lengths of file reuse paths, one per path end.
///
/// Nodes are file correspondences. One correspondence continues another
/// when the second link's producer is the first link's consumer, its origin
/// snapshot is not older than the first destination snapshot, and its origin
/// file either has the destination content or sits at the destination path.
/// For every correspondence without a continuation the length of the
/// longest path ending in it is counted.
pub fn file_path_lengths<S: Scalar>(links: &[CloneLink<S>]) -> BTreeMap<usize, usize> {
    let nodes: Vec<(usize, usize)> = links
        .iter()
        .enumerate()
        .flat_map(|(li, l)| (0..l.files.len()).map(move |ci| (li, ci)))
        .collect();
    let mut by_digest: HashMap<(&ProjectId, &Digest), Vec<usize>> = HashMap::new();
    let mut by_path: HashMap<(&ProjectId, &str), Vec<usize>> = HashMap::new();
    for (n, &(li, ci)) in nodes.iter().enumerate() {
        let l = &links[li];
        let c = &l.files[ci];
        by_digest.entry((&l.producer, &c.origin_digest)).or_default().push(n);
        by_path.entry((&l.producer, c.origin_path.as_str())).or_default().push(n);
    }

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut has_next = vec![false; nodes.len()];
    for (n, &(li, ci)) in nodes.iter().enumerate() {
        let l = &links[li];
        let c = &l.files[ci];
        let mut next: Vec<usize> = by_digest
            .get(&(&l.consumer, &c.dest_digest))
            .into_iter()
            .flatten()
            .chain(by_path.get(&(&l.consumer, c.dest_path.as_str())).into_iter().flatten())
            .copied()
            .filter(|&m| links[nodes[m].0].origin_time >= l.dest_time)
            .collect();
        next.sort_unstable();
        next.dedup();
        has_next[n] = !next.is_empty();
        for m in next {
            preds[m].push(n);
        }
    }

    // Every edge goes to a strictly later destination time.
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&n| links[nodes[n].0].dest_time);
    let mut longest = vec![1usize; nodes.len()];
    for &n in &order {
        longest[n] = 1 + preds[n].iter().map(|&p| longest[p]).max().unwrap_or(0);
    }

    let mut h = BTreeMap::new();
    for n in (0..nodes.len()).filter(|&n| !has_next[n]) {
        *h.entry(longest[n]).or_insert(0) += 1;
    }
    h
}

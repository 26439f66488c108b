use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::detect::CloneLink;
use crate::model::ProjectId;
use crate::scalar::Scalar;

/// A weakly connected component of the project-level reuse graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SupplyChainMap<S: Scalar = f64> {
    pub map_id: usize,
    pub members: BTreeSet<ProjectId>,
    pub links: Vec<CloneLink<S>>,
}

impl<S: Scalar> SupplyChainMap<S> {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Groups links into maps. Maps are numbered by descending size, ties going to
/// the map whose smallest member id sorts first. Links keep their input order.
pub fn build_maps<S: Scalar>(links: &[CloneLink<S>]) -> Vec<SupplyChainMap<S>> {
    let projects: BTreeSet<&ProjectId> = links
        .iter()
        .flat_map(|l| [&l.producer, &l.consumer])
        .collect();
    let slot: BTreeMap<&ProjectId, usize> = projects.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut uf = UnionFind::<usize>::new(projects.len());
    for l in links {
        uf.union(slot[&l.producer], slot[&l.consumer]);
    }

    let mut groups: BTreeMap<usize, (BTreeSet<ProjectId>, Vec<CloneLink<S>>)> = BTreeMap::new();
    for p in &projects {
        groups.entry(uf.find(slot[p])).or_default().0.insert((*p).clone());
    }
    for l in links {
        groups.get_mut(&uf.find(slot[&l.producer])).unwrap().1.push(l.clone());
    }

    let mut maps: Vec<_> = groups.into_values().collect();
    maps.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.first().cmp(&b.0.first())));
    maps.into_iter()
        .enumerate()
        .map(|(map_id, (members, links))| SupplyChainMap { map_id, members, links })
        .collect()
}

/// Distinct producers per consumer and distinct consumers per producer.
pub(crate) fn degrees<S: Scalar>(
    links: &[CloneLink<S>],
) -> (BTreeMap<ProjectId, usize>, BTreeMap<ProjectId, usize>) {
    let mut incoming: BTreeMap<&ProjectId, BTreeSet<&ProjectId>> = BTreeMap::new();
    let mut outgoing: BTreeMap<&ProjectId, BTreeSet<&ProjectId>> = BTreeMap::new();
    for l in links {
        incoming.entry(&l.consumer).or_default().insert(&l.producer);
        outgoing.entry(&l.producer).or_default().insert(&l.consumer);
        incoming.entry(&l.producer).or_default();
        outgoing.entry(&l.consumer).or_default();
    }
    let count = |m: BTreeMap<&ProjectId, BTreeSet<&ProjectId>>| {
        m.into_iter().map(|(k, v)| (k.clone(), v.len())).collect()
    };
    (count(incoming), count(outgoing))
}

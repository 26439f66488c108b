use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::maps::degrees;
use crate::detect::CloneLink;
use crate::model::ProjectId;
use crate::scalar::Scalar;

/// Out-degree above which a project counts as a hub.
pub const DEFAULT_HUB_THRESHOLD: usize = 5;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeMetrics {
    pub in_degree: BTreeMap<ProjectId, usize>,
    pub out_degree: BTreeMap<ProjectId, usize>,
    /// Degree value to number of projects.
    pub in_histogram: BTreeMap<usize, usize>,
    pub out_histogram: BTreeMap<usize, usize>,
    /// Projects with out-degree above the hub threshold, by descending
    /// out-degree.
    pub hubs: Vec<(ProjectId, usize)>,
    pub hub_threshold: usize,
}

fn histogram(degrees: &BTreeMap<ProjectId, usize>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &d in degrees.values() {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

pub fn degree_metrics<S: Scalar>(links: &[CloneLink<S>], hub_threshold: usize) -> DegreeMetrics {
    let (in_degree, out_degree) = degrees(links);
    let mut hubs: Vec<(ProjectId, usize)> = out_degree
        .iter()
        .filter(|(_, &d)| d > hub_threshold)
        .map(|(p, &d)| (p.clone(), d))
        .collect();
    hubs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    DegreeMetrics {
        in_histogram: histogram(&in_degree),
        out_histogram: histogram(&out_degree),
        in_degree,
        out_degree,
        hubs,
        hub_threshold,
    }
}

/// Link file-count buckets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SizeBucket {
    #[serde(rename = "<20")]
    Under20,
    #[serde(rename = "20-100")]
    Upto100,
    #[serde(rename = "101-1000")]
    Upto1000,
    #[serde(rename = ">1000")]
    Over1000,
}

impl SizeBucket {
    pub const ALL: [SizeBucket; 4] = [
        SizeBucket::Under20,
        SizeBucket::Upto100,
        SizeBucket::Upto1000,
        SizeBucket::Over1000,
    ];

    pub fn of(n_files: usize) -> Self {
        match n_files {
            0..=19 => SizeBucket::Under20,
            20..=100 => SizeBucket::Upto100,
            101..=1000 => SizeBucket::Upto1000,
            _ => SizeBucket::Over1000,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SizeBucket::Under20 => "<20",
            SizeBucket::Upto100 => "20-100",
            SizeBucket::Upto1000 => "101-1000",
            SizeBucket::Over1000 => ">1000",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileSetSizes {
    /// File count of every link, in link order.
    pub sizes: Vec<usize>,
    pub buckets: BTreeMap<SizeBucket, usize>,
}

pub fn file_set_size_metrics<S: Scalar>(links: &[CloneLink<S>]) -> FileSetSizes {
    let sizes: Vec<usize> = links.iter().map(|l| l.n_files()).collect();
    let mut buckets: BTreeMap<SizeBucket, usize> = SizeBucket::ALL.iter().map(|&b| (b, 0)).collect();
    for &n in &sizes {
        *buckets.get_mut(&SizeBucket::of(n)).unwrap() += 1;
    }
    FileSetSizes { sizes, buckets }
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use time::OffsetDateTime;

use crate::chain::maps::{build_maps, degrees};
use crate::detect::CloneLink;
use crate::model::ProjectId;
use crate::scalar::Scalar;

/// Calendar year (UTC) of a Unix timestamp.
pub fn year_of(timestamp: i64) -> i32 {
    OffsetDateTime::from_unix_timestamp(timestamp)
        .map(|t| t.year())
        .unwrap_or(if timestamp < 0 { i32::MIN } else { i32::MAX })
}

/// Split of map members into pure consumers, hubs and the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Composition<S: Scalar = f64> {
    pub n_members: usize,
    /// Out-degree zero.
    pub n_consumers: usize,
    /// Out-degree above the hub threshold.
    pub n_hubs: usize,
    pub n_others: usize,
    pub consumer_pct: S,
    pub hub_pct: S,
    pub other_pct: S,
}

fn pct<S: Scalar>(part: usize, whole: usize) -> S {
    if whole == 0 {
        S::zero()
    } else {
        S::from_ratio(100 * part as u64, whole as u64)
    }
}

pub fn composition<S: Scalar>(links: &[CloneLink<S>], hub_threshold: usize) -> Composition<S> {
    let (_, out) = degrees(links);
    let n_members = out.len();
    let n_consumers = out.values().filter(|&&d| d == 0).count();
    let n_hubs = out.values().filter(|&&d| d > hub_threshold).count();
    let n_others = n_members - n_consumers - n_hubs;
    Composition {
        n_members,
        n_consumers,
        n_hubs,
        n_others,
        consumer_pct: pct(n_consumers, n_members),
        hub_pct: pct(n_hubs, n_members),
        other_pct: pct(n_others, n_members),
    }
}

/// State of the maps built from links up to the end of one year.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct YearState<S: Scalar = f64> {
    pub year: i32,
    pub n_links: usize,
    pub n_maps: usize,
    pub largest_map: usize,
    pub composition: Composition<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Evolution<S: Scalar = f64> {
    pub years: Vec<YearState<S>>,
    /// Out-degree at the end of each year, for every project that ends up
    /// with a nonzero out-degree.
    pub out_degree_series: BTreeMap<ProjectId, Vec<(i32, usize)>>,
}

/// Rebuilds the maps at the end of every year from the first link year to
/// the last, attributing each link to the year of its link time.
pub fn evolve<S: Scalar>(links: &[CloneLink<S>], hub_threshold: usize) -> Evolution<S> {
    let years: BTreeSet<i32> = links.iter().map(|l| year_of(l.link_time())).collect();
    let (Some(&first), Some(&last)) = (years.first(), years.last()) else {
        return Evolution {
            years: Vec::new(),
            out_degree_series: BTreeMap::new(),
        };
    };
    let (_, final_out) = degrees(links);
    let mut out_degree_series: BTreeMap<ProjectId, Vec<(i32, usize)>> = final_out
        .iter()
        .filter(|(_, &d)| d > 0)
        .map(|(p, _)| (p.clone(), Vec::new()))
        .collect();

    let mut states = Vec::new();
    for year in first..=last {
        let upto: Vec<CloneLink<S>> = links
            .iter()
            .filter(|l| year_of(l.link_time()) <= year)
            .cloned()
            .collect();
        let maps = build_maps(&upto);
        let (_, out) = degrees(&upto);
        for (p, series) in out_degree_series.iter_mut() {
            series.push((year, out.get(p).copied().unwrap_or(0)));
        }
        states.push(YearState {
            year,
            n_links: upto.len(),
            n_maps: maps.len(),
            largest_map: maps.first().map_or(0, |m| m.size()),
            composition: composition(&upto, hub_threshold),
        });
    }
    Evolution {
        years: states,
        out_degree_series,
    }
}

//! Supply chain maps built from clone-and-own links, and metrics over them.

pub mod chains;
pub mod evolve;
pub mod export;
pub mod maps;
pub mod metrics;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use chains::{file_path_lengths, project_chain_lengths, project_chains};
pub use evolve::{composition, evolve, year_of, Composition, Evolution, YearState};
pub use export::{project_edges, to_dot, write_edges_csv, ExportFormat, MapsDocument, ProjectEdge, SCHEMA_VERSION};
pub use maps::{build_maps, SupplyChainMap};
pub use metrics::{degree_metrics, file_set_size_metrics, DegreeMetrics, FileSetSizes, SizeBucket, DEFAULT_HUB_THRESHOLD};

use crate::detect::CloneLink;
use crate::scalar::Scalar;

/// Every network metric over one set of links.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct MetricsReport<S: Scalar = f64> {
    pub n_links: usize,
    pub map_sizes: Vec<usize>,
    pub degree: DegreeMetrics,
    pub file_sets: FileSetSizes,
    pub project_chains: BTreeMap<usize, usize>,
    pub file_paths: BTreeMap<usize, usize>,
    pub composition: Composition<S>,
    pub evolution: Evolution<S>,
}

impl<S: Scalar> MetricsReport<S> {
    pub fn compute(links: &[CloneLink<S>], hub_threshold: usize) -> Self {
        MetricsReport {
            n_links: links.len(),
            map_sizes: build_maps(links).iter().map(|m| m.size()).collect(),
            degree: degree_metrics(links, hub_threshold),
            file_sets: file_set_size_metrics(links),
            project_chains: project_chain_lengths(links),
            file_paths: file_path_lengths(links),
            composition: composition(links, hub_threshold),
            evolution: evolve(links, hub_threshold),
        }
    }
}

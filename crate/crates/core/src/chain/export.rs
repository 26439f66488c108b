use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::chain::maps::{degrees, SupplyChainMap};
use crate::chain::MetricsReport;
use crate::error::CoreError;
use crate::model::ProjectId;
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(CoreError::UnknownFormat(other.to_owned())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct MapsDocument<S: Scalar = f64> {
    pub schema_version: u32,
    pub maps: Vec<SupplyChainMap<S>>,
}

impl<S: Scalar> MapsDocument<S> {
    pub fn new(maps: Vec<SupplyChainMap<S>>) -> Self {
        MapsDocument {
            schema_version: SCHEMA_VERSION,
            maps,
        }
    }

    pub fn to_json(&self) -> Result<String, CoreError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CoreError> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(CoreError::SchemaVersion {
                found: doc.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        Ok(doc)
    }
}

/// All snapshot-level links from one producer to one consumer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectEdge {
    pub map_id: usize,
    pub producer: ProjectId,
    pub consumer: ProjectId,
    pub n_links: usize,
    /// File count of the earliest link.
    pub first_files: usize,
    pub total_files: usize,
    pub first_time: i64,
}

pub fn project_edges<S: Scalar>(maps: &[SupplyChainMap<S>]) -> Vec<ProjectEdge> {
    let mut out = Vec::new();
    for m in maps {
        let mut edges: BTreeMap<(&ProjectId, &ProjectId), ProjectEdge> = BTreeMap::new();
        for l in &m.links {
            let e = edges.entry((&l.producer, &l.consumer)).or_insert_with(|| ProjectEdge {
                map_id: m.map_id,
                producer: l.producer.clone(),
                consumer: l.consumer.clone(),
                n_links: 0,
                first_files: 0,
                total_files: 0,
                first_time: i64::MAX,
            });
            e.n_links += 1;
            e.total_files += l.n_files();
            if l.link_time() < e.first_time {
                e.first_time = l.link_time();
                e.first_files = l.n_files();
            }
        }
        out.extend(edges.into_values());
    }
    out
}

fn quote(id: &str) -> String {
    let mut s = String::with_capacity(id.len() + 2);
    s.push('"');
    for ch in id.chars() {
        match ch {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

/// Graphviz rendering: one cluster per map, node `size` is the out-degree and
/// edge `weight` the file count of the first reuse.
pub fn to_dot<S: Scalar>(maps: &[SupplyChainMap<S>]) -> String {
    let mut s = String::from("digraph supply_chain {\n  node [shape=ellipse];\n");
    for m in maps {
        let (_, out) = degrees(&m.links);
        let _ = writeln!(s, "  subgraph cluster_{} {{", m.map_id);
        let _ = writeln!(s, "    label={};", quote(&format!("map {} ({} projects)", m.map_id, m.size())));
        for p in &m.members {
            let d = out.get(p).copied().unwrap_or(0);
            let _ = writeln!(
                s,
                "    {} [size={d}, width={:.2}];",
                quote(p.as_str()),
                0.75 + 0.25 * d as f64
            );
        }
        s.push_str("  }\n");
    }
    for e in project_edges(maps) {
        let _ = writeln!(
            s,
            "  {} -> {} [weight={}, label={}, links={}];",
            quote(e.producer.as_str()),
            quote(e.consumer.as_str()),
            e.first_files,
            quote(&e.first_files.to_string()),
            e.n_links
        );
    }
    s.push_str("}\n");
    s
}

fn csv_err(e: csv::Error) -> CoreError {
    CoreError::Io(io::Error::other(e))
}

/// Project-level edge list.
pub fn write_edges_csv<S: Scalar, W: io::Write>(maps: &[SupplyChainMap<S>], w: W) -> Result<(), CoreError> {
    let mut wtr = csv::Writer::from_writer(w);
    for e in project_edges(maps) {
        wtr.serialize(e).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Metric tables as `(file name, CSV text)` pairs.
pub fn metrics_csv<S: Scalar>(m: &MetricsReport<S>) -> Result<Vec<(&'static str, String)>, CoreError> {
    fn table<W: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>>(fill: W) -> Result<String, CoreError> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        fill(&mut wtr).map_err(csv_err)?;
        let bytes = wtr.into_inner().map_err(|e| CoreError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    let degree = table(|w| {
        w.write_record(["project", "in_degree", "out_degree", "hub"])?;
        for (p, &out) in &m.degree.out_degree {
            let inn = m.degree.in_degree.get(p).copied().unwrap_or(0);
            w.write_record([
                p.as_str(),
                &inn.to_string(),
                &out.to_string(),
                &(out > m.degree.hub_threshold).to_string(),
            ])?;
        }
        Ok(())
    })?;
    let sizes = table(|w| {
        w.write_record(["bucket", "links"])?;
        for (b, n) in &m.file_sets.buckets {
            w.write_record([b.label(), &n.to_string()])?;
        }
        Ok(())
    })?;
    let chains = table(|w| {
        w.write_record(["kind", "length", "count"])?;
        for (len, n) in &m.project_chains {
            w.write_record(["project", &len.to_string(), &n.to_string()])?;
        }
        for (len, n) in &m.file_paths {
            w.write_record(["file", &len.to_string(), &n.to_string()])?;
        }
        Ok(())
    })?;
    let evolution = table(|w| {
        w.write_record([
            "year",
            "links",
            "maps",
            "largest_map",
            "members",
            "consumer_pct",
            "hub_pct",
            "other_pct",
        ])?;
        for y in &m.evolution.years {
            let c = &y.composition;
            w.write_record([
                y.year.to_string(),
                y.n_links.to_string(),
                y.n_maps.to_string(),
                y.largest_map.to_string(),
                c.n_members.to_string(),
                c.consumer_pct.to_string(),
                c.hub_pct.to_string(),
                c.other_pct.to_string(),
            ])?;
        }
        Ok(())
    })?;
    let series = table(|w| {
        w.write_record(["project", "year", "out_degree"])?;
        for (p, points) in &m.evolution.out_degree_series {
            for (year, d) in points {
                w.write_record([p.as_str(), &year.to_string(), &d.to_string()])?;
            }
        }
        Ok(())
    })?;
    Ok(vec![
        ("degree.csv", degree),
        ("file_set_sizes.csv", sizes),
        ("chain_lengths.csv", chains),
        ("evolution.csv", evolution),
        ("out_degree_series.csv", series),
    ])
}

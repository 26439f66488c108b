use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use scmap_core::chain::{self, build_maps, to_dot, write_edges_csv, ExportFormat, MapsDocument, MetricsReport};
use scmap_core::detect::{detect_all, AuditEntry, Detection};
use scmap_core::{Config, Corpus, ExtensionMap, Report};
use scmap_repo::synth::{self, random_plan, EcosystemPlan, RandomPlanParams, Scores};
use scmap_repo::{enumerate_projects, ingest, ProjectSummary};
use serde::{Deserialize, Serialize};

use crate::args::{DetectArgs, DetectionFlags, ExportArgs, IndexArgs, MetricsArgs, PlanArgs, ReportArgs, SimulateArgs, ValidateArgs};
use crate::error::{CliError, Result};
use crate::table;

pub const INDEX_SCHEMA_VERSION: u32 = 1;

/// What `index` leaves for `detect`.
#[derive(Debug, Serialize, Deserialize)]
pub struct IndexCache {
    pub schema_version: u32,
    pub extensions: ExtensionMap,
    pub summaries: Vec<ProjectSummary>,
    pub warnings: Vec<String>,
    pub corpus: Corpus,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn read(path: &Path, hint: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Data(format!("{} not found; {hint}", path.display()))
        } else {
            CliError::io(path, e)
        }
    })
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))
}

fn detection_config(flags: &DetectionFlags, extensions: ExtensionMap) -> Result<Config> {
    let config = Config {
        extensions,
        ..Config::default()
    }
    .with_threshold(flags.similarity_threshold)
    .map_err(|e| CliError::Config(e.to_string()))?
    .with_min_files(flags.min_files);
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

pub fn index(args: &IndexArgs) -> Result<()> {
    let extensions = ExtensionMap::for_languages(&args.languages);
    let manifest = enumerate_projects(&args.manifest).map_err(|e| CliError::Config(e.to_string()))?;
    for w in &manifest.warnings {
        log::warn!("manifest row {} ({}): {}", w.row, w.id, w.reason);
    }
    if manifest.projects.is_empty() {
        return Err(CliError::NothingToDo(format!("{} lists no usable repositories", args.manifest.display())));
    }
    let ingested = ingest(&manifest.projects, &extensions).map_err(|e| CliError::Data(e.to_string()))?;
    let mut warnings: Vec<String> = manifest
        .warnings
        .iter()
        .map(|w| format!("manifest row {} ({}): {}", w.row, w.id, w.reason))
        .collect();
    warnings.extend(ingested.warnings);

    let rows: Vec<Vec<String>> = ingested
        .summaries
        .iter()
        .map(|s| vec![s.id.clone(), s.snapshots.to_string(), s.files.to_string(), s.unique_files.to_string()])
        .collect();
    print!("{}", table::render(&["project", "snapshots", "files", "unique files"], &rows));
    println!(
        "{} projects, {} snapshots, {} unique files, {} warnings",
        ingested.summaries.len(),
        ingested.corpus.snapshots.len(),
        ingested.corpus.unique_files(),
        warnings.len()
    );

    let cache = IndexCache {
        schema_version: INDEX_SCHEMA_VERSION,
        extensions,
        summaries: ingested.summaries,
        warnings,
        corpus: ingested.corpus,
    };
    write(&args.out.join("corpus.json"), json(&cache)?)
}

pub fn load_index(path: &Path) -> Result<IndexCache> {
    let text = read(path, "run `scmap index --manifest ...` first")?;
    let cache: IndexCache =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if cache.schema_version != INDEX_SCHEMA_VERSION {
        return Err(CliError::Data(format!(
            "{}: schema version {} (expected {INDEX_SCHEMA_VERSION}); rerun `scmap index`",
            path.display(),
            cache.schema_version
        )));
    }
    Ok(cache)
}

fn print_stepwise(report: &Report) {
    let rows: Vec<Vec<String>> = report
        .stepwise
        .iter()
        .map(|r| {
            vec![
                r.step.clone(),
                r.n_projects.to_string(),
                r.n_links.map_or_else(|| "-".to_owned(), |n| n.to_string()),
                r.n_files.to_string(),
                r.n_unique_files.to_string(),
            ]
        })
        .collect();
    print!("{}", table::render(&["step", "# projects", "# links", "# files", "# unique files"], &rows));
}

fn print_audit_summary(audit: &[AuditEntry]) {
    let mut by_rule: BTreeMap<String, usize> = BTreeMap::new();
    for e in audit {
        *by_rule.entry(format!("step {} [{}]", e.step, e.rule)).or_default() += 1;
    }
    for (rule, n) in by_rule {
        println!("  removed by {rule}: {n}");
    }
}

/// Runs detection and writes report.json and audit.json under `out`.
fn run_detection(corpus: &Corpus, config: Config, out: &Path) -> Result<Detection> {
    let detection = detect_all(corpus, config).map_err(|e| CliError::Data(e.to_string()))?;
    write(&out.join("report.json"), detection.report.to_json().map_err(|e| CliError::Data(e.to_string()))?)?;
    write(&out.join("audit.json"), json(&detection.audit)?)?;
    Ok(detection)
}

pub fn detect(args: &DetectArgs) -> Result<()> {
    let path = args.index.clone().unwrap_or_else(|| args.out.join("corpus.json"));
    let cache = load_index(&path)?;
    let config = detection_config(&args.detection, cache.extensions.clone())?;
    let detection = run_detection(&cache.corpus, config, &args.out)?;
    print_stepwise(&detection.report);
    print_audit_summary(&detection.audit);
    if !args.sweep.is_empty() {
        let rows = detection.sweep(args.sweep.iter().copied());
        let mut csv = String::from("min_files,n_projects,n_links\n");
        let mut printed = Vec::new();
        for r in &rows {
            csv.push_str(&format!("{},{},{}\n", r.min_files, r.n_projects, r.n_links));
            printed.push(vec![r.min_files.to_string(), r.n_projects.to_string(), r.n_links.to_string()]);
        }
        print!("{}", table::render(&["min files", "# projects", "# links"], &printed));
        write(&args.out.join("sweep.csv"), csv)?;
    }
    Ok(())
}

pub fn load_report(input: &ReportArgs) -> Result<Report> {
    let path = input.report.clone().unwrap_or_else(|| input.out.join("report.json"));
    let text = read(&path, "run `scmap detect` first")?;
    Report::from_json(&text).map_err(|e| CliError::Data(format!("{}: malformed detection report: {e}", path.display())))
}

fn size_histogram(sizes: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &s in sizes {
        *h.entry(s).or_default() += 1;
    }
    h
}

pub fn map(args: &ReportArgs) -> Result<()> {
    let report = load_report(args)?;
    let maps = build_maps(&report.links);
    let members: usize = maps.iter().map(|m| m.size()).sum();
    println!("{} maps, {} member projects, {} links", maps.len(), members, report.links.len());
    let sizes: Vec<usize> = maps.iter().map(|m| m.size()).collect();
    print!("{}", table::histogram("map size", &size_histogram(&sizes)));
    let doc = MapsDocument::new(maps);
    write(&args.out.join("maps.json"), doc.to_json().map_err(|e| CliError::Data(e.to_string()))?)
}

pub fn metrics(args: &MetricsArgs) -> Result<()> {
    let report = load_report(&args.input)?;
    let m = MetricsReport::compute(&report.links, args.hub_threshold);
    let out = &args.input.out;
    write(&out.join("metrics.json"), json(&m)?)?;
    for (name, contents) in chain::export::metrics_csv(&m).map_err(|e| CliError::Data(e.to_string()))? {
        write(&out.join("metrics").join(name), contents)?;
    }
    print!("{}", table::histogram("map size", &size_histogram(&m.map_sizes)));
    print!("{}", table::histogram("in-degree", &m.degree.in_histogram));
    print!("{}", table::histogram("out-degree", &m.degree.out_histogram));
    print!("{}", table::histogram("project chain length", &m.project_chains));
    print!("{}", table::histogram("file path length", &m.file_paths));
    let hubs: Vec<String> = m.degree.hubs.iter().map(|(p, d)| format!("{p} ({d})")).collect();
    println!("hubs (out-degree > {}): {}", args.hub_threshold, if hubs.is_empty() { "none".into() } else { hubs.join(", ") });
    let c = &m.composition;
    println!(
        "members {}: consumers {:.1}%, hubs {:.1}%, others {:.1}%",
        c.n_members, c.consumer_pct, c.hub_pct, c.other_pct
    );
    Ok(())
}

pub fn export(args: &ExportArgs) -> Result<()> {
    let report = load_report(&args.input)?;
    let maps = build_maps(&report.links);
    let out = &args.input.out;
    let (path, contents): (PathBuf, Vec<u8>) = match args.format {
        ExportFormat::Json => (
            out.join("maps.json"),
            MapsDocument::new(maps).to_json().map_err(|e| CliError::Data(e.to_string()))?.into_bytes(),
        ),
        ExportFormat::Dot => (out.join("maps.dot"), to_dot(&maps).into_bytes()),
        ExportFormat::Csv => {
            let mut buf = Vec::new();
            write_edges_csv(&maps, &mut buf).map_err(|e| CliError::Data(e.to_string()))?;
            (out.join("edges.csv"), buf)
        }
    };
    write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_plan(args: &PlanArgs) -> Result<EcosystemPlan> {
    let plan = match &args.plan {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            EcosystemPlan::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => random_plan(args.seed, &RandomPlanParams::default()),
    };
    plan.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(plan)
}

fn simulate_into(plan: &EcosystemPlan, out: &Path) -> Result<synth::Ecosystem> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let eco = synth::generate(plan, out).map_err(|e| match e {
        scmap_repo::RepoError::PlanOperation { .. } | scmap_repo::RepoError::Plan(_) => CliError::Config(e.to_string()),
        other => CliError::Data(other.to_string()),
    })?;
    let detectable = eco.truth.detectable().count();
    println!(
        "{} projects, {} snapshots, {} operations, {} planted links ({} expected detectable)",
        eco.repos.len(),
        eco.truth.snapshots.len(),
        eco.plan.operations.len(),
        eco.truth.links.len(),
        detectable
    );
    for l in eco.truth.links.iter().filter(|l| !l.expected_detectable) {
        println!(
            "  expected undetectable: {}@{} -> {}@{} ({} files): {}",
            l.producer,
            l.origin_tag,
            l.consumer,
            l.dest_tag,
            l.n_files(),
            l.undetectable_reason.as_deref().unwrap_or("-")
        );
    }
    Ok(eco)
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let plan = load_plan(&args.plan)?;
    simulate_into(&plan, &args.out)?;
    Ok(())
}

fn print_scores(s: &Scores) {
    println!("link precision  {:.4}", s.link_precision);
    println!("link recall     {:.4}", s.link_recall);
    println!("file precision  {:.4}", s.file_precision);
    println!("file recall     {:.4}", s.file_recall);
    println!("origin accuracy {:.4}", s.origin_accuracy);
    println!(
        "{} detected, {} expected, {} matched, {} planted but undetectable",
        s.n_detected, s.n_expected, s.n_matched, s.n_undetectable
    );
    for (label, keys) in [("missed", &s.missed), ("spurious", &s.spurious), ("wrong origin", &s.wrong_origin)] {
        for (p, ot, c, dt) in keys {
            println!("  {label}: {p}@{ot} -> {c}@{dt}");
        }
    }
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let plan = load_plan(&args.plan)?;
    if plan.expect.min_files != args.detection.min_files {
        log::warn!(
            "plan judges detectability at min_files {}, detecting with {}",
            plan.expect.min_files,
            args.detection.min_files
        );
    }
    let config = detection_config(&args.detection, ExtensionMap::default())?;
    let eco = simulate_into(&plan, &args.out)?;

    let manifest = enumerate_projects(&args.out.join("manifest.tsv")).map_err(|e| CliError::Data(e.to_string()))?;
    let ingested = ingest(&manifest.projects, &ExtensionMap::default()).map_err(|e| CliError::Data(e.to_string()))?;
    let detection = run_detection(&ingested.corpus, config, &args.out)?;
    print_stepwise(&detection.report);
    let scores = synth::score(&detection.report, &eco.truth).map_err(|e| CliError::Data(e.to_string()))?;
    print_scores(&scores);
    write(&args.out.join("scores.json"), json(&scores)?)
}

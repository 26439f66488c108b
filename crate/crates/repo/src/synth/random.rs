use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scmap_core::Language;
use serde::{Deserialize, Serialize};

use crate::synth::plan::{EcosystemPlan, Expectation, NoiseSpec, OpRole, Operation, PairRules, ProjectPlan, SnapshotPlan};
use crate::synth::source::MutationKind;

/// Ranges are inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPlanParams {
    pub projects: (usize, usize),
    pub operations: (usize, usize),
    pub op_files: (usize, usize),
    pub snapshots: (usize, usize),
    pub initial_files: (usize, usize),
    pub files_added: (usize, usize),
    pub max_mutation_rate: f64,
    pub min_similarity: f64,
    /// Chance that a planted operation gets an older, smaller decoy copy.
    pub decoy_probability: f64,
    pub decoy_files: (usize, usize),
    pub incidental_overlaps: (usize, usize),
    pub languages: Vec<Language>,
    pub start_time: i64,
}

impl Default for RandomPlanParams {
    fn default() -> Self {
        RandomPlanParams {
            projects: (15, 30),
            operations: (10, 40),
            op_files: (20, 40),
            snapshots: (3, 6),
            initial_files: (30, 45),
            files_added: (2, 4),
            max_mutation_rate: 0.08,
            min_similarity: 0.85,
            decoy_probability: 0.3,
            decoy_files: (3, 8),
            incidental_overlaps: (2, 5),
            languages: vec![Language::C, Language::Cpp, Language::Java],
            // 2010-01-01T00:00:00Z
            start_time: 1_262_304_000,
        }
    }
}

const HOUR: i64 = 3600;
const DAY: i64 = 24 * HOUR;

fn range<R: Rng>(rng: &mut R, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi.max(lo))
}

/// A random ecosystem plan. Copy operations only take the producer's own
/// files, and project pairs obey [`PairRules`], so every planted origin is
/// unambiguous under the detection criteria.
pub fn random_plan(seed: u64, params: &RandomPlanParams) -> EcosystemPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let n_projects = range(&mut rng, params.projects);
    let mut projects = Vec::with_capacity(n_projects);
    for i in 0..n_projects {
        let mut time = params.start_time + rng.gen_range(0..3 * 365) * DAY + rng.gen_range(0..DAY);
        let n = range(&mut rng, params.snapshots);
        let mut snapshots = Vec::with_capacity(n);
        for s in 0..n {
            if s > 0 {
                time += rng.gen_range(1..120) * DAY + rng.gen_range(HOUR..DAY);
            }
            snapshots.push(SnapshotPlan {
                tag: format!("v{}.{}", s / 2 + 1, s % 2),
                time,
                annotated: rng.gen_bool(0.5),
                aliases: if rng.gen_bool(0.1) { vec![format!("release-{s}")] } else { Vec::new() },
            });
        }
        projects.push(ProjectPlan {
            id: format!("p{i:02}"),
            language: *params.languages.choose(&mut rng).unwrap_or(&Language::C),
            snapshots,
            initial_files: range(&mut rng, params.initial_files),
            files_added: range(&mut rng, params.files_added),
            edit_fraction: 0.2,
            statements: (10, 22),
        });
    }

    let own_at = |p: &ProjectPlan, s: usize| p.initial_files + p.files_added * s;
    let target = range(&mut rng, params.operations);
    let mut rules = PairRules::default();
    let mut operations: Vec<Operation> = Vec::new();
    let mut attempts = 0;
    while operations.len() < target && attempts < 50_000 {
        attempts += 1;
        let (a, b) = (rng.gen_range(0..n_projects), rng.gen_range(0..n_projects));
        let (pa, pb) = (&projects[a], &projects[b]);
        if pa.snapshots.len() < 2 {
            continue;
        }
        let s = rng.gen_range(1..pa.snapshots.len());
        let later: Vec<usize> = (0..pb.snapshots.len())
            .filter(|&t| pb.snapshots[t].time > pa.snapshots[s].time)
            .collect();
        let Some(&t) = later.choose(&mut rng) else { continue };
        let available = own_at(pa, s);
        if available < params.op_files.0 || !rules.allows(&pa.id, &pb.id) {
            continue;
        }
        rules.try_add(&pa.id, &pb.id);
        let mut op = Operation::copy(
            (&pa.id, &pa.snapshots[s].tag),
            (&pb.id, &pb.snapshots[t].tag),
            range(&mut rng, params.op_files).min(available),
        );
        if rng.gen_bool(0.7) {
            op.mutation_rate = rng.gen_range(0.01..=params.max_mutation_rate.max(0.01));
            op.mutated_fraction = rng.gen_range(0.2..=1.0);
            op.mutation_kind = *[
                MutationKind::Substitute,
                MutationKind::Insert,
                MutationKind::Delete,
                MutationKind::Mixed,
            ]
            .choose(&mut rng)
            .unwrap();
            op.min_similarity = Some(params.min_similarity);
        }
        operations.push(op);
    }

    let planted = operations.len();
    for k in 0..planted {
        if !rng.gen_bool(params.decoy_probability) {
            continue;
        }
        let op = operations[k].clone();
        let a = projects.iter().position(|p| p.id == op.origin.project).unwrap();
        let origin = projects[a].snapshots.iter().position(|s| s.tag == op.origin.tag).unwrap();
        let dest_time = projects
            .iter()
            .find(|p| p.id == op.consumer.project)
            .and_then(|p| p.snapshots.iter().find(|s| s.tag == op.consumer.tag))
            .unwrap()
            .time;
        for _ in 0..50 {
            let d = rng.gen_range(0..n_projects);
            let s = rng.gen_range(0..=origin);
            let origin_time = projects[a].snapshots[s].time;
            let later: Vec<usize> = (0..projects[d].snapshots.len())
                .filter(|&t| {
                    let time = projects[d].snapshots[t].time;
                    time > origin_time && time < dest_time
                })
                .collect();
            let Some(&t) = later.choose(&mut rng) else { continue };
            if projects[d].id == op.consumer.project || !rules.allows(&projects[a].id, &projects[d].id) {
                continue;
            }
            rules.try_add(&projects[a].id, &projects[d].id);
            let mut decoy = Operation::copy(
                (&projects[a].id, &projects[a].snapshots[s].tag),
                (&projects[d].id, &projects[d].snapshots[t].tag),
                range(&mut rng, params.decoy_files).min(own_at(&projects[a], s)),
            );
            decoy.files_like = Some(k);
            decoy.role = OpRole::Decoy;
            operations.push(decoy);
            break;
        }
    }

    EcosystemPlan {
        seed,
        projects,
        operations,
        noise: NoiseSpec {
            random_files: 0,
            incidental_overlaps: range(&mut rng, params.incidental_overlaps),
            incidental_size: 3,
        },
        expect: Expectation {
            min_files: 20,
            similarity_threshold: params.min_similarity - 0.05,
        },
    }
}

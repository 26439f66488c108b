//! Synthetic clone-and-own ecosystems with known answers.
//!
//! A plan lists projects, their tagged snapshots and copy operations between
//! snapshots. Generation evolves every project's own files over its
//! snapshots, executes the copies (verbatim or mutated), writes real Git
//! repositories, and records what was planted so detection output can be
//! scored against it.

pub mod generate;
pub mod plan;
pub mod random;
pub mod score;
pub mod source;
pub mod truth;

pub use generate::{build, generate, Ecosystem, GeneratedRepo, GeneratedSnapshot};
pub use plan::{EcosystemPlan, Expectation, NoiseSpec, OpRole, Operation, PairRules, ProjectPlan, SnapshotPlan, SnapshotRef};
pub use random::{random_plan, RandomPlanParams};
pub use score::{score, Scores};
pub use source::MutationKind;
pub use truth::{GroundTruth, PlantRecord, PlantedSnapshot, TruthFile, TruthLink};

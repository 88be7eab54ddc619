//! Multi-robot global localization on semantic graphs.
//!
//! Two robots each summarize their map as a graph of labeled objects
//! (semantic class + 3D centroid). This crate builds those graphs from
//! frames, matches vertices across graphs with structural descriptors,
//! strips outlier matches with a pairwise neighbor-constraint filter,
//! and recovers the rigid transform between the map frames with RANSAC
//! plus a weighted closed-form fit. A synthetic-scenario generator with
//! planted ground truth makes every stage measurable end to end.

pub mod descriptor;
pub mod error;
pub mod extraction;
pub mod graph;
pub mod io;
pub mod matching;
pub mod pipeline;
pub mod registration;
pub mod rejection;
pub mod scenario;
pub mod seed;

pub use descriptor::{Descriptor, DescriptorKind, DescriptorSet};
pub use error::{Error, Result, Stage};
pub use graph::{RigidTransform, SemanticGraph, SemanticVertex};
pub use matching::MatchSet;
pub use pipeline::{run_pipeline, PipelineConfig, PipelineReport, StageTimings};
pub use registration::{RansacConfig, RegistrationResult};
pub use rejection::{ConstraintMatrix, EtaDenominator};
pub use scenario::{EvalReport, GroundTruth, ScenarioConfig, SweepAxis, SweepPlan, SweepRow};

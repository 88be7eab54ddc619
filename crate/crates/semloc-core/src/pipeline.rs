//! End-to-end pipeline wiring and its configuration: descriptors →
//! matching → rejection → RANSAC, with per-stage wall-clock timings.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::descriptor::{DescriptorKind, DescriptorParams, DescriptorSet, MAX_HISTOGRAM_LABELS};
use crate::error::{Error, Result, Stage};
use crate::graph::SemanticGraph;
use crate::matching::{match_graphs, MatchSet};
use crate::registration::{ransac, RansacConfig, RegistrationResult};
use crate::rejection::{reject_with, EtaDenominator};

/// Every tunable of the localization pipeline. Field defaults are the
/// library-wide operating point; a TOML config file deserializes into this
/// with per-field fallback to the defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Graph edge threshold, meters.
    pub edge_threshold: f64,
    /// Neighbor threshold for the constraint matrix, meters. Kept separate
    /// from `edge_threshold`; both default to the same value.
    pub nei_threshold: f64,
    pub descriptor: DescriptorKind,
    /// Histogram label count; `None` infers max label + 1 over both graphs.
    pub label_count: Option<usize>,
    pub walk_count: usize,
    pub walk_depth: usize,
    /// Minimum descriptor similarity (strict) for an original match.
    pub similarity_threshold: f64,
    /// Bad-match ratio bound for the rejection loop.
    pub eta: f64,
    pub eta_denominator: EtaDenominator,
    /// The baseline ("previous method") disables the rejection stage.
    pub use_rejection: bool,
    pub ransac: RansacConfig,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            edge_threshold: 15.0,
            nei_threshold: 15.0,
            descriptor: DescriptorKind::Histogram,
            label_count: None,
            walk_count: 50,
            walk_depth: 4,
            similarity_threshold: 0.6,
            eta: 0.5,
            eta_denominator: EtaDenominator::Current,
            use_rejection: true,
            ransac: RansacConfig::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("edge_threshold", self.edge_threshold),
            ("nei_threshold", self.nei_threshold),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must be in (0, 1), got {}",
                self.eta
            )));
        }
        if self.walk_count < 1 || self.walk_depth < 2 {
            return Err(Error::InvalidParameter(
                "walk_count must be >= 1 and walk_depth >= 2".into(),
            ));
        }
        if let Some(l) = self.label_count {
            if l == 0 || l > MAX_HISTOGRAM_LABELS {
                return Err(Error::InvalidParameter(format!(
                    "label_count must be in 1..={MAX_HISTOGRAM_LABELS}, got {l}"
                )));
            }
        }
        self.ransac.validate()
    }

    /// Sets the master seed and the RANSAC seed together.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.ransac.seed = seed;
        self
    }

    fn descriptor_params(&self, gq: &SemanticGraph, gt: &SemanticGraph) -> Result<DescriptorParams> {
        let label_count = match self.label_count {
            Some(l) => l,
            None => {
                let max = gq.max_label().into_iter().chain(gt.max_label()).max();
                max.map_or(1, |m| m as usize + 1)
            }
        };
        if label_count > MAX_HISTOGRAM_LABELS && self.descriptor == DescriptorKind::Histogram {
            return Err(Error::InvalidParameter(format!(
                "inferred label count {label_count} exceeds {MAX_HISTOGRAM_LABELS}; pass an explicit label_count"
            )));
        }
        Ok(DescriptorParams {
            label_count,
            walk_count: self.walk_count,
            walk_depth: self.walk_depth,
            seed: self.seed,
        })
    }
}

/// Wall-clock milliseconds per pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub descriptor_ms: f64,
    pub match_ms: f64,
    pub reject_ms: f64,
    pub ransac_ms: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.descriptor_ms + self.match_ms + self.reject_ms + self.ransac_ms
    }
}

/// Result of one pipeline run plus stage bookkeeping.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub result: RegistrationResult,
    pub original_match_count: usize,
    pub survivor_count: usize,
    pub timings: StageTimings,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Wraps "no solution" stage outcomes into a localization failure carrying
/// the stage name; genuine input errors pass through unchanged.
fn stage_failure(stage: Stage, err: Error) -> Error {
    match err {
        Error::NoModel { .. }
        | Error::TooFewMatches { .. }
        | Error::DegenerateConfiguration(_)
        | Error::EmptyMatchSet => Error::LocalizationFailure {
            stage,
            detail: err.to_string(),
        },
        other => other,
    }
}

/// Runs matching → rejection → RANSAC on precomputed descriptors.
pub fn run_pipeline_with_descriptors(
    gq: &SemanticGraph,
    dq: &DescriptorSet,
    gt: &SemanticGraph,
    dt: &DescriptorSet,
    cfg: &PipelineConfig,
) -> Result<PipelineReport> {
    cfg.validate()?;
    let mut timings = StageTimings::default();

    let start = Instant::now();
    let m0 = match_graphs(gq, dq, gt, dt, cfg.similarity_threshold)?;
    timings.match_ms = ms(start);
    if m0.is_empty() {
        return Err(Error::LocalizationFailure {
            stage: Stage::Matching,
            detail: "no descriptor matches above the similarity threshold".into(),
        });
    }

    let start = Instant::now();
    let survivors: MatchSet = if cfg.use_rejection {
        reject_with(gq, gt, &m0, cfg.nei_threshold, cfg.eta, cfg.eta_denominator)?
    } else {
        m0.clone()
    };
    timings.reject_ms = if cfg.use_rejection { ms(start) } else { 0.0 };
    if survivors.is_empty() {
        return Err(Error::LocalizationFailure {
            stage: Stage::Rejection,
            detail: "every match was rejected".into(),
        });
    }

    let start = Instant::now();
    let result = ransac(gq, gt, &survivors, &cfg.ransac)
        .map_err(|e| stage_failure(Stage::Registration, e))?;
    timings.ransac_ms = ms(start);

    Ok(PipelineReport {
        result,
        original_match_count: m0.len(),
        survivor_count: survivors.len(),
        timings,
    })
}

/// Full pipeline from two graphs: computes descriptors per the config,
/// then matches, rejects and registers.
pub fn run_pipeline(gq: &SemanticGraph, gt: &SemanticGraph, cfg: &PipelineConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    if gq.is_empty() || gt.is_empty() {
        return Err(Error::LocalizationFailure {
            stage: Stage::Matching,
            detail: "cannot localize with an empty graph".into(),
        });
    }
    let params = cfg.descriptor_params(gq, gt)?;
    let start = Instant::now();
    let dq = DescriptorSet::compute(gq, cfg.descriptor, &params)?;
    let dt = DescriptorSet::compute(gt, cfg.descriptor, &params)?;
    let descriptor_ms = ms(start);
    let mut report = run_pipeline_with_descriptors(gq, &dq, gt, &dt, cfg)?;
    report.timings.descriptor_ms = descriptor_ms;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SemanticVertex;
    use nalgebra::Point3;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Random graph with a minimum vertex separation, so that no two
    /// distinct vertices can both sit inside the RANSAC inlier radius.
    fn separated_graph(rng: &mut ChaCha8Rng, n: usize, min_sep: f64) -> SemanticGraph {
        let mut points: Vec<Point3<f64>> = Vec::new();
        while points.len() < n {
            let p = Point3::new(
                rng.random_range(-30.0..30.0),
                rng.random_range(-30.0..30.0),
                rng.random_range(-6.0..6.0),
            );
            if points.iter().all(|q| (p - q).norm() >= min_sep) {
                points.push(p);
            }
        }
        let vertices = points
            .into_iter()
            .enumerate()
            .map(|(i, p)| SemanticVertex::new(i, rng.random_range(0..8), p))
            .collect();
        SemanticGraph::build(vertices, 15.0).unwrap()
    }

    fn dense_graph(rng: &mut ChaCha8Rng, n: usize) -> SemanticGraph {
        let vertices = (0..n)
            .map(|i| {
                SemanticVertex::new(
                    i,
                    rng.random_range(0..4),
                    Point3::new(
                        rng.random_range(-25.0..25.0),
                        rng.random_range(-25.0..25.0),
                        rng.random_range(-4.0..4.0),
                    ),
                )
            })
            .collect();
        SemanticGraph::build(vertices, 15.0).unwrap()
    }

    #[test]
    fn identical_graphs_localize_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        // Separation above the RANSAC threshold keeps cross-object matches
        // out of the identity model's consensus set.
        let g = separated_graph(&mut rng, 30, 6.0);
        let cfg = PipelineConfig::default().with_seed(5);
        let report = run_pipeline(&g, &g, &cfg).unwrap();
        let t = &report.result.transform;
        assert!((t.rotation - nalgebra::Matrix3::identity()).abs().max() < 1e-6);
        assert!(t.translation.norm() < 1e-6);
        assert!(report.survivor_count <= report.original_match_count);
    }

    #[test]
    fn empty_graph_fails_at_matching() {
        let g = SemanticGraph::build(vec![], 10.0).unwrap();
        let cfg = PipelineConfig::default();
        let err = run_pipeline(&g, &g, &cfg).unwrap_err();
        assert!(matches!(
            err,
            Error::LocalizationFailure { stage: Stage::Matching, .. }
        ));
    }

    #[test]
    fn timings_are_nonnegative_and_cover_the_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let g = dense_graph(&mut rng, 60);
        let cfg = PipelineConfig::default().with_seed(9);
        let wall = Instant::now();
        let report = run_pipeline(&g, &g, &cfg).unwrap();
        let wall_ms = wall.elapsed().as_secs_f64() * 1e3;
        let t = report.timings;
        for v in [t.descriptor_ms, t.match_ms, t.reject_ms, t.ransac_ms] {
            assert!(v >= 0.0);
        }
        // Stage sum accounts for the pipeline wall time up to glue code:
        // within 10% plus a small absolute slack for timer granularity.
        assert!(t.total() <= wall_ms + 1e-6);
        assert!(
            t.total() >= 0.9 * wall_ms - 2.0,
            "stage sum {} vs wall {}",
            t.total(),
            wall_ms
        );
    }

    #[test]
    fn config_validation_catches_bad_eta() {
        let cfg = PipelineConfig { eta: 1.5, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = PipelineConfig { similarity_threshold: 0.4, ..Default::default() };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn toml_round_trip_with_partial_file() {
        let text = "eta = 0.4\nuse_rejection = false\n[ransac]\nthreshold = 2.5\n";
        let cfg: PipelineConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.eta, 0.4);
        assert!(!cfg.use_rejection);
        assert_eq!(cfg.ransac.threshold, 2.5);
        // untouched fields keep their defaults
        assert_eq!(cfg.edge_threshold, 15.0);
        assert_eq!(cfg.walk_count, 50);
    }
}

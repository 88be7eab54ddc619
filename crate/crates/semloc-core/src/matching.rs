//! Cross-graph descriptor matching producing the original match set.

use rayon::prelude::*;

use crate::descriptor::DescriptorSet;
use crate::error::{Error, Result};
use crate::graph::SemanticGraph;

/// Ordered list of (query vertex, target vertex) candidate correspondences
/// with their similarity scores.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchSet {
    pub pairs: Vec<(usize, usize)>,
    pub scores: Vec<f64>,
}

impl MatchSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, q: usize, t: usize, score: f64) {
        self.pairs.push((q, t));
        self.scores.push(score);
    }

    /// Subset in the given index order.
    pub fn select(&self, indices: &[usize]) -> MatchSet {
        MatchSet {
            pairs: indices.iter().map(|&i| self.pairs[i]).collect(),
            scores: indices.iter().map(|&i| self.scores[i]).collect(),
        }
    }

    /// Checks ids against the two graphs and uniqueness of pairs.
    pub fn validate(&self, gq: &SemanticGraph, gt: &SemanticGraph) -> Result<()> {
        if self.pairs.len() != self.scores.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} pairs vs {} scores",
                self.pairs.len(),
                self.scores.len()
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(self.pairs.len());
        for &(q, t) in &self.pairs {
            if q >= gq.len() {
                return Err(Error::VertexOutOfRange { id: q, len: gq.len() });
            }
            if t >= gt.len() {
                return Err(Error::VertexOutOfRange { id: t, len: gt.len() });
            }
            if !seen.insert((q, t)) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate match pair ({q}, {t})"
                )));
            }
        }
        Ok(())
    }
}

/// Emits every cross-graph pair with identical labels and descriptor
/// similarity strictly above `threshold`, sorted by descending score with
/// ties broken by (q, t) order. Pairs whose labels differ are never emitted.
pub fn match_graphs(
    gq: &SemanticGraph,
    dq: &DescriptorSet,
    gt: &SemanticGraph,
    dt: &DescriptorSet,
    threshold: f64,
) -> Result<MatchSet> {
    dq.compatible(dt)?;
    if dq.len() != gq.len() || dt.len() != gt.len() {
        return Err(Error::DescriptorMismatch(format!(
            "descriptor counts ({}, {}) do not match graph sizes ({}, {})",
            dq.len(),
            dt.len(),
            gq.len(),
            gt.len()
        )));
    }
    let mut entries: Vec<(usize, usize, f64)> = (0..gq.len())
        .into_par_iter()
        .flat_map_iter(|q| {
            let label_q = gq.label(q);
            (0..gt.len()).filter_map(move |t| {
                if gt.label(t) != label_q {
                    return None;
                }
                let s = dq.similarity(q, dt, t);
                (s > threshold).then_some((q, t, s))
            })
        })
        .collect();
    entries.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then_with(|| a.0.cmp(&b.0))
            .then_with(|| a.1.cmp(&b.1))
    });
    let mut out = MatchSet::new();
    for (q, t, s) in entries {
        out.push(q, t, s);
    }
    Ok(out)
}

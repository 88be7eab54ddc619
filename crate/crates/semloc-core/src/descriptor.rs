//! Per-vertex graph descriptors embedding a vertex's label and its local
//! graph structure, in two variants: sampled random walks and a
//! deterministic label-triple histogram.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SemanticGraph;
use crate::seed;

/// Descriptor variant selector, used by the pipeline configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorKind {
    Histogram,
    RandomWalk,
}

/// Histogram descriptors get impractical beyond this many classes
/// (bin count grows as the cube of the label count).
pub const MAX_HISTOGRAM_LABELS: usize = 64;

/// `n` random walks of `depth` labels each, starting at the owner vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomWalkDescriptor {
    /// One row per walk; each row is the visited label sequence and begins
    /// with the owner vertex's label.
    pub walks: Vec<Vec<u32>>,
}

/// Label-triple histogram of length L³, L2-normalized (all-zero for an
/// isolated vertex). Bin index for ordered triple (a, b, c) is
/// `a·L² + b·L + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramDescriptor {
    pub label_count: usize,
    pub bins: Vec<f64>,
}

/// A single vertex descriptor of either variant.
#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    RandomWalk(RandomWalkDescriptor),
    Histogram(HistogramDescriptor),
}

/// Samples `walk_count` uniform random walks of `walk_depth` labels from
/// `vertex`. A vertex with no neighbors repeats the current label until the
/// depth is reached. Deterministic: the RNG stream is keyed by
/// (seed, vertex id), so per-vertex computation can run in parallel.
pub fn random_walk_descriptor(
    graph: &SemanticGraph,
    vertex: usize,
    walk_count: usize,
    walk_depth: usize,
    seed_value: u64,
) -> Result<RandomWalkDescriptor> {
    if walk_count < 1 {
        return Err(Error::InvalidParameter("walk count must be >= 1".into()));
    }
    if walk_depth < 2 {
        return Err(Error::InvalidParameter("walk depth must be >= 2".into()));
    }
    graph.vertex(vertex)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed_value, seed::DOMAIN_DESCRIPTOR));
    rng.set_stream(vertex as u64);
    let mut walks = Vec::with_capacity(walk_count);
    for _ in 0..walk_count {
        let mut row = Vec::with_capacity(walk_depth);
        let mut cur = vertex;
        row.push(graph.label(cur));
        for _ in 1..walk_depth {
            let nbrs = graph.neighbors(cur);
            if nbrs.is_empty() {
                row.push(graph.label(cur));
            } else {
                cur = nbrs[rng.random_range(0..nbrs.len())];
                row.push(graph.label(cur));
            }
        }
        walks.push(row);
    }
    Ok(RandomWalkDescriptor { walks })
}

/// Deterministically enumerates every 3-vertex walk
/// vertex → neighbor → neighbor-of-neighbor (backtracking allowed) and
/// histograms the visited label triples; L2-normalized.
pub fn histogram_descriptor(
    graph: &SemanticGraph,
    vertex: usize,
    label_count: usize,
) -> Result<HistogramDescriptor> {
    graph.vertex(vertex)?;
    for v in graph.vertices() {
        if v.label as usize >= label_count {
            return Err(Error::LabelOutOfRange {
                label: v.label,
                count: label_count,
            });
        }
    }
    Ok(histogram_descriptor_unchecked(graph, vertex, label_count))
}

fn histogram_descriptor_unchecked(
    graph: &SemanticGraph,
    vertex: usize,
    label_count: usize,
) -> HistogramDescriptor {
    let l = label_count;
    let mut bins = vec![0.0f64; l * l * l];
    let a = graph.label(vertex) as usize;
    for &u in graph.neighbors(vertex) {
        let b = graph.label(u) as usize;
        for &w in graph.neighbors(u) {
            let c = graph.label(w) as usize;
            bins[a * l * l + b * l + c] += 1.0;
        }
    }
    let norm = bins.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut bins {
            *x /= norm;
        }
    }
    HistogramDescriptor { label_count, bins }
}

/// Plain cosine similarity, 0 when either vector has zero norm.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Cosine similarity of two histogram descriptors.
pub fn histogram_similarity(a: &HistogramDescriptor, b: &HistogramDescriptor) -> Result<f64> {
    if a.label_count != b.label_count {
        return Err(Error::DescriptorMismatch(format!(
            "histogram label counts differ: {} vs {}",
            a.label_count, b.label_count
        )));
    }
    Ok(cosine_similarity(&a.bins, &b.bins))
}

/// Fraction of `a`'s walk rows that also occur among `b`'s rows, as an
/// order-insensitive multiset intersection over the walk count.
pub fn random_walk_similarity(a: &RandomWalkDescriptor, b: &RandomWalkDescriptor) -> Result<f64> {
    if a.walks.len() != b.walks.len()
        || a.walks.first().map(Vec::len) != b.walks.first().map(Vec::len)
    {
        return Err(Error::DescriptorMismatch(format!(
            "walk dimensions differ: {}x{} vs {}x{}",
            a.walks.len(),
            a.walks.first().map_or(0, Vec::len),
            b.walks.len(),
            b.walks.first().map_or(0, Vec::len),
        )));
    }
    let n = a.walks.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut rows_a: Vec<&Vec<u32>> = a.walks.iter().collect();
    let mut rows_b: Vec<&Vec<u32>> = b.walks.iter().collect();
    rows_a.sort();
    rows_b.sort();
    let mut shared = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < rows_a.len() && j < rows_b.len() {
        match rows_a[i].cmp(rows_b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(shared as f64 / n as f64)
}

/// Similarity of two descriptors of the same variant, in [-1, 1].
pub fn descriptor_similarity(a: &Descriptor, b: &Descriptor) -> Result<f64> {
    match (a, b) {
        (Descriptor::Histogram(x), Descriptor::Histogram(y)) => histogram_similarity(x, y),
        (Descriptor::RandomWalk(x), Descriptor::RandomWalk(y)) => random_walk_similarity(x, y),
        _ => Err(Error::DescriptorMismatch(
            "cannot compare descriptors of different variants".into(),
        )),
    }
}

/// All per-vertex descriptors of one graph, tagged with the parameters they
/// were computed with so cross-graph comparisons can be validated.
#[derive(Debug, Clone)]
pub enum DescriptorSet {
    Histogram {
        label_count: usize,
        items: Vec<HistogramDescriptor>,
    },
    RandomWalk {
        walk_count: usize,
        walk_depth: usize,
        items: Vec<RandomWalkDescriptor>,
    },
}

impl DescriptorSet {
    /// Histogram descriptors for every vertex, parallel over vertices.
    pub fn histogram(graph: &SemanticGraph, label_count: usize) -> Result<Self> {
        if label_count == 0 || label_count > MAX_HISTOGRAM_LABELS {
            return Err(Error::InvalidParameter(format!(
                "label count must be in 1..={MAX_HISTOGRAM_LABELS}, got {label_count}"
            )));
        }
        if let Some(max) = graph.max_label() {
            if max as usize >= label_count {
                return Err(Error::LabelOutOfRange {
                    label: max,
                    count: label_count,
                });
            }
        }
        let items = (0..graph.len())
            .into_par_iter()
            .map(|v| histogram_descriptor_unchecked(graph, v, label_count))
            .collect();
        Ok(DescriptorSet::Histogram { label_count, items })
    }

    /// Random-walk descriptors for every vertex, parallel over vertices.
    pub fn random_walk(
        graph: &SemanticGraph,
        walk_count: usize,
        walk_depth: usize,
        seed_value: u64,
    ) -> Result<Self> {
        if walk_count < 1 {
            return Err(Error::InvalidParameter("walk count must be >= 1".into()));
        }
        if walk_depth < 2 {
            return Err(Error::InvalidParameter("walk depth must be >= 2".into()));
        }
        let items = (0..graph.len())
            .into_par_iter()
            .map(|v| {
                random_walk_descriptor(graph, v, walk_count, walk_depth, seed_value)
                    .expect("parameters validated above")
            })
            .collect();
        Ok(DescriptorSet::RandomWalk {
            walk_count,
            walk_depth,
            items,
        })
    }

    pub fn compute(graph: &SemanticGraph, kind: DescriptorKind, params: &DescriptorParams) -> Result<Self> {
        match kind {
            DescriptorKind::Histogram => Self::histogram(graph, params.label_count),
            DescriptorKind::RandomWalk => {
                Self::random_walk(graph, params.walk_count, params.walk_depth, params.seed)
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DescriptorSet::Histogram { items, .. } => items.len(),
            DescriptorSet::RandomWalk { items, .. } => items.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Errors unless the two sets were computed with the same variant and
    /// structural parameters. Seeds are allowed to differ for random walks.
    pub fn compatible(&self, other: &Self) -> Result<()> {
        match (self, other) {
            (
                DescriptorSet::Histogram { label_count: a, .. },
                DescriptorSet::Histogram { label_count: b, .. },
            ) if a == b => Ok(()),
            (
                DescriptorSet::RandomWalk {
                    walk_count: na,
                    walk_depth: da,
                    ..
                },
                DescriptorSet::RandomWalk {
                    walk_count: nb,
                    walk_depth: db,
                    ..
                },
            ) if na == nb && da == db => Ok(()),
            _ => Err(Error::DescriptorMismatch(
                "descriptor sets were computed with different parameters".into(),
            )),
        }
    }

    /// Similarity of vertex `i` in this set against vertex `j` in `other`.
    /// Callers must have checked [`Self::compatible`] first.
    pub fn similarity(&self, i: usize, other: &Self, j: usize) -> f64 {
        match (self, other) {
            (DescriptorSet::Histogram { items: a, .. }, DescriptorSet::Histogram { items: b, .. }) => {
                cosine_similarity(&a[i].bins, &b[j].bins)
            }
            (
                DescriptorSet::RandomWalk { items: a, .. },
                DescriptorSet::RandomWalk { items: b, .. },
            ) => random_walk_similarity(&a[i], &b[j]).expect("compatibility checked"),
            _ => unreachable!("compatibility checked"),
        }
    }
}

/// Bundle of descriptor tunables carried by the pipeline configuration.
#[derive(Debug, Clone, Copy)]
pub struct DescriptorParams {
    pub label_count: usize,
    pub walk_count: usize,
    pub walk_depth: usize,
    pub seed: u64,
}

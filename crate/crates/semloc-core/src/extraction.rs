//! Frame-to-vertex extraction: seed-fill segmentation of semantic images,
//! pinhole back-projection through the depth image, and fusion of repeated
//! observations into one vertex per object.

use std::collections::HashSet;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::graph::{RigidTransform, SemanticVertex};

/// Row-major H×W grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "grid data length {} != {width}x{height}",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

/// Pinhole intrinsics, pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// One input frame: per-pixel labels, per-pixel depth in meters
/// (zero or negative meaning invalid), intrinsics, and the camera→map pose.
#[derive(Debug, Clone)]
pub struct LabeledFrame {
    pub semantic: Grid<u32>,
    pub depth: Grid<f64>,
    pub intrinsics: Intrinsics,
    pub pose: RigidTransform,
}

impl LabeledFrame {
    pub fn new(
        semantic: Grid<u32>,
        depth: Grid<f64>,
        intrinsics: Intrinsics,
        pose: RigidTransform,
    ) -> Result<Self> {
        if semantic.width() != depth.width() || semantic.height() != depth.height() {
            return Err(Error::DimensionMismatch(format!(
                "semantic {}x{} vs depth {}x{}",
                semantic.width(),
                semantic.height(),
                depth.width(),
                depth.height()
            )));
        }
        if !(intrinsics.fx > 0.0) || !(intrinsics.fy > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "focal lengths must be positive, got fx={} fy={}",
                intrinsics.fx, intrinsics.fy
            )));
        }
        pose.validate()?;
        Ok(Self { semantic, depth, intrinsics, pose })
    }
}

/// A segmented image region: one maximal 4-connected component of equal
/// label.
#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    pub label: u32,
    pub pixel_count: usize,
    /// Pixel-coordinate mean (u, v) over all blob pixels.
    pub centroid_px: (f64, f64),
    /// Median of the valid (positive, finite) depths over blob pixels,
    /// meters.
    pub depth_m: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Seed-fill segmentation: maximal 4-connected regions of identical label,
/// skipping `ignored_labels`. Blobs smaller than `min_blob_size` or with no
/// valid depth pixel are dropped. Blobs are emitted in row-major order of
/// their seed pixel.
pub fn segment(frame: &LabeledFrame, min_blob_size: usize, ignored_labels: &HashSet<u32>) -> Vec<Blob> {
    let (w, h) = (frame.semantic.width(), frame.semantic.height());
    let mut visited = vec![false; w * h];
    let mut blobs = Vec::new();
    let mut stack = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            let idx = sy * w + sx;
            if visited[idx] {
                continue;
            }
            let label = frame.semantic.get(sx, sy);
            if ignored_labels.contains(&label) {
                visited[idx] = true;
                continue;
            }
            // flood from the seed
            visited[idx] = true;
            stack.push((sx, sy));
            let mut count = 0usize;
            let mut sum_u = 0.0;
            let mut sum_v = 0.0;
            let mut depths = Vec::new();
            while let Some((x, y)) = stack.pop() {
                count += 1;
                sum_u += x as f64;
                sum_v += y as f64;
                let d = frame.depth.get(x, y);
                if d > 0.0 && d.is_finite() {
                    depths.push(d);
                }
                let mut try_push = |nx: usize, ny: usize| {
                    let nidx = ny * w + nx;
                    if !visited[nidx] && frame.semantic.get(nx, ny) == label {
                        visited[nidx] = true;
                        stack.push((nx, ny));
                    }
                };
                if x > 0 {
                    try_push(x - 1, y);
                }
                if x + 1 < w {
                    try_push(x + 1, y);
                }
                if y > 0 {
                    try_push(x, y - 1);
                }
                if y + 1 < h {
                    try_push(x, y + 1);
                }
            }
            if count >= min_blob_size && !depths.is_empty() {
                blobs.push(Blob {
                    label,
                    pixel_count: count,
                    centroid_px: (sum_u / count as f64, sum_v / count as f64),
                    depth_m: median(&mut depths),
                });
            }
        }
    }
    blobs
}

/// Back-projects a blob centroid through the pinhole model at its
/// representative depth and maps it into the map frame via the camera pose.
pub fn backproject(blob: &Blob, frame: &LabeledFrame) -> Result<SemanticVertex> {
    if !(blob.depth_m > 0.0) {
        return Err(Error::InvalidDepth(blob.depth_m));
    }
    let (u, v) = blob.centroid_px;
    let d = blob.depth_m;
    let cam = Point3::new(
        (u - frame.intrinsics.cx) * d / frame.intrinsics.fx,
        (v - frame.intrinsics.cy) * d / frame.intrinsics.fy,
        d,
    );
    Ok(SemanticVertex::new(0, blob.label, frame.pose.apply(&cam)))
}

/// Fuses repeated observations of the same physical object: greedy,
/// order-sensitive agglomeration. Each observation joins the first existing
/// cluster of identical label whose running-mean position is within
/// `merge_radius`, otherwise it starts a new cluster. Returns one vertex
/// per cluster at the cluster mean, ids densely reassigned.
pub fn merge_vertices(observations: &[SemanticVertex], merge_radius: f64) -> Result<Vec<SemanticVertex>> {
    if !(merge_radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "merge_radius must be positive, got {merge_radius}"
        )));
    }
    struct Cluster {
        label: u32,
        sum: nalgebra::Vector3<f64>,
        count: usize,
    }
    impl Cluster {
        fn mean(&self) -> Point3<f64> {
            Point3::from(self.sum / self.count as f64)
        }
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    for obs in observations {
        let joined = clusters.iter_mut().find(|c| {
            c.label == obs.label && (obs.position - c.mean()).norm() < merge_radius
        });
        match joined {
            Some(c) => {
                c.sum += obs.position.coords;
                c.count += 1;
            }
            None => clusters.push(Cluster {
                label: obs.label,
                sum: obs.position.coords,
                count: 1,
            }),
        }
    }
    Ok(clusters
        .iter()
        .enumerate()
        .map(|(i, c)| SemanticVertex::new(i, c.label, c.mean()))
        .collect())
}

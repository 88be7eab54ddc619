//! Weighted semantic graphs: labeled 3D vertices, a dense pairwise distance
//! matrix, and adjacency derived by thresholding that matrix.

use nalgebra::{DMatrix, Matrix3, Point3, Vector3};

use crate::error::{Error, Result};

/// Tolerance for rotation-matrix validity checks (orthonormality, det = +1).
pub const ROTATION_TOL: f64 = 1e-9;

/// One object in the map: semantic class plus 3D centroid, meters.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticVertex {
    /// Dense index in the owning graph (0..V-1).
    pub id: usize,
    /// Semantic class id.
    pub label: u32,
    /// Position in the map frame, meters.
    pub position: Point3<f64>,
}

impl SemanticVertex {
    pub fn new(id: usize, label: u32, position: Point3<f64>) -> Self {
        Self { id, label, position }
    }
}

/// Proper rigid motion: `p -> rotation * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Build a transform, checking the rotation invariants.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let t = Self { rotation, translation };
        t.validate()?;
        Ok(t)
    }

    /// Checks `Rᵀ·R = I` and `det(R) = +1` within [`ROTATION_TOL`].
    pub fn validate(&self) -> Result<()> {
        let gram = self.rotation.transpose() * self.rotation;
        let ortho_err = (gram - Matrix3::identity()).abs().max();
        if ortho_err > ROTATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "rotation is not orthonormal (max |RᵀR - I| = {ortho_err:.3e})"
            )));
        }
        let det = self.rotation.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "rotation determinant is {det}, expected +1"
            )));
        }
        if !self.translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite translation".into()));
        }
        Ok(())
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    /// Geodesic angle between the two rotations, radians.
    pub fn rotation_angle_to(&self, other: &Self) -> f64 {
        let rel = self.rotation * other.rotation.transpose();
        let cos = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        cos.acos()
    }
}

/// Weighted semantic graph: vertices, a dense V×V Euclidean distance matrix,
/// and adjacency `distance < edge_threshold`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SemanticGraph {
    vertices: Vec<SemanticVertex>,
    distance_matrix: DMatrix<f64>,
    edge_threshold: f64,
    // Neighbors of each vertex (self excluded), ascending by id.
    adjacency: Vec<Vec<usize>>,
}

impl SemanticGraph {
    /// Builds the graph from a vertex list. Vertex order is preserved and
    /// ids are assigned densely (0..V-1) in that order.
    pub fn build(vertices: Vec<SemanticVertex>, edge_threshold: f64) -> Result<Self> {
        if !(edge_threshold > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "edge_threshold must be positive, got {edge_threshold}"
            )));
        }
        for (index, v) in vertices.iter().enumerate() {
            if !v.position.coords.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinitePosition { index });
            }
        }
        let mut vertices = vertices;
        for (index, v) in vertices.iter_mut().enumerate() {
            v.id = index;
        }
        let n = vertices.len();
        let distance_matrix = DMatrix::from_fn(n, n, |i, j| {
            (vertices[i].position - vertices[j].position).norm()
        });
        let adjacency = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && distance_matrix[(i, j)] < edge_threshold)
                    .collect()
            })
            .collect();
        Ok(Self {
            vertices,
            distance_matrix,
            edge_threshold,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[SemanticVertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> Result<&SemanticVertex> {
        self.vertices.get(id).ok_or(Error::VertexOutOfRange {
            id,
            len: self.vertices.len(),
        })
    }

    pub fn position(&self, id: usize) -> Point3<f64> {
        self.vertices[id].position
    }

    pub fn label(&self, id: usize) -> u32 {
        self.vertices[id].label
    }

    pub fn edge_threshold(&self) -> f64 {
        self.edge_threshold
    }

    pub fn distance_matrix(&self) -> &DMatrix<f64> {
        &self.distance_matrix
    }

    /// Pairwise distance lookup, unchecked ids.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance_matrix[(i, j)]
    }

    /// Neighbor predicate: `distance(i, j) < edge_threshold`, strict. Note
    /// `neighbor(i, i)` is true for any positive threshold (zero
    /// self-distance); walk adjacency uses [`Self::neighbors`] instead,
    /// which excludes self.
    pub fn neighbor(&self, i: usize, j: usize) -> Result<bool> {
        let n = self.vertices.len();
        for id in [i, j] {
            if id >= n {
                return Err(Error::VertexOutOfRange { id, len: n });
            }
        }
        Ok(self.distance_matrix[(i, j)] < self.edge_threshold)
    }

    /// Adjacent vertices of `i` (self excluded), ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Largest label in the graph, `None` for an empty graph.
    pub fn max_label(&self) -> Option<u32> {
        self.vertices.iter().map(|v| v.label).max()
    }

    /// Applies a rigid transform to every vertex position, returning a new
    /// graph with the same labels, order and threshold. Rigidity preserves
    /// the distance matrix up to floating-point error.
    pub fn transformed(&self, t: &RigidTransform) -> Result<Self> {
        t.validate()?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| SemanticVertex::new(v.id, v.label, t.apply(&v.position)))
            .collect();
        Self::build(vertices, self.edge_threshold)
    }
}

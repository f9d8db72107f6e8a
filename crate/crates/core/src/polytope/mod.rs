//! Vertex-represented convex polytopes.
//!
//! A [`Polytope`] is built from its vertices. Construction works in an
//! orthonormal chart of the affine hull, so lower-dimensional polytopes in
//! `R^n` are handled intrinsically. Facets are found by brute force over
//! `dim`-subsets of vertices; faces of every dimension are then obtained by
//! intersecting facet incidence sets from the top of the face lattice down.
//!
//! Complexity is `O(C(V, dim))` hyperplane fits, which is fine for the small
//! shapes this crate targets (`dim <= 6`, `V <= 64`).

mod cone;
mod lattice;
mod shapes;

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::Frame;
use crate::linalg;
use crate::scalar::Real;

pub use cone::{
    external_angle, normal_cone, restriction_invariance_check, AngleEstimate, AngleMethodUsed,
    NormalCone, RestrictionCheck,
};
pub use lattice::{Face, Facet};
pub use shapes::{make_shape, simplex_s, ShapeKind};

/// Relative tolerance for hyperplane one-sidedness and incidence.
pub const TAU_HP: f64 = 1e-9;
/// Relative tolerance for normal-cone membership.
pub const TAU_CONE: f64 = 1e-9;
/// Upper bound on the number of vertex subsets tried during facet search.
pub const MAX_FACET_CANDIDATES: usize = 5_000_000;
/// Vertex sets are stored as 64-bit masks.
pub const MAX_VERTICES: usize = 64;

/// Plain JSON shape of a polytope file: `{"n": 3, "vertices": [[..], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub n: usize,
    pub vertices: Vec<Vec<f64>>,
}

impl PolytopeSpec {
    pub fn to_polytope<T: Real>(&self) -> Result<Polytope<T>> {
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.len() != self.n {
                    return Err(Error::InvalidPolytope(format!(
                        "vertices[{i}] has {} coordinates, expected n = {}",
                        v.len(),
                        self.n
                    )));
                }
                Ok(DVector::from_iterator(v.len(), v.iter().map(|&x| T::lit(x))))
            })
            .collect::<Result<Vec<_>>>()?;
        Polytope::new(vertices)
    }
}

/// Convex polytope given by its vertices, with its face lattice.
#[derive(Clone, Debug)]
pub struct Polytope<T: Real> {
    n: usize,
    vertices: Vec<DVector<T>>,
    dim: usize,
    origin: DVector<T>,
    chart: Vec<DVector<T>>,
    scale: T,
    facets: Vec<Facet<T>>,
    faces: Vec<Vec<Face<T>>>,
}

impl<T: Real> Polytope<T> {
    /// Builds a polytope from its vertices. Every point must be distinct and
    /// extreme.
    pub fn new(vertices: Vec<DVector<T>>) -> Result<Self> {
        Self::build(vertices, false)
    }

    /// Convex hull of `points`: duplicates and non-extreme points are dropped.
    pub fn hull(points: Vec<DVector<T>>) -> Result<Self> {
        Self::build(points, true)
    }

    fn build(points: Vec<DVector<T>>, prune: bool) -> Result<Self> {
        let n = points.first().map(|p| p.len()).ok_or_else(|| {
            Error::InvalidPolytope("a polytope needs at least one vertex".into())
        })?;
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != n) {
            return Err(Error::InvalidPolytope(format!(
                "vertices[{i}] has {} coordinates, expected {n}",
                p.len()
            )));
        }
        if points.len() > MAX_VERTICES {
            return Err(Error::TooLarge(format!(
                "{} vertices exceeds the limit of {MAX_VERTICES}",
                points.len()
            )));
        }
        let origin = centroid(&points);
        let scale = points.iter().map(|p| (p - &origin).norm()).fold(T::zero(), |a, b| a.max(b));
        let tol = T::geom_tol() * scale.max(T::lit(1e-300_f64.max(f64::MIN_POSITIVE)));

        let mut vertices: Vec<DVector<T>> = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            if vertices.iter().any(|q| (q - &p).norm() <= tol) {
                if prune {
                    continue;
                }
                return Err(Error::InvalidPolytope(format!("vertices[{i}] duplicates an earlier vertex")));
            }
            vertices.push(p);
        }

        let diffs: Vec<DVector<T>> = vertices.iter().map(|v| v - &origin).collect();
        let chart = linalg::orthonormalize(&diffs, T::geom_tol());
        let dim = chart.len();
        let local: Vec<DVector<T>> = diffs
            .iter()
            .map(|d| DVector::from_iterator(dim, chart.iter().map(|b| b.dot(d))))
            .collect();

        let local_facets = lattice::enumerate_facets(&local, dim, scale)?;

        // A vertex is extreme iff the normals of the facets through it span R^dim.
        let non_extreme: Vec<usize> = (0..vertices.len())
            .filter(|&i| {
                if dim == 0 {
                    return false;
                }
                let normals: Vec<DVector<T>> = local_facets
                    .iter()
                    .filter(|f| f.mask & (1u64 << i) != 0)
                    .map(|f| f.normal.clone())
                    .collect();
                linalg::orthonormalize(&normals, T::geom_tol()).len() < dim
            })
            .collect();
        if !non_extreme.is_empty() {
            if !prune {
                return Err(Error::InvalidPolytope(format!(
                    "vertices {non_extreme:?} are not extreme points"
                )));
            }
            let kept: Vec<DVector<T>> = vertices
                .into_iter()
                .enumerate()
                .filter(|(i, _)| !non_extreme.contains(i))
                .map(|(_, v)| v)
                .collect();
            return Self::build(kept, false);
        }

        let (facets, faces) = lattice::build(&vertices, &chart, dim, &local_facets)?;
        Ok(Self { n, vertices, dim, origin, chart, scale, facets, faces })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Affine dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[DVector<T>] {
        &self.vertices
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.n
    }

    /// Largest distance from a vertex to the vertex centroid.
    pub fn scale(&self) -> T {
        self.scale
    }

    /// Orthonormal basis of the direction space of the affine hull.
    pub fn affine_frame(&self) -> Frame<T> {
        Frame::new(self.n, self.chart.clone()).expect("chart vectors live in R^n")
    }

    /// Facets of a full-dimensional polytope.
    pub fn facets(&self) -> Result<&[Facet<T>]> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional { dim: self.dim, n: self.n });
        }
        Ok(&self.facets)
    }

    /// Facets relative to the affine hull (equal to [`Polytope::facets`] when
    /// full-dimensional).
    pub fn relative_facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    /// All faces of dimension `k`, in canonical vertex-list order.
    pub fn faces(&self, k: usize) -> Result<&[Face<T>]> {
        if k > self.dim {
            return Err(Error::InvalidParameter(format!(
                "face dimension {k} exceeds polytope dimension {}",
                self.dim
            )));
        }
        Ok(&self.faces[k])
    }

    /// Number of faces of each dimension `0..=dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(|l| l.len()).collect()
    }

    /// `dim`-dimensional volume of the polytope.
    pub fn volume(&self) -> T {
        self.faces[self.dim][0].volume
    }

    /// Whether `face` is one of this polytope's faces.
    pub fn contains_face(&self, face: &Face<T>) -> bool {
        face.dim <= self.dim
            && self.faces[face.dim].iter().any(|f| {
                f.mask == face.mask
                    && f.vertex_ids == face.vertex_ids
                    && (&f.base_point - &face.base_point).norm() <= T::geom_tol() * self.scale.max(T::one())
            })
    }

    pub fn translated(&self, x: &DVector<T>) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v + x).collect())
    }

    pub fn scaled(&self, t: T) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v * t).collect())
    }

    /// Image under `x ↦ a x` for an `m x n` matrix `a`.
    pub fn mapped(&self, a: &DMatrix<T>) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| a * v).collect())
    }

    pub fn to_spec(&self) -> PolytopeSpec {
        PolytopeSpec {
            n: self.n,
            vertices: self.vertices.iter().map(|v| v.iter().map(|x| x.as_f64()).collect()).collect(),
        }
    }

    /// Vertex centroid, the origin of the affine chart.
    pub fn centroid(&self) -> &DVector<T> {
        &self.origin
    }
}

pub(crate) fn centroid<T: Real>(points: &[DVector<T>]) -> DVector<T> {
    let n = points[0].len();
    let sum = points.iter().fold(DVector::zeros(n), |acc, p| acc + p);
    sum / T::count(points.len())
}

pub(crate) fn mask_ids(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1u64 << i) != 0).collect()
}

pub(crate) fn dedup_masks(masks: &mut Vec<u64>) {
    let mut seen = HashSet::new();
    masks.retain(|m| seen.insert(*m));
}

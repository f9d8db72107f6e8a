use std::collections::{HashMap, HashSet};

use nalgebra::DVector;
use serde::Serialize;

use super::{centroid, dedup_masks, mask_ids, MAX_FACET_CANDIDATES};
use crate::error::{Error, Result};
use crate::exterior::{binomial, Frame};
use crate::linalg;
use crate::scalar::{factorial, Real};

/// Supporting hyperplane `<normal, x> = offset` of a facet.
#[derive(Clone, Debug, Serialize)]
pub struct Facet<T: Real> {
    /// Outward unit normal (inside the affine hull for lower-dimensional
    /// polytopes).
    pub normal: DVector<T>,
    pub offset: T,
    pub vertex_ids: Vec<usize>,
    #[serde(skip)]
    pub(crate) mask: u64,
}

/// A face with its affine data.
#[derive(Clone, Debug, Serialize)]
pub struct Face<T: Real> {
    pub vertex_ids: Vec<usize>,
    pub dim: usize,
    /// Vertex centroid, a relative-interior point.
    pub base_point: DVector<T>,
    /// Orthonormal basis of the direction space of the affine hull.
    pub direction_frame: Frame<T>,
    /// Indices into the polytope's (relative) facet list.
    pub incident_facets: Vec<usize>,
    /// `dim`-dimensional volume.
    pub volume: T,
    #[serde(skip)]
    pub(crate) mask: u64,
}

impl<T: Real> Face<T> {
    /// `dim`-dimensional volume of the face.
    pub fn volume(&self) -> T {
        self.volume
    }
}

/// Facet in chart coordinates.
#[derive(Clone, Debug)]
pub(crate) struct LocalFacet<T: Real> {
    pub normal: DVector<T>,
    pub mask: u64,
}

fn next_combination(cur: &mut [usize], n: usize) -> bool {
    let k = cur.len();
    let mut i = k;
    while i > 0 && cur[i - 1] == i - 1 + n - k {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    cur[i - 1] += 1;
    for j in i..k {
        cur[j] = cur[j - 1] + 1;
    }
    true
}

/// Facets of a full-dimensional point configuration in `R^dim`.
pub(crate) fn enumerate_facets<T: Real>(
    points: &[DVector<T>],
    dim: usize,
    scale: T,
) -> Result<Vec<LocalFacet<T>>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    let v = points.len();
    let candidates = binomial(v, dim);
    if candidates > MAX_FACET_CANDIDATES {
        return Err(Error::TooLarge(format!(
            "facet search over C({v}, {dim}) = {candidates} vertex subsets exceeds {MAX_FACET_CANDIDATES}"
        )));
    }
    let tol = T::geom_tol() * scale;
    let mut facets: Vec<LocalFacet<T>> = Vec::new();
    let mut cur: Vec<usize> = (0..dim).collect();
    loop {
        let mask = cur.iter().fold(0u64, |m, &i| m | (1u64 << i));
        if !facets.iter().any(|f| mask & !f.mask == 0) {
            let p0 = &points[cur[0]];
            let diffs: Vec<DVector<T>> = cur[1..].iter().map(|&i| &points[i] - p0).collect();
            if let Some(normal) = linalg::normal_vector(&diffs, dim, T::geom_tol()) {
                let offset = normal.dot(p0);
                let signed: Vec<T> = points.iter().map(|p| normal.dot(p) - offset).collect();
                let max = signed.iter().copied().fold(signed[0], |a, b| a.max(b));
                let min = signed.iter().copied().fold(signed[0], |a, b| a.min(b));
                let outward = if max <= tol {
                    Some(normal)
                } else if min >= -tol {
                    Some(-normal)
                } else {
                    None
                };
                if let Some(normal) = outward {
                    let incident = signed
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.abs() <= tol)
                        .fold(0u64, |m, (i, _)| m | (1u64 << i));
                    facets.push(LocalFacet { normal, mask: incident });
                }
            }
        }
        if !next_combination(&mut cur, v) {
            break;
        }
    }
    Ok(facets)
}

fn affine_rank<T: Real>(vertices: &[DVector<T>], mask: u64) -> usize {
    let ids = mask_ids(mask);
    let p0 = &vertices[ids[0]];
    let diffs: Vec<DVector<T>> = ids[1..].iter().map(|&i| &vertices[i] - p0).collect();
    linalg::orthonormalize(&diffs, T::geom_tol()).len()
}

/// Facets and the full face lattice, faces grouped by dimension.
pub(crate) fn build<T: Real>(
    vertices: &[DVector<T>],
    chart: &[DVector<T>],
    dim: usize,
    local_facets: &[LocalFacet<T>],
) -> Result<(Vec<Facet<T>>, Vec<Vec<Face<T>>>)> {
    let n = vertices[0].len();
    let mut facets: Vec<Facet<T>> = local_facets
        .iter()
        .map(|lf| {
            let normal = chart
                .iter()
                .zip(lf.normal.iter())
                .fold(DVector::zeros(n), |acc, (b, &a)| acc + b * a);
            let ids = mask_ids(lf.mask);
            let offset = normal.dot(&vertices[ids[0]]);
            Facet { normal, offset, vertex_ids: ids, mask: lf.mask }
        })
        .collect();
    facets.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));

    let full: u64 = if vertices.len() == 64 { u64::MAX } else { (1u64 << vertices.len()) - 1 };
    let mut levels: Vec<Vec<u64>> = vec![Vec::new(); dim + 1];
    levels[dim].push(full);
    if dim >= 1 {
        levels[dim - 1] = facets.iter().map(|f| f.mask).collect();
    }
    for j in (1..dim).rev() {
        let mut next: Vec<u64> = Vec::new();
        let mut seen: HashSet<u64> = HashSet::new();
        for &g in &levels[j] {
            for f in &facets {
                if g & !f.mask == 0 {
                    continue;
                }
                let h = g & f.mask;
                if h == 0 || !seen.insert(h) {
                    continue;
                }
                if affine_rank(vertices, h) == j - 1 {
                    next.push(h);
                }
            }
        }
        dedup_masks(&mut next);
        levels[j - 1] = next;
    }
    for level in &mut levels {
        level.sort_by_key(|&m| mask_ids(m));
    }

    let mut memo: HashMap<u64, Vec<Vec<usize>>> = HashMap::new();
    let mut faces: Vec<Vec<Face<T>>> = Vec::with_capacity(dim + 1);
    for (j, level) in levels.iter().enumerate() {
        let mut out = Vec::with_capacity(level.len());
        for &mask in level {
            let ids = mask_ids(mask);
            let pts: Vec<DVector<T>> = ids.iter().map(|&i| vertices[i].clone()).collect();
            let base_point = centroid(&pts);
            let diffs: Vec<DVector<T>> = pts[1..].iter().map(|p| p - &pts[0]).collect();
            let frame = linalg::orthonormalize(&diffs, T::geom_tol());
            debug_assert_eq!(frame.len(), j);
            let incident_facets = facets
                .iter()
                .enumerate()
                .filter(|(_, f)| mask & !f.mask == 0 && j < dim)
                .map(|(i, _)| i)
                .collect();
            let simplices = triangulate(mask, j, &levels, &mut memo);
            let volume = simplices
                .iter()
                .map(|s| {
                    let d: Vec<DVector<T>> = s[1..].iter().map(|&i| &vertices[i] - &vertices[s[0]]).collect();
                    linalg::gram_determinant(&d).max(T::zero()).sqrt()
                })
                .fold(T::zero(), |a, b| a + b)
                / factorial::<T>(j);
            out.push(Face {
                vertex_ids: ids,
                dim: j,
                base_point,
                direction_frame: Frame::new(n, frame)?,
                incident_facets,
                volume,
                mask,
            });
        }
        faces.push(out);
    }
    Ok((facets, faces))
}

/// Fan triangulation of the face `mask` of dimension `dim` from its lowest
/// vertex, recursing into the subfaces that avoid that vertex.
fn triangulate(
    mask: u64,
    dim: usize,
    levels: &[Vec<u64>],
    memo: &mut HashMap<u64, Vec<Vec<usize>>>,
) -> Vec<Vec<usize>> {
    if let Some(t) = memo.get(&mask) {
        return t.clone();
    }
    let apex = mask.trailing_zeros() as usize;
    let out = if dim == 0 {
        vec![vec![apex]]
    } else {
        let mut out = Vec::new();
        for &sub in &levels[dim - 1] {
            if sub & !mask != 0 || sub & (1u64 << apex) != 0 {
                continue;
            }
            for mut s in triangulate(sub, dim - 1, levels, memo) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    };
    memo.insert(mask, out.clone());
    out
}

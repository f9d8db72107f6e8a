use nalgebra::DVector;
use serde::Serialize;

use super::{Face, Polytope, TAU_CONE};
use crate::error::{Error, Result};
use crate::exterior::Frame;
use crate::linalg;
use crate::random::{sphere_fraction, AngleMethod, MonteCarloConfig};
use crate::scalar::Real;

/// Which route produced an external angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleMethodUsed {
    /// The face is the polytope itself; the normal cone is `{0}`.
    WholePolytope,
    /// Facet; the normal cone is a ray.
    Facet,
    /// Codimension 2: `arccos(<u_i, u_j>) / 2π`.
    Dihedral,
    /// Pairwise orthogonal facet normals, one per codimension: `2^-codim`.
    Orthant,
    /// Codimension 3: area of the spherical polygon cut out by the cone.
    SphericalPolygon,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleEstimate<T: Real> {
    pub value: T,
    /// Zero for closed-form branches.
    pub stderr: T,
    pub method: AngleMethodUsed,
    pub samples: usize,
}

impl<T: Real> AngleEstimate<T> {
    fn exact(value: T, method: AngleMethodUsed) -> Self {
        Self { value, stderr: T::zero(), method, samples: 0 }
    }
}

/// Normal cone `N_F P`, the polar of the tangent cone `T_F P`.
#[derive(Clone, Debug)]
pub struct NormalCone<T: Real> {
    pub face_dim: usize,
    /// Outward unit normals of the facets containing the face.
    pub facet_normals: Vec<DVector<T>>,
    /// Orthonormal basis of the orthogonal complement of the face direction
    /// space in `R^n`.
    pub complement_frame: Frame<T>,
    /// `v - base_point` for every vertex `v` of the polytope.
    generators: Vec<DVector<T>>,
    tol: T,
}

impl<T: Real> NormalCone<T> {
    /// `u ∈ N_F P` iff `<u, v - base_point> <= τ` for every vertex `v`.
    pub fn contains(&self, u: &DVector<T>) -> bool {
        self.generators.iter().all(|g| g.dot(u) <= self.tol * u.norm())
    }

    /// Dimension of the space the cone's rays live in.
    pub fn ambient_codim(&self) -> usize {
        self.complement_frame.k()
    }
}

fn check_face<T: Real>(p: &Polytope<T>, face: &Face<T>) -> Result<()> {
    if p.contains_face(face) {
        Ok(())
    } else {
        Err(Error::FaceNotOfPolytope)
    }
}

pub fn normal_cone<T: Real>(p: &Polytope<T>, face: &Face<T>) -> Result<NormalCone<T>> {
    check_face(p, face)?;
    let complement = face.direction_frame.complement();
    let facet_normals =
        face.incident_facets.iter().map(|&i| p.relative_facets()[i].normal.clone()).collect();
    let generators: Vec<DVector<T>> = p.vertices().iter().map(|v| v - &face.base_point).collect();
    let tol = T::lit(TAU_CONE) * p.scale().max(T::lit(f64::MIN_POSITIVE));
    Ok(NormalCone { face_dim: face.dim, facet_normals, complement_frame: complement, generators, tol })
}

/// Orthonormal basis of `aff(P)` directions orthogonal to the face.
fn relative_complement<T: Real>(p: &Polytope<T>, face: &Face<T>) -> Vec<DVector<T>> {
    let face_frame = face.direction_frame.vectors();
    let projected: Vec<DVector<T>> = p
        .affine_frame()
        .vectors()
        .iter()
        .map(|b| {
            let mut w = b.clone();
            for f in face_frame {
                let c = f.dot(&w);
                w.axpy(-c, f, T::one());
            }
            w
        })
        .collect();
    linalg::orthonormalize(&projected, T::geom_tol())
}

/// Hit fraction of the cone `{u : <u, g> <= tol |u| for all g}` on the unit
/// sphere of the span of `basis`.
fn monte_carlo_fraction<T: Real>(
    basis: &[DVector<T>],
    generators: &[DVector<T>],
    tol: T,
    mc: &MonteCarloConfig,
) -> AngleEstimate<T> {
    let coords: Vec<DVector<T>> = generators
        .iter()
        .map(|g| DVector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(g))))
        .filter(|q| q.norm() > tol)
        .collect();
    let (value, stderr) =
        sphere_fraction(mc, basis.len(), |u: &DVector<T>| coords.iter().all(|q| q.dot(u) <= tol));
    AngleEstimate { value, stderr, method: AngleMethodUsed::MonteCarlo, samples: mc.samples }
}

fn cross3<T: Real>(a: &DVector<T>, b: &DVector<T>) -> DVector<T> {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Fraction of `S^2` covered by the pointed cone spanned by `rays` (given in
/// 3-dimensional coordinates, each an extreme ray).
fn spherical_polygon_fraction<T: Real>(rays: &[DVector<T>]) -> T {
    let rays: Vec<DVector<T>> = rays.iter().map(|r| r.normalize()).collect();
    let centre = rays.iter().fold(DVector::zeros(3), |a, r| a + r).normalize();
    let seed = if centre[0].abs() < T::lit(0.9) {
        DVector::from_vec(vec![T::one(), T::zero(), T::zero()])
    } else {
        DVector::from_vec(vec![T::zero(), T::one(), T::zero()])
    };
    let e1 = (&seed - &centre * centre.dot(&seed)).normalize();
    let e2 = cross3(&centre, &e1);
    let mut ordered: Vec<(T, DVector<T>)> =
        rays.into_iter().map(|r| (r.dot(&e2).atan2(r.dot(&e1)), r)).collect();
    ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let g: Vec<DVector<T>> = ordered.into_iter().map(|(_, r)| r).collect();
    let two = T::lit(2.0);
    let mut solid = T::zero();
    for i in 1..g.len() - 1 {
        let (a, b, c) = (&g[0], &g[i], &g[i + 1]);
        let num = a.dot(&cross3(b, c)).abs();
        let den = T::one() + a.dot(b) + b.dot(c) + c.dot(a);
        solid += two * num.atan2(den);
    }
    solid / (T::lit(4.0) * T::pi())
}

/// External angle `γ(F, P)`: the fraction of the unit sphere of the
/// orthogonal complement of `F` (inside `aff P`) occupied by `N_F P`.
pub fn external_angle<T: Real>(
    p: &Polytope<T>,
    face: &Face<T>,
    mc: &MonteCarloConfig,
) -> Result<AngleEstimate<T>> {
    check_face(p, face)?;
    let codim = p.dim() - face.dim;
    if codim == 0 {
        return Ok(AngleEstimate::exact(T::one(), AngleMethodUsed::WholePolytope));
    }
    if mc.method == AngleMethod::Auto {
        let normals: Vec<&DVector<T>> =
            face.incident_facets.iter().map(|&i| &p.relative_facets()[i].normal).collect();
        if codim == 1 {
            return Ok(AngleEstimate::exact(T::lit(0.5), AngleMethodUsed::Facet));
        }
        if codim == 2 && normals.len() == 2 {
            let c = normals[0].dot(normals[1]).max(-T::one()).min(T::one());
            return Ok(AngleEstimate::exact(c.acos() / T::two_pi(), AngleMethodUsed::Dihedral));
        }
        let orthogonal = normals.len() == codim
            && normals.iter().enumerate().all(|(i, a)| {
                normals[i + 1..].iter().all(|b| a.dot(b).abs() <= T::tight_tol())
            });
        if orthogonal {
            let value = T::one() / T::lit(2.0).powi(codim as i32);
            return Ok(AngleEstimate::exact(value, AngleMethodUsed::Orthant));
        }
        if codim == 3 {
            let basis = relative_complement(p, face);
            let rays: Vec<DVector<T>> = normals
                .iter()
                .map(|nv| DVector::from_iterator(3, basis.iter().map(|b| b.dot(nv))))
                .collect();
            return Ok(AngleEstimate::exact(
                spherical_polygon_fraction(&rays),
                AngleMethodUsed::SphericalPolygon,
            ));
        }
    }
    let basis = relative_complement(p, face);
    let generators: Vec<DVector<T>> = p.vertices().iter().map(|v| v - &face.base_point).collect();
    let tol = T::lit(TAU_CONE) * p.scale().max(T::lit(f64::MIN_POSITIVE));
    Ok(monte_carlo_fraction(&basis, &generators, tol, mc))
}

/// The external angle computed intrinsically in `aff P` and by Monte Carlo
/// over the full ambient complement of the face.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RestrictionCheck<T: Real> {
    pub intrinsic: AngleEstimate<T>,
    pub ambient: AngleEstimate<T>,
}

impl<T: Real> RestrictionCheck<T> {
    /// `|intrinsic - ambient|` in units of the combined standard error.
    pub fn sigmas(&self) -> T {
        let se = (self.intrinsic.stderr.powi(2) + self.ambient.stderr.powi(2)).sqrt();
        let diff = (self.intrinsic.value - self.ambient.value).abs();
        if se == T::zero() {
            if diff == T::zero() {
                T::zero()
            } else {
                T::max_value().unwrap_or(T::one())
            }
        } else {
            diff / se
        }
    }
}

pub fn restriction_invariance_check<T: Real>(
    p: &Polytope<T>,
    face: &Face<T>,
    mc: &MonteCarloConfig,
) -> Result<RestrictionCheck<T>> {
    let intrinsic = external_angle(p, face, mc)?;
    let cone = normal_cone(p, face)?;
    let ambient = if cone.ambient_codim() == 0 {
        AngleEstimate::exact(T::one(), AngleMethodUsed::WholePolytope)
    } else {
        monte_carlo_fraction(
            cone.complement_frame.vectors(),
            &cone.generators,
            cone.tol,
            &mc.child(0x5eed),
        )
    };
    Ok(RestrictionCheck { intrinsic, ambient })
}

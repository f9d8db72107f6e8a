//! Angular valuations `μ_f(P) = Σ_F f(F̄) γ(F,P) vol_k(F)` and the general
//! ray-function construction `μ_h`.

use nalgebra::DVector;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{pluecker, Frame};
use crate::klain::{Constant, KlainFunction};
use crate::polytope::{external_angle, normal_cone, AngleEstimate, Polytope};
use crate::random::{sphere_mean, stream_rng, unit_vector, MonteCarloConfig};
use crate::scalar::{cabs, cx, Cx, Real};

/// Contribution of one k-face.
#[derive(Clone, Debug, Serialize)]
pub struct FaceTerm<T: Real> {
    pub vertex_ids: Vec<usize>,
    pub volume: T,
    /// `f(F̄)` for angular valuations; the ray average for `μ_h`.
    pub weight: Cx<T>,
    pub angle: Option<AngleEstimate<T>>,
    pub value: Cx<T>,
    pub stderr: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evaluation<T: Real> {
    pub k: usize,
    pub value: Cx<T>,
    /// Accumulated Monte Carlo standard error (zero on exact paths).
    pub stderr: T,
    pub terms: Vec<FaceTerm<T>>,
}

impl<T: Real> Evaluation<T> {
    pub fn is_exact(&self) -> bool {
        self.stderr == T::zero()
    }
}

fn check_degree<T: Real>(p: &Polytope<T>, n: usize, k: usize) -> Result<()> {
    if n != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: n });
    }
    if k > p.dim() {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the polytope dimension {}", p.dim())));
    }
    Ok(())
}

fn face_seed(k: usize, index: usize) -> u64 {
    ((k as u64) << 32) | index as u64
}

/// `μ_f(P) = Σ_{k-faces F} f(ψ(F̄)) γ(F,P) vol_k(F)`.
pub fn mu_angular<T: Real>(
    f: &dyn KlainFunction<T>,
    p: &Polytope<T>,
    k: usize,
    mc: &MonteCarloConfig,
) -> Result<Evaluation<T>> {
    check_degree(p, f.n(), k)?;
    if f.k() != k {
        return Err(Error::DegreeMismatch { expected: k, found: f.k() });
    }
    let mut value = Cx::zero();
    let mut var = T::zero();
    let mut terms = Vec::new();
    for (i, face) in p.faces(k)?.iter().enumerate() {
        if face.volume == T::zero() {
            continue;
        }
        let weight = f.eval(&pluecker(&face.direction_frame)?)?;
        let angle = external_angle(p, face, &mc.child(face_seed(k, i)))?;
        let term = weight * cx(angle.value * face.volume);
        let se = cabs(weight) * face.volume * angle.stderr;
        value += term;
        var += se * se;
        terms.push(FaceTerm {
            vertex_ids: face.vertex_ids.clone(),
            volume: face.volume,
            weight,
            angle: Some(angle),
            value: term,
            stderr: se,
        });
    }
    Ok(Evaluation { k, value, stderr: var.sqrt(), terms })
}

/// Intrinsic volume `V_k(P)`: `μ_f` with `f ≡ 1`.
pub fn intrinsic_volume<T: Real>(p: &Polytope<T>, k: usize, mc: &MonteCarloConfig) -> Result<(T, T)> {
    let one = Constant::one(p.n(), k);
    let e = mu_angular(&one, p, k, mc)?;
    if e.value.im.abs() > T::lit(1e-12) {
        return Err(Error::NonReal { imag: e.value.im.as_f64() });
    }
    Ok((e.value.re, e.stderr))
}

/// Function `h(E, ℓ)` of a k-plane `E` and a ray `ℓ ⊥ E`, even in `ℓ`.
pub trait RayFunction<T: Real>: Sync {
    fn eval(&self, plane: &Frame<T>, ray: &DVector<T>) -> Cx<T>;
    fn tag(&self) -> String {
        "ray".into()
    }
}

/// Ray function given by a closure.
pub struct RayFn<F>(pub F);

impl<T: Real, F> RayFunction<T> for RayFn<F>
where
    F: Fn(&Frame<T>, &DVector<T>) -> Cx<T> + Sync,
{
    fn eval(&self, plane: &Frame<T>, ray: &DVector<T>) -> Cx<T> {
        (self.0)(plane, ray)
    }
}

/// `h(E, ℓ) = f(E)`, the pullback of a Klain function.
pub struct KlainRay<'a, T: Real>(pub &'a dyn KlainFunction<T>);

impl<T: Real> RayFunction<T> for KlainRay<'_, T> {
    fn eval(&self, plane: &Frame<T>, _ray: &DVector<T>) -> Cx<T> {
        pluecker(plane).and_then(|xi| self.0.eval(&xi)).unwrap_or_else(|_| Cx::new(T::lit(f64::NAN), T::lit(f64::NAN)))
    }
    fn tag(&self) -> String {
        self.0.tag()
    }
}

const EVENNESS_PROBES: usize = 16;

/// `μ_h(P) = Σ_{k-faces F} vol_k(F) ∫ h(F̄, ℓ) 1[ℓ ⊂ N_F P] dℓ`, the integral
/// taken against the rotation-invariant probability measure on rays of
/// `F̄^⊥ ⊂ R^n`.
///
/// When `F̄^⊥` is a line the integral is evaluated exactly; otherwise by Monte
/// Carlo. Rejects `h` that are not even in `ℓ` and `k = n`.
pub fn mu_general<T: Real, H: RayFunction<T> + ?Sized>(
    h: &H,
    p: &Polytope<T>,
    k: usize,
    mc: &MonteCarloConfig,
) -> Result<Evaluation<T>> {
    check_degree(p, p.n(), k)?;
    if k == p.n() {
        return Err(Error::InvalidParameter("μ_h needs k < n: there are no rays orthogonal to R^n".into()));
    }
    let half = T::lit(0.5);
    let mut value = Cx::zero();
    let mut var = T::zero();
    let mut terms = Vec::new();
    for (i, face) in p.faces(k)?.iter().enumerate() {
        if face.volume == T::zero() {
            continue;
        }
        let cone = normal_cone(p, face)?;
        let plane = &face.direction_frame;
        let comp = cone.complement_frame.vectors();
        let m = comp.len();
        let embed = |u: &DVector<T>| comp.iter().zip(u.iter()).fold(DVector::zeros(p.n()), |a, (b, &c)| a + b * c);

        let mut rng = stream_rng(mc.seed, face_seed(k, i) ^ 0xe7e7);
        for _ in 0..EVENNESS_PROBES {
            let l = embed(&unit_vector::<T, _>(&mut rng, m));
            let (a, b) = (h.eval(plane, &l), h.eval(plane, &-l.clone()));
            let dev = cabs(a - b);
            if dev > T::lit(1e-9) * (T::one() + cabs(a)) {
                return Err(Error::OddRayFunction { deviation: dev.as_f64() });
            }
        }

        let (mean, se) = if m == 1 {
            let nu = comp[0].clone();
            let mut s = Cx::zero();
            for l in [nu.clone(), -nu] {
                if cone.contains(&l) {
                    s += h.eval(plane, &l) * cx(half);
                }
            }
            (s, T::zero())
        } else {
            sphere_mean(&mc.child(face_seed(k, i)), m, |u: &DVector<T>| {
                let l = embed(u);
                if cone.contains(&l) {
                    h.eval(plane, &l)
                } else {
                    Cx::zero()
                }
            })
        };
        let term = mean * cx(face.volume);
        let se = se * face.volume;
        value += term;
        var += se * se;
        terms.push(FaceTerm {
            vertex_ids: face.vertex_ids.clone(),
            volume: face.volume,
            weight: mean,
            angle: None,
            value: term,
            stderr: se,
        });
    }
    Ok(Evaluation { k, value, stderr: var.sqrt(), terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::binomial;
    use crate::klain::HighestWeight;
    use crate::polytope::{make_shape, ShapeKind};
    use approx::assert_relative_eq;

    fn cube(n: usize) -> Polytope<f64> {
        make_shape(&ShapeKind::Cube { n }).unwrap()
    }

    #[test]
    fn intrinsic_volumes_of_cubes() {
        let mc = MonteCarloConfig::default();
        for n in 1..=4 {
            for k in 0..=n {
                let (v, se) = intrinsic_volume(&cube(n), k, &mc).unwrap();
                assert_eq!(se, 0.0);
                assert_relative_eq!(v, binomial(n, k) as f64, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn segment_length() {
        let s = make_shape::<f64>(&ShapeKind::Segment { n: 3, length: 2.5 }).unwrap();
        let (v, _) = intrinsic_volume(&s, 1, &MonteCarloConfig::default()).unwrap();
        assert_relative_eq!(v, 2.5, epsilon = 1e-12);
    }

    #[test]
    fn general_with_constant_matches_angular() {
        let p = make_shape::<f64>(&ShapeKind::Simplex { n: 3 }).unwrap();
        let mc = MonteCarloConfig::with_seed(4).samples(40_000);
        for k in 0..3 {
            let one = RayFn(|_: &Frame<f64>, _: &DVector<f64>| Cx::new(1.0, 0.0));
            let g = mu_general(&one, &p, k, &mc).unwrap();
            let (a, _) = intrinsic_volume(&p, k, &MonteCarloConfig::default()).unwrap();
            assert!((g.value.re - a).abs() <= 4.0 * g.stderr + 1e-12, "k={k}: {} vs {a}", g.value.re);
        }
    }

    #[test]
    fn general_facet_ray_integral() {
        let h = RayFn(|_: &Frame<f64>, l: &DVector<f64>| Cx::new(l[0] * l[0], 0.0));
        let g = mu_general(&h, &cube(3), 2, &MonteCarloConfig::default()).unwrap();
        assert_eq!(g.stderr, 0.0);
        assert_relative_eq!(g.value.re, 1.0, epsilon = 1e-12);
        let odd = RayFn(|_: &Frame<f64>, l: &DVector<f64>| Cx::new(l[0], 0.0));
        assert!(matches!(
            mu_general(&odd, &cube(3), 1, &MonteCarloConfig::default()),
            Err(Error::OddRayFunction { .. })
        ));
        assert!(mu_general(&h, &cube(3), 3, &MonteCarloConfig::default()).is_err());
    }

    #[test]
    fn klain_consistency_on_a_flat_box() {
        // unit square spanned by e1, e3 in R^4: f_{1,0}(e13) = 1, f_{1,0}(e12) = 0
        let v = |x: [f64; 4]| DVector::from_vec(x.to_vec());
        let sq = Polytope::new(vec![
            v([0.0, 0.0, 0.0, 0.0]),
            v([2.0, 0.0, 0.0, 0.0]),
            v([0.0, 0.0, 3.0, 0.0]),
            v([2.0, 0.0, 3.0, 0.0]),
        ])
        .unwrap();
        let f = HighestWeight::new(4, 1, 0).unwrap();
        let e = mu_angular(&f, &sq, 2, &MonteCarloConfig::default()).unwrap();
        assert_relative_eq!(e.value.re, 6.0, epsilon = 1e-10);
        assert_relative_eq!(e.value.im, 0.0, epsilon = 1e-10);
    }
}

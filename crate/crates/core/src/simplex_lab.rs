//! The simplex family `S = conv{0, v_1, .., v_{n-1}, t v_n}` and the
//! `t -> 0⁺` derivative of its sign-averaged angular valuation.
//!
//! Facets are labelled so that `p_i ∉ F_i` (`p_0 = 0`, `p_i = v_i`,
//! `p_n = t v_n`), with outward normals `u_i = -v_i` and
//! `u_0 = (t Σ_{i<n} v_i + v_n) / √(1 + (n-1)t²)`.

use nalgebra::DVector;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{simple, Frame, KVector, TAU_ONB};
use crate::extendability::relation_residual;
use crate::klain::{DynKlain, HodgePullback, KlainFunction};
use crate::numerics::{halving_grid, richardson, Extrapolation};
use crate::polytope::simplex_s;
use crate::random::MonteCarloConfig;
use crate::scalar::{cx, factorial, Cx, Real};
use crate::valuation::mu_angular;

/// The four kinds of `(n-2)`-faces `F_i ∩ F_j` of `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceClass {
    /// `F_i ∩ F_n`, `1 <= i < n`.
    SideBase,
    /// `F_i ∩ F_j`, `1 <= i < j < n`; shrinks with `t`.
    Side,
    /// `F_0 ∩ F_n = conv{v_1, .., v_{n-1}}`.
    TopBase,
    /// `F_0 ∩ F_i`, `1 <= i < n`.
    TopSide,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplexFace<T: Real> {
    pub class: FaceClass,
    /// The two facets meeting in the face, `i < j`.
    pub facets: (usize, usize),
    /// Vertex indices `{0..=n} \ {i, j}`.
    pub vertex_ids: Vec<usize>,
    pub volume: T,
    /// Dihedral angle `θ_ij` with `cos θ_ij = <u_i, u_j>`.
    pub theta: T,
    pub normals: (DVector<T>, DVector<T>),
}

impl<T: Real> SimplexFace<T> {
    /// External angle `θ_ij / 2π`.
    pub fn external_angle(&self) -> T {
        self.theta / T::two_pi()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplexFaceTable<T: Real> {
    pub n: usize,
    pub t: T,
    pub faces: Vec<SimplexFace<T>>,
}

impl<T: Real> SimplexFaceTable<T> {
    pub fn face(&self, i: usize, j: usize) -> Option<&SimplexFace<T>> {
        let key = (i.min(j), i.max(j));
        self.faces.iter().find(|f| f.facets == key)
    }
}

pub fn theta_0n<T: Real>(n: usize, t: T) -> T {
    (-T::one() / (T::one() + T::count(n - 1) * t * t).sqrt()).acos()
}

pub fn theta_0i<T: Real>(n: usize, t: T) -> T {
    (-t / (T::one() + T::count(n - 1) * t * t).sqrt()).acos()
}

fn check_simplex_basis<T: Real>(basis: &Frame<T>) -> Result<usize> {
    let n = basis.n();
    if basis.k() != n {
        return Err(Error::DimensionMismatch { expected: n, found: basis.k() });
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("the simplex family needs n >= 3, got {n}")));
    }
    let dev = basis.orthonormal_deviation();
    if dev > T::lit(TAU_ONB) {
        return Err(Error::NotOrthonormal { deviation: dev.as_f64() });
    }
    Ok(n)
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Closed-form volumes, dihedral angles and normals of all `(n-2)`-faces.
pub fn face_table<T: Real>(basis: &Frame<T>, t: T) -> Result<SimplexFaceTable<T>> {
    let n = check_simplex_basis(basis)?;
    check_t(t)?;
    let v = basis.vectors();
    let root = (T::one() + T::count(n - 1) * t * t).sqrt();
    let u0 = (v[..n - 1].iter().fold(DVector::zeros(n), |a, b| a + b * t) + &v[n - 1]) / root;
    let normal = |i: usize| if i == 0 { u0.clone() } else { -v[i - 1].clone() };
    let unit = T::one() / factorial::<T>(n - 2);
    let right = T::frac_pi_2();
    let mut faces = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let (class, volume, theta) = match (i, j) {
                (0, j) if j == n => (FaceClass::TopBase, T::count(n - 1).sqrt() * unit, theta_0n(n, t)),
                (0, _) => (
                    FaceClass::TopSide,
                    (T::one() + T::count(n - 2) * t * t).sqrt() * unit,
                    theta_0i(n, t),
                ),
                (_, j) if j == n => (FaceClass::SideBase, unit, right),
                _ => (FaceClass::Side, t * unit, right),
            };
            faces.push(SimplexFace {
                class,
                facets: (i, j),
                vertex_ids: (0..=n).filter(|&k| k != i && k != j).collect(),
                volume,
                theta,
                normals: (normal(i), normal(j)),
            });
        }
    }
    Ok(SimplexFaceTable { n, t, faces })
}

/// Default `t` grid: `10^-2 / 2^j` for `j = 0..5`. Finer grids lose more to
/// cancellation in the differences than Richardson gains.
pub fn default_t_grid() -> Vec<f64> {
    halving_grid(1e-2, 6e-4)
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidParameter("the t grid needs at least two points".into()));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > 0.0) || ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "the t grid must halve at every step (got {} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Central difference `(g(t + t/2) - g(t - t/2)) / t`.
fn central<T: Real>(g: impl Fn(T) -> T, t: T) -> T {
    let d = t * T::lit(0.5);
    (g(t + d) - g(t - d)) / t
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaLimits<T: Real> {
    pub n: usize,
    pub theta_0n: Extrapolation<T>,
    pub dtheta_0n: Extrapolation<T>,
    pub theta_0i: Extrapolation<T>,
    pub dtheta_0i: Extrapolation<T>,
}

impl<T: Real> ThetaLimits<T> {
    /// `(θ_0n, θ'_0n, θ_0i, θ'_0i)` at `0⁺`.
    pub fn values(&self) -> [T; 4] {
        [self.theta_0n.estimate, self.dtheta_0n.estimate, self.theta_0i.estimate, self.dtheta_0i.estimate]
    }

    /// The limits `(π, -√(n-1), π/2, 1)`.
    pub fn expected(n: usize) -> [T; 4] {
        [T::pi(), -T::count(n - 1).sqrt(), T::frac_pi_2(), T::one()]
    }
}

/// One-sided limits of `θ_0n`, `θ_0i` and their derivatives at `t = 0⁺`,
/// extrapolated from the closed forms on a halving grid.
pub fn theta_limits<T: Real>(n: usize, t_grid: &[f64]) -> Result<ThetaLimits<T>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("theta limits need n >= 3, got {n}")));
    }
    check_grid(t_grid)?;
    let ts: Vec<T> = t_grid.iter().map(|&t| T::lit(t)).collect();
    let sample = |g: &dyn Fn(T) -> T| richardson(&ts.iter().map(|&t| g(t)).collect::<Vec<_>>());
    let d = |g: fn(usize, T) -> T| richardson(&ts.iter().map(|&t| central(|s| g(n, s), t)).collect::<Vec<_>>());
    Ok(ThetaLimits {
        n,
        theta_0n: sample(&|t| theta_0n(n, t)),
        dtheta_0n: d(theta_0n),
        theta_0i: sample(&|t| theta_0i(n, t)),
        dtheta_0i: d(theta_0i),
    })
}

fn check_degree<T: Real>(f: &dyn KlainFunction<T>, basis: &Frame<T>) -> Result<usize> {
    let n = check_simplex_basis(basis)?;
    if f.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.n() });
    }
    if f.k() != n - 2 {
        return Err(Error::DegreeMismatch { expected: n - 2, found: f.k() });
    }
    Ok(n)
}

/// `∧_{k ∉ skip} v_k` over `1 <= k <= m` (1-based labels).
fn wedge_except<T: Real>(v: &[DVector<T>], m: usize, skip: &[usize]) -> Result<KVector<T>> {
    let n = v.len();
    let factors: Vec<DVector<T>> = (1..=m).filter(|k| !skip.contains(k)).map(|k| v[k - 1].clone()).collect();
    simple(n, &factors)
}

/// `1/(4(n-2)!) Σ_{1<=i<j<n} f(∧_{k≠i,j} v_k)`.
pub fn comp1_closed_form<T: Real>(f: &dyn KlainFunction<T>, basis: &Frame<T>) -> Result<Cx<T>> {
    let n = check_degree(f, basis)?;
    let v = basis.vectors();
    let mut sum = Cx::<T>::zero();
    for i in 1..n {
        for j in i + 1..n {
            sum += f.eval_span(&wedge_except(v, n, &[i, j])?)?;
        }
    }
    Ok(sum * cx(T::one() / (T::lit(4.0) * factorial::<T>(n - 2))))
}

/// The three contributions to the derivative at `0⁺` for an angular
/// valuation: shrinking side faces, the top-base dihedral angle, and the
/// top-side dihedral angles.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Comp2Terms<T: Real> {
    pub side: Cx<T>,
    pub top_base: Cx<T>,
    pub top_side: Cx<T>,
}

impl<T: Real> Comp2Terms<T> {
    pub fn total(&self) -> Cx<T> {
        self.side + self.top_base + self.top_side
    }
}

/// Sign vectors `ε ∈ {±1}^m`.
fn sign_vectors<T: Real>(m: usize) -> impl Iterator<Item = Vec<T>> {
    (0..1usize << m).map(move |bits| (0..m).map(|i| if bits >> i & 1 == 1 { -T::one() } else { T::one() }).collect())
}

/// The three terms of the closed form for an angular valuation.
///
/// The middle term evaluates `f` on the span of
/// `Σ_{i<n} (-1)^i ε_i ∧_{k<n, k≠i} v_k`, a simple vector of norm `√(n-1)`.
pub fn comp2_terms<T: Real>(f: &dyn KlainFunction<T>, basis: &Frame<T>) -> Result<Comp2Terms<T>> {
    let n = check_degree(f, basis)?;
    let v = basis.vectors();
    let fact = factorial::<T>(n - 2);
    let side = comp1_closed_form(f, basis)?;

    let minors: Vec<KVector<T>> = (1..n).map(|i| wedge_except(v, n - 1, &[i])).collect::<Result<_>>()?;
    let mut avg = Cx::<T>::zero();
    let mut count = 0usize;
    for eps in sign_vectors::<T>(n - 1) {
        let mut w = KVector::zero(n, n - 2)?;
        for (idx, m) in minors.iter().enumerate() {
            let sign = if (idx + 1) % 2 == 0 { T::one() } else { -T::one() };
            w = w + m.clone() * (sign * eps[idx]);
        }
        avg += f.eval_span(&w)?;
        count += 1;
    }
    avg /= cx(T::count(count));
    let top_base = -avg * cx(T::count(n - 1) / (T::two_pi() * fact));

    let mut third = Cx::<T>::zero();
    for m in &minors {
        third += f.eval_span(m)?;
    }
    let top_side = third * cx(T::one() / (T::two_pi() * fact));
    Ok(Comp2Terms { side, top_base, top_side })
}

pub fn comp2_closed_form<T: Real>(f: &dyn KlainFunction<T>, basis: &Frame<T>) -> Result<Cx<T>> {
    comp2_terms(f, basis).map(|c| c.total())
}

/// `comp2 - comp1` next to `-r / (2π (n-2)!)`, where `r` is the sign-average
/// relation residual of `W ↦ f(*W)` on the same basis.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RelationGap<T: Real> {
    pub comp1: Cx<T>,
    pub comp2: Cx<T>,
    pub gap: Cx<T>,
    pub relation_residual: Cx<T>,
    pub scaled_residual: Cx<T>,
}

pub fn relation_gap<T: Real>(f: DynKlain<T>, basis: &Frame<T>) -> Result<RelationGap<T>> {
    let n = check_degree(f.as_ref(), basis)?;
    let comp1 = comp1_closed_form(f.as_ref(), basis)?;
    let comp2 = comp2_closed_form(f.as_ref(), basis)?;
    let h = HodgePullback::new(f);
    let r = relation_residual(&h, basis)?;
    let scaled = -r * cx(T::one() / (T::two_pi() * factorial::<T>(n - 2)));
    Ok(RelationGap { comp1, comp2, gap: comp2 - comp1, relation_residual: r, scaled_residual: scaled })
}

/// `avg_ε μ_f(S(ε_1 v_1, .., ε_{n-1} v_{n-1}, v_n; t))` at degree `n-2`.
pub fn averaged_valuation<T: Real>(
    f: &dyn KlainFunction<T>,
    basis: &Frame<T>,
    t: T,
    mc: &MonteCarloConfig,
) -> Result<Cx<T>> {
    let n = check_degree(f, basis)?;
    check_t(t)?;
    let v = basis.vectors();
    let mut sum = Cx::<T>::zero();
    let mut count = 0usize;
    for eps in sign_vectors::<T>(n - 1) {
        let mut signed: Vec<DVector<T>> = v[..n - 1].iter().zip(&eps).map(|(x, &e)| x * e).collect();
        signed.push(v[n - 1].clone());
        let s = simplex_s(&signed, t)?;
        sum += mu_angular(f, &s, n - 2, mc)?.value;
        count += 1;
    }
    Ok(sum / cx(T::count(count)))
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport<T: Real> {
    pub n: usize,
    pub function: String,
    pub t_grid: Vec<f64>,
    /// Central differences of the averaged valuation at each grid point.
    pub differences: Vec<Cx<T>>,
    pub estimate: Cx<T>,
    pub spread: T,
    pub comp1: Cx<T>,
    pub comp2: Cx<T>,
}

/// Finite-difference estimate of `d/dt avg_ε μ_f(S)` at `t = 0⁺`.
///
/// Central differences with step `t/2` are taken at each point of a halving
/// grid and extrapolated to `t = 0` separately in the real and imaginary
/// parts. Fails with [`Error::UnstableExtrapolation`] when the last
/// elimination step changes the estimate by more than `tol`.
pub fn averaged_derivative_experiment<T: Real>(
    f: &dyn KlainFunction<T>,
    basis: &Frame<T>,
    t_grid: &[f64],
    tol: f64,
    mc: &MonteCarloConfig,
) -> Result<DerivativeReport<T>> {
    let n = check_degree(f, basis)?;
    check_grid(t_grid)?;
    let differences: Vec<Cx<T>> = t_grid
        .par_iter()
        .map(|&t| {
            let t = T::lit(t);
            let d = t * T::lit(0.5);
            let hi = averaged_valuation(f, basis, t + d, mc)?;
            let lo = averaged_valuation(f, basis, t - d, mc)?;
            Ok((hi - lo) / cx(t))
        })
        .collect::<Result<_>>()?;
    let re = richardson(&differences.iter().map(|z| z.re).collect::<Vec<_>>());
    let im = richardson(&differences.iter().map(|z| z.im).collect::<Vec<_>>());
    let spread = re.spread.max(im.spread);
    if spread.as_f64() > tol {
        return Err(Error::UnstableExtrapolation { spread: spread.as_f64() });
    }
    Ok(DerivativeReport {
        n,
        function: f.tag(),
        t_grid: t_grid.to_vec(),
        differences,
        estimate: Cx::new(re.estimate, im.estimate),
        spread,
        comp1: comp1_closed_form(f, basis)?,
        comp2: comp2_closed_form(f, basis)?,
    })
}

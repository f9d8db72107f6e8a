//! Extendability tests for Klain functions on `Gr_2(R^n)` and beyond.
//!
//! The core test is the sign-average relation
//!
//! ```text
//! (n-1) · avg_ε f((1/√(n-1)) Σ_{i<n} ε_i u_i ∧ u_n) = Σ_{i<n} f(u_i ∧ u_n)
//! ```
//!
//! over orthonormal bases `u`, which holds exactly for restrictions of
//! quadratic forms on `Λ^2`. Random bases can only show that no violation was
//! found; [`fit::quadratic_fit`] supplies the constructive certificate.

pub mod fit;
pub mod oracles;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{hodge_standard, simple, Frame, TAU_ONB};
use crate::klain::{DynKlain, FnKlain, KlainFunction};
use crate::random::{derive_seed, random_frame, random_onb_with, stream_rng};
use crate::scalar::{cabs, cx, Cx, Real};

pub use fit::{dimension_formula, quadratic_fit, quadratic_space_dimension, FitReport};
pub use oracles::{hw_relation_sides, hw_relation_sides_n5};

/// Largest `n` for which the `2^{n-2}` sign sum is attempted.
pub const MAX_SIGN_DIM: usize = 20;
/// Residuals above this are always a violation.
pub const FAIL_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// No violation found on the tested bases.
    Pass,
    Fail,
    /// Between the tolerance and the failure floor; test more bases.
    Inconclusive,
}

impl Verdict {
    pub fn classify(max_abs: f64, tol: f64) -> Self {
        if max_abs <= tol {
            Verdict::Pass
        } else if max_abs > tol.max(FAIL_FLOOR) {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }
}

/// How a tested basis was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisFamily {
    Random,
    /// `u_1 = s e_1 - c e_3, u_2 = e_2, u_i = e_{i+1}, u_n = c e_1 + s e_3`.
    OneAngle,
    /// `u_1 = c(a e_1 + b e_3) + s e_n, u_2 = s(a e_1 + b e_3) - c e_n,
    /// u_3 = e_2, u_i = e_i, u_n = -b e_1 + a e_3`.
    TwoAngle,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow<T: Real> {
    pub family: BasisFamily,
    /// Angles `φ` (and `ψ`) for structured bases.
    pub angles: Vec<f64>,
    /// Seed of the random basis.
    pub seed: Option<u64>,
    pub lhs: Cx<T>,
    pub rhs: Cx<T>,
    pub residual: Cx<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport<T: Real> {
    pub function: String,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub rows: Vec<ResidualRow<T>>,
    pub max_abs: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl<T: Real> RelationReport<T> {
    fn new(function: String, n: usize, k: usize, cfg: &RelationConfig, rows: Vec<ResidualRow<T>>) -> Self {
        let max_abs = rows.iter().map(|r| cabs(r.residual).as_f64()).fold(0.0, f64::max);
        let verdict = Verdict::classify(max_abs, cfg.tol);
        let note = match verdict {
            Verdict::Pass => "no violation found on the tested bases (evidence, not a proof)".to_string(),
            Verdict::Fail => "relation violated".to_string(),
            Verdict::Inconclusive => format!(
                "max residual {max_abs:e} lies between tol {:e} and {:e}; test more structured bases",
                cfg.tol,
                cfg.tol.max(FAIL_FLOOR)
            ),
        };
        Self { function, n, k, trials: cfg.trials, seed: cfg.seed, tol: cfg.tol, rows, max_abs, verdict, note }
    }

    /// Largest `|residual|` among rows of one basis family.
    pub fn max_for(&self, family: BasisFamily) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.family == family)
            .map(|r| cabs(r.residual).as_f64())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RelationConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Add the one-angle (and for `n >= 4` two-angle) structured families,
    /// swept over multiples of `π/16`.
    pub structured: bool,
}

impl Default for RelationConfig {
    fn default() -> Self {
        Self { trials: 50, seed: 0, tol: 1e-8, structured: true }
    }
}

fn check_basis<T: Real>(onb: &Frame<T>) -> Result<usize> {
    let n = onb.n();
    if onb.k() != n {
        return Err(Error::DimensionMismatch { expected: n, found: onb.k() });
    }
    let dev = onb.orthonormal_deviation();
    if dev > T::lit(TAU_ONB) {
        return Err(Error::NotOrthonormal { deviation: dev.as_f64() });
    }
    Ok(n)
}

/// Both sides of the sign-average relation for `f` on `Gr_2(R^n)`.
///
/// Only sign vectors with `ε_1 = +1` are evaluated; evenness of `f` accounts
/// for the other half.
pub fn relation_sides<T: Real>(f: &dyn KlainFunction<T>, onb: &Frame<T>) -> Result<(Cx<T>, Cx<T>)> {
    let n = check_basis(onb)?;
    if f.k() != 2 || f.n() != n {
        return Err(Error::InvalidParameter(format!(
            "relation needs a function on Gr_2(R^{n}), got k = {} in R^{}",
            f.k(),
            f.n()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidParameter("relation needs n >= 3".into()));
    }
    if n > MAX_SIGN_DIM {
        return Err(Error::TooLarge(format!("2^{} sign vectors for n = {n} (limit n <= {MAX_SIGN_DIM})", n - 2)));
    }
    let u = onb.vectors();
    let un = &u[n - 1];
    let mut rhs = Cx::<T>::zero();
    for ui in &u[..n - 1] {
        rhs += f.eval(&simple(n, &[ui.clone(), un.clone()])?)?;
    }
    let scale = T::one() / T::count(n - 1).sqrt();
    let mut sum = Cx::<T>::zero();
    for bits in 0..1usize << (n - 2) {
        let mut w = u[0].clone();
        for (i, ui) in u[1..n - 1].iter().enumerate() {
            if bits >> i & 1 == 1 {
                w -= ui;
            } else {
                w += ui;
            }
        }
        sum += f.eval(&simple(n, &[w * scale, un.clone()])?)?;
    }
    let lhs = sum * cx(T::count(n - 1) / T::count(1usize << (n - 2)));
    Ok((lhs, rhs))
}

/// `lhs - rhs` of [`relation_sides`].
pub fn relation_residual<T: Real>(f: &dyn KlainFunction<T>, onb: &Frame<T>) -> Result<Cx<T>> {
    relation_sides(f, onb).map(|(l, r)| l - r)
}

/// Both sides of `2 avg_ε f((ε_1 u_1 + ε_2 u_2)/√2) = f(u_1) + f(u_2)` for an
/// even function on lines of `R^3`; the first two vectors of `onb` are used.
pub fn sphere_relation_sides<T: Real>(f: &dyn KlainFunction<T>, onb: &Frame<T>) -> Result<(Cx<T>, Cx<T>)> {
    let n = check_basis(onb)?;
    if f.k() != 1 || f.n() != 3 || n != 3 {
        return Err(Error::InvalidParameter("the line relation is for functions on Gr_1(R^3)".into()));
    }
    let u = onb.vectors();
    let r = T::lit(0.5).sqrt();
    let rhs = f.eval(&simple(3, &[u[0].clone()])?)? + f.eval(&simple(3, &[u[1].clone()])?)?;
    let plus = f.eval(&simple(3, &[(&u[0] + &u[1]) * r])?)?;
    let minus = f.eval(&simple(3, &[(&u[0] - &u[1]) * r])?)?;
    Ok((plus + minus, rhs))
}

fn basis_from(n: usize, cols: Vec<Vec<f64>>) -> Vec<DVector<f64>> {
    cols.into_iter().map(|c| DVector::from_vec(c).resize_vertically(n, 0.0)).collect()
}

fn e(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i - 1] = 1.0;
    v
}

fn to_frame<T: Real>(n: usize, vs: Vec<DVector<f64>>) -> Frame<T> {
    Frame::new(n, vs.into_iter().map(|v| v.map(T::lit)).collect()).expect("vectors have length n")
}

/// `u_1 = s e_1 - c e_3, u_2 = e_2, u_i = e_{i+1} (3 <= i <= n-1),
/// u_n = c e_1 + s e_3`.
pub fn one_angle_basis<T: Real>(n: usize, phi: f64) -> Result<Frame<T>> {
    if n < 3 {
        return Err(Error::InvalidParameter("the one-angle basis needs n >= 3".into()));
    }
    let (s, c) = phi.sin_cos();
    let mut cols = vec![vec![s, 0.0, -c], e(n, 2)];
    cols.extend((3..n).map(|i| e(n, i + 1)));
    cols.push(vec![c, 0.0, s]);
    Ok(to_frame(n, basis_from(n, cols)))
}

/// `u_1 = c(a e_1 + b e_3) + s e_n, u_2 = s(a e_1 + b e_3) - c e_n, u_3 = e_2,
/// u_i = e_i (4 <= i <= n-1), u_n = -b e_1 + a e_3` with `c, s` from `φ` and
/// `a, b` from `ψ`.
pub fn two_angle_basis<T: Real>(n: usize, phi: f64, psi: f64) -> Result<Frame<T>> {
    if n < 4 {
        return Err(Error::InvalidParameter("the two-angle basis needs n >= 4".into()));
    }
    let (s, c) = phi.sin_cos();
    let (b, a) = psi.sin_cos();
    let mut u1 = vec![c * a, 0.0, c * b];
    u1.resize(n, 0.0);
    u1[n - 1] += s;
    let mut u2 = vec![s * a, 0.0, s * b];
    u2.resize(n, 0.0);
    u2[n - 1] -= c;
    let mut cols = vec![u1, u2, e(n, 2)];
    cols.extend((4..n).map(|i| e(n, i)));
    cols.push(vec![-b, 0.0, a]);
    Ok(to_frame(n, basis_from(n, cols)))
}

/// `jπ/16` for `j = 0..16`.
pub fn angle_sweep() -> Vec<f64> {
    (0..16).map(|j| j as f64 * PI / 16.0).collect()
}

fn run_bases<T, F>(n: usize, cfg: &RelationConfig, sides: F) -> Result<Vec<ResidualRow<T>>>
where
    T: Real,
    F: Fn(&Frame<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    let mut rows: Vec<ResidualRow<T>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, t as u64);
            let onb = random_onb_with::<T, _>(&mut stream_rng(seed, 0), n);
            let (lhs, rhs) = sides(&onb)?;
            Ok(ResidualRow { family: BasisFamily::Random, angles: vec![], seed: Some(seed), lhs, rhs, residual: lhs - rhs })
        })
        .collect::<Result<_>>()?;
    if cfg.structured {
        for phi in angle_sweep() {
            let (lhs, rhs) = sides(&one_angle_basis(n, phi)?)?;
            rows.push(ResidualRow { family: BasisFamily::OneAngle, angles: vec![phi], seed: None, lhs, rhs, residual: lhs - rhs });
        }
        if n >= 4 {
            let grid: Vec<(f64, f64)> =
                angle_sweep().into_iter().flat_map(|p| angle_sweep().into_iter().map(move |q| (p, q))).collect();
            let two: Vec<ResidualRow<T>> = grid
                .into_par_iter()
                .map(|(phi, psi)| {
                    let (lhs, rhs) = sides(&two_angle_basis(n, phi, psi)?)?;
                    Ok(ResidualRow {
                        family: BasisFamily::TwoAngle,
                        angles: vec![phi, psi],
                        seed: None,
                        lhs,
                        rhs,
                        residual: lhs - rhs,
                    })
                })
                .collect::<Result<_>>()?;
            rows.extend(two);
        }
    }
    Ok(rows)
}

/// Runs the relation over `cfg.trials` random bases and the structured
/// families. Functions on `Gr_2(R^n)` use the sign-average relation; functions
/// on lines of `R^3` use its `n = 3` form.
pub fn relation_test<T: Real>(f: &dyn KlainFunction<T>, cfg: &RelationConfig) -> Result<RelationReport<T>> {
    let n = f.n();
    let rows = match (n, f.k()) {
        (_, 2) => run_bases(n, cfg, |onb: &Frame<T>| relation_sides(f, onb))?,
        (3, 1) => run_bases(3, cfg, |onb: &Frame<T>| sphere_relation_sides(f, onb))?,
        (_, k) => {
            return Err(Error::InvalidParameter(format!(
                "relation_test takes k = 2 (or k = 1 in R^3), got k = {k}; use the general-k test"
            )))
        }
    };
    Ok(RelationReport::new(f.tag(), n, f.k(), cfg, rows))
}

/// `g(W) = f(ι(*_E W))` on `Gr_2(R^{k+2})`, where `ι` is the isometric
/// embedding given by the columns of `plane` and `*_E` is the Hodge star of
/// `R^{k+2}` with its standard orientation.
pub fn restricted_complement<T: Real>(f: DynKlain<T>, plane: &Frame<T>) -> FnKlain<T> {
    let m = plane.k();
    let embed = plane.matrix();
    let tag = format!("restrict({})", f.tag());
    FnKlain::new(m, 2, tag, move |w| f.eval(&hodge_standard(w).push_forward(&embed)?))
}

/// General-k form of the test: each trial draws a random `(k+2)`-plane `E`,
/// pulls `f` back to `g` on `Gr_2(E)` through the Hodge complement inside `E`,
/// and evaluates the relation for `g` on a random basis of `E` and on the
/// one-angle family.
pub fn relation_test_general_k<T: Real>(f: DynKlain<T>, cfg: &RelationConfig) -> Result<RelationReport<T>> {
    let (n, k) = (f.n(), f.k());
    if k < 1 || k + 2 > n {
        return Err(Error::InvalidParameter(format!("general-k test needs 1 <= k <= n-2, got n = {n}, k = {k}")));
    }
    let m = k + 2;
    let chunks: Vec<Vec<ResidualRow<T>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, t as u64);
            let mut rng = stream_rng(seed, 0);
            let plane = random_frame::<T, _>(&mut rng, n, m);
            let g = restricted_complement(Arc::clone(&f), &plane);
            let onb = random_onb_with::<T, _>(&mut rng, m);
            let (lhs, rhs) = relation_sides(&g, &onb)?;
            let mut rows =
                vec![ResidualRow { family: BasisFamily::Random, angles: vec![], seed: Some(seed), lhs, rhs, residual: lhs - rhs }];
            if cfg.structured {
                for phi in angle_sweep() {
                    let (lhs, rhs) = relation_sides(&g, &one_angle_basis(m, phi)?)?;
                    rows.push(ResidualRow {
                        family: BasisFamily::OneAngle,
                        angles: vec![phi],
                        seed: Some(seed),
                        lhs,
                        rhs,
                        residual: lhs - rhs,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows = chunks.into_iter().flatten().collect();
    Ok(RelationReport::new(f.tag(), n, k, cfg, rows))
}

#[cfg(test)]
mod tests;

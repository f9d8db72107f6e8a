//! Least-squares fitting of quadratic forms on `Λ^k` to Klain functions, and
//! the rank of the space of quadratic restrictions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{binomial, pluecker, KVector};
use crate::klain::{KlainFunction, QuadraticForm};
use crate::linalg;
use crate::random::{random_frame, stream_rng};
use crate::scalar::{cabs, Cx, Real};

/// Relative singular-value cutoff of the least-squares solve.
pub const FIT_REL_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for the rank count.
pub const RANK_REL_TOL: f64 = 1e-8;

/// `C(n,k) C(n+1,k+1) / (n-k+1)`.
pub fn dimension_formula(n: usize, k: usize) -> usize {
    binomial(n, k) * binomial(n + 1, k + 1) / (n - k + 1)
}

/// Number of quadratic monomials `ξ_I ξ_J`, `I <= J`, on `Λ^k R^n`.
pub fn monomial_count(n: usize, k: usize) -> usize {
    let d = binomial(n, k);
    d * (d + 1) / 2
}

fn monomials<T: Real>(xi: &[T]) -> Vec<T> {
    let d = xi.len();
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            out.push(xi[i] * xi[j]);
        }
    }
    out
}

fn sample_points<T: Real>(n: usize, k: usize, count: usize, seed: u64) -> Result<Vec<KVector<T>>> {
    let mut rng = stream_rng(seed, 0);
    (0..count).map(|_| pluecker(&random_frame::<T, _>(&mut rng, n, k))).collect()
}

fn design<T: Real>(points: &[KVector<T>]) -> DMatrix<T> {
    let rows: Vec<Vec<T>> =
        points.iter().map(|p| monomials(&p.coeffs().iter().map(|c| c.re).collect::<Vec<_>>())).collect();
    let cols = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport<T: Real> {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub train_count: usize,
    pub test_count: usize,
    /// Numerical rank of the training design matrix.
    pub rank: usize,
    /// `sup |f - Q|` on the training points.
    pub train_residual: f64,
    /// `sup |f - Q|` on held-out points.
    pub test_residual: f64,
    #[serde(skip)]
    pub form: QuadraticForm<T>,
}

/// Fits `Q` on `Λ^k R^n` with `f(ξ) ≈ ξᵀQξ` over random Plücker points.
/// Real and imaginary parts are fitted separately.
pub fn quadratic_fit<T: Real>(
    f: &dyn KlainFunction<T>,
    train_count: usize,
    test_count: usize,
    seed: u64,
) -> Result<FitReport<T>> {
    let (n, k) = (f.n(), f.k());
    let needed = dimension_formula(n, k);
    if train_count < needed {
        return Err(Error::Underdetermined { needed, got: train_count });
    }
    let train = sample_points::<T>(n, k, train_count, seed)?;
    let test = sample_points::<T>(n, k, test_count, crate::random::derive_seed(seed, 1))?;
    let a = design(&train);
    let values: Vec<Cx<T>> = train.iter().map(|p| f.eval(p)).collect::<Result<_>>()?;
    let re = DVector::from_iterator(values.len(), values.iter().map(|z| z.re));
    let im = DVector::from_iterator(values.len(), values.iter().map(|z| z.im));
    let tol = T::lit(FIT_REL_TOL);
    let (c_re, c_im) = (linalg::least_squares(&a, &re, tol), linalg::least_squares(&a, &im, tol));

    let d = binomial(n, k);
    let mut q = DMatrix::<Cx<T>>::zeros(d, d);
    let half = T::lit(0.5);
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            let c = Cx::new(c_re[idx], c_im[idx]);
            if i == j {
                q[(i, i)] = c;
            } else {
                q[(i, j)] = c * half;
                q[(j, i)] = c * half;
            }
            idx += 1;
        }
    }
    let form = QuadraticForm::new(n, k, q)?;
    let sup = |pts: &[KVector<T>], vals: Option<&[Cx<T>]>| -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            let v = match vals {
                Some(v) => v[i],
                None => f.eval(p)?,
            };
            worst = worst.max(cabs(v - form.eval(p)?).as_f64());
        }
        Ok(worst)
    };
    let train_residual = sup(&train, Some(&values))?;
    let test_residual = sup(&test, None)?;
    Ok(FitReport {
        n,
        k,
        seed,
        train_count,
        test_count,
        rank: linalg::numerical_rank(&a, T::lit(RANK_REL_TOL)),
        train_residual,
        test_residual,
        form,
    })
}

/// Numerical rank of the quadratic monomials evaluated on `samples` random
/// Plücker points: the dimension of the space of quadratic restrictions.
pub fn quadratic_space_dimension(n: usize, k: usize, samples: usize, seed: u64) -> Result<usize> {
    if k > n {
        return Err(Error::DegreeOverflow { left: k, right: 0, n });
    }
    let needed = monomial_count(n, k);
    if samples < needed {
        return Err(Error::InvalidParameter(format!(
            "insufficient samples: {samples} < {needed} quadratic monomials on Λ^{k} R^{n}"
        )));
    }
    let pts = sample_points::<f64>(n, k, samples, seed)?;
    Ok(linalg::numerical_rank(&design(&pts), RANK_REL_TOL))
}

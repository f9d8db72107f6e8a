//! Seeded randomness: Haar-random frames and reproducible parallel Monte Carlo.
//!
//! Every stochastic routine takes an explicit seed. Parallel work is split
//! into `workers` streams of one ChaCha generator, so a run is reproducible
//! bit-for-bit for a fixed `(seed, workers)` pair.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exterior::Frame;
use crate::linalg;
use crate::scalar::{Cx, Real};

/// Default number of Monte Carlo samples per angle.
pub const DEFAULT_SAMPLES: usize = 200_000;

/// How external angles are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AngleMethod {
    /// Closed forms where available, Monte Carlo otherwise.
    #[default]
    Auto,
    /// Monte Carlo for every cone, including those with closed forms.
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub method: AngleMethod,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: 0, workers: 1, method: AngleMethod::Auto }
    }
}

impl MonteCarloConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn force_monte_carlo(mut self) -> Self {
        self.method = AngleMethod::MonteCarlo;
        self
    }

    /// Same configuration with a seed derived from `index`.
    pub fn child(&self, index: u64) -> Self {
        Self { seed: derive_seed(self.seed, index), ..*self }
    }
}

/// SplitMix64 mixing of `(seed, index)` into an independent seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vector<T: Real, R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<T> {
    DVector::from_fn(n, |_, _| {
        let x: f64 = StandardNormal.sample(rng);
        T::lit(x)
    })
}

/// Uniform point on the unit sphere of `R^n`.
pub fn unit_vector<T: Real, R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<T> {
    loop {
        let g = gaussian_vector::<T, R>(rng, n);
        let norm = g.norm();
        if norm > T::lit(1e-300_f64.max(f64::MIN_POSITIVE)) {
            return g / norm;
        }
    }
}

/// Haar-distributed orthonormal basis of `R^n` (Gram-Schmidt of a Gaussian
/// matrix).
pub fn random_onb<T: Real>(n: usize, seed: u64) -> Frame<T> {
    let mut rng = stream_rng(seed, 0);
    random_onb_with(&mut rng, n)
}

pub fn random_onb_with<T: Real, R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Frame<T> {
    loop {
        let cols: Vec<DVector<T>> = (0..n).map(|_| gaussian_vector::<T, R>(rng, n)).collect();
        let basis = linalg::orthonormalize(&cols, T::lit(1e-6));
        if basis.len() == n {
            return Frame::new(n, basis).expect("vectors have length n");
        }
    }
}

/// First `k` vectors of a Haar-random basis: a uniformly random k-plane.
pub fn random_frame<T: Real, R: rand::Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Frame<T> {
    let full = random_onb_with::<T, R>(rng, n);
    Frame::new(n, full.into_vectors().into_iter().take(k).collect()).expect("same ambient dimension")
}

fn split(samples: usize, workers: usize) -> Vec<usize> {
    let workers = workers.max(1);
    (0..workers).map(|w| samples / workers + usize::from(w < samples % workers)).collect()
}

/// Estimate `P[u ∈ C]` for `u` uniform on the unit sphere of `R^dim`.
///
/// Returns the hit fraction and its binomial standard error.
pub fn sphere_fraction<T, F>(cfg: &MonteCarloConfig, dim: usize, inside: F) -> (T, T)
where
    T: Real,
    F: Fn(&DVector<T>) -> bool + Sync,
{
    let counts = split(cfg.samples, cfg.workers);
    let hits: Vec<usize> = counts
        .par_iter()
        .enumerate()
        .map(|(w, &count)| {
            let mut rng = stream_rng(cfg.seed, w as u64);
            (0..count).filter(|_| inside(&unit_vector::<T, _>(&mut rng, dim))).count()
        })
        .collect();
    let total: usize = hits.iter().sum();
    let n = T::count(cfg.samples.max(1));
    let p = T::count(total) / n;
    let se = (p * (T::one() - p) / n).sqrt();
    (p, se)
}

/// Mean of `f(u)` for `u` uniform on the unit sphere of `R^dim`, with the
/// standard error of the mean (computed from the modulus of deviations).
pub fn sphere_mean<T, F>(cfg: &MonteCarloConfig, dim: usize, f: F) -> (Cx<T>, T)
where
    T: Real,
    F: Fn(&DVector<T>) -> Cx<T> + Sync,
{
    let counts = split(cfg.samples, cfg.workers);
    let partial: Vec<(Cx<T>, T)> = counts
        .par_iter()
        .enumerate()
        .map(|(w, &count)| {
            let mut rng = stream_rng(cfg.seed, w as u64);
            let mut sum = Cx::<T>::zero();
            let mut sum_sq = T::zero();
            for _ in 0..count {
                let v = f(&unit_vector::<T, _>(&mut rng, dim));
                sum += v;
                sum_sq += v.norm_sqr();
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) =
        partial.iter().fold((Cx::<T>::zero(), T::zero()), |(a, b), (c, d)| (a + c, b + *d));
    let n = T::count(cfg.samples.max(1));
    let mean = sum / n;
    let var = (sum_sq / n - mean.norm_sqr()).max(T::zero());
    (mean, (var / n).sqrt())
}

/// Random orthogonal `n x n` matrix as a dense matrix.
pub fn random_orthogonal<T: Real>(n: usize, seed: u64) -> DMatrix<T> {
    random_onb::<T>(n, seed).matrix()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn onb_is_reproducible_and_orthonormal() {
        let a = random_onb::<f64>(5, 42);
        let b = random_onb::<f64>(5, 42);
        assert_eq!(a, b);
        let m = a.matrix();
        let g = m.transpose() * &m;
        assert!((g - DMatrix::<f64>::identity(5, 5)).norm() < 1e-12);
        assert_ne!(random_onb::<f64>(5, 43), a);
    }

    #[test]
    fn onb_is_rotation_invariant_in_mean() {
        // E[<u_1, e_1>^2] = 1/n under Haar measure; variance of the square is
        // 2(n-1)/(n^2(n+2)).
        let n = 4usize;
        let trials = 10_000;
        let mean: f64 =
            (0..trials).map(|s| random_onb::<f64>(n, s as u64).vectors()[0][0].powi(2)).sum::<f64>()
                / trials as f64;
        let nf = n as f64;
        let sd = (2.0 * (nf - 1.0) / (nf * nf * (nf + 2.0)) / trials as f64).sqrt();
        assert!((mean - 1.0 / nf).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn fraction_of_half_space() {
        let cfg = MonteCarloConfig::with_seed(3).samples(40_000).workers(4);
        let (p, se) = sphere_fraction::<f64, _>(&cfg, 3, |u| u[0] <= 0.0);
        assert!((p - 0.5).abs() < 4.0 * se);
        let again = sphere_fraction::<f64, _>(&cfg, 3, |u| u[0] <= 0.0);
        assert_eq!((p, se), again);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}

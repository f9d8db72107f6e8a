//! Richardson extrapolation to `h -> 0`.

use serde::Serialize;

use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct Extrapolation<T: Real> {
    pub estimate: T,
    /// `|T[m][m] - T[m][m-1]|`, the change made by the last elimination step.
    pub spread: T,
    /// Diagonal of the tableau, coarse to fine.
    pub diagonal: Vec<T>,
}

/// Richardson tableau for samples `values[j] = A(h_0 / 2^j)` assuming an
/// error expansion `A(h) = A + c_1 h + c_2 h^2 + ...`.
///
/// Columns eliminate successive integer powers of `h`.
pub fn richardson<T: Real>(values: &[T]) -> Extrapolation<T> {
    assert!(!values.is_empty(), "richardson needs at least one sample");
    let two = T::lit(2.0);
    let mut prev: Vec<T> = values.to_vec();
    let mut diagonal = vec![values[0]];
    let mut last_two = (values[0], values[0]);
    if values.len() == 1 {
        return Extrapolation { estimate: values[0], spread: T::zero(), diagonal };
    }
    let mut p = 1;
    while prev.len() > 1 {
        let factor = two.powi(p) - T::one();
        let next: Vec<T> = prev.windows(2).map(|w| w[1] + (w[1] - w[0]) / factor).collect();
        last_two = (*prev.last().expect("nonempty"), *next.last().expect("nonempty"));
        diagonal.push(next[0]);
        prev = next;
        p += 1;
    }
    Extrapolation { estimate: last_two.1, spread: (last_two.1 - last_two.0).abs(), diagonal }
}

/// Geometric grid `h_max, h_max/2, ...` down to (at least) `h_min`.
pub fn halving_grid(h_max: f64, h_min: f64) -> Vec<f64> {
    let mut out = vec![h_max];
    while *out.last().expect("nonempty") / 2.0 >= h_min * (1.0 - 1e-12) {
        let h = out.last().expect("nonempty") / 2.0;
        out.push(h);
    }
    out
}

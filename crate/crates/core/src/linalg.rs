//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// Orthonormalizes `vectors` with two passes of modified Gram-Schmidt.
///
/// Vectors whose residual falls below `rel_tol` times the largest input norm
/// are dropped, so the output length is the numerical rank.
pub fn orthonormalize<T: Real>(vectors: &[DVector<T>], rel_tol: T) -> Vec<DVector<T>> {
    let scale = vectors.iter().map(|v| v.norm()).fold(T::zero(), |a, b| a.max(b));
    let mut basis: Vec<DVector<T>> = Vec::new();
    if scale == T::zero() {
        return basis;
    }
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, T::one());
            }
        }
        let norm = w.norm();
        if norm > rel_tol * scale {
            basis.push(w / norm);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(frame)` in `R^n`.
///
/// `frame` must already be orthonormal.
pub fn orthogonal_complement<T: Real>(frame: &[DVector<T>], n: usize) -> Vec<DVector<T>> {
    let mut all: Vec<DVector<T>> = frame.to_vec();
    let mut extra: Vec<DVector<T>> = Vec::with_capacity(n.saturating_sub(frame.len()));
    // Seed with the coordinate axes least aligned with the frame first.
    let mut axes: Vec<(T, usize)> = (0..n)
        .map(|i| {
            let w: T = frame.iter().map(|f| f[i] * f[i]).fold(T::zero(), |a, b| a + b);
            (w, i)
        })
        .collect();
    axes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    for (_, i) in axes {
        if all.len() == n {
            break;
        }
        let mut w = DVector::<T>::zeros(n);
        w[i] = T::one();
        for _ in 0..2 {
            for b in &all {
                let c = b.dot(&w);
                w.axpy(-c, b, T::one());
            }
        }
        let norm = w.norm();
        if norm > T::lit(1e-6) {
            let w = w / norm;
            all.push(w.clone());
            extra.push(w);
        }
    }
    extra
}

/// Unit normal to the span of `n - 1` vectors in `R^n`, or `None` when they
/// are (numerically) dependent.
pub fn normal_vector<T: Real>(vectors: &[DVector<T>], n: usize, rel_tol: T) -> Option<DVector<T>> {
    let span = orthonormalize(vectors, rel_tol);
    if span.len() + 1 != n {
        return None;
    }
    orthogonal_complement(&span, n).pop()
}

/// Stacks vectors as the columns of an `n x k` matrix.
pub fn columns<T: Real>(vectors: &[DVector<T>], n: usize) -> DMatrix<T> {
    DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i])
}

/// `det(<v_i, v_j>)`.
pub fn gram_determinant<T: Real>(vectors: &[DVector<T>]) -> T {
    let k = vectors.len();
    if k == 0 {
        return T::one();
    }
    let gram = DMatrix::from_fn(k, k, |i, j| vectors[i].dot(&vectors[j]));
    gram.determinant()
}

/// Singular values in descending order, padding short matrices with zero rows
/// so that one value per column is always returned.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    let padded = pad_rows(m);
    let mut sv: Vec<T> = padded.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank<T: Real>(m: &DMatrix<T>, rel_tol: T) -> usize {
    let sv = singular_values(m);
    let Some(&max) = sv.first() else { return 0 };
    if max == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Right singular vectors of `m` paired with their singular values, sorted by
/// increasing singular value. Always returns one pair per column.
pub fn right_singular_pairs<T: Real>(m: &DMatrix<T>) -> Vec<(T, DVector<T>)> {
    let padded = pad_rows(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut pairs: Vec<(T, DVector<T>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, v_t.row(i).transpose()))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    pairs
}

fn pad_rows<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut padded = DMatrix::<T>::zeros(m.ncols(), m.ncols());
    padded.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    padded
}

/// Minimum-norm least-squares solution of `a x = b` with singular values below
/// `rel_tol * sigma_max` treated as zero.
pub fn least_squares<T: Real>(a: &DMatrix<T>, b: &DVector<T>, rel_tol: T) -> DVector<T> {
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().copied().fold(T::zero(), |x, y| x.max(y));
    let eps = rel_tol * max;
    svd.solve(b, eps).expect("both singular vector sets computed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn orthonormalize_drops_dependent_vectors() {
        let v = vec![
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
            DVector::from_vec(vec![2.0, 2.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
        ];
        let b = orthonormalize(&v, 1e-9);
        assert_eq!(b.len(), 2);
        assert_relative_eq!(b[0].dot(&b[1]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn complement_spans_the_rest() {
        let f = vec![DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])];
        let c = orthogonal_complement(&f, 4);
        assert_eq!(c.len(), 3);
        for v in &c {
            assert_relative_eq!(v.dot(&f[0]), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn normal_of_plane() {
        let v: Vec<DVector<f64>> = vec![
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
        ];
        let nv = normal_vector(&v, 3, 1e-9).unwrap();
        assert_relative_eq!(nv[2].abs(), 1.0, epsilon = 1e-15);
        let dep = vec![v[0].clone(), v[0].clone() * 3.0];
        assert!(normal_vector(&dep, 3, 1e-9).is_none());
    }

    #[test]
    fn rank_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
        assert_eq!(numerical_rank(&m, 1e-8), 1);
        assert_eq!(right_singular_pairs(&m).len(), 3);
    }
}

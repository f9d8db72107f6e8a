//! Exterior algebra of `R^n` with complex coefficients.
//!
//! A [`KVector`] stores one coefficient per basis element `e_I`, where `I`
//! runs over strictly increasing index tuples in lexicographic order. The
//! basis `e_I` is declared orthonormal, which fixes the inner product and the
//! Hodge star. Indices are 0-based internally and printed 1-based.
//!
//! Orientation signs all come from [`merge_sign`]: the sign of `e_I ^ e_J` is
//! the parity of the number of inversions needed to sort the concatenation
//! `(I, J)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cabs, cx, Cx, Real};

/// Tolerance on pairwise inner products for a frame to count as orthonormal.
pub const TAU_ONB: f64 = 1e-9;

/// Relative singular-value threshold used when factoring simple k-vectors.
pub const KERNEL_REL_TOL: f64 = 1e-8;

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Strictly increasing index tuple labelling a basis element of `Λ^k R^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Builds a multi-index from 0-based indices.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        if !increasing || indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidMultiIndex { indices, n });
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Position of this index in the lexicographic basis of `Λ^k R^n`.
    pub fn rank(&self, n: usize) -> usize {
        rank_of(&self.0, n)
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn unrank(mut r: usize, n: usize, k: usize) -> Self {
        let mut out = Vec::with_capacity(k);
        let mut next = 0;
        for pos in 0..k {
            let mut j = next;
            loop {
                let block = binomial(n - 1 - j, k - 1 - pos);
                if r < block {
                    break;
                }
                r -= block;
                j += 1;
            }
            out.push(j);
            next = j + 1;
        }
        Self(out)
    }

    /// All multi-indices of degree `k` in lexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<Self> {
        combinations(n, k).into_iter().map(Self).collect()
    }

    /// Complementary index set in `{0, .., n-1}`.
    pub fn complement(&self, n: usize) -> Self {
        Self((0..n).filter(|i| !self.0.contains(i)).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e")?;
        for i in &self.0 {
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

fn rank_of(indices: &[usize], n: usize) -> usize {
    let k = indices.len();
    let mut r = 0;
    let mut lo = 0;
    for (pos, &c) in indices.iter().enumerate() {
        for j in lo..c {
            r += binomial(n - 1 - j, k - 1 - pos);
        }
        lo = c + 1;
    }
    r
}

/// All strictly increasing `k`-tuples from `0..n`, lexicographically.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost slot that can still move right
        let mut i = k;
        while i > 0 && cur[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Sign of `e_I ^ e_J` relative to `e_{I ∪ J}`, or `None` when `I ∩ J ≠ ∅`.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(i8, Vec<usize>)> {
    let mut inversions = 0usize;
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            merged.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            // b[j] jumps over the remaining elements of a
            inversions += a.len() - i;
            merged.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, merged))
}

/// Element of `Λ^k R^n ⊗ C`, dense in the lexicographic basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KVector<T: Real> {
    n: usize,
    k: usize,
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> KVector<T> {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::DegreeOverflow { left: k, right: 0, n });
        }
        Ok(Self { n, k, coeffs: vec![Cx::zero(); binomial(n, k)] })
    }

    /// Builds a k-vector from its dense coefficient array.
    pub fn from_coeffs(n: usize, k: usize, coeffs: Vec<Cx<T>>) -> Result<Self> {
        if k > n {
            return Err(Error::DegreeOverflow { left: k, right: 0, n });
        }
        if coeffs.len() != binomial(n, k) {
            return Err(Error::DimensionMismatch { expected: binomial(n, k), found: coeffs.len() });
        }
        Ok(Self { n, k, coeffs })
    }

    pub fn from_real(n: usize, k: usize, coeffs: &[T]) -> Result<Self> {
        Self::from_coeffs(n, k, coeffs.iter().map(|&c| cx(c)).collect())
    }

    /// The basis element `e_I`.
    pub fn basis(n: usize, index: &MultiIndex) -> Self {
        let mut v = Self { n, k: index.degree(), coeffs: vec![Cx::zero(); binomial(n, index.degree())] };
        v.coeffs[index.rank(n)] = cx(T::one());
        v
    }

    /// The 1-vector with the given coordinates.
    pub fn from_vector(v: &DVector<T>) -> Self {
        Self { n: v.len(), k: 1, coeffs: v.iter().map(|&c| cx(c)).collect() }
    }

    /// The 0-vector `c`.
    pub fn scalar(n: usize, c: Cx<T>) -> Self {
        Self { n, k: 0, coeffs: vec![c] }
    }

    /// `e_1 ^ ... ^ e_n`, the standard orientation.
    pub fn standard_orientation(n: usize) -> Self {
        Self { n, k: n, coeffs: vec![cx(T::one())] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, index: &MultiIndex) -> Cx<T> {
        self.coeffs[index.rank(self.n)]
    }

    /// `(e_I, coefficient)` pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, Cx<T>)> + '_ {
        MultiIndex::all(self.n, self.k).into_iter().zip(self.coeffs.iter().copied())
    }

    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        Self { n: self.n, k: self.k, coeffs: self.coeffs.iter().map(|&x| x * c).collect() }
    }

    /// Unit vector in the same direction; the zero vector is returned as is.
    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        if norm == T::zero() {
            return self.clone();
        }
        self.scale(cx(T::one() / norm))
    }

    /// Coefficients as reals when every imaginary part is below `tol`.
    pub fn real_coeffs(&self, tol: T) -> Option<Vec<T>> {
        if self.coeffs.iter().any(|c| c.im.abs() > tol) {
            return None;
        }
        Some(self.coeffs.iter().map(|c| c.re).collect())
    }

    /// Bilinear pairing `Σ a_I b_I` (no conjugation).
    pub fn dot(&self, other: &Self) -> Result<Cx<T>> {
        self.check_same_space(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).fold(Cx::zero(), |acc, (a, b)| acc + a * b))
    }

    /// Image under the map induced on `Λ^k` by the linear map `a: R^m -> R^p`
    /// (`a` is `p x m`, `self` lives in `Λ^k R^m`).
    pub fn push_forward(&self, a: &DMatrix<T>) -> Result<Self> {
        if a.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.ncols() });
        }
        let m = exterior_power(a, self.k);
        let out = (0..m.nrows())
            .map(|r| {
                (0..m.ncols()).fold(Cx::zero(), |acc, c| acc + self.coeffs[c] * cx(m[(r, c)]))
            })
            .collect();
        Self::from_coeffs(a.nrows(), self.k, out)
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.k != other.k {
            return Err(Error::DegreeMismatch { expected: self.k, found: other.k });
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for KVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}){}", c, idx)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<T: Real> Add for &KVector<T> {
    type Output = KVector<T>;
    fn add(self, rhs: Self) -> KVector<T> {
        assert!(self.n == rhs.n && self.k == rhs.k, "adding k-vectors from different spaces");
        KVector {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &KVector<T> {
    type Output = KVector<T>;
    fn sub(self, rhs: Self) -> KVector<T> {
        assert!(self.n == rhs.n && self.k == rhs.k, "subtracting k-vectors from different spaces");
        KVector {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Add for KVector<T> {
    type Output = KVector<T>;
    fn add(self, rhs: Self) -> KVector<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for KVector<T> {
    type Output = KVector<T>;
    fn sub(self, rhs: Self) -> KVector<T> {
        &self - &rhs
    }
}

impl<T: Real> Neg for KVector<T> {
    type Output = KVector<T>;
    fn neg(self) -> KVector<T> {
        self.scale(cx(-T::one()))
    }
}

impl<T: Real> Mul<T> for KVector<T> {
    type Output = KVector<T>;
    fn mul(self, rhs: T) -> KVector<T> {
        self.scale(cx(rhs))
    }
}

impl<T: Real> Mul<Cx<T>> for KVector<T> {
    type Output = KVector<T>;
    fn mul(self, rhs: Cx<T>) -> KVector<T> {
        self.scale(rhs)
    }
}

/// Exterior product.
pub fn wedge<T: Real>(a: &KVector<T>, b: &KVector<T>) -> Result<KVector<T>> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    let n = a.n;
    if a.k + b.k > n {
        return Err(Error::DegreeOverflow { left: a.k, right: b.k, n });
    }
    let mut out = KVector::zero(n, a.k + b.k)?;
    let ia = combinations(n, a.k);
    let ib = combinations(n, b.k);
    for (ca, i) in a.coeffs.iter().zip(&ia) {
        if ca.is_zero() {
            continue;
        }
        for (cb, j) in b.coeffs.iter().zip(&ib) {
            if cb.is_zero() {
                continue;
            }
            if let Some((sign, merged)) = merge_sign(i, j) {
                let term = ca * cb;
                let slot = &mut out.coeffs[rank_of(&merged, n)];
                if sign > 0 {
                    *slot += term;
                } else {
                    *slot -= term;
                }
            }
        }
    }
    Ok(out)
}

/// Hermitian inner product `Σ a_I conj(b_I)`; for real simple inputs this is
/// the Gram determinant `det(<v_i, w_j>)`.
pub fn inner<T: Real>(a: &KVector<T>, b: &KVector<T>) -> Result<Cx<T>> {
    a.check_same_space(b)?;
    Ok(a.coeffs.iter().zip(&b.coeffs).fold(Cx::zero(), |acc, (x, y)| acc + x * y.conj()))
}

/// Hodge star with respect to `orientation`, defined on basis elements by
/// `e_I ^ *e_I = orientation`. The map is complex linear.
pub fn hodge<T: Real>(a: &KVector<T>, orientation: &KVector<T>) -> Result<KVector<T>> {
    let n = a.n;
    if orientation.n != n || orientation.k != n {
        return Err(Error::InvalidOrientation);
    }
    let w = orientation.coeffs[0];
    let tol = T::tight_tol();
    if w.im.abs() > tol || (w.re.abs() - T::one()).abs() > tol {
        return Err(Error::InvalidOrientation);
    }
    let w = w.re.signum();
    let mut out = KVector::zero(n, n - a.k)?;
    for (c, idx) in a.coeffs.iter().zip(combinations(n, a.k)) {
        if c.is_zero() {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|i| !idx.contains(i)).collect();
        let (sign, _) = merge_sign(&idx, &comp).expect("complementary index sets are disjoint");
        let s = if sign > 0 { w } else { -w };
        out.coeffs[rank_of(&comp, n)] += c * cx(s);
    }
    Ok(out)
}

/// Hodge star for the standard orientation `e_1 ^ ... ^ e_n`.
pub fn hodge_standard<T: Real>(a: &KVector<T>) -> KVector<T> {
    hodge(a, &KVector::standard_orientation(a.n)).expect("standard orientation is valid")
}

/// `v_1 ^ ... ^ v_k`. With no vectors the result is the scalar 1 in `Λ^0 R^n`.
pub fn simple<T: Real>(n: usize, vectors: &[DVector<T>]) -> Result<KVector<T>> {
    let mut acc = KVector::scalar(n, cx(T::one()));
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        acc = wedge(&acc, &KVector::from_vector(v))?;
    }
    Ok(acc)
}

/// Ordered list of `k` vectors in `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Frame<T: Real> {
    n: usize,
    vectors: Vec<DVector<T>>,
}

impl<T: Real> Frame<T> {
    pub fn new(n: usize, vectors: Vec<DVector<T>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        Ok(Self { n, vectors })
    }

    /// Frame made of the columns of `m`.
    pub fn from_columns(m: &DMatrix<T>) -> Self {
        Self { n: m.nrows(), vectors: m.column_iter().map(|c| c.into_owned()).collect() }
    }

    pub fn standard(n: usize) -> Self {
        Self { n, vectors: (0..n).map(|i| unit(n, i)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[DVector<T>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<DVector<T>> {
        self.vectors
    }

    /// `n x k` matrix with the frame vectors as columns.
    pub fn matrix(&self) -> DMatrix<T> {
        linalg::columns(&self.vectors, self.n)
    }

    /// Largest `|<v_i, v_j> - δ_ij|`.
    pub fn orthonormal_deviation(&self) -> T {
        let mut dev = T::zero();
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { T::one() } else { T::zero() };
                dev = dev.max((a.dot(b) - target).abs());
            }
        }
        dev
    }

    pub fn is_orthonormal(&self, tol: T) -> bool {
        self.orthonormal_deviation() <= tol
    }

    /// Orthogonal projector onto the span (frame must be orthonormal).
    pub fn projector(&self) -> DMatrix<T> {
        let m = self.matrix();
        &m * m.transpose()
    }

    /// Frobenius distance between the projectors onto both spans.
    pub fn subspace_distance(&self, other: &Self) -> T {
        (self.projector() - other.projector()).norm()
    }

    /// The frame with its first vector negated (reverses orientation).
    pub fn flipped(&self) -> Self {
        let mut vectors = self.vectors.clone();
        if let Some(v) = vectors.first_mut() {
            *v = -v.clone();
        }
        Self { n: self.n, vectors }
    }

    /// Orthonormal frame of the orthogonal complement, oriented so that
    /// `self ⊕ complement` is positively oriented in `R^n`.
    pub fn complement(&self) -> Self {
        let extra = linalg::orthogonal_complement(&self.vectors, self.n);
        let mut all = self.vectors.clone();
        all.extend(extra.iter().cloned());
        let det = linalg::columns(&all, self.n).determinant();
        let comp = Self { n: self.n, vectors: extra };
        if det < T::zero() && comp.k() > 0 {
            comp.flipped()
        } else {
            comp
        }
    }
}

pub(crate) fn unit<T: Real>(n: usize, i: usize) -> DVector<T> {
    let mut v = DVector::zeros(n);
    v[i] = T::one();
    v
}

/// Plücker embedding of a positively oriented orthonormal frame.
pub fn pluecker<T: Real>(frame: &Frame<T>) -> Result<KVector<T>> {
    let dev = frame.orthonormal_deviation();
    if dev > T::lit(TAU_ONB) {
        return Err(Error::NotOrthonormal { deviation: dev.as_f64() });
    }
    simple(frame.n, &frame.vectors)
}

/// Result of [`factor_simple`]: an orthonormal frame with `pluecker(frame) ≈ x`.
#[derive(Clone, Debug)]
pub struct Factorization<T: Real> {
    pub frame: Frame<T>,
    /// `+1` when the kernel basis already had the orientation of `x`, `-1`
    /// when it had to be flipped.
    pub sign: i8,
    /// `‖pluecker(frame) - x‖`.
    pub residual: T,
}

/// Recovers an orthonormal frame of the plane represented by a unit simple
/// k-vector, as the kernel of `v ↦ v ^ x`.
pub fn factor_simple<T: Real>(x: &KVector<T>, tol: T) -> Result<Factorization<T>> {
    let (n, k) = (x.n, x.k);
    let norm = x.norm();
    if (norm - T::one()).abs() > tol {
        return Err(Error::NotUnit { norm: norm.as_f64() });
    }
    let re = x.real_coeffs(tol).ok_or_else(|| Error::NotSimple {
        residual: x.coeffs.iter().map(|c| c.im.abs()).fold(T::zero(), |a, b| a.max(b)).as_f64(),
    })?;
    let real = KVector::from_real(n, k, &re)?;

    let kernel: Vec<DVector<T>> = if k == 0 {
        Vec::new()
    } else if k == n {
        (0..n).map(|i| unit(n, i)).collect()
    } else {
        // Column i is e_i ^ x in Λ^{k+1}.
        let rows = binomial(n, k + 1);
        let mut m = DMatrix::<T>::zeros(rows, n);
        for i in 0..n {
            let col = wedge(&KVector::from_vector(&unit(n, i)), &real)?;
            for (r, c) in col.coeffs.iter().enumerate() {
                m[(r, i)] = c.re;
            }
        }
        let pairs = linalg::right_singular_pairs(&m);
        let smax = pairs.last().map(|p| p.0).unwrap_or_else(T::zero);
        let thresh = T::lit(KERNEL_REL_TOL) * smax;
        let kernel: Vec<DVector<T>> =
            pairs.iter().filter(|p| p.0 <= thresh).map(|p| p.1.clone()).collect();
        if kernel.len() != k {
            // the k-th smallest singular value measures the distance from simplicity
            let residual = if smax > T::zero() { pairs[k - 1].0 / smax } else { T::one() };
            return Err(Error::NotSimple { residual: residual.as_f64() });
        }
        linalg::orthonormalize(&kernel, T::tight_tol())
    };

    let mut frame = Frame { n, vectors: kernel };
    let psi = simple(n, &frame.vectors)?;
    let overlap = psi.dot(&real)?.re;
    let mut sign = 1;
    if overlap < T::zero() {
        frame = frame.flipped();
        sign = -1;
    }
    let residual = (&simple(n, &frame.vectors)? - &real).norm();
    if residual > T::lit(1e3) * tol.max(T::tight_tol()) {
        return Err(Error::NotSimple { residual: residual.as_f64() });
    }
    Ok(Factorization { frame, sign, residual })
}

/// Matrix of the map induced by `a: R^m -> R^p` on `Λ^k`, with entries the
/// `k x k` minors `det(a[I, J])`.
pub fn exterior_power<T: Real>(a: &DMatrix<T>, k: usize) -> DMatrix<T> {
    let rows = combinations(a.nrows(), k);
    let cols = combinations(a.ncols(), k);
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        if k == 0 {
            return T::one();
        }
        DMatrix::from_fn(k, k, |i, j| a[(rows[r][i], cols[c][j])]).determinant()
    })
}

/// `|<a, b>|` helper used by tolerance checks.
pub fn abs_inner<T: Real>(a: &KVector<T>, b: &KVector<T>) -> Result<T> {
    inner(a, b).map(cabs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type KV = KVector<f64>;

    fn e(n: usize, idx: &[usize]) -> KV {
        KV::basis(n, &MultiIndex::new(idx.iter().map(|i| i - 1).collect(), n).unwrap())
    }

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_vec(c.to_vec())
    }

    #[test]
    fn ranks_round_trip() {
        for n in 1..=7 {
            for k in 0..=n {
                for (r, idx) in MultiIndex::all(n, k).iter().enumerate() {
                    assert_eq!(idx.rank(n), r);
                    assert_eq!(&MultiIndex::unrank(r, n, k), idx);
                }
                assert_eq!(MultiIndex::all(n, k).len(), binomial(n, k));
            }
        }
    }

    #[test]
    fn multi_index_rejects_bad_input() {
        assert!(MultiIndex::new(vec![1, 0], 3).is_err());
        assert!(MultiIndex::new(vec![0, 3], 3).is_err());
        assert_eq!(MultiIndex::new(vec![0, 2], 3).unwrap().to_string(), "e13");
    }

    #[test]
    fn wedge_basis_cases() {
        let e1 = e(3, &[1]);
        let e2 = e(3, &[2]);
        let e3 = e(3, &[3]);
        assert_eq!(wedge(&e1, &e2).unwrap(), e(3, &[1, 2]));
        assert_eq!(wedge(&e1, &e1).unwrap().norm(), 0.0);
        let s = wedge(&(&e1 + &e2), &e3).unwrap();
        assert_eq!(s, &e(3, &[1, 3]) + &e(3, &[2, 3]));
        assert_eq!(wedge(&e2, &e1).unwrap(), -e(3, &[1, 2]));
    }

    #[test]
    fn wedge_errors() {
        let a = e(3, &[1, 2]);
        let b = e(4, &[1]);
        assert!(matches!(wedge(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(wedge(&a, &e(3, &[1, 3])), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn inner_examples() {
        let r = 0.5f64.sqrt();
        let a = simple(3, &[v(&[1., 0., 0.]), v(&[0., 1., 0.])]).unwrap();
        let b = simple(3, &[v(&[1., 0., 0.]), v(&[0., r, r])]).unwrap();
        assert_relative_eq!(inner(&a, &a).unwrap().re, 1.0);
        assert_relative_eq!(inner(&a, &b).unwrap().re, r, epsilon = 1e-15);
        assert_eq!(inner(&e(3, &[1, 2]), &e(3, &[1, 3])).unwrap().re, 0.0);
        assert!(inner(&e(3, &[1, 2]), &e(3, &[1])).is_err());
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(hodge_standard(&e(3, &[1, 2])), e(3, &[3]));
        assert_eq!(hodge_standard(&hodge_standard(&e(3, &[1]))), e(3, &[1]));
        assert_eq!(hodge_standard(&e(4, &[1, 2])), e(4, &[3, 4]));
        assert_eq!(hodge_standard(&e(3, &[1, 3])), -e(3, &[2]));
        let bad = KV::from_real(3, 3, &[2.0]).unwrap();
        assert!(hodge(&e(3, &[1]), &bad).is_err());
        let neg = KV::from_real(3, 3, &[-1.0]).unwrap();
        assert_eq!(hodge(&e(3, &[1, 2]), &neg).unwrap(), -e(3, &[3]));
    }

    #[test]
    fn hodge_defining_identity_on_basis() {
        for n in 1..=6 {
            let omega = KV::standard_orientation(n);
            for k in 0..=n {
                for i in MultiIndex::all(n, k) {
                    for j in MultiIndex::all(n, k) {
                        let lhs = wedge(&KV::basis(n, &j), &hodge_standard(&KV::basis(n, &i))).unwrap();
                        let expected = if i == j { omega.clone() } else { KV::zero(n, n).unwrap() };
                        assert_eq!(lhs, expected);
                    }
                }
            }
        }
    }

    #[test]
    fn simple_examples() {
        let s = simple(2, &[v(&[1., 0.]), v(&[0., 1.])]).unwrap();
        assert_eq!(s.norm(), 1.0);
        assert_eq!(simple(2, &[v(&[1., 0.]), v(&[1., 0.])]).unwrap().norm(), 0.0);
        let s = simple(2, &[v(&[2., 0.]), v(&[0., 3.])]).unwrap();
        assert_eq!(s, e(2, &[1, 2]) * 6.0);
        assert_eq!(simple::<f64>(3, &[]).unwrap().k(), 0);
    }

    #[test]
    fn pluecker_examples() {
        let r = 0.5f64.sqrt();
        let f = |a: &[f64], b: &[f64]| Frame::new(2, vec![v(a), v(b)]).unwrap();
        assert_eq!(pluecker(&f(&[1., 0.], &[0., 1.])).unwrap(), e(2, &[1, 2]));
        assert_eq!(pluecker(&f(&[0., 1.], &[1., 0.])).unwrap(), -e(2, &[1, 2]));
        let p = pluecker(&f(&[r, r], &[r, -r])).unwrap();
        assert_relative_eq!(p.coeffs()[0].re, -1.0, epsilon = 1e-15);
        assert!(matches!(pluecker(&f(&[1., 0.], &[1., 1.])), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn factor_examples() {
        let x = e(4, &[1, 2]);
        let fac = factor_simple(&x, 1e-9).unwrap();
        assert!(fac.frame.subspace_distance(&Frame::new(4, vec![v(&[1., 0., 0., 0.]), v(&[0., 1., 0., 0.])]).unwrap()) < 1e-12);
        assert!(fac.residual < 1e-12);

        let r: f64 = 0.5f64.sqrt();
        let bad = e(4, &[1, 2]) * r + e(4, &[3, 4]) * r;
        assert!(matches!(factor_simple(&bad, 1e-9), Err(Error::NotSimple { .. })));

        let top = -KV::standard_orientation(3);
        let fac = factor_simple(&top, 1e-9).unwrap();
        assert_eq!(fac.sign, -1);
        assert!(fac.residual < 1e-12);
    }

    #[test]
    fn factor_rejects_non_unit() {
        let x = e(3, &[1, 2]) * 2.0;
        assert!(matches!(factor_simple(&x, 1e-9), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn complement_orientation() {
        let f = Frame::new(3, vec![v(&[1., 0., 0.]), v(&[0., 1., 0.])]).unwrap();
        let c = f.complement();
        assert_relative_eq!(c.vectors()[0][2], 1.0, epsilon = 1e-15);
        let c = f.flipped().complement();
        assert_relative_eq!(c.vectors()[0][2], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn push_forward_of_simple_is_simple_of_images() {
        let a = DMatrix::from_row_slice(3, 2, &[1., 2., 0., 1., 3., -1.]);
        let x = simple(2, &[v(&[1., 0.]), v(&[0.5, 1.])]).unwrap();
        let y = x.push_forward(&a).unwrap();
        let direct = simple(3, &[&a * v(&[1., 0.]), &a * v(&[0.5, 1.])]).unwrap();
        assert!((&y - &direct).norm() < 1e-14);
    }

    #[test]
    fn f32_basics() {
        let a = KVector::<f32>::basis(3, &MultiIndex::new(vec![0], 3).unwrap());
        let b = KVector::<f32>::basis(3, &MultiIndex::new(vec![1], 3).unwrap());
        let w = wedge(&a, &b).unwrap();
        assert_eq!(hodge_standard(&w).coeffs()[2].re, 1.0f32);
    }
}

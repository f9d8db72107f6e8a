//! Klain functions: even functions on unit simple k-vectors.
//!
//! Every variant implements [`KlainFunction`], which takes a unit simple
//! k-vector and returns a complex number. Functions are shared as
//! [`DynKlain`] so they can be composed (Hodge pullbacks, restrictions,
//! products) and handed to worker threads.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exterior::{binomial, factor_simple, hodge_standard, pluecker, Frame, KVector, MultiIndex};
use crate::random::{gaussian_vector, random_frame};
use crate::scalar::{cabs, cx, Cx, Real};

pub trait KlainFunction<T: Real>: Send + Sync {
    /// Ambient dimension.
    fn n(&self) -> usize;
    /// Degree of the k-vectors accepted.
    fn k(&self) -> usize;
    /// Short description, e.g. `hw:2,0`.
    fn tag(&self) -> String;
    /// Value on a unit simple k-vector.
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>>;

    /// Value on the oriented plane spanned by an orthonormal frame.
    fn eval_frame(&self, frame: &Frame<T>) -> Result<Cx<T>> {
        self.eval(&pluecker(frame)?)
    }

    /// Value on the span of a nonzero simple k-vector of any length.
    fn eval_span(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        self.eval(&xi.normalized())
    }
}

pub type DynKlain<T> = Arc<dyn KlainFunction<T>>;

impl<T: Real> fmt::Debug for dyn KlainFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KlainFunction({}, n={}, k={})", self.tag(), self.n(), self.k())
    }
}

fn check_shape<T: Real>(xi: &KVector<T>, n: usize, k: usize) -> Result<()> {
    if xi.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: xi.n() });
    }
    if xi.k() != k {
        return Err(Error::DegreeMismatch { expected: k, found: xi.k() });
    }
    Ok(())
}

fn check_unit<T: Real>(xi: &KVector<T>) -> Result<()> {
    let norm = xi.norm();
    if (norm - T::one()).abs() > T::unit_tol() {
        return Err(Error::NotUnit { norm: norm.as_f64() });
    }
    Ok(())
}

fn fmt_cx<T: Real>(c: Cx<T>) -> String {
    if c.im == T::zero() {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

/// `f ≡ c`.
#[derive(Clone, Debug)]
pub struct Constant<T: Real> {
    pub n: usize,
    pub k: usize,
    pub value: Cx<T>,
}

impl<T: Real> Constant<T> {
    pub fn new(n: usize, k: usize, value: Cx<T>) -> Self {
        Self { n, k, value }
    }

    pub fn one(n: usize, k: usize) -> Self {
        Self::new(n, k, Cx::one())
    }
}

impl<T: Real> KlainFunction<T> for Constant<T> {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn tag(&self) -> String {
        format!("const:{}", fmt_cx(self.value))
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        check_shape(xi, self.n, self.k)?;
        Ok(self.value)
    }
}

/// Symmetric complex bilinear form on `Λ^k R^n`, evaluated as `ξᵀ Q ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm<T: Real> {
    n: usize,
    k: usize,
    matrix: DMatrix<Cx<T>>,
}

impl<T: Real> QuadraticForm<T> {
    /// Symmetrizes `matrix` as `(Q + Qᵀ)/2`.
    pub fn new(n: usize, k: usize, matrix: DMatrix<Cx<T>>) -> Result<Self> {
        Self::symmetrized(n, k, matrix).map(|(q, _)| q)
    }

    /// Like [`QuadraticForm::new`], also returning `max |Q - Qᵀ|` of the input.
    pub fn symmetrized(n: usize, k: usize, matrix: DMatrix<Cx<T>>) -> Result<(Self, T)> {
        if k > n {
            return Err(Error::DegreeOverflow { left: k, right: 0, n });
        }
        let dim = binomial(n, k);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "quadratic form on Λ^{k} R^{n} needs a {dim}x{dim} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let t = matrix.transpose();
        let asym = matrix.iter().zip(t.iter()).map(|(a, b)| cabs(a - b)).fold(T::zero(), |a, b| a.max(b));
        let half = cx(T::lit(0.5));
        let sym = (matrix + t).map(|z| z * half);
        Ok((Self { n, k, matrix: sym }, asym))
    }

    pub fn identity(n: usize, k: usize) -> Self {
        let dim = binomial(n, k);
        Self { n, k, matrix: DMatrix::identity(dim, dim) }
    }

    /// `ξ_I^2` for one Plücker coordinate `I`.
    pub fn coordinate_square(n: usize, index: &MultiIndex) -> Self {
        let k = index.degree();
        let dim = binomial(n, k);
        let mut matrix = DMatrix::zeros(dim, dim);
        let r = index.rank(n);
        matrix[(r, r)] = Cx::one();
        Self { n, k, matrix }
    }

    /// Symmetric form with independent standard Gaussian entries (real and,
    /// if `complex`, imaginary parts).
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R, complex: bool) -> Self {
        let dim = binomial(n, k);
        let re = gaussian_vector::<T, R>(rng, dim * dim);
        let im = if complex { gaussian_vector::<T, R>(rng, dim * dim) } else { DVector::zeros(dim * dim) };
        let m = DMatrix::from_fn(dim, dim, |i, j| Cx::new(re[i * dim + j], im[i * dim + j]));
        Self::new(n, k, m).expect("dimensions match by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &DMatrix<Cx<T>> {
        &self.matrix
    }

    /// `aᵀ Q b` for arbitrary (not necessarily unit or simple) k-vectors.
    pub fn polarize(&self, a: &KVector<T>, b: &KVector<T>) -> Result<Cx<T>> {
        check_shape(a, self.n, self.k)?;
        check_shape(b, self.n, self.k)?;
        let (a, b) = (a.coeffs(), b.coeffs());
        let mut acc = Cx::zero();
        for i in 0..a.len() {
            if a[i].is_zero() {
                continue;
            }
            let row = (0..b.len()).fold(Cx::zero(), |s, j| s + self.matrix[(i, j)] * b[j]);
            acc += a[i] * row;
        }
        Ok(acc)
    }

    /// Pointwise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.n, self.k) != (other.n, other.k) {
            return Err(Error::DegreeMismatch { expected: self.k, found: other.k });
        }
        Ok(Self { n: self.n, k: self.k, matrix: &self.matrix + &other.matrix })
    }

    /// Parses a dense JSON matrix whose entries are numbers or `[re, im]`
    /// pairs. Asymmetric input is symmetrized with a warning.
    pub fn from_json(text: &str, n: usize, k: usize) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        let rows = match &value {
            Value::Array(rows) => rows,
            Value::Object(map) => match map.get("matrix") {
                Some(Value::Array(rows)) => rows,
                _ => return Err(Error::Parse("expected a field 'matrix' holding an array of rows".into())),
            },
            _ => return Err(Error::Parse("expected an array of rows".into())),
        };
        let dim = binomial(n, k);
        if rows.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "matrix has {} rows, but Λ^{k} R^{n} has dimension C({n},{k}) = {dim}",
                rows.len()
            )));
        }
        let mut m = DMatrix::<Cx<T>>::zeros(dim, dim);
        for (i, row) in rows.iter().enumerate() {
            let Value::Array(row) = row else {
                return Err(Error::Parse(format!("row {i} is not an array")));
            };
            if row.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {} entries, expected C({n},{k}) = {dim}",
                    row.len()
                )));
            }
            for (j, entry) in row.iter().enumerate() {
                m[(i, j)] = parse_entry(entry).ok_or_else(|| {
                    Error::Parse(format!("entry [{i}][{j}] must be a number or a [re, im] pair"))
                })?;
            }
        }
        let (q, asym) = Self::symmetrized(n, k, m)?;
        if asym > T::lit(1e-12) {
            warn!("quadratic form matrix is not symmetric (max |Q - Qᵀ| = {:e}); using (Q + Qᵀ)/2", asym.as_f64());
        }
        Ok(q)
    }

    pub fn from_file(path: &Path, n: usize, k: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text, n, k)
    }
}

fn parse_entry<T: Real>(v: &Value) -> Option<Cx<T>> {
    match v {
        Value::Number(x) => Some(cx(T::lit(x.as_f64()?))),
        Value::Array(p) if p.len() == 2 => Some(Cx::new(T::lit(p[0].as_f64()?), T::lit(p[1].as_f64()?))),
        _ => None,
    }
}

impl<T: Real> KlainFunction<T> for QuadraticForm<T> {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn tag(&self) -> String {
        format!("quad(n={}, k={})", self.n, self.k)
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        check_shape(xi, self.n, self.k)?;
        check_unit(xi)?;
        self.polarize(xi, xi)
    }
}

/// Highest-weight vector `f_{m1,m2}` on `Gr_2(R^n)`.
///
/// With `(X¹, X²)` an orthonormal frame of the plane, `A(l)` is the `l x 2`
/// matrix whose `j`-th row is `X_{2j-1} + i X_{2j}`, and
/// `f = det(A(1)A(1)ᵗ)^{m1-|m2|} · det(A(2)A(2)ᵗ)^{|m2|}`, the second factor
/// conjugated when `m2 < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HighestWeight {
    pub n: usize,
    pub m1: u32,
    pub m2: i32,
}

impl HighestWeight {
    pub fn new(n: usize, m1: u32, m2: i32) -> Result<Self> {
        if m2.unsigned_abs() > m1 {
            return Err(Error::InvalidParameter(format!("highest weight needs m1 >= |m2|, got ({m1}, {m2})")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter("highest-weight vectors on Gr_2 need n >= 2".into()));
        }
        if m2 != 0 && n < 4 {
            return Err(Error::InvalidParameter(format!("m2 != 0 needs n >= 4, got n = {n}")));
        }
        Ok(Self { n, m1, m2 })
    }

    /// `det(A(l)A(l)ᵗ)` for `l = 1, 2` from an orthonormal frame.
    pub fn determinants<T: Real>(&self, x1: &DVector<T>, x2: &DVector<T>) -> (Cx<T>, Cx<T>) {
        let coord = |x: &DVector<T>, r: usize| if r < x.len() { x[r] } else { T::zero() };
        let row = |j: usize| -> (Cx<T>, Cx<T>) {
            (
                Cx::new(coord(x1, 2 * j), coord(x1, 2 * j + 1)),
                Cx::new(coord(x2, 2 * j), coord(x2, 2 * j + 1)),
            )
        };
        let (a, b) = row(0);
        let (c, d) = row(1);
        let d1 = a * a + b * b;
        // A(2)A(2)ᵗ = [[a²+b², ac+bd], [ac+bd, c²+d²]]
        let off = a * c + b * d;
        let d2 = d1 * (c * c + d * d) - off * off;
        (d1, d2)
    }
}

impl<T: Real> KlainFunction<T> for HighestWeight {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        2
    }
    fn tag(&self) -> String {
        format!("hw:{},{}", self.m1, self.m2)
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        check_shape(xi, self.n, 2)?;
        if self.m1 == 0 {
            return Ok(Cx::one());
        }
        let frame = factor_simple(xi, T::unit_tol())?.frame;
        let (d1, d2) = self.determinants(&frame.vectors()[0], &frame.vectors()[1]);
        let a = self.m2.unsigned_abs();
        let d2 = if self.m2 < 0 { d2.conj() } else { d2 };
        Ok(d1.powu(self.m1 - a) * d2.powu(a))
    }
}

/// `f(v) = (v_1 - i v_2)^{2p}` on lines of `R^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphericalHw {
    pub p: u32,
}

impl<T: Real> KlainFunction<T> for SphericalHw {
    fn n(&self) -> usize {
        3
    }
    fn k(&self) -> usize {
        1
    }
    fn tag(&self) -> String {
        format!("sph:{}", self.p)
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        check_shape(xi, 3, 1)?;
        check_unit(xi)?;
        let c = xi.coeffs();
        let z = c[0] - c[1] * Cx::i();
        Ok(z.powu(2 * self.p))
    }
}

/// `ξ ↦ g(*ξ)` for a function `g` on `Gr_{n-k}`.
#[derive(Clone)]
pub struct HodgePullback<T: Real> {
    pub inner: DynKlain<T>,
}

impl<T: Real> HodgePullback<T> {
    pub fn new(inner: DynKlain<T>) -> Self {
        Self { inner }
    }
}

impl<T: Real> KlainFunction<T> for HodgePullback<T> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn k(&self) -> usize {
        self.inner.n() - self.inner.k()
    }
    fn tag(&self) -> String {
        format!("star:{}", self.inner.tag())
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        check_shape(xi, self.n(), self.k())?;
        self.inner.eval(&hodge_standard(xi))
    }
}

/// Pointwise product `a · b`.
#[derive(Clone)]
pub struct Product<T: Real> {
    pub a: DynKlain<T>,
    pub b: DynKlain<T>,
}

impl<T: Real> KlainFunction<T> for Product<T> {
    fn n(&self) -> usize {
        self.a.n()
    }
    fn k(&self) -> usize {
        self.a.k()
    }
    fn tag(&self) -> String {
        format!("({})*({})", self.a.tag(), self.b.tag())
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        Ok(self.a.eval(xi)? * self.b.eval(xi)?)
    }
}

/// `ξ_I^{power}` for an even power, a Plücker coordinate monomial.
#[derive(Clone, Debug)]
pub struct CoordinatePower {
    pub n: usize,
    pub index: MultiIndex,
    pub power: u32,
}

impl CoordinatePower {
    pub fn new(n: usize, index: MultiIndex, power: u32) -> Result<Self> {
        if power % 2 != 0 {
            return Err(Error::InvalidParameter(format!("power {power} must be even for an even function")));
        }
        Ok(Self { n, index, power })
    }
}

impl<T: Real> KlainFunction<T> for CoordinatePower {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.index.degree()
    }
    fn tag(&self) -> String {
        format!("pl:{}^{}", self.index, self.power)
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        check_shape(xi, self.n, self.index.degree())?;
        check_unit(xi)?;
        Ok(xi.coeff(&self.index).powu(self.power))
    }
}

type EvalFn<T> = dyn Fn(&KVector<T>) -> Result<Cx<T>> + Send + Sync;

/// Black-box function given by a closure.
#[derive(Clone)]
pub struct FnKlain<T: Real> {
    n: usize,
    k: usize,
    tag: String,
    f: Arc<EvalFn<T>>,
}

impl<T: Real> FnKlain<T> {
    pub fn new<F>(n: usize, k: usize, tag: impl Into<String>, f: F) -> Self
    where
        F: Fn(&KVector<T>) -> Result<Cx<T>> + Send + Sync + 'static,
    {
        Self { n, k, tag: tag.into(), f: Arc::new(f) }
    }
}

impl<T: Real> KlainFunction<T> for FnKlain<T> {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn tag(&self) -> String {
        self.tag.clone()
    }
    fn eval(&self, xi: &KVector<T>) -> Result<Cx<T>> {
        check_shape(xi, self.n, self.k)?;
        (self.f)(xi)
    }
}

/// Largest `|f(ξ) - f(-ξ)|` over `samples` random planes.
pub fn evenness_defect<T: Real, R: Rng + ?Sized>(
    f: &dyn KlainFunction<T>,
    samples: usize,
    rng: &mut R,
) -> Result<T> {
    let mut worst = T::zero();
    for _ in 0..samples {
        let xi = pluecker(&random_frame::<T, R>(rng, f.n(), f.k()))?;
        let d = cabs(f.eval(&xi)? - f.eval(&-xi.clone())?);
        worst = worst.max(d);
    }
    Ok(worst)
}

fn parse_int<I: std::str::FromStr>(s: &str, what: &str) -> Result<I> {
    s.trim().parse::<I>().map_err(|_| Error::Parse(format!("cannot parse {what} '{s}'")))
}

/// Builds a Klain function on `Gr_k(R^n)` from a registry spec:
///
/// * `const:c` with `c` real or complex (`2`, `1+2i`)
/// * `quad:<file>` dense JSON matrix of size `C(n,k)`
/// * `quad-id` the identity form; `quad-rand:<seed>` a random symmetric form
/// * `hw:m1,m2` highest-weight vector (k = 2)
/// * `sph:p` `(x_1 - i x_2)^{2p}` (n = 3, k = 1)
/// * `pl:i1,..,ik^q` power `q` of one Plücker coordinate (1-based indices)
/// * `quartic:<seed>` product of two random quadratic forms
/// * `star:<spec>` Hodge pullback of a function on `Gr_{n-k}`
pub fn parse_spec<T: Real>(spec: &str, n: usize, k: usize) -> Result<DynKlain<T>> {
    if k > n {
        return Err(Error::DegreeOverflow { left: k, right: 0, n });
    }
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h.trim(), a),
        None => (spec.trim(), ""),
    };
    let need_k = |want: usize| -> Result<()> {
        if k != want {
            return Err(Error::InvalidParameter(format!("'{spec}' is defined for k = {want}, got k = {k}")));
        }
        Ok(())
    };
    Ok(match head {
        "const" => {
            let z: num_complex::Complex<f64> = arg
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("cannot parse constant '{arg}'")))?;
            Arc::new(Constant::new(n, k, Cx::new(T::lit(z.re), T::lit(z.im))))
        }
        "quad" => Arc::new(QuadraticForm::<T>::from_file(Path::new(arg.trim()), n, k)?),
        "quad-id" => Arc::new(QuadraticForm::<T>::identity(n, k)),
        "quad-rand" => {
            let seed: u64 = parse_int(arg, "seed")?;
            let mut rng = crate::random::stream_rng(seed, 0);
            Arc::new(QuadraticForm::<T>::random(n, k, &mut rng, false))
        }
        "hw" => {
            need_k(2)?;
            let (a, b) = arg
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected hw:m1,m2, got '{spec}'")))?;
            Arc::new(HighestWeight::new(n, parse_int(a, "m1")?, parse_int(b, "m2")?)?)
        }
        "sph" => {
            need_k(1)?;
            if n != 3 {
                return Err(Error::InvalidParameter(format!("'{spec}' is defined for n = 3, got n = {n}")));
            }
            Arc::new(SphericalHw { p: parse_int(arg, "p")? })
        }
        "pl" => {
            let (idx, pow) = arg.split_once('^').unwrap_or((arg, "2"));
            let indices = idx
                .split(',')
                .map(|s| parse_int::<usize>(s, "index").map(|i| i.wrapping_sub(1)))
                .collect::<Result<Vec<_>>>()?;
            let index = MultiIndex::new(indices, n)?;
            need_k(index.degree())?;
            Arc::new(CoordinatePower::new(n, index, parse_int(pow, "power")?)?)
        }
        "quartic" => {
            let seed: u64 = parse_int(arg, "seed")?;
            let mut rng = crate::random::stream_rng(seed, 0);
            let a: DynKlain<T> = Arc::new(QuadraticForm::<T>::random(n, k, &mut rng, false));
            let b: DynKlain<T> = Arc::new(QuadraticForm::<T>::random(n, k, &mut rng, false));
            Arc::new(Product { a, b })
        }
        "star" => Arc::new(HodgePullback::new(parse_spec::<T>(arg, n, n - k)?)),
        _ => {
            return Err(Error::Parse(format!(
                "unknown function '{spec}' (expected const:c, quad:<file>, quad-id, quad-rand:<seed>, hw:m1,m2, sph:p, pl:i,j^q, quartic:<seed>, star:<spec>)"
            )));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::simple;
    use crate::random::{random_onb_with, stream_rng};
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    fn e(n: usize, idx: &[usize]) -> KVector<f64> {
        KVector::basis(n, &MultiIndex::new(idx.to_vec(), n).unwrap())
    }

    #[test]
    fn constants() {
        let f = Constant::<f64>::new(4, 2, Cx::new(2.0, 1.0));
        assert_eq!(f.eval(&e(4, &[0, 1])).unwrap(), Cx::new(2.0, 1.0));
        assert!(f.eval(&e(4, &[0, 1, 2])).is_err());
    }

    #[test]
    fn quadratic_examples() {
        let id = QuadraticForm::<f64>::identity(4, 2);
        let mut rng = stream_rng(1, 0);
        for _ in 0..10 {
            let xi = pluecker(&random_frame::<f64, _>(&mut rng, 4, 2)).unwrap();
            assert_relative_eq!(id.eval(&xi).unwrap().re, 1.0, epsilon = 1e-12);
        }
        let i12 = MultiIndex::new(vec![0, 1], 3).unwrap();
        let q = QuadraticForm::<f64>::coordinate_square(3, &i12);
        assert_eq!(q.eval(&e(3, &[0, 1])).unwrap(), Cx::one());
        assert_eq!(q.eval(&e(3, &[0, 2])).unwrap(), Cx::zero());
        let r = 0.5f64.sqrt();
        let xi = simple(3, &[v(&[r, 0.0, r]), v(&[0.0, 1.0, 0.0])]).unwrap();
        assert_relative_eq!(q.eval(&xi).unwrap().re, 0.5, epsilon = 1e-12);
        assert!(q.eval(&(xi * 2.0)).is_err());
    }

    #[test]
    fn polarization_identity() {
        let mut rng = stream_rng(2, 0);
        let q = QuadraticForm::<f64>::random(5, 2, &mut rng, true);
        let a = KVector::from_real(5, 2, gaussian_vector::<f64, _>(&mut rng, 10).as_slice()).unwrap();
        let b = KVector::from_real(5, 2, gaussian_vector::<f64, _>(&mut rng, 10).as_slice()).unwrap();
        let s = &a + &b;
        let lhs = q.polarize(&s, &s).unwrap();
        let rhs = q.polarize(&a, &a).unwrap() + q.polarize(&a, &b).unwrap() * 2.0 + q.polarize(&b, &b).unwrap();
        assert!(cabs(lhs - rhs) < 1e-10);
        let id = QuadraticForm::<f64>::identity(5, 2);
        assert_eq!(id.polarize(&e(5, &[0, 1]), &e(5, &[0, 2])).unwrap(), Cx::zero());
        assert_relative_eq!(id.polarize(&a, &a).unwrap().re, a.norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn highest_weight_examples() {
        let f10 = HighestWeight::new(4, 1, 0).unwrap();
        assert!(cabs(KlainFunction::<f64>::eval(&f10, &e(4, &[0, 1])).unwrap()) < 1e-12);
        assert!(cabs(KlainFunction::<f64>::eval(&f10, &e(4, &[0, 2])).unwrap() - Cx::one()) < 1e-12);
        let f00 = HighestWeight::new(4, 0, 0).unwrap();
        assert_eq!(KlainFunction::<f64>::eval(&f00, &e(4, &[1, 3])).unwrap(), Cx::one());
        assert!(HighestWeight::new(4, 1, 2).is_err());
        assert!(HighestWeight::new(3, 1, 1).is_err());
        let not_simple = (e(4, &[0, 1]) + e(4, &[2, 3])) * 0.5f64.sqrt();
        assert!(matches!(KlainFunction::<f64>::eval(&f10, &not_simple), Err(Error::NotSimple { .. })));
    }

    #[test]
    fn highest_weight_is_frame_independent_and_even() {
        let mut rng = stream_rng(3, 0);
        let fs = [HighestWeight::new(5, 2, 1).unwrap(), HighestWeight::new(5, 3, -2).unwrap()];
        for _ in 0..100 {
            let frame = random_frame::<f64, _>(&mut rng, 5, 2);
            for f in &fs {
                let base = f.eval_frame(&frame).unwrap();
                for _ in 0..10 {
                    // random element of O(2) acting on the frame
                    let r = random_onb_with::<f64, _>(&mut rng, 2).matrix();
                    let m = frame.matrix() * r;
                    let g = Frame::from_columns(&m);
                    let val = KlainFunction::<f64>::eval(f, &simple(5, g.vectors()).unwrap()).unwrap();
                    assert!(cabs(val - base) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn spherical_examples() {
        let f0 = SphericalHw { p: 0 };
        let f1 = SphericalHw { p: 1 };
        let x = KVector::from_vector(&v(&[0.0, 0.0, 1.0]));
        assert_eq!(KlainFunction::<f64>::eval(&f0, &x).unwrap(), Cx::one());
        assert_eq!(KlainFunction::<f64>::eval(&f1, &x).unwrap(), Cx::zero());
        let y = KVector::from_vector(&v(&[1.0, 0.0, 0.0]));
        assert_eq!(KlainFunction::<f64>::eval(&f1, &y).unwrap(), Cx::one());
    }

    #[test]
    fn every_variant_is_even() {
        let mut rng = stream_rng(4, 0);
        let fs: Vec<DynKlain<f64>> = vec![
            parse_spec("const:1+2i", 4, 2).unwrap(),
            parse_spec("quad-rand:3", 4, 2).unwrap(),
            parse_spec("hw:2,-1", 4, 2).unwrap(),
            parse_spec("pl:1,2^4", 4, 2).unwrap(),
            parse_spec("quartic:1", 4, 2).unwrap(),
            parse_spec("star:hw:1,1", 4, 2).unwrap(),
            parse_spec("sph:2", 3, 1).unwrap(),
        ];
        for f in &fs {
            assert!(evenness_defect(f.as_ref(), 50, &mut rng).unwrap() < 1e-12, "{}", f.tag());
        }
    }

    #[test]
    fn registry_errors() {
        assert!(parse_spec::<f64>("hw:1,0", 4, 1).is_err());
        assert!(parse_spec::<f64>("sph:1", 4, 1).is_err());
        assert!(parse_spec::<f64>("nope", 4, 2).is_err());
        assert!(parse_spec::<f64>("pl:1,2^3", 4, 2).is_err());
        assert!(parse_spec::<f64>("quad:/does/not/exist.json", 4, 2).is_err());
    }

    #[test]
    fn json_forms() {
        let q = QuadraticForm::<f64>::from_json("[[1, 2], [0, [1, 0.5]]]", 2, 1).unwrap();
        assert_eq!(q.matrix()[(0, 1)], Cx::new(1.0, 0.0));
        assert_eq!(q.matrix()[(1, 1)], Cx::new(1.0, 0.5));
        assert!(QuadraticForm::<f64>::from_json("[[1, 0], [0, 1]]", 3, 1).is_err());
        assert!(QuadraticForm::<f64>::from_json("[[1, 0], [0, \"x\"]]", 2, 1).is_err());
        assert!(QuadraticForm::<f64>::from_json("{\"matrix\": [[1]]}", 1, 1).is_ok());
    }

    #[test]
    fn works_in_single_precision() {
        let f = HighestWeight::new(4, 1, 0).unwrap();
        let x: KVector<f32> = KVector::basis(4, &MultiIndex::new(vec![0, 2], 4).unwrap());
        assert!((KlainFunction::<f32>::eval(&f, &x).unwrap() - Cx::one()).norm_sqr() < 1e-10);
    }
}

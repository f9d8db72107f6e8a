use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::Polytope;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Built-in polytope families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShapeKind {
    /// `[0,1]^n`.
    Cube { n: usize },
    /// `Π [0, l_i]`, a product of segments.
    Box { lengths: Vec<f64> },
    /// `conv{0, e_1, .., e_n}`.
    Simplex { n: usize },
    /// `conv{e_1, .., e_n}`, a regular `(n-1)`-simplex in `R^n`.
    RegularSimplex { n: usize },
    /// `conv{±e_1, .., ±e_n}`.
    CrossPolytope { n: usize },
    /// `[0, length·e_1]` in `R^n`.
    Segment { n: usize, length: f64 },
    /// `conv{0, v_1, .., v_{n-1}, t·v_n}` for an orthonormal basis `v`.
    SimplexS { basis: Vec<Vec<f64>>, t: f64 },
}

impl ShapeKind {
    /// Parses the CLI names `cube`, `simplex`, `regular-simplex`,
    /// `cross-polytope`, `segment` and `simplex-s:<t>` (standard basis).
    pub fn parse(name: &str, n: usize) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let number = |a: Option<&str>, default: f64| -> Result<f64> {
            match a {
                None => Ok(default),
                Some(s) => s
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse '{s}' in shape '{name}'"))),
            }
        };
        Ok(match head {
            "cube" => Self::Cube { n },
            "simplex" => Self::Simplex { n },
            "regular-simplex" => Self::RegularSimplex { n },
            "cross" | "cross-polytope" => Self::CrossPolytope { n },
            "segment" => Self::Segment { n, length: number(arg, 1.0)? },
            "box" => {
                let lengths = arg
                    .ok_or_else(|| Error::InvalidParameter("box needs lengths, e.g. box:1,2,3".into()))?
                    .split(',')
                    .map(|s| number(Some(s.trim()), 1.0))
                    .collect::<Result<Vec<_>>>()?;
                Self::Box { lengths }
            }
            "simplex-s" => {
                let basis = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
                Self::SimplexS { basis, t: number(arg, 1.0)? }
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown shape '{name}' (expected cube, box:l1,..,ln, simplex, regular-simplex, cross-polytope, segment[:L], simplex-s[:t])"
                )))
            }
        })
    }

    pub const NAMES: [&'static str; 7] =
        ["cube", "box", "simplex", "regular-simplex", "cross-polytope", "segment", "simplex-s"];
}

fn unit<T: Real>(n: usize, i: usize, scale: T) -> DVector<T> {
    let mut v = DVector::zeros(n);
    v[i] = scale;
    v
}

fn positive_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be at least 1".into()));
    }
    Ok(())
}

pub fn make_shape<T: Real>(kind: &ShapeKind) -> Result<Polytope<T>> {
    match kind {
        ShapeKind::Cube { n } => make_shape(&ShapeKind::Box { lengths: vec![1.0; *n] }),
        ShapeKind::Box { lengths } => {
            let n = lengths.len();
            positive_dim(n)?;
            if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                return Err(Error::InvalidParameter("box side lengths must be positive".into()));
            }
            let vertices = (0..1usize << n)
                .map(|bits| {
                    DVector::from_iterator(
                        n,
                        (0..n).map(|i| if bits >> i & 1 == 1 { T::lit(lengths[i]) } else { T::zero() }),
                    )
                })
                .collect();
            Polytope::new(vertices)
        }
        ShapeKind::Simplex { n } => {
            positive_dim(*n)?;
            let mut vertices = vec![DVector::zeros(*n)];
            vertices.extend((0..*n).map(|i| unit(*n, i, T::one())));
            Polytope::new(vertices)
        }
        ShapeKind::RegularSimplex { n } => {
            positive_dim(*n)?;
            Polytope::new((0..*n).map(|i| unit(*n, i, T::one())).collect())
        }
        ShapeKind::CrossPolytope { n } => {
            positive_dim(*n)?;
            let vertices =
                (0..*n).flat_map(|i| [unit(*n, i, T::one()), unit(*n, i, -T::one())]).collect();
            Polytope::new(vertices)
        }
        ShapeKind::Segment { n, length } => {
            positive_dim(*n)?;
            if !(*length > 0.0) || !length.is_finite() {
                return Err(Error::InvalidParameter("segment length must be positive".into()));
            }
            Polytope::new(vec![DVector::zeros(*n), unit(*n, 0, T::lit(*length))])
        }
        ShapeKind::SimplexS { basis, t } => {
            let n = basis.len();
            positive_dim(n)?;
            if !(*t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!("simplex_S needs t > 0, got {t}")));
            }
            if basis.iter().any(|v| v.len() != n) {
                return Err(Error::InvalidParameter("simplex_S basis must be n vectors in R^n".into()));
            }
            let vs: Vec<DVector<T>> =
                basis.iter().map(|v| DVector::from_iterator(n, v.iter().map(|&x| T::lit(x)))).collect();
            simplex_s(&vs, T::lit(*t))
        }
    }
}

/// `conv{0, v_1, .., v_{n-1}, t·v_n}`. Vertex `i` is `p_i` (`p_0 = 0`), so the
/// facet omitting `p_i` is the one with vertex set `{0..=n} \ {i}`.
pub fn simplex_s<T: Real>(basis: &[DVector<T>], t: T) -> Result<Polytope<T>> {
    let n = basis.len();
    let mut vertices = vec![DVector::zeros(n)];
    vertices.extend(basis[..n - 1].iter().cloned());
    vertices.push(&basis[n - 1] * t);
    Polytope::new(vertices)
}

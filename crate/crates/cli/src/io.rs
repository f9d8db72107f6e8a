use std::path::Path;

use anyhow::{bail, Context, Result};
use angval::klain::QuadraticForm;
use angval::polytope::{Polytope, PolytopeSpec};

/// Reads `{"n": int, "vertices": [[..], ..]}`. Every listed point must be a
/// vertex of the hull.
pub fn load_polytope(path: &Path) -> Result<Polytope<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let spec: PolytopeSpec = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected {{\"n\": int, \"vertices\": [[..], ..]}}", path.display()))?;
    if spec.vertices.is_empty() {
        bail!("{}: field `vertices` is empty", path.display());
    }
    spec.to_polytope().with_context(|| format!("{}: invalid polytope", path.display()))
}

/// Reads a dense symmetric `C(n,k) x C(n,k)` matrix (real entries, or
/// `[re, im]` pairs). Asymmetric input is symmetrized with a warning.
pub fn load_quadratic(path: &Path, n: usize, k: usize) -> Result<QuadraticForm<f64>> {
    QuadraticForm::from_file(path, n, k).with_context(|| format!("cannot load quadratic form from {}", path.display()))
}

//! Closed forms of both sides of the relation for highest-weight vectors on
//! the structured bases.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn signs(count: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..1usize << count).map(move |bits| (0..count).map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
}

fn check_weights(m1: u32, m2: i32, n: usize) -> Result<()> {
    if m2.unsigned_abs() > m1 {
        return Err(Error::InvalidParameter(format!("need m1 >= |m2|, got ({m1}, {m2})")));
    }
    if n < 3 || (m2 != 0 && n < 4) {
        return Err(Error::InvalidParameter(format!("weights ({m1}, {m2}) are not available for n = {n}")));
    }
    Ok(())
}

/// `(lhs, rhs)` of the relation for `f_{m1,m2}` on the one-angle basis at `φ`.
///
/// `rhs = 1 + (-1)^{m2} c^{2m1} + (-1)^{m1} s^{2m1}` for `m2 != 0` and
/// `1 + (n-3) c^{2m1} + (-1)^{m1} s^{2m1}` for `m2 = 0`;
/// `lhs = 2^{|m2|}/(n-1)^{m1-1} · avg_ε ((n-2)c² + 2iε_1ε_2 s)^{m1-|m2|}
/// (ε_2ε_3 cs + iε_1(ε_2 s - ε_3 c))^{|m2|}`, the second factor conjugated
/// for `m2 < 0`.
pub fn hw_relation_sides(m1: u32, m2: i32, n: usize, phi: f64) -> Result<(Complex64, Complex64)> {
    check_weights(m1, m2, n)?;
    let nf = n as f64;
    if m1 == 0 {
        return Ok((Complex64::from(nf - 1.0), Complex64::from(nf - 1.0)));
    }
    let (s, c) = phi.sin_cos();
    let (p1, p2) = (2 * m1 as i32, m1 as i32);
    let odd = |m: i64| if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let c_coeff = if m2 == 0 { nf - 3.0 } else { odd(m2 as i64) };
    let rhs = 1.0 + c_coeff * c.powi(p1) + odd(m1 as i64) * s.powi(p1);

    let a = m2.unsigned_abs();
    let i = Complex64::i();
    let count = if n >= 4 { 3 } else { 2 };
    let mut sum = Complex64::from(0.0);
    for e in signs(count) {
        let e3 = if count == 3 { e[2] } else { 0.0 };
        let first = (nf - 2.0) * c * c + 2.0 * i * e[0] * e[1] * s;
        let mut second = e[1] * e3 * c * s + i * e[0] * (e[1] * s - e3 * c);
        if m2 < 0 {
            second = second.conj();
        }
        sum += first.powu(m1 - a) * second.powu(a);
    }
    let avg = sum / (1usize << count) as f64;
    let lhs = avg * 2f64.powi(a as i32) / (nf - 1.0).powi(p2 - 1);
    Ok((lhs, Complex64::from(rhs)))
}

/// `(lhs, rhs)` of the relation for `f_{m1,±m1}` in `R^5` on the two-angle
/// basis at `(φ, ψ)`:
/// `rhs = c^{2m1} + s^{2m1} + (-1)^{m1}(a^{2m1} + b^{2m1})`,
/// `lhs = 2^{m1}/4^{m1-1} · avg_ε (ε_1ε_2 cs - ε_3ε_4 ab + i(ε_1 c + ε_2 s)(ε_3 a + ε_4 b))^{m1}`,
/// conjugated for the negative sign.
pub fn hw_relation_sides_n5(m1: u32, negative: bool, phi: f64, psi: f64) -> Result<(Complex64, Complex64)> {
    if m1 == 0 {
        return Ok((Complex64::from(4.0), Complex64::from(4.0)));
    }
    let (s, c) = phi.sin_cos();
    let (b, a) = psi.sin_cos();
    let p = 2 * m1 as i32;
    let sign = if m1 % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = c.powi(p) + s.powi(p) + sign * (a.powi(p) + b.powi(p));
    let i = Complex64::i();
    let mut sum = Complex64::from(0.0);
    for e in signs(4) {
        let mut z = e[0] * e[1] * c * s - e[2] * e[3] * a * b + i * (e[0] * c + e[1] * s) * (e[2] * a + e[3] * b);
        if negative {
            z = z.conj();
        }
        sum += z.powu(m1);
    }
    let lhs = sum / 16.0 * 2f64.powi(m1 as i32) / 4f64.powi(m1 as i32 - 1);
    Ok((lhs, Complex64::from(rhs)))
}

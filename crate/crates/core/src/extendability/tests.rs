use std::sync::Arc;

use super::*;
use crate::exterior::MultiIndex;
use crate::klain::{parse_spec, Constant, CoordinatePower, HighestWeight, QuadraticForm, SphericalHw};
use crate::random::random_onb;

fn hw(n: usize, m1: u32, m2: i32) -> DynKlain<f64> {
    Arc::new(HighestWeight::new(n, m1, m2).unwrap())
}

#[test]
fn constant_satisfies_relation() {
    for n in 3..=6 {
        let f = Constant::<f64>::one(n, 2);
        let (l, r) = relation_sides(&f, &random_onb(n, 1)).unwrap();
        assert!((l - r).norm() < 1e-12);
        assert!((r.re - (n as f64 - 1.0)).abs() < 1e-12);
    }
}

#[test]
fn quadratic_forms_satisfy_relation() {
    let mut rng = stream_rng(7, 0);
    for n in 3..=6 {
        let q = QuadraticForm::<f64>::random(n, 2, &mut rng, true);
        for s in 0..5 {
            assert!(relation_residual(&q, &random_onb(n, s)).unwrap().norm() < 1e-10);
        }
    }
}

#[test]
fn structured_bases_are_orthonormal() {
    for n in 3..=6 {
        for phi in angle_sweep() {
            assert!(one_angle_basis::<f64>(n, phi).unwrap().is_orthonormal(1e-14));
            if n >= 4 {
                assert!(two_angle_basis::<f64>(n, phi, 0.3).unwrap().is_orthonormal(1e-14));
            }
        }
    }
}

#[test]
fn one_angle_oracle_matches_direct_evaluation() {
    for n in 4..=6 {
        for m1 in 0..=3u32 {
            for m2 in -(m1 as i32)..=(m1 as i32) {
                let f = hw(n, m1, m2);
                for phi in [0.0, 0.3, std::f64::consts::FRAC_PI_4, 1.2] {
                    let (l, r) = relation_sides(f.as_ref(), &one_angle_basis(n, phi).unwrap()).unwrap();
                    let (lo, ro) = hw_relation_sides(m1, m2, n, phi).unwrap();
                    assert!((l - lo).norm() < 1e-9, "lhs n={n} ({m1},{m2}) φ={phi}: {l} vs {lo}");
                    assert!((r - ro).norm() < 1e-9, "rhs n={n} ({m1},{m2}) φ={phi}: {r} vs {ro}");
                }
            }
        }
    }
    for m1 in 0..=3 {
        let (l, r) = relation_sides(hw(3, m1, 0).as_ref(), &one_angle_basis(3, 0.4).unwrap()).unwrap();
        let (lo, ro) = hw_relation_sides(m1, 0, 3, 0.4).unwrap();
        assert!((l - lo).norm() < 1e-9 && (r - ro).norm() < 1e-9);
    }
}

#[test]
fn two_angle_oracle_matches_direct_evaluation() {
    for m1 in 1..=3u32 {
        for negative in [false, true] {
            let m2 = if negative { -(m1 as i32) } else { m1 as i32 };
            let f = hw(5, m1, m2);
            for (phi, psi) in [(0.0, 0.0), (std::f64::consts::FRAC_PI_3, std::f64::consts::PI / 5.0), (0.7, 1.9)] {
                let (l, r) = relation_sides(f.as_ref(), &two_angle_basis(5, phi, psi).unwrap()).unwrap();
                let (lo, ro) = hw_relation_sides_n5(m1, negative, phi, psi).unwrap();
                assert!((l - lo).norm() < 1e-9, "lhs ({m1},{m2}) {phi},{psi}: {l} vs {lo}");
                assert!((r - ro).norm() < 1e-9, "rhs ({m1},{m2}) {phi},{psi}: {r} vs {ro}");
            }
        }
    }
}

#[test]
fn leading_coefficient_gap_for_f20() {
    // at φ = 0 only the c^{2m1} terms survive: lhs = (n-2)^2/(n-1) + ..., rhs = 1 + (n-3)
    let (l, r) = hw_relation_sides(2, 0, 4, 0.0).unwrap();
    assert!((l.re - 4.0 / 3.0).abs() < 1e-12, "{l}");
    assert!((r.re - 2.0).abs() < 1e-12);
    let (l, r) = hw_relation_sides(2, 0, 4, std::f64::consts::FRAC_PI_4).unwrap();
    assert!((l - r).norm() > 1e-2);
}

#[test]
fn relation_test_verdicts() {
    let cfg = RelationConfig { trials: 20, seed: 1, tol: 1e-8, structured: true };
    assert_eq!(relation_test(&*hw(4, 1, 0), &cfg).unwrap().verdict, Verdict::Pass);
    assert_eq!(relation_test(&*hw(4, 1, -1), &cfg).unwrap().verdict, Verdict::Pass);
    assert_eq!(relation_test(&*hw(4, 2, 0), &cfg).unwrap().verdict, Verdict::Fail);
    let r33 = relation_test(&*hw(5, 3, 3), &cfg).unwrap();
    assert!(r33.max_for(BasisFamily::OneAngle) < 1e-9);
    // the two-angle family does not separate f_{3,3} in R^5 either; nor do random bases
    assert!(r33.max_for(BasisFamily::TwoAngle) < 1e-9);
    assert_eq!(r33.verdict, Verdict::Pass);
    assert!(relation_test(&*hw(6, 3, 3), &cfg).unwrap().max_for(BasisFamily::TwoAngle) > 1e-2);
    assert_eq!(Verdict::classify(1e-5, 1e-8), Verdict::Inconclusive);
}

#[test]
fn line_relation_in_r3() {
    let cfg = RelationConfig { trials: 20, seed: 2, tol: 1e-8, structured: true };
    for p in 0..=3 {
        let report = relation_test::<f64>(&SphericalHw { p }, &cfg).unwrap();
        let expect = if p <= 1 { Verdict::Pass } else { Verdict::Fail };
        assert_eq!(report.verdict, expect, "p = {p}");
    }
    // u_1 = e_1, u_2 = e_3: lhs = 1/2^{p-1}, rhs = 1
    let onb = Frame::<f64>::new(
        3,
        vec![DVector::from_vec(vec![1.0, 0.0, 0.0]), DVector::from_vec(vec![0.0, 0.0, 1.0]), DVector::from_vec(vec![0.0, 1.0, 0.0])],
    )
    .unwrap();
    for p in 1..=4u32 {
        let (l, r) = sphere_relation_sides::<f64>(&SphericalHw { p }, &onb).unwrap();
        assert!((l.re - 0.5f64.powi(p as i32 - 1)).abs() < 1e-12);
        assert!((r.re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn general_k() {
    let cfg = RelationConfig { trials: 10, seed: 3, tol: 1e-8, structured: true };
    let one: DynKlain<f64> = Arc::new(Constant::one(6, 3));
    assert_eq!(relation_test_general_k(one, &cfg).unwrap().verdict, Verdict::Pass);
    let mut rng = stream_rng(4, 0);
    let q: DynKlain<f64> = Arc::new(QuadraticForm::random(5, 2, &mut rng, false));
    assert_eq!(relation_test_general_k(q, &cfg).unwrap().verdict, Verdict::Pass);
    let quartic: DynKlain<f64> =
        Arc::new(CoordinatePower::new(5, MultiIndex::new(vec![0, 1], 5).unwrap(), 4).unwrap());
    assert_eq!(relation_test_general_k(quartic, &cfg).unwrap().verdict, Verdict::Fail);
    let hw1: DynKlain<f64> = parse_spec("star:hw:1,0", 5, 3).unwrap();
    assert_eq!(relation_test_general_k(hw1, &cfg).unwrap().verdict, Verdict::Pass);
}

#[test]
fn fits() {
    let f11 = hw(4, 1, 1);
    let r = quadratic_fit(&*f11, 60, 40, 1).unwrap();
    assert!(r.test_residual < 1e-8, "{}", r.test_residual);
    let r = quadratic_fit(&Constant::<f64>::one(4, 2), 60, 40, 1).unwrap();
    assert!(r.test_residual < 1e-10);
    let r = quadratic_fit(&*hw(4, 2, 0), 60, 40, 1).unwrap();
    assert!(r.test_residual > 1e-2);
    assert!(matches!(quadratic_fit(&*f11, 10, 10, 1), Err(Error::Underdetermined { needed: 20, got: 10 })));
}

#[test]
fn dimensions() {
    for (n, k, d) in [(3, 1, 6), (4, 2, 20), (5, 2, 50), (5, 3, 50)] {
        assert_eq!(dimension_formula(n, k), d);
        assert_eq!(quadratic_space_dimension(n, k, 2 * fit::monomial_count(n, k), 9).unwrap(), d);
    }
    assert!(quadratic_space_dimension(4, 2, 5, 0).is_err());
}

use std::sync::Arc;

use nalgebra::DVector;
use proptest::prelude::*;

use angval::exterior::{factor_simple, hodge_standard, pluecker, simple, wedge, Frame, KVector};
use angval::extendability::relation_residual;
use angval::klain::{DynKlain, HighestWeight, KlainFunction, QuadraticForm};
use angval::polytope::{external_angle, make_shape, simplex_s, ShapeKind};
use angval::random::{gaussian_vector, random_frame, random_onb, random_orthogonal, stream_rng, MonteCarloConfig};
use angval::simplex_lab::face_table;
use angval::valuation::{intrinsic_volume, mu_angular};

fn random_kvector(n: usize, k: usize, seed: u64) -> KVector<f64> {
    let mut rng = stream_rng(seed, 3);
    let dim = angval::exterior::binomial(n, k);
    let coeffs: Vec<f64> = gaussian_vector::<f64, _>(&mut rng, dim).iter().copied().collect();
    KVector::from_real(n, k, &coeffs).unwrap()
}

fn nk() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), 0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hodge_is_an_involution_up_to_sign((n, k) in nk(), seed in any::<u64>()) {
        let a = random_kvector(n, k, seed);
        let sign = if (k * (n - k)) % 2 == 0 { 1.0 } else { -1.0 };
        let back = hodge_standard(&hodge_standard(&a));
        prop_assert!((&back - &(a * sign)).norm() < 1e-12);
    }

    #[test]
    fn wedge_of_vectors_anticommutes(n in 2usize..=6, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let x = KVector::from_vector(&gaussian_vector::<f64, _>(&mut rng, n));
        let y = KVector::from_vector(&gaussian_vector::<f64, _>(&mut rng, n));
        let s = &wedge(&x, &y).unwrap() + &wedge(&y, &x).unwrap();
        prop_assert!(s.norm() < 1e-12);
        prop_assert!(wedge(&x, &x).unwrap().norm() < 1e-12);
    }

    #[test]
    fn pluecker_round_trip((n, k) in (2usize..=6).prop_flat_map(|n| (Just(n), 1..n)), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let e = random_frame::<f64, _>(&mut rng, n, k);
        let xi = pluecker(&e).unwrap();
        let back = factor_simple(&xi, 1e-9).unwrap();
        prop_assert!(back.frame.subspace_distance(&e) < 1e-9);
        prop_assert!((&pluecker(&back.frame).unwrap() - &xi).norm() < 1e-9);
    }

    #[test]
    fn complement_is_hodge_dual((n, k) in (2usize..=6).prop_flat_map(|n| (Just(n), 1..n)), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let e = random_frame::<f64, _>(&mut rng, n, k);
        let d = &pluecker(&e.complement()).unwrap() - &hodge_standard(&pluecker(&e).unwrap());
        prop_assert!(d.norm() < 1e-10);
    }

    #[test]
    fn highest_weight_ignores_the_frame(n in 4usize..=6, m1 in 0u32..=3, m2 in -3i32..=3, seed in any::<u64>()) {
        prop_assume!(m2.unsigned_abs() <= m1);
        let f = HighestWeight::new(n, m1, m2).unwrap();
        let mut rng = stream_rng(seed, 0);
        let e = random_frame::<f64, _>(&mut rng, n, 2);
        let (a, b) = (&e.vectors()[0], &e.vectors()[1]);
        let th: f64 = 0.37 + (seed % 100) as f64 / 50.0;
        let r = Frame::new(n, vec![a * th.cos() + b * th.sin(), b * th.cos() - a * th.sin()]).unwrap();
        let d = KlainFunction::<f64>::eval_frame(&f, &e).unwrap() - KlainFunction::<f64>::eval_frame(&f, &r).unwrap();
        prop_assert!(d.norm() < 1e-9);
    }

    #[test]
    fn quadratic_forms_satisfy_the_relation(n in 3usize..=6, seed in any::<u64>(), complex in any::<bool>()) {
        let mut rng = stream_rng(seed, 1);
        let q = QuadraticForm::<f64>::random(n, 2, &mut rng, complex);
        prop_assert!(relation_residual(&q, &random_onb(n, seed)).unwrap().norm() < 1e-9);
    }

    #[test]
    fn valuation_is_linear_in_f(k in 0usize..=3, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 2);
        let (a, b) = (QuadraticForm::<f64>::random(3, k, &mut rng, true), QuadraticForm::<f64>::random(3, k, &mut rng, true));
        let p = make_shape::<f64>(&ShapeKind::Simplex { n: 3 }).unwrap();
        let mc = MonteCarloConfig::default();
        let sum = mu_angular(&a.add(&b).unwrap(), &p, k, &mc).unwrap().value;
        let parts = mu_angular(&a, &p, k, &mc).unwrap().value + mu_angular(&b, &p, k, &mc).unwrap().value;
        prop_assert!((sum - parts).norm() < 1e-10);
    }

    #[test]
    fn intrinsic_volumes_are_rotation_invariant(n in 2usize..=4, seed in any::<u64>()) {
        let cube = make_shape::<f64>(&ShapeKind::Box { lengths: (1..=n).map(|i| i as f64 * 0.5).collect() }).unwrap();
        let turned = cube.mapped(&random_orthogonal(n, seed)).unwrap();
        let mc = MonteCarloConfig::default();
        for k in 0..=n {
            let (a, _) = intrinsic_volume(&cube, k, &mc).unwrap();
            let (b, se) = intrinsic_volume(&turned, k, &mc).unwrap();
            prop_assert_eq!(se, 0.0);
            prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn klain_function_of_a_flat_box(n in 3usize..=5, seed in any::<u64>()) {
        // a box inside a 2-plane E: μ_f(P) = f(E) · area(P)
        let mut rng = stream_rng(seed, 4);
        let e = random_frame::<f64, _>(&mut rng, n, 2);
        let (u, v) = (&e.vectors()[0] * 1.5, &e.vectors()[1] * 0.5);
        let p = angval::polytope::Polytope::new(vec![DVector::zeros(n), u.clone(), v.clone(), &u + &v]).unwrap();
        let f: DynKlain<f64> = Arc::new(QuadraticForm::random(n, 2, &mut rng, true));
        let got = mu_angular(f.as_ref(), &p, 2, &MonteCarloConfig::default()).unwrap().value;
        let want = f.eval(&simple(n, e.vectors()).unwrap()).unwrap() * 0.75;
        prop_assert!((got - want).norm() < 1e-10);
    }
}

#[test]
fn face_table_matches_the_generic_polytope() {
    for n in 3..=5 {
        for t in [0.1, 0.5, 1.0, 2.0] {
            let basis = random_onb::<f64>(n, (n * 10) as u64);
            let table = face_table(&basis, t).unwrap();
            let p = simplex_s(basis.vectors(), t).unwrap();
            let faces = p.faces(n - 2).unwrap();
            assert_eq!(faces.len(), table.faces.len());
            for row in &table.faces {
                let face = faces.iter().find(|f| f.vertex_ids == row.vertex_ids).expect("face present");
                assert!((face.volume - row.volume).abs() < 1e-9, "n={n} t={t} {:?}", row.facets);
                let angle = external_angle(&p, face, &MonteCarloConfig::default()).unwrap();
                assert!((angle.value - row.external_angle()).abs() < 1e-9, "n={n} t={t} {:?}", row.facets);
            }
        }
    }
}

#[test]
fn single_precision_cube() {
    let cube = make_shape::<f32>(&ShapeKind::Cube { n: 3 }).unwrap();
    let (v, _) = intrinsic_volume(&cube, 2, &MonteCarloConfig::default()).unwrap();
    assert!((v - 3.0).abs() < 1e-5);
    let e = angval::Frame32::standard(3);
    assert!((pluecker(&e).unwrap().norm() - 1.0).abs() < 1e-6);
}

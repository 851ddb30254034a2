use std::sync::Arc;

use plrmat_core::catalog::{load_entry, sl2, sl3};
use plrmat_core::dual_group::{pb_dual, GroupWord, TestFunction};
use plrmat_core::fd::Stencil;
use plrmat_core::lie_core::{cybe_lhs, invariance_residual3, mixed_bracket_terms};
use plrmat_core::linalg::{expm, max_abs};
use plrmat_core::reduction::{constraint_matrix, rho, COND_THRESHOLD};
use plrmat_core::suite::to_canonical_json;
use plrmat_core::{Matrix, SlotPair, Tensor2, Vector};
use proptest::prelude::*;

fn vec_of(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-1.0f64..1.0, n).prop_map(Vector::from_vec)
}

fn antisym(n: usize) -> impl Strategy<Value = Tensor2> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let m = Matrix::from_vec(n, n, v);
        Tensor2::from_matrix(&m - m.transpose())
    })
}

fn mixed_sum(alg: &plrmat_core::LieAlgebra, s: &Tensor2, t: &Tensor2) -> plrmat_core::Tensor3 {
    let mut out = mixed_bracket_terms(alg, s, t, SlotPair::S12T13).unwrap();
    out += &mixed_bracket_terms(alg, s, t, SlotPair::S12T23).unwrap();
    out += &mixed_bracket_terms(alg, s, t, SlotPair::S13T23).unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ad_is_a_representation(x in vec_of(8), y in vec_of(8)) {
        let g = sl3();
        let xy = g.bracket(&x, &y).unwrap();
        let (ax, ay) = (g.ad_matrix(&x).unwrap(), g.ad_matrix(&y).unwrap());
        let comm = &ax * &ay - &ay * &ax;
        prop_assert!(max_abs(&(g.ad_matrix(&xy).unwrap() - comm)) < 1e-12);
    }

    #[test]
    fn bracket_is_antisymmetric_and_jacobi(x in vec_of(8), y in vec_of(8), z in vec_of(8)) {
        let g = sl3();
        let b = |u: &Vector, v: &Vector| g.bracket(u, v).unwrap();
        prop_assert!((b(&x, &y) + b(&y, &x)).amax() < 1e-13);
        let jac = b(&x, &b(&y, &z)) + b(&y, &b(&z, &x)) + b(&z, &b(&x, &y));
        prop_assert!(jac.amax() < 1e-12);
    }

    #[test]
    fn cybe_is_quadratic(r in antisym(3), t in -3.0f64..3.0) {
        let g = sl2();
        let a = cybe_lhs(&g, &r.scale(t)).unwrap();
        let b = cybe_lhs(&g, &r).unwrap().scale(t * t);
        prop_assert!((&a - &b).max_abs() < 1e-11);
    }

    #[test]
    fn cybe_polarizes_into_mixed_terms(r in antisym(3), s in antisym(3)) {
        let g = sl2();
        let lhs = &(&cybe_lhs(&g, &(&r + &s)).unwrap() - &cybe_lhs(&g, &r).unwrap()) - &cybe_lhs(&g, &s).unwrap();
        let rhs = &mixed_sum(&g, &r, &s) + &mixed_sum(&g, &s, &r);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn cybe_of_antisymmetric_is_alternating(r in antisym(3)) {
        prop_assert!(cybe_lhs(&sl2(), &r).unwrap().alternation_residual() < 1e-12);
    }

    #[test]
    fn standard_r_anomaly_is_invariant(t in -2.0f64..2.0) {
        let g = sl2();
        let r = plrmat_core::catalog::sl2_dj_r().scale(t);
        prop_assert!(invariance_residual3(&g, &cybe_lhs(&g, &r).unwrap()) < 1e-12);
    }

    #[test]
    fn expm_inverts(x in vec_of(8)) {
        let a = sl3().ad_matrix(&x).unwrap();
        let p = expm(&a) * expm(&(-&a));
        prop_assert!(max_abs(&(p - Matrix::identity(8, 8))) < 1e-12);
    }

    #[test]
    fn dual_group_ad_preserves_pairing(f1 in vec_of(8), f2 in vec_of(8)) {
        let s = load_entry("sl3_dj_levi").unwrap();
        let d = Arc::clone(s.k_double());
        let w = GroupWord::from_dual_coords(&d, &[f1, f2]).unwrap();
        prop_assert!(w.pairing_residual() < 1e-10);
        prop_assert!(w.inverse_residual() < 1e-10);
        prop_assert!(w.stability_residual() < 1e-10);
    }

    #[test]
    fn dual_bracket_is_antisymmetric(f in vec_of(3), a in 0usize..6, b in 0usize..6, c in 0usize..6, d in 0usize..6) {
        let s = load_entry("sl2_dj").unwrap();
        let w = GroupWord::from_dual_coords(s.k_double(), &[f]).unwrap();
        let t1 = TestFunction::entry(a, b);
        let t2 = TestFunction::entry(c, d).times(&TestFunction::entry(a, d));
        let p12 = pb_dual(&w, &t1, &t2, 1e-4, Stencil::Central4).unwrap();
        let p21 = pb_dual(&w, &t2, &t1, 1e-4, Stencil::Central4).unwrap();
        prop_assert!((p12 + p21).abs() < 1e-8 * (1.0 + p12.abs()));
    }

    #[test]
    fn c_and_rho_are_antisymmetric(f in vec_of(2)) {
        let s = load_entry("sl3_dj_cartan").unwrap();
        let w = s.lift_native(&s.native_word(&[f]).unwrap()).unwrap();
        let c = constraint_matrix(&s, &w);
        prop_assert!(c.antisymmetry_residual() < 1e-12);
        if let Ok(r) = rho(&s, &w, COND_THRESHOLD) {
            prop_assert!(r.antisymmetry_residual() < 1e-9 * (1.0 + r.max_abs()));
        }
    }

    #[test]
    fn canonical_floats_round_trip(x in prop::num::f64::NORMAL) {
        let text = to_canonical_json(&vec![x]);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back[0].to_bits(), x.to_bits());
    }
}

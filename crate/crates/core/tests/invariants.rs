use absorder::generators::elements;
use absorder::generators::families::{gen_map, map_matrix};
use absorder::linalg;
use absorder::matrix_order::{abs_mn, block_trick_residuals, direct_sum, left_mul};
use absorder::model::{Element, SpaceModel};
use absorder::order;
use absorder::rng::stream_rng;
use absorder::Tolerance;
use proptest::prelude::*;

fn model(i: usize) -> SpaceModel {
    match i % 5 {
        0 => SpaceModel::hermitian(2),
        1 => SpaceModel::hermitian(3),
        2 => SpaceModel::hermitian_blocks(&[1, 2]),
        3 => SpaceModel::lattice(3),
        _ => SpaceModel::lattice(6),
    }
}

fn hermitian(i: usize) -> SpaceModel {
    model(i % 3)
}

fn norm(m: &SpaceModel, v: &Element) -> f64 {
    order::residual_norm(m, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn abs_is_positive_and_dominates(seed: u64, mi in 0usize..5) {
        let m = model(mi);
        let tol = Tolerance::default();
        let v = elements::gaussian_self_adjoint(&m, 1, &mut stream_rng(seed, "inv", 0));
        let a = order::abs_element(&m, &v).unwrap();
        prop_assert!(order::in_cone(&m, &a, &tol));
        prop_assert!(order::in_cone(&m, &(&a + &v), &tol));
        prop_assert!(order::in_cone(&m, &(&a - &v), &tol));
    }

    #[test]
    fn decomposition_is_orthogonal_and_norm_preserving(seed: u64, mi in 0usize..5) {
        let m = model(mi);
        let tol = Tolerance::default();
        let v = elements::gaussian_self_adjoint(&m, 1, &mut stream_rng(seed, "inv", 1));
        let (p, q) = order::pos_neg_parts(&m, &v).unwrap();
        let s = norm(&m, &v);
        prop_assert!(norm(&m, &(&(&p - &q) - &v)) <= 1e-12 * (1.0 + s));
        prop_assert!(order::perp(&m, &p, &q, &tol).unwrap());
        let a = order::abs_element(&m, &v).unwrap();
        prop_assert!((norm(&m, &a) - s).abs() <= 1e-12 * (1.0 + s));
        prop_assert!((norm(&m, &p).max(norm(&m, &q)) - s).abs() <= 1e-12 * (1.0 + s));
    }

    #[test]
    fn abs_is_absolutely_homogeneous(seed: u64, mi in 0usize..5, k in -3.0f64..3.0) {
        let m = model(mi);
        let v = elements::gaussian_self_adjoint(&m, 1, &mut stream_rng(seed, "inv", 2));
        let a = order::abs_element(&m, &v).unwrap();
        let b = order::abs_element(&m, &(&v * k)).unwrap();
        prop_assert!(norm(&m, &(&b - &(&a * k.abs()))) <= 1e-12 * (1.0 + k.abs() * norm(&m, &v)));
    }

    #[test]
    fn abs_fixes_the_cone(seed: u64, mi in 0usize..5) {
        let m = model(mi);
        let v = elements::random_psd(&m, 1, &mut stream_rng(seed, "inv", 3));
        let a = order::abs_element(&m, &v).unwrap();
        prop_assert!(norm(&m, &(&a - &v)) <= 1e-12 * (1.0 + norm(&m, &v)));
    }

    #[test]
    fn direct_sum_identity(seed: u64, mi in 0usize..3, shape in (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3)) {
        let m = hermitian(mi);
        let mut r = stream_rng(seed, "inv", 4);
        let v = elements::gaussian_element(&m, (shape.0, shape.1), &mut r);
        let w = elements::gaussian_element(&m, (shape.2, shape.3), &mut r);
        let joint = abs_mn(&m, &direct_sum(&v, &w)).unwrap();
        let split = direct_sum(&abs_mn(&m, &v).unwrap(), &abs_mn(&m, &w).unwrap());
        let s = linalg::operator_norm(v.coords()) + linalg::operator_norm(w.coords());
        prop_assert!(linalg::operator_norm((&joint - &split).coords()) <= 1e-11 * (1.0 + s));
    }

    #[test]
    fn isometries_leave_abs_unchanged(seed: u64, mi in 0usize..3, m_rows in 1usize..=3, extra in 0usize..=2, n in 1usize..=3) {
        let m = hermitian(mi);
        let mut r = stream_rng(seed, "inv", 5);
        let v = elements::gaussian_element(&m, (m_rows, n), &mut r);
        let alpha = elements::random_isometry(m_rows + extra, m_rows, &mut r);
        let a = abs_mn(&m, &left_mul(&m, &alpha, &v).unwrap()).unwrap();
        let b = abs_mn(&m, &v).unwrap();
        prop_assert!(linalg::operator_norm((&a - &b).coords()) <= 1e-11 * (1.0 + linalg::operator_norm(v.coords())));
    }

    #[test]
    fn rectangular_abs_is_positive(seed: u64, mi in 0usize..3, shape in (1usize..=3, 1usize..=3)) {
        let m = hermitian(mi);
        let v = elements::gaussian_element(&m, shape, &mut stream_rng(seed, "inv", 6));
        let a = abs_mn(&m, &v).unwrap();
        prop_assert_eq!(a.level(), (shape.1, shape.1));
        let lo = linalg::min_eigenvalue(a.coords());
        prop_assert!(lo >= -1e-12 * (1.0 + linalg::operator_norm(v.coords())));
    }

    #[test]
    fn orthogonal_pairs_reproduce_from_seed(seed: u64, mi in 0usize..5) {
        let m = model(mi);
        prop_assert_eq!(elements::gen_orthogonal_pair(&m, seed), elements::gen_orthogonal_pair(&m, seed));
    }

    #[test]
    fn generated_maps_reproduce_and_are_star_linear(seed: u64, i in 0usize..26) {
        let spec = &map_matrix(26, seed)[i];
        let (a, truth_a) = gen_map(spec).unwrap();
        let (b, truth_b) = gen_map(spec).unwrap();
        prop_assert_eq!(a.action(), b.action());
        prop_assert_eq!(truth_a, truth_b);
        prop_assert!(a.star_linear_verdict(&Tolerance::default()).passed());
    }

    #[test]
    fn amplification_acts_blockwise(seed: u64, i in 0usize..26) {
        let spec = &map_matrix(26, seed)[i];
        let (map, _) = gen_map(spec).unwrap();
        prop_assume!(map.supports_levels());
        let dom = map.domain();
        let mut r = stream_rng(seed, "inv", 7);
        let x = elements::gaussian_element(dom, (1, 1), &mut r);
        let y = elements::gaussian_element(dom, (1, 1), &mut r);
        let image = map.amplify(2).apply(&direct_sum(&x, &y));
        let expect = direct_sum(&map.apply(&x), &map.apply(&y));
        prop_assert!(linalg::max_entry((&image - &expect).coords()) <= 1e-12 * (1.0 + image.max_entry()));
    }

    #[test]
    fn block_trick_dominates_product_defect(seed: u64, i in 0usize..26) {
        let spec = &map_matrix(26, seed)[i];
        let (map, _) = gen_map(spec).unwrap();
        prop_assume!(map.supports_levels());
        let dom = map.domain();
        let mut r = stream_rng(seed, "inv", 8);
        let x = elements::gaussian_element(dom, (1, 1), &mut r);
        let y = elements::gaussian_element(dom, (1, 1), &mut r);
        let (trick, product) = block_trick_residuals(&map, &x, &y).unwrap();
        prop_assert!(trick + 1e-12 * (1.0 + product) >= product);
    }

    #[test]
    fn tolerance_rejects_nan(scale in 0.0f64..1e6) {
        let tol = Tolerance::default();
        prop_assert!(!tol.accepts(f64::NAN, scale));
        prop_assert!(tol.accepts(0.0, scale));
    }
}

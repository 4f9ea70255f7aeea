mod common;

use common::*;
use moment_core::moments::{self, MomentSequence, DEFAULT_PSD_TOL};
use moment_core::poly::monomials_up_to;
use moment_core::rational::{int, rat, to_f64};
use moment_core::{MultiIndex, Polynomial, Rational};
use num_traits::Signed;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn unit_point(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..=16).prop_map(|k| rat(k, 16)), dim)
}

fn atoms(dim: usize) -> impl Strategy<Value = Vec<(Vec<Rational>, Rational)>> {
    prop::collection::vec((unit_point(dim), (1i64..=8).prop_map(|k| rat(k, 8))), 1..=4)
}

fn polynomial(dim: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    let basis = monomials_up_to(dim, deg);
    prop::collection::vec(rational(), basis.len()).prop_map(move |c| {
        Polynomial::from_terms(dim, basis.clone().into_iter().zip(c)).unwrap()
    })
}

fn sequence(dim: usize, n: u32) -> impl Strategy<Value = MomentSequence> {
    let len = monomials_up_to(dim, n).len();
    prop::collection::vec(rational(), len).prop_map(move |v| {
        let basis = monomials_up_to(dim, n);
        MomentSequence::from_fn(dim, n, |e| {
            v[basis.iter().position(|b| b == e).unwrap()].clone()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn localization_consistency(s in sequence(2, 5), g in polynomial(2, 2), p in polynomial(2, 3)) {
        let shifted = s.shift(&g).unwrap();
        prop_assert_eq!(shifted.apply(&p).unwrap(), s.apply(&(&g * &p)).unwrap());
    }

    #[test]
    fn quadratic_form_identity(s in sequence(2, 6), g in polynomial(2, 2), p in polynomial(2, 2)) {
        let b = moments::localized_hankel(&s, &g, 2).unwrap();
        let v: Vec<Rational> = b.row_basis.iter().map(|e| p.coeff(e)).collect();
        prop_assert_eq!(b.quadratic_form(&v), s.apply(&(&g * &(&p * &p))).unwrap());
    }

    #[test]
    fn contraction_bound(a in atoms(2), g in polynomial(2, 3)) {
        let s = sequence_from_atoms(2, &a, 3);
        let sup = a.iter().map(|(pt, _)| g.eval(pt).unwrap().abs()).max().unwrap();
        prop_assert!(s.apply(&g).unwrap().abs() <= s.mass() * sup);
    }

    #[test]
    fn necessity_on_the_square(a in atoms(2)) {
        let s = sequence_from_atoms(2, &a, 6);
        let gens = [poly_d("x", 2), poly_d("1 - x", 2), poly_d("y", 2), poly_d("1 - y", 2)];
        let rep = moments::cone_positivity_check(&s, &gens, 2, DEFAULT_PSD_TOL).unwrap();
        prop_assert!(rep.all_psd);
    }

    #[test]
    fn hausdorff_accepts_inside_atoms(a in atoms(2)) {
        let s = sequence_from_atoms(2, &a, 6);
        prop_assert!(moments::hausdorff_check(&s, 6).accepted);
    }

    #[test]
    fn hausdorff_rejects_an_outside_atom(
        inside in atoms(1),
        delta in (4i64..=20).prop_map(|k| rat(k, 40)),
        left in any::<bool>(),
    ) {
        let mass: Rational = inside.iter().map(|a| a.1.clone()).sum();
        let x = if left { -delta } else { int(1) + delta };
        let mut all = inside.clone();
        all.push((vec![x], mass));
        let s = sequence_from_atoms(1, &all, 8);
        prop_assert!(!moments::hausdorff_check(&s, 8).accepted);
    }

    #[test]
    fn measure_json_round_trip(a in atoms(2)) {
        let m = measure(2, &a);
        let text = serde_json::to_string(&m).unwrap();
        prop_assert_eq!(serde_json::from_str::<moments::AtomicMeasure>(&text).unwrap(), m.clone());
        let s = MomentSequence::from_atomic_measure(&m, 4);
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<MomentSequence>(&text).unwrap(), s);
    }
}

#[test]
fn atomic_constructor_matches_direct_sums() {
    let a = vec![
        (vec![rat(1, 3), rat(2, 5)], rat(1, 4)),
        (vec![rat(-1, 2), int(1)], rat(3, 4)),
    ];
    let s = MomentSequence::from_atomic_measure(&measure(2, &a), 5);
    for e in monomials_up_to(2, 5) {
        assert_eq!(s.get(&e).unwrap(), &atomic_moment(&a, &e));
    }
}

#[test]
fn circle_moments_agree_with_quadrature() {
    for e in monomials_up_to(2, 10) {
        let (i, j) = (e.exponents()[0], e.exponents()[1]);
        let exact = to_f64(&circle_moment(&e));
        assert!((exact - circle_quadrature(i, j, 64)).abs() < 1e-14, "{e:?}");
    }
}

#[test]
fn circle_moments_pass_ball_and_sphere_checks() {
    let s = circle_sequence(8);
    let ball = [poly_d("1 - x^2 - y^2", 2)];
    assert!(moments::cone_positivity_check(&s, &ball, 3, DEFAULT_PSD_TOL).unwrap().all_psd);
    let v = moments::ideal_annihilation_check(&s, &poly_d("x^2 + y^2 - 1", 2), 3).unwrap();
    assert!(v.accepted);
    // The circle leaves the unit square.
    assert!(!moments::hausdorff_check(&s, 8).accepted);
}

#[test]
fn lebesgue_square_hankel_examples() {
    let s = lebesgue_cube(1, 4);
    let b = moments::localized_hankel(&s, &Polynomial::one(1), 2).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(b.matrix[i][j], rat(1, (i + j + 1) as i64));
        }
    }
    let x = moments::localized_hankel(&s, &poly_d("x", 1), 1).unwrap();
    assert_eq!(x.matrix, vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 3), rat(1, 4)]]);
}

#[test]
fn dirac_outside_interval_fails_localizer() {
    let s = sequence_from_atoms(1, &[(vec![int(2)], int(1))], 3);
    let rep = moments::cone_positivity_check(&s, &[poly_d("x", 1), poly_d("1 - x", 1)], 1, DEFAULT_PSD_TOL)
        .unwrap();
    assert!(!rep.all_psd);
    let bad = rep.blocks.iter().find(|b| !b.verdict.psd).unwrap();
    assert_eq!(bad.localizer, "1 - x1");
}

#[test]
fn truncation_is_reported() {
    let s = lebesgue_cube(2, 3);
    let e = moments::localized_hankel(&s, &poly_d("x", 2), 2).unwrap_err();
    assert!(e.to_string().contains("5"));
}

#[test]
fn shifted_sequence_is_the_localized_sequence() {
    let s = lebesgue_cube(2, 4);
    let g = poly_d("1 - x - y", 2);
    let t = s.shift(&g).unwrap();
    assert_eq!(t.max_degree(), 3);
    assert_eq!(t.mass(), &(int(1) - rat(1, 2) - rat(1, 2)));
    let e = MultiIndex::new(vec![1, 0]);
    assert_eq!(t.get(&e).unwrap(), &(rat(1, 2) - rat(1, 3) - rat(1, 4)));
}

mod common;

use common::*;
use moment_core::certs::{self, lp, Certificate, FarkasResult, PolyaResult, SearchResult};
use moment_core::rational::{int, rat};
use moment_core::{MultiIndex, Polynomial, Rational};
use num_traits::Signed;
use proptest::prelude::*;

fn triangle() -> Vec<Polynomial> {
    vec![poly_d("x", 2), poly_d("y", 2), poly_d("1 - x - y", 2)]
}

fn linear(c: &[Rational]) -> Polynomial {
    Polynomial::from_terms(
        2,
        vec![
            (MultiIndex::new(vec![0, 0]), c[0].clone()),
            (MultiIndex::new(vec![1, 0]), c[1].clone()),
            (MultiIndex::new(vec![0, 1]), c[2].clone()),
        ],
    )
    .unwrap()
}

fn json_round_trip(c: &Certificate) -> Certificate {
    serde_json::from_str(&serde_json::to_string(c).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Certified iff nonnegative at all three vertices.
    #[test]
    fn farkas_agrees_with_vertex_evaluation(c in prop::collection::vec((-6i64..=6, 1i64..=4), 3)) {
        let h = linear(&c.iter().map(|(n, d)| rat(*n, *d)).collect::<Vec<_>>());
        let vertices = [[0, 0], [1, 0], [0, 1]];
        let nonneg = vertices
            .iter()
            .all(|v| !h.eval(&[int(v[0]), int(v[1])]).unwrap().is_negative());
        match certs::farkas_certify(&h, &triangle()).unwrap() {
            FarkasResult::Certified(cert) => {
                prop_assert!(nonneg);
                prop_assert!(cert.verify());
                prop_assert_eq!(json_round_trip(&cert), cert);
            }
            FarkasResult::Infeasible => prop_assert!(!nonneg),
        }
    }

    /// Once the coefficients of `(x+y)^n f` are nonnegative they stay so.
    #[test]
    fn polya_monotone(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4) {
        let f = Polynomial::from_terms(
            2,
            vec![
                (MultiIndex::new(vec![2, 0]), int(a)),
                (MultiIndex::new(vec![1, 1]), int(b)),
                (MultiIndex::new(vec![0, 2]), int(c)),
            ],
        )
        .unwrap();
        if let PolyaResult::Certified { n, certificate } = certs::polya_certify(&f, 12).unwrap() {
            prop_assert!(certificate.verify());
            let s = poly_d("x + y", 2);
            for k in n..n + 4 {
                prop_assert!((&s.pow(k) * &f).has_nonneg_coefficients());
            }
            if n > 0 {
                prop_assert!(!(&s.pow(n - 1) * &f).has_nonneg_coefficients());
            }
        }
    }

    /// Any emitted Handelman certificate is sound; a certified `h` is
    /// nonnegative on the interval.
    #[test]
    fn handelman_soundness(a in -6i64..=6, b in -6i64..=6, c in -6i64..=6, d in 2u32..=5) {
        let h = Polynomial::from_terms(
            1,
            vec![
                (MultiIndex::new(vec![2]), int(a)),
                (MultiIndex::new(vec![1]), int(b)),
                (MultiIndex::new(vec![0]), int(c)),
            ],
        )
        .unwrap();
        if let SearchResult::Certified(cert) = certs::handelman_certify(&h, &[poly("x"), poly("1 - x")], d).unwrap() {
            prop_assert!(cert.verify());
            prop_assert!(!quadratic_min_on_unit(&int(a), &int(b), &int(c)).is_negative());
        }
    }
}

#[test]
fn lp_matches_brute_force() {
    let mut r = rng(99);
    for _ in 0..200 {
        let (n, rows, rhs) = random_lp(&mut r);
        let oracle = brute_force_feasible(&rows, &rhs, n);
        let p = lp::LinearProgram::feasibility(n, rows, rhs);
        match lp::solve(&p).unwrap() {
            lp::LpOutcome::Feasible { assignment, .. } => {
                assert!(oracle);
                assert!(p.is_feasible_point(&assignment));
            }
            lp::LpOutcome::Infeasible => assert!(!oracle),
            lp::LpOutcome::Unbounded => panic!("feasibility problem reported unbounded"),
        }
    }
}

#[test]
fn lp_objective_and_unbounded() {
    // min -x subject to x - y = 0, x, y >= 0 is unbounded.
    let mut p = lp::LinearProgram::feasibility(2, vec![vec![int(1), int(-1)]], vec![int(0)]);
    p.objective = Some(vec![int(-1), int(0)]);
    assert_eq!(lp::solve(&p).unwrap(), lp::LpOutcome::Unbounded);
    // min x + 2y subject to x + y = 3.
    let mut p = lp::LinearProgram::feasibility(2, vec![vec![int(1), int(1)]], vec![int(3)]);
    p.objective = Some(vec![int(1), int(2)]);
    match lp::solve(&p).unwrap() {
        lp::LpOutcome::Feasible { assignment, objective_value } => {
            assert_eq!(assignment, vec![int(3), int(0)]);
            assert_eq!(objective_value, Some(int(3)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn smodule_certificate_with_multiplier() {
    // 2 - x^2 = 1 + 1·(1 - x^2).
    let h = poly_d("2 - x^2", 1);
    let f = [poly_d("x", 1), poly_d("1 - x", 1)];
    let g = [poly_d("1 - x^2", 1)];
    let c = certs::smodule_certify(&h, &f, &g, 2).unwrap();
    let cert = c.certificate().expect("certified");
    assert!(cert.verify());
    assert_eq!(json_round_trip(cert), *cert);
}

#[test]
fn tampered_certificates_fail() {
    let c = certs::bernstein_identity(4).unwrap();
    let mut bad = c.clone();
    bad.terms[0].coeff += rat(1, 1000);
    assert!(!bad.verify());
    let mut bad = c.clone();
    bad.terms[0].coeff = -bad.terms[0].coeff.clone();
    assert!(!bad.verify());
    let mut bad = c;
    bad.multipliers[0] = poly_d("2", 1);
    assert!(!bad.verify());
}

#[test]
fn errors_on_bad_input() {
    assert!(certs::farkas_certify(&poly_d("x^2", 1), &[poly_d("x", 1)]).is_err());
    assert!(certs::polya_certify(&poly_d("x + 1", 1), 3).is_err());
    assert!(certs::bernstein_identity(1).is_err());
    assert!(certs::handelman_certify(&poly_d("x^3", 1), &[poly_d("x", 1)], 2).is_err());
}

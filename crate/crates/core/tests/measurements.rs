use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use std::f64::consts::PI;

use tempcorr::linalg::{hermitian_eigenvalues, ComplexVector, SquareMatrix};
use tempcorr::measurement::{
    bsm_scheme, measure_branches, mub_basis, outcome_probabilities, BsmType, MUB_COUNT,
};
use tempcorr::state::{generalized_bell_states, schmidt_state, DensityMatrix, Direction};
use tempcorr::verify::measurement_properties;

fn rank(p: &SquareMatrix) -> usize {
    hermitian_eigenvalues(p, 1e-12)
        .unwrap()
        .iter()
        .filter(|&&v| v > 0.5)
        .count()
}

fn ranks(t: BsmType, d: Direction) -> Vec<usize> {
    bsm_scheme(t, d)
        .branches()
        .iter()
        .map(|b| rank(&b.projector))
        .collect()
}

#[test]
fn projector_ranks() {
    let d = Direction::new(0.7, 2.1).unwrap();
    assert_eq!(ranks(BsmType::TypeI, d), vec![1, 1, 1, 1]);
    assert_eq!(ranks(BsmType::TypeII, d), vec![1, 3]);
    assert_eq!(ranks(BsmType::TypeIII, d), vec![2, 2]);
}

#[test]
fn eigenstate_is_left_undisturbed() {
    let d = Direction::new(1.1, 0.4).unwrap();
    let psi = generalized_bell_states(d).psi_plus.to_density();
    let res = measure_branches(&psi, &bsm_scheme(BsmType::TypeII, d));
    assert_eq!(res[0].outcome, 1);
    assert_abs_diff_eq!(res[0].probability, 1.0, epsilon = 1e-12);
    assert!(
        res[0]
            .post_state
            .unwrap()
            .matrix()
            .max_abs_diff(psi.matrix())
            < 1e-12
    );
    assert_eq!(res[1].outcome, -1);
    assert_abs_diff_eq!(res[1].probability, 0.0, epsilon = 1e-12);
    assert!(res[1].post_state.is_none());
}

#[test]
fn mixed_state_splits_evenly() {
    let d = Direction::new(2.0, 5.0).unwrap();
    let mixed = DensityMatrix::maximally_mixed();
    let res = measure_branches(&mixed, &bsm_scheme(BsmType::TypeIII, d));
    for r in &res {
        assert_abs_diff_eq!(r.probability, 0.5, epsilon = 1e-12);
        let post = r.post_state.unwrap();
        let ev = post.eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 0.0, 0.5, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }
}

#[test]
fn bell_state_at_north_pole() {
    let rho = schmidt_state(std::f64::consts::FRAC_1_SQRT_2)
        .unwrap()
        .to_density();
    let scheme = bsm_scheme(BsmType::TypeI, Direction::new(0.0, 0.0).unwrap());
    let bell = generalized_bell_states(Direction::new(0.0, 0.0).unwrap()).as_array();
    // Spell out probabilities in (psi+, psi-, phi+, phi-) order.
    let probs: Vec<f64> = bell
        .iter()
        .map(|s| {
            let p = s.vector().projector();
            let branch = scheme
                .branches()
                .iter()
                .find(|b| b.projector.max_abs_diff(&p) < 1e-12)
                .unwrap();
            branch.projector.trace_product_re(rho.matrix())
        })
        .collect();
    for (got, want) in probs.iter().zip([0.0, 0.0, 1.0, 0.0]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
    }
    let (plus, minus) = outcome_probabilities(&rho, &scheme);
    assert_abs_diff_eq!(plus, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(minus, 0.0, epsilon = 1e-12);
}

#[test]
fn mub_tables() {
    let m0 = mub_basis(0).unwrap();
    for (i, k) in m0.kets().iter().enumerate() {
        assert_eq!(*k, ComplexVector::basis(4, i).unwrap());
    }
    for i in 0..MUB_COUNT {
        let b = mub_basis(i).unwrap();
        for (x, u) in b.kets().iter().enumerate() {
            for (y, v) in b.kets().iter().enumerate() {
                let want = if x == y { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(u.inner(v).norm(), want, epsilon = 1e-12);
            }
        }
    }
    let (m1, m2) = (mub_basis(1).unwrap(), mub_basis(2).unwrap());
    for u in m1.kets() {
        for v in m2.kets() {
            assert_abs_diff_eq!(u.inner(v).norm_sqr(), 0.25, epsilon = 1e-12);
        }
    }
    assert!(mub_basis(5).is_err());
}

#[test]
fn measurement_suite() {
    for check in measurement_properties().unwrap() {
        assert!(check.passed, "{check}");
    }
}

#[test]
fn type_labels_round_trip() {
    for t in BsmType::ALL {
        assert_eq!(t.label().parse::<BsmType>().unwrap(), t);
    }
    assert!("IV".parse::<BsmType>().is_err());
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(theta in 0.0..=PI, phi in 0.0..(2.0 * PI), k1 in 0.0..=1.0f64) {
        let rho = schmidt_state(k1).unwrap().to_density();
        for t in BsmType::ALL {
            let res = measure_branches(&rho, &bsm_scheme(t, Direction::new(theta, phi).unwrap()));
            let total: f64 = res.iter().map(|r| r.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for r in res.iter().filter(|r| r.post_state.is_some()) {
                let post = r.post_state.unwrap();
                prop_assert!((post.matrix().trace().re - 1.0).abs() < 1e-12);
            }
        }
    }
}

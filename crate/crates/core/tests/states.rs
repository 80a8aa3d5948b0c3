use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use tempcorr::linalg::{ComplexVector, SquareMatrix, ONE};
use tempcorr::state::{
    generalized_bell_states, rotated_basis, schmidt_state, DensityMatrix, Direction, PureState,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn same_up_to_phase(a: &ComplexVector, b: &ComplexVector) -> bool {
    (a.inner(b).norm() - 1.0).abs() < 1e-12
}

#[test]
fn schmidt_examples() {
    let bell = schmidt_state(FRAC_1_SQRT_2).unwrap();
    let want = ComplexVector::new(&[c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)]).unwrap();
    assert!(bell.vector().max_abs_diff(&want) < 1e-15);

    let prod = schmidt_state(1.0).unwrap();
    assert_eq!(prod.vector(), &ComplexVector::basis(4, 0).unwrap());

    let s = schmidt_state(0.6).unwrap();
    assert_abs_diff_eq!(s.vector().get(0).re, 0.6, epsilon = 1e-15);
    assert_abs_diff_eq!(s.vector().get(3).re, 0.8, epsilon = 1e-15);

    assert!(schmidt_state(1.01).is_err());
    assert!(schmidt_state(-0.1).is_err());
    assert!(schmidt_state(f64::NAN).is_err());
}

#[test]
fn rotated_basis_examples() {
    let e0 = ComplexVector::basis(2, 0).unwrap();
    let e1 = ComplexVector::basis(2, 1).unwrap();
    for phi in [0.0, 1.0, 4.0] {
        let (a, b) = rotated_basis(Direction::new(0.0, phi).unwrap());
        assert!(a.max_abs_diff(&e0) < 1e-15 && b.max_abs_diff(&e1) < 1e-15);
    }
    let (a, b) = rotated_basis(Direction::new(PI, 0.0).unwrap());
    assert!(a.max_abs_diff(&e1) < 1e-15);
    assert!(b.max_abs_diff(&e0.scale(-ONE)) < 1e-15);

    let (a, b) = rotated_basis(Direction::new(PI / 2.0, 0.0).unwrap());
    let h = c(FRAC_1_SQRT_2);
    assert!(a.max_abs_diff(&ComplexVector::new(&[h, h]).unwrap()) < 1e-15);
    assert!(b.max_abs_diff(&ComplexVector::new(&[-h, h]).unwrap()) < 1e-15);
}

#[test]
fn direction_range() {
    assert!(Direction::new(-0.1, 0.0).is_err());
    assert!(Direction::new(PI + 0.1, 0.0).is_err());
    assert!(Direction::new(0.5, 7.0).is_err());
}

#[test]
fn computational_bell_states_at_north_pole() {
    let bell = generalized_bell_states(Direction::new(0.0, 0.0).unwrap());
    let h = c(FRAC_1_SQRT_2);
    let z = c(0.0);
    let want = [[z, h, h, z], [z, h, -h, z], [h, z, z, h], [h, z, z, -h]];
    for (s, w) in bell.as_array().iter().zip(want) {
        assert!(s.vector().max_abs_diff(&ComplexVector::new(&w).unwrap()) < 1e-15);
    }
}

#[test]
fn singlet_is_rotation_invariant() {
    let h = c(FRAC_1_SQRT_2);
    let singlet = ComplexVector::new(&[c(0.0), h, -h, c(0.0)]).unwrap();
    let bell = generalized_bell_states(Direction::new(PI / 2.0, 0.0).unwrap());
    assert!(same_up_to_phase(bell.psi_minus.vector(), &singlet));
}

#[test]
fn density_examples() {
    let d = schmidt_state(1.0).unwrap().to_density();
    let want = SquareMatrix::diagonal(&[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
    assert_eq!(d.matrix(), &want);

    let bell = schmidt_state(FRAC_1_SQRT_2).unwrap().to_density();
    for (r, col) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        assert_abs_diff_eq!(bell.matrix().get(r, col).re, 0.5, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(bell.matrix().get(1, 1).norm(), 0.0);
}

#[test]
fn density_validation() {
    let id = SquareMatrix::identity(4).unwrap();
    assert!(DensityMatrix::new(id).is_err());
    assert!(DensityMatrix::new(id.scale_real(0.25)).is_ok());
    let neg = SquareMatrix::diagonal(&[c(1.1), c(-0.1), c(0.0), c(0.0)]).unwrap();
    assert!(DensityMatrix::new(neg).is_err());
    assert!(
        PureState::new(ComplexVector::new(&[c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap()).is_err()
    );
}

proptest! {
    #[test]
    fn bell_states_orthonormal(theta in 0.0..=PI, phi in 0.0..(2.0 * PI)) {
        let bell = generalized_bell_states(Direction::new(theta, phi).unwrap()).as_array();
        for (i, a) in bell.iter().enumerate() {
            for (j, b) in bell.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.vector().inner(b.vector()) - c(want)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_density_spectrum(k1 in 0.0..=1.0f64) {
        let ev = schmidt_state(k1).unwrap().to_density().eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            prop_assert!((got - want).abs() < 1e-10);
        }
    }
}

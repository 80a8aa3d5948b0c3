//! Two-qubit pure states, density matrices and the rotated Bell basis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexVector, SquareMatrix, ONE, ZERO};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// A normalized two-qubit ket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState {
    vec: ComplexVector,
}

impl PureState {
    pub fn new(vec: ComplexVector) -> Result<Self> {
        if vec.dim() != 4 {
            return Err(Error::InvalidDimension(vec.dim()));
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} != 1")));
        }
        Ok(Self { vec })
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vec
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: self.vec.projector(),
        }
    }
}

/// A validated two-qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: SquareMatrix,
}

impl DensityMatrix {
    pub fn new(mat: SquareMatrix) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::InvalidDimension(mat.dim()));
        }
        validate(&mat)?;
        Ok(Self { mat })
    }

    /// Wraps a matrix produced by a trace-preserving operation on a valid
    /// state. Debug builds still run the full validation.
    pub(crate) fn from_trusted(mat: SquareMatrix) -> Self {
        debug_assert!(validate(&mat).is_ok(), "trusted state failed validation");
        Self { mat }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            mat: SquareMatrix::identity(4).expect("dim 4").scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat, HERMITIAN_TOL).expect("validated Hermitian")
    }

    /// Convex mixture `sum_i w_i rho_i`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState("mixture weights".into()));
        }
        let mut acc = SquareMatrix::zeros(4)?;
        for (w, rho) in parts {
            acc = acc + rho.mat.scale_real(*w);
        }
        Self::new(acc)
    }
}

fn validate(mat: &SquareMatrix) -> Result<()> {
    if !mat.is_finite() {
        return Err(Error::NonFinite("density matrix"));
    }
    let herm = mat.hermiticity_defect();
    if herm > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm));
    }
    let tr = mat.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} != 1")));
    }
    let min_eig = hermitian_eigenvalues(mat, HERMITIAN_TOL)?[0];
    if min_eig < -PSD_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min_eig:e}"
        )));
    }
    Ok(())
}

/// Measurement direction on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        Ok(Self {
            theta: check_range("theta", theta, 0.0, PI)?,
            phi: check_range("phi", phi, 0.0, 2.0 * PI)?,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// `k1|00> + k2|11>` with `k2 = sqrt(1 - k1^2)`.
pub fn schmidt_state(k1: f64) -> Result<PureState> {
    let k1 = check_range("k1", k1, 0.0, 1.0)?;
    let k2 = (1.0 - k1 * k1).sqrt();
    PureState::new(ComplexVector::new(&[
        Complex64::new(k1, 0.0),
        ZERO,
        ZERO,
        Complex64::new(k2, 0.0),
    ])?)
}

/// Eigenbasis `(|0_n>, |1_n>)` of `n·sigma` for the given direction.
pub fn rotated_basis(d: Direction) -> (ComplexVector, ComplexVector) {
    let (s, c) = (d.theta / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, d.phi);
    let ket0 = ComplexVector::new(&[Complex64::new(c, 0.0), e * s]).expect("finite");
    let ket1 = ComplexVector::new(&[-e.conj() * s, Complex64::new(c, 0.0)]).expect("finite");
    (ket0, ket1)
}

/// Bell states built on a shared rotated basis, both qubits along `d`.
#[derive(Clone, Copy, Debug)]
pub struct BellStates {
    pub psi_plus: PureState,
    pub psi_minus: PureState,
    pub phi_plus: PureState,
    pub phi_minus: PureState,
}

impl BellStates {
    /// In the order `(psi+, psi-, phi+, phi-)`.
    pub fn as_array(&self) -> [PureState; 4] {
        [self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus]
    }
}

pub fn generalized_bell_states(d: Direction) -> BellStates {
    let (k0, k1) = rotated_basis(d);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let kk = |a: &ComplexVector, b: &ComplexVector| a.kron(b).expect("2x2");
    let (v01, v10) = (kk(&k0, &k1), kk(&k1, &k0));
    let (v00, v11) = (kk(&k0, &k0), kk(&k1, &k1));
    let make = |a: &ComplexVector, b: &ComplexVector, sign: f64| {
        let v = a.try_add(&b.scale(ONE * sign)).expect("dim 4").scale(h);
        PureState::new(v).expect("rotated Bell state is normalized")
    };
    BellStates {
        psi_plus: make(&v01, &v10, 1.0),
        psi_minus: make(&v01, &v10, -1.0),
        phi_plus: make(&v00, &v11, 1.0),
        phi_minus: make(&v00, &v11, -1.0),
    }
}

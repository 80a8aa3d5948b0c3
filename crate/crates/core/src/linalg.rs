//! Dense complex linear algebra for the 2- and 4-dimensional spaces of one
//! and two qubits.
//!
//! Storage is a fixed 16-slot array, so every matrix is `Copy` and lives on
//! the stack. Basis ordering for two qubits is `|00>, |01>, |10>, |11>`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

const MAX_DIM: usize = 4;

/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

fn check_dim(dim: usize) -> Result<usize> {
    match dim {
        2 | 4 => Ok(dim),
        _ => Err(Error::InvalidDimension(dim)),
    }
}

/// Rejects NaN and infinite components.
pub fn finite_scalar(re: f64, im: f64) -> Result<ComplexScalar> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(Error::NonFinite("complex scalar"))
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: [Complex64; MAX_DIM * MAX_DIM],
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [ZERO; MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("matrix entry"));
        }
        m.data[..entries.len()].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &c)
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let mut m = Self::zeros(entries.len())?;
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let n = self.dim;
        let mut out = Self {
            dim: n,
            data: [ZERO; MAX_DIM * MAX_DIM],
        };
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }

    /// `self * m * self^dagger`, the building block of every Kraus map.
    pub fn sandwich(&self, m: &Self) -> Self {
        debug_assert_eq!(self.dim, m.dim);
        let left = self.mul_unchecked(m);
        let n = self.dim;
        let mut out = Self {
            dim: n,
            data: [ZERO; MAX_DIM * MAX_DIM],
        };
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += left.data[r * n + k] * self.data[c * n + k].conj();
                }
                out.data[r * n + c] = acc;
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Re Tr(self * rhs)` without forming the product.
    pub fn trace_product_re(&self, rhs: &Self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                let b = rhs.data[k * n + r];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let mut out = *self;
        out.data
            .iter_mut()
            .zip(rhs.data.iter())
            .for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let mut out = *self;
        out.data
            .iter_mut()
            .zip(rhs.data.iter())
            .for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// Kronecker product; the result must fit in dimension 4.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let dim = self.dim * rhs.dim;
        if dim > MAX_DIM {
            return Err(Error::InvalidDimension(dim));
        }
        let mut out = Self::zeros(dim)?;
        for ar in 0..self.dim {
            for ac in 0..self.dim {
                let a = self.get(ar, ac);
                for br in 0..rhs.dim {
                    for bc in 0..rhs.dim {
                        out.set(ar * rhs.dim + br, ac * rhs.dim + bc, a * rhs.get(br, bc));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        debug_assert_eq!(self.dim, rhs.dim);
        self.entries()
            .iter()
            .zip(rhs.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn same_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            })
        }
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator forms panic on dimension mismatch; use the `try_*`/`matmul`
// variants where the dimensions are not known statically.
impl Mul for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.mul_unchecked(&rhs)
    }
}

impl Add for SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: SquareMatrix) -> SquareMatrix {
        self.try_add(&rhs).expect("matrix dimension mismatch")
    }
}

impl Sub for SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: SquareMatrix) -> SquareMatrix {
        self.try_sub(&rhs).expect("matrix dimension mismatch")
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexVector {
    dim: usize,
    data: [Complex64; MAX_DIM],
}

impl ComplexVector {
    pub fn new(entries: &[Complex64]) -> Result<Self> {
        let dim = check_dim(entries.len())?;
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("vector entry"));
        }
        let mut data = [ZERO; MAX_DIM];
        data[..dim].copy_from_slice(entries);
        Ok(Self { dim, data })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::BadIndex {
                index,
                max: dim - 1,
            });
        }
        let mut data = [ZERO; MAX_DIM];
        data[index] = ONE;
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data[..self.dim]
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    /// `<self|rhs>`, conjugate-linear in `self`.
    pub fn inner(&self, rhs: &Self) -> Complex64 {
        self.entries()
            .iter()
            .zip(rhs.entries())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let mut out = *self;
        out.data
            .iter_mut()
            .zip(rhs.data.iter())
            .for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.try_add(&rhs.scale(-ONE))
    }

    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let dim = self.dim * rhs.dim;
        if dim > MAX_DIM {
            return Err(Error::InvalidDimension(dim));
        }
        let mut data = [ZERO; MAX_DIM];
        for i in 0..self.dim {
            for j in 0..rhs.dim {
                data[i * rhs.dim + j] = self.data[i] * rhs.data[j];
            }
        }
        Ok(Self { dim, data })
    }

    /// `|self><rhs|`.
    pub fn outer(&self, rhs: &Self) -> SquareMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        let mut m = SquareMatrix {
            dim: self.dim,
            data: [ZERO; MAX_DIM * MAX_DIM],
        };
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.set(r, c, self.data[r] * rhs.data[c].conj());
            }
        }
        m
    }

    pub fn projector(&self) -> SquareMatrix {
        self.outer(self)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(rhs.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries()).finish()
    }
}

impl Mul<&ComplexVector> for &SquareMatrix {
    type Output = ComplexVector;
    fn mul(self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim, v.dim, "matrix/vector dimension mismatch");
        let mut data = [ZERO; MAX_DIM];
        for (r, out) in data.iter_mut().enumerate().take(self.dim) {
            *out = (0..self.dim).map(|c| self.get(r, c) * v.data[c]).sum();
        }
        ComplexVector { dim: v.dim, data }
    }
}

/// Pauli matrices indexed 0..=3, with index 0 the identity.
pub fn pauli(index: usize) -> SquareMatrix {
    let e: [Complex64; 4] = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {index} out of range"),
    };
    SquareMatrix::from_row_major(2, &e).expect("static Pauli table")
}

fn off_diagonal_norm(m: &SquareMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += m.get(r, c).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns ascending eigenvalues and the unitary whose columns are the
/// matching eigenvectors.
pub fn hermitian_eigen(a: &SquareMatrix, tol: f64) -> Result<(Vec<f64>, SquareMatrix)> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entry"));
    }
    let defect = a.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    let n = a.dim();
    // Symmetrize so rounding noise below `tol` cannot stall the sweep.
    let mut m = (*a + a.adjoint()).scale_real(0.5);
    let mut v = SquareMatrix::identity(n)?;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) < JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                // Remove the phase of the pivot, then rotate in the real plane.
                let phase = apq / mag;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                let mut rot = SquareMatrix::identity(n)?;
                rot.set(p, p, Complex64::new(c, 0.0));
                rot.set(p, q, Complex64::new(s, 0.0));
                rot.set(q, p, -phase.conj() * s);
                rot.set(q, q, phase.conj() * c);
                m = rot.adjoint().mul_unchecked(&m).mul_unchecked(&rot);
                v = v.mul_unchecked(&rot);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re));
    let values = order.iter().map(|&i| m.get(i, i).re).collect();
    let mut vectors = SquareMatrix::zeros(n)?;
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }
    Ok((values, vectors))
}

/// Ascending real eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &SquareMatrix, tol: f64) -> Result<Vec<f64>> {
    hermitian_eigen(a, tol).map(|(values, _)| values)
}

//! Dense complex operators for small-dimension verification.
//!
//! Everything here is brute force on explicit matrices: it exists so the
//! rank-one engines have an independent reference to be checked against.
//! Dense paths are capped at dim 4096; larger requests are rejected rather
//! than silently attempted.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerance;
use crate::C64;

/// Explicit dim x dim complex matrix, entries addressed as (row, column).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    mat: DMatrix<C64>,
}

impl DenseOperator {
    /// Builds an operator from an entry function, validating finiteness.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        check_dim(dim)?;
        let mat = DMatrix::from_fn(dim, dim, |i, j| f(i, j));
        let op = Self { mat };
        op.check_finite()?;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            mat: DMatrix::identity(dim, dim),
        })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            mat: DMatrix::zeros(dim, dim),
        })
    }

    /// Rank-one projector |v><v| onto a (not necessarily normalized) vector.
    pub fn projector(v: &[C64]) -> Result<Self> {
        check_dim(v.len())?;
        let v = DVector::from_column_slice(v);
        let norm2 = v.norm_squared();
        if !(norm2.is_finite() && norm2 > 0.0) {
            return Err(Error::NonFinite {
                context: "projector vector",
            });
        }
        let mat = &v * v.adjoint() / C64::new(norm2, 0.0);
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub(crate) fn from_matrix(mat: DMatrix<C64>) -> Self {
        Self { mat }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            mat: &self.mat * factor,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat - &other.mat,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat * &other.mat,
        })
    }

    /// Commutator [A, B] = AB - BA.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat * &other.mat - &other.mat * &self.mat,
        })
    }

    /// A^k by binary exponentiation.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.mat.clone();
        let mut acc = DMatrix::identity(self.dim(), self.dim());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Self { mat: acc }
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        let out = &self.mat * DVector::from_column_slice(v);
        Ok(out.iter().copied().collect())
    }

    /// Largest deviation from entrywise Hermitian symmetry.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_asymmetry() <= tol
    }

    /// ||A'A - I||, zero for a unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        let dim = self.dim();
        operator_norm_matrix(&(gram - DMatrix::<C64>::identity(dim, dim)))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    fn check_finite(&self) -> Result<()> {
        if self.mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                context: "matrix entries",
            })
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidInput {
            what: "operator dimension",
            detail: "dim must be >= 1".into(),
        });
    }
    if dim > tolerance::MAX_DENSE_DIM {
        return Err(Error::DimTooLarge {
            dim,
            max: tolerance::MAX_DENSE_DIM,
        });
    }
    Ok(())
}

fn operator_norm_matrix(m: &DMatrix<C64>) -> f64 {
    m.singular_values().max()
}

/// Operator norm max_{||x||=1} ||Ax||, i.e. the largest singular value.
pub fn operator_norm(a: &DenseOperator) -> Result<f64> {
    a.check_finite()?;
    Ok(operator_norm_matrix(&a.mat))
}

/// Unitary e^{-iHt} of a Hermitian H, via eigendecomposition.
pub fn hermitian_expm(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    if !t.is_finite() {
        return Err(Error::NonFinite { context: "time t" });
    }
    h.check_finite()?;
    let asymmetry = h.hermitian_asymmetry();
    if asymmetry > tolerance::EXACT_ALGEBRA {
        return Err(Error::NotHermitian { asymmetry });
    }
    // Symmetrize so the eigensolver sees an exactly Hermitian matrix.
    let sym = (&h.mat + h.mat.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|w| (-C64::i() * w * t).exp()));
    let mat = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    Ok(DenseOperator { mat })
}

/// Operator-norm distance ||A - B|| between two transformations.
pub fn unitary_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    operator_norm(&a.sub(b)?)
}

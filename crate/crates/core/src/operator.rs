//! Dense complex operators on the finite-dimensional model spaces.
//!
//! Dimensions are `q` or `q^2`, so plain dense storage and cubic
//! multiplication are more than adequate.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("operator dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// A square complex matrix with the handful of operations the models need.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: Array2<Complex64>,
}

impl Operator {
    pub fn from_matrix(mat: Array2<Complex64>) -> Operator {
        assert_eq!(mat.nrows(), mat.ncols(), "operators are square");
        Operator { mat }
    }

    pub fn zeros(dim: usize) -> Operator {
        Operator { mat: Array2::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Operator {
        Operator { mat: Array2::eye(dim) }
    }

    /// Build from an entry function `(row, col) -> value`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Operator {
        Operator { mat: Array2::from_shape_fn((dim, dim), |(i, j)| f(i, j)) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator, OperatorError> {
        if self.dim() != other.dim() {
            return Err(OperatorError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Operator { mat: self.mat.dot(&other.mat) })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator {
        Operator { mat: self.mat.t().mapv(|z| z.conj()) }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.diag().sum()
    }

    pub fn scale(&self, s: Complex64) -> Operator {
        Operator { mat: self.mat.mapv(|z| z * s) }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator, OperatorError> {
        if self.dim() != other.dim() {
            return Err(OperatorError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Operator { mat: &self.mat + &other.mat })
    }

    /// Largest entry magnitude of `self - other`.
    pub fn distance(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let mut m = 0.0f64;
        for (x, y) in self.mat.iter().zip(other.mat.iter()) {
            m = m.max((x - y).norm());
        }
        m
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise residual of `T T* = I`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.compose(&self.adjoint()).expect("same dim");
        prod.distance(&Operator::identity(self.dim()))
    }

    pub fn is_unitary(&self, tolerance: f64) -> bool {
        self.unitarity_defect() < tolerance
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        self.mat
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }
}

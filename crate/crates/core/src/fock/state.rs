use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{FockBasis, HaarSampler};
use crate::error::{Error, Result};

/// Complex amplitudes over a [`FockBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::domain(format!(
                "state has {} amplitudes but the basis has {} states",
                amplitudes.len(),
                basis.len()
            )));
        }
        Ok(StateVector { basis, amplitudes })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Density matrix over a [`FockBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    basis: Arc<FockBasis>,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(basis: Arc<FockBasis>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = basis.len();
        if matrix.shape() != (n, n) {
            return Err(Error::domain(format!(
                "density matrix is {:?} but the basis has {n} states",
                matrix.shape()
            )));
        }
        Ok(DensityOperator { basis, matrix })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = state.amplitudes();
        let norm2 = v.norm_squared();
        DensityOperator {
            basis: Arc::clone(state.basis()),
            matrix: v * v.adjoint() / Complex64::from(norm2),
        }
    }

    pub fn maximally_mixed(basis: Arc<FockBasis>) -> Self {
        let n = basis.len();
        DensityOperator {
            basis,
            matrix: DMatrix::identity(n, n) / Complex64::from(n as f64),
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest entry of `|rho - rho^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::from(0.5);
        h.symmetric_eigenvalues().min()
    }

    /// Errors unless the operator is Hermitian, unit-trace and positive to
    /// the given tolerances.
    pub fn validate(&self, tol: f64, eigen_floor: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        let tr = self.trace();
        let min = self.min_eigenvalue();
        if herm > tol || (tr - Complex64::from(1.0)).norm() > tol || min < eigen_floor {
            return Err(Error::domain(format!(
                "not a density operator: hermiticity {herm:e}, trace {tr}, min eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// Hilbert-Schmidt (Frobenius) distance.
    pub fn distance(&self, other: &DensityOperator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

/// Normalized complex Gaussian vector of length `dim`, drawn from the named
/// stream of `seed`.
pub fn random_amplitudes(dim: usize, seed: u64, stream: u64) -> DVector<Complex64> {
    let mut rng = HaarSampler::rng(seed, stream, u64::MAX);
    let v = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / Complex64::from(n)
}

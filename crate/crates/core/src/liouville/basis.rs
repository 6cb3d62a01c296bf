// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

//! Orthonormal Hermitian operator basis and the real coefficient
//! representation of Hermitian operators built on it.

use nalgebra::{Complex, DMatrix, DVector};

use super::{CMatrix, LiouvilleVector, Superoperator};
use crate::error::{Error, Result};

/// Tolerance on the anti-Hermitian part accepted by [`HermitianBasis::vectorize`].
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance on trace and minimum eigenvalue for density matrices.
pub const STATE_TOL: f64 = 1e-10;

/// `N²` Hermitian `N×N` matrices orthonormal under `Tr[σᵢσⱼ]`.
///
/// Element 0 is always `I/√N`, so the trace functional `⟨1|` has a single
/// nonzero coordinate. The remaining elements are the generalized Gell-Mann
/// matrices: for every pair `j < k` a symmetric and an antisymmetric
/// off-diagonal element, followed by the `N−1` diagonal ones.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim;
        let zero = Complex::new(0.0, 0.0);
        let mut elements = Vec::with_capacity(n * n);

        let inv_sqrt_n = 1.0 / (n as f64).sqrt();
        elements.push(CMatrix::identity(n, n) * Complex::new(inv_sqrt_n, 0.0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..n {
            for k in (j + 1)..n {
                let mut sym = CMatrix::from_element(n, n, zero);
                sym[(j, k)] = Complex::new(s, 0.0);
                sym[(k, j)] = Complex::new(s, 0.0);
                elements.push(sym);

                let mut anti = CMatrix::from_element(n, n, zero);
                anti[(j, k)] = Complex::new(0.0, -s);
                anti[(k, j)] = Complex::new(0.0, s);
                elements.push(anti);
            }
        }
        for l in 1..n {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = CMatrix::from_element(n, n, zero);
            for j in 0..l {
                diag[(j, j)] = Complex::new(norm, 0.0);
            }
            diag[(l, l)] = Complex::new(-(l as f64) * norm, 0.0);
            elements.push(diag);
        }
        Ok(Self { dim, elements })
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Liouville-space dimension `N²`.
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Position of the `I/√N` element.
    pub fn trace_index(&self) -> usize {
        0
    }

    /// Largest deviation of the Gram matrix `Tr[σᵢσⱼ]` from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let g = trace_product(a, b);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// The trace functional `⟨1|`, coefficients of the identity operator.
    pub fn identity(&self) -> LiouvilleVector {
        let mut v = DVector::zeros(self.size());
        v[self.trace_index()] = (self.dim as f64).sqrt();
        LiouvilleVector::new(v)
    }

    /// Coefficients `Oᵢ = Tr[σᵢ Ô]` of a Hermitian operator.
    pub fn vectorize(&self, op: &CMatrix) -> Result<LiouvilleVector> {
        self.check_shape(op)?;
        let anti = anti_hermitian_norm(op);
        if anti > HERMITICITY_TOL {
            return Err(Error::NotHermitian(anti));
        }
        Ok(self.vectorize_unchecked(op))
    }

    /// Real parts of `Tr[σᵢ X]` for any square `X`; exact for Hermitian `X`.
    pub(crate) fn vectorize_unchecked(&self, op: &CMatrix) -> LiouvilleVector {
        let coeffs = DVector::from_iterator(
            self.size(),
            self.elements.iter().map(|s| trace_product(s, op).re),
        );
        LiouvilleVector::new(coeffs)
    }

    /// Inverse of [`vectorize`](Self::vectorize): `Ô = Σᵢ Oᵢ σᵢ`.
    pub fn devectorize(&self, v: &LiouvilleVector) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        for (c, s) in v.coeffs().iter().zip(&self.elements) {
            out += s * Complex::new(*c, 0.0);
        }
        out
    }

    /// Vectorizes a density matrix after checking trace one and positivity.
    pub fn density(&self, rho: &CMatrix) -> Result<LiouvilleVector> {
        validate_density(rho)?;
        self.vectorize(rho)
    }

    /// Real matrix `𝕃ᵢⱼ = Tr[σᵢ 𝕃(σⱼ)]` of a Hermiticity-preserving map.
    pub fn superoperator(&self, action: impl Fn(&CMatrix) -> CMatrix) -> Superoperator {
        let d = self.size();
        let mut m = DMatrix::zeros(d, d);
        for (j, sj) in self.elements.iter().enumerate() {
            let image = action(sj);
            for (i, si) in self.elements.iter().enumerate() {
                m[(i, j)] = trace_product(si, &image).re;
            }
        }
        Superoperator::new(m)
    }

    pub(crate) fn check_shape(&self, op: &CMatrix) -> Result<()> {
        if op.nrows() != self.dim || op.ncols() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                found: op.nrows().max(op.ncols()),
            });
        }
        Ok(())
    }

    pub(crate) fn check_vector(&self, v: &LiouvilleVector) -> Result<()> {
        if v.len() != self.size() {
            return Err(Error::Shape {
                expected: self.size(),
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// `Tr[A B]` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex<f64> {
    let n = a.nrows();
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Frobenius norm of `(A − A†)/2`.
pub(crate) fn anti_hermitian_norm(a: &CMatrix) -> f64 {
    ((a - a.adjoint()) * Complex::new(0.5, 0.0)).norm()
}

/// Checks Hermiticity, unit trace and positivity of a density matrix.
pub fn validate_density(rho: &CMatrix) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::InvalidState("matrix is not square".into()));
    }
    let anti = anti_hermitian_norm(rho);
    if anti > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "not Hermitian (anti-Hermitian part {anti:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr - Complex::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
    }
    let herm = (rho + rho.adjoint()) * Complex::new(0.5, 0.0);
    let min_eig = herm
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -STATE_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min_eig:.3e}"
        )));
    }
    Ok(())
}

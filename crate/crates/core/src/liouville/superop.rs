// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{Complex, DMatrix};

use super::basis::anti_hermitian_norm;
use super::{validate_density, CMatrix, HermitianBasis, Superoperator, HERMITICITY_TOL};
use crate::error::{Error, Result};

/// `ρ ↦ −i[H, ρ]` (ħ = 1, `H` in angular-frequency units).
///
/// The resulting matrix is antisymmetric, i.e. it generates an orthogonal
/// flow on the coefficient vector.
pub fn hamiltonian_superop(h: &CMatrix, basis: &HermitianBasis) -> Result<Superoperator> {
    basis.check_shape(h)?;
    let anti = anti_hermitian_norm(h);
    if anti > HERMITICITY_TOL {
        return Err(Error::NotHermitian(anti));
    }
    let minus_i = Complex::new(0.0, -1.0);
    Ok(basis.superoperator(|x| (h * x - x * h) * minus_i))
}

/// Lindblad dissipator `γ(LρL† − ½{L†L, ρ})` for one jump operator.
pub fn lindblad_superop(
    jump: &CMatrix,
    rate: f64,
    basis: &HermitianBasis,
) -> Result<Superoperator> {
    basis.check_shape(jump)?;
    if rate < 0.0 {
        return Err(Error::NegativeRate(rate));
    }
    if rate == 0.0 {
        return Ok(Superoperator::zeros(basis.size()));
    }
    let jd = jump.adjoint();
    let jdj = &jd * jump;
    let half = Complex::new(0.5, 0.0);
    let g = Complex::new(rate, 0.0);
    Ok(basis.superoperator(|x| (jump * x * &jd - (&jdj * x + x * &jdj) * half) * g))
}

/// Collision channel `ρ ↦ ρₖ − ρ` toward the target state `ρₖ`.
///
/// Stored as the linear map `−𝕀 + |ρₖ⟩⟨1|`, which agrees with the affine
/// action on every trace-one vector and leaves the trace row at zero.
pub fn collision_superop(target: &CMatrix, basis: &HermitianBasis) -> Result<Superoperator> {
    basis.check_shape(target)?;
    validate_density(target)?;
    let rho_k = basis.vectorize(target)?;
    let one = basis.identity();
    let d = basis.size();
    let m = -DMatrix::<f64>::identity(d, d) + rho_k.coeffs() * one.coeffs().transpose();
    Ok(Superoperator::new(m))
}

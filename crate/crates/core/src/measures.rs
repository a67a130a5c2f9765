//! Concurrence, negativity, entanglement of formation and participation ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, kron, partial_transpose, pauli_y, ComplexMatrix};
use crate::states::DensityMatrix;

/// Allowed `‖M M† − ρ‖_F` for a user-supplied square-root factor.
pub const FACTOR_TOL: f64 = 1e-10;

/// `σ_y ⊗ σ_y`.
pub fn sigma_yy() -> ComplexMatrix {
    kron(&pauli_y(), &pauli_y())
}

/// `Q = Mᵀ (σ_y⊗σ_y) M` for a factor `M` with `M M† = ρ`.
///
/// `M` may be 4×k for any k; the singular values of `Q` do not depend on which
/// factor is used.
pub fn q_matrix(rho: &DensityMatrix, factor: &ComplexMatrix) -> Result<ComplexMatrix> {
    if factor.rows() != 4 {
        return Err(Error::Dimension {
            expected: "4 rows".into(),
            got: format!("{} rows", factor.rows()),
        });
    }
    let residual = (&(factor * &factor.adjoint()) - rho.matrix()).frobenius_norm();
    if residual.is_nan() || residual > FACTOR_TOL {
        return Err(Error::InconsistentFactor { residual });
    }
    Ok(q_unchecked(factor))
}

fn q_unchecked(factor: &ComplexMatrix) -> ComplexMatrix {
    &(&factor.transpose() * &sigma_yy()) * factor
}

/// `max(0, σ1 − σ2 − σ3 − σ4)` over the descending singular values of `q`.
pub fn concurrence_from_q(q: &ComplexMatrix) -> f64 {
    let sv = linalg::svd(q).singular_values;
    let (first, rest) = sv.split_first().expect("non-empty Q");
    (first - rest.iter().sum::<f64>()).max(0.0)
}

/// Wootters concurrence, using the Hermitian square root of `ρ` as the factor.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let root = linalg::psd_sqrt_clamped(rho.matrix());
    concurrence_from_q(&q_unchecked(&root))
}

/// `max(0, −2 λ_min(ρ^{T_B}))`.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    let pt = partial_transpose(rho.matrix()).expect("density matrices are 4x4");
    let min = linalg::herm_eig_unchecked(&pt).eigenvalues[0];
    (-2.0 * min).max(0.0)
}

/// Binary entropy (bits) of `μ = (1 ± √(1 − C²))/2`.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&c) {
        return Err(Error::OutOfRange {
            what: "concurrence",
            value: c,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let c = c.clamp(0.0, 1.0);
    let root = (1.0 - c * c).sqrt();
    let mu1 = 0.5 * (1.0 + root);
    let mu2 = 0.5 * (1.0 - root);
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok((h(mu1) + h(mu2)).clamp(0.0, 1.0))
}

pub fn entanglement_of_formation(rho: &DensityMatrix) -> f64 {
    eof_from_concurrence(concurrence(rho)).expect("concurrence lies in [0, 1]")
}

/// `1 / Tr ρ²`.
pub fn participation_ratio(rho: &DensityMatrix) -> f64 {
    1.0 / rho.purity()
}

/// Spectrum of the partial transpose of a pure state with Schmidt pair
/// `(σ1, σ2)`: `{σ1², σ1σ2, −σ1σ2, σ2²}`.
pub fn pure_negativity_spectrum(sigma1: f64, sigma2: f64) -> Result<[f64; 4]> {
    const TOL: f64 = 1e-12;
    let valid =
        sigma2 >= 0.0 && sigma1 >= sigma2 && (sigma1 * sigma1 + sigma2 * sigma2 - 1.0).abs() <= TOL;
    if !valid {
        return Err(Error::InvalidSchmidtPair { sigma1, sigma2 });
    }
    Ok([
        sigma1 * sigma1,
        sigma1 * sigma2,
        -sigma1 * sigma2,
        sigma2 * sigma2,
    ])
}

/// The four measures of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub negativity: f64,
    pub eof: f64,
    pub participation_ratio: f64,
}

pub fn report(rho: &DensityMatrix) -> EntanglementReport {
    let c = concurrence(rho);
    EntanglementReport {
        concurrence: c,
        negativity: negativity(rho),
        eof: eof_from_concurrence(c).expect("concurrence lies in [0, 1]"),
        participation_ratio: participation_ratio(rho),
    }
}

//! Two-qubit states: containers, reshaping, sampling and the generator for
//! states whose concurrence equals their negativity.
//!
//! Basis ordering is `|00⟩, |01⟩, |10⟩, |11⟩`, i.e. composite index
//! `(ii') = 2i + i'` with the first qubit major.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::Spectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, kron, ComplexMatrix, HERMITIAN_TOL, PSD_TOL};
use crate::rng::{Seed, Stream};

/// Tolerance on `Tr ρ = 1`.
pub const TRACE_TOL: f64 = 1e-12;
/// Tolerance on `‖ψ‖ = 1`.
pub const NORM_TOL: f64 = 1e-12;
/// Unitarity tolerance for local operations.
pub const UNITARY_TOL: f64 = 1e-12;
/// Schmidt coefficients at or below this are treated as zero.
pub const SCHMIDT_FLOOR: f64 = 1e-10;
/// Phase-insensitive overlap threshold used by [`ensemble_eigvec_condition`].
pub const EIGVEC_TOL: f64 = 1e-8;

/// Two-qubit density matrix: 4×4, Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates `m` and stores its Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::Dimension {
                expected: "4x4".into(),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = m.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let h = m.hermitian_part();
        let trace = h.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotUnit { trace });
        }
        let min = linalg::herm_eig(&h)?.eigenvalues[0];
        if min < -PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self(h))
    }

    /// `G G† / Tr(G G†)` for any nonzero 4×k factor. Valid by construction.
    pub fn from_factor(g: &ComplexMatrix) -> Self {
        assert_eq!(g.rows(), 4, "factor must have 4 rows");
        let m = g * &g.adjoint();
        let tr = m.trace().re;
        Self(m.scale_real(1.0 / tr).hermitian_part())
    }

    /// Convex combination `(1-t)·self + t·other`, `t ∈ [0, 1]`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&t));
        Self(&self.0.scale_real(1.0 - t) + &other.0.scale_real(t))
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix::identity(4).scale_real(0.25))
    }

    /// `|Φ+⟩⟨Φ+|` with `Φ+ = (|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        Self::from_pure(&PureState::bell())
    }

    /// Werner state `p |Φ+⟩⟨Φ+| + (1-p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                what: "werner weight",
                value: p,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Self::maximally_mixed().mix(&Self::bell(), p))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = ComplexMatrix::column(psi.psi());
        Self(&v * &v.adjoint())
    }

    /// Diagonal state with the given spectrum.
    pub fn diagonal(spectrum: &Spectrum) -> Self {
        Self(ComplexMatrix::diag_real(spectrum.values()))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::herm_eig_unchecked(&self.0).eigenvalues
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Conjugation by a unitary: `W ρ W†`.
    pub(crate) fn conjugated(&self, w: &ComplexMatrix) -> Self {
        Self((&(w * &self.0) * &w.adjoint()).hermitian_part())
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Normalized two-qubit state vector together with its 2×2 reshape.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    psi: [Complex64; 4],
    tilde: ComplexMatrix,
}

impl PureState {
    pub fn new(psi: [Complex64; 4]) -> Result<Self> {
        if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let tilde = reshape_to_matrix(&psi)?;
        Ok(Self { psi, tilde })
    }

    /// Normalizes `psi` first. Fails on the zero vector.
    pub fn normalized(psi: [Complex64; 4]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(psi.map(|z| z / norm))
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let s = Complex64::new(0.5f64.sqrt(), 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self::new([s, z, z, s]).expect("normalized")
    }

    pub fn psi(&self) -> &[Complex64; 4] {
        &self.psi
    }

    /// `ψ̃` with `ψ̃_{ii'} = ψ_{(ii')}`.
    pub fn tilde(&self) -> &ComplexMatrix {
        &self.tilde
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Row index = first qubit, column index = second qubit.
pub fn reshape_to_matrix(psi: &[Complex64]) -> Result<ComplexMatrix> {
    if psi.len() != 4 {
        return Err(Error::Dimension {
            expected: "length 4".into(),
            got: format!("length {}", psi.len()),
        });
    }
    ComplexMatrix::from_row_major(2, 2, psi.to_vec())
}

/// Inverse of [`reshape_to_matrix`].
pub fn flatten(tilde: &ComplexMatrix) -> Result<[Complex64; 4]> {
    if tilde.rows() != 2 || tilde.cols() != 2 {
        return Err(Error::Dimension {
            expected: "2x2".into(),
            got: format!("{}x{}", tilde.rows(), tilde.cols()),
        });
    }
    let s = tilde.as_slice();
    Ok([s[0], s[1], s[2], s[3]])
}

/// Schmidt coefficients `(σ1, σ2)`, `σ1 ≥ σ2 ≥ 0`: the singular values of `ψ̃`.
pub fn schmidt(psi: &PureState) -> (f64, f64) {
    let sv = linalg::svd(psi.tilde()).singular_values;
    (sv[0], sv[1])
}

/// Weighted pure-state decomposition `ρ = Σ p_i |φ^i⟩⟨φ^i|`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<PureState>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, members: Vec<PureState>) -> Result<Self> {
        if weights.len() != members.len() || weights.is_empty() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} members",
                weights.len(),
                members.len()
            )));
        }
        if weights.iter().any(|&p| !p.is_finite() || p <= 0.0) {
            return Err(Error::InvalidEnsemble("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { weights, members })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Σ p_i |φ^i⟩⟨φ^i|`.
    pub fn density(&self) -> Result<DensityMatrix> {
        let mut acc = ComplexMatrix::zeros(4, 4);
        for (p, m) in self.weights.iter().zip(&self.members) {
            acc = &acc + &m.density().matrix().scale_real(*p);
        }
        DensityMatrix::new(acc)
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `rows × cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unit vector in C^4.
pub fn sample_pure<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        let v = [(); 4].map(|_| complex_gaussian(rng));
        if let Ok(p) = PureState::normalized(v) {
            return p;
        }
    }
}

/// Haar unitary: Gram–Schmidt on the columns of a Ginibre matrix. Gram–Schmidt
/// yields the QR factor with positive real diagonal, which is the phase-corrected
/// QR that makes the distribution exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, n, n);
        let mut q = ComplexMatrix::zeros(n, n);
        let mut ok = true;
        for j in 0..n {
            let mut w = g.col(j);
            for _ in 0..2 {
                for k in 0..j {
                    let proj: Complex64 = (0..n).map(|i| q[(i, k)].conj() * w[i]).sum();
                    for (i, wi) in w.iter_mut().enumerate() {
                        *wi -= proj * q[(i, k)];
                    }
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                ok = false;
                break;
            }
            for (i, wi) in w.iter().enumerate() {
                q[(i, j)] = wi / norm;
            }
        }
        if ok {
            return q;
        }
    }
}

/// Uniform weights on the (k-1)-simplex: normalized exponentials.
pub fn dirichlet_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k)
        .map(|_| rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE))
        .collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Random 2×2 positive semidefinite Hermitian matrix with unit Frobenius norm.
///
/// `(G + G†)/2`, shifted by `|λ_min|·I` when indefinite.
pub fn sample_psdh<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    loop {
        let h = ginibre(rng, 2, 2).hermitian_part();
        let min = linalg::herm_eig_unchecked(&h).eigenvalues[0];
        let h = if min < 0.0 {
            &h + &ComplexMatrix::identity(2).scale_real(-min)
        } else {
            h
        };
        let norm = h.frobenius_norm();
        if norm > 1e-12 {
            return h.scale_real(1.0 / norm);
        }
    }
}

/// Haar-random pure state for `seed`.
pub fn random_pure(seed: Seed) -> PureState {
    sample_pure(&mut seed.stream(Stream::PureState, 0))
}

/// `G G† / Tr(G G†)` with `G` a 4×rank complex Gaussian matrix.
pub fn random_mixed(seed: Seed, rank: usize) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(Error::OutOfRange {
            what: "rank",
            value: rank as f64,
            lo: 1.0,
            hi: 4.0,
        });
    }
    let mut rng = seed.stream(Stream::MixedState, 0);
    Ok(sample_mixed(&mut rng, rank))
}

pub fn sample_mixed<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> DensityMatrix {
    DensityMatrix::from_factor(&ginibre(rng, 4, rank))
}

/// `U diag(λ) U†` with Haar `U`.
pub fn random_fixed_spectrum(seed: Seed, spectrum: &Spectrum) -> DensityMatrix {
    let mut rng = seed.stream(Stream::FixedSpectrum, 0);
    sample_fixed_spectrum(&mut rng, spectrum)
}

pub fn sample_fixed_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &Spectrum) -> DensityMatrix {
    let u = haar_unitary(rng, 4);
    DensityMatrix::diagonal(spectrum).conjugated(&u)
}

/// `(U⊗V) ρ (U⊗V)†`.
pub fn apply_local_unitary(
    rho: &DensityMatrix,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<DensityMatrix> {
    for m in [u, v] {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::Dimension {
                expected: "2x2".into(),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        let dev = m.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
    }
    Ok(rho.conjugated(&kron(u, v)))
}

/// A sample from the equality-class generator with its ingredients.
#[derive(Debug, Clone)]
pub struct EqualityClassSample {
    /// Members with PSD Hermitian reshape, before the local rotation.
    pub ensemble: Ensemble,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    /// `(U⊗V) Σ p_i |φ^i⟩⟨φ^i| (U⊗V)†`.
    pub state: DensityMatrix,
}

/// Mixture of `k` pure states whose reshapes are PSD Hermitian, rotated by a
/// random local unitary pair.
pub fn equality_class_sample(seed: Seed, k: usize) -> Result<EqualityClassSample> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "mixture size",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let mut rng = seed.stream(Stream::EqualityClass, 0);
    let members = (0..k)
        .map(|_| PureState::new(flatten(&sample_psdh(&mut rng))?))
        .collect::<Result<Vec<_>>>()?;
    let weights = dirichlet_weights(&mut rng, k);
    let total: f64 = weights.iter().sum();
    let weights = weights.into_iter().map(|w| w / total).collect();
    let ensemble = Ensemble::new(weights, members)?;
    let u = haar_unitary(&mut rng, 2);
    let v = haar_unitary(&mut rng, 2);
    let state = apply_local_unitary(&ensemble.density()?, &u, &v)?;
    Ok(EqualityClassSample {
        ensemble,
        u,
        v,
        state,
    })
}

/// A state with concurrence equal to negativity.
pub fn equality_class_state(seed: Seed, k: usize) -> Result<DensityMatrix> {
    equality_class_sample(seed, k).map(|s| s.state)
}

/// `U ⊗ V (0, 1, -1, 0)ᵀ/√2` from the SVD `φ̃ = U Σ V†`.
fn negative_eigenvector(member: &PureState) -> Vec<Complex64> {
    let d = linalg::svd(member.tilde());
    let s = 0.5f64.sqrt();
    let z = Complex64::new(0.0, 0.0);
    let singlet = ComplexMatrix::column(&[z, Complex64::new(s, 0.0), Complex64::new(-s, 0.0), z]);
    (&kron(&d.u, &d.v) * &singlet).col(0)
}

/// True iff the eigenvectors of the members' partial transposes belonging to the
/// negative eigenvalue coincide up to a global phase.
///
/// Members with a vanishing Schmidt coefficient have no negative eigenvalue, so
/// the condition is undefined and they are rejected.
pub fn ensemble_eigvec_condition(ens: &Ensemble) -> Result<bool> {
    let mut vecs = Vec::with_capacity(ens.len());
    for (index, m) in ens.members().iter().enumerate() {
        let (_, sigma2) = schmidt(m);
        if sigma2 <= SCHMIDT_FLOOR {
            return Err(Error::ProductMember { index, sigma2 });
        }
        vecs.push(negative_eigenvector(m));
    }
    let first = &vecs[0];
    Ok(vecs.iter().skip(1).all(|v| {
        let overlap: Complex64 = first.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
        overlap.norm() >= 1.0 - EIGVEC_TOL
    }))
}

/// On-disk state: `{"rho": [[[re, im], ...], ...]}`, row-major, 4×4.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        Self {
            rho: (0..4)
                .map(|i| (0..4).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    /// Shape check only.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.rho.len() != 4 || self.rho.iter().any(|r| r.len() != 4) {
            return Err(Error::Parse(
                "\"rho\" must be a 4x4 array of [re, im] pairs".into(),
            ));
        }
        let data = self
            .rho
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(4, 4, data)
    }

    /// Validates every density-matrix invariant.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix()?)
    }
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(rho)).expect("serializable")
}

/// Parses and validates. Syntax problems map to [`Error::Parse`].
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_state()
}

pub fn read_state_file(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    state_from_json(&text)
}

pub fn write_state_file(path: &Path, rho: &DensityMatrix) -> std::io::Result<()> {
    std::fs::write(path, state_to_json(rho))
}

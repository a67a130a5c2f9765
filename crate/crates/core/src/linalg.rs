//! Small dense complex linear algebra.
//!
//! Everything here works on the 2×2 and 4×4 matrices that appear in two-qubit
//! problems. The eigensolver and the SVD are cyclic Jacobi methods with a fixed
//! pivot order, so results are bit-reproducible for a given input.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Off-diagonal Frobenius norm at which a Jacobi sweep stops, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Hermiticity tolerance accepted by [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off and clamped to zero.
pub const PSD_TOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows<const C: usize>(rows: &[[f64; C]]) -> Self {
        Self::from_fn(rows.len(), C, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Column vector.
    pub fn column(values: &[Complex64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Largest entrywise modulus of `self† self - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli σ_y.
pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, -i, i, ZERO]).expect("2x2")
}

/// `e^{ij}`: a single one at row `i`, column `j`.
pub fn basis_matrix(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows, a.cols);
    let (rb, cb) = (b.rows, b.cols);
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// Partial transpose over the second qubit.
///
/// With composite index `(ii') = 2i + i'`, the output satisfies
/// `out[(ii'),(jj')] = m[(ij'),(ji')]`.
pub fn partial_transpose(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.rows != 4 || m.cols != 4 {
        return Err(Error::Dimension {
            expected: "4x4".into(),
            got: format!("{}x{}", m.rows, m.cols),
        });
    }
    Ok(ComplexMatrix::from_fn(4, 4, |r, c| {
        let (i, ip) = (r / 2, r % 2);
        let (j, jp) = (c / 2, c % 2);
        m[(2 * i + jp, 2 * j + ip)]
    }))
}

/// The swap operator `P0 = Σ_ij e^{ij} ⊗ e^{ji}` on two qubits.
pub fn swap_operator() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            p[(2 * i + j, 2 * j + i)] = ONE;
        }
    }
    p
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermEigResult {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows;
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * vals[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Unitary 2×2 rotation `J` acting on the `(p, q)` plane that diagonalizes the
/// Hermitian block `[[a, g], [conj(g), b]]` under `J† · J`.
///
/// `J = [[c, s], [-s·conj(ph), c·conj(ph)]]` with `ph = g/|g|`.
#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
    ph: Complex64,
}

impl Rotation {
    fn annihilating(a: f64, b: f64, g: Complex64) -> Self {
        let r = g.norm();
        let ph = g / r;
        let theta = (b - a) / (2.0 * r);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = (1.0 / (t * t + 1.0)).sqrt();
        Self { c, s: t * c, ph }
    }

    /// `m ← m J` (columns p, q).
    fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        let phc = self.ph.conj();
        for k in 0..m.rows {
            let xp = m[(k, p)];
            let xq = m[(k, q)];
            m[(k, p)] = xp * self.c - xq * (phc * self.s);
            m[(k, q)] = xp * self.s + xq * (phc * self.c);
        }
    }

    /// `m ← J† m` (rows p, q).
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.cols {
            let xp = m[(p, k)];
            let xq = m[(q, k)];
            m[(p, k)] = xp * self.c - xq * (self.ph * self.s);
            m[(q, k)] = xp * self.s + xq * (self.ph * self.c);
        }
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEigResult> {
    if !h.is_square() {
        return Err(Error::Dimension {
            expected: "square matrix".into(),
            got: format!("{}x{}", h.rows, h.cols),
        });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = h.frobenius_norm().max(1.0);
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(herm_eig_unchecked(h))
}

/// Jacobi eigensolver without input validation; uses the Hermitian part of `h`.
pub(crate) fn herm_eig_unchecked(h: &ComplexMatrix) -> HermEigResult {
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let target = JACOBI_TOL * a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                if g.norm() == 0.0 {
                    continue;
                }
                let rot = Rotation::annihilating(a[(p, p)].re, a[(q, q)].re, g);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                rot.apply_right(&mut v, p, q);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermEigResult {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    herm_eig(h).map(|r| r.eigenvalues)
}

/// Singular value decomposition `m = U Σ V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Descending, non-negative.
    pub singular_values: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let us = ComplexMatrix::from_fn(self.u.rows, k, |i, j| {
            self.u[(i, j)] * self.singular_values[j]
        });
        &us * &self.v.adjoint()
    }
}

/// SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Square inputs yield square unitary `U` and `V`.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows < m.cols {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let n = m.cols;
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..a.rows {
                    let xp = a[(k, p)];
                    let xq = a[(k, q)];
                    alpha += xp.norm_sqr();
                    beta += xq.norm_sqr();
                    gamma += xp.conj() * xq;
                }
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(alpha, beta, gamma);
                rot.apply_right(&mut a, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| {
            (0..a.rows)
                .map(|i| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v_sorted = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let mut u = ComplexMatrix::zeros(a.rows, n);
    let floor = singular_values.first().copied().unwrap_or(0.0) * eps * (n as f64);
    let mut filled = Vec::with_capacity(n);
    for (jj, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > floor && s > 0.0 {
            for i in 0..a.rows {
                u[(i, jj)] = a[(i, j)] / s;
            }
            filled.push(jj);
        }
    }
    complete_orthonormal_columns(&mut u, &filled);
    Svd {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Fills the columns of `u` not listed in `filled` with unit vectors orthogonal to
/// every other column, by Gram–Schmidt over the standard basis.
fn complete_orthonormal_columns(u: &mut ComplexMatrix, filled: &[usize]) {
    let rows = u.rows;
    let mut done: Vec<usize> = filled.to_vec();
    let mut candidate = 0;
    for j in 0..u.cols {
        if filled.contains(&j) {
            continue;
        }
        while candidate < rows {
            let mut w = vec![ZERO; rows];
            w[candidate] = ONE;
            candidate += 1;
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for &d in &done {
                    let proj: Complex64 = (0..rows).map(|i| u[(i, d)].conj() * w[i]).sum();
                    for (i, wi) in w.iter_mut().enumerate() {
                        *wi -= proj * u[(i, d)];
                    }
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for (i, wi) in w.iter().enumerate() {
                    u[(i, j)] = wi / norm;
                }
                done.push(j);
                break;
            }
        }
    }
}

/// Hermitian positive semidefinite square root.
///
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is an error.
pub fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(rho)?;
    let min = eig.eigenvalues[0];
    if min < -PSD_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Hermitian square root for input already known to be PSD up to round-off.
pub(crate) fn psd_sqrt_clamped(rho: &ComplexMatrix) -> ComplexMatrix {
    herm_eig_unchecked(rho).reconstruct_with(|l| l.max(0.0).sqrt())
}

/// Matrix exponential `exp(i H)` of a Hermitian `H`, through its eigendecomposition.
pub fn expm_i_hermitian(h: &ComplexMatrix) -> ComplexMatrix {
    let eig = herm_eig_unchecked(h);
    let v = &eig.eigenvectors;
    let n = v.rows;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l))
        .collect();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj())
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_hermitian(seed: u64) -> ComplexMatrix {
        // small deterministic LCG, enough for unit tests
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let g = ComplexMatrix::from_fn(4, 4, |_, _| c(next(), next()));
        g.hermitian_part()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sigma_y_pair_is_antidiagonal() {
        let yy = kron(&pauli_y(), &pauli_y());
        let expected = ComplexMatrix::from_real_rows(&[
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(yy, expected);
    }

    #[test]
    fn kron_of_basis_elements() {
        // e^{12} ⊗ e^{21} in 1-based labels
        let m = kron(&basis_matrix(2, 0, 1), &basis_matrix(2, 1, 0));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (1, 2) { ONE } else { ZERO };
                assert_eq!(m[(i, j)], expected, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn partial_transpose_fixes_diagonal_and_involutes() {
        let d = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(partial_transpose(&d).unwrap(), d);
        let h = sample_hermitian(3);
        let back = partial_transpose(&partial_transpose(&h).unwrap()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn partial_transpose_of_bell_projector() {
        let s = 0.5f64.sqrt();
        let psi = ComplexMatrix::column(&[c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        let rho = &psi * &psi.adjoint();
        let ev = herm_eigenvalues(&partial_transpose(&rho).unwrap()).unwrap();
        for (got, want) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn partial_transpose_rejects_wrong_shape() {
        assert!(matches!(
            partial_transpose(&ComplexMatrix::identity(2)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn herm_eig_diagonal_sorted() {
        let r = herm_eig(&ComplexMatrix::diag_real(&[3.0, 1.0, 2.0, 0.0])).unwrap();
        assert_eq!(r.eigenvalues, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn herm_eig_sigma_y_pair() {
        let r = herm_eig(&kron(&pauli_y(), &pauli_y())).unwrap();
        for (got, want) in r.eigenvalues.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        assert!(r.reconstruct().max_abs_diff(&kron(&pauli_y(), &pauli_y())) < 1e-14);
    }

    #[test]
    fn herm_eig_shift() {
        let h = sample_hermitian(11);
        let shifted = &h + &ComplexMatrix::identity(4).scale_real(2.5);
        let a = herm_eig(&h).unwrap();
        let b = herm_eig(&shifted).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(a.eigenvalues[k] + 2.5, b.eigenvalues[k], epsilon = 1e-13);
            // same eigenvector up to phase
            let va = a.eigenvectors.col(k);
            let vb = b.eigenvectors.col(k);
            let overlap: Complex64 = va.iter().zip(&vb).map(|(x, y)| x.conj() * y).sum();
            assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(4);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn svd_diagonal_reorders() {
        let r = svd(&ComplexMatrix::diag_real(&[1.0, 2.0]));
        assert_eq!(r.singular_values, vec![2.0, 1.0]);
        assert!(
            r.reconstruct()
                .max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 2.0]))
                < 1e-15
        );
    }

    #[test]
    fn svd_of_scaled_identity() {
        let s = 0.5f64.sqrt();
        let r = svd(&ComplexMatrix::identity(2).scale_real(s));
        assert_abs_diff_eq!(r.singular_values[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(r.singular_values[1], s, epsilon = 1e-15);
    }

    #[test]
    fn svd_rank_deficient_completes_u() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let r = svd(&m);
        assert_abs_diff_eq!(r.singular_values[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.singular_values[1], 0.0, epsilon = 1e-14);
        assert!(r.u.unitarity_deviation() < 1e-14);
        assert!(r.v.unitarity_deviation() < 1e-14);
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn svd_wide_and_tall() {
        let col = ComplexMatrix::column(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let r = svd(&col);
        assert_eq!(r.singular_values.len(), 1);
        assert_abs_diff_eq!(r.singular_values[0], 1.0, epsilon = 1e-15);
        let rw = svd(&col.adjoint());
        assert_abs_diff_eq!(rw.singular_values[0], 1.0, epsilon = 1e-15);
        assert!(rw.reconstruct().max_abs_diff(&col.adjoint()) < 1e-15);
    }

    #[test]
    fn psd_sqrt_cases() {
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(
            psd_sqrt(&mixed)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.5))
                < 1e-15
        );

        let d = ComplexMatrix::diag_real(&[0.64, 0.36, 0.0, 0.0]);
        assert!(
            psd_sqrt(&d)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::diag_real(&[0.8, 0.6, 0.0, 0.0]))
                < 1e-15
        );

        let psi = ComplexMatrix::column(&[c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(-0.5, 0.0)]);
        let proj = &psi * &psi.adjoint();
        assert!(psd_sqrt(&proj).unwrap().max_abs_diff(&proj) < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let d = ComplexMatrix::diag_real(&[0.6, 0.5, 0.0, -0.1]);
        assert!(matches!(psd_sqrt(&d), Err(Error::NotPositive { .. })));
        let tiny = ComplexMatrix::diag_real(&[0.6, 0.4, 0.0, -1e-13]);
        assert!(psd_sqrt(&tiny).is_ok());
    }

    #[test]
    fn swap_operator_properties() {
        let p = swap_operator();
        assert_eq!(&p * &p, ComplexMatrix::identity(4));
        // e_(01) -> e_(10)
        let e01 = ComplexMatrix::column(&[ZERO, ONE, ZERO, ZERO]);
        let out = &p * &e01;
        assert_eq!(out.col(0), vec![ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn sigma_kron_swap_has_pure_pt_layout() {
        let (s1, s2) = (0.8, 0.6);
        let sig = ComplexMatrix::diag_real(&[s1, s2]);
        let m = &kron(&sig, &sig) * &swap_operator();
        let expected = ComplexMatrix::from_real_rows(&[
            [s1 * s1, 0.0, 0.0, 0.0],
            [0.0, 0.0, s1 * s2, 0.0],
            [0.0, s1 * s2, 0.0, 0.0],
            [0.0, 0.0, 0.0, s2 * s2],
        ]);
        assert!(m.max_abs_diff(&expected) < 1e-15);
        let ev = herm_eigenvalues(&m).unwrap();
        let mut want = [s1 * s1, s1 * s2, -s1 * s2, s2 * s2];
        want.sort_by(f64::total_cmp);
        for (g, w) in ev.iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let u = expm_i_hermitian(&ComplexMatrix::zeros(4, 4));
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let h = sample_hermitian(5);
        assert!(expm_i_hermitian(&h).unitarity_deviation() < 1e-13);
    }
}

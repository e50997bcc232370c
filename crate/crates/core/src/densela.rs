// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is sized for spin chains of at most eight qubits
//! (dimension 256). Hermitian matrices are diagonalized with the cyclic
//! Jacobi method, and every propagator `exp(-iHθ)` is formed from the
//! resulting eigendecomposition, so a single decomposition serves any
//! number of durations θ.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for treating a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest dimension accepted by [`hermitian_eig`].
pub const MAX_EIG_DIM: usize = 1024;

const MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: dim.max(1) * dim.max(1),
                got: entries.len(),
            });
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: Complex64, other: &Self) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| {
            self[(i / m, j / m)] * other[(i % m, j % m)]
        })
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim];
        self.matvec_into(v, &mut out);
        out
    }

    pub fn matvec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.dim);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.dim)) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = self† v`
    pub fn adjoint_matvec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.dim);
        out.iter_mut().for_each(|o| *o = ZERO);
        for (row, &vi) in self.data.chunks_exact(self.dim).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * vi;
            }
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A[i][j] − conj(A[j][i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL
    }

    /// Largest deviation of `self · self†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.matmul(&self.adjoint())
            .max_abs_diff(&Self::identity(self.dim))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Dense complex vector; quantum states are unit-norm instances.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector(pub Vec<Complex64>);

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![ZERO; dim])
    }

    /// Computational-basis unit vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        inner(&self.0, &other.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|&a| a * s).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }
}

#[inline]
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Dense real square matrix, row-major. Used for Hessians.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `vᵀ A v`
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.matvec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Eigenvalues of a real symmetric matrix, ascending.
    pub fn symmetric_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(symmetric_eig(self)?.0)
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// `A = V diag(λ) V†` with ascending λ and orthonormal columns of V.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(λ) V†` for a complex-valued spectral function `f`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.spectral_map(|l| Complex64::new(l, 0.0))
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
pub fn hermitian_eig(a: &CMatrix) -> Result<EigDecomposition> {
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = a.dim();
    if n > MAX_EIG_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension {n} exceeds {MAX_EIG_DIM}"
        )));
    }

    // Work on the exactly Hermitian part.
    let mut m = CMatrix::from_fn(n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let mut v = CMatrix::identity(n);

    let frob: f64 = m.as_slice().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let target = (1e-15 * frob).max(f64::MIN_POSITIVE);

    let mut converged = n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&m);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `m[p][q]` with `G = diag(1, e^{-iφ}) · R(c, s)` applied as `G† m G`.
fn jacobi_rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = m.dim();
    let apq = m[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b; // e^{iφ}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    // signum(+0.0) = 1, so equal diagonals give the 45° rotation.
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e_neg = phase.conj(); // e^{-iφ}

    // m ← m G (columns p, q)
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = c * mip - s * e_neg * miq;
        m[(i, q)] = s * mip + c * e_neg * miq;
    }
    // m ← G† m (rows p, q)
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = c * mpj - s * phase * mqj;
        m[(q, j)] = s * mpj + c * phase * mqj;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    // v ← v G
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = c * vip - s * e_neg * viq;
        v[(i, q)] = s * vip + c * e_neg * viq;
    }
}

/// Eigendecomposition of a real symmetric matrix (ascending eigenvalues,
/// real orthonormal eigenvectors as columns of the returned matrix).
pub fn symmetric_eig(a: &RMatrix) -> Result<(Vec<f64>, RMatrix)> {
    let n = a.dim();
    let scale = a.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let defect = a.symmetry_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NotSymmetric(defect));
    }
    let c = CMatrix::from_fn(n, |i, j| Complex64::new(0.5 * (a[(i, j)] + a[(j, i)]), 0.0));
    let eig = hermitian_eig(&c)?;
    // Real input keeps every rotation phase at ±1, so the vectors are real.
    let vecs = RMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, j)].re);
    Ok((eig.eigenvalues, vecs))
}

/// A Hermitian generator with its spectral decomposition, reused for any
/// number of durations.
#[derive(Debug, Clone)]
pub struct HermitianPropagator {
    eig: EigDecomposition,
}

impl HermitianPropagator {
    pub fn new(h: &CMatrix) -> Result<Self> {
        Ok(Self {
            eig: hermitian_eig(h)?,
        })
    }

    pub fn decomposition(&self) -> &EigDecomposition {
        &self.eig
    }

    /// `exp(-iHθ)` as a dense matrix.
    pub fn unitary(&self, theta: f64) -> CMatrix {
        self.eig
            .spectral_map(|l| Complex64::from_polar(1.0, -l * theta))
    }

    /// `exp(-iHθ) ψ` without forming the matrix.
    pub fn apply(&self, theta: f64, psi: &CVector) -> CVector {
        let n = self.eig.dim();
        let mut coords = vec![ZERO; n];
        self.eig
            .eigenvectors
            .adjoint_matvec_into(psi.as_slice(), &mut coords);
        for (c, &l) in coords.iter_mut().zip(&self.eig.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -l * theta);
        }
        CVector(self.eig.eigenvectors.matvec(&coords))
    }
}

/// `U(H, θ) = exp(-iHθ)`.
pub fn unitary_from_hamiltonian(h: &CMatrix, theta: f64) -> Result<CMatrix> {
    Ok(HermitianPropagator::new(h)?.unitary(theta))
}

/// Unit eigenvector of the smallest eigenvalue, phase fixed so that the
/// largest-magnitude entry is real and positive.
pub fn ground_state(h: &CMatrix) -> Result<CVector> {
    let eig = hermitian_eig(h)?;
    ground_state_from(&eig)
}

pub fn ground_state_from(eig: &EigDecomposition) -> Result<CVector> {
    if eig.dim() >= 2 {
        let gap = eig.eigenvalues[1] - eig.eigenvalues[0];
        if gap <= 1e-10 {
            return Err(Error::DegenerateGroundState(gap));
        }
    }
    let v = eig.eigenvectors.column(0);
    Ok(fix_phase(v))
}

fn fix_phase(v: CVector) -> CVector {
    let max = v.0.iter().map(|a| a.norm()).fold(0.0, f64::max);
    // First entry within rounding of the maximum, so ties resolve to the
    // lowest index deterministically.
    let pivot = v
        .0
        .iter()
        .position(|a| a.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let a = v.0[pivot];
    let norm = v.norm();
    let rot = a.conj() / (a.norm() * norm);
    v.scale(rot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn sigma_z() -> CMatrix {
        CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(rng.random_range(-2.0..2.0), 0.0);
            for j in i + 1..n {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eig(&CMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = hermitian_eig(&sigma_x()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_closed_form() {
        let h = sigma_z().scale(c(-1.0, 0.0)).add(&sigma_x().scale(c(2.0, 0.0)));
        let e = hermitian_eig(&h).unwrap();
        let r5 = 5f64.sqrt();
        assert!((e.eigenvalues[0] + r5).abs() < 1e-13);
        assert!((e.eigenvalues[1] - r5).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        for (n, seed) in [(3, 1), (8, 2), (17, 3), (64, 4)] {
            let h = random_hermitian(n, seed);
            let e = hermitian_eig(&h).unwrap();
            let scale = h.max_abs().max(1.0);
            assert!(e.reconstruct().max_abs_diff(&h) <= 1e-10 * scale);
            let v = &e.eigenvectors;
            assert!(v.adjoint().matmul(v).max_abs_diff(&CMatrix::identity(n)) <= 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn zero_angle_is_identity() {
        let h = random_hermitian(4, 9);
        let u = unitary_from_hamiltonian(&h, 0.0).unwrap();
        assert!(u.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn quarter_turn_of_pauli_x() {
        let u = unitary_from_hamiltonian(&sigma_x(), FRAC_PI_2).unwrap();
        let expected = sigma_x().scale(c(0.0, -1.0));
        assert!(u.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn matches_taylor_series() {
        let h = random_hermitian(4, 42);
        let theta = 0.3;
        let gen = h.scale(c(0.0, -theta));
        let mut term = CMatrix::identity(4);
        let mut sum = CMatrix::identity(4);
        for k in 1..30 {
            term = term.matmul(&gen).scale(c(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        let u = unitary_from_hamiltonian(&h, theta).unwrap();
        assert!(u.max_abs_diff(&sum) < 1e-9);
    }

    #[test]
    fn group_property() {
        let h = random_hermitian(6, 5);
        let p = HermitianPropagator::new(&h).unwrap();
        let (a, b) = (0.37, -1.2);
        let prod = p.unitary(a).matmul(&p.unitary(b));
        assert!(prod.max_abs_diff(&p.unitary(a + b)) < 1e-10);
        let inv = p.unitary(a).matmul(&p.unitary(-a));
        assert!(inv.max_abs_diff(&CMatrix::identity(6)) < 1e-10);
    }

    #[test]
    fn apply_matches_dense_unitary() {
        let h = random_hermitian(5, 11);
        let p = HermitianPropagator::new(&h).unwrap();
        let psi = CVector((0..5).map(|k| c(k as f64, 1.0 - k as f64)).collect());
        let dense = CVector(p.unitary(0.8).matvec(psi.as_slice()));
        assert!(p.apply(0.8, &psi).max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn ground_state_of_diagonal() {
        let h = sigma_z().scale(c(-1.0, 0.0));
        let g = ground_state(&h).unwrap();
        assert!(g.max_abs_diff(&CVector::from_real(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn ground_state_energy() {
        let h = sigma_z().scale(c(-1.0, 0.0)).add(&sigma_x().scale(c(2.0, 0.0)));
        let g = ground_state(&h).unwrap();
        assert!(g.is_normalized());
        let energy = g.inner(&CVector(h.matvec(g.as_slice())));
        assert!((energy.re + 5f64.sqrt()).abs() < 1e-12);
        assert!(energy.im.abs() < 1e-14);
    }

    #[test]
    fn ground_state_phase_convention() {
        let h = random_hermitian(6, 77);
        let g = ground_state(&h).unwrap();
        let (idx, _) = g
            .0
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        assert!(g.0[idx].im.abs() < 1e-14 && g.0[idx].re > 0.0);
    }

    #[test]
    fn degenerate_ground_state_is_rejected() {
        assert!(matches!(
            ground_state(&CMatrix::identity(3)),
            Err(Error::DegenerateGroundState(_))
        ));
    }

    #[test]
    fn real_symmetric_eig() {
        let a = RMatrix::from_fn(3, |i, j| [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]][i][j]);
        let (vals, vecs) = symmetric_eig(&a).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-13);
        assert!((vals[1] - 1.0).abs() < 1e-13);
        assert!((vals[2] - 3.0).abs() < 1e-13);
        let col: Vec<f64> = (0..3).map(|i| vecs[(i, 2)]).collect();
        let av = a.matvec(&col);
        for i in 0..3 {
            assert!((av[i] - 3.0 * col[i]).abs() < 1e-12);
        }
    }
}

// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pauli operators on qubit chains and the benchmark QAOA problems.
//!
//! Convention: qubit 1 is the leftmost tensor factor (most significant bit
//! of the basis index), `σᶻ = diag(1, −1)` and `|0⟩ = (1, 0)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densela::{ground_state, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::qaoa::KernelCache;

pub const MAX_QUBITS: usize = 8;

/// Default upper bound on each pulse duration.
pub const DEFAULT_THETA_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// `I ⊗ … ⊗ σ^axis ⊗ … ⊗ I` with the Pauli matrix at 1-based `site`.
pub fn pauli_site_operator(axis: PauliAxis, site: usize, n: usize) -> Result<CMatrix> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::ChainTooLong { n, max: MAX_QUBITS });
    }
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    let dim = 1usize << n;
    let mask = 1usize << (n - site);
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        let bit_set = col & mask != 0;
        match axis {
            PauliAxis::Z => {
                m[(col, col)] = Complex64::new(if bit_set { -1.0 } else { 1.0 }, 0.0);
            }
            PauliAxis::X => {
                m[(col ^ mask, col)] = Complex64::new(1.0, 0.0);
            }
            PauliAxis::Y => {
                // σʸ|0⟩ = i|1⟩, σʸ|1⟩ = −i|0⟩
                m[(col ^ mask, col)] = Complex64::new(0.0, if bit_set { -1.0 } else { 1.0 });
            }
        }
    }
    Ok(m)
}

/// Product of single-site Pauli operators on distinct sites.
fn pauli_string(n: usize, factors: &[(PauliAxis, usize)]) -> Result<CMatrix> {
    let mut out = CMatrix::identity(1 << n);
    for &(axis, site) in factors {
        out = out.matmul(&pauli_site_operator(axis, site, n)?);
    }
    Ok(out)
}

/// `|k̄⟩`: the basis state with the single excitation at 1-based site `k`.
pub fn excitation(n: usize, k: usize) -> Result<CVector> {
    if k == 0 || k > n {
        return Err(Error::SiteOutOfRange { site: k, n });
    }
    Ok(CVector::basis(1 << n, 1 << (n - k)))
}

/// `Σ_{i<N} (σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁)`: nearest-neighbour swap generator.
pub fn hopping_chain(n: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::ChainTooShort { n, min: 2 });
    }
    let mut h = CMatrix::zeros(1 << n);
    let one = Complex64::new(1.0, 0.0);
    for i in 1..n {
        h.add_scaled(one, &pauli_string(n, &[(PauliAxis::X, i), (PauliAxis::X, i + 1)])?);
        h.add_scaled(one, &pauli_string(n, &[(PauliAxis::Y, i), (PauliAxis::Y, i + 1)])?);
    }
    Ok(h)
}

/// An affine family `H(δ) = base + Σₖ δ[index_k] · M_k`.
#[derive(Debug, Clone)]
pub struct ParamHamiltonian {
    base: CMatrix,
    terms: Vec<(usize, CMatrix)>,
    nominal_delta: Vec<f64>,
}

impl ParamHamiltonian {
    pub fn constant(h: CMatrix, delta_dim: usize) -> Self {
        Self {
            base: h,
            terms: Vec::new(),
            nominal_delta: vec![0.0; delta_dim],
        }
    }

    pub fn new(base: CMatrix, terms: Vec<(usize, CMatrix)>, nominal_delta: Vec<f64>) -> Result<Self> {
        for (k, m) in &terms {
            if *k >= nominal_delta.len() {
                return Err(Error::InvalidArgument(format!(
                    "term uses δ[{k}] but δ has {} components",
                    nominal_delta.len()
                )));
            }
            if m.dim() != base.dim() {
                return Err(Error::DimensionMismatch {
                    expected: base.dim(),
                    got: m.dim(),
                });
            }
        }
        Ok(Self {
            base,
            terms,
            nominal_delta,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn nominal_delta(&self) -> &[f64] {
        &self.nominal_delta
    }

    pub fn depends_on_delta(&self) -> bool {
        !self.terms.is_empty()
    }

    /// Indices of the δ components this family actually reads.
    pub fn used_components(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|(k, _)| *k)
    }

    pub fn build(&self, delta: &[f64]) -> Result<CMatrix> {
        if delta.len() != self.nominal_delta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nominal_delta.len(),
                got: delta.len(),
            });
        }
        let mut h = self.base.clone();
        for (k, m) in &self.terms {
            h.add_scaled(Complex64::new(delta[*k], 0.0), m);
        }
        Ok(h)
    }
}

/// Initial state as a function of the uncertainty sample, always of the
/// form `ψᵢ(δ) = Σₖ aₖ(δ) bₖ` over a fixed set of basis vectors `bₖ`.
#[derive(Debug, Clone)]
pub enum InitialState {
    Fixed(CVector),
    /// `√(1−ω₂²−ω₃²)|1̄⟩ + ω₂|2̄⟩ + ω₃|3̄⟩` with `(ω₂, ω₃) = (δ[0], δ[1])`.
    ExcitationError { n: usize },
}

impl InitialState {
    pub fn basis(&self) -> Vec<CVector> {
        match self {
            InitialState::Fixed(v) => vec![v.clone()],
            InitialState::ExcitationError { n } => (1..=3)
                .map(|k| excitation(*n, k).expect("n >= 3 checked at construction"))
                .collect(),
        }
    }

    pub fn coefficients(&self, delta: &[f64]) -> Result<Vec<f64>> {
        match self {
            InitialState::Fixed(_) => Ok(vec![1.0]),
            InitialState::ExcitationError { .. } => {
                let (w2, w3) = (delta[0], delta[1]);
                let rest = 1.0 - w2 * w2 - w3 * w3;
                if rest < 0.0 {
                    return Err(Error::InvalidAmplitudes(w2, w3));
                }
                Ok(vec![rest.sqrt(), w2, w3])
            }
        }
    }

    pub fn depends_on_delta(&self) -> bool {
        matches!(self, InitialState::ExcitationError { .. })
    }

    pub fn state(&self, delta: &[f64]) -> Result<CVector> {
        match self {
            InitialState::Fixed(v) => Ok(v.clone()),
            InitialState::ExcitationError { n } => {
                initial_state_with_error(*n, delta[0], delta[1])
            }
        }
    }
}

/// The benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    SingleQubit,
    ChainOne,
    ChainTwo,
    ChainTwoInitError,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::SingleQubit => "single_qubit",
            SystemKind::ChainOne => "chain_one",
            SystemKind::ChainTwo => "chain_two",
            SystemKind::ChainTwoInitError => "chain_two_init_error",
        })
    }
}

/// Orthonormal basis of the smallest subspace that contains every
/// initial-state basis vector and is invariant under all Hamiltonian pieces.
/// The evolution never leaves it, so propagation can run in its coordinates.
#[derive(Debug)]
pub struct InvariantSubspace {
    basis: Vec<CVector>,
}

/// Residual norm below which a Krylov vector is treated as already spanned.
/// The operators here have small integer entries, so residuals are either
/// rounding noise or of order one.
const SPAN_TOL: f64 = 1e-8;

impl InvariantSubspace {
    /// `None` when the closure is the whole space.
    fn closure(ops: &[&CMatrix], seeds: Vec<CVector>, dim: usize) -> Option<Self> {
        let mut basis: Vec<CVector> = Vec::new();
        let mut queue: std::collections::VecDeque<CVector> = seeds.into();
        while let Some(v) = queue.pop_front() {
            let norm = v.norm();
            if norm == 0.0 {
                continue;
            }
            let mut w = v.scale(Complex64::new(1.0 / norm, 0.0));
            for _pass in 0..2 {
                for q in &basis {
                    let c = q.inner(&w);
                    for (x, y) in w.0.iter_mut().zip(&q.0) {
                        *x -= c * y;
                    }
                }
            }
            let r = w.norm();
            if r <= SPAN_TOL {
                continue;
            }
            let q = w.scale(Complex64::new(1.0 / r, 0.0));
            for op in ops {
                queue.push_back(CVector(op.matvec(q.as_slice())));
            }
            basis.push(q);
            if basis.len() == dim {
                return None;
            }
        }
        Some(Self { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// `Q† H Q`, symmetrized.
    pub fn project(&self, h: &CMatrix) -> CMatrix {
        let hq: Vec<CVector> = self.basis.iter().map(|q| CVector(h.matvec(q.as_slice()))).collect();
        let raw = CMatrix::from_fn(self.dim(), |i, j| self.basis[i].inner(&hq[j]));
        CMatrix::from_fn(self.dim(), |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)].conj()))
    }

    /// `Q† v`
    pub fn restrict(&self, v: &CVector) -> CVector {
        CVector(self.basis.iter().map(|q| q.inner(v)).collect())
    }

    /// `Q x`
    pub fn embed(&self, x: &[Complex64]) -> CVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.basis[0].dim()];
        for (q, c) in self.basis.iter().zip(x) {
            for (o, v) in out.iter_mut().zip(&q.0) {
                *o += c * v;
            }
        }
        CVector(out)
    }
}

/// A complete QAOA state-transfer problem with its uncertainty model.
///
/// Immutable after construction. The propagator cache is shared between
/// clones and is safe to hit from several threads.
#[derive(Debug, Clone)]
pub struct QaoaInstance {
    pub system: SystemKind,
    pub n_qubits: usize,
    pub h_a: ParamHamiltonian,
    pub h_b: ParamHamiltonian,
    pub psi_i: InitialState,
    pub psi_t: CVector,
    depth: usize,
    theta_max: f64,
    pub(crate) cache: Arc<KernelCache>,
    pub(crate) subspace: Option<Arc<InvariantSubspace>>,
}

impl QaoaInstance {
    pub fn new(
        system: SystemKind,
        n_qubits: usize,
        h_a: ParamHamiltonian,
        h_b: ParamHamiltonian,
        psi_i: InitialState,
        psi_t: CVector,
        depth: usize,
    ) -> Result<Self> {
        let dim = h_a.dim();
        if h_b.dim() != dim || psi_t.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: if h_b.dim() != dim { h_b.dim() } else { psi_t.dim() },
            });
        }
        if h_a.nominal_delta().len() != h_b.nominal_delta().len() {
            return Err(Error::InvalidArgument(
                "H_A and H_B disagree on the uncertainty dimension".into(),
            ));
        }
        for b in psi_i.basis() {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: b.dim(),
                });
            }
        }
        if !psi_t.is_normalized() || !psi_i.state(h_a.nominal_delta())?.is_normalized() {
            return Err(Error::InvalidArgument("states must be unit norm".into()));
        }
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let ops: Vec<&CMatrix> = [&h_a, &h_b]
            .into_iter()
            .flat_map(|h| std::iter::once(&h.base).chain(h.terms.iter().map(|(_, m)| m)))
            .collect();
        let subspace = InvariantSubspace::closure(&ops, psi_i.basis(), dim).map(Arc::new);
        Ok(Self {
            system,
            n_qubits,
            h_a,
            h_b,
            psi_i,
            psi_t,
            depth,
            theta_max: DEFAULT_THETA_MAX,
            cache: Arc::new(KernelCache::default()),
            subspace,
        })
    }

    pub fn dim(&self) -> usize {
        self.h_a.dim()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Dimension of the space the dynamics actually explores.
    pub fn dynamical_dim(&self) -> usize {
        self.subspace.as_ref().map_or(self.dim(), |s| s.dim())
    }

    /// Number of control angles, `2p`.
    pub fn n_controls(&self) -> usize {
        2 * self.depth
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    pub fn delta_dim(&self) -> usize {
        self.h_a.nominal_delta().len()
    }

    pub fn nominal_delta(&self) -> &[f64] {
        self.h_a.nominal_delta()
    }

    /// Same problem at a different depth. The Hamiltonian cache carries over.
    pub fn with_depth(mut self, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        self.depth = depth;
        Ok(self)
    }

    pub fn with_theta_max(mut self, theta_max: f64) -> Result<Self> {
        if !(theta_max > 0.0 && theta_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "theta_max must be positive, got {theta_max}"
            )));
        }
        self.theta_max = theta_max;
        Ok(self)
    }

    /// Whether either Hamiltonian varies with δ.
    pub fn hamiltonians_depend_on_delta(&self) -> bool {
        self.h_a.depends_on_delta() || self.h_b.depends_on_delta()
    }

    pub fn initial_state(&self, delta: &[f64]) -> Result<CVector> {
        self.check_delta(delta)?;
        self.psi_i.state(delta)
    }

    pub(crate) fn check_delta(&self, delta: &[f64]) -> Result<()> {
        if delta.len() != self.delta_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.delta_dim(),
                got: delta.len(),
            });
        }
        Ok(())
    }
}

fn sz(n: usize, k: usize) -> CMatrix {
    pauli_site_operator(PauliAxis::Z, k, n).expect("site checked by caller")
}

fn sx(n: usize, k: usize) -> CMatrix {
    pauli_site_operator(PauliAxis::X, k, n).expect("site checked by caller")
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Single qubit driven by `H(ω) = −σᶻ + ω σˣ`, transferring the ground state
/// of `−σᶻ + 2σˣ` to that of `−σᶻ − 2σˣ`. `δ = (ω_A, ω_B)` and the
/// reference point is `(omega_a, omega_b)`, conventionally `(4, −4)`.
pub fn build_single_qubit(omega_a: f64, omega_b: f64) -> Result<QaoaInstance> {
    let z = sz(1, 1);
    let x = sx(1, 1);
    let minus_z = z.scale(real(-1.0));
    let nominal = vec![omega_a, omega_b];
    let h_a = ParamHamiltonian::new(minus_z.clone(), vec![(0, x.clone())], nominal.clone())?;
    let h_b = ParamHamiltonian::new(minus_z.clone(), vec![(1, x.clone())], nominal)?;

    let mut h_i = minus_z.clone();
    h_i.add_scaled(real(2.0), &x);
    let mut h_t = minus_z;
    h_t.add_scaled(real(-2.0), &x);

    QaoaInstance::new(
        SystemKind::SingleQubit,
        1,
        h_a,
        h_b,
        InitialState::Fixed(ground_state(&h_i)?),
        ground_state(&h_t)?,
        5,
    )
}

fn check_chain_len(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min {
        return Err(Error::ChainTooShort { n, min });
    }
    if n > max {
        return Err(Error::ChainTooLong { n, max });
    }
    Ok(())
}

/// Transverse-field Ising chain with uncertain first two couplings:
///
/// `H(h; ω₁, ω₂) = −(1+ω₁)σᶻ₁σᶻ₂ − (1+ω₂)σᶻ₂σᶻ₃ − Σ_{j≥3} σᶻⱼσᶻⱼ₊₁ − Σⱼ (σᶻⱼ + h σˣⱼ)`
pub fn chain_one_hamiltonian(n: usize, h: f64) -> Result<ParamHamiltonian> {
    check_chain_len(n, 3, MAX_QUBITS)?;
    let zz = |j: usize| sz(n, j).matmul(&sz(n, j + 1));
    let mut base = CMatrix::zeros(1 << n);
    for j in 1..n {
        base.add_scaled(real(-1.0), &zz(j));
    }
    for j in 1..=n {
        base.add_scaled(real(-1.0), &sz(n, j));
        base.add_scaled(real(-h), &sx(n, j));
    }
    let terms = vec![
        (0, zz(1).scale(real(-1.0))),
        (1, zz(2).scale(real(-1.0))),
    ];
    ParamHamiltonian::new(base, terms, vec![0.0, 0.0])
}

/// Ising chain controlled by the field values `h_plus` (H_A) and `h_minus`
/// (H_B); transfers the ground state at `h = −2` to the one at `h = +2`.
/// Default depth `2N`.
pub fn build_chain_one(n: usize, h_plus: f64, h_minus: f64) -> Result<QaoaInstance> {
    check_chain_len(n, 3, 7)?;
    let h_a = chain_one_hamiltonian(n, h_plus)?;
    let h_b = chain_one_hamiltonian(n, h_minus)?;
    let zero = [0.0, 0.0];
    let psi_i = ground_state(&chain_one_hamiltonian(n, -2.0)?.build(&zero)?)?;
    let psi_t = ground_state(&chain_one_hamiltonian(n, 2.0)?.build(&zero)?)?;
    QaoaInstance::new(
        SystemKind::ChainOne,
        n,
        h_a,
        h_b,
        InitialState::Fixed(psi_i),
        psi_t,
        2 * n,
    )
}

/// Three-qubit perturbation `σᶻ_{m−1} σˣ_m σᶻ_{m+1}` with `m = ⌊N/2⌋`.
pub fn chain_two_perturbation(n: usize) -> Result<CMatrix> {
    // 1-based sites: m − 1 ≥ 1 needs N ≥ 4.
    check_chain_len(n, 4, MAX_QUBITS)?;
    let m = n / 2;
    pauli_string(
        n,
        &[(PauliAxis::Z, m - 1), (PauliAxis::X, m), (PauliAxis::Z, m + 1)],
    )
}

/// `½(σᶻ_N + I)`
pub fn chain_two_h_b(n: usize) -> Result<CMatrix> {
    check_chain_len(n, 1, MAX_QUBITS)?;
    let mut h = sz(n, n);
    h.add_scaled(real(1.0), &CMatrix::identity(1 << n));
    Ok(h.scale(real(0.5)))
}

/// Excitation transfer `|1̄⟩ → |N̄⟩` with an uncertain three-qubit term of
/// strength δ in H_A. Depth `N + 1`.
pub fn build_chain_two(n: usize) -> Result<QaoaInstance> {
    check_chain_len(n, 4, 7)?;
    let h_a = ParamHamiltonian::new(
        hopping_chain(n)?,
        vec![(0, chain_two_perturbation(n)?)],
        vec![0.0],
    )?;
    let h_b = ParamHamiltonian::constant(chain_two_h_b(n)?, 1);
    QaoaInstance::new(
        SystemKind::ChainTwo,
        n,
        h_a,
        h_b,
        InitialState::Fixed(excitation(n, 1)?),
        excitation(n, n)?,
        n + 1,
    )
}

/// The excitation-transfer chain with exact control Hamiltonians and an
/// imperfect initial state, `δ = (ω₂, ω₃)`. Depth `N + 1`.
pub fn build_chain_two_init_error(n: usize) -> Result<QaoaInstance> {
    check_chain_len(n, 3, 7)?;
    let h_a = ParamHamiltonian::constant(hopping_chain(n)?, 2);
    let h_b = ParamHamiltonian::constant(chain_two_h_b(n)?, 2);
    QaoaInstance::new(
        SystemKind::ChainTwoInitError,
        n,
        h_a,
        h_b,
        InitialState::ExcitationError { n },
        excitation(n, n)?,
        n + 1,
    )
}

/// `√(1−ω₂²−ω₃²)|1̄⟩ + ω₂|2̄⟩ + ω₃|3̄⟩`
pub fn initial_state_with_error(n: usize, omega2: f64, omega3: f64) -> Result<CVector> {
    check_chain_len(n, 3, MAX_QUBITS)?;
    let rest = 1.0 - omega2 * omega2 - omega3 * omega3;
    if rest < 0.0 {
        return Err(Error::InvalidAmplitudes(omega2, omega3));
    }
    let mut v = excitation(n, 1)?.scale(real(rest.sqrt()));
    v.0[1 << (n - 2)] = real(omega2);
    v.0[1 << (n - 3)] = real(omega3);
    Ok(v)
}

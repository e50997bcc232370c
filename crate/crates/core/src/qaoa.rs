// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! QAOA propagation, fidelity and its derivatives.
//!
//! The state is carried in the eigenbasis of whichever Hamiltonian acts
//! next, so each layer costs one phase multiplication plus one dense change
//! of basis (`W = V_B† V_A` or its adjoint). The gradient uses the adjoint
//! method: a backward sweep from the target gives `χ_s`, a forward sweep
//! from the initial state gives `φ_s`, and
//! `∂c/∂θ_s = ⟨χ_s| −iH_s |φ_s⟩` is read off in the shared eigenbasis.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densela::{hermitian_eig, inner, symmetric_eig, CMatrix, CVector, RMatrix};
use crate::error::{Error, Result};
use crate::spinmodel::{InvariantSubspace, QaoaInstance};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Entries beyond this are dropped wholesale; b-GRAPE draws a fresh δ every
/// iteration and would otherwise grow the cache without bound.
const CACHE_CAPACITY: usize = 4096;

/// Feasible box Θ for the control angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ThetaBox {
    pub fn uniform(len: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: vec![lower; len],
            upper: vec![upper; len],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Index of the first out-of-box component, if any.
    pub fn violation(&self, theta: &[f64]) -> Option<usize> {
        theta
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .position(|(t, (lo, hi))| !(t >= lo && t <= hi))
    }

    pub fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: theta.len(),
            });
        }
        match self.violation(theta) {
            Some(i) => Err(Error::InfeasibleStart(i)),
            None => Ok(()),
        }
    }

    pub fn clip(&self, theta: &mut [f64]) {
        for (t, (lo, hi)) in theta.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *t = t.clamp(*lo, *hi);
        }
    }
}

impl QaoaInstance {
    /// Θ = [0, θ_max]^{2p}.
    pub fn theta_box(&self) -> ThetaBox {
        ThetaBox::uniform(self.n_controls(), 0.0, self.theta_max())
    }
}

/// Pulse durations `(θ₁ᴬ, θ₁ᴮ, …, θₚᴬ, θₚᴮ)` known to lie in their box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlVector {
    angles: Vec<f64>,
    bounds: ThetaBox,
}

impl ControlVector {
    pub fn new(angles: Vec<f64>, bounds: ThetaBox) -> Result<Self> {
        if !angles.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "control vector length {} is odd",
                angles.len()
            )));
        }
        bounds.check(&angles)?;
        Ok(Self { angles, bounds })
    }

    pub fn for_instance(inst: &QaoaInstance, angles: Vec<f64>) -> Result<Self> {
        Self::new(angles, inst.theta_box())
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn bounds(&self) -> &ThetaBox {
        &self.bounds
    }

    pub fn depth(&self) -> usize {
        self.angles.len() / 2
    }

    pub fn into_angles(self) -> Vec<f64> {
        self.angles
    }
}

/// Fidelity at one `(θ, δ)` with its first (and optionally projected
/// second) derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hess_minus: Option<RMatrix>,
}

/// Spectral data for one `(H_A(δ), H_B(δ))` pair.
#[derive(Debug)]
pub struct LayerKernel {
    lam_a: Vec<f64>,
    /// Columns of `Q V_A` in full-space coordinates (`Q = I` unless the
    /// dynamics is confined to an invariant subspace).
    in_a: Vec<CVector>,
    lam_b: Vec<f64>,
    /// Columns of `Q V_B`.
    out_b: Vec<CVector>,
    /// `V_B† V_A`: A-eigencoordinates → B-eigencoordinates.
    a_to_b: CMatrix,
    /// `V_B† ψₜ`
    target_b: Vec<Complex64>,
}

impl LayerKernel {
    fn new(h_a: &CMatrix, h_b: &CMatrix, target: &CVector, sub: Option<&InvariantSubspace>) -> Result<Self> {
        let (h_a, h_b, target) = match sub {
            Some(s) => (s.project(h_a), s.project(h_b), s.restrict(target)),
            None => (h_a.clone(), h_b.clone(), target.clone()),
        };
        let ea = hermitian_eig(&h_a)?;
        let eb = hermitian_eig(&h_b)?;
        let a_to_b = eb.eigenvectors.adjoint().matmul(&ea.eigenvectors);
        let mut target_b = vec![ZERO; target.dim()];
        eb.eigenvectors
            .adjoint_matvec_into(target.as_slice(), &mut target_b);
        let columns = |v: &CMatrix| -> Vec<CVector> {
            (0..v.dim())
                .map(|j| {
                    let col = v.column(j);
                    match sub {
                        Some(s) => s.embed(col.as_slice()),
                        None => col,
                    }
                })
                .collect()
        };
        Ok(Self {
            lam_a: ea.eigenvalues,
            in_a: columns(&ea.eigenvectors),
            lam_b: eb.eigenvalues,
            out_b: columns(&eb.eigenvectors),
            a_to_b,
            target_b,
        })
    }

    fn lambdas(&self, step: usize) -> &[f64] {
        if step.is_multiple_of(2) {
            &self.lam_a
        } else {
            &self.lam_b
        }
    }

    fn to_a_coords(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.in_a.iter().map(|c| inner(c.as_slice(), psi)).collect()
    }

    /// Full-space state from B-eigencoordinates.
    fn b_coords_to_state(&self, x: &[Complex64]) -> CVector {
        let mut out = vec![ZERO; self.out_b[0].dim()];
        for (c, v) in self.out_b.iter().zip(x) {
            for (o, e) in out.iter_mut().zip(c.as_slice()) {
                *o += v * e;
            }
        }
        CVector(out)
    }

    /// Moves `x` from the coordinates of step `step − 1` into those of `step`.
    fn enter_step(&self, step: usize, x: &mut Vec<Complex64>, tmp: &mut Vec<Complex64>) {
        if step == 0 {
            return;
        }
        if step % 2 == 1 {
            self.a_to_b.matvec_into(x, tmp);
        } else {
            self.a_to_b.adjoint_matvec_into(x, tmp);
        }
        std::mem::swap(x, tmp);
    }

    /// Moves `x` from the coordinates of `step` back into those of `step − 1`.
    fn leave_step_backward(&self, step: usize, x: &mut Vec<Complex64>, tmp: &mut Vec<Complex64>) {
        if step == 0 {
            return;
        }
        if step % 2 == 1 {
            self.a_to_b.adjoint_matvec_into(x, tmp);
        } else {
            self.a_to_b.matvec_into(x, tmp);
        }
        std::mem::swap(x, tmp);
    }

    /// Final state in B-eigencoordinates.
    fn forward(&self, theta: &[f64], psi0: &[Complex64]) -> Vec<Complex64> {
        let mut x = self.to_a_coords(psi0);
        let mut tmp = vec![ZERO; x.len()];
        for (s, &t) in theta.iter().enumerate() {
            self.enter_step(s, &mut x, &mut tmp);
            apply_phase(&mut x, self.lambdas(s), -t);
        }
        x
    }

    fn amplitude(&self, theta: &[f64], psi0: &[Complex64]) -> Complex64 {
        inner(&self.target_b, &self.forward(theta, psi0))
    }

    /// `χ_s` for every step, each in the eigencoordinates of step `s`.
    fn backward(&self, theta: &[f64]) -> Vec<Vec<Complex64>> {
        let steps = theta.len();
        let mut chis = vec![Vec::new(); steps];
        let mut chi = self.target_b.clone();
        let mut tmp = vec![ZERO; chi.len()];
        for s in (0..steps).rev() {
            chis[s] = chi.clone();
            apply_phase(&mut chi, self.lambdas(s), theta[s]);
            self.leave_step_backward(s, &mut chi, &mut tmp);
        }
        chis
    }

    /// `c = ⟨ψₜ|U(θ)|ψ₀⟩` and `∂c/∂θ_s` given precomputed backward states.
    fn amplitude_jacobian(
        &self,
        theta: &[f64],
        chis: &[Vec<Complex64>],
        psi0: &[Complex64],
    ) -> (Complex64, Vec<Complex64>) {
        let mut x = self.to_a_coords(psi0);
        let mut tmp = vec![ZERO; x.len()];
        let mut dc = Vec::with_capacity(theta.len());
        for (s, &t) in theta.iter().enumerate() {
            self.enter_step(s, &mut x, &mut tmp);
            let lam = self.lambdas(s);
            apply_phase(&mut x, lam, -t);
            let d: Complex64 = chis[s]
                .iter()
                .zip(lam)
                .zip(&x)
                .map(|((c, &l), v)| c.conj() * v * l)
                .sum();
            dc.push(Complex64::new(0.0, -1.0) * d);
        }
        (inner(&self.target_b, &x), dc)
    }
}

#[inline]
fn apply_phase(x: &mut [Complex64], lam: &[f64], angle: f64) {
    if angle == 0.0 {
        return;
    }
    for (v, &l) in x.iter_mut().zip(lam) {
        *v *= Complex64::from_polar(1.0, l * angle);
    }
}

/// Per-instance cache of [`LayerKernel`]s keyed by the δ components the
/// Hamiltonians read.
#[derive(Debug, Default)]
pub struct KernelCache {
    map: RwLock<HashMap<Vec<u64>, Arc<LayerKernel>>>,
}

impl KernelCache {
    pub fn len(&self) -> usize {
        self.map.read().expect("kernel cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl QaoaInstance {
    fn kernel_key(&self, delta: &[f64]) -> Vec<u64> {
        let mut idx: Vec<usize> = self
            .h_a
            .used_components()
            .chain(self.h_b.used_components())
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|k| delta[k].to_bits()).collect()
    }

    /// Spectral data for the Hamiltonians at `delta`, computed at most once.
    pub fn kernel(&self, delta: &[f64]) -> Result<Arc<LayerKernel>> {
        self.check_delta(delta)?;
        let key = self.kernel_key(delta);
        if let Some(k) = self.cache.map.read().expect("kernel cache poisoned").get(&key) {
            return Ok(k.clone());
        }
        let kernel = Arc::new(LayerKernel::new(
            &self.h_a.build(delta)?,
            &self.h_b.build(delta)?,
            &self.psi_t,
            self.subspace.as_deref(),
        )?);
        let mut map = self.cache.map.write().expect("kernel cache poisoned");
        if map.len() >= CACHE_CAPACITY {
            map.clear();
        }
        Ok(map.entry(key).or_insert(kernel).clone())
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_controls() {
            return Err(Error::DimensionMismatch {
                expected: self.n_controls(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

/// `|ψ_θ⟩ = ∏ⱼ U(H_B, θⱼᴮ) U(H_A, θⱼᴬ) |ψᵢ(δ)⟩`, layer 1 applied first.
pub fn propagate(inst: &QaoaInstance, theta: &[f64], delta: &[f64]) -> Result<CVector> {
    inst.check_theta(theta)?;
    let kernel = inst.kernel(delta)?;
    let psi0 = inst.initial_state(delta)?;
    let x = kernel.forward(theta, psi0.as_slice());
    Ok(kernel.b_coords_to_state(&x))
}

/// `F(θ, δ) = |⟨ψₜ|U(θ, δ)|ψᵢ(δ)⟩|²`
pub fn fidelity(inst: &QaoaInstance, theta: &[f64], delta: &[f64]) -> Result<f64> {
    inst.check_theta(theta)?;
    let kernel = inst.kernel(delta)?;
    let psi0 = inst.initial_state(delta)?;
    Ok(kernel.amplitude(theta, psi0.as_slice()).norm_sqr())
}

fn eval_from_amplitude(c: Complex64, dc: &[Complex64]) -> FidelityEval {
    FidelityEval {
        value: c.norm_sqr(),
        gradient: dc.iter().map(|d| 2.0 * (c.conj() * d).re).collect(),
        hess_minus: None,
    }
}

/// Fidelity and its exact gradient by one forward and one backward sweep.
pub fn fidelity_gradient(inst: &QaoaInstance, theta: &[f64], delta: &[f64]) -> Result<FidelityEval> {
    inst.check_theta(theta)?;
    let kernel = inst.kernel(delta)?;
    let psi0 = inst.initial_state(delta)?;
    let chis = kernel.backward(theta);
    let (c, dc) = kernel.amplitude_jacobian(theta, &chis, psi0.as_slice());
    Ok(eval_from_amplitude(c, &dc))
}

/// Evaluates every sample in order. Gradients are included when
/// `with_gradient` is set, otherwise `gradient` is empty.
///
/// When the Hamiltonians do not depend on δ the work is shared: one
/// backward sweep plus one forward sweep per initial-state basis vector,
/// combined linearly per sample.
pub fn evaluate_samples(
    inst: &QaoaInstance,
    theta: &[f64],
    samples: &[Vec<f64>],
    with_gradient: bool,
) -> Result<Vec<FidelityEval>> {
    inst.check_theta(theta)?;
    for d in samples {
        inst.check_delta(d)?;
    }
    if samples.is_empty() {
        return Ok(Vec::new());
    }

    if !inst.hamiltonians_depend_on_delta() {
        let kernel = inst.kernel(&samples[0])?;
        let basis = inst.psi_i.basis();
        let chis = with_gradient.then(|| kernel.backward(theta));
        let parts: Vec<(Complex64, Vec<Complex64>)> = basis
            .iter()
            .map(|b| match &chis {
                Some(chis) => kernel.amplitude_jacobian(theta, chis, b.as_slice()),
                None => (kernel.amplitude(theta, b.as_slice()), Vec::new()),
            })
            .collect();
        return samples
            .iter()
            .map(|d| {
                let coeffs = inst.psi_i.coefficients(d)?;
                let mut c = ZERO;
                let mut dc = vec![ZERO; if with_gradient { theta.len() } else { 0 }];
                for (a, (ck, dck)) in coeffs.iter().zip(&parts) {
                    c += ck * a;
                    for (acc, v) in dc.iter_mut().zip(dck) {
                        *acc += v * a;
                    }
                }
                Ok(eval_from_amplitude(c, &dc))
            })
            .collect();
    }

    samples
        .par_iter()
        .map(|d| {
            if with_gradient {
                fidelity_gradient(inst, theta, d)
            } else {
                Ok(FidelityEval {
                    value: fidelity(inst, theta, d)?,
                    gradient: Vec::new(),
                    hess_minus: None,
                })
            }
        })
        .collect()
}

/// Fidelity values only, in sample order.
pub fn fidelities(inst: &QaoaInstance, theta: &[f64], samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    Ok(evaluate_samples(inst, theta, samples, false)?
        .into_iter()
        .map(|e| e.value)
        .collect())
}

/// Symmetrized Hessian of F by central differences of the analytic gradient.
pub fn fidelity_hessian_fd(
    inst: &QaoaInstance,
    theta: &[f64],
    delta: &[f64],
    step: f64,
) -> Result<RMatrix> {
    if !(step >= 1e-9) {
        return Err(Error::StepTooSmall(step));
    }
    inst.check_theta(theta)?;
    let n = theta.len();
    let mut cols = Vec::with_capacity(n);
    let mut probe = theta.to_vec();
    for j in 0..n {
        probe[j] = theta[j] + step;
        let gp = fidelity_gradient(inst, &probe, delta)?.gradient;
        probe[j] = theta[j] - step;
        let gm = fidelity_gradient(inst, &probe, delta)?.gradient;
        probe[j] = theta[j];
        cols.push(
            gp.iter()
                .zip(&gm)
                .map(|(a, b)| (a - b) / (2.0 * step))
                .collect::<Vec<_>>(),
        );
    }
    // cols[j][i] = ∂²F/∂θ_j∂θ_i
    Ok(RMatrix::from_fn(n, |i, j| 0.5 * (cols[j][i] + cols[i][j])))
}

/// Fidelity, gradient and the negative-semidefinite part of the FD Hessian.
pub fn fidelity_second_order(
    inst: &QaoaInstance,
    theta: &[f64],
    delta: &[f64],
    step: f64,
) -> Result<FidelityEval> {
    let mut eval = fidelity_gradient(inst, theta, delta)?;
    let h = fidelity_hessian_fd(inst, theta, delta, step)?;
    eval.hess_minus = Some(negative_semidefinite_part(&h)?);
    Ok(eval)
}

/// `V diag(min(λ, 0)) Vᵀ`
pub fn negative_semidefinite_part(h: &RMatrix) -> Result<RMatrix> {
    let (vals, vecs) = symmetric_eig(h)?;
    let n = h.dim();
    let clipped: Vec<f64> = vals.iter().map(|&l| l.min(0.0)).collect();
    let raw = RMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| vecs[(i, k)] * clipped[k] * vecs[(j, k)]).sum()
    });
    Ok(RMatrix::from_fn(n, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)])))
}

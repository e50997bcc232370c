// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Slow reference implementations used to cross-check the fast paths.
//!
//! None of these share code with the production routines they check: the
//! propagator uses a scaled Taylor series instead of the eigensolver, and the
//! LP oracle enumerates vertices instead of pivoting.

use num_complex::Complex64;

use crate::densela::{CMatrix, CVector};
use crate::error::Result;
use crate::lp::LinearProgram;
use crate::spinmodel::QaoaInstance;

/// `exp(−iθH)` by scaling and squaring a truncated Taylor series.
pub fn expm_taylor(h: &CMatrix, theta: f64) -> CMatrix {
    let norm = h.max_abs() * h.dim() as f64 * theta.abs();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = theta / f64::from(2u32.pow(squarings));
    let gen = h.scale(Complex64::new(0.0, -scale));
    let mut term = CMatrix::identity(h.dim());
    let mut sum = CMatrix::identity(h.dim());
    for k in 1..=24 {
        term = term.matmul(&gen).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Final state from explicit dense unitaries.
pub fn dense_propagate(inst: &QaoaInstance, theta: &[f64], delta: &[f64]) -> Result<CVector> {
    let ha = inst.h_a.build(delta)?;
    let hb = inst.h_b.build(delta)?;
    let mut psi = inst.initial_state(delta)?;
    for pair in theta.chunks(2) {
        psi = CVector(expm_taylor(&ha, pair[0]).matvec(psi.as_slice()));
        if let Some(&b) = pair.get(1) {
            psi = CVector(expm_taylor(&hb, b).matvec(psi.as_slice()));
        }
    }
    Ok(psi)
}

pub fn dense_fidelity(inst: &QaoaInstance, theta: &[f64], delta: &[f64]) -> Result<f64> {
    let psi = dense_propagate(inst, theta, delta)?;
    Ok(inst.psi_t.inner(&psi).norm_sqr())
}

/// Central-difference gradient of `f` with step `h`.
pub fn fd_gradient(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            probe[j] = x[j] + h;
            let up = f(&probe);
            probe[j] = x[j] - h;
            let down = f(&probe);
            probe[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Best vertex of a fully bounded LP by brute force over all `n`-subsets of
/// active constraints. `None` when no feasible vertex exists.
pub fn lp_vertex_enumeration(lp: &LinearProgram) -> Option<(Vec<f64>, f64)> {
    let n = lp.n_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = lp.rows.clone();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lp.upper[j]));
        e[j] = -1.0;
        planes.push((e, -lp.lower[j]));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = subset.iter().map(|&k| planes[k].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&k| planes[k].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if lp.infeasibility(&x) <= 1e-9 {
                let obj: f64 = x.iter().zip(&lp.objective).map(|(p, q)| p * q).sum();
                if best.as_ref().is_none_or(|(_, v)| obj > *v) {
                    best = Some((x, obj));
                }
            }
        }
        if !next_combination(&mut subset, planes.len()) {
            break;
        }
    }
    best
}

fn next_combination(c: &mut [usize], total: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < total - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// `max over a grid of min_i q_i(s)` for concave quadratics
/// `q_i(s) = b_i + g_iᵀs + ½ sᵀH_i s`, zooming three times onto the best
/// grid cell. The objective is concave, so zooming cannot lose the maximum.
pub fn grid_maxmin(
    terms: &[(f64, Vec<f64>, Vec<Vec<f64>>)],
    lower: &[f64],
    upper: &[f64],
    points: usize,
) -> (Vec<f64>, f64) {
    let n = lower.len();
    let eval = |s: &[f64]| -> f64 {
        terms
            .iter()
            .map(|(b, g, h)| {
                let lin: f64 = g.iter().zip(s).map(|(p, q)| p * q).sum();
                let quad: f64 = (0..n)
                    .map(|i| (0..n).map(|j| s[i] * h[i][j] * s[j]).sum::<f64>())
                    .sum();
                b + lin + 0.5 * quad
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut lo = lower.to_vec();
    let mut hi = upper.to_vec();
    let mut best = (vec![0.0; n], f64::NEG_INFINITY);
    for _zoom in 0..4 {
        let total = points.pow(n as u32);
        for idx in 0..total {
            let mut rem = idx;
            let s: Vec<f64> = (0..n)
                .map(|k| {
                    let i = rem % points;
                    rem /= points;
                    lo[k] + (hi[k] - lo[k]) * i as f64 / (points - 1) as f64
                })
                .collect();
            let v = eval(&s);
            if v > best.1 {
                best = (s, v);
            }
        }
        for k in 0..n {
            let w = 2.0 * (hi[k] - lo[k]) / (points - 1) as f64;
            lo[k] = (best.0[k] - w).max(lower[k]);
            hi[k] = (best.0[k] + w).min(upper[k]);
        }
    }
    best
}

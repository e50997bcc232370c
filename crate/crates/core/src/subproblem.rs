// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! The trust-region max-min subproblem solved at every SCP iteration.
//!
//! Each sampled fidelity is replaced by a local model around the current
//! controls and the step maximizing the smallest model value is found inside
//! the intersection of the control box and the trust region. Linear models
//! give an epigraph LP; concave quadratic models are handled by a
//! cutting-plane loop over the same LP solver.

use crate::densela::RMatrix;
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram};
use crate::qaoa::ThetaBox;

/// `b + gᵀs`
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSurrogate {
    pub base_value: f64,
    pub gradient: Vec<f64>,
}

impl LinearSurrogate {
    pub fn eval(&self, step: &[f64]) -> f64 {
        self.base_value + dot(&self.gradient, step)
    }
}

/// `b + gᵀs + ½ sᵀH₋s` with `H₋` negative semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSurrogate {
    pub base_value: f64,
    pub gradient: Vec<f64>,
    pub hess_minus: RMatrix,
}

impl QuadraticSurrogate {
    pub fn eval(&self, step: &[f64]) -> f64 {
        self.base_value + dot(&self.gradient, step) + 0.5 * self.hess_minus.quad_form(step)
    }

    pub fn slope(&self, step: &[f64]) -> Vec<f64> {
        self.hess_minus
            .matvec(step)
            .iter()
            .zip(&self.gradient)
            .map(|(h, g)| h + g)
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// ∞-norm trust region of diameter `d`: `|s_j| ≤ d/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRegion {
    diameter: f64,
}

impl TrustRegion {
    pub fn new(diameter: f64) -> Result<Self> {
        if !(diameter > 0.0 && diameter.is_finite()) {
            return Err(Error::InvalidArgument(format!("trust-region diameter {diameter} must be positive")));
        }
        Ok(Self { diameter })
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }
}

/// `max f₀  s.t.  f₀ ≤ bᵢ + gᵢᵀs,  lower ≤ s ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpigraphLp {
    pub surrogates: Vec<LinearSurrogate>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Step bounds `(Θ − θ) ∩ [−d/2, d/2]`.
pub fn step_bounds(theta: &[f64], theta_box: &ThetaBox, trust: TrustRegion) -> Result<(Vec<f64>, Vec<f64>)> {
    if theta.len() != theta_box.len() {
        return Err(Error::DimensionMismatch {
            expected: theta_box.len(),
            got: theta.len(),
        });
    }
    let half = 0.5 * trust.diameter();
    let mut lower = Vec::with_capacity(theta.len());
    let mut upper = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        let lo = (theta_box.lower[j] - theta[j]).max(-half);
        let hi = (theta_box.upper[j] - theta[j]).min(half);
        if lo > hi {
            return Err(Error::InfeasibleBounds(j));
        }
        lower.push(lo);
        upper.push(hi);
    }
    Ok((lower, upper))
}

pub fn build_epigraph(
    surrogates: Vec<LinearSurrogate>,
    theta: &[f64],
    theta_box: &ThetaBox,
    trust: TrustRegion,
) -> Result<EpigraphLp> {
    if surrogates.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    for s in &surrogates {
        if s.gradient.len() != theta.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.len(),
                got: s.gradient.len(),
            });
        }
    }
    let (lower, upper) = step_bounds(theta, theta_box, trust)?;
    Ok(EpigraphLp {
        surrogates,
        lower,
        upper,
    })
}

/// Optimal step and the predicted worst-case value `min_i (bᵢ + gᵢᵀs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemStep {
    pub step: Vec<f64>,
    pub predicted: f64,
}

/// Cuts `f₀ ≤ c + aᵀs` over the bounds. Step components whose range
/// contains zero are split into positive and negative parts so that
/// directions without any incentive stay at zero.
fn solve_cuts(cuts: &[(f64, Vec<f64>)], lower: &[f64], upper: &[f64]) -> Result<Vec<f64>> {
    let n = lower.len();
    let mut cols: Vec<(usize, f64)> = Vec::new();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for j in 0..n {
        if lower[j] <= 0.0 && upper[j] >= 0.0 {
            cols.push((j, 1.0));
            lo.push(0.0);
            hi.push(upper[j]);
            cols.push((j, -1.0));
            lo.push(0.0);
            hi.push(-lower[j]);
        } else {
            cols.push((j, 1.0));
            lo.push(lower[j]);
            hi.push(upper[j]);
        }
    }
    let nv = cols.len();
    let mut objective = vec![0.0; nv + 1];
    objective[nv] = 1.0;
    lo.push(f64::NEG_INFINITY);
    hi.push(f64::INFINITY);
    let rows = cuts
        .iter()
        .map(|(c, a)| {
            let mut row: Vec<f64> = cols.iter().map(|&(j, sign)| -sign * a[j]).collect();
            row.push(1.0);
            (row, *c)
        })
        .collect();
    let sol = lp::solve(&LinearProgram {
        objective,
        rows,
        lower: lo,
        upper: hi,
    })?;
    let mut step = vec![0.0; n];
    for (&(j, sign), v) in cols.iter().zip(&sol.x) {
        step[j] += sign * v;
    }
    for j in 0..n {
        step[j] = step[j].clamp(lower[j], upper[j]);
    }
    Ok(step)
}

/// Solves the epigraph LP; the prediction is recomputed from the returned
/// step so that it is consistent with the surrogates exactly.
pub fn solve_lp(problem: &EpigraphLp) -> Result<SubproblemStep> {
    let cuts: Vec<(f64, Vec<f64>)> = problem
        .surrogates
        .iter()
        .map(|s| (s.base_value, s.gradient.clone()))
        .collect();
    let step = solve_cuts(&cuts, &problem.lower, &problem.upper)?;
    let predicted = problem
        .surrogates
        .iter()
        .map(|s| s.eval(&step))
        .fold(f64::INFINITY, f64::min);
    Ok(SubproblemStep { step, predicted })
}

const KELLEY_MAX_CUTS: usize = 200;
const KELLEY_GAP: f64 = 1e-9;

/// Maximizes `min_i qᵢ(s)` for concave quadratic surrogates with Kelley's
/// cutting-plane method: tangent planes overestimate each `qᵢ`, so the LP
/// value bounds the optimum from above while the true value at each LP
/// solution bounds it from below.
pub fn solve_maxmin_quadratic(
    surrogates: &[QuadraticSurrogate],
    theta: &[f64],
    theta_box: &ThetaBox,
    trust: TrustRegion,
) -> Result<SubproblemStep> {
    if surrogates.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let (lower, upper) = step_bounds(theta, theta_box, trust)?;
    let n = theta.len();
    for s in surrogates {
        if s.gradient.len() != n || s.hess_minus.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.gradient.len(),
            });
        }
    }
    let true_min = |s: &[f64]| -> (usize, f64) {
        surrogates
            .iter()
            .enumerate()
            .map(|(i, q)| (i, q.eval(s)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    };

    let mut cuts: Vec<(f64, Vec<f64>)> = surrogates
        .iter()
        .map(|q| (q.base_value, q.gradient.clone()))
        .collect();
    let zero = vec![0.0; n];
    let mut best = SubproblemStep {
        predicted: true_min(&zero).1,
        step: zero,
    };
    for _ in 0..KELLEY_MAX_CUTS {
        let step = solve_cuts(&cuts, &lower, &upper)?;
        let upper_bound = cuts
            .iter()
            .map(|(c, a)| c + dot(a, &step))
            .fold(f64::INFINITY, f64::min);
        let (i, value) = true_min(&step);
        if value > best.predicted {
            best = SubproblemStep {
                step: step.clone(),
                predicted: value,
            };
        }
        if upper_bound - best.predicted <= KELLEY_GAP {
            break;
        }
        let slope = surrogates[i].slope(&step);
        cuts.push((value - dot(&slope, &step), slope));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::grid_maxmin;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lin(b: f64, g: &[f64]) -> LinearSurrogate {
        LinearSurrogate {
            base_value: b,
            gradient: g.to_vec(),
        }
    }

    fn unit_box(n: usize) -> ThetaBox {
        ThetaBox::uniform(n, -10.0, 10.0)
    }

    #[test]
    fn single_sample_moves_along_gradient_sign() {
        let lp = build_epigraph(vec![lin(0.5, &[1.0, -2.0, 0.0])], &[0.0; 3], &unit_box(3), TrustRegion::new(0.2).unwrap())
            .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.step, vec![0.1, -0.1, 0.0]);
        assert!((s.predicted - 0.8).abs() < 1e-12);
    }

    #[test]
    fn opposing_gradients_cancel() {
        let lp = build_epigraph(
            vec![lin(1.0, &[1.0]), lin(1.0, &[-1.0])],
            &[0.0],
            &unit_box(1),
            TrustRegion::new(1.0).unwrap(),
        )
        .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!(s.step[0].abs() < 1e-12);
        assert!((s.predicted - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_gradients_give_zero_step() {
        let lp = build_epigraph(
            vec![lin(0.3, &[0.0, 0.0]), lin(0.7, &[0.0, 0.0])],
            &[1.0, 1.0],
            &ThetaBox::uniform(2, 0.0, 2.0),
            TrustRegion::new(0.4).unwrap(),
        )
        .unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.step, vec![0.0, 0.0]);
        assert!((s.predicted - 0.3).abs() < 1e-15);
    }

    #[test]
    fn bounds_intersect_control_box() {
        let b = ThetaBox::uniform(2, 0.0, 2.0);
        let (lo, hi) = step_bounds(&[0.05, 1.95], &b, TrustRegion::new(0.4).unwrap()).unwrap();
        assert!((lo[0] + 0.05).abs() < 1e-15 && (hi[0] - 0.2).abs() < 1e-15);
        assert!((lo[1] + 0.2).abs() < 1e-15 && (hi[1] - 0.05).abs() < 1e-15);
        assert!(matches!(
            step_bounds(&[2.5, 1.0], &b, TrustRegion::new(0.4).unwrap()),
            Err(Error::InfeasibleBounds(0))
        ));
        assert!(TrustRegion::new(0.0).is_err());
    }

    #[test]
    fn agrees_with_vertex_enumeration() {
        use crate::oracles::lp_vertex_enumeration;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for case in 0..200 {
            let n = rng.random_range(1..=2);
            let l = rng.random_range(1..=4);
            let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
            let sur: Vec<LinearSurrogate> = (0..l)
                .map(|_| lin(rng.random_range(0.0..1.0), &(0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>()))
                .collect();
            let d = rng.random_range(0.05..1.0);
            let ep = build_epigraph(sur.clone(), &theta, &ThetaBox::uniform(n, 0.0, 2.0), TrustRegion::new(d).unwrap()).unwrap();
            let s = solve_lp(&ep).unwrap();
            // oracle LP over (s, f₀) with f₀ boxed by the surrogate range
            let mut rows = Vec::new();
            for q in &sur {
                let mut r: Vec<f64> = q.gradient.iter().map(|g| -g).collect();
                r.push(1.0);
                rows.push((r, q.base_value));
            }
            let mut lower = ep.lower.clone();
            lower.push(-10.0);
            let mut upper = ep.upper.clone();
            upper.push(10.0);
            let mut objective = vec![0.0; n];
            objective.push(1.0);
            let (_, best) = lp_vertex_enumeration(&LinearProgram { objective, rows, lower, upper }).unwrap();
            assert!((s.predicted - best).abs() < 1e-9, "case {case}");
            for j in 0..n {
                assert!(s.step[j] >= ep.lower[j] - 1e-12 && s.step[j] <= ep.upper[j] + 1e-12);
            }
        }
    }

    fn quad(b: f64, g: &[f64], h: &[&[f64]]) -> QuadraticSurrogate {
        let n = g.len();
        QuadraticSurrogate {
            base_value: b,
            gradient: g.to_vec(),
            hess_minus: RMatrix::from_fn(n, |i, j| h[i][j]),
        }
    }

    #[test]
    fn concave_parabola_peak() {
        // s − s² on [−1, 1]
        let q = quad(0.0, &[1.0], &[&[-2.0]]);
        let s = solve_maxmin_quadratic(&[q], &[0.0], &unit_box(1), TrustRegion::new(2.0).unwrap()).unwrap();
        assert!((s.step[0] - 0.5).abs() < 1e-4);
        assert!((s.predicted - 0.25).abs() < 1e-8);
    }

    #[test]
    fn quadratic_mode_reduces_to_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = 3;
            let sur: Vec<LinearSurrogate> = (0..4)
                .map(|_| lin(rng.random_range(0.0..1.0), &(0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>()))
                .collect();
            let quads: Vec<QuadraticSurrogate> = sur
                .iter()
                .map(|s| QuadraticSurrogate {
                    base_value: s.base_value,
                    gradient: s.gradient.clone(),
                    hess_minus: RMatrix::zeros(n),
                })
                .collect();
            let theta = vec![1.0; n];
            let tr = TrustRegion::new(0.3).unwrap();
            let b = ThetaBox::uniform(n, 0.0, 2.0);
            let a = solve_lp(&build_epigraph(sur, &theta, &b, tr).unwrap()).unwrap();
            let q = solve_maxmin_quadratic(&quads, &theta, &b, tr).unwrap();
            assert!((a.predicted - q.predicted).abs() < 1e-6);
        }
    }

    #[test]
    fn quadratic_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let terms: Vec<(f64, Vec<f64>, Vec<Vec<f64>>)> = (0..3)
                .map(|_| {
                    let a: f64 = rng.random_range(0.2..2.0);
                    let c: f64 = rng.random_range(0.2..2.0);
                    let r: f64 = rng.random_range(-1.0..1.0);
                    let off = r * (a * c).sqrt() * 0.9;
                    (
                        rng.random_range(0.0..1.0),
                        vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                        vec![vec![-a, -off], vec![-off, -c]],
                    )
                })
                .collect();
            let quads: Vec<QuadraticSurrogate> = terms
                .iter()
                .map(|(b, g, h)| quad(*b, g, &[&h[0], &h[1]]))
                .collect();
            let tr = TrustRegion::new(1.0).unwrap();
            let s = solve_maxmin_quadratic(&quads, &[0.0, 0.0], &unit_box(2), tr).unwrap();
            let (_, oracle) = grid_maxmin(&terms, &[-0.5, -0.5], &[0.5, 0.5], 201);
            assert!(s.predicted >= oracle - 1e-4, "{} vs {oracle}", s.predicted);
            // the reported value is attained at a feasible step, so it cannot overshoot
            assert!(s.step.iter().all(|x| x.abs() <= 0.5 + 1e-12));
            let attained = quads.iter().map(|q| q.eval(&s.step)).fold(f64::INFINITY, f64::min);
            assert_eq!(s.predicted, attained);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lp_step_is_feasible_and_no_worse_than_zero(
            seed in 0u64..10_000,
            l in 1usize..6,
            n in 1usize..5,
            d in 0.01f64..1.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
            let sur: Vec<LinearSurrogate> = (0..l)
                .map(|_| lin(rng.random_range(0.0..1.0), &(0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>()))
                .collect();
            let b = ThetaBox::uniform(n, 0.0, 2.0);
            let ep = build_epigraph(sur.clone(), &theta, &b, TrustRegion::new(d).unwrap()).unwrap();
            let s = solve_lp(&ep).unwrap();
            for j in 0..n {
                prop_assert!(s.step[j].abs() <= d / 2.0 + 1e-9);
                prop_assert!(theta[j] + s.step[j] >= -1e-9 && theta[j] + s.step[j] <= 2.0 + 1e-9);
            }
            let at_zero = sur.iter().map(|q| q.base_value).fold(f64::INFINITY, f64::min);
            prop_assert!(s.predicted >= at_zero - 1e-9);

            // shrinking the region never raises the optimum
            let ep_small = build_epigraph(sur, &theta, &b, TrustRegion::new(d / 2.0).unwrap()).unwrap();
            prop_assert!(solve_lp(&ep_small).unwrap().predicted <= s.predicted + 1e-9);
        }
    }
}

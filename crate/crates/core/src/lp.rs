// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense bounded-variable primal simplex with Bland's rule.
//!
//! Solves `max cᵀx  s.t.  A x ≤ b,  l ≤ x ≤ u` where bounds may be
//! infinite. Problems here have at most a few hundred rows and columns, so
//! the full tableau is kept.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

/// `max objectiveᵀ x` subject to `rows` (`aᵀx ≤ b`) and box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        for len in [self.lower.len(), self.upper.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        for (a, b) in &self.rows {
            if a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: a.len() });
            }
            if !b.is_finite() || a.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalFailure("non-finite constraint data".into()));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure("non-finite objective".into()));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::InfeasibleBounds(j));
            }
            if l > u {
                return Err(Error::InfeasibleBounds(j));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn infeasibility(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|(a, b)| {
            let ax: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            (ax - b).max(0.0)
        });
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| (l - v).max(v - u).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

/// How an original variable maps onto the nonnegative tableau columns:
/// `x = offset + sign·y_col (− y_col2)`.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    Shift { col: usize, offset: f64, sign: f64 },
    Free { pos: usize, neg: usize },
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// Current `B⁻¹A`, row-major `m × ncols`.
    t: Vec<f64>,
    /// Values of the basic variables.
    beta: Vec<f64>,
    basis: Vec<usize>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
    reduced: Vec<f64>,
}

enum Step {
    Optimal,
    Moved,
}

impl Tableau {
    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.ncols..(i + 1) * self.ncols]
    }

    fn set_costs(&mut self, cost: &[f64]) {
        for j in 0..self.ncols {
            let mut d = cost[j];
            for i in 0..self.m {
                d -= cost[self.basis[i]] * self.t[i * self.ncols + j];
            }
            self.reduced[j] = d;
        }
    }

    fn value(&self, j: usize) -> f64 {
        if self.is_basic[j] {
            let i = self.basis.iter().position(|&b| b == j).unwrap();
            self.beta[i]
        } else if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    fn iterate(&mut self) -> Result<Step> {
        // Bland: lowest-index improving column.
        let entering = (0..self.ncols).find(|&j| {
            !self.is_basic[j]
                && self.upper[j] > 0.0
                && ((!self.at_upper[j] && self.reduced[j] > COST_TOL)
                    || (self.at_upper[j] && self.reduced[j] < -COST_TOL))
        });
        let Some(j) = entering else {
            return Ok(Step::Optimal);
        };
        let dir = if self.at_upper[j] { -1.0 } else { 1.0 };

        // Ratio test; `None` row means a bound flip of the entering column.
        let mut best_t = self.upper[j];
        let mut best: Option<usize> = None;
        let mut best_var = j;
        for i in 0..self.m {
            let alpha = self.t[i * self.ncols + j] * dir;
            let limit = if alpha > PIVOT_TOL {
                self.beta[i].max(0.0) / alpha
            } else if alpha < -PIVOT_TOL && self.upper[self.basis[i]].is_finite() {
                (self.upper[self.basis[i]] - self.beta[i]).max(0.0) / -alpha
            } else {
                continue;
            };
            let var = self.basis[i];
            let tie = (limit - best_t).abs() <= 1e-12 * (1.0 + best_t.abs().min(1e12));
            if limit < best_t && !tie || (tie && var < best_var) {
                best_t = limit;
                best = Some(i);
                best_var = var;
            }
        }
        if best_t.is_infinite() {
            return Err(Error::Unbounded);
        }

        for i in 0..self.m {
            self.beta[i] -= self.t[i * self.ncols + j] * dir * best_t;
        }
        let Some(r) = best else {
            self.at_upper[j] = !self.at_upper[j];
            return Ok(Step::Moved);
        };

        let leaving = self.basis[r];
        let alpha = self.t[r * self.ncols + j] * dir;
        let entering_value = if dir > 0.0 { best_t } else { self.upper[j] - best_t };
        self.is_basic[leaving] = false;
        self.at_upper[leaving] = alpha < 0.0;
        self.is_basic[j] = true;
        self.at_upper[j] = false;
        self.basis[r] = j;
        self.beta[r] = entering_value;

        let n = self.ncols;
        let piv = self.t[r * n + j];
        for v in &mut self.t[r * n..(r + 1) * n] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.row(r).to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * n + j];
            if f != 0.0 {
                for (v, p) in self.t[i * n..(i + 1) * n].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                self.t[i * n + j] = 0.0;
            }
        }
        let f = self.reduced[j];
        for (v, p) in self.reduced.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        self.reduced[j] = 0.0;
        Ok(Step::Moved)
    }

    fn run(&mut self) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            if let Step::Optimal = self.iterate()? {
                return Ok(());
            }
        }
        Err(Error::NumericalFailure("simplex pivot limit reached".into()))
    }
}

/// Optimal basic solution of `lp`.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.n_vars();
    let m = lp.rows.len();

    let mut maps = Vec::with_capacity(n);
    let mut col_upper = Vec::new();
    let mut col_cost = Vec::new();
    for j in 0..n {
        let (l, u, c) = (lp.lower[j], lp.upper[j], lp.objective[j]);
        if l.is_finite() {
            maps.push(VarMap::Shift { col: col_upper.len(), offset: l, sign: 1.0 });
            col_upper.push(u - l);
            col_cost.push(c);
        } else if u.is_finite() {
            maps.push(VarMap::Shift { col: col_upper.len(), offset: u, sign: -1.0 });
            col_upper.push(f64::INFINITY);
            col_cost.push(-c);
        } else {
            let pos = col_upper.len();
            maps.push(VarMap::Free { pos, neg: pos + 1 });
            col_upper.extend([f64::INFINITY, f64::INFINITY]);
            col_cost.extend([c, -c]);
        }
    }
    let n_struct = col_upper.len();

    // Structural coefficients and shifted right-hand sides.
    let mut a = vec![0.0; m * n_struct];
    let mut rhs = vec![0.0; m];
    for (i, (row, b)) in lp.rows.iter().enumerate() {
        let mut shift = 0.0;
        for (j, &coef) in row.iter().enumerate() {
            match maps[j] {
                VarMap::Shift { col, offset, sign } => {
                    a[i * n_struct + col] = coef * sign;
                    shift += coef * offset;
                }
                VarMap::Free { pos, neg } => {
                    a[i * n_struct + pos] = coef;
                    a[i * n_struct + neg] = -coef;
                }
            }
        }
        rhs[i] = b - shift;
    }

    let art_rows: Vec<usize> = (0..m).filter(|&i| rhs[i] < 0.0).collect();
    let ncols = n_struct + m + art_rows.len();
    let mut t = vec![0.0; m * ncols];
    let mut basis = vec![0; m];
    let mut beta = vec![0.0; m];
    let mut art_col = n_struct + m;
    for i in 0..m {
        let flip = if rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n_struct {
            t[i * ncols + j] = flip * a[i * n_struct + j];
        }
        t[i * ncols + n_struct + i] = flip;
        beta[i] = flip * rhs[i];
        if flip < 0.0 {
            t[i * ncols + art_col] = 1.0;
            basis[i] = art_col;
            art_col += 1;
        } else {
            basis[i] = n_struct + i;
        }
    }
    let mut upper = col_upper.clone();
    upper.extend(std::iter::repeat_n(f64::INFINITY, m + art_rows.len()));
    let mut is_basic = vec![false; ncols];
    for &b in &basis {
        is_basic[b] = true;
    }
    let mut tab = Tableau {
        m,
        ncols,
        t,
        beta,
        basis,
        upper,
        at_upper: vec![false; ncols],
        is_basic,
        reduced: vec![0.0; ncols],
    };

    if !art_rows.is_empty() {
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(n_struct + m) {
            *c = -1.0;
        }
        tab.set_costs(&cost);
        tab.run()?;
        let residual: f64 = (n_struct + m..ncols).map(|j| tab.value(j)).sum();
        if residual > FEAS_TOL {
            return Err(Error::Infeasible);
        }
        for j in n_struct + m..ncols {
            tab.upper[j] = 0.0;
            if let Some(i) = tab.basis.iter().position(|&b| b == j) {
                tab.beta[i] = 0.0;
            }
        }
    }

    let mut cost = col_cost;
    cost.resize(ncols, 0.0);
    tab.set_costs(&cost);
    tab.run()?;

    let y: Vec<f64> = (0..n_struct).map(|j| tab.value(j)).collect();
    let x: Vec<f64> = maps
        .iter()
        .enumerate()
        .map(|(j, map)| {
            let v = match *map {
                VarMap::Shift { col, offset, sign } => offset + sign * y[col],
                VarMap::Free { pos, neg } => y[pos] - y[neg],
            };
            v.clamp(lp.lower[j], lp.upper[j])
        })
        .collect();
    let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective })
}

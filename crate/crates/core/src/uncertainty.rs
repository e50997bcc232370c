// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Uncertainty boxes, their finite samplings, and worst-case evaluation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qaoa::{fidelities, fidelity};
use crate::spinmodel::QaoaInstance;

/// Upper limit on the size of any enumerated sample set.
pub const MAX_SAMPLES: usize = 10_000;

/// Axis-aligned box Δ of admissible uncertainty values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl UncertaintyBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidArgument("uncertainty box has no axes".into()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidArgument(format!(
                    "axis {i}: bounds [{lo}, {hi}] are not an interval"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// A box collapsed to a single point.
    pub fn point(p: Vec<f64>) -> Result<Self> {
        Self::new(p.clone(), p)
    }

    /// `[lo, hi]^dim`
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_degenerate_axis(&self, axis: usize) -> bool {
        self.lower[axis] == self.upper[axis]
    }

    pub fn contains(&self, delta: &[f64]) -> bool {
        delta.len() == self.dim()
            && delta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(d, (lo, hi))| d >= lo && d <= hi)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    /// The box shrunk about `anchor` by `factor` (e.g. Δ/2 about δ = 0).
    pub fn scaled_about(&self, anchor: &[f64], factor: f64) -> Result<Self> {
        let map = |x: &f64, a: &f64| a + factor * (x - a);
        Self::new(
            self.lower.iter().zip(anchor).map(|(x, a)| map(x, a)).collect(),
            self.upper.iter().zip(anchor).map(|(x, a)| map(x, a)).collect(),
        )
    }

    /// One uniform draw from the box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| if lo == hi { lo } else { rng.random_range(lo..=hi) })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Grid,
    Random,
    Adversarial,
}

/// Finite realization `{δᵢ}` of an uncertainty box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    samples: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl SampleSet {
    /// Checks the set is nonempty, inside `bounds` and free of exact duplicates.
    pub fn new(samples: Vec<Vec<f64>>, bounds: &UncertaintyBox, provenance: Provenance) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        if samples.len() > MAX_SAMPLES {
            return Err(Error::TooManySamples(samples.len()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !bounds.contains(s) {
                return Err(Error::InvalidArgument(format!("sample {i} lies outside the box")));
            }
        }
        let mut keys: Vec<Vec<u64>> = samples
            .iter()
            .map(|s| s.iter().map(|x| x.to_bits()).collect())
            .collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate samples".into()));
        }
        Ok(Self {
            samples,
            provenance,
        })
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `n` evenly spaced points on `[lo, hi]` with both ends exact; a single
/// point sits at the midpoint.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo == hi {
        return vec![lo];
    }
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                let t = k as f64 / (n - 1) as f64;
                lo * (1.0 - t) + hi * t
            }
        })
        .collect()
}

/// Cartesian grid over the box, last axis varying fastest. Degenerate axes
/// contribute a single point.
pub fn sample_grid(bounds: &UncertaintyBox, points_per_axis: usize) -> Result<SampleSet> {
    if points_per_axis == 0 {
        return Err(Error::InvalidArgument("points_per_axis must be positive".into()));
    }
    let axes: Vec<Vec<f64>> = (0..bounds.dim())
        .map(|k| linspace(bounds.lower[k], bounds.upper[k], points_per_axis))
        .collect();
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .unwrap_or(usize::MAX);
    if total > MAX_SAMPLES {
        return Err(Error::TooManySamples(total));
    }
    let mut samples = vec![Vec::new()];
    for axis in &axes {
        samples = samples
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    SampleSet::new(samples, bounds, Provenance::Grid)
}

/// Minimum and mean of a set of fidelities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstAverage {
    pub worst: f64,
    pub average: f64,
    /// Lowest index attaining `worst`.
    pub argmin: usize,
}

pub fn summarize(values: &[f64]) -> Result<WorstAverage> {
    if values.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let mut argmin = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[argmin] {
            argmin = i;
        }
    }
    Ok(WorstAverage {
        worst: values[argmin],
        average: values.iter().sum::<f64>() / values.len() as f64,
        argmin,
    })
}

/// Worst-case and average fidelity over the samples, in sample order.
pub fn worst_and_average(inst: &QaoaInstance, theta: &[f64], samples: &SampleSet) -> Result<WorstAverage> {
    summarize(&fidelities(inst, theta, samples.samples())?)
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const COARSE_POINTS: usize = 9;
const GOLDEN_ITERS: usize = 30;

/// Approximate `argmin_δ F(θ, δ)` over the box: a 9-per-axis grid scan
/// followed by `refine_iters` rounds of per-coordinate golden-section
/// searches over a window that halves each round. Only strict improvements
/// are taken, so the result is never worse than the best grid point.
pub fn adversarial_sample(
    inst: &QaoaInstance,
    theta: &[f64],
    bounds: &UncertaintyBox,
    refine_iters: usize,
) -> Result<Vec<f64>> {
    let grid = sample_grid(bounds, COARSE_POINTS)?;
    let values = fidelities(inst, theta, grid.samples())?;
    let start = summarize(&values)?;
    let mut best = grid.samples()[start.argmin].clone();
    let mut best_f = start.worst;

    let mut window: Vec<f64> = (0..bounds.dim())
        .map(|k| (bounds.upper[k] - bounds.lower[k]) / (COARSE_POINTS - 1) as f64)
        .collect();
    for _round in 0..refine_iters {
        for k in 0..bounds.dim() {
            if bounds.is_degenerate_axis(k) {
                continue;
            }
            let lo = (best[k] - window[k]).max(bounds.lower[k]);
            let hi = (best[k] + window[k]).min(bounds.upper[k]);
            let mut probe = best.clone();
            let mut eval = |x: f64| -> Result<f64> {
                probe[k] = x;
                fidelity(inst, theta, &probe)
            };
            let (x, fx) = golden_section_min(&mut eval, lo, hi)?;
            if fx < best_f {
                best_f = fx;
                best[k] = x;
            }
            window[k] *= 0.5;
        }
    }
    Ok(best)
}

fn golden_section_min(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

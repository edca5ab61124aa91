//! Dominance relations, non-dominated filtering and grid brute-force
//! extraction of Pareto optimal sets and fronts.
//!
//! Comparisons are exact: no epsilon enters the relations, so they satisfy
//! the partial-order laws. Tolerances belong to the analysis layer.

use std::cmp::Ordering;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicProblem;
use crate::error::{check_dim, Error, Result};
use crate::types::{DecisionVector, ObjectiveVector};

/// Default ceiling on grid evaluations.
pub const DEFAULT_GRID_BUDGET: u64 = 10_000_000;

/// `v <_p w`: every component strictly smaller.
pub fn strictly_less(v: &[f64], w: &[f64]) -> Result<bool> {
    check_dim(v.len(), w.len())?;
    Ok(v.iter().zip(w).all(|(a, b)| a < b))
}

/// `v <=_p w`: every component smaller or equal.
pub fn weakly_less(v: &[f64], w: &[f64]) -> Result<bool> {
    check_dim(v.len(), w.len())?;
    Ok(v.iter().zip(w).all(|(a, b)| a <= b))
}

/// `u` dominates `v`: `u <=_p v` and strictly better somewhere.
pub fn dominates(u: &[f64], v: &[f64]) -> Result<bool> {
    check_dim(u.len(), v.len())?;
    Ok(dominates_unchecked(u, v))
}

#[inline]
pub(crate) fn dominates_unchecked(u: &[f64], v: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Indices (ascending) of the points no other point dominates. Equal
/// non-dominated vectors are all kept.
///
/// A dominator always precedes its victim in lexicographic order, and a
/// rejected point's dominator is itself dominated by an accepted one, so
/// each point is only checked against the front accepted so far.
pub fn non_dominated_filter<V: AsRef<[f64]> + Sync>(points: &[V]) -> Result<Vec<usize>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let k = first.as_ref().len();
    for p in points {
        check_dim(k, p.as_ref().len())?;
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.par_sort_by(|&a, &b| lexicographic(points[a].as_ref(), points[b].as_ref()));

    let mut front: Vec<usize> = Vec::new();
    for &i in &order {
        let candidate = points[i].as_ref();
        if !front
            .iter()
            .any(|&j| dominates_unchecked(points[j].as_ref(), candidate))
        {
            front.push(i);
        }
    }
    front.sort_unstable();
    Ok(front)
}

/// True when no member dominates another.
///
/// With two objectives, lexicographic order leaves each distinct point
/// with a strictly smaller `f_2` than its predecessor exactly when the set
/// is mutually non-dominated.
pub fn is_mutually_non_dominated<V: AsRef<[f64]>>(points: &[V]) -> bool {
    if points.iter().all(|p| p.as_ref().len() == 2) {
        let mut sorted: Vec<&[f64]> = points.iter().map(AsRef::as_ref).collect();
        sorted.sort_by(|a, b| lexicographic(a, b));
        return sorted.windows(2).all(|w| w[0] == w[1] || w[1][1] < w[0][1]);
    }
    points.iter().all(|u| {
        points
            .iter()
            .all(|v| !dominates_unchecked(u.as_ref(), v.as_ref()))
    })
}

/// Cartesian lattice over the problem bounds, both endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    resolution: Vec<usize>,
    budget: u64,
}

impl Grid {
    /// The same number of points on every axis.
    pub fn uniform(points: usize) -> Self {
        Self {
            resolution: vec![points],
            budget: DEFAULT_GRID_BUDGET,
        }
    }

    pub fn per_dimension(points: Vec<usize>) -> Self {
        Self {
            resolution: points,
            budget: DEFAULT_GRID_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn resolution(&self, axis: usize) -> usize {
        if self.resolution.len() == 1 {
            self.resolution[0]
        } else {
            self.resolution[axis]
        }
    }

    /// Axis coordinates over `[lower, upper]`. A degenerate axis
    /// (`lower == upper`) contributes its single value.
    pub fn axes(&self, lower: &[f64], upper: &[f64]) -> Result<Vec<Vec<f64>>> {
        if self.resolution.len() != 1 {
            check_dim(lower.len(), self.resolution.len())?;
        }
        (0..lower.len())
            .map(|i| {
                let (lo, hi) = (lower[i], upper[i]);
                if lo == hi {
                    return Ok(vec![lo]);
                }
                let r = self.resolution(i);
                if r < 2 {
                    return Err(Error::Config(format!(
                        "grid resolution on axis {i} must be at least 2, got {r}"
                    )));
                }
                let last = (r - 1) as f64;
                Ok((0..r)
                    .map(|j| {
                        if j == r - 1 {
                            hi
                        } else {
                            lo + (hi - lo) * j as f64 / last
                        }
                    })
                    .collect())
            })
            .collect()
    }

    /// Largest cell edge along each axis.
    pub fn cell_sizes(&self, lower: &[f64], upper: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .axes(lower, upper)?
            .iter()
            .map(|axis| {
                axis.windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(0.0, f64::max)
            })
            .collect())
    }

    /// Euclidean length of the grid cell diagonal.
    pub fn cell_diagonal(&self, lower: &[f64], upper: &[f64]) -> Result<f64> {
        Ok(self
            .cell_sizes(lower, upper)?
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt())
    }
}

/// Pareto optimal set and front approximation at one time slice.
/// `pos[i]` maps to `pof[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontSnapshot {
    pub t: f64,
    pub pos: Vec<DecisionVector>,
    pub pof: Vec<ObjectiveVector>,
}

impl FrontSnapshot {
    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn is_mutually_non_dominated(&self) -> bool {
        is_mutually_non_dominated(&self.pof)
    }
}

fn decode(mut index: u128, axes: &[Vec<f64>]) -> Vec<f64> {
    // last axis varies fastest
    let mut x = vec![0.0; axes.len()];
    for (slot, axis) in x.iter_mut().zip(axes).rev() {
        let len = axis.len() as u128;
        *slot = axis[(index % len) as usize];
        index /= len;
    }
    x
}

/// Evaluates the problem on the full grid at fixed `t` and keeps the
/// non-dominated points. Grid chunks are evaluated in parallel; the result
/// depends only on the grid.
pub fn brute_force_front(problem: &DynamicProblem, t: f64, grid: &Grid) -> Result<FrontSnapshot> {
    let bounds = problem.bounds();
    let axes = grid.axes(bounds.lower(), bounds.upper())?;
    let required = axes
        .iter()
        .try_fold(1u128, |acc, a| acc.checked_mul(a.len() as u128))
        .unwrap_or(u128::MAX);
    if required > u128::from(grid.budget) {
        return Err(Error::Capacity {
            required,
            budget: grid.budget,
        });
    }
    let values: Vec<ObjectiveVector> = (0..required as u64)
        .into_par_iter()
        .map(|i| problem.evaluate(&decode(u128::from(i), &axes), t))
        .collect::<Result<_>>()?;
    let keep = non_dominated_filter(&values)?;
    let mut pos = Vec::with_capacity(keep.len());
    let mut pof = Vec::with_capacity(keep.len());
    for i in keep {
        pos.push(DecisionVector(decode(i as u128, &axes)));
        pof.push(values[i].clone());
    }
    Ok(FrontSnapshot { t, pos, pof })
}

/// Writes snapshots as CSV: `t, x_1..x_n, f_1..f_k`, one row per POS member.
pub fn write_fronts_csv<W: Write>(
    snapshots: &[FrontSnapshot],
    n: usize,
    k: usize,
    mut out: W,
) -> io::Result<()> {
    let mut header = vec![String::from("t")];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=k).map(|i| format!("f_{i}")));
    writeln!(out, "{}", header.join(","))?;
    for snap in snapshots {
        for (x, f) in snap.pos.iter().zip(&snap.pof) {
            let mut row = vec![snap.t.to_string()];
            row.extend(x.iter().map(f64::to_string));
            row.extend(f.iter().map(f64::to_string));
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}

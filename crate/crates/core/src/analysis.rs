//! Order-class lookup, Type I-IV change classification over grid fronts,
//! and front quality metrics (IGD, 2-D hypervolume).

use std::fmt;
use std::io::{self, Write};

use crate::dynamics::{DynamicProblem, Order};
use crate::error::{check_dim, Error, Result};
use crate::pareto::{brute_force_front, dominates_unchecked, FrontSnapshot, Grid};
use crate::rng::Rng;

/// Which of the Pareto set and front move over time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChangeType {
    /// Set changes, front static.
    TypeI,
    /// Both change.
    TypeII,
    /// Front changes, set static.
    TypeIII,
    /// Neither changes.
    TypeIV,
}

impl ChangeType {
    pub fn from_changes(pos_changed: bool, pof_changed: bool) -> Self {
        match (pos_changed, pof_changed) {
            (true, false) => ChangeType::TypeI,
            (true, true) => ChangeType::TypeII,
            (false, true) => ChangeType::TypeIII,
            (false, false) => ChangeType::TypeIV,
        }
    }
}

impl fmt::Display for ChangeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChangeType::TypeI => "Type I",
            ChangeType::TypeII => "Type II",
            ChangeType::TypeIII => "Type III",
            ChangeType::TypeIV => "Type IV",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Static,
    FirstOrder,
    SecondOrder,
    ThirdOrder,
    FourthOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Correlation {
    Independent,
    Correlated,
}

/// A cell of the order table: where the dynamics enter and whether
/// successive system states depend on each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrderClass {
    pub kind: OrderKind,
    pub correlation: Correlation,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Static => "static",
            OrderKind::FirstOrder => "first order",
            OrderKind::SecondOrder => "second order",
            OrderKind::ThirdOrder => "third order",
            OrderKind::FourthOrder => "fourth order",
        })
    }
}

impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Correlation::Independent => "independent",
            Correlation::Correlated => "correlated",
        })
    }
}

/// Parameters and functions with independent states are first and second
/// order; either with correlated states is third order; a changing
/// environment is fourth order regardless.
pub fn order_of(problem: &DynamicProblem) -> OrderClass {
    let correlation = if problem.history().is_some() {
        Correlation::Correlated
    } else {
        Correlation::Independent
    };
    let kind = match problem.order() {
        Order::Static => OrderKind::Static,
        Order::First => OrderKind::FirstOrder,
        Order::Second => OrderKind::SecondOrder,
        Order::ThirdParam | Order::ThirdFunc => OrderKind::ThirdOrder,
        Order::Fourth => OrderKind::FourthOrder,
    };
    OrderClass { kind, correlation }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn directed(a: &[impl AsRef<[f64]>], b: &[impl AsRef<[f64]>]) -> f64 {
    a.iter()
        .map(|p| {
            b.iter()
                .map(|q| euclidean(p.as_ref(), q.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance. Two empty sets are at distance 0; an empty
/// and a non-empty set are infinitely apart.
pub fn hausdorff<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b).max(directed(b, a)),
    }
}

/// Default change tolerance: twice the grid cell diagonal.
pub fn default_eps(problem: &DynamicProblem, grid: &Grid) -> Result<f64> {
    let b = problem.bounds();
    Ok(2.0 * grid.cell_diagonal(b.lower(), b.upper())?)
}

/// Comparison of two consecutive snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct PairChange {
    pub t_from: f64,
    pub t_to: f64,
    pub pos_distance: f64,
    pub pof_distance: f64,
    pub pos_changed: bool,
    pub pof_changed: bool,
}

impl PairChange {
    pub fn change_type(&self) -> ChangeType {
        ChangeType::from_changes(self.pos_changed, self.pof_changed)
    }
}

#[derive(Clone, Debug)]
pub struct ChangeReport {
    pub snapshots: Vec<FrontSnapshot>,
    pub pairs: Vec<PairChange>,
    pub change_type: ChangeType,
}

/// Classifies a timeline of snapshots. A set counts as changed when the
/// Hausdorff distance between any two consecutive snapshots exceeds `eps`;
/// sets are compared in decision space, fronts in objective space.
pub fn classify_snapshots(snapshots: Vec<FrontSnapshot>, eps: f64) -> Result<ChangeReport> {
    if snapshots.len() < 2 {
        return Err(Error::Config(
            "change classification needs at least two sampled times".into(),
        ));
    }
    let pairs: Vec<PairChange> = snapshots
        .windows(2)
        .map(|w| {
            let pos_distance = hausdorff(&w[0].pos, &w[1].pos);
            let pof_distance = hausdorff(&w[0].pof, &w[1].pof);
            PairChange {
                t_from: w[0].t,
                t_to: w[1].t,
                pos_distance,
                pof_distance,
                pos_changed: pos_distance > eps,
                pof_changed: pof_distance > eps,
            }
        })
        .collect();
    let pos_changed = pairs.iter().any(|p| p.pos_changed);
    let pof_changed = pairs.iter().any(|p| p.pof_changed);
    Ok(ChangeReport {
        snapshots,
        pairs,
        change_type: ChangeType::from_changes(pos_changed, pof_changed),
    })
}

/// Grid fronts at each time, evaluated on the problem's current state.
pub fn analyze_change(
    problem: &DynamicProblem,
    times: &[f64],
    grid: &Grid,
    eps: f64,
) -> Result<ChangeReport> {
    let snapshots = times
        .iter()
        .map(|&t| brute_force_front(problem, t, grid))
        .collect::<Result<Vec<_>>>()?;
    classify_snapshots(snapshots, eps)
}

pub fn classify_change_type(
    problem: &DynamicProblem,
    times: &[f64],
    grid: &Grid,
    eps: f64,
) -> Result<ChangeType> {
    Ok(analyze_change(problem, times, grid, eps)?.change_type)
}

/// Like [`analyze_change`], but advances the problem to the change step of
/// each sampled time first. State-dependent problems need non-decreasing
/// times.
pub fn analyze_change_advancing(
    problem: &mut DynamicProblem,
    times: &[f64],
    grid: &Grid,
    eps: f64,
    rng: &mut Rng,
) -> Result<ChangeReport> {
    let stateful = problem.history().is_some();
    let mut snapshots = Vec::with_capacity(times.len());
    for &t in times {
        let target = problem.time_model().step_at(t);
        if stateful && target < problem.step() {
            return Err(Error::Config(format!(
                "sampled times must be non-decreasing for state-dependent problems (t = {t})"
            )));
        }
        while problem.step() < target {
            problem.advance(rng)?;
        }
        snapshots.push(brute_force_front(problem, t, grid)?);
    }
    classify_snapshots(snapshots, eps)
}

/// Inverted generational distance: mean distance from each reference point
/// to its nearest approximation point.
pub fn igd<A: AsRef<[f64]>, R: AsRef<[f64]>>(approx: &[A], reference: &[R]) -> Result<f64> {
    if approx.is_empty() {
        return Err(Error::EmptyInput("igd approximation set"));
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("igd reference set"));
    }
    let k = reference[0].as_ref().len();
    for v in approx.iter().map(AsRef::as_ref).chain(reference.iter().map(AsRef::as_ref)) {
        check_dim(k, v.len())?;
    }
    let total: f64 = reference
        .iter()
        .map(|r| {
            approx
                .iter()
                .map(|a| euclidean(r.as_ref(), a.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hypervolume {
    pub volume: f64,
    /// Points left out because they do not dominate the reference point.
    pub excluded: usize,
}

/// Area dominated by a two-objective front and bounded by `reference`.
/// Sorted by `f_1`, each point adds the rectangle below the best `f_2` so far.
pub fn hypervolume_2d<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> Result<Hypervolume> {
    check_dim(2, reference.len())?;
    let mut points = Vec::with_capacity(front.len());
    let mut excluded = 0;
    for p in front {
        let p = p.as_ref();
        check_dim(2, p.len())?;
        if dominates_unchecked(p, reference) {
            points.push([p[0], p[1]]);
        } else {
            excluded += 1;
        }
    }
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for [f1, f2] in points {
        if f2 < ceiling {
            volume += (reference[0] - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    Ok(Hypervolume { volume, excluded })
}

/// Writes `t, order, correlation, pos_changed, pof_changed, type, igd, hv`:
/// one row per consecutive pair (labelled by the later time) and a final
/// `overall` row. `igd` measures the earlier front against the later one.
pub fn write_classification_csv<W: Write>(
    report: &ChangeReport,
    class: OrderClass,
    hv_reference: Option<&[f64]>,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "t,order,correlation,pos_changed,pof_changed,type,igd,hv")?;
    for (pair, w) in report.pairs.iter().zip(report.snapshots.windows(2)) {
        let igd = igd(&w[0].pof, &w[1].pof)
            .map(|v| v.to_string())
            .unwrap_or_default();
        let hv = hv_reference
            .and_then(|r| hypervolume_2d(&w[1].pof, r).ok())
            .map(|h| h.volume.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            pair.t_to,
            class.kind,
            class.correlation,
            pair.pos_changed,
            pair.pof_changed,
            pair.change_type(),
            igd,
            hv
        )?;
    }
    let pos = report.pairs.iter().any(|p| p.pos_changed);
    let pof = report.pairs.iter().any(|p| p.pof_changed);
    writeln!(
        out,
        "overall,{},{},{},{},{},,",
        class.kind, class.correlation, pos, pof, report.change_type
    )
}

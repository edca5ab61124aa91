//! Baseline dynamic multi-objective evolutionary algorithm: rank and
//! crowding selection, sentinel change detection, immigrant response and
//! an unbounded non-dominated archive.

use std::cmp::Ordering;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::analysis::{hypervolume_2d, igd};
use crate::dynamics::{DynamicProblem, Encoding};
use crate::error::{Error, Result};
use crate::pareto::{dominates_unchecked, FrontSnapshot};
use crate::rng::Rng;
use crate::types::{Bounds, DecisionVector, ObjectiveVector};

/// Reference points sampled for the per-generation IGD column.
pub const REFERENCE_POINTS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct EaConfig {
    /// Evaluation budget. A run may overshoot by at most `mu`.
    pub budget: u64,
    pub mu: usize,
    /// Generations between change steps (`tau_T`).
    pub generations_per_step: u64,
    pub crossover_prob: f64,
    pub eta_crossover: f64,
    pub eta_mutation: f64,
    /// Per-variable mutation probability; `None` means `1 / n`.
    pub mutation_prob: Option<f64>,
    pub immigrant_fraction: f64,
    pub sentinels: usize,
    /// Sentinel objective shift above which a change is flagged.
    pub change_delta: f64,
    pub hv_reference: Option<Vec<f64>>,
}

impl EaConfig {
    pub fn new(budget: u64, mu: usize, generations_per_step: u64) -> Self {
        Self {
            budget,
            mu,
            generations_per_step,
            crossover_prob: 0.9,
            eta_crossover: 20.0,
            eta_mutation: 20.0,
            mutation_prob: None,
            immigrant_fraction: 0.2,
            sentinels: 5,
            change_delta: 1e-12,
            hv_reference: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu < 2 {
            return Err(Error::Config("population size must be at least 2".into()));
        }
        if self.budget < self.mu as u64 {
            return Err(Error::Config(format!(
                "budget {} is smaller than the population size {}",
                self.budget, self.mu
            )));
        }
        if self.generations_per_step == 0 {
            return Err(Error::Config("generations per step must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob)
            || !(0.0..=1.0).contains(&self.immigrant_fraction)
        {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        if !(self.change_delta >= 0.0) {
            return Err(Error::Config("change delta must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Member {
    pub x: DecisionVector,
    pub f: ObjectiveVector,
    pub rank: usize,
    pub crowding: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Population {
    pub members: Vec<Member>,
    /// Set when a change was detected and objectives are not yet refreshed.
    pub stale: bool,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// One row of a run: the archive after generation `tau`.
#[derive(Clone, Debug)]
pub struct GenerationRecord {
    pub tau: u64,
    pub t: f64,
    pub evaluations: u64,
    pub change_detected: bool,
    pub archive: FrontSnapshot,
    pub igd: Option<f64>,
    pub hv: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct RunTimeline {
    pub records: Vec<GenerationRecord>,
}

impl RunTimeline {
    pub fn last(&self) -> Option<&GenerationRecord> {
        self.records.last()
    }

    pub fn evaluations(&self) -> u64 {
        self.records.last().map_or(0, |r| r.evaluations)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "tau,t,evaluations,change_detected,archive_size,igd,hv")?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.tau,
                r.t,
                r.evaluations,
                r.change_detected,
                r.archive.len(),
                opt(r.igd),
                opt(r.hv)
            )?;
        }
        Ok(())
    }
}

/// Unbounded set of mutually non-dominated, pairwise distinct points.
#[derive(Clone, Debug, Default)]
pub struct Archive {
    pos: Vec<DecisionVector>,
    pof: Vec<ObjectiveVector>,
}

impl Archive {
    /// Adds a point unless an archived one dominates or equals it; evicts
    /// archived points it dominates. Returns whether it was added.
    pub fn insert(&mut self, x: &DecisionVector, f: &ObjectiveVector) -> bool {
        if self
            .pof
            .iter()
            .any(|a| a.0 == f.0 || dominates_unchecked(a, f))
        {
            return false;
        }
        let mut i = 0;
        while i < self.pof.len() {
            if dominates_unchecked(f, &self.pof[i]) {
                self.pof.swap_remove(i);
                self.pos.swap_remove(i);
            } else {
                i += 1;
            }
        }
        self.pos.push(x.clone());
        self.pof.push(f.clone());
        true
    }

    pub fn clear(&mut self) {
        self.pos.clear();
        self.pof.clear();
    }

    pub fn len(&self) -> usize {
        self.pof.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pof.is_empty()
    }

    pub fn front(&self) -> &[ObjectiveVector] {
        &self.pof
    }

    /// Snapshot sorted lexicographically by objectives, so the recorded
    /// order does not depend on insertion history.
    pub fn snapshot(&self, t: f64) -> FrontSnapshot {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| lexicographic(&self.pof[a], &self.pof[b]));
        FrontSnapshot {
            t,
            pos: order.iter().map(|&i| self.pos[i].clone()).collect(),
            pof: order.iter().map(|&i| self.pof[i].clone()).collect(),
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Re-evaluates each sentinel at `t`; true iff some objective moved by more
/// than `delta`.
pub fn sentinel_change_detect(
    sentinels: &[(DecisionVector, ObjectiveVector)],
    problem: &DynamicProblem,
    t: f64,
    delta: f64,
) -> Result<bool> {
    for (x, stored) in sentinels {
        let now = problem.evaluate(x, t)?;
        if shifted(stored, &now, delta) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn shifted(a: &[f64], b: &[f64], delta: f64) -> bool {
    a.iter().zip(b).any(|(u, v)| (u - v).abs() > delta)
}

/// Non-dominated sorting: front index per member, 0 being best.
pub fn non_dominated_ranks(objectives: &[&[f64]]) -> Vec<usize> {
    let n = objectives.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_unchecked(objectives[i], objectives[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates_unchecked(objectives[j], objectives[i]) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut rank = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    let mut level = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = level;
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        level += 1;
    }
    rank
}

/// Crowding distance within one front; boundary points get infinity.
pub fn crowding_distances(objectives: &[&[f64]]) -> Vec<f64> {
    let n = objectives.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let k = objectives[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for m in 0..k {
        order.sort_by(|&a, &b| objectives[a][m].total_cmp(&objectives[b][m]).then(a.cmp(&b)));
        let lo = objectives[order[0]][m];
        let hi = objectives[order[n - 1]][m];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span > 0.0 {
            for w in 1..n - 1 {
                let gap = objectives[order[w + 1]][m] - objectives[order[w - 1]][m];
                dist[order[w]] += gap / span;
            }
        }
    }
    dist
}

fn assign_rank_and_crowding(members: &mut [Member]) {
    let objs: Vec<&[f64]> = members.iter().map(|m| &m.f[..]).collect();
    let ranks = non_dominated_ranks(&objs);
    let levels = ranks.iter().copied().max().map_or(0, |m| m + 1);
    let mut crowding = vec![0.0; members.len()];
    for level in 0..levels {
        let idx: Vec<usize> = (0..members.len()).filter(|&i| ranks[i] == level).collect();
        let front: Vec<&[f64]> = idx.iter().map(|&i| objs[i]).collect();
        for (&i, d) in idx.iter().zip(crowding_distances(&front)) {
            crowding[i] = d;
        }
    }
    for (m, (r, c)) in members.iter_mut().zip(ranks.into_iter().zip(crowding)) {
        m.rank = r;
        m.crowding = c;
    }
}

/// Better-first order: lower rank, then larger crowding distance.
fn survival_order(a: &Member, b: &Member) -> Ordering {
    a.rank
        .cmp(&b.rank)
        .then_with(|| b.crowding.total_cmp(&a.crowding))
}

fn truncate_to(members: &mut Vec<Member>, mu: usize) {
    assign_rank_and_crowding(members);
    // stable sort keeps ties in population order
    members.sort_by(survival_order);
    members.truncate(mu);
    assign_rank_and_crowding(members);
}

fn tournament<'a>(members: &'a [Member], rng: &mut Rng) -> &'a Member {
    let a = &members[rng.index(members.len())];
    let b = &members[rng.index(members.len())];
    if survival_order(b, a) == Ordering::Less {
        b
    } else {
        a
    }
}

struct Variation {
    encoding: Encoding,
    crossover_prob: f64,
    eta_c: f64,
    eta_m: f64,
    mutation_prob: f64,
}

impl Variation {
    fn offspring(&self, p1: &[f64], p2: &[f64], bounds: &Bounds, rng: &mut Rng) -> (Vec<f64>, Vec<f64>) {
        let (mut c1, mut c2) = (p1.to_vec(), p2.to_vec());
        let cross = rng.bernoulli(self.crossover_prob);
        match self.encoding {
            Encoding::Real => {
                if cross {
                    sbx(&mut c1, &mut c2, bounds, self.eta_c, rng);
                }
                polynomial_mutation(&mut c1, bounds, self.eta_m, self.mutation_prob, rng);
                polynomial_mutation(&mut c2, bounds, self.eta_m, self.mutation_prob, rng);
            }
            Encoding::Binary => {
                if cross {
                    for i in 0..c1.len() {
                        if rng.bernoulli(0.5) {
                            std::mem::swap(&mut c1[i], &mut c2[i]);
                        }
                    }
                }
                bit_flip(&mut c1, self.mutation_prob, rng);
                bit_flip(&mut c2, self.mutation_prob, rng);
            }
        }
        (c1, c2)
    }
}

/// Bounded simulated binary crossover, each variable with probability 1/2.
fn sbx(c1: &mut [f64], c2: &mut [f64], bounds: &Bounds, eta: f64, rng: &mut Rng) {
    for i in 0..c1.len() {
        let (lo, hi) = (bounds.lower()[i], bounds.upper()[i]);
        if !rng.bernoulli(0.5) || (c1[i] - c2[i]).abs() < 1e-14 || hi <= lo {
            continue;
        }
        let (y1, y2) = if c1[i] < c2[i] { (c1[i], c2[i]) } else { (c2[i], c1[i]) };
        let u = rng.unit();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let gap = y2 - y1;
        let bq1 = spread(1.0 + 2.0 * (y1 - lo) / gap);
        let bq2 = spread(1.0 + 2.0 * (hi - y2) / gap);
        let a = (0.5 * (y1 + y2 - bq1 * gap)).clamp(lo, hi);
        let b = (0.5 * (y1 + y2 + bq2 * gap)).clamp(lo, hi);
        if rng.bernoulli(0.5) {
            c1[i] = b;
            c2[i] = a;
        } else {
            c1[i] = a;
            c2[i] = b;
        }
    }
}

fn polynomial_mutation(x: &mut [f64], bounds: &Bounds, eta: f64, p: f64, rng: &mut Rng) {
    for i in 0..x.len() {
        let (lo, hi) = (bounds.lower()[i], bounds.upper()[i]);
        if !rng.bernoulli(p) || hi <= lo {
            continue;
        }
        let span = hi - lo;
        let d1 = (x[i] - lo) / span;
        let d2 = (hi - x[i]) / span;
        let u = rng.unit();
        let power = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
            v.powf(power) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - v.powf(power)
        };
        x[i] = (x[i] + dq * span).clamp(lo, hi);
    }
}

fn bit_flip(x: &mut [f64], p: f64, rng: &mut Rng) {
    for v in x.iter_mut() {
        if rng.bernoulli(p) {
            *v = if *v >= 0.5 { 0.0 } else { 1.0 };
        }
    }
}

fn random_point(bounds: &Bounds, encoding: Encoding, rng: &mut Rng) -> Vec<f64> {
    match encoding {
        Encoding::Real => bounds.sample(rng),
        Encoding::Binary => (0..bounds.dimension())
            .map(|_| if rng.bernoulli(0.5) { 1.0 } else { 0.0 })
            .collect(),
    }
}

struct Counter {
    evaluations: u64,
    ceiling: u64,
}

impl Counter {
    fn affordable(&self, batch: usize) -> bool {
        self.evaluations + batch as u64 <= self.ceiling
    }

    fn evaluate_all(
        &mut self,
        problem: &DynamicProblem,
        xs: &[Vec<f64>],
        t: f64,
    ) -> Result<Vec<ObjectiveVector>> {
        let out = xs
            .par_iter()
            .map(|x| problem.evaluate(x, t))
            .collect::<Result<Vec<_>>>()?;
        self.evaluations += xs.len() as u64;
        Ok(out)
    }
}

fn members_from(xs: Vec<Vec<f64>>, fs: Vec<ObjectiveVector>) -> Vec<Member> {
    xs.into_iter()
        .zip(fs)
        .map(|(x, f)| Member {
            x: DecisionVector(x),
            f,
            rank: 0,
            crowding: 0.0,
        })
        .collect()
}

fn record(
    problem: &DynamicProblem,
    cfg: &EaConfig,
    archive: &Archive,
    tau: u64,
    t: f64,
    evaluations: u64,
    change_detected: bool,
) -> GenerationRecord {
    let igd = problem
        .reference_front(t, REFERENCE_POINTS)
        .filter(|r| !r.is_empty() && !archive.is_empty())
        .and_then(|r| igd(archive.front(), &r).ok());
    let hv = cfg
        .hv_reference
        .as_deref()
        .filter(|r| r.len() == 2 && problem.objectives() == 2)
        .and_then(|r| hypervolume_2d(archive.front(), r).ok())
        .map(|h| h.volume);
    GenerationRecord {
        tau,
        t,
        evaluations,
        change_detected,
        archive: archive.snapshot(t),
        igd,
        hv,
    }
}

/// Runs the generational loop until the budget allows no further
/// generation. Problem time at generation `tau` is the time of change step
/// `tau / generations_per_step`; the problem is advanced at each step
/// boundary before that generation's change check.
///
/// Every evaluation batch is admitted only while the total stays within
/// `budget + mu`.
pub fn run_dynamic_ea(problem: &mut DynamicProblem, cfg: &EaConfig, rng: &mut Rng) -> Result<RunTimeline> {
    cfg.validate()?;
    let mu = cfg.mu;
    let bounds = problem.bounds().clone();
    let encoding = problem.encoding();
    let n = problem.dimension();
    let variation = Variation {
        encoding,
        crossover_prob: cfg.crossover_prob,
        eta_c: cfg.eta_crossover,
        eta_m: cfg.eta_mutation,
        mutation_prob: cfg.mutation_prob.unwrap_or(1.0 / n as f64),
    };
    let mut init_rng = rng.fork("ea-init");
    let mut var_rng = rng.fork("ea-variation");
    let mut immigrant_rng = rng.fork("ea-immigrants");
    let mut dyn_rng = rng.fork("ea-dynamics");
    let time = problem.time_model().clone();
    let time_at = |tau: u64| time.time_of_step(tau / cfg.generations_per_step);
    let immigrants = ((cfg.immigrant_fraction * mu as f64).round() as usize).min(mu);

    let mut counter = Counter {
        evaluations: 0,
        ceiling: cfg.budget + mu as u64,
    };
    let mut timeline = RunTimeline::default();
    let mut archive = Archive::default();
    let mut tau = 0u64;
    let mut t = time_at(0);

    let xs: Vec<Vec<f64>> = (0..mu)
        .map(|_| random_point(&bounds, encoding, &mut init_rng))
        .collect();
    let fs = counter.evaluate_all(problem, &xs, t)?;
    let mut population = Population {
        members: members_from(xs, fs),
        stale: false,
    };
    assign_rank_and_crowding(&mut population.members);
    for m in &population.members {
        archive.insert(&m.x, &m.f);
    }

    let mut sentinel_xs = vec![bounds.center()];
    if encoding == Encoding::Binary {
        sentinel_xs[0] = sentinel_xs[0].iter().map(|v| v.round()).collect();
    }
    while sentinel_xs.len() < cfg.sentinels {
        sentinel_xs.push(random_point(&bounds, encoding, &mut init_rng));
    }
    sentinel_xs.truncate(cfg.sentinels);
    let mut sentinels: Vec<(DecisionVector, ObjectiveVector)> = Vec::new();
    if counter.affordable(sentinel_xs.len()) {
        let fs = counter.evaluate_all(problem, &sentinel_xs, t)?;
        sentinels = sentinel_xs.into_iter().map(DecisionVector).zip(fs).collect();
    }
    timeline
        .records
        .push(record(problem, cfg, &archive, tau, t, counter.evaluations, false));

    while counter.affordable(sentinels.len() + mu) {
        tau += 1;
        t = time_at(tau);
        if tau % cfg.generations_per_step == 0 {
            problem.advance(&mut dyn_rng)?;
        }

        let sentinel_xs: Vec<Vec<f64>> = sentinels.iter().map(|(x, _)| x.0.clone()).collect();
        let now = counter.evaluate_all(problem, &sentinel_xs, t)?;
        let changed = sentinels
            .iter()
            .zip(&now)
            .any(|((_, old), new)| shifted(old, new, cfg.change_delta));
        for ((_, old), new) in sentinels.iter_mut().zip(now) {
            *old = new;
        }

        if changed {
            population.stale = true;
            archive.clear();
            if !counter.affordable(mu + immigrants) {
                timeline
                    .records
                    .push(record(problem, cfg, &archive, tau, t, counter.evaluations, true));
                break;
            }
            let xs: Vec<Vec<f64>> = population.members.iter().map(|m| m.x.0.clone()).collect();
            let fs = counter.evaluate_all(problem, &xs, t)?;
            for (m, f) in population.members.iter_mut().zip(fs) {
                m.f = f;
            }
            population.stale = false;
            assign_rank_and_crowding(&mut population.members);
            population.members.sort_by(survival_order);
            population.members.truncate(mu - immigrants);
            let xs: Vec<Vec<f64>> = (0..immigrants)
                .map(|_| random_point(&bounds, encoding, &mut immigrant_rng))
                .collect();
            let fs = counter.evaluate_all(problem, &xs, t)?;
            population.members.extend(members_from(xs, fs));
            assign_rank_and_crowding(&mut population.members);
            for m in &population.members {
                archive.insert(&m.x, &m.f);
            }
            if !counter.affordable(mu) {
                timeline
                    .records
                    .push(record(problem, cfg, &archive, tau, t, counter.evaluations, true));
                break;
            }
        }

        let mut xs = Vec::with_capacity(mu + 1);
        while xs.len() < mu {
            let p1 = tournament(&population.members, &mut var_rng);
            let p2 = tournament(&population.members, &mut var_rng);
            let (c1, c2) = variation.offspring(&p1.x, &p2.x, &bounds, &mut var_rng);
            xs.push(c1);
            xs.push(c2);
        }
        xs.truncate(mu);
        let fs = counter.evaluate_all(problem, &xs, t)?;
        let children = members_from(xs, fs);
        for c in &children {
            archive.insert(&c.x, &c.f);
        }
        population.members.extend(children);
        truncate_to(&mut population.members, mu);

        timeline
            .records
            .push(record(problem, cfg, &archive, tau, t, counter.evaluations, changed));
    }
    Ok(timeline)
}

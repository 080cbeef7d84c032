//! Multi-start projected subgradient ascent over products of probability
//! simplices, with an exhaustive grid pass for small decision spaces.
//!
//! Objectives are max–min expressions: an evaluation returns a list of smooth
//! branches (the objective is their minimum) and an optional slack that must
//! stay nonnegative. The slack enters through an exact penalty,
//! F = min_i f_i − w·max(0, −slack), written as the minimum over the branches
//! f_i and f_i + w·slack so that a single min-norm subgradient step handles
//! both the kinks and the constraint boundary.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{
    axis, Cribbing, MacDecision, MacSpec, PtpSeDecision, PtpSeSpec, SdRcDecision, SdRcMode,
    SdRcSpec,
};
use crate::error::{Error, Result};
use crate::objectives::{
    mac_bounds, ptp_se_noncausal, sdrc_causal_value, sdrc_nostate_value, sdrc_value,
    simplex_grid, MacRateBounds, RatePoint, FEASIBILITY_TOL,
};
use crate::prob::{Alphabet, CondPmf};

/// Grid passes above this many points are skipped.
pub const GRID_POINT_CAP: f64 = 2.0e6;
/// Grid passes over more free parameters than this are skipped.
pub const GRID_PARAM_CAP: usize = 12;

const FD_STEP: f64 = 1e-7;
const ACTIVE_TOL: f64 = 1e-5;
const FIRST_STEP: f64 = 0.25;
const STEP_FLOOR: f64 = 1e-6;
const ROW_STEP_FLOOR: f64 = 1e-4;
const STALL_WINDOW: usize = 50;
const INITIAL_PENALTY: f64 = 10.0;
const PENALTY_DOUBLINGS: usize = 10;
const MAX_ROW_BOOST: f64 = 1e3;

/// Shape of one factor being optimized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorTemplate {
    pub targets: Vec<Alphabet>,
    pub given: Vec<Alphabet>,
}

impl FactorTemplate {
    pub fn new(targets: Vec<Alphabet>, given: Vec<Alphabet>) -> Self {
        FactorTemplate { targets, given }
    }

    pub fn rows(&self) -> usize {
        self.given.iter().map(|a| a.size).product()
    }

    pub fn row_len(&self) -> usize {
        self.targets.iter().map(|a| a.size).product()
    }

    fn len(&self) -> usize {
        self.rows() * self.row_len()
    }

    fn matches(&self, c: &CondPmf) -> bool {
        c.targets() == self.targets.as_slice() && c.given() == self.given.as_slice()
    }
}

/// Product of simplices: one per row of every factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionSpace {
    pub factors: Vec<FactorTemplate>,
}

impl DecisionSpace {
    pub fn new(factors: Vec<FactorTemplate>) -> Self {
        DecisionSpace { factors }
    }

    /// Number of free parameters, Σ rows · (row length − 1).
    pub fn free_parameters(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.rows() * (f.row_len() - 1))
            .sum()
    }

    fn dim(&self) -> usize {
        self.factors.iter().map(FactorTemplate::len).sum()
    }

    /// (offset, length) of every simplex row in the flat parameter vector.
    fn row_slices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for f in &self.factors {
            let l = f.row_len();
            for _ in 0..f.rows() {
                out.push((off, l));
                off += l;
            }
        }
        out
    }

    /// Factors from a flat vector; every row is divided by its sum.
    pub fn build(&self, x: &[f64]) -> Result<Vec<CondPmf>> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut off = 0;
        for f in &self.factors {
            let l = f.row_len();
            let mut k = x[off..off + f.len()].to_vec();
            for row in k.chunks_mut(l) {
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= s);
            }
            out.push(CondPmf::new(f.targets.clone(), f.given.clone(), k)?);
            off += f.len();
        }
        Ok(out)
    }

    fn flatten(&self, factors: &[CondPmf]) -> Result<Vec<f64>> {
        if factors.len() != self.factors.len() {
            return Err(Error::Shape(format!(
                "decision has {} factors, space has {}",
                factors.len(),
                self.factors.len()
            )));
        }
        let mut x = Vec::with_capacity(self.dim());
        for (t, c) in self.factors.iter().zip(factors) {
            if !t.matches(c) {
                return Err(Error::AlphabetMismatch(format!(
                    "warm start factor p({}|{}) does not fit p({}|{})",
                    crate::prob::describe(c.targets()),
                    crate::prob::describe(c.given()),
                    crate::prob::describe(&t.targets),
                    crate::prob::describe(&t.given)
                )));
            }
            x.extend_from_slice(c.kernel());
        }
        Ok(x)
    }
}

/// Branch values (the objective is their minimum) and the constraint slack
/// (+∞ when unconstrained).
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub branches: Vec<f64>,
    pub slack: f64,
}

impl Evaluation {
    pub fn value(&self) -> f64 {
        self.branches.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn feasible(&self) -> bool {
        self.slack >= FEASIBILITY_TOL
    }

    /// Branches of the penalized objective.
    fn augmented(&self, w: f64) -> Vec<f64> {
        let mut out = self.branches.clone();
        if self.slack.is_finite() {
            out.extend(self.branches.iter().map(|b| b + w * self.slack));
        }
        out
    }
}

pub type ObjectiveFn<'a> = Box<dyn Fn(&[CondPmf]) -> Result<Evaluation> + Send + Sync + 'a>;

/// A decision space together with the objective evaluated on it.
pub struct Problem<'a> {
    pub space: DecisionSpace,
    pub objective: ObjectiveFn<'a>,
}

fn t(name: &str, size: usize) -> Alphabet {
    Alphabet::new(name, size)
}

impl<'a> Problem<'a> {
    /// Relay-channel max–min in the given mode; `u_size` is ignored outside
    /// the non-causal mode.
    pub fn sdrc(spec: &'a SdRcSpec, mode: SdRcMode, u_size: usize) -> Result<Self> {
        let [s, xr, x] = [
            spec.alphabet(axis::S),
            spec.alphabet(axis::XR),
            spec.alphabet(axis::X),
        ];
        let factors = match mode {
            SdRcMode::NonCausal => {
                if u_size == 0 || u_size > spec.u_cap() {
                    return Err(Error::Cardinality {
                        u: u_size,
                        cap: spec.u_cap(),
                    });
                }
                let u = t(axis::U, u_size);
                vec![
                    FactorTemplate::new(vec![u.clone()], vec![s.clone()]),
                    FactorTemplate::new(vec![xr.clone()], vec![u.clone()]),
                    FactorTemplate::new(vec![x], vec![xr, u, s]),
                ]
            }
            SdRcMode::Causal => vec![
                FactorTemplate::new(vec![xr.clone()], vec![]),
                FactorTemplate::new(vec![x], vec![xr, s]),
            ],
            SdRcMode::NoState => {
                if spec.sizes().s != 1 {
                    return Err(Error::Domain("state-free mode needs |S| = 1".into()));
                }
                vec![FactorTemplate::new(vec![xr, x], vec![])]
            }
        };
        let objective: ObjectiveFn<'a> = Box::new(move |f: &[CondPmf]| {
            let d = SdRcDecision::from_factors(mode, f.to_vec())?;
            let v = match mode {
                SdRcMode::NonCausal => sdrc_value(spec, &d)?,
                SdRcMode::Causal => sdrc_causal_value(spec, &d)?,
                SdRcMode::NoState => sdrc_nostate_value(spec, &d)?,
            };
            // rate_bound_2 last: ties go to it
            Ok(Evaluation {
                branches: vec![v.rate_bound_1, v.rate_bound_2],
                slack: v.slack,
            })
        });
        Ok(Problem {
            space: DecisionSpace::new(factors),
            objective,
        })
    }

    fn mac_space(spec: &MacSpec, cribbing: Cribbing, u_size: usize) -> Result<DecisionSpace> {
        if u_size == 0 || u_size > spec.u_cap() {
            return Err(Error::Cardinality {
                u: u_size,
                cap: spec.u_cap(),
            });
        }
        let u = t(axis::U, u_size);
        let x2_given = match cribbing {
            Cribbing::StrictlyCausal => vec![u.clone(), spec.alphabet(axis::S2)],
            Cribbing::Causal => vec![spec.alphabet(axis::Z), u.clone(), spec.alphabet(axis::S2)],
        };
        Ok(DecisionSpace::new(vec![
            FactorTemplate::new(
                vec![u, spec.alphabet(axis::X1)],
                vec![spec.alphabet(axis::S1)],
            ),
            FactorTemplate::new(vec![spec.alphabet(axis::X2)], x2_given),
        ]))
    }

    /// Maximizes the support function w1·R1 + w2·R2 of the cribbing-MAC
    /// region.
    pub fn mac_support(
        spec: &'a MacSpec,
        cribbing: Cribbing,
        u_size: usize,
        w1: f64,
        w2: f64,
    ) -> Result<Self> {
        if !(w1 >= 0.0 && w2 >= 0.0 && w1 + w2 > 0.0) {
            return Err(Error::Domain(format!("weights ({w1}, {w2}) must be nonnegative and not both 0")));
        }
        let space = Self::mac_space(spec, cribbing, u_size)?;
        let objective: ObjectiveFn<'a> = Box::new(move |f: &[CondPmf]| {
            let b = mac_bounds(spec, &mac_decision(cribbing, f))?;
            Ok(Evaluation {
                branches: b.support_branches(w1, w2),
                slack: b.slack,
            })
        });
        Ok(Problem { space, objective })
    }

    /// Maximum sum rate, the support function at weights (1, 1).
    pub fn mac_sum_rate(spec: &'a MacSpec, cribbing: Cribbing, u_size: usize) -> Result<Self> {
        Self::mac_support(spec, cribbing, u_size, 1.0, 1.0)
    }

    /// max I(X2;Y|U,S) subject to I(U;S) ≤ log2 |X1|.
    pub fn ptp_se(spec: &'a PtpSeSpec, u_size: usize) -> Result<Self> {
        if u_size == 0 || u_size > spec.u_cap() {
            return Err(Error::Cardinality {
                u: u_size,
                cap: spec.u_cap(),
            });
        }
        let u = t(axis::U, u_size);
        let space = DecisionSpace::new(vec![
            FactorTemplate::new(vec![u.clone()], vec![spec.alphabet(axis::S)]),
            FactorTemplate::new(vec![spec.alphabet(axis::X2)], vec![u]),
        ]);
        let objective: ObjectiveFn<'a> = Box::new(move |f: &[CondPmf]| {
            let d = PtpSeDecision {
                p_u_given_s: f[0].clone(),
                p_x2_given_u: f[1].clone(),
            };
            let v = ptp_se_noncausal(spec, &d)?;
            Ok(Evaluation {
                branches: vec![v.value],
                slack: v.constraint_slack,
            })
        });
        Ok(Problem { space, objective })
    }

    pub fn evaluate(&self, factors: &[CondPmf]) -> Result<Evaluation> {
        (self.objective)(factors)
    }
}

/// Rebuilds a MAC decision from optimizer factors.
pub fn mac_decision(cribbing: Cribbing, f: &[CondPmf]) -> MacDecision {
    MacDecision {
        cribbing,
        p_u_x1_given_s1: f[0].clone(),
        p_x2: f[1].clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptOptions {
    /// Random Dirichlet(1) starts.
    pub restarts: usize,
    pub seed: u64,
    /// Grid resolution 1/levels per coordinate; 0 disables the grid pass.
    pub grid_levels: usize,
    pub max_iter: usize,
    /// Improvement over the stall window below which a run stops.
    pub tol: f64,
    /// Extra starting points, run after the random starts.
    pub warm_starts: Vec<Vec<CondPmf>>,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions {
            restarts: 64,
            seed: 0,
            grid_levels: 0,
            max_iter: 2000,
            tol: 1e-9,
            warm_starts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    pub index: usize,
    pub warm: bool,
    pub start_value: f64,
    pub final_value: f64,
    pub final_slack: Option<f64>,
    pub iterations: usize,
    pub penalty_weight: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub levels: usize,
    pub points: f64,
    pub best_value: Option<f64>,
    /// Why the pass did not run, if it did not.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptReport {
    pub best_value: f64,
    pub branches: Vec<f64>,
    /// Slack of the constraint at the optimum; `None` when unconstrained.
    pub feasibility_margin: Option<f64>,
    pub argmax: Vec<CondPmf>,
    pub restarts_used: usize,
    pub trajectories: Vec<RestartSummary>,
    pub grid: Option<GridSummary>,
}

/// Runs the grid pass (if requested and small enough), then gradient ascent
/// from every random start, every warm start and the grid optimum. Restarts
/// run in parallel; the result does not depend on the thread count.
pub fn maximize(problem: &Problem, opts: &OptOptions) -> Result<OptReport> {
    let space = &problem.space;
    let mut starts: Vec<(bool, Vec<f64>)> = Vec::new();
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(r as u64);
        starts.push((false, dirichlet_start(space, &mut rng)));
    }
    for w in &opts.warm_starts {
        starts.push((true, space.flatten(w)?));
    }
    let grid = if opts.grid_levels > 0 {
        let (summary, best) = grid_pass(problem, opts.grid_levels)?;
        if let Some(x) = best {
            starts.push((true, x));
        }
        Some(summary)
    } else {
        None
    };
    if starts.is_empty() {
        return Err(Error::Domain("no starting points: restarts = 0".into()));
    }
    let runs: Vec<Result<(RestartSummary, Vec<f64>)>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, (warm, x0))| ascend(problem, x0.clone(), opts).map(|(mut s, x)| {
            s.index = i;
            s.warm = *warm;
            (s, x)
        }))
        .collect();
    let mut trajectories = Vec::with_capacity(runs.len());
    let mut best: Option<(f64, Vec<f64>)> = None;
    for run in runs {
        let (s, x) = run?;
        if s.feasible && best.as_ref().is_none_or(|(v, _)| s.final_value > *v) {
            best = Some((s.final_value, x));
        }
        trajectories.push(s);
    }
    let Some((_, x)) = best else {
        return Err(Error::Infeasible {
            restarts: trajectories.len(),
        });
    };
    let argmax = space.build(&x)?;
    let e = problem.evaluate(&argmax)?;
    Ok(OptReport {
        best_value: e.value(),
        branches: e.branches.clone(),
        feasibility_margin: e.slack.is_finite().then_some(e.slack),
        argmax,
        restarts_used: trajectories.len(),
        trajectories,
        grid,
    })
}

fn dirichlet_start(space: &DecisionSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = Vec::with_capacity(space.dim());
    for (_, l) in space.row_slices() {
        let row: Vec<f64> = (0..l).map(|_| Exp1.sample(rng)).collect();
        let s: f64 = row.iter().sum();
        x.extend(row.into_iter().map(|v: f64| v / s));
    }
    x
}

fn evaluate_flat(problem: &Problem, x: &[f64]) -> Result<Evaluation> {
    problem.evaluate(&problem.space.build(x)?)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// One restart: ascent with the current penalty weight, doubled while the
/// end point violates the constraint.
fn ascend(problem: &Problem, mut x: Vec<f64>, opts: &OptOptions) -> Result<(RestartSummary, Vec<f64>)> {
    let rows = problem.space.row_slices();
    let start = evaluate_flat(problem, &x)?;
    let mut w = INITIAL_PENALTY;
    let mut iterations = 0;
    let mut e = start.clone();
    for round in 0..=PENALTY_DOUBLINGS {
        let (nx, ne, it) = ascend_fixed(problem, &rows, x, w, opts)?;
        x = nx;
        e = ne;
        iterations += it;
        if e.feasible() || round == PENALTY_DOUBLINGS {
            break;
        }
        w *= 2.0;
    }
    Ok((
        RestartSummary {
            index: 0,
            warm: false,
            start_value: start.value(),
            final_value: e.value(),
            final_slack: e.slack.is_finite().then_some(e.slack),
            iterations,
            penalty_weight: w,
            feasible: e.feasible(),
        },
        x,
    ))
}

fn ascend_fixed(
    problem: &Problem,
    rows: &[(usize, usize)],
    mut x: Vec<f64>,
    w: f64,
    opts: &OptOptions,
) -> Result<(Vec<f64>, Evaluation, usize)> {
    let mut e = evaluate_flat(problem, &x)?;
    let mut f = min_of(&e.augmented(w));
    let mut history = vec![f];
    let mut iter = 0;
    while iter < opts.max_iter {
        iter += 1;
        let branches = e.augmented(w);
        let grads = branch_gradients(problem, rows, &x, &branches, w)?;
        let active: Vec<usize> = (0..branches.len())
            .filter(|&i| branches[i] <= f + ACTIVE_TOL)
            .collect();
        let scale = row_scales(rows, &active.iter().map(|&i| grads[i].as_slice()).collect::<Vec<_>>());
        let active_grads: Vec<&[f64]> = active.iter().map(|&i| grads[i].as_slice()).collect();
        let mut directions = vec![min_norm_combination(&active_grads, &scale)];
        // fall back to the last active branch, then to each one in turn
        for &i in active.iter().rev() {
            directions.push(grads[i].iter().zip(&scale).map(|(g, s)| g * s).collect());
        }
        let mut moved = false;
        let lead = restrict_to_face(rows, &x, directions[0].clone());
        for d in directions {
            let d = restrict_to_face(rows, &x, d);
            let m = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if m < 1e-12 {
                continue;
            }
            let d: Vec<f64> = d.iter().map(|v| v / m).collect();
            if let Some((nx, ne, nf)) = line_search(problem, rows, &x, &d, f, w, STEP_FLOOR)? {
                x = nx;
                e = ne;
                f = nf;
                moved = true;
                break;
            }
        }
        // Rows whose objective is nearly linear would otherwise be held back by
        // the curvature of the others: give each its own step along its part of
        // the leading direction.
        for &(off, l) in rows {
            let m = lead[off..off + l].iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if m < 1e-12 {
                continue;
            }
            let mut d = vec![0.0; x.len()];
            for j in off..off + l {
                d[j] = lead[j] / m;
            }
            if let Some((nx, ne, nf)) = line_search(problem, rows, &x, &d, f, w, ROW_STEP_FLOOR)? {
                x = nx;
                e = ne;
                f = nf;
                moved = true;
            }
        }
        history.push(f);
        if !moved {
            break;
        }
        if history.len() > STALL_WINDOW && f - history[history.len() - 1 - STALL_WINDOW] < opts.tol {
            break;
        }
    }
    Ok((x, e, iter))
}

/// Forward-difference gradients of every augmented branch, projected onto
/// the tangent space of each row simplex.
fn branch_gradients(
    problem: &Problem,
    rows: &[(usize, usize)],
    x: &[f64],
    base: &[f64],
    w: f64,
) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let mut grads = vec![vec![0.0; n]; base.len()];
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] += FD_STEP;
        let b = evaluate_flat(problem, &xp)?.augmented(w);
        xp[j] = x[j];
        for (k, g) in grads.iter_mut().enumerate() {
            g[j] = (b[k] - base[k]) / FD_STEP;
        }
    }
    for g in &mut grads {
        for &(off, l) in rows {
            let mean = g[off..off + l].iter().sum::<f64>() / l as f64;
            g[off..off + l].iter_mut().for_each(|v| *v -= mean);
        }
    }
    Ok(grads)
}

fn line_search(
    problem: &Problem,
    rows: &[(usize, usize)],
    x: &[f64],
    d: &[f64],
    f: f64,
    w: f64,
    floor: f64,
) -> Result<Option<(Vec<f64>, Evaluation, f64)>> {
    let mut step = FIRST_STEP;
    while step >= floor {
        let mut y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + step * b).collect();
        for &(off, l) in rows {
            project_simplex(&mut y[off..off + l]);
        }
        let ascent: f64 = y.iter().zip(x).zip(d).map(|((a, b), g)| (a - b) * g).sum();
        let e = evaluate_flat(problem, &y)?;
        let fy = min_of(&e.augmented(w));
        if fy > f + 1e-4 * ascent.max(0.0) && fy > f {
            return Ok(Some((y, e, fy)));
        }
        step /= 2.0;
    }
    Ok(None)
}

/// Zeroes the components that would push a coordinate already at 0 below
/// it, re-centring each row over the remaining coordinates, so the step is
/// not wasted on moves the projection would undo.
fn restrict_to_face(rows: &[(usize, usize)], x: &[f64], mut d: Vec<f64>) -> Vec<f64> {
    for &(off, l) in rows {
        let mut blocked = vec![false; l];
        for _ in 0..l {
            let mut changed = false;
            for j in 0..l {
                if !blocked[j] && x[off + j] <= 1e-15 && d[off + j] < 0.0 {
                    blocked[j] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            let free = blocked.iter().filter(|b| !**b).count();
            let mean = if free > 0 {
                (0..l).filter(|&j| !blocked[j]).map(|j| d[off + j]).sum::<f64>() / free as f64
            } else {
                0.0
            };
            for j in 0..l {
                d[off + j] = if blocked[j] { 0.0 } else { d[off + j] - mean };
            }
        }
    }
    d
}

/// Diagonal preconditioner: every simplex row is scaled by the inverse of its
/// largest gradient entry over the active branches, with the boost capped at
/// `MAX_ROW_BOOST` relative to the steepest row. Rows whose conditioning event
/// is rare otherwise barely move.
fn row_scales(rows: &[(usize, usize)], grads: &[&[f64]]) -> Vec<f64> {
    let n = rows.last().map_or(0, |&(o, l)| o + l);
    let mags: Vec<f64> = rows
        .iter()
        .map(|&(off, l)| {
            grads
                .iter()
                .flat_map(|g| g[off..off + l].iter())
                .fold(0.0f64, |a, v| a.max(v.abs()))
        })
        .collect();
    let top = mags.iter().copied().fold(0.0f64, f64::max);
    let mut scale = vec![0.0; n];
    for (&(off, l), &m) in rows.iter().zip(&mags) {
        let s = if top > 0.0 { 1.0 / m.max(top / MAX_ROW_BOOST) } else { 1.0 };
        scale[off..off + l].iter_mut().for_each(|v| *v = s);
    }
    scale
}

/// Minimum-norm point of the convex hull of `g` in the metric weighted by
/// `scale`, returned premultiplied by `scale` (Frank–Wolfe with exact line
/// search on the Gram matrix). The result has positive inner product with
/// every `g` unless the hull contains the origin.
fn min_norm_combination(g: &[&[f64]], scale: &[f64]) -> Vec<f64> {
    let k = g.len();
    if k == 1 {
        return g[0].iter().zip(scale).map(|(a, s)| a * s).collect();
    }
    let dot = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .zip(scale)
            .map(|((x, y), s)| x * y * s)
            .sum::<f64>()
    };
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dot(g[i], g[j])).collect())
        .collect();
    // start from the shortest vector
    let first = (0..k)
        .min_by(|&a, &b| gram[a][a].total_cmp(&gram[b][b]))
        .unwrap();
    let mut lambda = vec![0.0; k];
    lambda[first] = 1.0;
    for _ in 0..500 {
        let gl: Vec<f64> = (0..k)
            .map(|i| (0..k).map(|j| gram[i][j] * lambda[j]).sum())
            .collect();
        let q: f64 = (0..k).map(|i| lambda[i] * gl[i]).sum();
        let s = (0..k).min_by(|&a, &b| gl[a].total_cmp(&gl[b])).unwrap();
        if q - gl[s] < 1e-15 * q.max(1.0) {
            break;
        }
        let denom = q - 2.0 * gl[s] + gram[s][s];
        let gamma = if denom > 0.0 {
            ((q - gl[s]) / denom).clamp(0.0, 1.0)
        } else {
            1.0
        };
        for (i, l) in lambda.iter_mut().enumerate() {
            *l *= 1.0 - gamma;
            if i == s {
                *l += gamma;
            }
        }
    }
    let n = g[0].len();
    (0..n)
        .map(|c| scale[c] * (0..k).map(|i| lambda[i] * g[i][c]).sum::<f64>())
        .collect()
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exhaustive evaluation on the product of row grids. Returns the summary and
/// the best feasible point, if any.
fn grid_pass(problem: &Problem, levels: usize) -> Result<(GridSummary, Option<Vec<f64>>)> {
    let space = &problem.space;
    let rows = space.row_slices();
    let points: f64 = rows
        .iter()
        .map(|&(_, l)| binom(levels + l - 1, l - 1))
        .product();
    let params = space.free_parameters();
    let skip = if params > GRID_PARAM_CAP {
        Some(format!("{params} free parameters exceed the grid limit {GRID_PARAM_CAP}"))
    } else if points > GRID_POINT_CAP {
        Some(format!("{points} grid points exceed the limit {GRID_POINT_CAP}"))
    } else {
        None
    };
    if skip.is_some() {
        return Ok((
            GridSummary {
                levels,
                points,
                best_value: None,
                skipped: skip,
            },
            None,
        ));
    }
    let row_grids: Vec<Vec<Vec<f64>>> = rows.iter().map(|&(_, l)| simplex_grid(l, levels)).collect();
    let total = points as usize;
    let decode = |mut idx: usize| {
        let mut x = Vec::with_capacity(space.dim());
        let mut picks = vec![0usize; row_grids.len()];
        for r in (0..row_grids.len()).rev() {
            picks[r] = idx % row_grids[r].len();
            idx /= row_grids[r].len();
        }
        for (r, &p) in picks.iter().enumerate() {
            x.extend_from_slice(&row_grids[r][p]);
        }
        x
    };
    let best = (0..total)
        .into_par_iter()
        .map(|i| -> Result<Option<(f64, usize)>> {
            let e = evaluate_flat(problem, &decode(i))?;
            Ok(e.feasible().then(|| (e.value(), i)))
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(a), Some(b)) => {
                        // larger value, then lower index
                        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                            Some(b)
                        } else {
                            Some(a)
                        }
                    }
                    (a, None) => a,
                    (None, b) => b,
                })
            },
        )?;
    Ok((
        GridSummary {
            levels,
            points,
            best_value: best.map(|b| b.0),
            skipped: None,
        },
        best.map(|b| decode(b.1)),
    ))
}

/// Copies `pmf` onto a larger alphabet for `axis`: as a target the new
/// letters get probability 0, as a conditioning axis the new rows copy the
/// row of letter 0. The embedded decision has the same objective value.
pub fn pad_axis(pmf: &CondPmf, axis: &str, new_size: usize) -> Result<CondPmf> {
    let grow = |axes: &[Alphabet]| -> Vec<Alphabet> {
        axes.iter()
            .map(|a| {
                if a.name == axis {
                    Alphabet::new(axis, new_size.max(a.size))
                } else {
                    a.clone()
                }
            })
            .collect()
    };
    let (t_old, g_old) = (pmf.targets(), pmf.given());
    if !t_old.iter().chain(g_old).any(|a| a.name == axis) {
        return Err(Error::AxisNotFound(axis.to_string()));
    }
    let (t_new, g_new) = (grow(t_old), grow(g_old));
    let unravel = |mut i: usize, axes: &[Alphabet]| {
        let mut v = vec![0usize; axes.len()];
        for k in (0..axes.len()).rev() {
            v[k] = i % axes[k].size;
            i /= axes[k].size;
        }
        v
    };
    let ravel = |v: &[usize], axes: &[Alphabet]| v.iter().zip(axes).fold(0, |acc, (x, a)| acc * a.size + x);
    let rows_new: usize = g_new.iter().map(|a| a.size).product();
    let len_new: usize = t_new.iter().map(|a| a.size).product();
    let mut kernel = vec![0.0; rows_new * len_new];
    for r in 0..rows_new {
        let mut gv = unravel(r, &g_new);
        for (k, a) in g_new.iter().enumerate() {
            if gv[k] >= g_old[k].size {
                debug_assert_eq!(a.name, axis);
                gv[k] = 0;
            }
        }
        let src = pmf.row(ravel(&gv, g_old));
        for (c, &p) in src.iter().enumerate() {
            let tv = unravel(c, t_old);
            kernel[r * len_new + ravel(&tv, &t_new)] = p;
        }
    }
    CondPmf::new(t_new, g_new, kernel)
}

/// One point of a traced region boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportPoint {
    pub w1: f64,
    pub w2: f64,
    pub point: RatePoint,
    pub value: f64,
    pub bounds: MacRateBounds,
}

/// Maximizes the support function at each weight pair and returns the
/// maximizing vertices sorted by R1.
pub fn trace_region(
    spec: &MacSpec,
    cribbing: Cribbing,
    u_size: usize,
    weights: &[(f64, f64)],
    opts: &OptOptions,
) -> Result<Vec<SupportPoint>> {
    let mut out = Vec::with_capacity(weights.len());
    for &(w1, w2) in weights {
        let p = Problem::mac_support(spec, cribbing, u_size, w1, w2)?;
        let rep = maximize(&p, opts)?;
        let b = mac_bounds(spec, &mac_decision(cribbing, &rep.argmax))?;
        out.push(SupportPoint {
            w1,
            w2,
            point: b.support(w1, w2),
            value: b.support_value(w1, w2),
            bounds: b,
        });
    }
    out.sort_by(|a, b| a.point.r1.total_cmp(&b.point.r1));
    Ok(out)
}

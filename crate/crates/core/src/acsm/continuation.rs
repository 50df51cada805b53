use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::arc::{arc_roots, fit_arc_or_vertical, ArcFit};
use super::{acsm_system, AcsmParams};
use crate::bethe::{newton_solve, same_state, BetheSolution, NewtonOptions, RootSet, Sector};
use crate::error::{Error, Result};
use crate::spinops::SpinSystem;

/// Sizes of the default continuation chain.
pub const DEFAULT_SCHEDULE: [usize; 7] = [12, 20, 40, 80, 100, 200, 300];
/// Largest `N` seeded by direct multi-start.
const MAX_SEED_N: usize = 16;
/// Imaginary parts below this count as real in the pattern check.
const REAL_TOL: f64 = 1e-8;
const CLOSURE_TOL: f64 = 1e-6;
const EXTRAPOLATION_DEGREE: usize = 3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedOptions {
    pub attempts: usize,
    pub seed: u64,
    pub newton: NewtonOptions,
}

impl Default for SeedOptions {
    fn default() -> Self {
        Self {
            attempts: 64,
            seed: 12,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub newton: NewtonOptions,
    /// Depth of automatic step halving after a failed jump.
    pub max_bisections: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            max_bisections: 3,
        }
    }
}

/// One converged ground state along the chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: usize,
    pub solution: BetheSolution,
    /// Arc fit of this solution, used to seed the next size.
    pub fit: ArcFit,
    /// `E/N = -r₁/N`.
    pub energy_per_spin: f64,
    /// The real root in `(0, a)`.
    pub lambda1: f64,
    /// Smallest and largest real part over the arc roots.
    pub min_re: f64,
    pub max_re: f64,
}

impl TracePoint {
    fn new(n: usize, solution: BetheSolution, params: &AcsmParams) -> Result<Self> {
        let ctx = crate::elliptic::EllipticContext::new(params.k)?;
        let arc = arc_roots(&solution);
        let fit = fit_arc_or_vertical(&arc, &ctx);
        let r1 = solution.real_eigenvalues()?[0];
        let lambda1 = solution
            .roots()
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min);
        let min_re = arc.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let max_re = arc.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            n,
            fit,
            energy_per_spin: -r1 / n as f64,
            lambda1,
            min_re,
            max_re,
            solution,
        })
    }

    pub fn lambda1_n(&self) -> f64 {
        self.lambda1 * self.n as f64
    }

    /// Total energy `-r₁`.
    pub fn energy(&self) -> f64 {
        self.energy_per_spin * self.n as f64
    }
}

/// Ground states for increasing `N` at fixed `(a, b, k)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationTrace {
    pub params: AcsmParams,
    pub points: Vec<TracePoint>,
}

impl ContinuationTrace {
    /// Trace starting from a converged ground state at `params.n`.
    pub fn start(params: AcsmParams, solution: BetheSolution) -> Result<Self> {
        let point = TracePoint::new(params.n, solution, &params)?;
        Ok(Self {
            params,
            points: vec![point],
        })
    }

    pub fn last(&self) -> &TracePoint {
        self.points.last().expect("trace is never empty")
    }

    pub fn point(&self, n: usize) -> Option<&TracePoint> {
        self.points.iter().find(|p| p.n == n)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.n).collect()
    }
}

/// Whether a solution has the ground-state shape: one real root in
/// `(0, a)` and the rest on a conjugation-symmetric arc with `Re > b`.
pub fn matches_ground_state_pattern(solution: &BetheSolution, params: &AcsmParams) -> bool {
    if !solution.converged || solution.sector() != Sector::Even {
        return false;
    }
    let roots = solution.roots();
    let first: Vec<_> = roots
        .iter()
        .filter(|z| z.re > 0.0 && z.re < params.a && z.im.abs() < REAL_TOL)
        .collect();
    let arc_ok = roots
        .iter()
        .filter(|z| !(z.re > 0.0 && z.re < params.a))
        .all(|z| z.re > params.b);
    let conj = solution.rootset.conjugate();
    let symmetric = roots
        .iter()
        .all(|z| conj.roots.iter().any(|w| (z - w).norm() < CLOSURE_TOL));
    first.len() == 1 && arc_ok && symmetric
}

/// Counts of roots by region: real roots in `(0, a)`, arc roots with
/// `Re > b`, and the remaining detached roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootLayout {
    pub near_centre: usize,
    pub arc: usize,
    pub detached: usize,
}

pub fn root_layout(solution: &BetheSolution, params: &AcsmParams) -> RootLayout {
    let mut layout = RootLayout {
        near_centre: 0,
        arc: 0,
        detached: 0,
    };
    for z in solution.roots() {
        if z.re > params.b {
            layout.arc += 1;
        } else if z.re > 0.0 && z.re < params.a && z.im.abs() < REAL_TOL {
            layout.near_centre += 1;
        } else {
            layout.detached += 1;
        }
    }
    layout
}

fn pattern_seed(
    params: &AcsmParams,
    rng: &mut ChaCha8Rng,
    period: f64,
    half: f64,
) -> Vec<Complex64> {
    let m = params.root_count();
    let mut roots = vec![Complex64::new(rng.gen_range(0.0..params.a), 0.0)];
    let x = rng.gen_range(params.b..period);
    let arc = m - 1;
    if arc % 2 == 1 {
        roots.push(Complex64::new(x, 0.0));
    }
    let mut ys: Vec<f64> = (0..arc / 2).map(|_| rng.gen_range(0.0..half)).collect();
    ys.sort_by(f64::total_cmp);
    for y in ys {
        roots.push(Complex64::new(x, y));
        roots.push(Complex64::new(x, -y));
    }
    roots
}

/// Lowest-energy `l = 0` solution with the ground-state pattern found by
/// multi-start Newton at small `N`.
pub fn ground_state_seed(params: &AcsmParams, opts: &SeedOptions) -> Result<BetheSolution> {
    if params.n > MAX_SEED_N {
        return Err(Error::InvalidParams(format!(
            "direct seeding needs N <= {MAX_SEED_N}, got {}",
            params.n
        )));
    }
    let system = acsm_system(params)?;
    let ctx = system.ctx();
    let (period, half) = (ctx.real_period(), ctx.half_quasi_period());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, BetheSolution)> = None;
    for _ in 0..opts.attempts {
        let seed = RootSet::new(Sector::Even, pattern_seed(params, &mut rng, period, half));
        let Ok(sol) = newton_solve(&seed, &system, &opts.newton) else {
            continue;
        };
        if !sol.is_physical(ctx) || !matches_ground_state_pattern(&sol, params) {
            continue;
        }
        let energy = -sol.r[0].re;
        if best.as_ref().map_or(true, |(e, _)| energy < *e) {
            best = Some((energy, sol));
        }
    }
    best.map(|(_, s)| s).ok_or(Error::SeedNotFound {
        attempts: opts.attempts,
    })
}

/// Sorted imaginary parts resampled to `count` quantile positions.
fn quantile_resample(sorted: &[f64], count: usize) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    if sorted.len() < 2 || count == 1 {
        let mid = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
        return vec![if count == 1 { 0.0 } else { mid }; count];
    }
    let last = (sorted.len() - 1) as f64;
    (0..count)
        .map(|i| {
            let pos = i as f64 / (count - 1) as f64 * last;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(sorted.len() - 1);
            let t = pos - lo as f64;
            sorted[lo] * (1.0 - t) + sorted[hi] * t
        })
        .collect()
}

/// Initial guess at size `n_next` from a converged trace point.
fn continuation_guess(point: &TracePoint, n_next: usize, system: &SpinSystem) -> RootSet {
    let ctx = system.ctx();
    let mut ys: Vec<f64> = arc_roots(&point.solution).iter().map(|z| z.im).collect();
    ys.sort_by(f64::total_cmp);
    let arc = n_next / 2 - 1;
    let mut roots = vec![Complex64::new(
        point.lambda1 * point.n as f64 / n_next as f64,
        0.0,
    )];
    for y in quantile_resample(&ys, arc) {
        roots.push(Complex64::new(point.fit.eval(y, ctx), y));
    }
    RootSet::new(Sector::Even, roots)
}

fn attempt(
    trace: &ContinuationTrace,
    n_next: usize,
    opts: &ContinuationOptions,
) -> Result<TracePoint> {
    let params = trace.params.with_n(n_next)?;
    let system = acsm_system(&params)?;
    let guess = continuation_guess(trace.last(), n_next, &system);
    let sol = newton_solve(&guess, &system, &opts.newton)?;
    if !sol.is_physical(system.ctx()) || !matches_ground_state_pattern(&sol, &params) {
        return Err(Error::ContinuationFailed {
            last_good: trace.last().n,
            target: n_next,
        });
    }
    TracePoint::new(n_next, sol, &params)
}

/// Extends the trace to `n_next`, inserting intermediate sizes if the
/// direct jump fails.
pub fn continuation_step(
    trace: &mut ContinuationTrace,
    n_next: usize,
    opts: &ContinuationOptions,
) -> Result<()> {
    step_with_depth(trace, n_next, opts, 0)
}

fn step_with_depth(
    trace: &mut ContinuationTrace,
    n_next: usize,
    opts: &ContinuationOptions,
    depth: usize,
) -> Result<()> {
    let last = trace.last().n;
    if n_next == last {
        return Ok(());
    }
    if n_next < last || n_next % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "next size {n_next} must be even and larger than {last}"
        )));
    }
    match attempt(trace, n_next, opts) {
        Ok(point) => {
            trace.points.push(point);
            Ok(())
        }
        Err(_) if depth < opts.max_bisections && n_next - last >= 4 => {
            let mid = (last + n_next) / 4 * 2;
            step_with_depth(trace, mid, opts, depth + 1)?;
            step_with_depth(trace, n_next, opts, depth + 1)
        }
        Err(_) => Err(Error::ContinuationFailed {
            last_good: last,
            target: n_next,
        }),
    }
}

/// Seeds at `schedule[0]` and continues through the remaining sizes.
/// Sizes inserted by bisection stay in the trace.
pub fn run_continuation(
    base: &AcsmParams,
    schedule: &[usize],
    seed: &SeedOptions,
    opts: &ContinuationOptions,
) -> Result<ContinuationTrace> {
    let first = *schedule
        .first()
        .ok_or_else(|| Error::InvalidParams("empty schedule".into()))?;
    let params = base.with_n(first)?;
    let gs = ground_state_seed(&params, seed)?;
    let mut trace = ContinuationTrace::start(params, gs)?;
    for &n in &schedule[1..] {
        continuation_step(&mut trace, n, opts)?;
    }
    Ok(trace)
}

/// Least-squares cubic in `1/N`; the limit is the constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationResult {
    pub limit_value: f64,
    /// Coefficients of `1, 1/N, 1/N², 1/N³`.
    pub coefficients: Vec<f64>,
    /// Data minus model at each input point.
    pub residuals: Vec<f64>,
}

impl ExtrapolationResult {
    pub fn eval(&self, n: f64) -> f64 {
        let x = 1.0 / n;
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }
}

pub fn extrapolate(ns: &[f64], values: &[f64]) -> Result<ExtrapolationResult> {
    let need = EXTRAPOLATION_DEGREE + 1;
    let got = ns.len().min(values.len());
    if got < need {
        return Err(Error::InsufficientPoints { got, need });
    }
    let a = DMatrix::from_fn(got, need, |i, j| (1.0 / ns[i]).powi(j as i32));
    let y = DVector::from_column_slice(&values[..got]);
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidParams(format!("extrapolation fit failed: {e}")))?;
    let residuals = (&y - &a * &coeffs).iter().copied().collect();
    Ok(ExtrapolationResult {
        limit_value: coeffs[0],
        coefficients: coeffs.iter().copied().collect(),
        residuals,
    })
}

/// Extrapolations of every Table-style column of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceExtrapolation {
    pub energy_per_spin: ExtrapolationResult,
    pub lambda1_n: ExtrapolationResult,
    pub min_re: ExtrapolationResult,
    pub max_re: ExtrapolationResult,
}

pub fn extrapolate_trace(trace: &ContinuationTrace) -> Result<TraceExtrapolation> {
    let ns: Vec<f64> = trace.points.iter().map(|p| p.n as f64).collect();
    let column = |f: fn(&TracePoint) -> f64| -> Vec<f64> { trace.points.iter().map(f).collect() };
    Ok(TraceExtrapolation {
        energy_per_spin: extrapolate(&ns, &column(|p| p.energy_per_spin))?,
        lambda1_n: extrapolate(&ns, &column(TracePoint::lambda1_n))?,
        min_re: extrapolate(&ns, &column(|p| p.min_re))?,
        max_re: extrapolate(&ns, &column(|p| p.max_re))?,
    })
}

/// Excited `l = 0` states reachable by displacing one or two ground-state
/// roots and re-solving, lowest `count` by energy `-r₁`. The search is a
/// sample: levels whose roots sit far from the ground-state arc can be
/// missed, so this is not a replacement for exact diagonalisation.
pub fn excited_states(
    params: &AcsmParams,
    ground: &BetheSolution,
    count: usize,
    attempts: usize,
    seed: u64,
) -> Result<Vec<BetheSolution>> {
    let system = acsm_system(params)?;
    let ctx = system.ctx();
    let (period, half) = (ctx.real_period(), ctx.half_quasi_period());
    let zs = system.zs();
    let opts = NewtonOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<BetheSolution> = Vec::new();
    let m = ground.roots().len();
    for _ in 0..attempts {
        let mut roots = ground.roots().to_vec();
        let moved = rng.gen_range(1..=2.min(m));
        for _ in 0..moved {
            let i = rng.gen_range(0..m);
            let re = if rng.gen_bool(0.5) {
                rng.gen_range(0.0..period)
            } else {
                zs[rng.gen_range(0..zs.len())] + rng.gen_range(-0.1..0.1)
            };
            let im = match rng.gen_range(0..5) {
                0 | 1 => 0.0,
                2 => half,
                3 => -half,
                _ => rng.gen_range(-half..half),
            };
            roots[i] = Complex64::new(re, im);
        }
        let Ok(sol) = newton_solve(&RootSet::new(Sector::Even, roots), &system, &opts) else {
            continue;
        };
        if !sol.is_physical(ctx) || !sol.is_conjugation_closed(ctx, CLOSURE_TOL) {
            continue;
        }
        let is_known = same_state(&sol, ground, ctx, 1e-6, 1e-7)
            || found.iter().any(|s| same_state(s, &sol, ctx, 1e-6, 1e-7));
        if !is_known {
            found.push(sol);
        }
    }
    found.sort_by(|a, b| (-a.r[0].re).total_cmp(&(-b.r[0].re)));
    found.truncate(count);
    Ok(found)
}

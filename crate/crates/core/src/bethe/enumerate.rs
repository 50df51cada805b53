use num_complex::Complex64;
use pathfinding::prelude::{kuhn_munkres_min, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::newton::{newton_solve, NewtonOptions};
use super::{energy_from_r, BetheSolution, RootSet, Sector};
use crate::elliptic::{EllipticContext, POLE_GUARD};
use crate::error::{Error, Result};
use crate::spinops::{parity_dims, SpinSystem};

/// Per-root tolerance of the conjugation-closure filter.
const CLOSURE_TOL: f64 = 1e-6;

/// Starting-point families for multi-start Newton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedKind {
    /// Every root uniform in the fundamental rectangle.
    Uniform,
    /// Conjugate pairs `x ± iy`, plus one real root when `M` is odd.
    ConjugatePairs,
    /// Uniform, with one root moved onto `Im = ±K′/2`.
    PinnedHalfPeriod,
    /// Real parts near a site or uniform, imaginary parts from
    /// `{0, ±K′/2, uniform}`.
    Structured,
    /// Conjugate offsets clustered around a single site.
    SiteCluster,
    /// A conjugation-closed mixture of real roots, conjugate pairs, roots
    /// on `Im = +K′/2` and `±K′/2` pairs with independent real parts.
    ClosedPattern,
}

impl SeedKind {
    pub const ALL: [SeedKind; 6] = [
        SeedKind::Uniform,
        SeedKind::ConjugatePairs,
        SeedKind::PinnedHalfPeriod,
        SeedKind::Structured,
        SeedKind::SiteCluster,
        SeedKind::ClosedPattern,
    ];
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnumerationOptions {
    /// Maximum number of Newton starts.
    pub budget: usize,
    pub seed: u64,
    pub newton: NewtonOptions,
    /// Seed families, used round-robin.
    pub kinds: Vec<SeedKind>,
    /// Target count; defaults to the dimension of the matching parity block.
    pub expected: Option<usize>,
    /// Per-root tolerance of the multiset comparison.
    pub root_tol: f64,
    /// Tolerance on `max_i |r_i - r_i′|` for identifying states.
    pub r_tol: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            budget: 20_000,
            seed: 20_240_601,
            newton: NewtonOptions::default(),
            kinds: SeedKind::ALL.to_vec(),
            expected: None,
            root_tol: 1e-6,
            r_tol: 1e-7,
        }
    }
}

/// Distinct solutions found in one sector. Each is converged, lies in the
/// fundamental rectangle, has real `r_i` and a conjugation-closed root
/// multiset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub sector: Sector,
    pub solutions: Vec<BetheSolution>,
    pub attempts: usize,
    pub expected: usize,
}

impl EnumerationReport {
    pub fn found(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_complete(&self) -> bool {
        self.found() == self.expected
    }

    /// Fails with the found/expected counts when incomplete.
    pub fn check(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompleteEnumeration {
                found: self.found(),
                expected: self.expected,
            })
        }
    }

    /// Solutions ordered by `Σ c_i r_i`, paired with that energy.
    pub fn by_energy(&self, coeffs: &[(usize, f64)]) -> Vec<(f64, &BetheSolution)> {
        let mut out: Vec<_> = self
            .solutions
            .iter()
            .map(|s| (energy_from_r(coeffs, &s.r), s))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

/// Number of eigenstates in `sector`: sector `l` is the parity block
/// `(-1)^l` relative to the fully stretched state when `M` is even, and
/// the opposite block when `M` is odd.
pub fn sector_dimension(system: &SpinSystem, sector: Sector) -> usize {
    let (even, odd) = parity_dims(system);
    if sector_is_even_block(system, sector) {
        even
    } else {
        odd
    }
}

/// Whether `sector` corresponds to the `+1` parity block.
pub fn sector_is_even_block(system: &SpinSystem, sector: Sector) -> bool {
    (system.root_count() + sector.l() as usize) % 2 == 0
}

/// Multi-start search for every solution of one sector.
pub fn enumerate_solutions(
    system: &SpinSystem,
    sector: Sector,
    opts: &EnumerationOptions,
) -> EnumerationReport {
    let expected = opts
        .expected
        .unwrap_or_else(|| sector_dimension(system, sector));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (sector.l() as u64) << 32);
    let kinds = if opts.kinds.is_empty() {
        SeedKind::ALL.to_vec()
    } else {
        opts.kinds.clone()
    };
    let mut solutions: Vec<BetheSolution> = Vec::new();
    let mut attempts = 0;
    while attempts < opts.budget && solutions.len() < expected {
        let kind = kinds[attempts % kinds.len()];
        attempts += 1;
        let seed = RootSet::new(sector, draw_seed(kind, system, sector, &mut rng));
        let Ok(sol) = newton_solve(&seed, system, &opts.newton) else {
            continue;
        };
        if !sol.is_physical(system.ctx()) || !sol.is_conjugation_closed(system.ctx(), CLOSURE_TOL) {
            continue;
        }
        if solutions
            .iter()
            .any(|s| same_state(s, &sol, system.ctx(), opts.root_tol, opts.r_tol))
        {
            continue;
        }
        solutions.push(sol);
    }
    EnumerationReport {
        sector,
        solutions,
        attempts,
        expected,
    }
}

/// Whether two solutions describe the same eigenstate: equal eigenvalue
/// vectors, or root multisets that match under an optimal assignment
/// (conjugate images included for `l = 0`).
pub fn same_state(
    a: &BetheSolution,
    b: &BetheSolution,
    ctx: &EllipticContext,
    root_tol: f64,
    r_tol: f64,
) -> bool {
    if a.sector() != b.sector() {
        return false;
    }
    if !a.r.is_empty() && a.r.len() == b.r.len() {
        let dr =
            a.r.iter()
                .zip(&b.r)
                .fold(0.0, |m: f64, (x, y)| m.max((x - y).norm()));
        if dr < r_tol {
            return true;
        }
    }
    if multiset_distance(a.roots(), b.roots(), ctx) < root_tol {
        return true;
    }
    a.sector() == Sector::Even
        && multiset_distance(&a.rootset.conjugate().roots, b.roots(), ctx) < root_tol
}

/// Largest matched separation under the assignment minimising the total,
/// with real parts compared modulo `2K`.
pub(crate) fn multiset_distance(a: &[Complex64], b: &[Complex64], ctx: &EllipticContext) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let period = ctx.real_period();
    let dist = |x: Complex64, y: Complex64| {
        let dre = (x.re - y.re).rem_euclid(period);
        let dre = dre.min(period - dre);
        dre.hypot(x.im - y.im)
    };
    // integer weights in units of 1e-12
    let weights = Matrix::from_fn(a.len(), b.len(), |(i, j)| {
        (dist(a[i], b[j]) * 1e12).min(1e15).round() as i64
    });
    let (_, assignment) = kuhn_munkres_min(&weights);
    assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| dist(a[i], b[j]))
        .fold(0.0, f64::max)
}

fn draw_seed(
    kind: SeedKind,
    system: &SpinSystem,
    sector: Sector,
    rng: &mut ChaCha8Rng,
) -> Vec<Complex64> {
    loop {
        let roots = draw_raw(kind, system, sector, rng);
        if seed_is_clear(&roots, system) {
            return roots;
        }
    }
}

fn draw_raw(
    kind: SeedKind,
    system: &SpinSystem,
    sector: Sector,
    rng: &mut ChaCha8Rng,
) -> Vec<Complex64> {
    let ctx = system.ctx();
    let m = system.root_count();
    let period = ctx.real_period();
    let half = ctx.kk_prime / 2.0;
    let zs = system.zs();
    let lo = zs.iter().copied().fold(f64::INFINITY, f64::min) - 0.1;
    let hi = zs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.1;
    let uniform = |rng: &mut ChaCha8Rng| {
        Complex64::new(rng.gen_range(0.0..period), rng.gen_range(-half..half))
    };
    match kind {
        SeedKind::Uniform => (0..m).map(|_| uniform(rng)).collect(),
        SeedKind::ConjugatePairs => {
            let mut roots = Vec::with_capacity(m);
            if m % 2 == 1 {
                roots.push(Complex64::new(rng.gen_range(0.0..period), 0.0));
            }
            while roots.len() < m {
                let x = rng.gen_range(0.0..period);
                let y = rng.gen_range(0.0..half);
                roots.push(Complex64::new(x, y));
                roots.push(Complex64::new(x, -y));
            }
            roots
        }
        SeedKind::PinnedHalfPeriod => {
            let mut roots: Vec<_> = (0..m).map(|_| uniform(rng)).collect();
            if let Some(first) = roots.first_mut() {
                let sign = match sector {
                    Sector::Odd => 1.0,
                    Sector::Even => {
                        if rng.gen_bool(0.5) {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                };
                first.im = sign * half;
            }
            roots
        }
        SeedKind::Structured => (0..m)
            .map(|_| {
                let re = if rng.gen_bool(0.5) {
                    zs[rng.gen_range(0..zs.len())] + rng.gen_range(-0.1..0.1)
                } else {
                    rng.gen_range(0.0..period)
                };
                let im = match rng.gen_range(0..4) {
                    0 => 0.0,
                    1 => half,
                    2 => -half,
                    _ => rng.gen_range(-half..half),
                };
                Complex64::new(re, im)
            })
            .collect(),
        SeedKind::ClosedPattern => {
            let re = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.5) {
                    rng.gen_range(lo..hi)
                } else {
                    rng.gen_range(0.0..period)
                }
            };
            let mut roots = Vec::with_capacity(m);
            while roots.len() < m {
                match rng.gen_range(0..4) {
                    0 => roots.push(Complex64::new(re(rng), 0.0)),
                    1 => roots.push(Complex64::new(re(rng), half)),
                    2 if roots.len() + 2 <= m => {
                        roots.push(Complex64::new(re(rng), half));
                        roots.push(Complex64::new(re(rng), -half));
                    }
                    3 if roots.len() + 2 <= m => {
                        // log-uniform so that tight pairs are sampled too
                        let y = half * (1e-2f64).powf(rng.gen::<f64>());
                        let x = re(rng);
                        roots.push(Complex64::new(x, y));
                        roots.push(Complex64::new(x, -y));
                    }
                    _ => {}
                }
            }
            roots
        }
        SeedKind::SiteCluster => {
            let centre = zs[rng.gen_range(0..zs.len())];
            let mut roots = Vec::with_capacity(m);
            if m % 2 == 1 {
                roots.push(Complex64::new(centre + rng.gen_range(-0.3..0.3), 0.0));
            }
            while roots.len() < m {
                let x = centre + rng.gen_range(-0.3..0.3);
                let y = rng.gen_range(0.02..0.4);
                roots.push(Complex64::new(x, y));
                roots.push(Complex64::new(x, -y));
            }
            roots
        }
    }
}

/// Keeps seeds a safe distance from the poles of every term.
fn seed_is_clear(roots: &[Complex64], system: &SpinSystem) -> bool {
    let margin = 1e3 * POLE_GUARD;
    let period = system.ctx().real_period();
    let near = |d: Complex64| {
        let re = d.re.rem_euclid(period);
        re.min(period - re).hypot(d.im) < margin
    };
    let zs = system.zs();
    roots.iter().enumerate().all(|(a, &la)| {
        zs.iter().all(|&z| !near(la - z)) && roots[a + 1..].iter().all(|&lb| !near(la - lb))
    })
}

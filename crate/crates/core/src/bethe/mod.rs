//! Bethe equations of the elliptic Gaudin model: residuals, the analytic
//! Jacobian, a damped Newton solver, folding into the fundamental
//! rectangle, eigenvalues of the integrals and multi-start enumeration.
//!
//! With `φ = φ₁ + φ₄` and `l ∈ {0, 1}` the parity sector,
//!
//! ```text
//! F_α = Σ_j s_j φ(λ_α - z_j) - Σ_{β≠α} φ(λ_α - λ_β) + iπl/(2K) = 0
//! r_i = s_i [Σ_{j≠i} s_j φ(z_i - z_j) - Σ_α φ(z_i - λ_α) + iπl/(2K)]
//! ```

mod enumerate;
mod newton;

pub use enumerate::{
    enumerate_solutions, same_state, sector_dimension, sector_is_even_block, EnumerationOptions,
    EnumerationReport, SeedKind,
};
pub use newton::{fold_fundamental, newton_solve, FoldOutcome, NewtonOptions};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::EllipticContext;
use crate::error::{Error, PolePartner, Result};
use crate::spinops::SpinSystem;

/// Imaginary parts of `r_i` below this are discarded.
pub const REALITY_TOL: f64 = 1e-8;

/// Parity sector label `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Even, Sector::Odd];

    pub fn from_l(l: u8) -> Result<Self> {
        match l {
            0 => Ok(Sector::Even),
            1 => Ok(Sector::Odd),
            _ => Err(Error::InvalidParams(format!(
                "sector l = {l} is not 0 or 1"
            ))),
        }
    }

    pub fn l(self) -> u8 {
        match self {
            Sector::Even => 0,
            Sector::Odd => 1,
        }
    }

    /// The constant `iπl/(2K)` shared by the residual and the eigenvalues.
    pub fn shift(self, ctx: &EllipticContext) -> Complex64 {
        Complex64::new(0.0, std::f64::consts::PI * self.l() as f64 / (2.0 * ctx.kk))
    }
}

/// Bethe roots of one sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub sector: Sector,
    pub roots: Vec<Complex64>,
}

impl RootSet {
    pub fn new(sector: Sector, roots: Vec<Complex64>) -> Self {
        Self { sector, roots }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Roots with every imaginary part negated.
    pub fn conjugate(&self) -> Self {
        Self::new(self.sector, self.roots.iter().map(|z| z.conj()).collect())
    }

    /// Roots sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Self {
        let mut roots = self.roots.clone();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Self::new(self.sector, roots)
    }
}

/// Outcome of a Newton solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetheSolution {
    pub rootset: RootSet,
    /// `max_α |F_α|` at the returned roots.
    pub residual_norm: f64,
    /// Eigenvalues `r_i` of the integrals; empty when not converged.
    pub r: Vec<Complex64>,
    pub converged: bool,
    pub iterations: usize,
    /// Number of imaginary-period folds that changed the equations.
    pub restarts: usize,
    /// `max |F|` after each accepted iterate, starting from the initial guess.
    pub history: Vec<f64>,
}

impl BetheSolution {
    pub fn sector(&self) -> Sector {
        self.rootset.sector
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.rootset.roots
    }

    /// Largest `|Im r_i|`.
    pub fn max_imag_r(&self) -> f64 {
        self.r.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Real eigenvalues, or an error naming the first non-real one.
    pub fn real_eigenvalues(&self) -> Result<Vec<f64>> {
        truncate_real(&self.r)
    }

    /// Converged, inside the rectangle, and with real eigenvalues.
    pub fn is_physical(&self, ctx: &EllipticContext) -> bool {
        let half = ctx.half_quasi_period();
        self.converged
            && !self.r.is_empty()
            && self.max_imag_r() < REALITY_TOL
            && self
                .roots()
                .iter()
                .all(|z| z.im.abs() <= half + newton::FOLD_TOL)
    }

    /// Whether the conjugate root multiset equals the original one modulo
    /// the lattice `2K ℤ + iK′ ℤ`, within `tol` per root.
    pub fn is_conjugation_closed(&self, ctx: &EllipticContext, tol: f64) -> bool {
        let canon = |roots: &[Complex64]| -> Vec<Complex64> {
            roots.iter().map(|&z| lattice_canonical(z, ctx)).collect()
        };
        let a = canon(self.roots());
        let b = canon(&self.rootset.conjugate().roots);
        enumerate::multiset_distance(&a, &b, ctx) < tol
    }
}

/// Representative of `z` modulo `2K ℤ + iK′ ℤ` with `Im` in `(-K′/2, K′/2]`.
fn lattice_canonical(z: Complex64, ctx: &EllipticContext) -> Complex64 {
    let kp = ctx.kk_prime;
    let re = z.re.rem_euclid(ctx.real_period());
    let mut im = z.im - kp * (z.im / kp).round();
    if im <= -kp / 2.0 + newton::FOLD_TOL {
        im += kp;
    }
    Complex64::new(re, im)
}

fn site_pole(alpha: usize, j: usize) -> impl Fn(Error) -> Error {
    move |e| relabel(e, alpha, PolePartner::Site(j))
}

fn root_pole(alpha: usize, beta: usize) -> impl Fn(Error) -> Error {
    move |e| relabel(e, alpha, PolePartner::Root(beta))
}

fn relabel(e: Error, alpha: usize, partner: PolePartner) -> Error {
    match e {
        Error::PoleProximity { distance, .. } => Error::BethePole {
            alpha,
            partner,
            distance,
        },
        other => other,
    }
}

/// Residual vector `F` of the Bethe equations.
pub fn residual(rootset: &RootSet, system: &SpinSystem) -> Result<DVector<Complex64>> {
    let ctx = system.ctx();
    let spins = system.spins();
    let zs = system.zs();
    let lam = &rootset.roots;
    let shift = rootset.sector.shift(ctx);
    let mut f = DVector::from_element(lam.len(), shift);
    for (a, &la) in lam.iter().enumerate() {
        for (j, (&s, &z)) in spins.iter().zip(&zs).enumerate() {
            f[a] += ctx.phi_sum(la - z).map_err(site_pole(a, j))? * s;
        }
        for (b, &lb) in lam.iter().enumerate().skip(a + 1) {
            let p = ctx.phi_sum(la - lb).map_err(root_pole(a, b))?;
            // φ is odd, so the pair enters both equations
            f[a] -= p;
            f[b] += p;
        }
    }
    Ok(f)
}

/// Analytic Jacobian `∂F_α/∂λ_β`.
pub fn jacobian(rootset: &RootSet, system: &SpinSystem) -> Result<DMatrix<Complex64>> {
    Ok(residual_and_jacobian(rootset, system)?.1)
}

/// Residual and Jacobian from a single pass over the pair sums.
pub fn residual_and_jacobian(
    rootset: &RootSet,
    system: &SpinSystem,
) -> Result<(DVector<Complex64>, DMatrix<Complex64>)> {
    let ctx = system.ctx();
    let spins = system.spins();
    let zs = system.zs();
    let lam = &rootset.roots;
    let m = lam.len();
    let mut f = DVector::from_element(m, rootset.sector.shift(ctx));
    let mut jac = DMatrix::<Complex64>::zeros(m, m);
    for (a, &la) in lam.iter().enumerate() {
        for (j, (&s, &z)) in spins.iter().zip(&zs).enumerate() {
            let (p, dp) = ctx
                .phi_sum_with_derivative(la - z)
                .map_err(site_pole(a, j))?;
            f[a] += p * s;
            jac[(a, a)] += dp * s;
        }
        for (b, &lb) in lam.iter().enumerate().skip(a + 1) {
            let (p, dp) = ctx
                .phi_sum_with_derivative(la - lb)
                .map_err(root_pole(a, b))?;
            f[a] -= p;
            f[b] += p;
            // φ′ is even
            jac[(a, a)] -= dp;
            jac[(b, b)] -= dp;
            jac[(a, b)] = dp;
            jac[(b, a)] = dp;
        }
    }
    Ok((f, jac))
}

/// Eigenvalues `r_i` of every integral, without dropping imaginary parts.
pub fn eigenvalues_complex(rootset: &RootSet, system: &SpinSystem) -> Result<Vec<Complex64>> {
    let ctx = system.ctx();
    let spins = system.spins();
    let zs = system.zs();
    let shift = rootset.sector.shift(ctx);
    let mut r = Vec::with_capacity(zs.len());
    for (i, (&si, &zi)) in spins.iter().zip(&zs).enumerate() {
        let mut acc = shift;
        for (j, (&sj, &zj)) in spins.iter().zip(&zs).enumerate() {
            if j != i {
                acc += ctx.phi_sum(Complex64::new(zi - zj, 0.0))? * sj;
            }
        }
        for (a, &la) in rootset.roots.iter().enumerate() {
            acc -= ctx
                .phi_sum(Complex64::new(zi, 0.0) - la)
                .map_err(site_pole(a, i))?;
        }
        r.push(acc * si);
    }
    Ok(r)
}

/// Eigenvalues `r_i` as real numbers.
pub fn eigenvalues(rootset: &RootSet, system: &SpinSystem) -> Result<Vec<f64>> {
    truncate_real(&eigenvalues_complex(rootset, system)?)
}

fn truncate_real(r: &[Complex64]) -> Result<Vec<f64>> {
    r.iter()
        .enumerate()
        .map(|(index, z)| {
            if z.im.abs() < REALITY_TOL {
                Ok(z.re)
            } else {
                Err(Error::NonRealEigenvalue { index, imag: z.im })
            }
        })
        .collect()
}

/// `Σ c_i Re r_i`.
pub fn solution_energy(coeffs: &[(usize, f64)], solution: &BetheSolution) -> f64 {
    energy_from_r(coeffs, &solution.r)
}

pub fn energy_from_r(coeffs: &[(usize, f64)], r: &[Complex64]) -> f64 {
    coeffs
        .iter()
        .filter(|(i, _)| *i < r.len())
        .map(|&(i, c)| c * r[i].re)
        .sum()
}

/// `max_α |F_α|`.
pub fn residual_norm(f: &DVector<Complex64>) -> f64 {
    f.iter().fold(0.0, |m, z| m.max(z.norm()))
}

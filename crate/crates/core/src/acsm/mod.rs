//! Anisotropic central spin model `H = -R₁`: a central spin ½ at `z₁ = 0`
//! coupled to `N - 1` bath spins ½ on an equidistant grid in `[a, b]`.
//!
//! Covers system construction, the classical energy and its closed-form
//! large-`N` limit, ground-state seeding, arc-fit continuation in `N` and
//! extrapolation in `1/N`.

mod arc;
mod continuation;

pub use arc::{arc_fit, arc_roots, fit_arc_or_vertical, fit_arc_points, ArcFit};
pub use continuation::{
    continuation_step, excited_states, extrapolate, extrapolate_trace, ground_state_seed,
    matches_ground_state_pattern, root_layout, run_continuation, ContinuationOptions,
    ContinuationTrace, ExtrapolationResult, RootLayout, SeedOptions, TraceExtrapolation,
    TracePoint, DEFAULT_SCHEDULE,
};

use serde::{Deserialize, Serialize};

use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::spinops::{build_hamiltonian, couplings, OperatorMatrix, SpinSite, SpinSystem};

/// `H = -R₁` as integral coefficients.
pub const HAMILTONIAN_COEFFS: [(usize, f64); 1] = [(0, -1.0)];

/// Slack on the `b ≤ K` bound.
const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcsmParams {
    /// Total number of spins, central spin included.
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

impl AcsmParams {
    /// Checks `N ≥ 4` even, `0 < a < b ≤ K` and `0 < k < 1`.
    pub fn new(n: usize, a: f64, b: f64, k: f64) -> Result<Self> {
        let p = Self { n, a, b, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.n % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "N = {} must be even and at least 4",
                self.n
            )));
        }
        let ctx = EllipticContext::new(self.k)?;
        if !(self.a > 0.0 && self.a < self.b && self.b <= ctx.kk + ENDPOINT_TOL) {
            return Err(Error::InvalidParams(format!(
                "need 0 < a < b <= K = {}, got a = {}, b = {}",
                ctx.kk, self.a, self.b
            )));
        }
        Ok(())
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.a, self.b, self.k)
    }

    /// Number of Bethe roots, `N/2`.
    pub fn root_count(&self) -> usize {
        self.n / 2
    }
}

impl Default for AcsmParams {
    fn default() -> Self {
        Self {
            n: 12,
            a: 0.2,
            b: 0.6,
            k: 0.5,
        }
    }
}

/// Bath positions `z_i = a + (i-2)/(N-2)·(b-a)`, `i = 2 … N`.
pub fn bath_grid(n: usize, a: f64, b: f64) -> Vec<f64> {
    let steps = n.saturating_sub(2).max(1) as f64;
    (2..=n)
        .map(|i| a + (i - 2) as f64 / steps * (b - a))
        .collect()
}

/// Every site parameter, the central spin first.
pub fn site_parameters(params: &AcsmParams) -> Vec<f64> {
    let mut z = vec![0.0];
    z.extend(bath_grid(params.n, params.a, params.b));
    z
}

pub fn acsm_system(params: &AcsmParams) -> Result<SpinSystem> {
    params.validate()?;
    let ctx = EllipticContext::new(params.k)?;
    let sites = site_parameters(params)
        .into_iter()
        .map(SpinSite::spin_half)
        .collect();
    SpinSystem::new(sites, ctx)
}

/// System and its dense Hamiltonian `-R₁`.
pub fn build_acsm(params: &AcsmParams) -> Result<(SpinSystem, OperatorMatrix)> {
    let system = acsm_system(params)?;
    let h = build_hamiltonian(&HAMILTONIAN_COEFFS, &system)?;
    Ok((system, h))
}

/// `(J^x, J^y, J^z)` between the central spin and each bath site.
pub fn bath_couplings(params: &AcsmParams) -> Result<Vec<[f64; 3]>> {
    let ctx = EllipticContext::new(params.k)?;
    bath_grid(params.n, params.a, params.b)
        .into_iter()
        .map(|z| couplings(z, &ctx))
        .collect()
}

/// Classical spin direction by polar and azimuthal angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSpin {
    pub theta: f64,
    pub phi: f64,
}

impl ClassicalSpin {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Total classical energy of a configuration (central spin first), with
/// each spin a vector of length ½.
pub fn classical_configuration_energy(params: &AcsmParams, spins: &[ClassicalSpin]) -> Result<f64> {
    if spins.len() != params.n {
        return Err(Error::InvalidParams(format!(
            "{} angles for {} spins",
            spins.len(),
            params.n
        )));
    }
    let centre = spins[0].vector();
    let energy = bath_couplings(params)?
        .iter()
        .zip(&spins[1..])
        .map(|(j, s)| {
            let v = s.vector();
            (0..3).map(|a| j[a] * centre[a] * v[a]).sum::<f64>()
        })
        .sum::<f64>();
    Ok(energy / 4.0)
}

/// Antiparallel configuration along one axis (0 = x, 1 = y, 2 = z) with
/// the central spin opposite to the bath.
pub fn axis_aligned_configuration(params: &AcsmParams, axis: usize) -> Vec<ClassicalSpin> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let (centre, bath) = match axis {
        0 => (
            ClassicalSpin::new(FRAC_PI_2, PI),
            ClassicalSpin::new(FRAC_PI_2, 0.0),
        ),
        1 => (
            ClassicalSpin::new(FRAC_PI_2, 3.0 * FRAC_PI_2),
            ClassicalSpin::new(FRAC_PI_2, FRAC_PI_2),
        ),
        _ => (ClassicalSpin::new(PI, 0.0), ClassicalSpin::new(0.0, 0.0)),
    };
    let mut spins = vec![centre];
    spins.extend(std::iter::repeat(bath).take(params.n - 1));
    spins
}

/// Classical ground-state energy per spin, `-(1/4N) Σ_j J^x_j`.
pub fn classical_energy(params: &AcsmParams) -> Result<f64> {
    let sum: f64 = bath_couplings(params)?.iter().map(|j| j[0]).sum();
    Ok(-sum / (4.0 * params.n as f64))
}

/// Closed-form `N → ∞` limit of [`classical_energy`] for the uniform bath.
pub fn classical_limit(params: &AcsmParams) -> Result<f64> {
    let ctx = EllipticContext::new(params.k)?;
    let (a, b, k) = (params.a, params.b, params.k);
    let (sa, ca, da) = ctx.sn_cn_dn(a)?;
    if (b - a).abs() < 1e-12 {
        return Ok(-(1.0 + k * sa * sa) / (4.0 * sa));
    }
    let (sb, cb, db) = ctx.sn_cn_dn(b)?;
    let ratio = (sb * (ca + da) * (db - k * cb)) / (sa * (cb + db) * (da - k * ca));
    Ok(ratio.ln() / (4.0 * (a - b)))
}

//! Spin operators on the product basis: integrals of motion `R_i`,
//! Hamiltonians built from them, the Z₂ parity and exact diagonalisation.
//!
//! Basis states are ordered as a Kronecker product with site 0 as the most
//! significant factor; on each site the local index `d` labels
//! `m = s - d`.

mod cluster;
mod eigen;
mod matrix;
mod parity;

pub use cluster::{cluster_spectral_error, compress, merged_system, triplet_isometry};
pub use eigen::{eigensolve, eigensolve_lowest, Spectrum, DENSE_LIMIT};
pub use matrix::{spin_matrices, twice_spin, OperatorMatrix, SpinMatrices, HERMITIAN_TOL};
pub use parity::{
    parity_dims, parity_of_state, parity_operator, parity_split, ParityBlocks, PARITY_TOL,
};

use nalgebra::DMatrix;

use crate::elliptic::{EllipticContext, POLE_GUARD};
use crate::error::{Error, Result};
use matrix::ladder;

/// Largest product-basis dimension that dense routines will build.
pub const MAX_DENSE_DIM: usize = 4096;

/// How the modulus enters the x/y couplings.
///
/// `Modulus` is `J^{x,y} = (1 ± k sn²)/sn`, the form for which the
/// integrals commute. `ModulusSquared` swaps in `k²` and exists only as a
/// negative control for the commutator checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CouplingConvention {
    #[default]
    Modulus,
    ModulusSquared,
}

/// One site: spin magnitude and inhomogeneity parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSite {
    twice_s: u32,
    pub z: f64,
}

impl SpinSite {
    pub fn new(s: f64, z: f64) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::InvalidSystem(format!("non-finite z = {z}")));
        }
        Ok(Self {
            twice_s: twice_spin(s)?,
            z,
        })
    }

    pub fn spin_half(z: f64) -> Self {
        Self { twice_s: 1, z }
    }

    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub fn local_dim(&self) -> usize {
        self.twice_s as usize + 1
    }
}

/// Sites plus the elliptic context shared by every coupling.
#[derive(Debug, Clone)]
pub struct SpinSystem {
    sites: Vec<SpinSite>,
    ctx: EllipticContext,
    convention: CouplingConvention,
}

impl SpinSystem {
    /// Requires distinct `z` values and an integer total spin `M = Σ s_i`.
    pub fn new(sites: Vec<SpinSite>, ctx: EllipticContext) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidSystem("no sites".into()));
        }
        for (i, a) in sites.iter().enumerate() {
            for b in &sites[i + 1..] {
                if (a.z - b.z).abs() < POLE_GUARD {
                    return Err(Error::InvalidSystem(format!("repeated z = {}", a.z)));
                }
            }
        }
        let twice_m: u32 = sites.iter().map(|s| s.twice_s).sum();
        if twice_m % 2 != 0 {
            return Err(Error::InvalidSystem(format!(
                "total spin M = {}/2 is not an integer",
                twice_m
            )));
        }
        Ok(Self {
            sites,
            ctx,
            convention: CouplingConvention::Modulus,
        })
    }

    /// Convenience constructor from parallel spin and `z` lists.
    pub fn from_spins(spins: &[f64], zs: &[f64], ctx: EllipticContext) -> Result<Self> {
        if spins.len() != zs.len() {
            return Err(Error::InvalidSystem(format!(
                "{} spins but {} z values",
                spins.len(),
                zs.len()
            )));
        }
        let sites = spins
            .iter()
            .zip(zs)
            .map(|(&s, &z)| SpinSite::new(s, z))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites, ctx)
    }

    pub fn with_convention(mut self, convention: CouplingConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn convention(&self) -> CouplingConvention {
        self.convention
    }

    pub fn sites(&self) -> &[SpinSite] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn ctx(&self) -> &EllipticContext {
        &self.ctx
    }

    pub fn spins(&self) -> Vec<f64> {
        self.sites.iter().map(SpinSite::s).collect()
    }

    pub fn zs(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.z).collect()
    }

    /// Number of Bethe roots, `M = Σ s_i`.
    pub fn root_count(&self) -> usize {
        self.sites.iter().map(|s| s.twice_s as usize).sum::<usize>() / 2
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.sites.iter().map(SpinSite::local_dim).collect()
    }

    /// `∏ (2 s_i + 1)`, saturating on overflow.
    pub fn dim(&self) -> usize {
        self.sites
            .iter()
            .fold(1usize, |d, s| d.saturating_mul(s.local_dim()))
    }

    fn check_dense(&self) -> Result<usize> {
        let dim = self.dim();
        if dim > MAX_DENSE_DIM {
            return Err(Error::DimensionTooLarge {
                dim,
                limit: MAX_DENSE_DIM,
            });
        }
        Ok(dim)
    }

    /// Couplings `(J^x, J^y, J^z)` at `z_i - z_j`.
    pub fn pair_couplings(&self, i: usize, j: usize) -> Result<[f64; 3]> {
        couplings_with(
            self.sites[i].z - self.sites[j].z,
            &self.ctx,
            self.convention,
        )
    }
}

/// Couplings `(J^x, J^y, J^z)` at argument `z`:
///
/// ```text
/// J^x = (1 + k sn²)/sn,  J^y = (1 - k sn²)/sn,  J^z = cn dn / sn
/// ```
pub fn couplings(z: f64, ctx: &EllipticContext) -> Result<[f64; 3]> {
    couplings_with(z, ctx, CouplingConvention::Modulus)
}

pub fn couplings_with(
    z: f64,
    ctx: &EllipticContext,
    convention: CouplingConvention,
) -> Result<[f64; 3]> {
    let period = ctx.real_period();
    let nearest_zero = (z / period).round() * period;
    if (z - nearest_zero).abs() < POLE_GUARD {
        return Err(Error::SingularCoupling(z));
    }
    let (sn, cn, dn) = ctx.sn_cn_dn(z)?;
    let kappa = match convention {
        CouplingConvention::Modulus => ctx.k,
        CouplingConvention::ModulusSquared => ctx.k * ctx.k,
    };
    let sn2 = sn * sn;
    Ok([
        (1.0 + kappa * sn2) / sn,
        (1.0 - kappa * sn2) / sn,
        cn * dn / sn,
    ])
}

/// One bilinear term `c_x S_i^x S_j^x + c_y S_i^y S_j^y + c_z S_i^z S_j^z`.
#[derive(Debug, Clone, Copy)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub coeff: [f64; 3],
}

/// Dense matrix of a sum of two-site bilinears, built by acting on each
/// basis state with `S^±` ladders rather than through Kronecker products.
pub fn bilinear_operator(system: &SpinSystem, terms: &[PairTerm]) -> Result<OperatorMatrix> {
    let dim = system.check_dense()?;
    let dims = system.local_dims();
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for site in (0..n.saturating_sub(1)).rev() {
        strides[site] = strides[site + 1] * dims[site + 1];
    }
    let spins = system.spins();
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    for col in 0..dim {
        let mut rest = col;
        for site in 0..n {
            digits[site] = rest / strides[site];
            rest %= strides[site];
        }
        let m = |site: usize, d: usize| spins[site] - d as f64;
        for t in terms {
            let (i, j) = (t.i, t.j);
            let [cx, cy, cz] = t.coeff;
            let (di, dj) = (digits[i], digits[j]);
            let (mi, mj) = (m(i, di), m(j, dj));
            out[(col, col)] += cz * mi * mj;
            // x/y part: ((cx - cy)/4)(S+S+ + S-S-) + ((cx + cy)/4)(S+S- + S-S+)
            let same = 0.25 * (cx - cy);
            let cross = 0.25 * (cx + cy);
            let up_i = (di > 0).then(|| ladder(spins[i], mi));
            let up_j = (dj > 0).then(|| ladder(spins[j], mj));
            let down_i = (di + 1 < dims[i]).then(|| ladder(spins[i], mi - 1.0));
            let down_j = (dj + 1 < dims[j]).then(|| ladder(spins[j], mj - 1.0));
            let mut add = |row: usize, v: f64| out[(row, col)] += v;
            if let (Some(a), Some(b)) = (up_i, up_j) {
                add(col - strides[i] - strides[j], same * a * b);
            }
            if let (Some(a), Some(b)) = (down_i, down_j) {
                add(col + strides[i] + strides[j], same * a * b);
            }
            if let (Some(a), Some(b)) = (up_i, down_j) {
                add(col - strides[i] + strides[j], cross * a * b);
            }
            if let (Some(a), Some(b)) = (down_i, up_j) {
                add(col + strides[i] - strides[j], cross * a * b);
            }
        }
    }
    let mut op = OperatorMatrix::from_real(out);
    let defect = op.hermitian_defect();
    if defect >= HERMITIAN_TOL {
        return Err(Error::NonHermitian(defect));
    }
    op.set_hermitian_unchecked(true);
    Ok(op)
}

fn integral_terms(i: usize, system: &SpinSystem) -> Result<Vec<PairTerm>> {
    (0..system.len())
        .filter(|&j| j != i)
        .map(|j| {
            Ok(PairTerm {
                i,
                j,
                coeff: system.pair_couplings(i, j)?,
            })
        })
        .collect()
}

/// Integral of motion `R_i = Σ_{j≠i} Σ_α J^α(z_i - z_j) S_i^α S_j^α`.
pub fn build_integral(i: usize, system: &SpinSystem) -> Result<OperatorMatrix> {
    if i >= system.len() {
        return Err(Error::InvalidParams(format!(
            "site index {i} out of range for {} sites",
            system.len()
        )));
    }
    bilinear_operator(system, &integral_terms(i, system)?)
}

/// `H = Σ c_i R_i`.
pub fn build_hamiltonian(coeffs: &[(usize, f64)], system: &SpinSystem) -> Result<OperatorMatrix> {
    let mut terms = Vec::new();
    for &(i, c) in coeffs {
        if i >= system.len() {
            return Err(Error::InvalidParams(format!("site index {i} out of range")));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParams(format!("coefficient {c} for R_{i}")));
        }
        if c == 0.0 {
            continue;
        }
        for mut t in integral_terms(i, system)? {
            t.coeff = t.coeff.map(|x| x * c);
            terms.push(t);
        }
    }
    bilinear_operator(system, &terms)
}

/// Coefficient of `S_i^α S_j^α` (i < j) in `Σ c_i R_i`, for every pair.
pub fn pair_coefficients(
    coeffs: &[(usize, f64)],
    system: &SpinSystem,
) -> Result<Vec<((usize, usize), [f64; 3])>> {
    let n = system.len();
    let weight = |site: usize| -> f64 {
        coeffs
            .iter()
            .filter(|(i, _)| *i == site)
            .map(|(_, c)| c)
            .sum()
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let jij = system.pair_couplings(i, j)?;
            let jji = system.pair_couplings(j, i)?;
            let (wi, wj) = (weight(i), weight(j));
            let mut c = [0.0; 3];
            for a in 0..3 {
                c[a] = wi * jij[a] + wj * jji[a];
            }
            out.push(((i, j), c));
        }
    }
    Ok(out)
}

/// Trigonometric integral
/// `R⁰_i = Σ_{j≠i} [ (S⁺S⁻ + S⁻S⁺)/(2 sin z_ij) + cot z_ij S^z S^z ]`.
pub fn trigonometric_integral(i: usize, system: &SpinSystem) -> Result<OperatorMatrix> {
    let terms: Vec<PairTerm> = (0..system.len())
        .filter(|&j| j != i)
        .map(|j| {
            let x = system.sites[i].z - system.sites[j].z;
            let inv = 1.0 / x.sin();
            PairTerm {
                i,
                j,
                coeff: [inv, inv, x.cos() * inv],
            }
        })
        .collect();
    bilinear_operator(system, &terms)
}

/// Hyperbolic integral with `η = 2z`, written with `x` as the anisotropy
/// axis (the cyclic relabelling z → x → y → z of the usual form):
/// `Σ_{j≠i} [ (S^y S^y + S^z S^z)/sinh η_ij + coth η_ij S^x S^x ]`.
pub fn hyperbolic_integral(i: usize, system: &SpinSystem) -> Result<OperatorMatrix> {
    let terms: Vec<PairTerm> = (0..system.len())
        .filter(|&j| j != i)
        .map(|j| {
            let eta = 2.0 * (system.sites[i].z - system.sites[j].z);
            let inv = 1.0 / eta.sinh();
            PairTerm {
                i,
                j,
                coeff: [eta.cosh() * inv, inv, inv],
            }
        })
        .collect();
    bilinear_operator(system, &terms)
}

/// Lifts a single-site operator to the full product space by Kronecker
/// products with identities.
pub fn lift_site(system: &SpinSystem, site: usize, op: &OperatorMatrix) -> OperatorMatrix {
    let mut acc = OperatorMatrix::identity(1);
    for (s, &d) in system.local_dims().iter().enumerate() {
        let factor = if s == site {
            op.clone()
        } else {
            OperatorMatrix::identity(d)
        };
        acc = acc.kron(&factor);
    }
    acc
}

/// Entry-wise maximum of `|[A, B]|`.
pub fn commutator_norm(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    a.commutator(b).max_abs()
}

/// All integrals `R_1 … R_N`.
pub fn build_all_integrals(system: &SpinSystem) -> Result<Vec<OperatorMatrix>> {
    (0..system.len())
        .map(|i| build_integral(i, system))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticContext;

    fn ctx() -> EllipticContext {
        EllipticContext::new(0.5).unwrap()
    }

    fn three_spin() -> SpinSystem {
        SpinSystem::from_spins(&[0.5, 1.0, 1.5], &[0.0, 0.2, 0.4], ctx()).unwrap()
    }

    #[test]
    fn couplings_are_odd() {
        let c = ctx();
        let a = couplings(0.3, &c).unwrap();
        let b = couplings(-0.3, &c).unwrap();
        for i in 0..3 {
            assert!((a[i] + b[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn couplings_are_ordered_inside_quarter_period() {
        let [jx, jy, jz] = couplings(0.4, &ctx()).unwrap();
        assert!(jx > jy && jy > jz && jz > 0.0);
    }

    #[test]
    fn coupling_reference_value() {
        let [jx, _, _] = couplings(0.2, &ctx()).unwrap();
        assert!((jx - 5.14088).abs() < 5e-6);
        assert!((0.25 * jx - 1.28522).abs() < 5e-6);
    }

    #[test]
    fn coupling_singular_at_sn_zero() {
        let c = ctx();
        assert!(matches!(
            couplings(0.0, &c),
            Err(Error::SingularCoupling(_))
        ));
        assert!(matches!(
            couplings(c.real_period(), &c),
            Err(Error::SingularCoupling(_))
        ));
    }

    #[test]
    fn system_validation() {
        let c = ctx();
        assert!(SpinSystem::from_spins(&[0.5, 0.5], &[0.1, 0.1], c.clone()).is_err());
        assert!(SpinSystem::from_spins(&[0.5, 1.0], &[0.1, 0.2], c.clone()).is_err());
        assert!(SpinSystem::from_spins(&[0.5], &[0.1, 0.2], c).is_err());
    }

    #[test]
    fn integrals_are_traceless_and_commute() {
        let sys = three_spin();
        let rs = build_all_integrals(&sys).unwrap();
        for r in &rs {
            assert!(r.is_hermitian());
            assert!(r.trace().norm() < 1e-12);
        }
        assert!(commutator_norm(&rs[0], &rs[1]) < 1e-10);
        assert!(commutator_norm(&rs[1], &rs[2]) < 1e-10);
    }

    #[test]
    fn ladder_builder_matches_kronecker_products() {
        let sys = three_spin();
        let r = build_integral(1, &sys).unwrap();
        let mut kron = OperatorMatrix::zeros(sys.dim());
        for j in [0usize, 2] {
            let jj = sys.pair_couplings(1, j).unwrap();
            let si = spin_matrices(sys.sites()[1].s()).unwrap();
            let sj = spin_matrices(sys.sites()[j].s()).unwrap();
            for (a, (oi, oj)) in [(&si.sx, &sj.sx), (&si.sy, &sj.sy), (&si.sz, &sj.sz)]
                .into_iter()
                .enumerate()
            {
                let term = &lift_site(&sys, 1, oi) * &lift_site(&sys, j, oj);
                kron = &kron + &term.scale(jj[a]);
            }
        }
        assert!((&r - &kron).max_abs() < 1e-13);
    }

    #[test]
    fn zero_hamiltonian() {
        let sys = three_spin();
        let h = build_hamiltonian(&[(0, 0.0), (1, 0.0)], &sys).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn three_spin_pair_coefficients() {
        let sys = three_spin();
        let pc = pair_coefficients(&[(0, -0.5), (1, -0.25)], &sys).unwrap();
        let expected = [
            [1.28522, 1.23563, 1.2293],
            [1.38861, 1.19509, 1.16865],
            [1.28522, 1.23563, 1.2293],
        ];
        for ((_, got), want) in pc.iter().zip(expected) {
            for a in 0..3 {
                let rel = (got[a] - want[a]).abs() / want[a];
                assert!(rel < 5e-6, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn dense_budget_is_enforced() {
        let zs: Vec<f64> = (0..14).map(|i| 0.05 + 0.07 * i as f64).collect();
        let sys = SpinSystem::from_spins(&[0.5; 14], &zs, ctx()).unwrap();
        assert!(matches!(
            build_integral(0, &sys),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{build_hamiltonian, eigensolve, OperatorMatrix, SpinSite, SpinSystem};
use crate::error::{Error, Result};

/// Spin-½ pair at `(site, site + 1)` replaced by one spin-1 site at the
/// first parameter.
pub fn merged_system(system: &SpinSystem, site: usize) -> Result<SpinSystem> {
    check_pair(system, site)?;
    let mut sites: Vec<SpinSite> = system.sites().to_vec();
    sites[site] = SpinSite::new(1.0, sites[site].z)?;
    sites.remove(site + 1);
    SpinSystem::new(sites, system.ctx().clone())
}

fn check_pair(system: &SpinSystem, site: usize) -> Result<()> {
    let spins = system.spins();
    if site + 1 >= spins.len() || spins[site] != 0.5 || spins[site + 1] != 0.5 {
        return Err(Error::InvalidParams(format!(
            "sites {site} and {} must both be spin 1/2",
            site + 1
        )));
    }
    Ok(())
}

/// Isometry from the merged basis into the triplet subspace of the pair:
/// column `c` is the product-basis image of merged basis state `c`.
pub fn triplet_isometry(system: &SpinSystem, site: usize) -> Result<DMatrix<Complex64>> {
    check_pair(system, site)?;
    let dims = system.local_dims();
    let before: usize = dims[..site].iter().product();
    let after: usize = dims[site + 2..].iter().product();
    let full = system.dim();
    let mut v = DMatrix::zeros(full, before * 3 * after);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // pair index 2·d₁ + d₂ with d = 0 for m = +½
    let triplet: [&[(usize, f64)]; 3] = [&[(0, 1.0)], &[(1, h), (2, h)], &[(3, 1.0)]];
    for b in 0..before {
        for (t, amps) in triplet.iter().enumerate() {
            for a in 0..after {
                let col = (b * 3 + t) * after + a;
                for &(pair, amp) in amps.iter() {
                    v[((b * 4 + pair) * after + a, col)] = Complex64::new(amp, 0.0);
                }
            }
        }
    }
    Ok(v)
}

/// `V^H A V` for an isometry `V`.
pub fn compress(op: &OperatorMatrix, v: &DMatrix<Complex64>) -> Result<OperatorMatrix> {
    let m = v.adjoint() * op.entries() * v;
    OperatorMatrix::hermitian((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Splits merged-system coefficients onto the unmerged sites: the cluster
/// integral becomes `R_site + R_{site+1}`, whose `1/ε` pair terms cancel.
fn split_coefficients(coeffs: &[(usize, f64)], site: usize) -> Vec<(usize, f64)> {
    coeffs
        .iter()
        .flat_map(|&(i, c)| match i.cmp(&site) {
            std::cmp::Ordering::Less => vec![(i, c)],
            std::cmp::Ordering::Equal => vec![(site, c), (site + 1, c)],
            std::cmp::Ordering::Greater => vec![(i + 1, c)],
        })
        .collect()
}

/// Largest eigenvalue difference between `Σ c_i R_i` of the merged system
/// and the same combination on the split system compressed to the pair
/// triplet. Vanishes linearly in the pair separation.
pub fn cluster_spectral_error(
    system: &SpinSystem,
    site: usize,
    merged_coeffs: &[(usize, f64)],
) -> Result<f64> {
    let merged = merged_system(system, site)?;
    let h_merged = build_hamiltonian(merged_coeffs, &merged)?;
    let h_split = build_hamiltonian(&split_coefficients(merged_coeffs, site), system)?;
    let compressed = compress(&h_split, &triplet_isometry(system, site)?)?;
    let a = eigensolve(&h_merged)?.values;
    let b = eigensolve(&compressed)?.values;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticContext;

    fn split(eps: f64) -> SpinSystem {
        SpinSystem::from_spins(
            &[0.5, 0.5, 1.0],
            &[0.1, 0.1 + eps, 0.45],
            EllipticContext::new(0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn isometry_is_orthonormal() {
        let v = triplet_isometry(&split(0.01), 0).unwrap();
        assert_eq!(v.shape(), (12, 9));
        let g = v.adjoint() * &v;
        let defect = (g - DMatrix::<Complex64>::identity(9, 9))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(defect < 1e-15);
    }

    #[test]
    fn error_is_linear_in_separation() {
        let coeffs = [(0, -0.5), (1, -0.25)];
        let e3 = cluster_spectral_error(&split(1e-3), 0, &coeffs).unwrap();
        let e4 = cluster_spectral_error(&split(1e-4), 0, &coeffs).unwrap();
        let ratio = e3 / e4;
        assert!((8.0..12.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_non_half_pair() {
        let sys = SpinSystem::from_spins(
            &[1.0, 0.5, 0.5, 1.0],
            &[0.0, 0.2, 0.3, 0.4],
            EllipticContext::new(0.5).unwrap(),
        )
        .unwrap();
        assert!(merged_system(&sys, 0).is_err());
        assert!(merged_system(&sys, 1).is_ok());
    }
}

use super::{OperatorMatrix, SpinSystem};
use crate::error::{Error, Result};

/// Largest allowed coupling between the two parity sectors.
pub const PARITY_TOL: f64 = 1e-10;

/// Parity `∏ (-1)^{s_i - m_i}` of a product basis state, normalised so
/// that the fully stretched state has parity `+1`.
pub fn parity_of_state(system: &SpinSystem, index: usize) -> i8 {
    let mut rest = index;
    let mut flips = 0usize;
    for &d in system.local_dims().iter().rev() {
        flips += rest % d;
        rest /= d;
    }
    if flips % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of even and odd basis states.
pub fn parity_dims(system: &SpinSystem) -> (usize, usize) {
    // the generating function ∏ (1 + x + ... + x^{2s}) evaluated at x = -1
    let dim = system.dim();
    let signed: i64 = system
        .local_dims()
        .iter()
        .map(|&d| if d % 2 == 0 { 0 } else { 1 })
        .product();
    let even = (dim as i64 + signed) / 2;
    (even as usize, dim - even as usize)
}

/// Operator split into its even and odd parity blocks.
#[derive(Debug, Clone)]
pub struct ParityBlocks {
    pub even_basis: Vec<usize>,
    pub odd_basis: Vec<usize>,
    pub even: OperatorMatrix,
    pub odd: OperatorMatrix,
}

impl ParityBlocks {
    pub fn dims(&self) -> (usize, usize) {
        (self.even_basis.len(), self.odd_basis.len())
    }
}

/// Splits `op` into parity blocks after checking `[op, P] = 0`.
pub fn parity_split(op: &OperatorMatrix, system: &SpinSystem) -> Result<ParityBlocks> {
    let dim = op.dim();
    if dim != system.dim() {
        return Err(Error::InvalidParams(format!(
            "operator dimension {dim} does not match the system dimension {}",
            system.dim()
        )));
    }
    let parity: Vec<i8> = (0..dim).map(|i| parity_of_state(system, i)).collect();
    // [A, P]_{ij} = A_ij (p_j - p_i), nonzero only across sectors
    let entries = op.entries();
    let mut leak: f64 = 0.0;
    for j in 0..dim {
        for i in 0..dim {
            if parity[i] != parity[j] {
                leak = leak.max(2.0 * entries[(i, j)].norm());
            }
        }
    }
    if leak > PARITY_TOL {
        return Err(Error::NonCommuting(leak));
    }
    let even_basis: Vec<usize> = (0..dim).filter(|&i| parity[i] == 1).collect();
    let odd_basis: Vec<usize> = (0..dim).filter(|&i| parity[i] == -1).collect();
    Ok(ParityBlocks {
        even: op.restrict(&even_basis),
        odd: op.restrict(&odd_basis),
        even_basis,
        odd_basis,
    })
}

/// Parity operator as a diagonal matrix.
pub fn parity_operator(system: &SpinSystem) -> OperatorMatrix {
    let dim = system.dim();
    let diag = nalgebra::DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            parity_of_state(system, i) as f64
        } else {
            0.0
        }
    });
    OperatorMatrix::from_real(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::EllipticContext;
    use crate::spinops::{build_integral, commutator_norm, spin_matrices};

    fn ctx() -> EllipticContext {
        EllipticContext::new(0.5).unwrap()
    }

    #[test]
    fn three_spin_blocks_are_balanced() {
        let sys = SpinSystem::from_spins(&[0.5, 1.0, 1.5], &[0.0, 0.2, 0.4], ctx()).unwrap();
        assert_eq!(parity_dims(&sys), (12, 12));
        let r = build_integral(0, &sys).unwrap();
        let blocks = parity_split(&r, &sys).unwrap();
        assert_eq!(blocks.dims(), (12, 12));
    }

    #[test]
    fn two_spin_halves_by_enumeration() {
        let sys = SpinSystem::from_spins(&[0.5, 0.5], &[0.1, 0.3], ctx()).unwrap();
        let even = (0..4).filter(|&i| parity_of_state(&sys, i) == 1).count();
        assert_eq!(even, 2);
        assert_eq!(parity_dims(&sys), (2, 2));
    }

    #[test]
    fn parity_squares_to_identity_and_commutes_with_integrals() {
        let sys = SpinSystem::from_spins(&[1.0, 0.5, 1.5], &[0.1, 0.35, 0.6], ctx()).unwrap();
        let p = parity_operator(&sys);
        let p2 = &p * &p;
        assert!((&p2 - &OperatorMatrix::identity(sys.dim())).max_abs() < 1e-15);
        for i in 0..3 {
            let r = build_integral(i, &sys).unwrap();
            assert!(commutator_norm(&r, &p) < 1e-10);
        }
    }

    #[test]
    fn parity_matches_exponential_form_up_to_phase() {
        // exp(iπ(S^z + s)) on one site is diagonal with entries (-1)^{2s - d}
        let sys = SpinSystem::from_spins(&[1.5, 0.5], &[0.1, 0.3], ctx()).unwrap();
        let sz = spin_matrices(1.5).unwrap().sz;
        for d in 0..4 {
            let m = sz.entries()[(d, d)].re;
            let phase = (std::f64::consts::PI * (m + 1.5)).cos();
            let ours = parity_of_state(&sys, d * 2) as f64;
            // global phase (-1)^{2s} for s = 3/2 and (-1)^{1} for the spin-1/2 site
            assert!((phase * -1.0 - ours).abs() < 1e-12);
        }
    }

    #[test]
    fn non_commuting_operator_is_rejected() {
        let sys = SpinSystem::from_spins(&[0.5, 0.5], &[0.1, 0.3], ctx()).unwrap();
        let sx = spin_matrices(0.5).unwrap().sx;
        let op = crate::spinops::lift_site(&sys, 0, &sx);
        assert!(matches!(
            parity_split(&op, &sys),
            Err(Error::NonCommuting(_))
        ));
    }
}

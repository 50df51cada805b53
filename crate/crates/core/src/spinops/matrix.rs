use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entry-wise tolerance on `A - A^H` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense operator in a product spin basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square(), "operator matrices are square");
        Self {
            entries,
            hermitian: false,
        }
    }

    /// Wraps `entries` and sets the Hermitian flag after checking it.
    pub fn hermitian(entries: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Self::new(entries);
        let asym = op.hermitian_defect();
        if asym >= HERMITIAN_TOL {
            return Err(Error::NonHermitian(asym));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn from_real(entries: DMatrix<f64>) -> Self {
        Self::new(entries.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub(crate) fn set_hermitian_unchecked(&mut self, flag: bool) {
        self.hermitian = flag;
    }

    /// `max |A - A^H|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest imaginary part of any entry.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        Self::new(ab - ba)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            entries: &self.entries * Complex64::new(c, 0.0),
            hermitian: self.hermitian,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.kronecker(&other.entries),
            hermitian: self.hermitian && other.hermitian,
        }
    }

    /// Real part of the entries, if the imaginary parts are negligible.
    pub fn real_entries(&self, tol: f64) -> Option<DMatrix<f64>> {
        (self.max_imag() <= tol).then(|| self.entries.map(|z| z.re))
    }

    /// Principal submatrix on the given basis indices.
    pub fn restrict(&self, basis: &[usize]) -> Self {
        let n = basis.len();
        let entries = DMatrix::from_fn(n, n, |i, j| self.entries[(basis[i], basis[j])]);
        Self {
            entries,
            hermitian: self.hermitian,
        }
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries + &rhs.entries,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries - &rhs.entries,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix::new(&self.entries * &rhs.entries)
    }
}

/// Spin-s representation in the basis `m = s, s-1, ..., -s`.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    pub sx: OperatorMatrix,
    pub sy: OperatorMatrix,
    pub sz: OperatorMatrix,
    pub splus: OperatorMatrix,
    pub sminus: OperatorMatrix,
}

/// Returns `2s` if `s` is a positive half-integer.
pub fn twice_spin(s: f64) -> Result<u32> {
    let two_s = 2.0 * s;
    if !(two_s.is_finite() && two_s >= 0.5) || (two_s - two_s.round()).abs() > 1e-12 {
        return Err(Error::InvalidSpin(s));
    }
    Ok(two_s.round() as u32)
}

/// Ladder matrix element `<m+1| S+ |m>`.
pub(crate) fn ladder(s: f64, m: f64) -> f64 {
    (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

pub fn spin_matrices(s: f64) -> Result<SpinMatrices> {
    let dim = twice_spin(s)? as usize + 1;
    let m_of = |i: usize| s - i as f64;
    let sz = DMatrix::from_fn(dim, dim, |i, j| if i == j { m_of(i) } else { 0.0 });
    // S+ raises m, which lowers the basis index by one.
    let sp = DMatrix::from_fn(
        dim,
        dim,
        |i, j| {
            if i + 1 == j {
                ladder(s, m_of(j))
            } else {
                0.0
            }
        },
    );
    let sm = sp.transpose();
    let half = Complex64::new(0.5, 0.0);
    let sp_c = sp.map(|x| Complex64::new(x, 0.0));
    let sm_c = sm.map(|x| Complex64::new(x, 0.0));
    let sx = (&sp_c + &sm_c) * half;
    let sy = (&sp_c - &sm_c) * Complex64::new(0.0, -0.5);
    let flagged = |m: DMatrix<Complex64>| OperatorMatrix {
        entries: m,
        hermitian: true,
    };
    Ok(SpinMatrices {
        sx: flagged(sx),
        sy: flagged(sy),
        sz: flagged(sz.map(|x| Complex64::new(x, 0.0))),
        splus: OperatorMatrix::new(sp_c),
        sminus: OperatorMatrix::new(sm_c),
    })
}

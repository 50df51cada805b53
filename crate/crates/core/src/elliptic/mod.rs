//! Complete elliptic integrals, Jacobi elliptic functions of complex
//! argument and the logarithmic derivatives of the theta functions
//! `H(u) = ϑ₁(v)` and `Θ(u) = ϑ₄(v)` with `v = πu / 2K`.
//!
//! Everything here is evaluated from one truncated q-series kernel
//! ([`theta`]); the elliptic functions are theta ratios and the
//! logarithmic derivatives are ratios of term-wise differentiated series.

mod theta;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use theta::ThetaSeries;

/// Inputs closer than this to a pole of the evaluated function are rejected.
pub const POLE_GUARD: f64 = 1e-8;

/// Maximum spread of the quasi-period shift across the validation points.
const SHIFT_CONSISTENCY: f64 = 1e-10;

/// Modulus `k` together with its derived constants.
///
/// `quasi_shift` is the constant `C` with `φ(u + iK') = φ(u) + iC` for
/// `φ = φ₁ + φ₄`. It is measured at construction; for the theta
/// normalisation used here it equals `-π/K`.
#[derive(Debug, Clone, Serialize)]
pub struct EllipticContext {
    pub k: f64,
    /// Complete elliptic integral of the first kind, `K(k)`.
    pub kk: f64,
    /// `K'(k) = K(√(1 - k²))`.
    pub kk_prime: f64,
    /// Nome `q = exp(-π K'/K)`.
    pub q: f64,
    pub quasi_shift: f64,
    #[serde(skip)]
    series: ThetaSeries,
    /// ϑ₂(0), ϑ₃(0), ϑ₄(0).
    #[serde(skip)]
    null_values: [f64; 3],
}

/// `K(k) = π / (2 AGM(1, √(1 - k²)))`, with the complementary modulus
/// passed explicitly so that `k → 1` does not lose digits.
fn complete_k(k_comp: f64) -> f64 {
    PI / (2.0 * agm(1.0, k_comp))
}

/// Arithmetic-geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 4.0 * f64::EPSILON * an {
            return an;
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind at modulus `k ∈ [0, 1)`.
pub fn complete_elliptic_k(k: f64) -> f64 {
    complete_k(((1.0 - k) * (1.0 + k)).sqrt())
}

impl EllipticContext {
    /// Builds the context for modulus `0 < k < 1`.
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::ModulusDomain(k));
        }
        let k_comp = ((1.0 - k) * (1.0 + k)).sqrt();
        let kk = complete_k(k_comp);
        let kk_prime = complete_k(k);
        let q = (-PI * kk_prime / kk).exp();
        let series = ThetaSeries::new(q);
        let zero = series.theta_all(Complex64::new(0.0, 0.0));
        let mut ctx = Self {
            k,
            kk,
            kk_prime,
            q,
            quasi_shift: 0.0,
            series,
            null_values: [zero.t2.re, zero.t3.re, zero.t4.re],
        };
        ctx.quasi_shift = ctx.measure_quasi_shift()?;
        Ok(ctx)
    }

    /// `Im(φ(λ + iK') - φ(λ))` at a reference point, cross-checked at two more.
    fn measure_quasi_shift(&self) -> Result<f64> {
        let (kk, kp) = (self.kk, self.kk_prime);
        let probes = [
            Complex64::new(0.5 * kk, -0.5 * kp),
            Complex64::new(0.9 * kk, -0.4 * kp),
            Complex64::new(1.3 * kk, -0.45 * kp),
        ];
        let shift = Complex64::new(0.0, kp);
        let mut values = [0.0; 3];
        for (slot, &u) in values.iter_mut().zip(&probes) {
            *slot = (self.phi_sum(u + shift)? - self.phi_sum(u)?).im;
        }
        let spread = values
            .iter()
            .map(|v| (v - values[0]).abs())
            .fold(0.0, f64::max);
        if spread > SHIFT_CONSISTENCY * values[0].abs().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "quasi-period shift is not constant (spread {spread:.3e})"
            )));
        }
        Ok(values[0])
    }

    /// Real period of φ, `2K`.
    pub fn real_period(&self) -> f64 {
        2.0 * self.kk
    }

    /// Half the imaginary quasi-period, `K'/2`.
    pub fn half_quasi_period(&self) -> f64 {
        0.5 * self.kk_prime
    }

    fn to_angle(&self, u: Complex64) -> Complex64 {
        u * (PI / (2.0 * self.kk))
    }

    /// Reduces `Re u` into `[-K, K)`; returns the reduced point and the
    /// number of half-periods `2K` removed.
    fn reduce_real(&self, u: Complex64) -> (Complex64, i64) {
        let period = 2.0 * self.kk;
        let shifts = (u.re / period).round();
        (Complex64::new(u.re - shifts * period, u.im), shifts as i64)
    }

    /// Nearest point of the lattice `2mK + i n K'`, returned with `n`.
    fn nearest_lattice(&self, u: Complex64) -> (Complex64, i64) {
        let m = (u.re / (2.0 * self.kk)).round();
        let n = (u.im / self.kk_prime).round();
        (
            Complex64::new(2.0 * m * self.kk, n * self.kk_prime),
            n as i64,
        )
    }

    /// Zeros of H sit at even `n`, zeros of Θ at odd `n`; φ₁ and φ₄ have
    /// poles at both kinds, so `phi` guards the whole lattice.
    fn guard(&self, u: Complex64, which: PoleKind) -> Result<()> {
        let (pole, n) = self.nearest_lattice(u);
        let hit = match which {
            PoleKind::Any => true,
            PoleKind::ThetaZero => n.rem_euclid(2) == 1,
        };
        let distance = (u - pole).norm();
        if hit && distance < POLE_GUARD {
            return Err(Error::PoleProximity {
                arg: u,
                pole,
                distance,
            });
        }
        Ok(())
    }

    /// Jacobi elliptic functions `(sn, cn, dn)` at complex `u`.
    pub fn jacobi_elliptic(&self, u: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        self.guard(u, PoleKind::ThetaZero)?;
        let (reduced, shifts) = self.reduce_real(u);
        let t = self.series.theta_all(self.to_angle(reduced));
        let [t2, t3, t4] = self.null_values;
        let mut sn = t.t1 / t.t4 * (t3 / t2);
        let mut cn = t.t2 / t.t4 * (t4 / t2);
        let dn = t.t3 / t.t4 * (t4 / t3);
        // sn and cn change sign under u -> u + 2K
        if shifts.rem_euclid(2) == 1 {
            sn = -sn;
            cn = -cn;
        }
        Ok((sn, cn, dn))
    }

    /// Real-argument shortcut used by couplings and fits.
    pub fn sn_cn_dn(&self, x: f64) -> Result<(f64, f64, f64)> {
        let (s, c, d) = self.jacobi_elliptic(Complex64::new(x, 0.0))?;
        Ok((s.re, c.re, d.re))
    }

    fn theta14_at(&self, u: Complex64) -> Result<theta::Theta14> {
        self.guard(u, PoleKind::Any)?;
        let (reduced, _) = self.reduce_real(u);
        Ok(self.series.theta14(self.to_angle(reduced)))
    }

    /// `(φ₁, φ₄) = (H'/H, Θ'/Θ)`, derivatives taken with respect to `u`.
    pub fn phi(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        let t = self.theta14_at(u)?;
        let scale = PI / (2.0 * self.kk);
        Ok((t.t1p / t.t1 * scale, t.t4p / t.t4 * scale))
    }

    /// `φ = φ₁ + φ₄`.
    pub fn phi_sum(&self, u: Complex64) -> Result<Complex64> {
        let (a, b) = self.phi(u)?;
        Ok(a + b)
    }

    /// `φ'(u)` from the differentiated series.
    pub fn phi_sum_derivative(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.phi_sum_with_derivative(u)?.1)
    }

    /// `(φ(u), φ'(u))` from a single series evaluation.
    pub fn phi_sum_with_derivative(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        let t = self.theta14_at(u)?;
        let scale = PI / (2.0 * self.kk);
        let f1 = t.t1p / t.t1;
        let f4 = t.t4p / t.t4;
        let value = (f1 + f4) * scale;
        let slope = (t.t1pp / t.t1 - f1 * f1 + t.t4pp / t.t4 - f4 * f4) * (scale * scale);
        Ok((value, slope))
    }
}

#[derive(Clone, Copy)]
enum PoleKind {
    Any,
    ThetaZero,
}

/// Free-function form of [`EllipticContext::new`].
pub fn make_context(k: f64) -> Result<EllipticContext> {
    EllipticContext::new(k)
}

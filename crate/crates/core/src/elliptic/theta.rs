//! Truncated q-series for the four Jacobi theta functions in the angular
//! variable `v`, together with the first two derivatives of ϑ₁ and ϑ₄.
//!
//! ```text
//! ϑ₁(v) = 2 Σ (-1)ⁿ q^{(n+½)²} sin((2n+1)v)
//! ϑ₂(v) = 2 Σ       q^{(n+½)²} cos((2n+1)v)
//! ϑ₃(v) = 1 + 2 Σ       q^{n²} cos(2nv)
//! ϑ₄(v) = 1 + 2 Σ (-1)ⁿ q^{n²} cos(2nv)
//! ```
//!
//! The harmonics `sin(mv)`, `cos(mv)` are generated by rotation from
//! `sin v`, `cos v`, which keeps relative accuracy for small `|v|`.

use num_complex::Complex64;

/// Relative size of the last retained term.
const TRUNCATION: f64 = 1e-17;
/// Coefficients below this are never reached in double precision.
const COEFF_FLOOR: f64 = 1e-300;
const MAX_TERMS: usize = 200;

#[derive(Debug, Clone)]
pub(crate) struct ThetaSeries {
    /// q^{(n+½)²}, n = 0, 1, ...
    half: Vec<f64>,
    /// q^{n²}, n = 1, 2, ...
    whole: Vec<f64>,
}

/// ϑ₁ and ϑ₄ with first and second derivatives in `v`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Theta14 {
    pub t1: Complex64,
    pub t1p: Complex64,
    pub t1pp: Complex64,
    pub t4: Complex64,
    pub t4p: Complex64,
    pub t4pp: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaAll {
    pub t1: Complex64,
    pub t2: Complex64,
    pub t3: Complex64,
    pub t4: Complex64,
}

impl ThetaSeries {
    pub fn new(q: f64) -> Self {
        debug_assert!(q > 0.0 && q < 1.0);
        let ln_q = q.ln();
        let mut half = Vec::new();
        let mut whole = Vec::new();
        for n in 0..MAX_TERMS {
            let x = n as f64 + 0.5;
            let c = (ln_q * x * x).exp();
            if c < COEFF_FLOOR {
                break;
            }
            half.push(c);
        }
        for n in 1..MAX_TERMS {
            let x = n as f64;
            let c = (ln_q * x * x).exp();
            if c < COEFF_FLOOR {
                break;
            }
            whole.push(c);
        }
        Self { half, whole }
    }

    fn harmonics(&self, v: Complex64) -> Harmonics {
        Harmonics {
            sin1: v.sin(),
            cos1: v.cos(),
        }
    }

    pub fn theta14(&self, v: Complex64) -> Theta14 {
        let h = self.harmonics(v);
        let zero = Complex64::new(0.0, 0.0);
        let mut out = Theta14 {
            t1: zero,
            t1p: zero,
            t1pp: zero,
            t4: Complex64::new(1.0, 0.0),
            t4p: zero,
            t4pp: zero,
        };
        // (s, c) = (sin mv, cos mv) for m = 1, 2, 3, ...
        let (mut s, mut c) = (h.sin1, h.cos1);
        let mut m = 1usize;
        let n_max = self.half.len().max(self.whole.len() + 1);
        for n in 0..n_max {
            // odd harmonic m = 2n + 1
            debug_assert_eq!(m, 2 * n + 1);
            let mut done_odd = true;
            if let Some(&a) = self.half.get(n) {
                let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
                let mf = m as f64;
                let ts = s * (sign * a);
                let tc = c * (sign * a);
                out.t1 += ts;
                out.t1p += tc * mf;
                out.t1pp -= ts * (mf * mf);
                let size = a * (s.norm() + c.norm()) * mf * mf;
                let scale = out.t1.norm() + out.t1p.norm();
                done_odd = n > 0 && size < TRUNCATION * scale;
            }
            (s, c) = rotate(s, c, h);
            m += 1;
            // even harmonic m = 2(n + 1)
            let mut done_even = true;
            if let Some(&b) = self.whole.get(n) {
                let sign = if (n + 1) % 2 == 0 { 2.0 } else { -2.0 };
                let mf = m as f64;
                let ts = s * (sign * b);
                let tc = c * (sign * b);
                out.t4 += tc;
                out.t4p -= ts * mf;
                out.t4pp -= tc * (mf * mf);
                let size = b * (s.norm() + c.norm()) * mf * mf;
                let scale = out.t4.norm() + out.t4p.norm();
                done_even = size < TRUNCATION * scale;
            }
            if done_odd && done_even {
                break;
            }
            (s, c) = rotate(s, c, h);
            m += 1;
        }
        out
    }

    pub fn theta_all(&self, v: Complex64) -> ThetaAll {
        let h = self.harmonics(v);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut out = ThetaAll {
            t1: zero,
            t2: zero,
            t3: one,
            t4: one,
        };
        let (mut s, mut c) = (h.sin1, h.cos1);
        let n_max = self.half.len().max(self.whole.len() + 1);
        for n in 0..n_max {
            let mut done_odd = true;
            if let Some(&a) = self.half.get(n) {
                let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
                out.t1 += s * (sign * a);
                out.t2 += c * (2.0 * a);
                let size = a * (s.norm() + c.norm());
                done_odd = n > 0 && size < TRUNCATION * (out.t1.norm() + out.t2.norm());
            }
            (s, c) = rotate(s, c, h);
            let mut done_even = true;
            if let Some(&b) = self.whole.get(n) {
                let sign = if (n + 1) % 2 == 0 { 2.0 } else { -2.0 };
                out.t3 += c * (2.0 * b);
                out.t4 += c * (sign * b);
                let size = b * c.norm();
                done_even = size < TRUNCATION * (out.t3.norm() + out.t4.norm());
            }
            if done_odd && done_even {
                break;
            }
            (s, c) = rotate(s, c, h);
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Harmonics {
    sin1: Complex64,
    cos1: Complex64,
}

/// Advance (sin mv, cos mv) to (sin (m+1)v, cos (m+1)v).
#[inline]
fn rotate(s: Complex64, c: Complex64, h: Harmonics) -> (Complex64, Complex64) {
    (s * h.cos1 + c * h.sin1, c * h.cos1 - s * h.sin1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_triple_identity_at_origin() {
        // ϑ₁'(0) = ϑ₂(0) ϑ₃(0) ϑ₄(0)
        let series = ThetaSeries::new(0.0179723870089672);
        let d = series.theta14(Complex64::new(0.0, 0.0));
        let all = series.theta_all(Complex64::new(0.0, 0.0));
        let rhs = all.t2 * all.t3 * all.t4;
        assert!((d.t1p - rhs).norm() < 1e-14 * rhs.norm());
    }

    #[test]
    fn theta4_series_matches_theta14_value() {
        let series = ThetaSeries::new(0.3);
        let v = Complex64::new(0.7, -0.4);
        let a = series.theta14(v);
        let b = series.theta_all(v);
        assert!((a.t1 - b.t1).norm() < 1e-14);
        assert!((a.t4 - b.t4).norm() < 1e-14);
    }

    #[test]
    fn quartic_identity() {
        // ϑ₃(0)⁴ = ϑ₂(0)⁴ + ϑ₄(0)⁴
        for &q in &[1e-6, 0.02, 0.4, 0.8] {
            let t = ThetaSeries::new(q).theta_all(Complex64::new(0.0, 0.0));
            let lhs = t.t3.powi(4);
            let rhs = t.t2.powi(4) + t.t4.powi(4);
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm(), "q = {q}");
        }
    }
}

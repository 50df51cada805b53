//! Independent numerical oracles shared by the integration tests. None of
//! these call into the library.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Arithmetic-geometric mean by plain iteration.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    while (a - b).abs() > 1e-16 * a {
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    a
}

/// `K(k) = π / (2 AGM(1, √(1 - k²)))`.
pub fn complete_k(k: f64) -> f64 {
    PI / (2.0 * agm(1.0, (1.0 - k * k).sqrt()))
}

pub fn complete_k_prime(k: f64) -> f64 {
    complete_k((1.0 - k * k).sqrt())
}

pub fn nome(k: f64) -> f64 {
    (-PI * complete_k_prime(k) / complete_k(k)).exp()
}

/// Real `(sn, cn, dn)` by the descending Landen / AGM scheme.
pub fn sn_cn_dn_agm(u: f64, k: f64) -> (f64, f64, f64) {
    let mut a = vec![1.0];
    let mut c = vec![k];
    let mut b = (1.0 - k * k).sqrt();
    while c.last().unwrap().abs() > 1e-17 && a.len() < 64 {
        let an = *a.last().unwrap();
        let next = 0.5 * (an + b);
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
        a.push(next);
    }
    let n = a.len() - 1;
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    let mut prev = phi;
    for i in (1..=n).rev() {
        prev = phi;
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let (s, co) = phi.sin_cos();
    let dn = if n == 0 { 1.0 } else { co / (prev - phi).cos() };
    (s, co, dn)
}

/// Complex `(sn, cn, dn)` from real-argument values at `k` and the
/// complementary modulus via the addition theorem.
pub fn jacobi_complex(u: Complex64, k: f64) -> (Complex64, Complex64, Complex64) {
    let kc = (1.0 - k * k).sqrt();
    let (s, c, d) = sn_cn_dn_agm(u.re, k);
    let (s1, c1, d1) = sn_cn_dn_agm(u.im, kc);
    let delta = c1 * c1 + k * k * s * s * s1 * s1;
    let sn = Complex64::new(s * d1, c * d * s1 * c1) / delta;
    let cn = Complex64::new(c * c1, -s * d * s1 * d1) / delta;
    let dn = Complex64::new(d * c1 * d1, -k * k * s * c * s1) / delta;
    (sn, cn, dn)
}

/// Maclaurin series of `sn` through `u⁹`; for small `|u|` only.
pub fn sn_maclaurin(u: f64, k: f64) -> f64 {
    let m = k * k;
    let c3 = 1.0 + m;
    let c5 = 1.0 + 14.0 * m + m * m;
    let c7 = 1.0 + 135.0 * m + 135.0 * m * m + m * m * m;
    let c9 = 1.0 + 1228.0 * m + 5478.0 * m * m + 1228.0 * m.powi(3) + m.powi(4);
    u - c3 * u.powi(3) / 6.0 + c5 * u.powi(5) / 120.0 - c7 * u.powi(7) / 5040.0
        + c9 * u.powi(9) / 362_880.0
}

/// Lambert-series forms of `φ₁ = H'/H` and `φ₄ = Θ'/Θ` in `u`:
/// `φ₁ = s[cot v + 4Σ q^{2n}/(1-q^{2n}) sin 2nv]`,
/// `φ₄ = s·4Σ qⁿ/(1-q^{2n}) sin 2nv`, with `v = su`, `s = π/2K`.
pub fn phi_lambert(u: Complex64, k: f64) -> (Complex64, Complex64) {
    let s = PI / (2.0 * complete_k(k));
    let q = nome(k);
    let v = u * s;
    let mut p1 = v.cos() / v.sin();
    let mut p4 = Complex64::new(0.0, 0.0);
    for n in 1..200 {
        let qn = q.powi(n);
        let q2n = qn * qn;
        if qn < 1e-30 {
            break;
        }
        let sine = (v * (2.0 * n as f64)).sin();
        p1 += sine * (4.0 * q2n / (1.0 - q2n));
        p4 += sine * (4.0 * qn / (1.0 - q2n));
    }
    (p1 * s, p4 * s)
}

/// Central difference of a complex function along the real direction.
pub fn central_difference(f: impl Fn(Complex64) -> Complex64, u: Complex64, h: f64) -> Complex64 {
    (f(u + h) - f(u - h)) / (2.0 * h)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Three-spin system of the reference tables.
pub const THREE_SPIN_SPINS: [f64; 3] = [0.5, 1.0, 1.5];
pub const THREE_SPIN_Z: [f64; 3] = [0.0, 0.2, 0.4];
pub const THREE_SPIN_COEFFS: [(usize, f64); 2] = [(0, -0.5), (1, -0.25)];

/// Published coupling table, ordered (12x, 12y, 12z, 13x, …, 23z).
pub const TABLE_COUPLINGS: [f64; 9] = [
    1.28522, 1.23563, 1.2293, 1.38861, 1.19509, 1.16865, 1.28522, 1.23563, 1.2293,
];

/// Published energies of the `l = 0` table.
pub const TABLE_L0_ENERGIES: [f64; 12] = [
    -8.13147, -5.64950, -5.48168, -0.850805, -0.758290, -0.649792, -0.615993, -0.606659, -0.394121,
    6.69616, 6.88050, 7.22436,
];

/// Published energies of the `l = 1` table.
pub const TABLE_L1_ENERGIES: [f64; 12] = [
    -5.86850, -5.64331, -5.59109, -5.52799, -0.714459, -0.649689, -0.619842, -0.395533, 6.59546,
    6.64346, 6.88448, 7.22431,
];

/// Ground rows of the `l = 0` and `l = 1` root tables.
pub fn table_l0_ground_roots() -> Vec<Complex64> {
    vec![
        Complex64::new(0.277673, 0.0),
        Complex64::new(0.261164, 0.115827),
        Complex64::new(0.261164, -0.115827),
    ]
}

pub fn table_l1_ground_roots(half_quasi: f64) -> Vec<Complex64> {
    vec![
        Complex64::new(0.239016, half_quasi),
        Complex64::new(0.280492, 0.0487235),
        Complex64::new(0.280492, -0.0487235),
    ]
}

/// Central spin reference rows: (N, λ₁N, min Re, max Re, E/N).
pub const TABLE_ACSM: [(usize, f64, f64, f64, f64); 7] = [
    (12, 0.327300, 2.120138, 2.120487, -0.821616),
    (20, 0.329466, 2.106036, 2.106256, -0.792253),
    (40, 0.330390, 2.095787, 2.095898, -0.772954),
    (80, 0.330681, 2.090745, 2.090800, -0.7640486),
    (100, 0.330726, 2.089743, 2.089787, -0.762322),
    (200, 0.330805, 2.087743, 2.087765, -0.758920),
    (300, 0.330828, 2.0870780, 2.0870926, -0.757801),
];

/// Extrapolated row: (λ₁N, min Re, max Re, E/N).
pub const TABLE_ACSM_LIMIT: (f64, f64, f64, f64) = (0.330869, 2.0857505, 2.0857505, -0.755586);

pub const CLASSICAL_LIMIT: f64 = -0.75558603;

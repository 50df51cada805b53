use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{eigenvalues_complex, residual_and_jacobian, residual_norm, BetheSolution, RootSet};
use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::spinops::SpinSystem;

/// Slack on the inclusive `|Im λ| ≤ K′/2` boundary.
pub(crate) const FOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Success threshold on `max |F_α|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest step fraction tried by the halving line search.
    pub min_damping: f64,
    /// Imaginary-period folds tolerated before giving up.
    pub max_restarts: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 200,
            min_damping: (0.5f64).powi(20),
            max_restarts: 16,
        }
    }
}

/// Result of folding a root set into the fundamental rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub rootset: RootSet,
    /// Number of roots moved by a multiple of `iK′`.
    pub imag_folds: usize,
    /// Net number of upward `iK′` shifts. Each one turns a solution of
    /// sector `l` into one of sector `l + 2`, so the equations are
    /// unchanged only when this is zero.
    pub net_shift: i64,
}

impl FoldOutcome {
    /// Whether the folded roots satisfy different equations.
    pub fn changes_equations(&self) -> bool {
        self.net_shift != 0
    }
}

/// Reduces `Re λ` into `[0, 2K)` and `Im λ` into `[-K′/2, K′/2]`.
pub fn fold_fundamental(rootset: &RootSet, ctx: &EllipticContext) -> FoldOutcome {
    let period = ctx.real_period();
    let kp = ctx.kk_prime;
    let half = kp / 2.0;
    let mut imag_folds = 0;
    let mut net_shift = 0i64;
    let roots = rootset
        .roots
        .iter()
        .map(|z| {
            let mut re = z.re.rem_euclid(period);
            if re >= period {
                re = 0.0;
            }
            let mut im = z.im;
            if im.abs() > half + FOLD_TOL && im.is_finite() {
                let n = ((im.abs() - half) / kp).ceil() * im.signum();
                im -= n * kp;
                imag_folds += 1;
                net_shift -= n as i64;
            }
            Complex64::new(re, im)
        })
        .collect();
    FoldOutcome {
        rootset: RootSet::new(rootset.sector, roots),
        imag_folds,
        net_shift,
    }
}

fn pole_collision(e: Error, iteration: usize) -> Error {
    match e {
        Error::BethePole { .. } => Error::PoleCollision { iteration },
        other => other,
    }
}

/// Damped Newton iteration on the Bethe equations.
///
/// Non-convergence is reported through `converged = false`; the only
/// errors are pole collisions that halving the step cannot avoid.
pub fn newton_solve(
    initial: &RootSet,
    system: &SpinSystem,
    opts: &NewtonOptions,
) -> Result<BetheSolution> {
    let ctx = system.ctx();
    let mut rs = fold_fundamental(initial, ctx).rootset;
    let (mut f, mut jac) = residual_and_jacobian(&rs, system).map_err(|e| pole_collision(e, 0))?;
    let mut norm = residual_norm(&f);
    let mut history = vec![norm];
    let mut iterations = 0;
    let mut restarts = 0;

    while norm.is_finite() && norm >= opts.tol && iterations < opts.max_iter {
        let rhs = -&f;
        let step = match jac.clone().lu().solve(&rhs) {
            Some(s) if s.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => s,
            _ => break,
        };
        let mut t = 1.0;
        let mut accepted = None;
        let mut last_hit_pole = false;
        while t >= opts.min_damping {
            let trial = RootSet::new(rs.sector, shifted(&rs.roots, &step, t));
            match residual_and_jacobian(&trial, system) {
                Ok((f2, j2)) => {
                    last_hit_pole = false;
                    let n2 = residual_norm(&f2);
                    if n2.is_finite() && n2 < norm {
                        accepted = Some((trial, f2, j2, n2));
                        break;
                    }
                }
                Err(Error::BethePole { .. }) => last_hit_pole = true,
                Err(e) => return Err(e),
            }
            t *= 0.5;
        }
        iterations += 1;
        let Some((trial, f2, j2, n2)) = accepted else {
            if last_hit_pole {
                return Err(Error::PoleCollision {
                    iteration: iterations,
                });
            }
            break;
        };
        let folded = fold_fundamental(&trial, ctx);
        if folded.changes_equations() {
            restarts += 1;
            if restarts > opts.max_restarts {
                rs = trial;
                norm = n2;
                history.push(norm);
                break;
            }
        }
        if folded.rootset != trial {
            rs = folded.rootset;
            (f, jac) =
                residual_and_jacobian(&rs, system).map_err(|e| pole_collision(e, iterations))?;
            norm = residual_norm(&f);
        } else {
            rs = trial;
            f = f2;
            jac = j2;
            norm = n2;
        }
        history.push(norm);
    }

    let converged = norm < opts.tol;
    let r = if converged {
        eigenvalues_complex(&rs, system)?
    } else {
        Vec::new()
    };
    Ok(BetheSolution {
        rootset: rs,
        residual_norm: norm,
        r,
        converged,
        iterations,
        restarts,
        history,
    })
}

fn shifted(roots: &[Complex64], step: &DVector<Complex64>, t: f64) -> Vec<Complex64> {
    roots
        .iter()
        .zip(step.iter())
        .map(|(z, d)| z + d * t)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::Sector;
    use super::*;

    fn ctx() -> EllipticContext {
        EllipticContext::new(0.5).unwrap()
    }

    #[test]
    fn real_period_fold() {
        let ctx = ctx();
        let rs = RootSet::new(Sector::Even, vec![Complex64::new(2.0 * ctx.kk + 0.3, 0.1)]);
        let out = fold_fundamental(&rs, &ctx);
        assert!((out.rootset.roots[0].re - 0.3).abs() < 1e-14);
        assert_eq!(out.imag_folds, 0);
    }

    #[test]
    fn boundary_is_inclusive_and_interior_is_fixed() {
        let ctx = ctx();
        let half = ctx.kk_prime / 2.0;
        let rs = RootSet::new(
            Sector::Odd,
            vec![Complex64::new(0.5, half), Complex64::new(1.0, -0.2)],
        );
        let out = fold_fundamental(&rs, &ctx);
        assert_eq!(out.rootset, rs);
        assert!(!out.changes_equations());
    }

    #[test]
    fn imaginary_fold_is_flagged() {
        let ctx = ctx();
        let kp = ctx.kk_prime;
        let rs = RootSet::new(
            Sector::Even,
            vec![
                Complex64::new(0.5, 0.6 * kp),
                Complex64::new(1.0, -0.55 * kp),
            ],
        );
        let out = fold_fundamental(&rs, &ctx);
        assert_eq!(out.imag_folds, 2);
        assert_eq!(out.net_shift, 0);
        assert!((out.rootset.roots[0].im + 0.4 * kp).abs() < 1e-14);
        let single = RootSet::new(Sector::Even, vec![Complex64::new(0.5, 0.6 * kp)]);
        assert_eq!(fold_fundamental(&single, &ctx).net_shift, -1);
    }
}

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::storage::Owned;
use nalgebra::{DVector, Dyn, OMatrix, OVector, U4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::BetheSolution;
use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};

/// Starting values of `(c₁, c₂)`; the first entry is the plain `(1, 1)`.
const SCALE_STARTS: [f64; 5] = [1.0, 0.3, 0.7, 1.5, 2.0];
const MIN_ARC_POINTS: usize = 4;

/// `x = α + β dn(c₁ y) cn(c₂ y)` fitted to the arc, with `y = Im λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcFit {
    pub alpha: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    /// Root-mean-square deviation in `x`.
    pub rms: f64,
    /// `max x - min x` of the fitted points.
    pub spread: f64,
    /// Set when the fit fell back to the vertical line `x = mean`.
    pub vertical: bool,
}

impl ArcFit {
    pub fn eval(&self, y: f64, ctx: &EllipticContext) -> f64 {
        if self.vertical {
            return self.alpha;
        }
        let (_, _, dn1) = real_jacobi(self.c1 * y, ctx);
        let (_, cn2, _) = real_jacobi(self.c2 * y, ctx);
        self.alpha + self.beta * dn1 * cn2
    }

    /// `rms / spread`, or `rms` itself for a flat arc.
    pub fn relative_rms(&self) -> f64 {
        if self.spread > 0.0 {
            self.rms / self.spread
        } else {
            self.rms
        }
    }

    /// Vertical line through the mean, used when the four-parameter fit fails.
    pub fn vertical_line(points: &[Complex64]) -> Self {
        let n = points.len().max(1) as f64;
        let mean = points.iter().map(|z| z.re).sum::<f64>() / n;
        let rms = (points.iter().map(|z| (z.re - mean).powi(2)).sum::<f64>() / n).sqrt();
        Self {
            alpha: mean,
            beta: 0.0,
            c1: 1.0,
            c2: 1.0,
            rms,
            spread: spread(points),
            vertical: true,
        }
    }
}

fn real_jacobi(x: f64, ctx: &EllipticContext) -> (f64, f64, f64) {
    // real arguments never meet a pole of sn
    ctx.sn_cn_dn(x).unwrap_or((f64::NAN, f64::NAN, f64::NAN))
}

fn spread(points: &[Complex64]) -> f64 {
    let lo = points.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let hi = points
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if points.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Ground-state arc: every root except the one with the smallest real part.
pub fn arc_roots(solution: &BetheSolution) -> Vec<Complex64> {
    let mut roots = solution.roots().to_vec();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    roots.into_iter().skip(1).collect()
}

/// Fits the arc of a ground-state solution.
pub fn arc_fit(solution: &BetheSolution, ctx: &EllipticContext) -> Result<ArcFit> {
    fit_arc_points(&arc_roots(solution), ctx)
}

/// Multi-start Levenberg–Marquardt fit of `x(y)` to the given points.
pub fn fit_arc_points(points: &[Complex64], ctx: &EllipticContext) -> Result<ArcFit> {
    if points.len() < MIN_ARC_POINTS {
        return Err(Error::InsufficientPoints {
            got: points.len(),
            need: MIN_ARC_POINTS,
        });
    }
    let xs = DVector::from_iterator(points.len(), points.iter().map(|z| z.re));
    let ys: Vec<f64> = points.iter().map(|z| z.im).collect();
    let n = points.len() as f64;
    let mean = xs.mean();
    let width = spread(points);
    let mut best: Option<ArcFit> = None;
    for &c1 in &SCALE_STARTS {
        for &c2 in &SCALE_STARTS {
            let problem = ArcProblem {
                params: OVector::<f64, U4>::new(mean, width, c1, c2),
                xs: &xs,
                ys: &ys,
                ctx,
            };
            let (fitted, _) = LevenbergMarquardt::new()
                .with_tol(1e-15)
                .with_patience(200)
                .minimize(problem);
            let Some(res) = fitted.residuals() else {
                continue;
            };
            let rms = (res.norm_squared() / n).sqrt();
            if !rms.is_finite() {
                continue;
            }
            let p = fitted.params;
            let fit = ArcFit {
                alpha: p[0],
                beta: p[1],
                c1: p[2],
                c2: p[3],
                rms,
                spread: width,
                vertical: false,
            };
            if best.map_or(true, |b| fit.rms < b.rms) {
                best = Some(fit);
            }
        }
    }
    best.ok_or_else(|| Error::FitDivergence("no start produced a finite residual".into()))
}

/// [`fit_arc_points`], falling back to a vertical line on divergence.
pub fn fit_arc_or_vertical(points: &[Complex64], ctx: &EllipticContext) -> ArcFit {
    match fit_arc_points(points, ctx) {
        Ok(fit) => fit,
        Err(_) => ArcFit::vertical_line(points),
    }
}

struct ArcProblem<'a> {
    params: OVector<f64, U4>,
    xs: &'a DVector<f64>,
    ys: &'a [f64],
    ctx: &'a EllipticContext,
}

impl LeastSquaresProblem<f64, Dyn, U4> for ArcProblem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U4>;
    type ParameterStorage = Owned<f64, U4>;

    fn set_params(&mut self, x: &OVector<f64, U4>) {
        self.params.copy_from(x);
    }

    fn params(&self) -> OVector<f64, U4> {
        self.params
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let p = &self.params;
        let r = DVector::from_iterator(
            self.ys.len(),
            self.ys.iter().zip(self.xs.iter()).map(|(&y, &x)| {
                let (_, _, dn1) = real_jacobi(p[2] * y, self.ctx);
                let (_, cn2, _) = real_jacobi(p[3] * y, self.ctx);
                p[0] + p[1] * dn1 * cn2 - x
            }),
        );
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U4>> {
        let p = &self.params;
        let k2 = self.ctx.k * self.ctx.k;
        let mut jac = OMatrix::<f64, Dyn, U4>::zeros(self.ys.len());
        for (i, &y) in self.ys.iter().enumerate() {
            let (sn1, cn1, dn1) = real_jacobi(p[2] * y, self.ctx);
            let (sn2, cn2, dn2) = real_jacobi(p[3] * y, self.ctx);
            jac[(i, 0)] = 1.0;
            jac[(i, 1)] = dn1 * cn2;
            // dn′ = -k² sn cn, cn′ = -sn dn
            jac[(i, 2)] = -p[1] * cn2 * k2 * y * sn1 * cn1;
            jac[(i, 3)] = -p[1] * dn1 * y * sn2 * dn2;
        }
        jac.iter().all(|v| v.is_finite()).then_some(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> EllipticContext {
        EllipticContext::new(0.5).unwrap()
    }

    #[test]
    fn recovers_synthetic_parameters() {
        let ctx = ctx();
        let truth = ArcFit {
            alpha: 2.0,
            beta: 0.01,
            c1: 1.3,
            c2: 0.6,
            rms: 0.0,
            spread: 0.0,
            vertical: false,
        };
        let pts: Vec<Complex64> = (0..21)
            .map(|i| {
                let y = -1.0 + 0.1 * i as f64;
                Complex64::new(truth.eval(y, &ctx), y)
            })
            .collect();
        let fit = fit_arc_points(&pts, &ctx).unwrap();
        assert!(fit.rms < 1e-10, "rms {}", fit.rms);
        for y in [-0.9, 0.0, 0.45] {
            assert!((fit.eval(y, &ctx) - truth.eval(y, &ctx)).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_arc_gives_flat_fit() {
        let ctx = ctx();
        let pts: Vec<Complex64> = (0..6)
            .map(|i| Complex64::new(2.1, -0.5 + 0.2 * i as f64))
            .collect();
        let fit = fit_arc_or_vertical(&pts, &ctx);
        for y in [-0.5, 0.1, 0.5] {
            assert!((fit.eval(y, &ctx) - 2.1).abs() < 1e-9);
        }
    }

    #[test]
    fn fitted_curve_is_even() {
        let ctx = ctx();
        let pts: Vec<Complex64> = (0..8)
            .map(|i| {
                let y = 0.12 * i as f64 - 0.4;
                Complex64::new(2.0 + 0.003 * y * y, y)
            })
            .collect();
        let fit = fit_arc_points(&pts, &ctx).unwrap();
        for y in [0.1, 0.3, 0.77] {
            assert!((fit.eval(y, &ctx) - fit.eval(-y, &ctx)).abs() < 1e-14);
        }
    }

    #[test]
    fn too_few_points() {
        let pts = vec![Complex64::new(2.0, 0.1); 3];
        assert!(matches!(
            fit_arc_points(&pts, &ctx()),
            Err(Error::InsufficientPoints { got: 3, need: 4 })
        ));
    }
}

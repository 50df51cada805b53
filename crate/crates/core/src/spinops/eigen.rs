use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{OperatorMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Largest dimension handled by dense diagonalisation.
pub const DENSE_LIMIT: usize = 1024;
/// Number of eigenpairs returned by [`eigensolve`] above [`DENSE_LIMIT`].
const DEFAULT_LOWEST: usize = 6;
/// Ritz residual tolerance relative to the largest entry of the operator.
const LANCZOS_TOL: f64 = 1e-10;
const LANCZOS_SEED: u64 = 0x5eed_1a2c;
const LANCZOS_CHECK_EVERY: usize = 8;

/// Eigenvalues in ascending order, with eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<DMatrix<Complex64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ground(&self) -> Option<f64> {
        self.values.first().copied()
    }
}

/// Full spectrum up to [`DENSE_LIMIT`], otherwise the lowest few eigenpairs.
pub fn eigensolve(op: &OperatorMatrix) -> Result<Spectrum> {
    if op.dim() <= DENSE_LIMIT {
        dense(op, op.dim())
    } else {
        eigensolve_lowest(op, DEFAULT_LOWEST)
    }
}

/// The `count` lowest eigenpairs.
pub fn eigensolve_lowest(op: &OperatorMatrix, count: usize) -> Result<Spectrum> {
    check_hermitian(op)?;
    let count = count.min(op.dim());
    if op.dim() <= DENSE_LIMIT {
        return dense(op, count);
    }
    let scale = op.max_abs().max(f64::MIN_POSITIVE);
    match op.real_entries(HERMITIAN_TOL * scale.max(1.0)) {
        Some(real) => {
            let (values, vecs) = lanczos(&real, count, scale)?;
            Ok(Spectrum {
                values,
                vectors: Some(vecs.map(|x| Complex64::new(x, 0.0))),
            })
        }
        None => {
            let (values, vecs) = lanczos(op.entries(), count, scale)?;
            Ok(Spectrum {
                values,
                vectors: Some(vecs),
            })
        }
    }
}

fn check_hermitian(op: &OperatorMatrix) -> Result<()> {
    if op.is_hermitian() {
        return Ok(());
    }
    let defect = op.hermitian_defect();
    if defect >= HERMITIAN_TOL * op.max_abs().max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    Ok(())
}

fn dense(op: &OperatorMatrix, count: usize) -> Result<Spectrum> {
    check_hermitian(op)?;
    let scale = op.max_abs().max(1.0);
    let (values, vectors) = match op.real_entries(HERMITIAN_TOL * scale) {
        Some(real) => {
            let sym = symmetrise(real);
            let eig = SymmetricEigen::new(sym);
            let (v, u) = sorted(eig.eigenvalues.iter().copied().collect(), &eig.eigenvectors);
            (v, u.map(|x| Complex64::new(x, 0.0)))
        }
        None => {
            let herm = symmetrise(op.entries().clone());
            let eig = SymmetricEigen::new(herm);
            sorted(eig.eigenvalues.iter().copied().collect(), &eig.eigenvectors)
        }
    };
    let keep = count.min(values.len());
    Ok(Spectrum {
        values: values[..keep].to_vec(),
        vectors: Some(vectors.columns(0, keep).into_owned()),
    })
}

/// `(A + A^H) / 2`.
fn symmetrise<T: ComplexField<RealField = f64>>(a: DMatrix<T>) -> DMatrix<T> {
    let half = T::from_real(0.5);
    (&a + a.adjoint()) * half
}

fn sorted<T: ComplexField<RealField = f64>>(
    values: Vec<f64>,
    vectors: &DMatrix<T>,
) -> (Vec<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let vals = order.iter().map(|&i| values[i]).collect();
    let n = vectors.nrows();
    let vecs = DMatrix::from_fn(n, order.len(), |r, c| vectors[(r, order[c])].clone());
    (vals, vecs)
}

/// Lanczos with full reorthogonalisation, returning the `count` lowest
/// Ritz pairs once their residuals fall below `LANCZOS_TOL * scale`.
fn lanczos<T: ComplexField<RealField = f64> + Copy>(
    a: &DMatrix<T>,
    count: usize,
    scale: f64,
) -> Result<(Vec<f64>, DMatrix<T>)> {
    let n = a.nrows();
    let max_iter = n.min(600);
    let tol = LANCZOS_TOL * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut v = DVector::<T>::from_fn(n, |_, _| T::from_real(rng.gen_range(-1.0..1.0)));
    v /= T::from_real(v.norm());

    let mut basis: Vec<DVector<T>> = Vec::with_capacity(max_iter);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_iter);
    let mut beta: Vec<f64> = Vec::with_capacity(max_iter);
    let mut worst = f64::INFINITY;

    for m in 0..max_iter {
        let mut w = a * &v;
        let am = v.dotc(&w).real();
        basis.push(v.clone());
        alpha.push(am);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w.axpy(-c, b, T::one());
            }
        }
        let bm = w.norm();
        let exhausted = bm <= 1e-14 * scale.max(1.0);
        let size = m + 1;
        if size >= count && (exhausted || size % LANCZOS_CHECK_EVERY == 0 || size == max_iter) {
            let (vals, y) = tridiagonal_eigen(&alpha, &beta);
            worst = (0..count)
                .map(|k| (bm * y[(size - 1, k)]).abs())
                .fold(0.0, f64::max);
            if exhausted || worst < tol {
                let mut vecs = DMatrix::<T>::zeros(n, count);
                for k in 0..count {
                    let mut col = DVector::<T>::zeros(n);
                    for (j, b) in basis.iter().enumerate() {
                        col.axpy(T::from_real(y[(j, k)]), b, T::one());
                    }
                    let norm = col.norm();
                    col /= T::from_real(norm);
                    vecs.set_column(k, &col);
                }
                return Ok((vals[..count].to_vec(), vecs));
            }
        }
        if exhausted {
            break;
        }
        beta.push(bm);
        v = w / T::from_real(bm);
    }
    Err(Error::NoConvergence {
        iterations: alpha.len(),
        residual: worst,
    })
}

/// Ascending eigenpairs of the real symmetric tridiagonal matrix.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    sorted(eig.eigenvalues.iter().copied().collect(), &eig.eigenvectors)
}

//! Spectral condition number of sparse symmetric matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix, SparseLu};

const MAX_STEPS: usize = 500;

/// Largest-magnitude eigenvalue of the symmetric operator `op` (dimension
/// `n`) by Lanczos iteration with full re-orthogonalisation.
pub fn lanczos_extreme(n: usize, op: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let mut v: Vec<f64> = (0..n).map(|i| 0.5 + ((i * 7919) % 1013) as f64 / 1013.0).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    let steps = n.min(MAX_STEPS);
    for k in 0..steps {
        let vk = &basis[k];
        let mut w = op(vk)?;
        let a = dot(&w, vk);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm2(&w);
        let done = k + 1 == steps || b <= 1e-13 * alpha.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        if done || (k + 1) % 10 == 0 {
            let est = ritz_extreme(&alpha, &beta);
            if done || (est - last).abs() <= 1e-12 * est.abs() {
                return Ok(est);
            }
            last = est;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Ok(ritz_extreme(&alpha, &beta))
}

fn ritz_extreme(alpha: &[f64], beta: &[f64]) -> f64 {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    SymmetricEigen::new(t).eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// `|λ|_max / |λ|_min` of a symmetric matrix.
///
/// The smallest magnitude comes from Lanczos on the inverse, applied via a
/// sparse LU factorisation.
pub fn condition_number(m: &CsrMatrix) -> Result<f64> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::SingularMatrix(0.0));
    }
    let lmax = lanczos_extreme(n, |x| Ok(m.matvec(x)))?;
    let lu = SparseLu::new(m).map_err(|_| Error::SingularMatrix(0.0))?;
    let inv_max = lanczos_extreme(n, |x| lu.solve(x).map_err(|_| Error::SingularMatrix(0.0)))?;
    let lmin = 1.0 / inv_max;
    if !(lmin >= 1e-300) || !lmin.is_finite() {
        return Err(Error::SingularMatrix(lmin));
    }
    Ok(lmax / lmin)
}

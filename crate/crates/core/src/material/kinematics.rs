//! Finite-strain kinematics: logarithmic strain, its derivative with respect
//! to the left Cauchy–Green tensor, and the polar right stretch.

use nalgebra::SymmetricEigen;

use super::tensor::{Mat2, Mat4, SymTensor};
use crate::error::{Error, Result};

/// Divided difference `(ln a - ln b)/(a - b)`, stable as `a → b`.
fn log_divided_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        1.0 / b
    } else if (d / b).abs() < 1e-4 {
        (d / b).ln_1p() / d
    } else {
        (a.ln() - b.ln()) / d
    }
}

fn eigen2(m: &Mat2) -> (Mat2, [f64; 2]) {
    let e = SymmetricEigen::new(*m);
    (e.eigenvectors, [e.eigenvalues[0], e.eigenvalues[1]])
}

/// Applies `f` to the eigenvalues of a plane-strain symmetric tensor.
fn spectral_map(t: &SymTensor, f: impl Fn(f64) -> f64) -> SymTensor {
    let (q, l) = eigen2(&t.inplane());
    let d = Mat2::new(f(l[0]), 0.0, 0.0, f(l[1]));
    SymTensor::from_parts(&(q * d * q.transpose()), f(t.zz))
}

/// `½ ln b` for a positive definite plane-strain `b`.
pub fn log_of_b(b: &SymTensor) -> Result<SymTensor> {
    let det = b.xx * b.yy - b.xy * b.xy;
    if !(det > 0.0 && b.zz > 0.0 && b.xx > 0.0) {
        return Err(Error::NonInvertibleF(det.sqrt()));
    }
    Ok(spectral_map(b, |l| 0.5 * l.ln()))
}

/// `b = exp(2ε)`, inverse of [`log_of_b`].
pub fn b_from_strain(eps: &SymTensor) -> SymTensor {
    spectral_map(eps, |e| (2.0 * e).exp())
}

/// Logarithmic strain of a plane-strain deformation gradient (unit out-of-plane stretch).
pub fn log_strain(f: &Mat2) -> Result<SymTensor> {
    let det = f.determinant();
    if !(det > 0.0) {
        return Err(Error::NonInvertibleF(det));
    }
    let b = SymTensor::from_parts(&(f * f.transpose()), 1.0);
    log_of_b(&b)
}

/// Directional derivative of `½ ln b` along `db`.
pub fn log_strain_directional(b: &SymTensor, db: &SymTensor) -> SymTensor {
    let (q, l) = eigen2(&b.inplane());
    let dbp = q.transpose() * db.inplane() * q;
    let mut de = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            de[(i, j)] = 0.5 * log_divided_difference(l[i], l[j]) * dbp[(i, j)];
        }
    }
    SymTensor::from_parts(&(q * de * q.transpose()), 0.5 * db.zz / b.zz)
}

/// Mandel matrix of `∂(½ ln b)/∂b`.
pub fn log_strain_derivative(b: &SymTensor) -> Mat4 {
    let mut out = Mat4::zeros();
    for k in 0..4 {
        let mut unit = nalgebra::Vector4::zeros();
        unit[k] = 1.0;
        let de = log_strain_directional(b, &SymTensor::from_mandel(&unit));
        out.set_column(k, &de.to_mandel());
    }
    out
}

/// Right stretch `U` of the polar decomposition `F = R·U`.
pub fn right_stretch(f: &Mat2) -> Result<Mat2> {
    let det = f.determinant();
    if !(det > 0.0) {
        return Err(Error::NonInvertibleF(det));
    }
    let (q, l) = eigen2(&(f.transpose() * f));
    let d = Mat2::new(l[0].sqrt(), 0.0, 0.0, l[1].sqrt());
    Ok(q * d * q.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_and_principal_stretch() {
        let e = log_strain(&Mat2::identity()).unwrap();
        assert!(e.norm() < 1e-15);
        let lam: f64 = 1.7;
        let e = log_strain(&Mat2::new(lam, 0.0, 0.0, 1.0)).unwrap();
        assert!((e.xx - lam.ln()).abs() < 1e-14 && e.yy.abs() < 1e-14 && e.xy.abs() < 1e-14);
    }

    #[test]
    fn inverted_gradient_is_rejected() {
        assert!(matches!(log_strain(&Mat2::new(-1.0, 0.0, 0.0, 1.0)), Err(Error::NonInvertibleF(_))));
    }

    #[test]
    fn exp_round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let f = Mat2::new(
                1.0 + rng.random_range(-0.4..0.4),
                rng.random_range(-0.4..0.4),
                rng.random_range(-0.4..0.4),
                1.0 + rng.random_range(-0.4..0.4),
            );
            if f.determinant() <= 0.05 {
                continue;
            }
            let b = SymTensor::from_parts(&(f * f.transpose()), 1.0);
            let back = b_from_strain(&log_strain(&f).unwrap());
            assert!(back.sub(&b).norm() < 1e-10 * b.norm());
        }
    }

    #[test]
    fn derivative_matches_fd() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for case in 0..50 {
            let f = Mat2::new(
                1.0 + rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                1.0 + rng.random_range(-0.3..0.3),
            );
            // include the repeated-eigenvalue case explicitly
            let f = if case == 0 { Mat2::identity() * 1.1 } else { f };
            let b = SymTensor::from_parts(&(f * f.transpose()), 1.0 + rng.random_range(0.0..0.2));
            let l = log_strain_derivative(&b);
            for k in 0..4 {
                let mut u = nalgebra::Vector4::zeros();
                u[k] = 1.0;
                let d = SymTensor::from_mandel(&u);
                let s = 1e-6;
                let ep = log_of_b(&b.add(&d.scale(s))).unwrap();
                let em = log_of_b(&b.sub(&d.scale(s))).unwrap();
                let fd = ep.sub(&em).scale(0.5 / s).to_mandel();
                let an = l.column(k).into_owned();
                assert!((fd - an).norm() < 1e-7, "case {case} col {k}: {fd} vs {an}");
            }
            assert!((l - l.transpose()).norm() < 1e-12);
        }
    }

    #[test]
    fn right_stretch_cases() {
        let u = right_stretch(&Mat2::new(2.0, 0.0, 0.0, 1.0)).unwrap();
        assert!((u - Mat2::new(2.0, 0.0, 0.0, 1.0)).norm() < 1e-14);
        let t: f64 = 0.4;
        let r = Mat2::new(t.cos(), -t.sin(), t.sin(), t.cos());
        assert!((right_stretch(&r).unwrap() - Mat2::identity()).norm() < 1e-14);
    }
}

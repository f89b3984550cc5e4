//! Porosity evolution, hydraulic conductivity, Darcy flux and mixture density.

use super::MaterialParams;
use crate::error::{Error, Result};
use crate::mesh::Vec2;

/// Eulerian porosity `1 - (1 - n0)/J` of an incompressible-solid mixture.
pub fn porosity(j: f64, n0: f64) -> Result<f64> {
    let bound = 1.0 - n0;
    if !(j > bound) {
        return Err(Error::PorosityViolation { j, bound });
    }
    Ok(1.0 - bound / j)
}

/// Kozeny–Carman conductivity `c1 n³/(1-n)²`.
pub fn kozeny_carman(n: f64, c1: f64) -> Result<f64> {
    if !(n > 0.0 && n < 1.0) {
        return Err(Error::PorosityDomain(n));
    }
    Ok(c1 * n.powi(3) / (1.0 - n).powi(2))
}

/// `dκ/dn` of [`kozeny_carman`].
pub fn kozeny_carman_derivative(n: f64, c1: f64) -> f64 {
    let m = 1.0 - n;
    c1 * (3.0 * n * n / (m * m) + 2.0 * n.powi(3) / (m * m * m))
}

/// Constant `c1` such that the conductivity equals `kappa0` at porosity `n0`.
pub fn kozeny_carman_constant(kappa0: f64, n0: f64) -> f64 {
    kappa0 * (1.0 - n0).powi(2) / n0.powi(3)
}

/// Relative fluid mass flux `q = -(κ/g)(∇p - ρ_f b)`.
pub fn darcy_flux(grad_p: Vec2, kappa: f64, rho_f: f64, body_force: Vec2, g: f64) -> Vec2 {
    -(kappa / g) * (grad_p - rho_f * body_force)
}

/// Current mixture density `ρ_s0 (1-n) + ρ_f0 n`.
pub fn mixture_density(n: f64, params: &MaterialParams) -> f64 {
    params.rho_s0 * (1.0 - n) + params.rho_f0 * n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn porosity_examples() {
        assert_eq!(porosity(1.0, 0.5).unwrap(), 0.5);
        assert_eq!(porosity(2.0, 0.5).unwrap(), 0.75);
        assert!(matches!(porosity(0.5, 0.5), Err(Error::PorosityViolation { .. })));
    }

    #[test]
    fn kozeny_carman_examples() {
        assert!((kozeny_carman(0.5, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(kozeny_carman(1e-6, 1.0).unwrap() < 1e-17);
        assert!(kozeny_carman(0.6, 1.0).unwrap() > kozeny_carman(0.5, 1.0).unwrap());
        assert!(kozeny_carman(1.0, 1.0).is_err());
        let c1 = kozeny_carman_constant(1e-7, 0.3);
        assert!((kozeny_carman(0.3, c1).unwrap() - 1e-7).abs() < 1e-22);
        let n = 0.37;
        let fd = (kozeny_carman(n + 1e-7, 2.0).unwrap() - kozeny_carman(n - 1e-7, 2.0).unwrap()) / 2e-7;
        assert!((fd - kozeny_carman_derivative(n, 2.0)).abs() < 1e-6 * fd);
    }

    #[test]
    fn darcy_examples() {
        let g = 9.81;
        assert_eq!(darcy_flux(Vec2::zeros(), 1.0, 1000.0, Vec2::zeros(), g), Vec2::zeros());
        let b = Vec2::new(0.0, -g);
        assert!(darcy_flux(1000.0 * b, 1.0, 1000.0, b, g).norm() < 1e-12);
        let q = darcy_flux(Vec2::new(1.0, 0.0), g, 1.0, Vec2::zeros(), g);
        assert!((q - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn density_examples() {
        let p = MaterialParams { rho_s0: 2000.0, rho_f0: 1000.0, ..MaterialParams::default() };
        assert_eq!(mixture_density(0.0, &p), 2000.0);
        assert_eq!(mixture_density(1.0, &p), 1000.0);
        assert_eq!(mixture_density(0.5, &p), 1500.0);
    }
}

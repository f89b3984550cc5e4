//! Improved Hencky effective-stress law.
//!
//! The stored energy is `Ψ' = K/(2n) εv² + (3/2) G εq²` where the porosity
//! follows the elastic volumetric strain, `n(εv) = 1 - (1 - n0) exp(-εv)`.
//! The volumetric modulus at the reference state is therefore `K/n0`.

use super::porous::porosity;
use super::tensor::{mandel_identity, Mat4, SymTensor};
use super::MaterialParams;
use crate::error::{Error, Result};

/// Volumetric strain, equivalent shear strain and deviator of a strain tensor.
pub fn strain_invariants(eps: &SymTensor) -> (f64, f64, SymTensor) {
    let ev = eps.trace();
    let e = eps.sub(&SymTensor::IDENTITY.scale(ev / 3.0));
    let eq = (2.0 / 3.0 * e.ddot(&e)).sqrt();
    (ev, eq, e)
}

fn elastic_porosity(ev: f64, n0: f64) -> Result<f64> {
    let n = 1.0 - (1.0 - n0) * (-ev).exp();
    if !(n > 0.0) {
        return Err(Error::PorosityViolation { j: ev.exp(), bound: 1.0 - n0 });
    }
    Ok(n)
}

/// Stored energy `Ψ'(ε)`.
pub fn hencky_energy(eps: &SymTensor, params: &MaterialParams) -> Result<f64> {
    let (ev, eq, _) = strain_invariants(eps);
    let n = elastic_porosity(ev, params.n0)?;
    Ok(params.k / (2.0 * n) * ev * ev + 1.5 * params.g_shear * eq * eq)
}

/// Effective Kirchhoff stress and consistent tangent (Mandel 4×4) at strain `eps`.
///
/// `j` is the current volume ratio; it is only checked against the porosity
/// constraint since the stored energy depends on `eps` alone.
pub fn hencky_stress(eps: &SymTensor, j: f64, params: &MaterialParams) -> Result<(SymTensor, Mat4)> {
    porosity(j, params.n0)?;
    let (ev, _, e) = strain_invariants(eps);
    let n = elastic_porosity(ev, params.n0)?;
    let k = params.k;
    let g = params.g_shear;

    let h = 1.0 / n;
    let dh = -(1.0 - n) / (n * n);
    let ddh = (1.0 - n) * (2.0 - n) / (n * n * n);
    let dpsi = k * ev * h + 0.5 * k * ev * ev * dh;
    let ddpsi = k * (h + 2.0 * ev * dh + 0.5 * ev * ev * ddh);

    let tau = SymTensor::IDENTITY.scale(dpsi).add(&e.scale(2.0 * g));
    let one = mandel_identity();
    let oo = one * one.transpose();
    let tangent = oo * ddpsi + (Mat4::identity() - oo / 3.0) * (2.0 * g);
    Ok((tau, tangent))
}

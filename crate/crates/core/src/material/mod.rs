//! Constitutive behaviour and material point state.

pub mod hencky;
pub mod kinematics;
pub mod plasticity;
pub mod porous;
pub mod tensor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationIssue};
use crate::mesh::{Side, Vec2};

pub use hencky::{hencky_energy, hencky_stress, strain_invariants};
pub use kinematics::{log_strain, right_stretch};
pub use plasticity::{Elastic, PlasticityModel, ReturnMapping};
pub use porous::{darcy_flux, kozeny_carman, mixture_density, porosity};
pub use tensor::{Mat2, Mat4, SymTensor, Vec4};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Bulk parameter `K` of the stored energy (Pa).
    pub k: f64,
    /// Shear modulus (Pa).
    pub g_shear: f64,
    pub n0: f64,
    /// Kozeny–Carman constant (m/s).
    pub c1: f64,
    pub rho_s0: f64,
    pub rho_f0: f64,
    /// Gravity magnitude used to convert conductivity to permeability.
    pub gravity: f64,
    /// Body force per unit mass (m/s²).
    pub body_force: Vec2,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            g_shear: 1.0,
            n0: 0.5,
            c1: 1.0,
            rho_s0: 1.0,
            rho_f0: 1.0,
            gravity: 9.81,
            body_force: Vec2::zeros(),
        }
    }
}

impl MaterialParams {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ValidationIssue>) {
        let mut need = |ok: bool, field: &str, msg: &str| {
            if !ok {
                issues.push(ValidationIssue::new(format!("{prefix}{field}"), msg));
            }
        };
        need(self.k > 0.0 && self.k.is_finite(), "K", "must be positive");
        need(self.g_shear > 0.0 && self.g_shear.is_finite(), "G", "must be positive");
        need(self.n0 > 0.0 && self.n0 < 1.0, "n0", "must lie in (0, 1)");
        need(self.c1 >= 0.0 && self.c1.is_finite(), "c1", "must be non-negative");
        need(self.rho_s0 >= 0.0, "rho_s0", "must be non-negative");
        need(self.rho_f0 > 0.0, "rho_f0", "must be positive");
        need(self.gravity > 0.0, "g", "must be positive");
    }

    /// Hydraulic conductivity at volume ratio `j`.
    pub fn conductivity(&self, j: f64) -> Result<f64> {
        kozeny_carman(porosity(j, self.n0)?, self.c1)
    }

    /// `dκ/dJ` at volume ratio `j`.
    pub fn conductivity_derivative(&self, j: f64) -> Result<f64> {
        let n = porosity(j, self.n0)?;
        Ok(porous::kozeny_carman_derivative(n, self.c1) * (1.0 - self.n0) / (j * j))
    }

    /// Young-like modulus `9KG/(3K+G)` built from the reference tangent `K/n0`.
    pub fn young_modulus(&self) -> f64 {
        let k = self.k / self.n0;
        9.0 * k * self.g_shear / (3.0 * k + self.g_shear)
    }
}

/// A particle of the mixture and the quadrature point it represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialPoint {
    pub position: Vec2,
    /// Position at seeding time.
    pub reference_position: Vec2,
    pub initial_volume: f64,
    pub volume: f64,
    /// GIMPM half-lengths per axis (unused by sMPM apart from boundary segments).
    pub half_lengths: Vec2,
    pub initial_half_lengths: Vec2,
    pub deformation_gradient: Mat2,
    pub j: f64,
    pub elastic_strain: SymTensor,
    /// Effective Cauchy stress.
    pub effective_stress: SymTensor,
    pub displacement: Vec2,
    pub pressure: f64,
    pub internal_vars: Vec<f64>,
    pub plastic_volumetric_strain: f64,
    /// Body sides this particle lies on, used to build boundary segments.
    pub sides: Vec<Side>,
}

impl MaterialPoint {
    pub fn new(position: Vec2, volume: f64, half_lengths: Vec2) -> Self {
        Self {
            position,
            reference_position: position,
            initial_volume: volume,
            volume,
            half_lengths,
            initial_half_lengths: half_lengths,
            deformation_gradient: Mat2::identity(),
            j: 1.0,
            elastic_strain: SymTensor::ZERO,
            effective_stress: SymTensor::ZERO,
            displacement: Vec2::zeros(),
            pressure: 0.0,
            internal_vars: Vec::new(),
            plastic_volumetric_strain: 0.0,
            sides: Vec::new(),
        }
    }

    pub fn porosity(&self, n0: f64) -> Result<f64> {
        porosity(self.j, n0)
    }

    pub fn on_side(&self, side: Side) -> bool {
        self.sides.contains(&side)
    }

    /// Total Cauchy stress `σ' - p·1`.
    pub fn total_stress(&self) -> SymTensor {
        self.effective_stress.sub(&SymTensor::IDENTITY.scale(self.pressure))
    }

    /// Refreshes `J`, volume and the stress from `F` and the elastic strain.
    pub fn refresh(&mut self, params: &MaterialParams) -> Result<()> {
        let j = self.deformation_gradient.determinant();
        if !(j > 0.0) {
            return Err(Error::NonInvertibleF(j));
        }
        porosity(j, params.n0)?;
        self.j = j;
        self.volume = j * self.initial_volume;
        let (tau, _) = hencky_stress(&self.elastic_strain, j, params)?;
        self.effective_stress = tau.scale(1.0 / j);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terzaghi_split_recomposes() {
        let mut mp = MaterialPoint::new(Vec2::zeros(), 1.0, Vec2::new(0.1, 0.1));
        mp.effective_stress = SymTensor::new(3.0, -1.0, 0.5, 2.0);
        mp.pressure = 7.0;
        let total = mp.total_stress();
        assert_eq!(total.add(&SymTensor::IDENTITY.scale(7.0)), mp.effective_stress);
        assert_eq!(total.xy, 2.0);
    }

    #[test]
    fn refresh_tracks_volume() {
        let p = MaterialParams { k: 10.0, g_shear: 5.0, ..MaterialParams::default() };
        let mut mp = MaterialPoint::new(Vec2::zeros(), 2.0, Vec2::new(0.1, 0.1));
        mp.deformation_gradient = Mat2::new(1.1, 0.0, 0.0, 0.95);
        mp.elastic_strain = log_strain(&mp.deformation_gradient).unwrap();
        mp.refresh(&p).unwrap();
        assert!((mp.volume / mp.initial_volume - mp.j).abs() < 1e-15);
        assert!((mp.j - 1.045).abs() < 1e-14);
        mp.deformation_gradient = Mat2::new(0.4, 0.0, 0.0, 1.0);
        assert!(matches!(mp.refresh(&p), Err(Error::PorosityViolation { .. })));
    }

    #[test]
    fn young_modulus_of_unit_material() {
        let p = MaterialParams { k: 0.5, g_shear: 1.0, n0: 0.5, ..MaterialParams::default() };
        assert!((p.young_modulus() - 2.25).abs() < 1e-15);
    }

    #[test]
    fn conductivity_derivative_matches_fd() {
        let p = MaterialParams { c1: 3.0, n0: 0.4, ..MaterialParams::default() };
        let j = 1.03;
        let fd = (p.conductivity(j + 1e-7).unwrap() - p.conductivity(j - 1e-7).unwrap()) / 2e-7;
        assert!((fd - p.conductivity_derivative(j).unwrap()).abs() < 1e-6 * fd.abs());
    }
}

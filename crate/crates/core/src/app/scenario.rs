//! Turns a validated configuration into solver and sweep inputs.

use crate::diagnostics::{consolidation_coefficient, SweepConfig};
use crate::error::{Error, Result, ValidationIssue};
use crate::material::MaterialPoint;
use crate::mesh::{OverlappingGrids, Vec2};
use crate::seeding::seed_material_points;
use crate::solver::SimulationSetup;

use super::config::SimulationConfig;

pub fn grids(cfg: &SimulationConfig) -> OverlappingGrids {
    OverlappingGrids::new(cfg.grid.clone())
}

/// Initial material points of the configured body.
pub fn seed(cfg: &SimulationConfig) -> Vec<MaterialPoint> {
    let g = grids(cfg);
    seed_material_points(&g.fine, &cfg.geometry, cfg.per_direction, Vec2::zeros())
}

pub fn build_setup(cfg: &SimulationConfig) -> Result<SimulationSetup> {
    let schedule = cfg
        .time
        .clone()
        .ok_or_else(|| Error::Validation(vec![ValidationIssue::new("time", "is required to run a simulation")]))?;
    Ok(SimulationSetup {
        grids: grids(cfg),
        mps: seed(cfg),
        basis: cfg.basis,
        material: cfg.material.clone(),
        ghost: cfg.ghost.clone(),
        bcs: cfg.boundary.clone(),
        schedule,
        solver: cfg.solver.clone(),
        boundary_order: cfg.boundary_order,
        scales: cfg.scales,
    })
}

pub fn sweep_config(cfg: &SimulationConfig) -> SweepConfig {
    let s = cfg.sweep.clone().unwrap_or_default();
    SweepConfig {
        grids: grids(cfg),
        geometry: cfg.geometry.clone(),
        per_direction: cfg.per_direction,
        material: cfg.material.clone(),
        bcs: cfg.boundary.clone(),
        samples: s.samples,
        gamma_factors: s.gamma_factors,
        kinds: s.kinds,
    }
}

/// Dimensionless time `c_v t / H²` of the consolidation reference.
pub fn dimensionless_time(cfg: &SimulationConfig, t: f64) -> Option<f64> {
    let r = cfg.reference?;
    Some(consolidation_coefficient(&cfg.material, cfg.kappa0) * t / (r.height * r.height))
}

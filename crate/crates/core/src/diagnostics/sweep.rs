//! Condition numbers of the A and C blocks while the body slides across the grid.

use rayon::prelude::*;
use serde::Serialize;

use super::condition::condition_number;
use crate::assembly::{AssemblyConfig, BoundaryConditions, StepContext};
use crate::basis::BasisKind;
use crate::error::{Error, Result};
use crate::ghost::GhostParams;
use crate::material::MaterialParams;
use crate::mesh::{OverlappingGrids, Vec2};
use crate::seeding::{any_on_grid_line, seed_material_points, Geometry};

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub grids: OverlappingGrids,
    pub geometry: Geometry,
    pub per_direction: usize,
    pub material: MaterialParams,
    pub bcs: BoundaryConditions,
    /// Number of translations over one fine-cell width along x.
    pub samples: usize,
    /// Ghost parameters are `factor·E` (displacement) and `factor·κ0/g` (pressure).
    pub gamma_factors: Vec<f64>,
    pub kinds: Vec<BasisKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub basis: BasisKind,
    pub gamma_factor: f64,
    /// Translation of the body along x.
    pub a: f64,
    /// `κ(A)`; infinite when the block is numerically singular.
    pub kappa_a: f64,
    pub kappa_c: f64,
}

fn cond_or_inf(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::SingularMatrix(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Condition numbers for one translation and every ghost setting, or `None`
/// when an sMPM point would sit on a grid line.
pub fn sweep_point(cfg: &SweepConfig, kind: BasisKind, a: f64) -> Result<Option<Vec<SweepRow>>> {
    let mps = seed_material_points(&cfg.grids.fine, &cfg.geometry, cfg.per_direction, Vec2::new(a, 0.0));
    if kind == BasisKind::Smpm && any_on_grid_line(&cfg.grids.fine, &mps) {
        return Ok(None);
    }
    let e = cfg.material.young_modulus();
    let kappa0 = cfg.material.conductivity(1.0)?;
    let mut rows = Vec::with_capacity(cfg.gamma_factors.len());
    for &f in &cfg.gamma_factors {
        let config = AssemblyConfig {
            basis: kind,
            material: cfg.material.clone(),
            ghost: GhostParams { gamma_a: f * e, gamma_c: f * kappa0 / cfg.material.gravity, quadrature_order: 2 },
            dt: 1.0,
            kappa_derivative: true,
            boundary_order: 2,
        };
        let ctx = StepContext::new(&cfg.grids, &mps, &cfg.bcs, config, 0.0)?;
        let (_, blocks) = ctx.evaluate(&ctx.initial_state(None), true)?;
        let blocks = blocks.expect("jacobian requested");
        let fu = ctx.dofs.free_u_dofs();
        let fp = ctx.dofs.free_p_dofs();
        rows.push(SweepRow {
            basis: kind,
            gamma_factor: f,
            a,
            kappa_a: cond_or_inf(condition_number(&blocks.a.submatrix(&fu, &fu)))?,
            kappa_c: cond_or_inf(condition_number(&blocks.c.submatrix(&fp, &fp)))?,
        });
    }
    Ok(Some(rows))
}

/// Full sweep, ordered by basis kind, ghost factor and translation.
pub fn ellipse_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let period = cfg.grids.fine.spacing().x;
    let jobs: Vec<(BasisKind, f64)> = cfg
        .kinds
        .iter()
        .flat_map(|&k| (0..cfg.samples).map(move |s| (k, period * s as f64 / cfg.samples as f64)))
        .collect();
    let results = jobs.par_iter().map(|&(k, a)| sweep_point(cfg, k, a)).collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<SweepRow> = results.into_iter().flatten().flatten().collect();
    let order = |k: BasisKind| cfg.kinds.iter().position(|&x| x == k).unwrap_or(0);
    let gidx = |g: f64| cfg.gamma_factors.iter().position(|&x| x == g).unwrap_or(0);
    rows.sort_by(|x, y| {
        (order(x.basis), gidx(x.gamma_factor)).cmp(&(order(y.basis), gidx(y.gamma_factor))).then(x.a.total_cmp(&y.a))
    });
    Ok(rows)
}

/// Largest `κ(A)` and `κ(C)` over the translations for one basis and ghost factor.
pub fn sweep_peaks(rows: &[SweepRow], kind: BasisKind, factor: f64) -> (f64, f64) {
    rows.iter()
        .filter(|r| r.basis == kind && r.gamma_factor == factor)
        .fold((0.0, 0.0), |(a, c), r| (f64::max(a, r.kappa_a), f64::max(c, r.kappa_c)))
}

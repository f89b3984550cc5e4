//! Time-stepping driver with per-step diagnostics and file output.

use std::collections::{BTreeSet, HashSet};

use crate::diagnostics::{checkerboard_fraction, pressure_jump_seminorm, smoothed_reference, terzaghi_pressure};
use crate::error::Result;
use crate::material::MaterialPoint;
use crate::mesh::CartesianGrid;
use crate::solver::{Simulation, StepOutcome};

use super::config::SimulationConfig;
use super::output::{
    write_checkpoint, write_isochrones_csv, write_oscillation_csv, write_steps_csv, write_vtk, IsochroneRecord,
    OscillationRecord, StepLog,
};
use super::scenario::{build_setup, dimensionless_time};

/// Jacobi passes used for the smooth reference pressure field.
pub const REFERENCE_SWEEPS: usize = 10;

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub steps: Vec<StepLog>,
    pub isochrones: Vec<IsochroneRecord>,
    pub oscillation: Vec<OscillationRecord>,
    pub final_mps: Vec<MaterialPoint>,
}

/// Steps (1-based) whose end time is nearest to each requested dimensionless time.
fn isochrone_steps(cfg: &SimulationConfig) -> HashSet<usize> {
    let Some(schedule) = &cfg.time else { return HashSet::new() };
    let mut t = 0.0;
    let times: Vec<f64> = schedule
        .step_sizes()
        .into_iter()
        .map(|dt| {
            t += dt;
            dimensionless_time(cfg, t).unwrap_or(f64::NAN)
        })
        .collect();
    if cfg.output.isochrones_every_step {
        return (1..=times.len()).collect();
    }
    cfg.output
        .isochrone_times
        .iter()
        .filter_map(|&target| {
            times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
                .map(|(k, _)| k + 1)
        })
        .collect()
}

/// Normalised pressure profile of the cloud against the analytical solution.
pub fn isochrone(cfg: &SimulationConfig, mps: &[MaterialPoint], time: f64) -> Vec<IsochroneRecord> {
    let (Some(r), Some(tt)) = (cfg.reference, dimensionless_time(cfg, time)) else { return Vec::new() };
    let mut out: Vec<IsochroneRecord> = mps
        .iter()
        .map(|mp| {
            let z = (r.drained_at - mp.reference_position.y) / r.height;
            IsochroneRecord { t: tt, z, p_numeric: mp.pressure / r.load, p_analytic: terzaghi_pressure(z, tt, 1e-12) }
        })
        .collect();
    out.sort_by(|a, b| a.z.total_cmp(&b.z));
    out
}

/// Jump seminorm, smoothed-reference seminorm and checkerboard fraction of
/// the converged nodal pressures.
pub fn oscillation_measures(grid: &CartesianGrid, out: &StepOutcome) -> OscillationRecord {
    let mut p = vec![0.0; grid.node_count()];
    let mut on = vec![false; grid.node_count()];
    for (&n, &v) in out.pressure_nodes.iter().zip(&out.pressure) {
        p[n] = v;
        on[n] = true;
    }
    let active: BTreeSet<_> =
        grid.elements().filter(|&e| grid.element_nodes(e).iter().all(|&n| on[grid.node_index(n)])).collect();
    let smooth = smoothed_reference(grid, &active, &p, REFERENCE_SWEEPS);
    OscillationRecord {
        step: out.step,
        time: out.time,
        seminorm: pressure_jump_seminorm(grid, &active, &p),
        reference_seminorm: pressure_jump_seminorm(grid, &active, &smooth),
        checkerboard_fraction: checkerboard_fraction(grid, &active, &p),
    }
}

/// Runs the configured simulation; files are written only when `write` is set.
pub fn run_config(cfg: &SimulationConfig, write: bool) -> Result<RunSummary> {
    let setup = build_setup(cfg)?;
    let dir = cfg.output.directory.clone();
    if write {
        std::fs::create_dir_all(&dir)?;
    }
    let iso_steps = isochrone_steps(cfg);
    let mut summary = RunSummary::default();
    let mut sim = Simulation::new(setup);
    if write && cfg.output.vtk_every > 0 {
        write_vtk(dir.join("cloud_00000.vtk"), &sim.mps, "step 0")?;
    }
    sim.run(|s, out| {
        summary.steps.push(StepLog {
            step: out.step,
            time: out.time,
            dt: out.dt,
            iterations: out.newton.iterations,
            residual: *out.newton.history.last().unwrap_or(&0.0),
        });
        if iso_steps.contains(&out.step) {
            summary.isochrones.extend(isochrone(cfg, &s.mps, out.time));
        }
        if cfg.output.oscillation {
            summary.oscillation.push(oscillation_measures(&s.setup.grids.coarse, out));
        }
        if write && cfg.output.vtk_every > 0 && out.step % cfg.output.vtk_every == 0 {
            write_vtk(dir.join(format!("cloud_{:05}.vtk", out.step)), &s.mps, &format!("step {}", out.step))?;
        }
        Ok(())
    })?;
    summary.final_mps = sim.mps;
    if write {
        write_steps_csv(dir.join("steps.csv"), &summary.steps)?;
        if cfg.reference.is_some() {
            write_isochrones_csv(dir.join("isochrones.csv"), &summary.isochrones)?;
        }
        if cfg.output.oscillation {
            write_oscillation_csv(dir.join("oscillation.csv"), &summary.oscillation)?;
        }
        if cfg.output.checkpoint {
            write_checkpoint(dir.join("checkpoint.json"), &summary.final_mps)?;
        }
    }
    Ok(summary)
}

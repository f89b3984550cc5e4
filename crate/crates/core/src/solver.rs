//! Implicit time stepping with a Newton–Raphson solve per step.

use serde::{Deserialize, Serialize};

use crate::assembly::{AssemblyConfig, BoundaryConditions, StepContext};
use crate::basis::{eval_basis, BasisKind};
use crate::error::{Error, Result, ValidationIssue};
use crate::ghost::GhostParams;
use crate::material::{porosity, MaterialParams, MaterialPoint};
use crate::mesh::{OverlappingGrids, Vec2};
use crate::sparse::{norm2, SparseLu};
use crate::transfer::g2p_update;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TimeSchedule {
    Fixed {
        dt: f64,
        steps: usize,
    },
    /// Step `k` has size `t0 · ratio^k`.
    Geometric {
        t0: f64,
        ratio: f64,
        steps: usize,
    },
}

impl TimeSchedule {
    pub fn step_sizes(&self) -> Vec<f64> {
        match *self {
            TimeSchedule::Fixed { dt, steps } => vec![dt; steps],
            TimeSchedule::Geometric { t0, ratio, steps } => (0..steps).map(|k| t0 * ratio.powi(k as i32)).collect(),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.step_sizes().iter().sum()
    }

    pub fn validate(&self, prefix: &str, issues: &mut Vec<ValidationIssue>) {
        match *self {
            TimeSchedule::Fixed { dt, .. } => {
                if !(dt > 0.0) {
                    issues.push(ValidationIssue::new(format!("{prefix}dt"), "must be positive"));
                }
            }
            TimeSchedule::Geometric { t0, ratio, .. } => {
                if !(t0 > 0.0) {
                    issues.push(ValidationIssue::new(format!("{prefix}t0"), "must be positive"));
                }
                if !(ratio >= 1.0) {
                    issues.push(ValidationIssue::new(format!("{prefix}ratio"), "must be at least 1"));
                }
            }
        }
    }
}

/// Initial guess for the nodal pressures of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    #[default]
    Zero,
    /// Volume-weighted average of the material point pressures.
    MpPressure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub abs_tol: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
    pub predictor: Predictor,
    pub kappa_derivative: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-9,
            abs_tol: 1e-12,
            max_iters: 25,
            max_halvings: 10,
            predictor: Predictor::Zero,
            kappa_derivative: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ValidationIssue>) {
        if !(self.newton_tol > 0.0) {
            issues.push(ValidationIssue::new(format!("{prefix}newton_tol"), "must be positive"));
        }
        if !(self.abs_tol > 0.0) {
            issues.push(ValidationIssue::new(format!("{prefix}abs_tol"), "must be positive"));
        }
        if self.max_iters == 0 {
            issues.push(ValidationIssue::new(format!("{prefix}max_iters"), "must be at least 1"));
        }
    }
}

/// `(ln J_curr - ln J_prev)/Δt`.
pub fn backward_euler_ln_j(j_prev: f64, j_curr: f64, dt: f64, n0: f64) -> Result<f64> {
    porosity(j_prev, n0)?;
    porosity(j_curr, n0)?;
    Ok((j_curr.ln() - j_prev.ln()) / dt)
}

/// Reference magnitudes that make the residual rows dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualScales {
    /// Force-row scale (load intensity × element length).
    pub force: f64,
    /// Mass-row scale (`ρ_f0 κ h`).
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Scaled residual norm before each correction and after the last one.
    pub history: Vec<f64>,
}

fn scaled_norm(ctx: &StepContext, r: &[f64], free: &[usize], scales: ResidualScales) -> f64 {
    let nu = ctx.dofs.n_u();
    let v: Vec<f64> = free.iter().map(|&k| if k < nu { r[k] / scales.force } else { r[k] / scales.mass }).collect();
    norm2(&v)
}

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::PorosityViolation { .. } | Error::NonInvertibleF(_) | Error::PorosityDomain(_))
}

/// Newton iteration on the free unknowns starting from `x0`.
pub fn newton_solve(
    ctx: &StepContext,
    x0: Vec<f64>,
    scales: ResidualScales,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, NewtonReport)> {
    let free = ctx.dofs.free_dofs();
    let mut x = x0;
    let (mut r, mut blocks) = ctx.evaluate(&x, true)?;
    let norm0 = scaled_norm(ctx, &r, &free, scales);
    let mut history = vec![norm0];
    let target = (cfg.newton_tol * norm0).max(cfg.abs_tol);
    for it in 1..=cfg.max_iters {
        let jac = blocks.take().expect("jacobian requested").full().submatrix(&free, &free);
        let rhs: Vec<f64> = free.iter().map(|&k| -r[k]).collect();
        let delta = SparseLu::new(&jac)?.solve(&rhs)?;
        let mut alpha = 1.0;
        let mut halvings = 0;
        let (trial, rt, bt) = loop {
            let mut trial = x.clone();
            for (k, &d) in free.iter().enumerate() {
                trial[d] += alpha * delta[k];
            }
            match ctx.evaluate(&trial, true) {
                Ok((rt, bt)) => break (trial, rt, bt),
                Err(e) if recoverable(&e) && halvings < cfg.max_halvings => {
                    alpha *= 0.5;
                    halvings += 1;
                }
                Err(e) => return Err(e),
            }
        };
        x = trial;
        r = rt;
        blocks = bt;
        let norm = scaled_norm(ctx, &r, &free, scales);
        history.push(norm);
        if norm <= target {
            return Ok((x, NewtonReport { iterations: it, history }));
        }
    }
    Err(Error::NonConvergence { iterations: cfg.max_iters, residual: *history.last().unwrap() })
}

/// Everything needed to advance a material point cloud in time.
#[derive(Debug, Clone)]
pub struct SimulationSetup {
    pub grids: OverlappingGrids,
    pub mps: Vec<MaterialPoint>,
    pub basis: BasisKind,
    pub material: MaterialParams,
    pub ghost: GhostParams,
    pub bcs: BoundaryConditions,
    pub schedule: TimeSchedule,
    pub solver: SolverConfig,
    pub boundary_order: usize,
    pub scales: ResidualScales,
}

/// Converged nodal fields and convergence data of one step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub newton: NewtonReport,
    /// Active coarse nodes (linear index) and their pressures.
    pub pressure_nodes: Vec<usize>,
    pub pressure: Vec<f64>,
}

pub struct Simulation {
    pub setup: SimulationSetup,
    pub mps: Vec<MaterialPoint>,
    pub time: f64,
    pub step_index: usize,
}

impl Simulation {
    pub fn new(setup: SimulationSetup) -> Self {
        let mps = setup.mps.clone();
        Self { setup, mps, time: 0.0, step_index: 0 }
    }

    fn assembly_config(&self, dt: f64) -> AssemblyConfig {
        AssemblyConfig {
            basis: self.setup.basis,
            material: self.setup.material.clone(),
            ghost: self.setup.ghost.clone(),
            dt,
            kappa_derivative: self.setup.solver.kappa_derivative,
            boundary_order: self.setup.boundary_order,
        }
    }

    /// Advances one step of size `dt`. Grid data lives only inside this call.
    pub fn step(&mut self, dt: f64) -> Result<StepOutcome> {
        let s = &self.setup;
        let t_end = self.time + dt;
        let ctx = StepContext::new(&s.grids, &self.mps, &s.bcs, self.assembly_config(dt), t_end)?;
        let guess = match s.solver.predictor {
            Predictor::Zero => None,
            Predictor::MpPressure => Some(ctx.mp_pressure_guess()),
        };
        let x0 = ctx.initial_state(guess.as_deref());
        let (x, report) = newton_solve(&ctx, x0, s.scales, &s.solver)?;

        let nu = ctx.dofs.n_u();
        let (du, p) = x.split_at(nu);
        let du_at = |n: usize| ctx.dofs.u_dof(n, 0).map(|d| Vec2::new(du[d], du[d + 1])).unwrap_or_else(Vec2::zeros);
        let p_at = |n: usize| ctx.dofs.p_dof(n).map(|d| p[d]).unwrap_or(0.0);
        let lp_limit = s.grids.fine.spacing() * 0.5;
        let mut next = Vec::with_capacity(self.mps.len());
        for (mp, sm) in self.mps.iter().zip(&ctx.samples) {
            let inc = sm.fine.iter().map(|(n, v, _)| v * du_at(n)).sum::<Vec2>();
            let end = eval_basis(&s.grids.coarse, s.basis, mp.position + inc, mp.half_lengths)
                .ok()
                .filter(|c| c.nodes.iter().all(|&n| ctx.dofs.coarse_active(n)));
            let coarse = end.as_ref().unwrap_or(&sm.coarse);
            next.push(g2p_update(mp, &sm.fine, coarse, du_at, p_at, &s.material, lp_limit)?);
        }
        let outcome = StepOutcome {
            step: self.step_index + 1,
            time: t_end,
            dt,
            newton: report,
            pressure_nodes: ctx.dofs.coarse_nodes.clone(),
            pressure: p.to_vec(),
        };
        drop(ctx);
        self.mps = next;
        self.time = t_end;
        self.step_index += 1;
        Ok(outcome)
    }

    /// Runs the whole schedule, calling `observe` after every step.
    pub fn run(&mut self, mut observe: impl FnMut(&Simulation, &StepOutcome) -> Result<()>) -> Result<()> {
        let steps = self.setup.schedule.step_sizes();
        for dt in steps.into_iter().skip(self.step_index) {
            let out = self.step(dt)?;
            observe(self, &out)?;
        }
        Ok(())
    }
}

/// Material point clouds (initial state first) and per-step nodal data.
#[derive(Debug, Clone)]
pub struct History {
    pub clouds: Vec<Vec<MaterialPoint>>,
    pub steps: Vec<StepOutcome>,
}

/// Runs a full simulation and keeps every intermediate cloud.
pub fn run_simulation(setup: SimulationSetup) -> Result<History> {
    let mut sim = Simulation::new(setup);
    let mut history = History { clouds: vec![sim.mps.clone()], steps: Vec::new() };
    sim.run(|s, out| {
        history.clouds.push(s.mps.clone());
        history.steps.push(out.clone());
        Ok(())
    })?;
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_j_examples() {
        assert_eq!(backward_euler_ln_j(1.2, 1.2, 0.3, 0.5).unwrap(), 0.0);
        let dt: f64 = 0.25;
        assert!((backward_euler_ln_j(1.0, dt.exp(), dt, 0.5).unwrap() - 1.0).abs() < 1e-14);
        assert!((backward_euler_ln_j(1.0, 1.1, 0.5, 0.5).unwrap() - 0.190_620_359_6).abs() < 1e-9);
        assert!(matches!(backward_euler_ln_j(1.0, 0.4, 0.5, 0.5), Err(Error::PorosityViolation { .. })));
    }

    #[test]
    fn geometric_schedule_spans_consolidation_time() {
        let s = TimeSchedule::Geometric { t0: 0.1, ratio: 1.01673, steps: 550 };
        let cv = (1.0e6 + 4.0 / 3.0 * 6.0e5) * 1e-7 / (1000.0 * 9.81);
        let rel = (s.total_time() - 1.0 / cv).abs() * cv;
        assert!(rel < 0.01, "relative mismatch {rel}");
    }
}

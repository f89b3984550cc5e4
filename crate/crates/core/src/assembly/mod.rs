//! Residual and block Jacobian of the coupled displacement-pressure system.
//!
//! The unknowns are the displacement increment `Δu` on active fine-grid
//! nodes and the pressure `p` on active coarse-grid nodes. Volume integrals
//! use the material points as quadrature points, with basis samples taken
//! at the start-of-step positions; the current configuration enters through
//! the incremental deformation gradient `ΔF = 1 + Σ Δu_a ⊗ ∇N_a`.

pub mod boundary;
pub mod dofs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{eval_basis, BasisKind, ShapeSample};
use crate::error::{Error, Result};
use crate::ghost::{ghost_matrix_for_grid, mark_ghost_facets, GhostParams};
use crate::material::kinematics::{b_from_strain, log_of_b, log_strain_derivative};
use crate::material::{
    hencky_stress, porosity, Elastic, Mat2, MaterialParams, MaterialPoint, PlasticityModel, SymTensor,
};
use crate::mesh::{compute_active_sets, ActiveSets, CartesianGrid, OverlappingGrids, Vec2};
use crate::sparse::{CsrMatrix, TripletBuilder};

pub use boundary::{
    apply_boundary_terms, apply_essential, BoundaryConditions, BoundaryTerms, FixedLine, FluxBc, LoadCurve, PressureBc,
    TractionBc,
};
pub use dofs::DofLayout;

/// Parameters fixed over one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyConfig {
    pub basis: BasisKind,
    pub material: MaterialParams,
    pub ghost: GhostParams,
    /// Step size (s).
    pub dt: f64,
    /// Include the conductivity's dependence on `J` in the B2 block.
    pub kappa_derivative: bool,
    /// Gauss points per boundary segment.
    pub boundary_order: usize,
}

/// The four blocks of the tangent, in dof numbering within each field.
#[derive(Debug, Clone)]
pub struct JacobianBlocks {
    pub a: CsrMatrix,
    pub b1: CsrMatrix,
    pub b2: CsrMatrix,
    pub c: CsrMatrix,
}

impl JacobianBlocks {
    pub fn full(&self) -> CsrMatrix {
        CsrMatrix::from_blocks(&self.a, &self.b1, &self.b2, &self.c)
    }
}

/// Basis samples of one material point on both grids.
#[derive(Debug, Clone)]
pub struct MpSamples {
    pub fine: ShapeSample,
    pub coarse: ShapeSample,
}

/// Everything needed to evaluate the discrete system during one step.
pub struct StepContext<'a> {
    pub grids: &'a OverlappingGrids,
    pub mps: &'a [MaterialPoint],
    pub config: AssemblyConfig,
    pub fine_sets: ActiveSets,
    pub coarse_sets: ActiveSets,
    pub dofs: DofLayout,
    pub samples: Vec<MpSamples>,
    /// Elastic left Cauchy–Green tensor at the start of the step.
    pub b_prev: Vec<SymTensor>,
    /// Ghost penalty on the displacement block (already scaled).
    pub ghost_u: CsrMatrix,
    /// Ghost penalty on the pressure block (already scaled).
    pub ghost_p: CsrMatrix,
    pub boundary: BoundaryTerms,
}

/// Expands a node-indexed scalar matrix into the displacement dof space (`M ⊗ I₂`).
fn node_matrix_to_u(m: &CsrMatrix, dofs: &DofLayout) -> CsrMatrix {
    let mut t = TripletBuilder::new(dofs.n_u(), dofs.n_u());
    for (r, c, v) in m.triplets() {
        if let (Some(a), Some(b)) = (dofs.u_dof(r, 0), dofs.u_dof(c, 0)) {
            t.push(a, b, v);
            t.push(a + 1, b + 1, v);
        }
    }
    t.build()
}

fn node_matrix_to_p(m: &CsrMatrix, dofs: &DofLayout) -> CsrMatrix {
    let mut t = TripletBuilder::new(dofs.n_p(), dofs.n_p());
    for (r, c, v) in m.triplets() {
        if let (Some(a), Some(b)) = (dofs.p_dof(r), dofs.p_dof(c)) {
            t.push(a, b, v);
        }
    }
    t.build()
}

/// Evaluates a material point's basis on both grids at its current position.
pub fn sample_mp(grids: &OverlappingGrids, kind: BasisKind, mp: &MaterialPoint) -> Result<MpSamples> {
    Ok(MpSamples {
        fine: eval_basis(&grids.fine, kind, mp.position, mp.half_lengths)?,
        coarse: eval_basis(&grids.coarse, kind, mp.position, mp.half_lengths)?,
    })
}

/// Active sets on one grid with boundary elements and ghost facets filled in.
pub fn grid_activity(grid: &CartesianGrid, mps: &[MaterialPoint], kind: BasisKind) -> Result<ActiveSets> {
    let mut sets = compute_active_sets(grid, mps, kind)?;
    mark_ghost_facets(&mut sets, grid);
    Ok(sets)
}

impl<'a> StepContext<'a> {
    /// Builds the scratch grid state for a step ending at time `time`.
    pub fn new(
        grids: &'a OverlappingGrids,
        mps: &'a [MaterialPoint],
        bcs: &BoundaryConditions,
        config: AssemblyConfig,
        time: f64,
    ) -> Result<Self> {
        let kind = config.basis;
        let fine_sets = grid_activity(&grids.fine, mps, kind)?;
        let coarse_sets = grid_activity(&grids.coarse, mps, kind)?;
        let mut dofs = DofLayout::new(&grids.fine, &fine_sets, &grids.coarse, &coarse_sets);
        apply_essential(&grids.fine, &grids.coarse, &mut dofs, bcs);

        let samples = mps.par_iter().map(|mp| sample_mp(grids, kind, mp)).collect::<Result<Vec<_>>>()?;
        let b_prev = mps.iter().map(|mp| b_from_strain(&mp.elastic_strain)).collect();

        let order = config.ghost.quadrature_order;
        let gu = ghost_matrix_for_grid(&grids.fine, &fine_sets.ghost_facets, config.ghost.gamma_a, order);
        let gp = ghost_matrix_for_grid(&grids.coarse, &coarse_sets.ghost_facets, config.ghost.gamma_c, order);
        let ghost_u = node_matrix_to_u(&gu, &dofs);
        let ghost_p = node_matrix_to_p(&gp, &dofs);

        let kappa0 = config.material.conductivity(1.0)?;
        let default_penalty = if kappa0 > 0.0 { 5.0e6 / kappa0 } else { 5.0e6 };
        let boundary = apply_boundary_terms(
            &grids.fine,
            &grids.coarse,
            &dofs,
            mps,
            bcs,
            time,
            default_penalty,
            config.boundary_order,
        )?;

        Ok(Self { grids, mps, config, fine_sets, coarse_sets, dofs, samples, b_prev, ghost_u, ghost_p, boundary })
    }

    /// Initial iterate: zero increments, prescribed pressures applied.
    pub fn initial_state(&self, p_guess: Option<&[f64]>) -> Vec<f64> {
        let mut x = vec![0.0; self.dofs.total()];
        let nu = self.dofs.n_u();
        if let Some(p) = p_guess {
            x[nu..].copy_from_slice(p);
        }
        for (k, fixed) in self.dofs.p_fixed.iter().enumerate() {
            if let Some(v) = fixed {
                x[nu + k] = *v;
            }
        }
        x
    }

    /// Nodal pressures averaged from the material points, weighted by the
    /// coarse basis (an inexpensive Newton predictor).
    pub fn mp_pressure_guess(&self) -> Vec<f64> {
        let mut num = vec![0.0; self.dofs.n_p()];
        let mut den = vec![0.0; self.dofs.n_p()];
        for (mp, s) in self.mps.iter().zip(&self.samples) {
            for (node, n, _) in s.coarse.iter() {
                if let Some(d) = self.dofs.p_dof(node) {
                    num[d] += n * mp.initial_volume * mp.pressure;
                    den[d] += n * mp.initial_volume;
                }
            }
        }
        num.iter().zip(&den).map(|(a, b)| if *b > 0.0 { a / b } else { 0.0 }).collect()
    }

    /// Residual and, optionally, the Jacobian at iterate `x = [Δu, p]`.
    pub fn evaluate(&self, x: &[f64], with_jacobian: bool) -> Result<(Vec<f64>, Option<JacobianBlocks>)> {
        let nu = self.dofs.n_u();
        let np = self.dofs.n_p();
        assert_eq!(x.len(), nu + np);
        let (du, p) = x.split_at(nu);

        let locals = (0..self.mps.len())
            .into_par_iter()
            .map(|m| self.mp_contribution(m, du, p, with_jacobian))
            .collect::<Result<Vec<_>>>()?;

        let mut r = vec![0.0; nu + np];
        let mut a = TripletBuilder::new(nu, nu);
        let mut b1 = TripletBuilder::new(nu, np);
        let mut b2 = TripletBuilder::new(np, nu);
        let mut c = TripletBuilder::new(np, np);
        for l in locals {
            for (d, v) in l.ru {
                r[d] += v;
            }
            for (d, v) in l.rp {
                r[nu + d] += v;
            }
            for (i, j, v) in l.a {
                a.push(i, j, v);
            }
            for (i, j, v) in l.b1 {
                b1.push(i, j, v);
            }
            for (i, j, v) in l.b2 {
                b2.push(i, j, v);
            }
            for (i, j, v) in l.c {
                c.push(i, j, v);
            }
        }

        let bt = &self.boundary;
        for (k, f) in bt.traction.iter().enumerate() {
            r[k] -= f;
        }
        let gu = self.ghost_u.matvec(du);
        for k in 0..nu {
            r[k] += gu[k];
        }
        let gp = self.ghost_p.matvec(p);
        let pen = bt.penalty.matvec(p);
        for k in 0..np {
            r[nu + k] += gp[k] + pen[k] - bt.penalty_rhs[k] - bt.flux[k];
        }

        let blocks = if with_jacobian {
            for (i, j, v) in self.ghost_u.triplets() {
                a.push(i, j, v);
            }
            for (i, j, v) in self.ghost_p.triplets().chain(bt.penalty.triplets()) {
                c.push(i, j, v);
            }
            Some(JacobianBlocks { a: a.build(), b1: b1.build(), b2: b2.build(), c: c.build() })
        } else {
            None
        };
        Ok((r, blocks))
    }

    fn mp_contribution(&self, m: usize, du: &[f64], p: &[f64], jac: bool) -> Result<Local> {
        let mp = &self.mps[m];
        let s = &self.samples[m];
        let prm = &self.config.material;
        let dt = self.config.dt;
        let grav = prm.gravity;
        let bf = prm.body_force;
        let v0 = mp.initial_volume;

        let fine: Vec<(usize, f64, Vec2)> = s
            .fine
            .iter()
            .map(|(n, v, g)| (self.dofs.u_dof(n, 0).expect("material point sample outside active closure"), v, g))
            .collect();
        let coarse: Vec<(usize, f64, Vec2)> = s
            .coarse
            .iter()
            .map(|(n, v, g)| (self.dofs.p_dof(n).expect("material point sample outside active closure"), v, g))
            .collect();

        let mut df = Mat2::identity();
        for &(d, _, g) in &fine {
            df += Vec2::new(du[d], du[d + 1]) * g.transpose();
        }
        let det = df.determinant();
        if !(det > 0.0) {
            return Err(Error::NonInvertibleF(det));
        }
        let j = mp.j * det;
        porosity(j, prm.n0)?;
        let finv_t = df.try_inverse().ok_or(Error::NonInvertibleF(det))?.transpose();
        let gf: Vec<Vec2> = fine.iter().map(|&(_, _, g)| finv_t * g).collect();
        let gc: Vec<Vec2> = coarse.iter().map(|&(_, _, g)| finv_t * g).collect();

        let bn = &self.b_prev[m];
        let b_in = df * bn.inplane() * df.transpose();
        let b = SymTensor::from_parts(&b_in, bn.zz);
        let trial = log_of_b(&b)?;
        let eps = Elastic.return_map(&trial, &mp.internal_vars, prm)?.elastic_strain;
        let (tau, dtau) = hencky_stress(&eps, j, prm)?;
        let tau2 = tau.inplane();

        let v = j * v0;
        let pm: f64 = coarse.iter().map(|&(d, n, _)| n * p[d]).sum();
        let grad_p: Vec2 = coarse.iter().zip(&gc).map(|(&(d, _, _), g)| g * p[d]).sum();
        let rho_v = v0 * (prm.rho_s0 * (1.0 - prm.n0) + prm.rho_f0 * (j - 1.0 + prm.n0));
        let kappa = prm.conductivity(j)?;
        let lnd = det.ln();
        let w = grad_p - prm.rho_f0 * bf;

        let mut out = Local::default();
        for (k, &(d, n, _)) in fine.iter().enumerate() {
            let f = v0 * (tau2 * gf[k]) - v * pm * gf[k] - n * rho_v * bf;
            out.ru.push((d, f.x));
            out.ru.push((d + 1, f.y));
        }
        for (k, &(d, n, _)) in coarse.iter().enumerate() {
            let r = v * (n * prm.rho_f0 * lnd / dt + kappa / grav * gc[k].dot(&w));
            out.rp.push((d, r));
        }
        if !jac {
            return Ok(out);
        }

        let dl = dtau * log_strain_derivative(&b);
        let dkappa = if self.config.kappa_derivative { prm.conductivity_derivative(j)? * j } else { 0.0 };
        for (kb, &(db_dof, _, _)) in fine.iter().enumerate() {
            let gb = gf[kb];
            let bg = b_in * gb;
            for jd in 0..2 {
                let dbt = if jd == 0 {
                    SymTensor::new(2.0 * bg.x, 0.0, 0.0, bg.y)
                } else {
                    SymTensor::new(0.0, 2.0 * bg.y, 0.0, bg.x)
                };
                let dt2 = SymTensor::from_mandel(&(dl * dbt.to_mandel())).inplane();
                let col = db_dof + jd;
                let tau_gb = tau2 * gb;
                for (ka, &(da_dof, na, _)) in fine.iter().enumerate() {
                    let ga = gf[ka];
                    let mat = dt2 * ga;
                    for i in 0..2 {
                        let val = v0 * (mat[i] - tau_gb[i] * ga[jd])
                            - pm * v * (ga[i] * gb[jd] - ga[jd] * gb[i])
                            - na * v * prm.rho_f0 * gb[jd] * bf[i];
                        out.a.push((da_dof + i, col, val));
                    }
                }
                for (kc, &(dc, nc, _)) in coarse.iter().enumerate() {
                    let gcc = gc[kc];
                    let flow = gcc.dot(&w);
                    let val = nc * prm.rho_f0 * v * gb[jd] * (1.0 + lnd) / dt
                        + (v * gb[jd] * kappa * flow + v * dkappa * gb[jd] * flow
                            - v * kappa * (gb.dot(&w) * gcc[jd] + gcc.dot(&gb) * grad_p[jd]))
                            / grav;
                    out.b2.push((dc, col, val));
                }
            }
        }
        for (ka, &(da, _, _)) in fine.iter().enumerate() {
            for &(dc, nc, _) in &coarse {
                for (i, g) in gf[ka].iter().enumerate() {
                    out.b1.push((da + i, dc, -v * g * nc));
                }
            }
        }
        for (kc, &(dc, _, _)) in coarse.iter().enumerate() {
            for (kd, &(dd, _, _)) in coarse.iter().enumerate() {
                out.c.push((dc, dd, v * kappa / grav * gc[kc].dot(&gc[kd])));
            }
        }
        Ok(out)
    }
}

#[derive(Default)]
struct Local {
    ru: Vec<(usize, f64)>,
    rp: Vec<(usize, f64)>,
    a: Vec<(usize, usize, f64)>,
    b1: Vec<(usize, usize, f64)>,
    b2: Vec<(usize, usize, f64)>,
    c: Vec<(usize, usize, f64)>,
}

#[cfg(test)]
mod tests;

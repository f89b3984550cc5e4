//! Numerical inf-sup test for displacement/pressure grid pairings.
//!
//! On the unit square, the smallest non-zero eigenvalue of
//! `B S⁻¹ Bᵀ q = λ T q` is computed, with `S` the vector Laplacian,
//! `B` the divergence coupling and `T` the pressure mass matrix. Integrals
//! use 2×2 Gauss points of the displacement grid as material points (the
//! finite element limit). Displacements are held on the bottom, left and
//! right edges.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::{eval_basis, BasisKind, ShapeSample};
use crate::error::{Error, Result};
use crate::ghost::gauss_legendre;
use crate::mesh::{CartesianGrid, Vec2};
use crate::sparse::{CsrMatrix, SparseLu, TripletBuilder};

/// Which displacement grid accompanies an `n × n` pressure grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Displacement grid subdivided once (`2n × 2n`).
    Subdivided,
    /// Equal-order control on the same `n × n` grid.
    EqualOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfSupResult {
    pub pairing: Pairing,
    /// Pressure elements per side.
    pub level: usize,
    pub min_eigenvalue: f64,
    /// Eigenvalues below `1e-10` of the largest, excluded from the minimum.
    pub zero_modes: usize,
}

struct Operators {
    s: CsrMatrix,
    b: CsrMatrix,
    t: DMatrix<f64>,
}

fn assemble(level: usize, pairing: Pairing) -> Result<Operators> {
    let h = 1.0 / level as f64;
    let coarse = CartesianGrid::new(Vec2::zeros(), Vec2::new(h, h), [level, level])?;
    let fine = match pairing {
        Pairing::Subdivided => coarse.refined(),
        Pairing::EqualOrder => coarse.clone(),
    };
    let nx = fine.node_counts()[0];
    let mut udof = vec![None; fine.node_count()];
    let mut nu = 0;
    for (k, slot) in udof.iter_mut().enumerate() {
        let id = fine.node_id(k);
        if id.i > 0 && id.i + 1 < nx && id.j > 0 {
            *slot = Some(nu);
            nu += 2;
        }
    }
    let np = coarse.node_count();
    let rule = gauss_legendre(2);
    let hf = fine.spacing();
    let mut s = TripletBuilder::new(nu, nu);
    let mut b = TripletBuilder::new(np, nu);
    let mut t = DMatrix::zeros(np, np);
    let zero = Vec2::zeros();
    for e in fine.elements() {
        let (lo, _) = fine.element_bounds(e);
        for &(sx, wx) in &rule {
            for &(sy, wy) in &rule {
                let x = lo + Vec2::new(0.5 * (sx + 1.0) * hf.x, 0.5 * (sy + 1.0) * hf.y);
                let w = wx * wy * 0.25 * hf.x * hf.y;
                let fu: ShapeSample = eval_basis(&fine, BasisKind::Smpm, x, zero)?;
                let fp: ShapeSample = eval_basis(&coarse, BasisKind::Smpm, x, zero)?;
                for (na, _, ga) in fu.iter() {
                    let Some(da) = udof[na] else { continue };
                    for (nb, _, gb) in fu.iter() {
                        let Some(db) = udof[nb] else { continue };
                        let v = w * ga.dot(&gb);
                        s.push(da, db, v);
                        s.push(da + 1, db + 1, v);
                    }
                    for (c, nc, _) in fp.iter() {
                        b.push(c, da, w * nc * ga.x);
                        b.push(c, da + 1, w * nc * ga.y);
                    }
                }
                for (c, nc, _) in fp.iter() {
                    for (d, nd, _) in fp.iter() {
                        t[(c, d)] += w * nc * nd;
                    }
                }
            }
        }
    }
    Ok(Operators { s: s.build(), b: b.build(), t })
}

/// Smallest non-zero eigenvalue of the inf-sup problem at one refinement level.
pub fn infsup_eigenvalue(level: usize, pairing: Pairing) -> Result<InfSupResult> {
    let ops = assemble(level, pairing)?;
    let lu = SparseLu::new(&ops.s)?;
    let np = ops.b.nrows();
    // columns of S⁻¹ Bᵀ, then K = B S⁻¹ Bᵀ
    let mut k = DMatrix::zeros(np, np);
    for c in 0..np {
        let mut col = vec![0.0; ops.b.ncols()];
        for (r, v) in ops.b.row(c) {
            col[r] = v;
        }
        let x = lu.solve(&col)?;
        let kc = ops.b.matvec(&x);
        for r in 0..np {
            k[(r, c)] = kc[r];
        }
    }
    let k = (&k + k.transpose()) * 0.5;
    let chol = Cholesky::new(ops.t).ok_or_else(|| Error::LinearSolveFailure("pressure mass matrix".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(np, np))
        .ok_or_else(|| Error::LinearSolveFailure("triangular solve".into()))?;
    let m = &linv * k * linv.transpose();
    let ev = SymmetricEigen::new((&m + m.transpose()) * 0.5).eigenvalues;
    let top = ev.iter().cloned().fold(0.0, f64::max);
    if !(top > 0.0) {
        return Ok(InfSupResult { pairing, level, min_eigenvalue: 0.0, zero_modes: ev.len() });
    }
    let zero_modes = ev.iter().filter(|&&x| x < 1e-10 * top).count();
    let min = ev.iter().cloned().filter(|&x| x >= 1e-10 * top).fold(f64::INFINITY, f64::min);
    Ok(InfSupResult { pairing, level, min_eigenvalue: min, zero_modes })
}

/// Runs the test for every level and both pairings, subdivided first.
pub fn infsup_test(levels: &[usize]) -> Result<Vec<InfSupResult>> {
    let mut out = Vec::new();
    for pairing in [Pairing::Subdivided, Pairing::EqualOrder] {
        for &n in levels {
            out.push(infsup_eigenvalue(n, pairing)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element_is_finite_and_positive() {
        let r = infsup_eigenvalue(1, Pairing::Subdivided).unwrap();
        assert!(r.min_eigenvalue.is_finite() && r.min_eigenvalue > 0.0);
        let control = infsup_eigenvalue(1, Pairing::EqualOrder).unwrap();
        assert_eq!((control.min_eigenvalue, control.zero_modes), (0.0, 4));
    }

    #[test]
    fn subdivided_does_not_drift_while_control_decays() {
        let sd: Vec<f64> =
            [1, 2, 4, 8].iter().map(|&n| infsup_eigenvalue(n, Pairing::Subdivided).unwrap().min_eigenvalue).collect();
        let eo: Vec<f64> =
            [2, 4, 8].iter().map(|&n| infsup_eigenvalue(n, Pairing::EqualOrder).unwrap().min_eigenvalue).collect();
        assert!(sd.windows(2).all(|w| w[1] >= w[0]), "{sd:?}");
        assert!(eo.windows(2).all(|w| w[1] < w[0]), "{eo:?}");
    }
}

use rand::{Rng, SeedableRng};

use super::*;
use crate::material::kinematics::log_strain;
use crate::mesh::{Axis, Side};
use crate::sparse::norm2;

fn params() -> MaterialParams {
    MaterialParams {
        k: 40.0,
        g_shear: 25.0,
        n0: 0.4,
        c1: crate::material::porous::kozeny_carman_constant(0.05, 0.4),
        rho_s0: 2.6,
        rho_f0: 1.0,
        gravity: 9.81,
        body_force: Vec2::new(0.0, -9.81),
    }
}

fn config(kind: BasisKind, ghost: bool) -> AssemblyConfig {
    AssemblyConfig {
        basis: kind,
        material: params(),
        ghost: GhostParams {
            gamma_a: if ghost { 5.0 } else { 0.0 },
            gamma_c: if ghost { 0.02 } else { 0.0 },
            quadrature_order: 2,
        },
        dt: 0.1,
        kappa_derivative: true,
        boundary_order: 2,
    }
}

fn grids() -> OverlappingGrids {
    OverlappingGrids::new(CartesianGrid::new(Vec2::zeros(), Vec2::new(1.0, 1.0), [4, 3]).unwrap())
}

/// Rectangular block `[0.5, 0.5 + w] × [0.5, 0.5 + h]` with `per` points per
/// fine cell and direction (the block edges cut through grid cells).
fn block(grids: &OverlappingGrids, w: f64, h: f64, per: usize) -> Vec<MaterialPoint> {
    let hf = grids.fine.spacing();
    let (dx, dy) = (hf.x / per as f64, hf.y / per as f64);
    let (nx, ny) = ((w / dx).round() as usize, (h / dy).round() as usize);
    let mut out = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let x = Vec2::new(0.5 + (i as f64 + 0.5) * dx, 0.5 + (j as f64 + 0.5) * dy);
            let mut mp = MaterialPoint::new(x, dx * dy, Vec2::new(dx / 2.0, dy / 2.0));
            if j + 1 == ny {
                mp.sides.push(Side::Top);
            }
            out.push(mp);
        }
    }
    out
}

fn bcs() -> BoundaryConditions {
    BoundaryConditions {
        fixed: vec![FixedLine { normal: Axis::Y, at: 0.5, components: [true, true] }],
        tractions: vec![TractionBc { side: Side::Top, traction: [0.3, -2.0], range: None, curve: LoadCurve::Constant }],
        pressure: vec![PressureBc::Penalty { side: Side::Top, value: 0.1, gamma: Some(50.0) }],
        ..Default::default()
    }
}

/// Pre-deforms every point with a smooth field so the start state is not the reference.
fn predeform(mps: &mut [MaterialPoint], rng: &mut impl Rng) {
    let p = params();
    for mp in mps.iter_mut() {
        let f = Mat2::new(
            1.0 + rng.random_range(-0.01..0.01),
            rng.random_range(-0.01..0.01),
            rng.random_range(-0.01..0.01),
            1.0 + rng.random_range(-0.01..0.01),
        );
        mp.deformation_gradient = f;
        mp.elastic_strain = log_strain(&f).unwrap();
        mp.refresh(&p).unwrap();
    }
}

fn random_state(ctx: &StepContext, rng: &mut impl Rng, scale: f64) -> Vec<f64> {
    let nu = ctx.dofs.n_u();
    let mut x = ctx.initial_state(None);
    for (k, v) in x.iter_mut().enumerate() {
        if k >= nu {
            *v = rng.random_range(-1.0..1.0);
        } else if !ctx.dofs.u_fixed[k] {
            *v = scale * rng.random_range(-1.0..1.0);
        }
    }
    x
}

fn fd_check(kind: BasisKind, ghost: bool, seed: u64) -> f64 {
    let g = grids();
    let mut mps = block(&g, 2.2, 1.6, 2);
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    predeform(&mut mps, &mut rng);
    let ctx = StepContext::new(&g, &mps, &bcs(), config(kind, ghost), 0.1).unwrap();
    let x = random_state(&ctx, &mut rng, 2e-3);
    let (_, blocks) = ctx.evaluate(&x, true).unwrap();
    let jac = blocks.unwrap().full();
    let dir: Vec<f64> =
        (0..x.len()).map(|k| if k < ctx.dofs.n_u() { 1e-3 } else { 1.0 } * rng.random_range(-1.0..1.0)).collect();
    let eps = 1e-6;
    let xp: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + eps * d).collect();
    let xm: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a - eps * d).collect();
    let rp = ctx.evaluate(&xp, false).unwrap().0;
    let rm = ctx.evaluate(&xm, false).unwrap().0;
    let jd = jac.matvec(&dir);
    let nu = ctx.dofs.n_u();
    // compare each field separately, they carry different units
    let mut worst: f64 = 0.0;
    for range in [0..nu, nu..x.len()] {
        let fd: Vec<f64> = range.clone().map(|k| (rp[k] - rm[k]) / (2.0 * eps)).collect();
        let an: Vec<f64> = range.map(|k| jd[k]).collect();
        let diff: Vec<f64> = fd.iter().zip(&an).map(|(a, b)| a - b).collect();
        worst = worst.max(norm2(&diff) / norm2(&an));
    }
    worst
}

#[test]
fn jacobian_matches_finite_differences() {
    for seed in 0..5 {
        for kind in [BasisKind::Smpm, BasisKind::Gimpm] {
            for ghost in [false, true] {
                let err = fd_check(kind, ghost, seed);
                assert!(err < 1e-5, "{kind:?} ghost={ghost} seed={seed}: {err}");
            }
        }
    }
}

#[test]
fn unloaded_reference_has_zero_residual() {
    let g = grids();
    let mps = block(&g, 2.0, 1.5, 2);
    let mut cfg = config(BasisKind::Gimpm, true);
    cfg.material.body_force = Vec2::zeros();
    let ctx = StepContext::new(&g, &mps, &BoundaryConditions::default(), cfg, 0.1).unwrap();
    let (r, _) = ctx.evaluate(&ctx.initial_state(None), false).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn uniform_pressure_leaves_mass_rows_zero() {
    let g = grids();
    let mps = block(&g, 2.0, 1.5, 2);
    let mut cfg = config(BasisKind::Smpm, false);
    cfg.material.body_force = Vec2::zeros();
    let ctx = StepContext::new(&g, &mps, &BoundaryConditions::default(), cfg, 0.1).unwrap();
    let x = ctx.initial_state(Some(&vec![3.5; ctx.dofs.n_p()]));
    let (r, _) = ctx.evaluate(&x, false).unwrap();
    assert!(r[ctx.dofs.n_u()..].iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn single_point_stress_rows() {
    let g = grids();
    let mut mp = MaterialPoint::new(Vec2::new(1.3, 1.1), 0.2, Vec2::new(0.1, 0.1));
    let f = Mat2::new(1.01, 0.003, -0.002, 0.995);
    mp.deformation_gradient = f;
    mp.elastic_strain = log_strain(&f).unwrap();
    let mut cfg = config(BasisKind::Smpm, false);
    cfg.material.body_force = Vec2::zeros();
    mp.refresh(&cfg.material).unwrap();
    let mps = vec![mp.clone()];
    let ctx = StepContext::new(&g, &mps, &BoundaryConditions::default(), cfg, 0.1).unwrap();
    let (r, _) = ctx.evaluate(&ctx.initial_state(None), false).unwrap();
    let sigma = mp.effective_stress.inplane();
    for (node, _, grad) in ctx.samples[0].fine.iter() {
        let d = ctx.dofs.u_dof(node, 0).unwrap();
        let expect = mp.volume * (sigma * grad);
        assert!((r[d] - expect.x).abs() < 1e-12 && (r[d + 1] - expect.y).abs() < 1e-12);
    }
}

#[test]
fn coupling_blocks_are_transposes_at_small_strain() {
    let g = grids();
    let mps = block(&g, 2.2, 1.6, 2);
    let mut cfg = config(BasisKind::Gimpm, true);
    cfg.material.body_force = Vec2::zeros();
    let (rho_f, dt) = (cfg.material.rho_f0, cfg.dt);
    let ctx = StepContext::new(&g, &mps, &BoundaryConditions::default(), cfg, 0.1).unwrap();
    let (_, blocks) = ctx.evaluate(&ctx.initial_state(None), true).unwrap();
    let b = blocks.unwrap();
    // the mass equation is scaled by -Δt/ρ_f relative to the equilibrium one
    let diff = b.b1.transpose().add_scaled(&b.b2, dt / rho_f);
    assert!(diff.frobenius_norm() / b.b1.frobenius_norm() < 1e-8);
    assert!(b.c.asymmetry() < 1e-14);
    assert!(b.a.asymmetry() < 1e-12);
}

#[test]
fn ghost_terms_are_additive() {
    let g = grids();
    let mps = block(&g, 2.2, 1.6, 2);
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let on = StepContext::new(&g, &mps, &bcs(), config(BasisKind::Gimpm, true), 0.1).unwrap();
    let off = StepContext::new(&g, &mps, &bcs(), config(BasisKind::Gimpm, false), 0.1).unwrap();
    let x = random_state(&on, &mut rng, 1e-3);
    let bon = on.evaluate(&x, true).unwrap().1.unwrap();
    let boff = off.evaluate(&x, true).unwrap().1.unwrap();
    let da = bon.a.add_scaled(&boff.a, -1.0).add_scaled(&on.ghost_u, -1.0);
    let dc = bon.c.add_scaled(&boff.c, -1.0).add_scaled(&on.ghost_p, -1.0);
    assert!(da.max_abs() < 1e-12 && dc.max_abs() < 1e-12);
    assert!(on.ghost_u.frobenius_norm() > 0.0 && on.ghost_p.frobenius_norm() > 0.0);
    assert_eq!(bon.b1.to_dense(), boff.b1.to_dense());
}

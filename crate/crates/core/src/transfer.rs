//! Grid-to-point update of the material point state at the end of a step.

use crate::basis::ShapeSample;
use crate::error::{Error, Result};
use crate::material::kinematics::{b_from_strain, log_of_b, right_stretch};
use crate::material::{Elastic, Mat2, MaterialParams, MaterialPoint, PlasticityModel, SymTensor};
use crate::mesh::Vec2;

/// Maps converged nodal increments and pressures onto a material point.
///
/// `fine` holds start-of-step displacement-grid samples (they define `ΔF`);
/// `coarse` holds pressure-grid samples at the end-of-step position.
/// Half-lengths are capped componentwise at `lp_limit`.
pub fn g2p_update(
    mp: &MaterialPoint,
    fine: &ShapeSample,
    coarse: &ShapeSample,
    du: impl Fn(usize) -> Vec2,
    p: impl Fn(usize) -> f64,
    params: &MaterialParams,
    lp_limit: Vec2,
) -> Result<MaterialPoint> {
    let mut out = mp.clone();
    let mut inc = Vec2::zeros();
    let mut df = Mat2::identity();
    for (node, n, g) in fine.iter() {
        let d = du(node);
        inc += n * d;
        df += d * g.transpose();
    }
    let det = df.determinant();
    if !(det > 0.0) {
        return Err(Error::NonInvertibleF(det));
    }
    let bn = b_from_strain(&mp.elastic_strain);
    let b = SymTensor::from_parts(&(df * bn.inplane() * df.transpose()), bn.zz);
    let trial = log_of_b(&b)?;
    let mapped = Elastic.return_map(&trial, &mp.internal_vars, params)?;
    out.elastic_strain = mapped.elastic_strain;
    out.internal_vars = mapped.internal_vars;
    out.deformation_gradient = df * mp.deformation_gradient;
    out.refresh(params)?;
    out.displacement += inc;
    out.position += inc;
    out.pressure = coarse.interpolate(&p);
    update_domain_lengths(&mut out, lp_limit)?;
    Ok(out)
}

/// Stretches the particle half-lengths with the diagonal of the right stretch
/// tensor, never beyond `limit`.
pub fn update_domain_lengths(mp: &mut MaterialPoint, limit: Vec2) -> Result<()> {
    let u = right_stretch(&mp.deformation_gradient)?;
    let lp = Vec2::new(mp.initial_half_lengths.x * u[(0, 0)], mp.initial_half_lengths.y * u[(1, 1)]);
    mp.half_lengths = lp.inf(&limit);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{eval_basis, BasisKind};

    const FREE: Vec2 = Vec2::new(f64::INFINITY, f64::INFINITY);
    use crate::mesh::CartesianGrid;

    fn setup() -> (CartesianGrid, MaterialPoint, MaterialParams) {
        let g = CartesianGrid::new(Vec2::zeros(), Vec2::new(1.0, 1.0), [3, 3]).unwrap();
        let mp = MaterialPoint::new(Vec2::new(1.3, 1.6), 0.25, Vec2::new(0.25, 0.25));
        (g, mp, MaterialParams { k: 10.0, g_shear: 5.0, ..MaterialParams::default() })
    }

    #[test]
    fn uniform_increment_translates() {
        let (g, mp, p) = setup();
        for kind in [BasisKind::Smpm, BasisKind::Gimpm] {
            let s = eval_basis(&g, kind, mp.position, mp.half_lengths).unwrap();
            let d = Vec2::new(0.01, -0.02);
            let out = g2p_update(&mp, &s, &s, |_| d, |_| 4.0, &p, FREE).unwrap();
            assert!((out.displacement - d).norm() < 1e-15);
            assert!((out.position - mp.position - d).norm() < 1e-15);
            assert!((out.pressure - 4.0).abs() < 1e-14);
            assert!((out.deformation_gradient - Mat2::identity()).norm() < 1e-15);
        }
    }

    #[test]
    fn affine_field_is_reproduced() {
        let (g, mut mp, p) = setup();
        mp.deformation_gradient = Mat2::new(1.02, 0.01, 0.0, 0.99);
        mp.elastic_strain = crate::material::log_strain(&mp.deformation_gradient).unwrap();
        mp.refresh(&p).unwrap();
        let grad = Mat2::new(0.01, -0.004, 0.006, -0.02);
        let s = eval_basis(&g, BasisKind::Smpm, mp.position, mp.half_lengths).unwrap();
        let du = |n: usize| grad * g.node_position(g.node_id(n));
        let out = g2p_update(&mp, &s, &s, du, |_| 0.0, &p, FREE).unwrap();
        let expect = (Mat2::identity() + grad) * mp.deformation_gradient;
        assert!((out.deformation_gradient - expect).norm() < 1e-14);
        assert!((out.volume / out.initial_volume - out.j).abs() < 1e-15);
        let again = g2p_update(&mp, &s, &s, du, |_| 0.0, &p, FREE).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn domain_lengths_follow_stretch() {
        let (_, mut mp, _) = setup();
        update_domain_lengths(&mut mp, FREE).unwrap();
        assert_eq!(mp.half_lengths, mp.initial_half_lengths);
        mp.deformation_gradient = Mat2::new(2.0, 0.0, 0.0, 1.0);
        update_domain_lengths(&mut mp, FREE).unwrap();
        assert!((mp.half_lengths - Vec2::new(0.5, 0.25)).norm() < 1e-14);
        let t: f64 = 0.7;
        mp.deformation_gradient = Mat2::new(t.cos(), -t.sin(), t.sin(), t.cos());
        update_domain_lengths(&mut mp, FREE).unwrap();
        assert!((mp.half_lengths - mp.initial_half_lengths).norm() < 1e-14);
        mp.deformation_gradient = Mat2::new(3.0, 0.0, 0.0, 1.0);
        update_domain_lengths(&mut mp, Vec2::new(0.5, 0.5)).unwrap();
        assert_eq!(mp.half_lengths, Vec2::new(0.5, 0.25));
    }
}

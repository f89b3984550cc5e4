//! A block under uniform top load on rollers has a homogeneous (affine)
//! exact solution, which the face penalties must leave untouched.

mod common;

use common::{affine_defect, solve_patch};

#[test]
fn affine_solution_is_unchanged_by_face_penalties() {
    let e = 9.0 * 1000.0 * 500.0 / (3.0 * 1000.0 + 500.0);
    let plain = solve_patch(0.0, 0.0);
    let stabilised = solve_patch(0.1 * e, 0.1 * 1.0e-3 / 9.81);
    let scale = plain.iter().map(|m| m.displacement.norm()).fold(0.0, f64::max);
    assert!(scale > 1e-4, "patch did not deform");
    let defect = affine_defect(&plain);
    assert!(defect < 1e-8 * scale.max(1.0), "plain solution is not affine: defect {defect:e}, scale {scale:e}");
    for (a, b) in plain.iter().zip(&stabilised) {
        assert!((a.displacement - b.displacement).norm() < 1e-8, "{:?} vs {:?}", a.displacement, b.displacement);
        assert!((a.pressure - b.pressure).abs() < 1e-8 * 10.0);
    }
}

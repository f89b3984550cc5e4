#![allow(dead_code)]

use std::path::PathBuf;

use ghostmpm::app::{parse_config, parse_config_str, run_config, SimulationConfig};
use ghostmpm::material::MaterialPoint;

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub fn packaged(name: &str) -> SimulationConfig {
    parse_config(config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn config_text(name: &str) -> String {
    std::fs::read_to_string(config_path(name)).unwrap()
}

/// A block under uniform top load on rollers. Its exact solution is
/// homogeneous, so the displacement is affine in the reference position.
pub const PATCH: &str = r#"
basis = "gimpm"

[material]
K = 1000.0
G = 500.0
n0 = 0.5
kappa0 = 1.0e-3
rho_s0 = 1.0
rho_f0 = 1.0
g = 9.81

[geometry]
kind = "rectangle"
lower = [1.0, 1.0]
upper = [3.5, 2.5]

[grid]
origin = [0.0, 0.0]
spacing = [1.0, 1.0]
counts = [6, 4]

[seeding]
per_direction = 2

[ghost]
gamma_a = GA
gamma_c = GC

[[boundary.fixed]]
normal = "X"
at = 1.0
components = [true, false]

[[boundary.fixed]]
normal = "Y"
at = 1.0
components = [false, true]

[[boundary.tractions]]
side = "top"
traction = [0.0, -10.0]

[time]
kind = "fixed"
dt = 1.0
steps = 1
"#;

pub fn solve_patch(ga: f64, gc: f64) -> Vec<MaterialPoint> {
    let text = PATCH.replace("GA", &format!("{ga:e}")).replace("GC", &format!("{gc:e}"));
    let cfg = parse_config_str(&text).unwrap();
    run_config(&cfg, false).unwrap().final_mps
}

/// Largest deviation of the displacement from its least-squares affine fit.
pub fn affine_defect(mps: &[MaterialPoint]) -> f64 {
    let rows: Vec<[f64; 3]> = mps.iter().map(|m| [1.0, m.reference_position.x, m.reference_position.y]).collect();
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let mut worst: f64 = 0.0;
    for c in 0..2 {
        let b = nalgebra::DVector::from_iterator(mps.len(), mps.iter().map(|m| m.displacement[c]));
        let coef = a.clone().svd(true, true).solve(&b, 1e-14).unwrap();
        worst = worst.max((&a * coef - b).amax());
    }
    worst
}

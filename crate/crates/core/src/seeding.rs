//! Initial material point layouts.

use serde::{Deserialize, Serialize};

use crate::error::ValidationIssue;
use crate::material::MaterialPoint;
use crate::mesh::{CartesianGrid, Side, Vec2};

/// Region initially occupied by the material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// Axis-aligned box; its edges are expected to fall on the fine lattice.
    Rectangle { lower: [f64; 2], upper: [f64; 2] },
    /// Lower half of an ellipse: points with `y ≤ center.y` inside the ellipse.
    HalfEllipse { center: [f64; 2], radii: [f64; 2] },
}

impl Geometry {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ValidationIssue>) {
        match self {
            Geometry::Rectangle { lower, upper } => {
                for k in 0..2 {
                    if !(upper[k] > lower[k]) {
                        issues.push(ValidationIssue::new(
                            format!("{prefix}upper"),
                            "must exceed lower in every component",
                        ));
                    }
                }
            }
            Geometry::HalfEllipse { radii, .. } => {
                if !(radii[0] > 0.0 && radii[1] > 0.0) {
                    issues.push(ValidationIssue::new(format!("{prefix}radii"), "must be positive"));
                }
            }
        }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        match self {
            Geometry::Rectangle { lower, upper } => {
                x.x >= lower[0] && x.x <= upper[0] && x.y >= lower[1] && x.y <= upper[1]
            }
            Geometry::HalfEllipse { center, radii } => {
                let (dx, dy) = ((x.x - center[0]) / radii[0], (x.y - center[1]) / radii[1]);
                x.y <= center[1] && dx * dx + dy * dy <= 1.0
            }
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        match self {
            Geometry::Rectangle { lower, upper } => (Vec2::from(*lower), Vec2::from(*upper)),
            Geometry::HalfEllipse { center, radii } => {
                (Vec2::new(center[0] - radii[0], center[1] - radii[1]), Vec2::new(center[0] + radii[0], center[1]))
            }
        }
    }

    pub fn translated(&self, d: Vec2) -> Geometry {
        match self {
            Geometry::Rectangle { lower, upper } => {
                Geometry::Rectangle { lower: [lower[0] + d.x, lower[1] + d.y], upper: [upper[0] + d.x, upper[1] + d.y] }
            }
            Geometry::HalfEllipse { center, radii } => {
                Geometry::HalfEllipse { center: [center[0] + d.x, center[1] + d.y], radii: *radii }
            }
        }
    }
}

/// Places `per` points per direction in every fine cell of a lattice.
///
/// Rectangles are filled from their lower corner; other shapes use the
/// lattice of `fine` shifted by `shift`, keeping the points inside. Every
/// point gets volume `d_x d_y` and half-lengths `d/2`, with `d = h_fine/per`.
/// Points in the outermost layer of a rectangle are tagged with that side.
pub fn seed_material_points(fine: &CartesianGrid, geometry: &Geometry, per: usize, shift: Vec2) -> Vec<MaterialPoint> {
    let h = fine.spacing();
    let d = Vec2::new(h.x / per as f64, h.y / per as f64);
    let lp = d / 2.0;
    let mut out = Vec::new();
    match geometry.translated(shift) {
        Geometry::Rectangle { lower, upper } => {
            let nx = ((upper[0] - lower[0]) / d.x).round() as usize;
            let ny = ((upper[1] - lower[1]) / d.y).round() as usize;
            for j in 0..ny {
                for i in 0..nx {
                    let x = Vec2::new(lower[0] + (i as f64 + 0.5) * d.x, lower[1] + (j as f64 + 0.5) * d.y);
                    let mut mp = MaterialPoint::new(x, d.x * d.y, lp);
                    if i == 0 {
                        mp.sides.push(Side::Left);
                    }
                    if i + 1 == nx {
                        mp.sides.push(Side::Right);
                    }
                    if j == 0 {
                        mp.sides.push(Side::Bottom);
                    }
                    if j + 1 == ny {
                        mp.sides.push(Side::Top);
                    }
                    out.push(mp);
                }
            }
        }
        shape => {
            let (lo, hi) = shape.bounds();
            let o = fine.origin() + shift;
            let i0 = ((lo.x - o.x) / d.x).floor() as i64 - 1;
            let i1 = ((hi.x - o.x) / d.x).ceil() as i64 + 1;
            let j0 = ((lo.y - o.y) / d.y).floor() as i64 - 1;
            let j1 = ((hi.y - o.y) / d.y).ceil() as i64 + 1;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let x = Vec2::new(o.x + (i as f64 + 0.5) * d.x, o.y + (j as f64 + 0.5) * d.y);
                    if shape.contains(x) {
                        out.push(MaterialPoint::new(x, d.x * d.y, lp));
                    }
                }
            }
        }
    }
    out
}

/// True when some point sits on a grid line (within `1e-9` cell widths).
pub fn any_on_grid_line(grid: &CartesianGrid, mps: &[MaterialPoint]) -> bool {
    let (o, h) = (grid.origin(), grid.spacing());
    mps.iter().any(|mp| {
        (0..2).any(|k| {
            let s = (mp.position[k] - o[k]) / h[k];
            (s - s.round()).abs() < 1e-9
        })
    })
}

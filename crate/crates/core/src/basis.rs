//! sMPM and GIMPM shape functions on a Cartesian grid.
//!
//! Both families are tensor products of 1D functions. GIMPM functions are
//! the hat function convolved with a particle indicator of half-length
//! `lp`, which makes them C¹ with a support of `h + lp` about each node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{CartesianGrid, ElementId, NodeId, Vec2, LINE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Smpm,
    Gimpm,
}

/// Basis values and spatial gradients of every node supporting one point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShapeSample {
    pub node_ids: Vec<NodeId>,
    /// Linear node indices on the evaluating grid, parallel to `node_ids`.
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec2>,
}

impl ShapeSample {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, Vec2)> + '_ {
        self.nodes.iter().zip(&self.values).zip(&self.gradients).map(|((&n, &v), &g)| (n, v, g))
    }

    /// Interpolates a nodal scalar field indexed by linear node index.
    pub fn interpolate(&self, nodal: impl Fn(usize) -> f64) -> f64 {
        self.iter().map(|(n, v, _)| v * nodal(n)).sum()
    }

    pub fn interpolate_gradient(&self, nodal: impl Fn(usize) -> f64) -> Vec2 {
        self.iter().map(|(n, _, g)| g * nodal(n)).sum()
    }
}

/// Linear hat function centred on a node, `xi = x - x_node`.
pub fn smpm_1d(xi: f64, h: f64) -> (f64, f64) {
    if xi > -h && xi <= 0.0 {
        (1.0 + xi / h, 1.0 / h)
    } else if xi > 0.0 && xi <= h {
        (1.0 - xi / h, -1.0 / h)
    } else {
        (0.0, 0.0)
    }
}

/// Five-branch GIMPM function, `xi = x_particle - x_node`.
pub fn gimp_1d(xi: f64, h: f64, lp: f64) -> (f64, f64) {
    let hl = h * lp;
    if xi <= -h - lp || xi > h + lp {
        (0.0, 0.0)
    } else if xi <= -h + lp {
        let s = h + lp + xi;
        (s * s / (4.0 * hl), s / (2.0 * hl))
    } else if xi <= -lp {
        (1.0 + xi / h, 1.0 / h)
    } else if xi <= lp {
        (1.0 - xi * xi / (2.0 * hl) - lp / (2.0 * h), -xi / hl)
    } else if xi <= h - lp {
        (1.0 - xi / h, -1.0 / h)
    } else {
        let s = h + lp - xi;
        (s * s / (4.0 * hl), -s / (2.0 * hl))
    }
}

/// Checks `0 < lp <= h/2` per axis.
pub fn check_half_lengths(grid: &CartesianGrid, lp: Vec2) -> Result<()> {
    let h = grid.spacing();
    for ax in 0..2 {
        if !(lp[ax] > 0.0 && lp[ax] <= 0.5 * h[ax] * (1.0 + 1e-12)) {
            return Err(Error::InvalidHalfLength { lp: lp[ax], h: h[ax] });
        }
    }
    Ok(())
}

/// Bilinear Lagrange functions of element `e` evaluated at `x`.
///
/// The point need not lie inside `e`; the element's polynomial is simply
/// extended, which gives one-sided gradients on facets.
pub fn element_shape(grid: &CartesianGrid, e: ElementId, x: Vec2) -> ShapeSample {
    let (lo, _) = grid.element_bounds(e);
    let h = grid.spacing();
    let s = (x.x - lo.x) / h.x;
    let t = (x.y - lo.y) / h.y;
    let wx = [(1.0 - s, -1.0 / h.x), (s, 1.0 / h.x)];
    let wy = [(1.0 - t, -1.0 / h.y), (t, 1.0 / h.y)];
    let mut out = ShapeSample::default();
    for (dj, &(vy, gy)) in wy.iter().enumerate() {
        for (di, &(vx, gx)) in wx.iter().enumerate() {
            let id = NodeId::new(e.i + di, e.j + dj);
            out.node_ids.push(id);
            out.nodes.push(grid.node_index(id));
            out.values.push(vx * vy);
            out.gradients.push(Vec2::new(gx * vy, vx * gy));
        }
    }
    out
}

/// Evaluates all nonzero basis functions at `x`.
///
/// `lp` is the particle half-length and is ignored for sMPM. sMPM uses the
/// bilinear functions of the element returned by `locate_element`, so a
/// point on a facet gets a consistent one-sided gradient.
pub fn eval_basis(grid: &CartesianGrid, kind: BasisKind, x: Vec2, lp: Vec2) -> Result<ShapeSample> {
    match kind {
        BasisKind::Smpm => {
            let e = grid.locate_element(x)?;
            Ok(element_shape(grid, e, x))
        }
        BasisKind::Gimpm => eval_gimp(grid, x, lp),
    }
}

fn eval_gimp(grid: &CartesianGrid, x: Vec2, lp: Vec2) -> Result<ShapeSample> {
    check_half_lengths(grid, lp)?;
    let (lo, hi) = grid.clip_box(x - lp, x + lp)?;
    let (x, lp) = ((lo + hi) * 0.5, (hi - lo) * 0.5);
    let h = grid.spacing();
    let o = grid.origin();
    let nn = grid.node_counts();
    let mut axis_terms: [Vec<(usize, f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for ax in 0..2 {
        let reach = h[ax] + lp[ax];
        let first = ((x[ax] - reach - o[ax]) / h[ax]).floor().max(0.0) as usize;
        let last = (((x[ax] + reach - o[ax]) / h[ax]).ceil() as usize).min(nn[ax] - 1);
        for k in first..=last {
            let xi = x[ax] - (o[ax] + k as f64 * h[ax]);
            if xi.abs() >= h[ax] + lp[ax] - LINE_TOLERANCE * h[ax] {
                continue;
            }
            let (v, d) = gimp_1d(xi, h[ax], lp[ax]);
            if v > 0.0 {
                axis_terms[ax].push((k, v, d));
            }
        }
    }
    let mut out = ShapeSample::default();
    for &(j, vy, dy) in &axis_terms[1] {
        for &(i, vx, dx) in &axis_terms[0] {
            let id = NodeId::new(i, j);
            out.node_ids.push(id);
            out.nodes.push(grid.node_index(id));
            out.values.push(vx * vy);
            out.gradients.push(Vec2::new(dx * vy, vx * dy));
        }
    }
    Ok(out)
}

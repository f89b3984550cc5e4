//! Measures of spurious pressure oscillations on the pressure grid.

use std::collections::BTreeSet;

use crate::ghost::{gauss_legendre, ghost_matrix_for_grid};
use crate::mesh::{Axis, CartesianGrid, ElementId, FacetId, NodeId};

/// Interior facets shared by two elements of `active`.
pub fn interior_facets(grid: &CartesianGrid, active: &BTreeSet<ElementId>) -> Vec<FacetId> {
    let mut out = Vec::new();
    for &e in active {
        for axis in Axis::BOTH {
            let f = grid.element_facets(e)[2 * axis.index() + 1];
            if let (Some(lo), Some(hi)) = grid.facet_elements(f) {
                if lo == e && active.contains(&hi) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// `‖p‖²` over the active elements (2×2 Gauss, exact for bilinear fields).
pub fn l2_norm_squared(grid: &CartesianGrid, active: &BTreeSet<ElementId>, p: &[f64]) -> f64 {
    let rule = gauss_legendre(2);
    let h = grid.spacing();
    let mut sum = 0.0;
    for &e in active {
        let nodes = grid.element_nodes(e).map(|n| p[grid.node_index(n)]);
        for &(sx, wx) in &rule {
            for &(sy, wy) in &rule {
                let (x, y) = (0.5 * (sx + 1.0), 0.5 * (sy + 1.0));
                let v = nodes[0] * (1.0 - x) * (1.0 - y)
                    + nodes[1] * x * (1.0 - y)
                    + nodes[2] * x * y
                    + nodes[3] * (1.0 - x) * y;
                sum += v * v * wx * wy * 0.25 * h.x * h.y;
            }
        }
    }
    sum
}

/// `Σ_F h ∫_F [[∂ₙp]]² da / ‖p‖²` over interior facets of the active region.
///
/// `p` is indexed by linear node index of `grid`. Returns 0 for a zero field.
pub fn pressure_jump_seminorm(grid: &CartesianGrid, active: &BTreeSet<ElementId>, p: &[f64]) -> f64 {
    let facets = interior_facets(grid, active);
    let m = ghost_matrix_for_grid(grid, &facets, 1.0, 2);
    let jump: f64 = p.iter().zip(m.matvec(p)).map(|(a, b)| a * b).sum();
    let norm = l2_norm_squared(grid, active, p);
    if norm > 0.0 {
        jump.max(0.0) / norm
    } else {
        0.0
    }
}

/// Nodes of `active` whose four axis neighbours are all active nodes.
fn interior_nodes(grid: &CartesianGrid, active: &BTreeSet<ElementId>) -> Vec<(usize, [usize; 4])> {
    let mut owned = vec![0u8; grid.node_count()];
    for &e in active {
        for n in grid.element_nodes(e) {
            owned[grid.node_index(n)] += 1;
        }
    }
    let [nx, ny] = grid.node_counts();
    let mut out = Vec::new();
    for j in 1..ny.saturating_sub(1) {
        for i in 1..nx.saturating_sub(1) {
            let k = grid.node_index(NodeId::new(i, j));
            if owned[k] == 4 {
                let nb = [
                    grid.node_index(NodeId::new(i - 1, j)),
                    grid.node_index(NodeId::new(i + 1, j)),
                    grid.node_index(NodeId::new(i, j - 1)),
                    grid.node_index(NodeId::new(i, j + 1)),
                ];
                out.push((k, nb));
            }
        }
    }
    out
}

/// Fraction of interior nodes that are strict local extrema against all four
/// axis neighbours, with a noise floor of `1e-6 max|p|`.
pub fn checkerboard_fraction(grid: &CartesianGrid, active: &BTreeSet<ElementId>, p: &[f64]) -> f64 {
    let nodes = interior_nodes(grid, active);
    if nodes.is_empty() {
        return 0.0;
    }
    let floor = 1e-6 * p.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let count = nodes
        .iter()
        .filter(|(k, nb)| {
            let v = p[*k];
            nb.iter().all(|&m| v > p[m] + floor) || nb.iter().all(|&m| v < p[m] - floor)
        })
        .count();
    count as f64 / nodes.len() as f64
}

/// A checkerboard is flagged when more than 10% of interior nodes are local extrema.
pub fn has_checkerboard(grid: &CartesianGrid, active: &BTreeSet<ElementId>, p: &[f64]) -> bool {
    checkerboard_fraction(grid, active, p) > 0.1
}

/// Smooth reference field: `sweeps` damped Jacobi passes (weight 1/2).
///
/// Each active node is pulled toward the mean of its axis-neighbour pairs,
/// using only axes where both neighbours are active. Linear fields are fixed
/// points; corner nodes keep their values.
pub fn smoothed_reference(grid: &CartesianGrid, active: &BTreeSet<ElementId>, p: &[f64], sweeps: usize) -> Vec<f64> {
    let mut on = vec![false; grid.node_count()];
    for &e in active {
        for n in grid.element_nodes(e) {
            on[grid.node_index(n)] = true;
        }
    }
    let [nx, ny] = grid.node_counts();
    let mut stencils: Vec<(usize, Vec<[usize; 2]>)> = Vec::new();
    for k in 0..grid.node_count() {
        if !on[k] {
            continue;
        }
        let id = grid.node_id(k);
        let mut pairs = Vec::new();
        if id.i > 0 && id.i + 1 < nx {
            let pair = [grid.node_index(NodeId::new(id.i - 1, id.j)), grid.node_index(NodeId::new(id.i + 1, id.j))];
            if on[pair[0]] && on[pair[1]] {
                pairs.push(pair);
            }
        }
        if id.j > 0 && id.j + 1 < ny {
            let pair = [grid.node_index(NodeId::new(id.i, id.j - 1)), grid.node_index(NodeId::new(id.i, id.j + 1))];
            if on[pair[0]] && on[pair[1]] {
                pairs.push(pair);
            }
        }
        if !pairs.is_empty() {
            stencils.push((k, pairs));
        }
    }
    let mut cur = p.to_vec();
    for _ in 0..sweeps {
        let prev = cur.clone();
        for (k, pairs) in &stencils {
            let mean = pairs.iter().map(|q| 0.5 * (prev[q[0]] + prev[q[1]])).sum::<f64>() / pairs.len() as f64;
            cur[*k] = 0.5 * prev[*k] + 0.5 * mean;
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Vec2;

    fn patch(n: usize, h: f64) -> (CartesianGrid, BTreeSet<ElementId>) {
        let g = CartesianGrid::new(Vec2::zeros(), Vec2::new(h, h), [n, n]).unwrap();
        let a = g.elements().collect();
        (g, a)
    }

    fn field(g: &CartesianGrid, f: impl Fn(NodeId, Vec2) -> f64) -> Vec<f64> {
        (0..g.node_count()).map(|k| f(g.node_id(k), g.node_position(g.node_id(k)))).collect()
    }

    #[test]
    fn constant_and_affine_fields_vanish() {
        let (g, a) = patch(4, 0.5);
        assert!(pressure_jump_seminorm(&g, &a, &field(&g, |_, _| 3.0)) < 1e-14);
        let aff = field(&g, |_, x| 1.0 + 2.0 * x.x - 0.7 * x.y);
        assert!(pressure_jump_seminorm(&g, &a, &aff) < 1e-14);
        assert!(!has_checkerboard(&g, &a, &aff));
    }

    #[test]
    fn checkerboard_on_two_by_two_patch() {
        // per interior facet ∫(4 - 8s)² ds = 16/3, four facets; ‖p‖² = 4/9
        let (g, a) = patch(2, 1.0);
        let cb = field(&g, |n, _| if (n.i + n.j) % 2 == 0 { 1.0 } else { -1.0 });
        assert!((pressure_jump_seminorm(&g, &a, &cb) - 48.0).abs() < 1e-12);
        assert!(has_checkerboard(&g, &a, &cb));
    }

    #[test]
    fn smoothing_reduces_checkerboard() {
        let (g, a) = patch(6, 1.0);
        let cb = field(&g, |n, x| x.y + if (n.i + n.j) % 2 == 0 { 0.3 } else { -0.3 });
        let s = smoothed_reference(&g, &a, &cb, 20);
        let (before, after) = (pressure_jump_seminorm(&g, &a, &cb), pressure_jump_seminorm(&g, &a, &s));
        assert!(after < 0.1 * before, "{after} vs {before}");
        assert!(!has_checkerboard(&g, &a, &s));
        let lin = field(&g, |_, x| 0.25 * x.y - 0.5 * x.x);
        let sl = smoothed_reference(&g, &a, &lin, 5);
        assert!(sl.iter().zip(&lin).all(|(u, v)| (u - v).abs() < 1e-12));
    }
}

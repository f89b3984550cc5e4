//! Boundary-element and facet selection plus the face ghost penalty matrix.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::basis::element_shape;
use crate::error::ValidationIssue;
use crate::mesh::{ActiveSets, CartesianGrid, ElementId, FacetId, Vec2};
use crate::sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GhostParams {
    /// Scale of the displacement-equation penalty (stress units).
    pub gamma_a: f64,
    /// Scale of the mass-equation penalty (units of κ/g).
    pub gamma_c: f64,
    /// Gauss–Legendre points per facet.
    pub quadrature_order: usize,
}

impl Default for GhostParams {
    fn default() -> Self {
        Self { gamma_a: 0.0, gamma_c: 0.0, quadrature_order: 2 }
    }
}

impl GhostParams {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ValidationIssue>) {
        if !(self.gamma_a >= 0.0) {
            issues.push(ValidationIssue::new(format!("{prefix}gamma_a"), "must be non-negative"));
        }
        if !(self.gamma_c >= 0.0) {
            issues.push(ValidationIssue::new(format!("{prefix}gamma_c"), "must be non-negative"));
        }
        if !(1..=4).contains(&self.quadrature_order) {
            issues.push(ValidationIssue::new(format!("{prefix}quadrature_order"), "must be between 1 and 4"));
        }
    }
}

/// Gauss–Legendre points and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    match order {
        1 => vec![(0.0, 2.0)],
        2 => {
            let a = 1.0 / 3f64.sqrt();
            vec![(-a, 1.0), (a, 1.0)]
        }
        3 => {
            let a = (0.6f64).sqrt();
            vec![(-a, 5.0 / 9.0), (0.0, 8.0 / 9.0), (a, 5.0 / 9.0)]
        }
        4 => {
            let s = (6.0f64 / 5.0).sqrt() * 2.0;
            let (a, b) = (((3.0 - s) / 7.0).sqrt(), ((3.0 + s) / 7.0).sqrt());
            let wa = (18.0 + 30f64.sqrt()) / 36.0;
            let wb = (18.0 - 30f64.sqrt()) / 36.0;
            vec![(-b, wb), (-a, wa), (a, wa), (b, wb)]
        }
        _ => panic!("unsupported Gauss-Legendre order {order}"),
    }
}

fn facet_neighbours(grid: &CartesianGrid, e: ElementId) -> impl Iterator<Item = (FacetId, ElementId)> + '_ {
    grid.element_facets(e).into_iter().filter_map(move |f| {
        let (lo, hi) = grid.facet_elements(f);
        let other = if lo == Some(e) { hi } else { lo };
        other.map(|o| (f, o))
    })
}

/// Active elements sharing at least one facet with an inactive element.
pub fn select_boundary_elements(
    active: &BTreeSet<ElementId>,
    inactive: &BTreeSet<ElementId>,
    grid: &CartesianGrid,
) -> Vec<ElementId> {
    active.iter().copied().filter(|&e| facet_neighbours(grid, e).any(|(_, n)| inactive.contains(&n))).collect()
}

/// Facets joining a boundary element to another boundary element or to an
/// active interior element, each listed once in lattice order.
pub fn select_ghost_facets(boundary: &[ElementId], active: &BTreeSet<ElementId>, grid: &CartesianGrid) -> Vec<FacetId> {
    let in_boundary: BTreeSet<ElementId> = boundary.iter().copied().collect();
    let mut facets = BTreeSet::new();
    for &e in boundary {
        for (f, n) in facet_neighbours(grid, e) {
            let interior = active.contains(&n) && !in_boundary.contains(&n);
            if in_boundary.contains(&n) || interior {
                facets.insert(f);
            }
        }
    }
    facets.into_iter().collect()
}

/// Fills the boundary and ghost-facet lists of an active set.
pub fn mark_ghost_facets(sets: &mut ActiveSets, grid: &CartesianGrid) {
    sets.boundary = select_boundary_elements(&sets.active, &sets.inactive, grid);
    sets.ghost_facets = select_ghost_facets(&sets.boundary, &sets.active, grid);
}

/// `scale · length_scale · ∫ [[∂ₙN_a]] [[∂ₙN_b]] da` over the given facets,
/// indexed by linear node index.
///
/// The normal-gradient jump is taken from the bilinear Lagrange functions of
/// the two elements sharing the facet.
pub fn assemble_ghost_matrix(
    grid: &CartesianGrid,
    facets: &[FacetId],
    scale: f64,
    length_scale: impl Fn(FacetId) -> f64,
    quadrature_order: usize,
) -> CsrMatrix {
    let n = grid.node_count();
    let mut t = TripletBuilder::new(n, n);
    if scale == 0.0 {
        return t.build();
    }
    let rule = gauss_legendre(quadrature_order);
    for &f in facets {
        let (Some(lo), Some(hi)) = grid.facet_elements(f) else {
            continue;
        };
        let ax = f.axis.index();
        let [a, b] = grid.facet_nodes(f);
        let (pa, pb) = (grid.node_position(a), grid.node_position(b));
        let len = (pb - pa).norm();
        let factor = scale * length_scale(f);
        for &(s, w) in &rule {
            let x: Vec2 = pa + (pb - pa) * (0.5 * (s + 1.0));
            let mut jump: Vec<(usize, f64)> = Vec::with_capacity(6);
            for (e, sign) in [(hi, 1.0), (lo, -1.0)] {
                let sample = element_shape(grid, e, x);
                for (node, _, g) in sample.iter() {
                    let v = sign * g[ax];
                    match jump.iter_mut().find(|(m, _)| *m == node) {
                        Some(entry) => entry.1 += v,
                        None => jump.push((node, v)),
                    }
                }
            }
            let wq = factor * w * 0.5 * len;
            for &(i, ji) in &jump {
                for &(j, jj) in &jump {
                    t.push(i, j, wq * ji * jj);
                }
            }
        }
    }
    t.build()
}

/// Ghost matrix using the grid spacing across each facet as length scale.
pub fn ghost_matrix_for_grid(grid: &CartesianGrid, facets: &[FacetId], scale: f64, order: usize) -> CsrMatrix {
    let h = grid.spacing();
    assemble_ghost_matrix(grid, facets, scale, |f| h[f.axis.index()], order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Axis, NodeId};

    fn grid(n: usize) -> CartesianGrid {
        CartesianGrid::new(Vec2::zeros(), Vec2::new(1.0, 1.0), [n, n]).unwrap()
    }

    fn sets_of(g: &CartesianGrid, cells: &[(usize, usize)]) -> ActiveSets {
        let mut s = ActiveSets::from_active(g, cells.iter().map(|&(i, j)| ElementId::new(i, j)).collect());
        mark_ghost_facets(&mut s, g);
        s
    }

    #[test]
    fn single_element_fixture() {
        let g = grid(5);
        let s = sets_of(&g, &[(2, 2)]);
        assert_eq!(s.boundary, vec![ElementId::new(2, 2)]);
        assert!(s.ghost_facets.is_empty());
    }

    #[test]
    fn two_by_one_fixture() {
        let g = grid(5);
        let s = sets_of(&g, &[(1, 2), (2, 2)]);
        assert_eq!(s.boundary, vec![ElementId::new(1, 2), ElementId::new(2, 2)]);
        assert_eq!(s.ghost_facets, vec![FacetId { axis: Axis::X, i: 2, j: 2 }]);
    }

    #[test]
    fn three_by_three_fixture() {
        let g = grid(7);
        let cells: Vec<_> = (2..5).flat_map(|i| (2..5).map(move |j| (i, j))).collect();
        let s = sets_of(&g, &cells);
        assert_eq!(s.boundary.len(), 8);
        assert!(!s.boundary.contains(&ElementId::new(3, 3)));
        assert_eq!(s.ghost_facets.len(), 12);
        let mut expected = BTreeSet::new();
        for i in 2..5 {
            for j in 2..4 {
                expected.insert(FacetId::between(ElementId::new(i, j), Axis::Y));
                expected.insert(FacetId::between(ElementId::new(j, i), Axis::X));
            }
        }
        assert_eq!(s.ghost_facets.iter().copied().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn fully_active_grid_has_no_boundary() {
        let g = grid(3);
        let cells: Vec<_> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
        let s = sets_of(&g, &cells);
        assert!(s.boundary.is_empty() && s.ghost_facets.is_empty());
    }

    #[test]
    fn hat_field_energy() {
        let g = grid(2);
        let f = FacetId { axis: Axis::X, i: 1, j: 0 };
        let m = ghost_matrix_for_grid(&g, &[f], 1.0, 2);
        let mut v = vec![0.0; g.node_count()];
        v[g.node_index(NodeId::new(1, 0))] = 1.0;
        v[g.node_index(NodeId::new(1, 1))] = 1.0;
        let e: f64 = v.iter().zip(m.matvec(&v)).map(|(a, b)| a * b).sum();
        assert!((e - 4.0).abs() < 1e-12);
    }

    #[test]
    fn affine_kernel_and_psd() {
        let g = grid(4);
        let cells: Vec<_> = (0..4).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
        let s = sets_of(&g, &cells);
        let m = ghost_matrix_for_grid(&g, &s.ghost_facets, 2.5, 2);
        assert!(m.asymmetry() < 1e-15);
        let affine: Vec<f64> = (0..g.node_count())
            .map(|k| {
                let p = g.node_position(g.node_id(k));
                1.5 - 2.0 * p.x + 0.7 * p.y
            })
            .collect();
        let r = m.matvec(&affine);
        assert!(r.iter().all(|v| v.abs() < 1e-10));
        let eig = m.to_dense().symmetric_eigenvalues();
        assert!(eig.iter().all(|&l| l > -1e-10));
    }
}

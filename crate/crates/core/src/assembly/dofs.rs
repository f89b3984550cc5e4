//! Degree-of-freedom numbering for the displacement and pressure fields.

use crate::mesh::{ActiveSets, CartesianGrid};

/// Maps active grid nodes to contiguous unknowns.
///
/// Displacement dofs come first (`2k`, `2k+1` for the `k`-th active fine
/// node), followed by one pressure dof per active coarse node.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub fine_nodes: Vec<usize>,
    pub coarse_nodes: Vec<usize>,
    fine_map: Vec<Option<usize>>,
    coarse_map: Vec<Option<usize>>,
    /// Per displacement dof: held at a zero increment.
    pub u_fixed: Vec<bool>,
    /// Per pressure dof: prescribed value, if any.
    pub p_fixed: Vec<Option<f64>>,
}

impl DofLayout {
    pub fn new(fine: &CartesianGrid, fine_sets: &ActiveSets, coarse: &CartesianGrid, coarse_sets: &ActiveSets) -> Self {
        let fine_nodes = fine_sets.active_nodes(fine);
        let coarse_nodes = coarse_sets.active_nodes(coarse);
        let mut fine_map = vec![None; fine.node_count()];
        for (k, &n) in fine_nodes.iter().enumerate() {
            fine_map[n] = Some(k);
        }
        let mut coarse_map = vec![None; coarse.node_count()];
        for (k, &n) in coarse_nodes.iter().enumerate() {
            coarse_map[n] = Some(k);
        }
        Self {
            u_fixed: vec![false; 2 * fine_nodes.len()],
            p_fixed: vec![None; coarse_nodes.len()],
            fine_nodes,
            coarse_nodes,
            fine_map,
            coarse_map,
        }
    }

    pub fn n_u(&self) -> usize {
        2 * self.fine_nodes.len()
    }

    pub fn n_p(&self) -> usize {
        self.coarse_nodes.len()
    }

    pub fn total(&self) -> usize {
        self.n_u() + self.n_p()
    }

    /// Displacement dof of component `comp` at fine node `node`.
    pub fn u_dof(&self, node: usize, comp: usize) -> Option<usize> {
        self.fine_map[node].map(|k| 2 * k + comp)
    }

    /// Pressure dof (numbered from 0 within the pressure block) at coarse node `node`.
    pub fn p_dof(&self, node: usize) -> Option<usize> {
        self.coarse_map[node]
    }

    pub fn fine_active(&self, node: usize) -> bool {
        self.fine_map[node].is_some()
    }

    pub fn coarse_active(&self, node: usize) -> bool {
        self.coarse_map[node].is_some()
    }

    /// Global indices (displacement then pressure) of unconstrained unknowns.
    pub fn free_dofs(&self) -> Vec<usize> {
        let nu = self.n_u();
        let u = (0..nu).filter(|&d| !self.u_fixed[d]);
        let p = (0..self.n_p()).filter(|&d| self.p_fixed[d].is_none()).map(|d| nu + d);
        u.chain(p).collect()
    }

    pub fn free_u_dofs(&self) -> Vec<usize> {
        (0..self.n_u()).filter(|&d| !self.u_fixed[d]).collect()
    }

    pub fn free_p_dofs(&self) -> Vec<usize> {
        (0..self.n_p()).filter(|&d| self.p_fixed[d].is_none()).collect()
    }
}

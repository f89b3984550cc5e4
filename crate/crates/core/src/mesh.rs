//! Uniform Cartesian background grids and their topology.
//!
//! Two grids are used side by side: a coarse grid of spacing `h` carrying
//! the pressure and a fine grid of spacing `h/2` carrying the displacement.
//! Both share origin and extent, so every coarse element holds exactly four
//! fine elements.
//!
//! Lattice conventions: node `(i, j)` sits at `origin + (i*hx, j*hy)`,
//! element `(i, j)` spans nodes `(i, j)`..`(i+1, j+1)`. Linear indices are
//! row-major in `j` (`i + j*nx`).

use std::collections::BTreeSet;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::basis::BasisKind;
use crate::error::{Error, Result};
use crate::material::MaterialPoint;

pub type Vec2 = Vector2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    pub fn unit(self) -> Vec2 {
        match self {
            Axis::X => Vec2::new(1.0, 0.0),
            Axis::Y => Vec2::new(0.0, 1.0),
        }
    }
}

/// One side of an axis-aligned body or grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Axis of the outward normal.
    pub fn axis(self) -> Axis {
        match self {
            Side::Left | Side::Right => Axis::X,
            Side::Bottom | Side::Top => Axis::Y,
        }
    }

    /// Sign of the outward normal along [`Side::axis`].
    pub fn sign(self) -> f64 {
        match self {
            Side::Left | Side::Bottom => -1.0,
            Side::Right | Side::Top => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementId {
    pub i: usize,
    pub j: usize,
}

impl ElementId {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub i: usize,
    pub j: usize,
}

impl NodeId {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

/// A grid facet (an edge in 2D) whose normal points along `axis`.
///
/// The facet starts at node `(i, j)` and runs one cell along the other
/// axis. For `axis == X` it separates elements `(i-1, j)` and `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FacetId {
    pub axis: Axis,
    pub i: usize,
    pub j: usize,
}

impl FacetId {
    /// The facet shared by `lower` and its neighbour one cell up along `axis`.
    pub fn between(lower: ElementId, axis: Axis) -> Self {
        match axis {
            Axis::X => FacetId { axis, i: lower.i + 1, j: lower.j },
            Axis::Y => FacetId { axis, i: lower.i, j: lower.j + 1 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartesianGrid {
    origin: Vec2,
    spacing: Vec2,
    counts: [usize; 2],
}

impl CartesianGrid {
    pub fn new(origin: Vec2, spacing: Vec2, counts: [usize; 2]) -> Result<Self> {
        if !(spacing.x > 0.0 && spacing.y > 0.0) || !spacing.iter().all(|s| s.is_finite()) {
            return Err(Error::Parse(format!(
                "grid spacing must be strictly positive, got ({}, {})",
                spacing.x, spacing.y
            )));
        }
        if counts[0] == 0 || counts[1] == 0 {
            return Err(Error::Parse("grid needs at least one element per axis".into()));
        }
        Ok(Self { origin, spacing, counts })
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn spacing(&self) -> Vec2 {
        self.spacing
    }

    pub fn counts(&self) -> [usize; 2] {
        self.counts
    }

    pub fn upper(&self) -> Vec2 {
        self.origin + Vec2::new(self.spacing.x * self.counts[0] as f64, self.spacing.y * self.counts[1] as f64)
    }

    pub fn node_counts(&self) -> [usize; 2] {
        [self.counts[0] + 1, self.counts[1] + 1]
    }

    pub fn node_count(&self) -> usize {
        (self.counts[0] + 1) * (self.counts[1] + 1)
    }

    pub fn element_count(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn node_index(&self, n: NodeId) -> usize {
        n.i + n.j * (self.counts[0] + 1)
    }

    pub fn node_id(&self, index: usize) -> NodeId {
        let nx = self.counts[0] + 1;
        NodeId::new(index % nx, index / nx)
    }

    pub fn element_index(&self, e: ElementId) -> usize {
        e.i + e.j * self.counts[0]
    }

    pub fn element_id(&self, index: usize) -> ElementId {
        ElementId::new(index % self.counts[0], index / self.counts[0])
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.counts[0]).flat_map(move |i| (0..self.counts[1]).map(move |j| ElementId::new(i, j)))
    }

    pub fn node_position(&self, n: NodeId) -> Vec2 {
        self.origin + Vec2::new(n.i as f64 * self.spacing.x, n.j as f64 * self.spacing.y)
    }

    pub fn element_bounds(&self, e: ElementId) -> (Vec2, Vec2) {
        let lo = self.node_position(NodeId::new(e.i, e.j));
        (lo, lo + self.spacing)
    }

    pub fn contains(&self, x: Vec2) -> bool {
        let hi = self.upper();
        x.x >= self.origin.x && x.y >= self.origin.y && x.x <= hi.x && x.y <= hi.y
    }

    /// Truncates the particle box `[lo, hi]` at the grid border. Overshoots
    /// beyond [`BORDER_SLACK`] of the box width are rejected.
    pub fn clip_box(&self, lo: Vec2, hi: Vec2) -> Result<(Vec2, Vec2)> {
        let (glo, ghi) = (self.origin, self.upper());
        let slack = (hi - lo) * BORDER_SLACK;
        for p in [lo, hi] {
            for ax in 0..2 {
                if p[ax] < glo[ax] - slack[ax] || p[ax] > ghi[ax] + slack[ax] {
                    return Err(Error::OutOfGrid { x: p.x, y: p.y });
                }
            }
        }
        Ok((lo.sup(&glo).inf(&ghi), hi.sup(&glo).inf(&ghi)))
    }

    /// Element whose half-open cell `[lo, hi)` contains `x`.
    ///
    /// Points on an internal facet go to the higher-index element; points on
    /// the upper grid border go to the last element.
    pub fn locate_element(&self, x: Vec2) -> Result<ElementId> {
        if !self.contains(x) {
            return Err(Error::OutOfGrid { x: x.x, y: x.y });
        }
        let rel = x - self.origin;
        let i = ((rel.x / self.spacing.x).floor() as usize).min(self.counts[0] - 1);
        let j = ((rel.y / self.spacing.y).floor() as usize).min(self.counts[1] - 1);
        Ok(ElementId::new(i, j))
    }

    /// Corner nodes in counter-clockwise order starting at the lower-left.
    pub fn element_nodes(&self, e: ElementId) -> [NodeId; 4] {
        [NodeId::new(e.i, e.j), NodeId::new(e.i + 1, e.j), NodeId::new(e.i + 1, e.j + 1), NodeId::new(e.i, e.j + 1)]
    }

    /// Facets of `e`: low-x, high-x, low-y, high-y.
    pub fn element_facets(&self, e: ElementId) -> [FacetId; 4] {
        [
            FacetId { axis: Axis::X, i: e.i, j: e.j },
            FacetId { axis: Axis::X, i: e.i + 1, j: e.j },
            FacetId { axis: Axis::Y, i: e.i, j: e.j },
            FacetId { axis: Axis::Y, i: e.i, j: e.j + 1 },
        ]
    }

    /// Elements on the low and high side of a facet. Border facets have one
    /// side missing.
    pub fn facet_elements(&self, f: FacetId) -> (Option<ElementId>, Option<ElementId>) {
        let [nx, ny] = self.counts;
        match f.axis {
            Axis::X => {
                let lo = (f.i > 0 && f.j < ny).then(|| ElementId::new(f.i - 1, f.j));
                let hi = (f.i < nx && f.j < ny).then(|| ElementId::new(f.i, f.j));
                (lo, hi)
            }
            Axis::Y => {
                let lo = (f.j > 0 && f.i < nx).then(|| ElementId::new(f.i, f.j - 1));
                let hi = (f.j < ny && f.i < nx).then(|| ElementId::new(f.i, f.j));
                (lo, hi)
            }
        }
    }

    pub fn facet_nodes(&self, f: FacetId) -> [NodeId; 2] {
        match f.axis {
            Axis::X => [NodeId::new(f.i, f.j), NodeId::new(f.i, f.j + 1)],
            Axis::Y => [NodeId::new(f.i, f.j), NodeId::new(f.i + 1, f.j)],
        }
    }

    /// Grid with half the spacing over the same extent.
    pub fn refined(&self) -> CartesianGrid {
        CartesianGrid {
            origin: self.origin,
            spacing: self.spacing / 2.0,
            counts: [self.counts[0] * 2, self.counts[1] * 2],
        }
    }

    /// Element indices whose cells overlap the open box `(lo, hi)` with
    /// positive area, clipped to the grid.
    pub fn elements_overlapping(&self, lo: Vec2, hi: Vec2) -> Vec<ElementId> {
        let mut range = [(0usize, 0usize); 2];
        for ax in 0..2 {
            let a = snap_to_line((lo[ax] - self.origin[ax]) / self.spacing[ax]);
            let b = snap_to_line((hi[ax] - self.origin[ax]) / self.spacing[ax]);
            let first = a.floor().max(0.0) as usize;
            // an interval ending exactly on a facet does not reach the next cell
            let last = (b.ceil() as isize - 1).clamp(0, self.counts[ax] as isize - 1) as usize;
            range[ax] = (first.min(self.counts[ax] - 1), last);
        }
        let mut out = Vec::new();
        for i in range[0].0..=range[0].1 {
            for j in range[1].0..=range[1].1 {
                out.push(ElementId::new(i, j));
            }
        }
        out
    }
}

/// Relative distance (in cell widths) below which a coordinate counts as lying on a grid line.
pub const LINE_TOLERANCE: f64 = 1e-12;

/// Largest overshoot of a particle box past the grid border, as a fraction of
/// the box width, that is truncated instead of reported.
pub const BORDER_SLACK: f64 = 0.25;

fn snap_to_line(s: f64) -> f64 {
    if (s - s.round()).abs() < LINE_TOLERANCE {
        s.round()
    } else {
        s
    }
}

/// Coarse element containing a fine element of the half-spacing grid.
pub fn coarse_of(fine_element: ElementId) -> ElementId {
    ElementId::new(fine_element.i / 2, fine_element.j / 2)
}

/// The coarse pressure grid together with its half-spacing displacement grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlappingGrids {
    pub coarse: CartesianGrid,
    pub fine: CartesianGrid,
}

impl OverlappingGrids {
    pub fn new(coarse: CartesianGrid) -> Self {
        let fine = coarse.refined();
        Self { coarse, fine }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActiveSets {
    pub active: BTreeSet<ElementId>,
    pub inactive: BTreeSet<ElementId>,
    pub boundary: Vec<ElementId>,
    pub ghost_facets: Vec<FacetId>,
}

impl ActiveSets {
    pub fn from_active(grid: &CartesianGrid, active: BTreeSet<ElementId>) -> Self {
        let inactive = grid.elements().filter(|e| !active.contains(e)).collect();
        Self { active, inactive, boundary: Vec::new(), ghost_facets: Vec::new() }
    }

    pub fn is_active(&self, e: ElementId) -> bool {
        self.active.contains(&e)
    }

    /// Nodes in the closure of the active elements, as sorted linear indices.
    pub fn active_nodes(&self, grid: &CartesianGrid) -> Vec<usize> {
        let set: BTreeSet<usize> =
            self.active.iter().flat_map(|&e| grid.element_nodes(e)).map(|n| grid.node_index(n)).collect();
        set.into_iter().collect()
    }

    /// Coarse activity induced from a fine-grid active set (every coarse
    /// element holding an active fine element). Kept for comparison with the
    /// direct per-grid definition.
    pub fn induced_coarse(coarse: &CartesianGrid, fine: &ActiveSets) -> Self {
        let active = fine.active.iter().map(|&e| coarse_of(e)).collect();
        Self::from_active(coarse, active)
    }
}

/// Marks every element touched by some material point's basis support.
///
/// sMPM: only the element containing the point. GIMPM: every element whose
/// cell overlaps the particle box `x ± lp` with positive area.
pub fn compute_active_sets(grid: &CartesianGrid, mps: &[MaterialPoint], kind: BasisKind) -> Result<ActiveSets> {
    let mut active = BTreeSet::new();
    for mp in mps {
        match kind {
            BasisKind::Smpm => {
                active.insert(grid.locate_element(mp.position)?);
            }
            BasisKind::Gimpm => {
                let (lo, hi) = grid.clip_box(mp.position - mp.half_lengths, mp.position + mp.half_lengths)?;
                active.extend(grid.elements_overlapping(lo, hi));
            }
        }
    }
    Ok(ActiveSets::from_active(grid, active))
}

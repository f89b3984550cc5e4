//! Boundary conditions and their contributions to the discrete system.
//!
//! Natural conditions (tractions, fluxes, the pressure penalty) are
//! integrated along boundary segments: the edge of each material point's
//! domain that lies on a declared body side. Essential conditions are
//! conforming and act on grid nodes lying on a grid line.

use serde::{Deserialize, Serialize};

use super::dofs::DofLayout;
use crate::basis::{element_shape, ShapeSample};
use crate::error::{Error, Result, ValidationIssue};
use crate::ghost::gauss_legendre;
use crate::material::MaterialPoint;
use crate::mesh::{Axis, CartesianGrid, Side, Vec2};
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Zero displacement increment for the selected components of every node on
/// the grid line `x[normal] = at`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedLine {
    pub normal: Axis,
    pub at: f64,
    /// Which displacement components (`x`, `y`) are held.
    pub components: [bool; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LoadCurve {
    /// Full load from the first step on.
    #[default]
    Constant,
    /// Linear growth from zero to full load over `duration`.
    Ramp { duration: f64 },
}

impl LoadCurve {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            LoadCurve::Constant => 1.0,
            LoadCurve::Ramp { duration } => (t / duration).clamp(0.0, 1.0),
        }
    }
}

/// Dead-load traction (force per unit current length) on a body side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractionBc {
    pub side: Side,
    pub traction: [f64; 2],
    /// Optional window along the side's tangential coordinate.
    #[serde(default)]
    pub range: Option<[f64; 2]>,
    #[serde(default)]
    pub curve: LoadCurve,
}

/// Prescribed fluid mass inflow per unit length on a body side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxBc {
    pub side: Side,
    pub inflow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PressureBc {
    /// Weak `p = value` on a body side via `γ ∫ N (p - value) da`.
    /// `gamma` defaults to `5e6/κ0`.
    Penalty {
        side: Side,
        #[serde(default)]
        value: f64,
        #[serde(default)]
        gamma: Option<f64>,
    },
    /// Conforming `p = value` on the coarse-grid line `x[normal] = at`.
    Fixed { normal: Axis, at: f64, value: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundaryConditions {
    pub fixed: Vec<FixedLine>,
    pub tractions: Vec<TractionBc>,
    pub fluxes: Vec<FluxBc>,
    pub pressure: Vec<PressureBc>,
}

impl BoundaryConditions {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ValidationIssue>) {
        for (k, t) in self.tractions.iter().enumerate() {
            if let Some([a, b]) = t.range {
                if !(a < b) {
                    issues.push(ValidationIssue::new(format!("{prefix}tractions[{k}].range"), "needs lower < upper"));
                }
            }
            if let LoadCurve::Ramp { duration } = t.curve {
                if !(duration > 0.0) {
                    issues.push(ValidationIssue::new(
                        format!("{prefix}tractions[{k}].curve.duration"),
                        "must be positive",
                    ));
                }
            }
        }
        for (k, p) in self.pressure.iter().enumerate() {
            if let PressureBc::Penalty { gamma: Some(g), .. } = p {
                if !(*g > 0.0) {
                    issues.push(ValidationIssue::new(format!("{prefix}pressure[{k}].gamma"), "must be positive"));
                }
            }
        }
    }
}

/// Straight boundary segment of one material point's domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: Vec2,
    pub end: Vec2,
    /// Unit vector pointing into the body.
    pub inward: Vec2,
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Part of the segment whose tangential coordinate lies in `[lo, hi]`.
    pub fn clip(&self, axis: Axis, lo: f64, hi: f64) -> Option<Segment> {
        let k = axis.index();
        let (a, b) = (self.start[k], self.end[k]);
        let (s0, s1) = if a <= b { (a, b) } else { (b, a) };
        let (c0, c1) = (s0.max(lo), s1.min(hi));
        if c1 <= c0 {
            return None;
        }
        let at = |c: f64| self.start + (self.end - self.start) * ((c - a) / (b - a));
        Some(Segment { start: at(c0), end: at(c1), inward: self.inward })
    }
}

/// The edge of `mp`'s domain on `side`.
pub fn mp_segment(mp: &MaterialPoint, side: Side) -> Segment {
    let (x, l) = (mp.position, mp.half_lengths);
    let n = side.axis().unit() * side.sign();
    let centre = x + Vec2::new(n.x * l.x, n.y * l.y);
    let t = side.axis().other().unit();
    let half = t * l[side.axis().other().index()];
    Segment { start: centre - half, end: centre + half, inward: -n }
}

/// Gauss points on a segment with bilinear basis samples from the element
/// just inside the body.
pub fn segment_quadrature(grid: &CartesianGrid, seg: &Segment, order: usize) -> Result<Vec<(ShapeSample, f64)>> {
    let len = seg.length();
    let nudge = 1e-9 * grid.spacing().min();
    let mut out = Vec::new();
    for (s, w) in gauss_legendre(order) {
        let x = seg.start + (seg.end - seg.start) * (0.5 * (s + 1.0));
        let e = grid.locate_element(x + seg.inward * nudge)?;
        out.push((element_shape(grid, e, x), 0.5 * w * len));
    }
    Ok(out)
}

/// Step-constant boundary contributions in dof numbering.
#[derive(Debug, Clone)]
pub struct BoundaryTerms {
    /// External nodal forces at the end-of-step load level (length `n_u`).
    pub traction: Vec<f64>,
    /// Prescribed inflow integrals (length `n_p`).
    pub flux: Vec<f64>,
    /// `γ ∫ N_a N_b da` on penalised sides (`n_p × n_p`).
    pub penalty: CsrMatrix,
    /// `γ ∫ N_a p̄ da`.
    pub penalty_rhs: Vec<f64>,
}

fn sides_segments(mps: &[MaterialPoint], side: Side) -> impl Iterator<Item = Segment> + '_ {
    mps.iter().filter(move |m| m.on_side(side)).map(move |m| mp_segment(m, side))
}

fn side_name(side: Side) -> String {
    format!("{side:?}").to_lowercase()
}

/// Integrates all natural boundary conditions for one step.
#[allow(clippy::too_many_arguments)]
pub fn apply_boundary_terms(
    fine: &CartesianGrid,
    coarse: &CartesianGrid,
    dofs: &DofLayout,
    mps: &[MaterialPoint],
    bcs: &BoundaryConditions,
    time: f64,
    default_penalty: f64,
    order: usize,
) -> Result<BoundaryTerms> {
    let mut traction = vec![0.0; dofs.n_u()];
    for bc in &bcs.tractions {
        let load = Vec2::new(bc.traction[0], bc.traction[1]) * bc.curve.factor(time);
        let mut found = false;
        for seg in sides_segments(mps, bc.side) {
            let seg = match bc.range {
                Some([lo, hi]) => match seg.clip(bc.side.axis().other(), lo, hi) {
                    Some(s) => s,
                    None => continue,
                },
                None => seg,
            };
            found = true;
            for (sample, w) in segment_quadrature(fine, &seg, order)? {
                for (node, n, _) in sample.iter() {
                    for c in 0..2 {
                        if let Some(d) = dofs.u_dof(node, c) {
                            traction[d] += w * n * load[c];
                        }
                    }
                }
            }
        }
        if !found {
            return Err(Error::EmptySurface(side_name(bc.side)));
        }
    }

    let mut flux = vec![0.0; dofs.n_p()];
    for bc in &bcs.fluxes {
        let mut found = false;
        for seg in sides_segments(mps, bc.side) {
            found = true;
            for (sample, w) in segment_quadrature(coarse, &seg, order)? {
                for (node, n, _) in sample.iter() {
                    if let Some(d) = dofs.p_dof(node) {
                        flux[d] += w * n * bc.inflow;
                    }
                }
            }
        }
        if !found {
            return Err(Error::EmptySurface(side_name(bc.side)));
        }
    }

    let mut pen = TripletBuilder::new(dofs.n_p(), dofs.n_p());
    let mut penalty_rhs = vec![0.0; dofs.n_p()];
    for bc in &bcs.pressure {
        let PressureBc::Penalty { side, value, gamma } = *bc else {
            continue;
        };
        let gamma = gamma.unwrap_or(default_penalty);
        let mut found = false;
        for seg in sides_segments(mps, side) {
            found = true;
            for (sample, w) in segment_quadrature(coarse, &seg, order)? {
                let ids: Vec<_> = sample.iter().filter_map(|(n, v, _)| dofs.p_dof(n).map(|d| (d, v))).collect();
                for &(a, na) in &ids {
                    penalty_rhs[a] += gamma * w * na * value;
                    for &(b, nb) in &ids {
                        pen.push(a, b, gamma * w * na * nb);
                    }
                }
            }
        }
        if !found {
            return Err(Error::EmptySurface(side_name(side)));
        }
    }

    Ok(BoundaryTerms { traction, flux, penalty: pen.build(), penalty_rhs })
}

/// Marks conforming displacement and pressure constraints in the layout.
pub fn apply_essential(fine: &CartesianGrid, coarse: &CartesianGrid, dofs: &mut DofLayout, bcs: &BoundaryConditions) {
    let on_line = |grid: &CartesianGrid, node: usize, normal: Axis, at: f64| {
        let x = grid.node_position(grid.node_id(node));
        (x[normal.index()] - at).abs() <= 1e-9 * grid.spacing()[normal.index()]
    };
    for line in &bcs.fixed {
        for k in 0..dofs.fine_nodes.len() {
            if on_line(fine, dofs.fine_nodes[k], line.normal, line.at) {
                for c in 0..2 {
                    if line.components[c] {
                        dofs.u_fixed[2 * k + c] = true;
                    }
                }
            }
        }
    }
    for bc in &bcs.pressure {
        if let PressureBc::Fixed { normal, at, value } = *bc {
            for k in 0..dofs.coarse_nodes.len() {
                if on_line(coarse, dofs.coarse_nodes[k], normal, at) {
                    dofs.p_fixed[k] = Some(value);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisKind;
    use crate::mesh::compute_active_sets;

    fn block(grid: &CartesianGrid, per: usize, height: f64) -> Vec<MaterialPoint> {
        let h = grid.spacing();
        let [nx, _] = grid.counts();
        let ny = (height / h.y).round() as usize;
        let mut out = Vec::new();
        for i in 0..nx * per {
            for j in 0..ny * per {
                let dx = h.x / per as f64;
                let dy = h.y / per as f64;
                let mut mp = MaterialPoint::new(
                    Vec2::new((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dy),
                    dx * dy,
                    Vec2::new(dx / 2.0, dy / 2.0),
                );
                if j == ny * per - 1 {
                    mp.sides.push(Side::Top);
                }
                out.push(mp);
            }
        }
        out
    }

    fn layout(coarse: &CartesianGrid, mps: &[MaterialPoint]) -> DofLayout {
        let fine = coarse.refined();
        let fs = compute_active_sets(&fine, mps, BasisKind::Smpm).unwrap();
        let cs = compute_active_sets(coarse, mps, BasisKind::Smpm).unwrap();
        DofLayout::new(&fine, &fs, coarse, &cs)
    }

    #[test]
    fn overburden_sums_to_total_load() {
        let coarse = CartesianGrid::new(Vec2::zeros(), Vec2::new(1.0, 1.0), [3, 4]).unwrap();
        let fine = coarse.refined();
        let mps = block(&fine, 2, 3.0);
        let dofs = layout(&coarse, &mps);
        let bcs = BoundaryConditions {
            tractions: vec![TractionBc {
                side: Side::Top,
                traction: [0.0, -5.0],
                range: None,
                curve: LoadCurve::Constant,
            }],
            ..Default::default()
        };
        let t = apply_boundary_terms(&fine, &coarse, &dofs, &mps, &bcs, 1.0, 1.0, 2).unwrap();
        let fy: f64 = t.traction.iter().skip(1).step_by(2).sum();
        let fx: f64 = t.traction.iter().step_by(2).sum();
        assert!((fy + 5.0 * 3.0).abs() < 1e-12 && fx.abs() < 1e-14);

        let clipped = BoundaryConditions {
            tractions: vec![TractionBc {
                side: Side::Top,
                traction: [0.0, -5.0],
                range: Some([0.0, 1.2]),
                curve: LoadCurve::Ramp { duration: 2.0 },
            }],
            ..Default::default()
        };
        let t = apply_boundary_terms(&fine, &coarse, &dofs, &mps, &clipped, 1.0, 1.0, 2).unwrap();
        let fy: f64 = t.traction.iter().skip(1).step_by(2).sum();
        assert!((fy + 0.5 * 5.0 * 1.2).abs() < 1e-12);
    }

    #[test]
    fn zero_penalty_residual_and_psd() {
        let coarse = CartesianGrid::new(Vec2::zeros(), Vec2::new(1.0, 1.0), [2, 3]).unwrap();
        let fine = coarse.refined();
        let mps = block(&fine, 2, 2.0);
        let dofs = layout(&coarse, &mps);
        let bcs = BoundaryConditions {
            pressure: vec![PressureBc::Penalty { side: Side::Top, value: 0.0, gamma: None }],
            ..Default::default()
        };
        let t = apply_boundary_terms(&fine, &coarse, &dofs, &mps, &bcs, 0.0, 10.0, 2).unwrap();
        assert!(t.penalty_rhs.iter().all(|&v| v == 0.0));
        assert!(t.penalty.asymmetry() < 1e-15);
        let total: f64 = t.penalty.triplets().map(|(_, _, v)| v).sum();
        assert!((total - 10.0 * 2.0).abs() < 1e-12);
        assert!(t.penalty.to_dense().symmetric_eigenvalues().iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn missing_surface_is_reported() {
        let coarse = CartesianGrid::new(Vec2::zeros(), Vec2::new(1.0, 1.0), [2, 2]).unwrap();
        let fine = coarse.refined();
        let mps = block(&fine, 2, 1.0);
        let dofs = layout(&coarse, &mps);
        let bcs = BoundaryConditions { fluxes: vec![FluxBc { side: Side::Left, inflow: 1.0 }], ..Default::default() };
        assert!(matches!(
            apply_boundary_terms(&fine, &coarse, &dofs, &mps, &bcs, 0.0, 1.0, 2),
            Err(Error::EmptySurface(_))
        ));
    }
}

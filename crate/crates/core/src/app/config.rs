//! TOML configuration schema and validation.
//!
//! Every section is optional at the parsing stage so that validation can
//! report all missing or inconsistent fields at once, keyed by dotted paths.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::BoundaryConditions;
use crate::basis::BasisKind;
use crate::error::{Error, Result, ValidationIssue};
use crate::ghost::GhostParams;
use crate::material::porous::kozeny_carman_constant;
use crate::material::MaterialParams;
use crate::mesh::{CartesianGrid, Vec2};
use crate::seeding::Geometry;
use crate::solver::{ResidualScales, SolverConfig, TimeSchedule};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    #[serde(rename = "K")]
    k: Option<f64>,
    #[serde(rename = "G")]
    g_shear: Option<f64>,
    n0: Option<f64>,
    /// Reference hydraulic conductivity; converted to the Kozeny–Carman constant.
    kappa0: Option<f64>,
    c1: Option<f64>,
    rho_s0: Option<f64>,
    rho_f0: Option<f64>,
    g: Option<f64>,
    body_force: Option<[f64; 2]>,
}

/// Yield-surface parameters kept in the schema for a future plasticity model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlasticityReserved {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub p_c: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    origin: Option<[f64; 2]>,
    /// Pressure-grid spacing; the displacement grid halves it.
    spacing: Option<[f64; 2]>,
    counts: Option<[i64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSeeding {
    per_direction: i64,
}

impl Default for RawSeeding {
    fn default() -> Self {
        Self { per_direction: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesOverride {
    pub force: f64,
    pub mass: f64,
}

/// Analytical one-dimensional consolidation used to normalise outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsolidationReference {
    /// Height of the drained face.
    pub drained_at: f64,
    pub height: f64,
    /// Applied load `w`.
    pub load: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Dimensionless times at which isochrones are written (nearest step).
    pub isochrone_times: Vec<f64>,
    /// Write an isochrone for every step instead.
    pub isochrones_every_step: bool,
    /// Per-step pressure oscillation measures.
    pub oscillation: bool,
    /// VTK cadence in steps (0 disables).
    pub vtk_every: usize,
    /// Write the final material points as JSON.
    pub checkpoint: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("output"),
            isochrone_times: Vec::new(),
            isochrones_every_step: false,
            oscillation: false,
            vtk_every: 0,
            checkpoint: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    pub samples: usize,
    pub gamma_factors: Vec<f64>,
    pub kinds: Vec<BasisKind>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { samples: 64, gamma_factors: vec![0.0, 1e-4, 1e-2, 1.0], kinds: vec![BasisKind::Smpm, BasisKind::Gimpm] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InfSupSettings {
    pub levels: Vec<usize>,
}

impl Default for InfSupSettings {
    fn default() -> Self {
        Self { levels: vec![1, 2, 4, 8, 16] }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    material: RawMaterial,
    plasticity: Option<PlasticityReserved>,
    geometry: Option<Geometry>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    seeding: RawSeeding,
    #[serde(default = "default_basis")]
    basis: BasisKind,
    #[serde(default)]
    ghost: GhostParams,
    #[serde(default)]
    boundary: BoundaryConditions,
    time: Option<TimeSchedule>,
    #[serde(default)]
    solver: SolverConfig,
    #[serde(default = "default_boundary_order")]
    boundary_order: usize,
    scales: Option<ScalesOverride>,
    #[serde(default)]
    output: OutputConfig,
    reference: Option<ConsolidationReference>,
    sweep: Option<SweepSettings>,
    infsup: Option<InfSupSettings>,
}

fn default_basis() -> BasisKind {
    BasisKind::Smpm
}

fn default_boundary_order() -> usize {
    2
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub material: MaterialParams,
    /// Hydraulic conductivity in the reference state.
    pub kappa0: f64,
    pub plasticity: Option<PlasticityReserved>,
    pub geometry: Geometry,
    /// Pressure grid.
    pub grid: CartesianGrid,
    pub per_direction: usize,
    pub basis: BasisKind,
    pub ghost: GhostParams,
    pub boundary: BoundaryConditions,
    pub time: Option<TimeSchedule>,
    pub solver: SolverConfig,
    pub boundary_order: usize,
    pub scales: ResidualScales,
    pub output: OutputConfig,
    pub reference: Option<ConsolidationReference>,
    pub sweep: Option<SweepSettings>,
    pub infsup: Option<InfSupSettings>,
}

impl SimulationConfig {
    pub fn fine_counts(&self) -> [usize; 2] {
        let c = self.grid.counts();
        [2 * c[0], 2 * c[1]]
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<SimulationConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    validate(raw)
}

fn required(v: Option<f64>, field: &str, issues: &mut Vec<ValidationIssue>) -> f64 {
    match v {
        Some(x) if x.is_finite() => x,
        Some(_) => {
            issues.push(ValidationIssue::new(field, "must be finite"));
            f64::NAN
        }
        None => {
            issues.push(ValidationIssue::new(field, "is required"));
            f64::NAN
        }
    }
}

fn validate(raw: RawConfig) -> Result<SimulationConfig> {
    let mut issues = Vec::new();
    let m = &raw.material;
    let k = required(m.k, "material.K", &mut issues);
    let g_shear = required(m.g_shear, "material.G", &mut issues);
    let n0 = required(m.n0, "material.n0", &mut issues);
    let rho_f0 = required(m.rho_f0, "material.rho_f0", &mut issues);
    let (kappa0, c1) = match (m.kappa0, m.c1) {
        (Some(kp), None) => (kp, if n0 > 0.0 && n0 < 1.0 { kozeny_carman_constant(kp, n0) } else { f64::NAN }),
        (None, Some(c)) => (c * n0.powi(3) / (1.0 - n0).powi(2), c),
        (Some(_), Some(_)) => {
            issues.push(ValidationIssue::new("material.kappa0", "give either kappa0 or c1, not both"));
            (f64::NAN, f64::NAN)
        }
        (None, None) => {
            issues.push(ValidationIssue::new("material.kappa0", "is required (or material.c1)"));
            (f64::NAN, f64::NAN)
        }
    };
    let material = MaterialParams {
        k,
        g_shear,
        n0,
        c1,
        rho_s0: m.rho_s0.unwrap_or(0.0),
        rho_f0,
        gravity: m.g.unwrap_or(9.81),
        body_force: m.body_force.map(Vec2::from).unwrap_or_else(Vec2::zeros),
    };
    let before = issues.len();
    material.validate("material.", &mut issues);
    // drop duplicates of the "is required" messages
    let missing: Vec<String> = issues[..before].iter().map(|i| i.field.clone()).collect();
    let tail: Vec<ValidationIssue> = issues.split_off(before);
    issues.extend(tail.into_iter().filter(|i| {
        !missing.contains(&i.field) && !(i.field == "material.c1" && missing.iter().any(|f| f == "material.kappa0"))
    }));

    let origin = raw.grid.origin.unwrap_or([0.0, 0.0]);
    let spacing = raw.grid.spacing;
    let counts = raw.grid.counts;
    match spacing {
        None => issues.push(ValidationIssue::new("grid.spacing", "is required")),
        Some(s) if !(s[0] > 0.0 && s[1] > 0.0 && s[0].is_finite() && s[1].is_finite()) => {
            issues.push(ValidationIssue::new("grid.spacing", "must be positive"))
        }
        _ => {}
    }
    match counts {
        None => issues.push(ValidationIssue::new("grid.counts", "is required")),
        Some(c) if c[0] < 1 || c[1] < 1 => issues.push(ValidationIssue::new("grid.counts", "must be at least 1")),
        _ => {}
    }
    let grid = match (spacing, counts) {
        (Some(s), Some(c)) if s[0] > 0.0 && s[1] > 0.0 && c[0] >= 1 && c[1] >= 1 => {
            CartesianGrid::new(Vec2::from(origin), Vec2::from(s), [c[0] as usize, c[1] as usize]).ok()
        }
        _ => None,
    };

    let per = raw.seeding.per_direction;
    if per < 1 {
        issues.push(ValidationIssue::new("seeding.per_direction", "must be at least 1"));
    }
    match &raw.geometry {
        None => issues.push(ValidationIssue::new("geometry", "is required")),
        Some(geom) => {
            geom.validate("geometry.", &mut issues);
            if let Some(g) = &grid {
                let (lo, hi) = geom.bounds();
                let (glo, ghi) = (g.origin(), g.upper());
                let tol = 1e-9 * g.spacing().norm();
                if lo.x < glo.x - tol || lo.y < glo.y - tol || hi.x > ghi.x + tol || hi.y > ghi.y + tol {
                    issues.push(ValidationIssue::new("geometry", "must lie inside the grid"));
                }
                if let Geometry::Rectangle { lower, upper } = geom {
                    let hf = g.spacing() / 2.0;
                    for k in 0..2 {
                        let cells = (upper[k] - lower[k]) / hf[k];
                        if (cells - cells.round()).abs() > 1e-6 {
                            issues.push(ValidationIssue::new(
                                "geometry.upper",
                                "rectangle extents must be whole multiples of the displacement-grid spacing",
                            ));
                        }
                    }
                }
            }
        }
    }

    raw.ghost.validate("ghost.", &mut issues);
    raw.boundary.validate("boundary.", &mut issues);
    if let Some(t) = &raw.time {
        t.validate("time.", &mut issues);
    }
    raw.solver.validate("solver.", &mut issues);
    if !(1..=4).contains(&raw.boundary_order) {
        issues.push(ValidationIssue::new("boundary_order", "must be between 1 and 4"));
    }
    if let Some(s) = raw.scales {
        if !(s.force > 0.0 && s.mass > 0.0) {
            issues.push(ValidationIssue::new("scales", "force and mass scales must be positive"));
        }
    }
    if let Some(r) = raw.reference {
        if !(r.height > 0.0) {
            issues.push(ValidationIssue::new("reference.height", "must be positive"));
        }
        if r.load == 0.0 || !r.load.is_finite() {
            issues.push(ValidationIssue::new("reference.load", "must be non-zero"));
        }
    }
    if let Some(s) = &raw.sweep {
        if s.samples == 0 {
            issues.push(ValidationIssue::new("sweep.samples", "must be at least 1"));
        }
        if s.gamma_factors.iter().any(|g| !(*g >= 0.0)) {
            issues.push(ValidationIssue::new("sweep.gamma_factors", "must be non-negative"));
        }
    }
    if let Some(s) = &raw.infsup {
        if s.levels.is_empty() || s.levels.contains(&0) {
            issues.push(ValidationIssue::new("infsup.levels", "must be a non-empty list of positive counts"));
        }
    }

    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    let grid = grid.expect("validated grid");
    let h = grid.spacing().x.min(grid.spacing().y);
    let scales = match raw.scales {
        Some(s) => ResidualScales { force: s.force, mass: s.mass },
        None => default_scales(&material, kappa0, &raw.boundary, h),
    };
    Ok(SimulationConfig {
        material,
        kappa0,
        plasticity: raw.plasticity,
        geometry: raw.geometry.expect("validated geometry"),
        grid,
        per_direction: per as usize,
        basis: raw.basis,
        ghost: raw.ghost,
        boundary: raw.boundary,
        time: raw.time,
        solver: raw.solver,
        boundary_order: raw.boundary_order,
        scales,
        output: raw.output,
        reference: raw.reference,
        sweep: raw.sweep,
        infsup: raw.infsup,
    })
}

/// Force rows are scaled by the largest applied traction times `h`
/// (Young's modulus times `h` when unloaded); mass rows by `ρ_f0 κ0 h`.
pub fn default_scales(material: &MaterialParams, kappa0: f64, bcs: &BoundaryConditions, h: f64) -> ResidualScales {
    let load = bcs.tractions.iter().map(|t| Vec2::from(t.traction).norm()).fold(0.0, f64::max);
    let load = if load > 0.0 { load } else { material.young_modulus() };
    let mass = material.rho_f0 * kappa0 * h;
    ResidualScales { force: load * h, mass: if mass > 0.0 { mass } else { material.rho_f0 * h } }
}

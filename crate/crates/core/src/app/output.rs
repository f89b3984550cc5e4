//! CSV, legacy VTK and JSON writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{InfSupResult, SweepRow};
use crate::error::{Error, Result};
use crate::material::MaterialPoint;

/// One sample of an isochrone: dimensionless time and depth, numerical and
/// analytical normalised pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsochroneRecord {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "P_numeric")]
    pub p_numeric: f64,
    #[serde(rename = "P_analytic")]
    pub p_analytic: f64,
}

/// Per-step solver log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepLog {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Pressure-oscillation measures of one step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationRecord {
    pub step: usize,
    pub time: f64,
    pub seminorm: f64,
    pub reference_seminorm: f64,
    pub checkerboard_fraction: f64,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(csv::Writer::from_path(path)?)
}

/// Writes `T,Z,P_numeric,P_analytic` with 17 significant digits.
pub fn write_isochrones_csv(path: impl AsRef<Path>, records: &[IsochroneRecord]) -> Result<()> {
    let mut w = writer(path.as_ref())?;
    w.write_record(["T", "Z", "P_numeric", "P_analytic"])?;
    for r in records {
        w.write_record([fmt(r.t), fmt(r.z), fmt(r.p_numeric), fmt(r.p_analytic)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_isochrones_csv(path: impl AsRef<Path>) -> Result<Vec<IsochroneRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}

pub fn write_steps_csv(path: impl AsRef<Path>, steps: &[StepLog]) -> Result<()> {
    let mut w = writer(path.as_ref())?;
    w.write_record(["step", "time", "dt", "iterations", "residual"])?;
    for s in steps {
        w.write_record([s.step.to_string(), fmt(s.time), fmt(s.dt), s.iterations.to_string(), fmt(s.residual)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_oscillation_csv(path: impl AsRef<Path>, rows: &[OscillationRecord]) -> Result<()> {
    let mut w = writer(path.as_ref())?;
    w.write_record(["step", "time", "seminorm", "reference_seminorm", "checkerboard_fraction"])?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            fmt(r.time),
            fmt(r.seminorm),
            fmt(r.reference_seminorm),
            fmt(r.checkerboard_fraction),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(path.as_ref())?;
    w.write_record(["basis", "gamma_factor", "a", "kappa_A", "kappa_C"])?;
    for r in rows {
        let kind = serde_json::to_value(r.basis)?.as_str().unwrap_or_default().to_string();
        w.write_record([kind, fmt(r.gamma_factor), fmt(r.a), fmt(r.kappa_a), fmt(r.kappa_c)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_infsup_csv(path: impl AsRef<Path>, rows: &[InfSupResult]) -> Result<()> {
    let mut w = writer(path.as_ref())?;
    w.write_record(["pairing", "level", "min_eigenvalue", "zero_modes"])?;
    for r in rows {
        let pairing = serde_json::to_value(r.pairing)?.as_str().unwrap_or_default().to_string();
        w.write_record([pairing, r.level.to_string(), fmt(r.min_eigenvalue), r.zero_modes.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy ASCII VTK point cloud with pressure, plastic volumetric strain and
/// displacement magnitude as point scalars.
pub fn write_vtk(path: impl AsRef<Path>, mps: &[MaterialPoint], title: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {} double", mps.len())?;
    for mp in mps {
        writeln!(w, "{} {} 0", fmt(mp.position.x), fmt(mp.position.y))?;
    }
    writeln!(w, "VERTICES {} {}", mps.len(), 2 * mps.len())?;
    for k in 0..mps.len() {
        writeln!(w, "1 {k}")?;
    }
    writeln!(w, "POINT_DATA {}", mps.len())?;
    type Field = (&'static str, fn(&MaterialPoint) -> f64);
    let fields: [Field; 3] = [
        ("pressure", |m| m.pressure),
        ("eps_v_plastic", |m| m.plastic_volumetric_strain),
        ("displacement_magnitude", |m| m.displacement.norm()),
    ];
    for (name, f) in fields {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for mp in mps {
            writeln!(w, "{}", fmt(f(mp)))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Material point state as JSON.
pub fn write_checkpoint(path: impl AsRef<Path>, mps: &[MaterialPoint]) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(w, mps)?;
    Ok(())
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Vec<MaterialPoint>> {
    let r = std::io::BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Vec2;

    #[test]
    fn empty_isochrones_are_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("iso.csv");
        write_isochrones_csv(&p, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "T,Z,P_numeric,P_analytic\n");
        assert!(read_isochrones_csv(&p).unwrap().is_empty());
    }

    #[test]
    fn isochrone_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("iso.csv");
        let rec = IsochroneRecord { t: 1.0 / 3.0, z: 0.1 + 0.2, p_numeric: 1e-300, p_analytic: -std::f64::consts::PI };
        write_isochrones_csv(&p, &[rec]).unwrap();
        let back = read_isochrones_csv(&p).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].t.to_bits(), rec.t.to_bits());
        assert_eq!(back[0].z.to_bits(), rec.z.to_bits());
        assert_eq!(back[0].p_numeric.to_bits(), rec.p_numeric.to_bits());
        assert_eq!(back[0].p_analytic.to_bits(), rec.p_analytic.to_bits());
    }

    #[test]
    fn vtk_follows_legacy_grammar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cloud.vtk");
        let mut mps = vec![
            MaterialPoint::new(Vec2::new(0.1, 0.2), 0.01, Vec2::new(0.05, 0.05)),
            MaterialPoint::new(Vec2::new(0.3, 0.2), 0.01, Vec2::new(0.05, 0.05)),
        ];
        mps[1].displacement = Vec2::new(3.0, 4.0);
        mps[1].pressure = 2.5;
        write_vtk(&p, &mps, "cloud").unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[2], "ASCII");
        assert_eq!(lines[3], "DATASET POLYDATA");
        assert_eq!(lines[4], "POINTS 2 double");
        assert!(lines[5..7].iter().all(|l| l.split_whitespace().count() == 3));
        assert_eq!(lines[7], "VERTICES 2 4");
        assert_eq!(lines[10], "POINT_DATA 2");
        let scalars: Vec<&str> = lines.iter().filter(|l| l.starts_with("SCALARS")).cloned().collect();
        assert_eq!(
            scalars,
            vec![
                "SCALARS pressure double 1",
                "SCALARS eps_v_plastic double 1",
                "SCALARS displacement_magnitude double 1"
            ]
        );
        let mag: f64 = lines.last().unwrap().parse().unwrap();
        assert_eq!(mag, 5.0);
        assert_eq!(lines.len(), 11 + 3 * (2 + 2));
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mps.json");
        let mut mp = MaterialPoint::new(Vec2::new(0.1, 0.7), 0.02, Vec2::new(0.05, 0.05));
        mp.pressure = 1.0 / 7.0;
        mp.sides.push(crate::mesh::Side::Top);
        write_checkpoint(&p, &[mp.clone()]).unwrap();
        assert_eq!(read_checkpoint(&p).unwrap(), vec![mp]);
    }
}

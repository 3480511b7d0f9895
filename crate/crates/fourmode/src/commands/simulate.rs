//! `simulate`: generate and persist a dataset, plus a velocity-density table
//! in the y-z plane (Fig. 2 volumes tiling the plane, |vx| within half a volume).

use fourmode_core::detection::{table_s1_volume, Dataset, FigureVolume, VolumeShape};
use fourmode_core::source::Velocity3;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Artifacts, Cell, Table};
use crate::{dataset_io, runner};

pub struct SimulateReport {
    pub dataset: Dataset,
    pub density: Table,
}

/// Mean detected atoms per shot in y-z bins of the Fig. 2 volume size.
pub fn density_table(ds: &Dataset) -> Table {
    let VolumeShape::Rectangular { size } = table_s1_volume(FigureVolume::Fig2, Velocity3::default()).shape() else {
        unreachable!("Fig. 2 volumes are rectangular")
    };
    let (ny, nz) = (31usize, 111usize);
    let (y0, z0) = (-(ny as f64) * size.y / 2.0, -(nz as f64) * size.z / 2.0);
    let mut counts = vec![0u64; ny * nz];
    for shot in &ds.shots {
        for a in &shot.atoms {
            if a.x.abs() > 0.5 * size.x {
                continue;
            }
            let iy = ((a.y - y0) / size.y).floor();
            let iz = ((a.z - z0) / size.z).floor();
            if iy >= 0.0 && iz >= 0.0 && (iy as usize) < ny && (iz as usize) < nz {
                counts[iy as usize * nz + iz as usize] += 1;
            }
        }
    }
    let mut t = Table::new(&["vy_mm_per_s", "vz_mm_per_s", "atoms_per_shot"]);
    let n = ds.len().max(1) as f64;
    for iy in 0..ny {
        for iz in 0..nz {
            t.push(vec![
                Cell::Float(y0 + (iy as f64 + 0.5) * size.y),
                Cell::Float(z0 + (iz as f64 + 0.5) * size.z),
                Cell::Float(counts[iy * nz + iz] as f64 / n),
            ]);
        }
    }
    t
}

pub fn compute(cfg: &ExperimentConfig, with_optics: bool, workers: Option<usize>) -> Result<SimulateReport, CliError> {
    let exp = super::experiment(cfg, with_optics)?;
    let dataset = runner::run_experiment(&exp, cfg.master_seed, cfg.shots, &cfg.digest(), workers)?;
    let density = density_table(&dataset);
    Ok(SimulateReport { dataset, density })
}

pub fn run(cfg: &ExperimentConfig, with_optics: bool, workers: Option<usize>) -> Result<Artifacts, CliError> {
    let out = Artifacts::create(cfg, "simulate")?;
    out.log(&format!("simulating {} shots", cfg.shots))?;
    let r = compute(cfg, with_optics, workers)?;
    dataset_io::save(&r.dataset, &out.path("dataset.txt"))?;
    out.write_table("density", &r.density)?;
    let atoms = r.dataset.atom_count();
    out.write_summary(json!({
        "shots": r.dataset.len(),
        "with_optics": with_optics,
        "detected_atoms": atoms,
        "detected_atoms_per_shot": atoms as f64 / r.dataset.len() as f64,
        "dataset": "dataset.txt",
    }))?;
    out.log("done")?;
    Ok(out)
}

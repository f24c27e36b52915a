//! Randomized training corpus: sampled box scenes, packed oracle IRs, and
//! JSON-Lines manifests split by scene.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{image_method_ir, make_box_scene, AxisBox, BoxScene};
use crate::codec::{crop_or_pad, pack, resample, write_wav, CROPPED_LEN, TARGET_RATE};
use crate::mesh::write_obj;
use crate::{Error, Result};

/// Sampling ranges for the randomized corpus. Defaults cover living-room
/// scale geometry with moderately reflective surfaces.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct DatasetConfig {
    pub scenes: usize,
    pub irs_per_scene: usize,
    pub seed: u64,
    pub dims_min: [f64; 3],
    pub dims_max: [f64; 3],
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub max_furniture: usize,
    /// Minimum source-listener separation in meters.
    pub min_pair_distance: f64,
    /// Margin kept between sampled positions and the walls.
    pub wall_margin: f64,
    pub max_order: u32,
    /// Synthesis rate before the 16 kHz downsample.
    pub raw_rate: u32,
    /// Fraction of scenes moved to the validation split (at least one when
    /// more than one scene exists).
    pub val_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            scenes: 5,
            irs_per_scene: 4,
            seed: 0,
            dims_min: [3.0, 3.0, 2.4],
            dims_max: [10.0, 8.0, 3.5],
            alpha_min: 0.1,
            alpha_max: 0.9,
            max_furniture: 5,
            min_pair_distance: 0.5,
            wall_margin: 0.3,
            max_order: 30,
            raw_rate: 48_000,
            val_fraction: 0.2,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.scenes == 0 {
            problems.push("scenes must be >= 1".to_string());
        }
        if self.irs_per_scene == 0 {
            problems.push("irs_per_scene must be >= 1".to_string());
        }
        for i in 0..3 {
            if !(self.dims_min[i] > 0.0 && self.dims_max[i] >= self.dims_min[i]) {
                problems.push(format!("dims range on axis {i} invalid"));
            }
        }
        if !(0.0..=1.0).contains(&self.alpha_min)
            || !(0.0..=1.0).contains(&self.alpha_max)
            || self.alpha_max < self.alpha_min
        {
            problems.push("alpha range must satisfy 0 <= alpha_min <= alpha_max <= 1".into());
        }
        if self.min_pair_distance <= 0.0 {
            problems.push("min_pair_distance must be positive".into());
        }
        if self.raw_rate == 0 || self.raw_rate % TARGET_RATE != 0 {
            problems.push(format!("raw_rate must be a positive multiple of {TARGET_RATE}"));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            problems.push("val_fraction must be in [0, 1)".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

/// One (scene, source, listener, ground-truth IR) tuple. Paths are relative
/// to the manifest file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestRow {
    pub mesh: String,
    pub source: [f64; 3],
    pub listener: [f64; 3],
    pub ir: String,
    pub scene_id: String,
}

/// Generates the corpus under `out_dir` and returns the path of the combined
/// manifest (`manifest.jsonl`); `train.jsonl` and `val.jsonl` hold the
/// scene-keyed split with no scene overlap.
pub fn build_dataset(cfg: &DatasetConfig, out_dir: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows: Vec<ManifestRow> = Vec::new();

    for s in 0..cfg.scenes {
        let scene_id = format!("scene_{s:04}");
        let scene = sample_scene(cfg, &mut rng);
        let mesh = make_box_scene(&scene)?;
        let mesh_name = format!("{scene_id}.obj");
        write_obj(&mesh, out_dir.join(&mesh_name))?;

        for k in 0..cfg.irs_per_scene {
            let (src, lst) = sample_pair(&scene, cfg, &mut rng)?;
            let raw = image_method_ir(&scene, src, lst, cfg.max_order, cfg.raw_rate)?;
            let down = resample(&raw, TARGET_RATE)?;
            let cropped = crop_or_pad(&down, CROPPED_LEN)?;
            let packed = pack(&cropped)?;
            let ir_name = format!("{scene_id}_ir{k:03}.wav");
            write_wav(&packed, out_dir.join(&ir_name))?;
            rows.push(ManifestRow {
                mesh: mesh_name.clone(),
                source: [src.x, src.y, src.z],
                listener: [lst.x, lst.y, lst.z],
                ir: ir_name,
                scene_id: scene_id.clone(),
            });
        }
    }

    let manifest = out_dir.join("manifest.jsonl");
    write_rows(&manifest, &rows)?;

    // Scene-keyed split: the last ceil(scenes * val_fraction) scenes go to
    // validation so train and val never share a scene.
    let val_scenes = if cfg.scenes > 1 {
        ((cfg.scenes as f64 * cfg.val_fraction).ceil() as usize).clamp(
            usize::from(cfg.val_fraction > 0.0),
            cfg.scenes - 1,
        )
    } else {
        0
    };
    let first_val = cfg.scenes - val_scenes;
    let (train, val): (Vec<_>, Vec<_>) = rows.iter().cloned().partition(|r| {
        let idx: usize = r.scene_id["scene_".len()..].parse().unwrap_or(0);
        idx < first_val
    });
    write_rows(&out_dir.join("train.jsonl"), &train)?;
    write_rows(&out_dir.join("val.jsonl"), &val)?;

    Ok(manifest)
}

fn write_rows(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut text = String::new();
    for r in rows {
        text.push_str(&serde_json::to_string(r)?);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Reads a JSON-Lines manifest, resolving mesh/IR paths against its parent
/// directory.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let text = fs::read_to_string(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row: ManifestRow = serde_json::from_str(line).map_err(|e| {
            Error::Config(format!("manifest line {}: {e}", i + 1))
        })?;
        row.mesh = dir.join(&row.mesh).to_string_lossy().into_owned();
        row.ir = dir.join(&row.ir).to_string_lossy().into_owned();
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Config(format!(
            "manifest {} contains no rows",
            path.display()
        )));
    }
    Ok(rows)
}

fn sample_scene(cfg: &DatasetConfig, rng: &mut ChaCha8Rng) -> BoxScene {
    let dims = Vector3::new(
        rng.random_range(cfg.dims_min[0]..=cfg.dims_max[0]),
        rng.random_range(cfg.dims_min[1]..=cfg.dims_max[1]),
        rng.random_range(cfg.dims_min[2]..=cfg.dims_max[2]),
    );
    let mut absorption = [0.0; 6];
    for a in &mut absorption {
        *a = rng.random_range(cfg.alpha_min..=cfg.alpha_max);
    }
    let mut scene = BoxScene::new(dims, absorption);
    let n_furniture = rng.random_range(0..=cfg.max_furniture);
    for _ in 0..n_furniture {
        // Desk/cabinet sized boxes resting on the floor.
        let sx = rng.random_range(0.3..1.2f64).min(dims.x * 0.4);
        let sy = rng.random_range(0.3..1.2f64).min(dims.y * 0.4);
        let sz = rng.random_range(0.3..1.5f64).min(dims.z * 0.7);
        let x0 = rng.random_range(0.1..(dims.x - sx - 0.1));
        let y0 = rng.random_range(0.1..(dims.y - sy - 0.1));
        scene.furniture.push(AxisBox {
            min: Vector3::new(x0, y0, 0.0),
            max: Vector3::new(x0 + sx, y0 + sy, sz),
        });
    }
    scene
}

fn sample_pair(
    scene: &BoxScene,
    cfg: &DatasetConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let sample_point = |rng: &mut ChaCha8Rng| {
        Vector3::new(
            rng.random_range(cfg.wall_margin..scene.dims.x - cfg.wall_margin),
            rng.random_range(cfg.wall_margin..scene.dims.y - cfg.wall_margin),
            rng.random_range(cfg.wall_margin..scene.dims.z - cfg.wall_margin),
        )
    };
    for _ in 0..1000 {
        let src = sample_point(rng);
        let lst = sample_point(rng);
        if (src - lst).norm() >= cfg.min_pair_distance {
            return Ok((src, lst));
        }
    }
    Err(Error::Config(format!(
        "could not place a source/listener pair >= {} m apart in a {:?} room",
        cfg.min_pair_distance, scene.dims
    )))
}

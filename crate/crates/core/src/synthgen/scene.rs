//! Synthetic fruit scenes: a bright shaded disk on a dark background with
//! dark candidate regions, plus the on-disk corpus layout (scenes, ground
//! truth masks, manifest CSV).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{gen_candidate_shape, SynthSpec};
use crate::classify::ClassLabel;
use crate::error::{Error, Result};
use crate::imaging::{save_gray, BinaryMask, GrayImage};
use crate::rng::SplitMix64;

const BACKGROUND_LEVEL: f64 = 20.0;
const FRUIT_LEVEL: f64 = 180.0;
const SHADING_DROP: f64 = 35.0;
const CANDIDATE_EDGE_LEVEL: f64 = 45.0;

/// A rendered scene with its ground truth.
#[derive(Debug, Clone)]
pub struct Scene {
    pub image: GrayImage,
    pub fruit_center: (f64, f64),
    pub fruit_radius: f64,
    pub truths: Vec<SceneTruth>,
}

/// Ground truth for one placed candidate: a full-size mask plus its label.
#[derive(Debug, Clone)]
pub struct SceneTruth {
    pub label: ClassLabel,
    pub mask: BinaryMask,
    pub spec: SynthSpec,
}

/// Renders one scene. Candidates are placed without overlap, fully inside
/// the fruit disk; placement gives up after 100 attempts per candidate.
pub fn gen_apple_scene(specs: &[SynthSpec], image_size: usize, rng_seed: u64) -> Result<Scene> {
    if image_size < 64 {
        return Err(Error::Parameter(format!(
            "scene size must be at least 64, got {image_size}"
        )));
    }
    let mut rng = SplitMix64::new(rng_seed);
    let size = image_size as f64;
    let fruit_radius = size * rng.range_f64(0.36, 0.40);
    let fruit_center = (
        size / 2.0 + rng.range_f64(-2.0, 2.0),
        size / 2.0 + rng.range_f64(-2.0, 2.0),
    );

    // base rendering: background, then the shaded fruit disk
    let mut pixels = vec![BACKGROUND_LEVEL; image_size * image_size];
    for y in 0..image_size {
        for x in 0..image_size {
            let dx = x as f64 - fruit_center.0;
            let dy = y as f64 - fruit_center.1;
            let r2 = dx * dx + dy * dy;
            if r2 <= fruit_radius * fruit_radius {
                let shade = SHADING_DROP * r2 / (fruit_radius * fruit_radius);
                pixels[y * image_size + x] = FRUIT_LEVEL - shade;
            }
        }
    }

    // place and paint candidates
    let mut occupancy = BinaryMask::empty(image_size, image_size);
    let mut truths = Vec::new();
    for spec in specs {
        let shape = gen_candidate_shape(spec)?;
        let placed = place_shape(
            &shape,
            image_size,
            fruit_center,
            fruit_radius,
            &occupancy,
            &mut rng,
        )
        .ok_or_else(|| {
            Error::Generation(format!(
                "no non-overlapping in-fruit placement found for a {} of scale {} after 100 attempts",
                spec.class, spec.scale
            ))
        })?;
        let core_level = rng.range_f64(15.0, 20.0);
        paint_candidate(&mut pixels, image_size, &placed, core_level);
        // occupancy grows by a 2-pixel margin around the placed mask
        for y in 0..image_size {
            for x in 0..image_size {
                if placed.get(x, y) {
                    for dy in -2isize..=2 {
                        for dx in -2isize..=2 {
                            let nx = x as isize + dx;
                            let ny = y as isize + dy;
                            if nx >= 0 && ny >= 0 && nx < image_size as isize && ny < image_size as isize {
                                occupancy.set(nx as usize, ny as usize, true);
                            }
                        }
                    }
                }
            }
        }
        truths.push(SceneTruth {
            label: spec.class,
            mask: placed,
            spec: spec.clone(),
        });
    }

    // pixel noise, one gaussian per pixel in row-major order
    let sigma = specs
        .iter()
        .map(|s| s.jitter)
        .fold(0.0f64, f64::max)
        .min(0.12)
        * 20.0;
    let data: Vec<u8> = pixels
        .iter()
        .map(|&v| {
            let noisy = if sigma > 0.0 { v + sigma * rng.gaussian() } else { v };
            noisy.round().clamp(0.0, 255.0) as u8
        })
        .collect();

    Ok(Scene {
        image: GrayImage::new(image_size, image_size, data)?,
        fruit_center,
        fruit_radius,
        truths,
    })
}

/// Tries up to 100 seeded positions; the shape must stay within 85% of the
/// fruit radius and clear of previously placed candidates.
fn place_shape(
    shape: &BinaryMask,
    image_size: usize,
    fruit_center: (f64, f64),
    fruit_radius: f64,
    occupancy: &BinaryMask,
    rng: &mut SplitMix64,
) -> Option<BinaryMask> {
    let allow = 0.85 * fruit_radius;
    let (sw, sh) = (shape.width(), shape.height());
    // the farthest shape pixel from the shape's own center
    let scx = (sw as f64 - 1.0) / 2.0;
    let scy = (sh as f64 - 1.0) / 2.0;
    let mut max_reach: f64 = 0.0;
    for y in 0..sh {
        for x in 0..sw {
            if shape.get(x, y) {
                max_reach = max_reach.max((x as f64 - scx).hypot(y as f64 - scy));
            }
        }
    }
    let budget = allow - max_reach - 1.0;
    for _ in 0..100 {
        if budget < 0.0 {
            return None;
        }
        let radius = budget * rng.next_f64().sqrt();
        let angle = rng.range_f64(0.0, std::f64::consts::TAU);
        let cx = fruit_center.0 + radius * angle.cos();
        let cy = fruit_center.1 + radius * angle.sin();
        let x0 = (cx - scx).round() as isize;
        let y0 = (cy - scy).round() as isize;
        if x0 < 0 || y0 < 0 || x0 + sw as isize >= image_size as isize || y0 + sh as isize >= image_size as isize
        {
            continue;
        }
        let mut collision = false;
        'scan: for y in 0..sh {
            for x in 0..sw {
                if shape.get(x, y) && occupancy.get(x + x0 as usize, y + y0 as usize) {
                    collision = true;
                    break 'scan;
                }
            }
        }
        if collision {
            continue;
        }
        let mut placed = BinaryMask::empty(image_size, image_size);
        for y in 0..sh {
            for x in 0..sw {
                if shape.get(x, y) {
                    placed.set(x + x0 as usize, y + y0 as usize, true);
                }
            }
        }
        return Some(placed);
    }
    None
}

/// Paints a candidate with an intensity ramp from `CANDIDATE_EDGE_LEVEL` at
/// the rim down to `core_level` at the innermost pixels, so the core is dark
/// under every threshold while edges stay detectable.
fn paint_candidate(pixels: &mut [f64], image_size: usize, mask: &BinaryMask, core_level: f64) {
    // multi-source BFS distance from the complement
    let mut dist = vec![u32::MAX; image_size * image_size];
    let mut queue = std::collections::VecDeque::new();
    for y in 0..image_size {
        for x in 0..image_size {
            if mask.get(x, y) {
                let boundary = [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|&(dx, dy)| !mask.get_padded(x as isize + dx, y as isize + dy));
                if boundary {
                    dist[y * image_size + x] = 1;
                    queue.push_back((x, y));
                }
            }
        }
    }
    let mut max_d = 1u32;
    while let Some((x, y)) = queue.pop_front() {
        let d = dist[y * image_size + x];
        max_d = max_d.max(d);
        for (dx, dy) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let nx = x as isize + dx;
            let ny = y as isize + dy;
            if nx < 0 || ny < 0 || nx >= image_size as isize || ny >= image_size as isize {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if mask.get(nx, ny) && dist[ny * image_size + nx] == u32::MAX {
                dist[ny * image_size + nx] = d + 1;
                queue.push_back((nx, ny));
            }
        }
    }
    for y in 0..image_size {
        for x in 0..image_size {
            if mask.get(x, y) {
                let t = if max_d > 1 {
                    (dist[y * image_size + x] - 1) as f64 / (max_d - 1) as f64
                } else {
                    1.0
                };
                pixels[y * image_size + x] =
                    CANDIDATE_EDGE_LEVEL + (core_level - CANDIDATE_EDGE_LEVEL) * t;
            }
        }
    }
}

/// One corpus scene as recorded in the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub apple_id: u32,
    pub view_id: u32,
    pub class: ClassLabel,
    pub scale: f64,
    pub rotation_deg: f64,
    pub jitter: f64,
    pub shape_seed: u64,
    pub scene_seed: u64,
    pub scene_path: String,
    pub truth_path: String,
}

/// The corpus manifest: per-scene parameters and file paths, all relative to
/// the corpus root.
#[derive(Debug, Clone)]
pub struct CorpusManifest {
    pub root: PathBuf,
    pub rows: Vec<ManifestRow>,
}

impl CorpusManifest {
    pub fn manifest_path(root: &Path) -> PathBuf {
        root.join("manifest.csv")
    }

    pub fn save(&self) -> Result<()> {
        let mut out = String::from(
            "apple_id,view_id,class,scale,rotation_deg,jitter,shape_seed,scene_seed,scene_path,truth_path\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.apple_id,
                r.view_id,
                r.class,
                r.scale,
                r.rotation_deg,
                r.jitter,
                r.shape_seed,
                r.scene_seed,
                r.scene_path,
                r.truth_path
            )
            .expect("write to string");
        }
        std::fs::write(Self::manifest_path(&self.root), out)?;
        Ok(())
    }

    pub fn load(root: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(Self::manifest_path(root))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("manifest: empty file".into()))?;
        if !header.starts_with("apple_id,view_id,class") {
            return Err(Error::Format("manifest: unrecognized header".into()));
        }
        let mut rows = Vec::new();
        for (ln, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(Error::Format(format!(
                    "manifest line {}: expected 10 fields, got {}",
                    ln + 2,
                    f.len()
                )));
            }
            let parse_err = |field: &str| Error::Format(format!("manifest line {}: bad {field}", ln + 2));
            rows.push(ManifestRow {
                apple_id: f[0].parse().map_err(|_| parse_err("apple_id"))?,
                view_id: f[1].parse().map_err(|_| parse_err("view_id"))?,
                class: ClassLabel::parse(f[2])?,
                scale: f[3].parse().map_err(|_| parse_err("scale"))?,
                rotation_deg: f[4].parse().map_err(|_| parse_err("rotation_deg"))?,
                jitter: f[5].parse().map_err(|_| parse_err("jitter"))?,
                shape_seed: f[6].parse().map_err(|_| parse_err("shape_seed"))?,
                scene_seed: f[7].parse().map_err(|_| parse_err("scene_seed"))?,
                scene_path: f[8].to_string(),
                truth_path: f[9].to_string(),
            });
        }
        Ok(CorpusManifest {
            root: root.to_path_buf(),
            rows,
        })
    }
}

/// The per-scene parameters derived from a corpus seed. Exposed so scenes
/// can be regenerated one at a time from manifest data.
pub fn corpus_scene_spec(corpus_seed: u64, apple_id: u32, view_id: u32) -> (SynthSpec, u64) {
    let class = ClassLabel::ALL[view_id as usize % 3];
    let index = apple_id as u64 * 3 + view_id as u64;
    let mut rng = SplitMix64::substream(corpus_seed, index);
    let scale = rng.range_f64(0.5, 2.0);
    let rotation_deg = rng.range_f64(0.0, 360.0);
    let jitter = rng.range_f64(0.02, 0.12);
    let shape_seed = rng.next_u64();
    let scene_seed = rng.next_u64();
    (
        SynthSpec::new(class, scale, rotation_deg, jitter, shape_seed),
        scene_seed,
    )
}

/// Generates the full corpus: `n_per_class` apples, each contributing one
/// stem, one calyx and one defect view at 256x256, written as binary PGMs
/// with a manifest CSV. Scene generation runs in parallel; outputs depend
/// only on (n_per_class, rng_seed).
pub fn gen_corpus(n_per_class: u32, rng_seed: u64, out_dir: &Path) -> Result<CorpusManifest> {
    if n_per_class < 4 {
        return Err(Error::Parameter(format!(
            "need at least 4 apples per class, got {n_per_class}"
        )));
    }
    std::fs::create_dir_all(out_dir)?;

    let indices: Vec<(u32, u32)> = (0..n_per_class)
        .flat_map(|apple| (0..3u32).map(move |view| (apple, view)))
        .collect();
    let rows: Vec<ManifestRow> = indices
        .par_iter()
        .map(|&(apple_id, view_id)| -> Result<ManifestRow> {
            let (spec, scene_seed) = corpus_scene_spec(rng_seed, apple_id, view_id);
            let scene = gen_apple_scene(std::slice::from_ref(&spec), 256, scene_seed)?;
            let scene_path = format!("scene_{apple_id:04}_{view_id}.pgm");
            let truth_path = format!("truth_{apple_id:04}_{view_id}.pgm");
            save_gray(&scene.image, out_dir.join(&scene_path))?;
            save_gray(&scene.truths[0].mask.to_gray(), out_dir.join(&truth_path))?;
            Ok(ManifestRow {
                apple_id,
                view_id,
                class: spec.class,
                scale: spec.scale,
                rotation_deg: spec.rotation_deg,
                jitter: spec.jitter,
                shape_seed: spec.rng_seed,
                scene_seed,
                scene_path,
                truth_path,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let manifest = CorpusManifest {
        root: out_dir.to_path_buf(),
        rows,
    };
    manifest.save()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scene_has_fruit_only() {
        let scene = gen_apple_scene(&[], 128, 7).unwrap();
        assert!(scene.truths.is_empty());
        // no pixel darker than the background floor inside the fruit
        let (cx, cy) = scene.fruit_center;
        let r = scene.fruit_radius;
        for y in 0..128usize {
            for x in 0..128usize {
                let inside = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)) <= (r - 1.0) * (r - 1.0);
                if inside {
                    assert!(scene.image.get(x, y) >= 140);
                }
            }
        }
    }

    #[test]
    fn one_defect_lands_inside_the_fruit() {
        let spec = SynthSpec::new(ClassLabel::Defect, 1.0, 45.0, 0.05, 31);
        let scene = gen_apple_scene(&[spec], 256, 11).unwrap();
        assert_eq!(scene.truths.len(), 1);
        let truth = &scene.truths[0];
        let (cx, cy) = scene.fruit_center;
        for y in 0..256usize {
            for x in 0..256usize {
                if truth.mask.get(x, y) {
                    let d = (x as f64 - cx).hypot(y as f64 - cy);
                    assert!(d <= scene.fruit_radius, "truth pixel outside the fruit");
                }
            }
        }
    }

    #[test]
    fn scenes_are_deterministic() {
        let spec = SynthSpec::new(ClassLabel::Stem, 1.2, 120.0, 0.08, 5);
        let a = gen_apple_scene(std::slice::from_ref(&spec), 256, 99).unwrap();
        let b = gen_apple_scene(std::slice::from_ref(&spec), 256, 99).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.truths[0].mask, b.truths[0].mask);
    }

    #[test]
    fn candidate_core_is_dark() {
        for seed in 0..10u64 {
            let (spec, scene_seed) = corpus_scene_spec(4242, seed as u32, (seed % 3) as u32);
            let scene = gen_apple_scene(std::slice::from_ref(&spec), 256, scene_seed).unwrap();
            let truth = &scene.truths[0];
            let mut darkest = 255u8;
            for y in 0..256usize {
                for x in 0..256usize {
                    if truth.mask.get(x, y) {
                        darkest = darkest.min(scene.image.get(x, y));
                    }
                }
            }
            assert!(darkest < 30, "core should be dark under the lowest threshold, got {darkest}");
        }
    }

    #[test]
    fn corpus_layout_and_determinism() {
        let dir = std::env::temp_dir().join("fv_corpus_test_a");
        let _ = std::fs::remove_dir_all(&dir);
        let manifest = gen_corpus(4, 7, &dir).unwrap();
        assert_eq!(manifest.rows.len(), 12);
        for label in ClassLabel::ALL {
            assert_eq!(manifest.rows.iter().filter(|r| r.class == label).count(), 4);
        }
        let reloaded = CorpusManifest::load(&dir).unwrap();
        assert_eq!(reloaded.rows, manifest.rows);

        // regenerating into a second directory produces identical bytes
        let dir2 = std::env::temp_dir().join("fv_corpus_test_b");
        let _ = std::fs::remove_dir_all(&dir2);
        gen_corpus(4, 7, &dir2).unwrap();
        for row in &manifest.rows {
            let a = std::fs::read(dir.join(&row.scene_path)).unwrap();
            let b = std::fs::read(dir2.join(&row.scene_path)).unwrap();
            assert_eq!(a, b, "scene {} differs", row.scene_path);
        }
        let ma = std::fs::read(dir.join("manifest.csv")).unwrap();
        let mb = std::fs::read(dir2.join("manifest.csv")).unwrap();
        assert_eq!(ma, mb);
    }

    #[test]
    fn corpus_requires_four_apples() {
        let dir = std::env::temp_dir().join("fv_corpus_test_c");
        assert!(gen_corpus(3, 1, &dir).is_err());
    }

    #[test]
    fn zero_candidate_scene_detects_nothing() {
        use crate::segmentation::{
            auto_seed, detect_candidates, gradient_refine, grow_cut, marker_from_layers,
            multi_threshold,
        };
        let scene = gen_apple_scene(&[], 128, 3).unwrap();
        let seeds = auto_seed(128, 128, 2, 0.25).unwrap();
        let fruit = grow_cut(&scene.image, &seeds, 256).unwrap().mask;
        let layers = multi_threshold(&scene.image, [30, 50, 65]).unwrap();
        let marker = marker_from_layers(&layers, 2)
            .unwrap()
            .intersect(&fruit)
            .unwrap();
        let refined =
            gradient_refine(&marker, &crate::imaging::sobel_magnitude(&scene.image).unwrap(), 40)
                .unwrap();
        let candidates = detect_candidates(&fruit, &refined, 20).unwrap();
        assert!(candidates.is_empty());
    }
}

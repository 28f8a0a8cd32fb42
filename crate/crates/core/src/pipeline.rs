//! End-to-end wiring of the detection and feature stages.
//!
//! Stage order on one image: median filter, grow-cut fruit extraction,
//! multi-threshold layer counting restricted to the fruit, gradient-bounded
//! refinement, component labelling. Candidate features are extracted from
//! the largest detected region of each corpus scene.

use std::path::Path;

use rayon::prelude::*;

use crate::classify::{Dataset, Sample};
use crate::config::PipelineConfig;
use crate::descriptors::{extract_all, FeatureVector};
use crate::error::{Error, Result};
use crate::imaging::{
    load_image, median_filter, sobel_magnitude, to_grayscale, BinaryMask, CandidateObject,
    GrayImage, Image,
};
use crate::segmentation::{
    auto_seed, detect_candidates, gradient_refine, grow_cut, marker_from_layers, multi_threshold,
    LayerImage,
};
use crate::synthgen::CorpusManifest;

/// Everything the detection stages produce for one image.
#[derive(Debug, Clone)]
pub struct DetectionOutput {
    pub filtered: GrayImage,
    pub fruit: BinaryMask,
    pub layers: LayerImage,
    pub marker: BinaryMask,
    pub refined: BinaryMask,
    pub gradient: GrayImage,
    pub candidates: Vec<CandidateObject>,
}

fn stage_err(stage: &str) -> impl FnOnce(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(io) => Error::Io(io),
        other => Error::Parameter(format!("stage {stage}: {other}")),
    }
}

/// Runs the full candidate-detection chain on a grayscale image.
pub fn detect(image: &GrayImage, cfg: &PipelineConfig) -> Result<DetectionOutput> {
    let filtered = median_filter(image, cfg.median_radius).map_err(stage_err("median"))?;
    let seeds = auto_seed(
        filtered.width(),
        filtered.height(),
        cfg.growcut_border,
        cfg.growcut_core_fraction,
    )
    .map_err(stage_err("seed"))?;
    let iters = cfg.growcut_iters(filtered.width(), filtered.height());
    let fruit = grow_cut(&filtered, &seeds, iters)
        .map_err(stage_err("growcut"))?
        .mask;
    let layers = multi_threshold(&filtered, cfg.thresholds).map_err(stage_err("threshold"))?;
    let marker = marker_from_layers(&layers, cfg.min_layers)
        .map_err(stage_err("marker"))?
        .intersect(&fruit)
        .map_err(stage_err("marker"))?;
    let gradient = sobel_magnitude(&filtered).map_err(stage_err("gradient"))?;
    // growth recovers the candidate's full extent; the loosest threshold
    // layer bounds it so the grown region cannot spill onto healthy skin
    let loose = marker_from_layers(&layers, 1).map_err(stage_err("refine"))?;
    let refined = gradient_refine(&marker, &gradient, cfg.grad_threshold)
        .map_err(stage_err("refine"))?
        .intersect(&loose)
        .map_err(stage_err("refine"))?;
    let candidates =
        detect_candidates(&fruit, &refined, cfg.min_area).map_err(stage_err("components"))?;
    Ok(DetectionOutput {
        filtered,
        fruit,
        layers,
        marker,
        refined,
        gradient,
        candidates,
    })
}

/// Loads any supported image as grayscale.
pub fn load_gray<P: AsRef<Path>>(path: P) -> Result<GrayImage> {
    Ok(match load_image(path)? {
        Image::Gray(g) => g,
        Image::Color(c) => to_grayscale(&c),
    })
}

/// Feature extraction for one candidate with the box pyramid adapted to the
/// candidate's size: box scales too coarse to see at least two occupied
/// boxes are dropped (the slope is then fitted over the surviving scales).
/// Returns None when the candidate is degenerate for any block.
pub fn candidate_features(
    candidate: &CandidateObject,
    cfg: &PipelineConfig,
) -> Result<Option<FeatureVector>> {
    let mut descriptor_cfg = cfg.descriptor_config();
    let sizes = &mut descriptor_cfg.multifractal.box_sizes;
    while sizes.len() > 1 {
        let eps = *sizes.last().unwrap();
        let occupied = crate::descriptors::box_partition_stats(&candidate.mask, eps)
            .map(|s| s.occupied_boxes)
            .unwrap_or(0);
        if occupied >= 2 {
            break;
        }
        sizes.pop();
    }
    if sizes.len() < 2 {
        return Ok(None);
    }
    match extract_all(candidate, &descriptor_cfg) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Degenerate(_)) | Err(Error::EmptyRegion(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Detects and extracts features for one corpus scene: the largest candidate
/// is taken as the labeled object.
pub fn scene_features(image: &GrayImage, cfg: &PipelineConfig) -> Result<Option<FeatureVector>> {
    let detection = detect(image, cfg)?;
    let Some(best) = detection.candidates.first() else {
        return Ok(None);
    };
    candidate_features(best, cfg)
}

/// Result of running detection + extraction over a whole corpus.
pub struct CorpusFeatures {
    pub dataset: Dataset,
    /// Scenes that produced no usable candidate.
    pub skipped: usize,
}

/// Processes every manifest scene (in parallel; output order and content are
/// independent of thread scheduling).
pub fn extract_corpus(manifest: &CorpusManifest, cfg: &PipelineConfig) -> Result<CorpusFeatures> {
    let results: Vec<(usize, Option<Sample>)> = manifest
        .rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| -> Result<(usize, Option<Sample>)> {
            let image = load_gray(manifest.root.join(&row.scene_path))?;
            let features = scene_features(&image, cfg)?;
            Ok((
                i,
                features.map(|f| Sample {
                    features: f,
                    label: row.class,
                    apple_id: row.apple_id,
                    view_id: row.view_id,
                }),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ordered: Vec<(usize, Option<Sample>)> = results;
    ordered.sort_by_key(|(i, _)| *i);
    let mut samples = Vec::new();
    let mut skipped = 0usize;
    for (_, sample) in ordered {
        match sample {
            Some(s) => samples.push(s),
            None => skipped += 1,
        }
    }
    Ok(CorpusFeatures {
        dataset: Dataset::new(samples)?,
        skipped,
    })
}

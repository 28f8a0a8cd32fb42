//! Fruit/background separation and dark-candidate detection.
//!
//! The fruit is isolated with a grow-cut cellular automaton seeded
//! automatically (border ring = background, central core = foreground).
//! Candidates are then the dark regions on the fruit: three fixed thresholds
//! build a layer-count image, a marker keeps pixels dark under at least
//! `min_layers` of them, and a gradient-bounded region growth recovers the
//! full candidate extent before intersecting with the fruit mask.

mod growcut;

pub use growcut::{grow_cut, CellFeatures, GrowCutOutcome};

use crate::error::{Error, Result};
use crate::imaging::{connected_components, BinaryMask, CandidateObject, GrayImage};

/// Seed labels for the grow-cut automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellLabel {
    Unlabeled,
    Foreground,
    Background,
}

/// Seed layout: every pixel starts unlabeled, foreground or background.
#[derive(Debug, Clone)]
pub struct SeedMask {
    width: usize,
    height: usize,
    labels: Vec<CellLabel>,
}

impl SeedMask {
    pub fn new(width: usize, height: usize, labels: Vec<CellLabel>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::Parameter(format!(
                "seed mask holds {} labels, expected {}",
                labels.len(),
                width * height
            )));
        }
        let fg = labels.iter().any(|&l| l == CellLabel::Foreground);
        let bg = labels.iter().any(|&l| l == CellLabel::Background);
        if !fg || !bg {
            return Err(Error::Parameter(
                "seed mask needs at least one foreground and one background seed".into(),
            ));
        }
        Ok(Self { width, height, labels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[CellLabel] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> CellLabel {
        self.labels[y * self.width + x]
    }
}

/// Per-pixel count of thresholds the pixel is dark under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerImage {
    width: usize,
    height: usize,
    counts: Vec<u8>,
}

impl LayerImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.counts[y * self.width + x]
    }

    /// Debug rendering: layer counts 0..3 stretched to 0..255.
    pub fn to_gray(&self) -> GrayImage {
        let data = self.counts.iter().map(|&c| c.saturating_mul(85)).collect();
        GrayImage::new(self.width, self.height, data).expect("same dims")
    }
}

/// Geometry-only seeding for images shot on a uniform background: the
/// `border`-pixel outer ring is background, a centered square core of side
/// `core_fraction * min(width, height)` is foreground.
pub fn auto_seed(image_width: usize, image_height: usize, border: usize, core_fraction: f64) -> Result<SeedMask> {
    if border == 0 {
        return Err(Error::Parameter("seed border must be at least 1".into()));
    }
    if !(core_fraction > 0.0 && core_fraction < 1.0) {
        return Err(Error::Parameter(format!(
            "core fraction must lie in (0, 1), got {core_fraction}"
        )));
    }
    let side = ((image_width.min(image_height)) as f64 * core_fraction).round().max(1.0) as usize;
    let x0 = (image_width.saturating_sub(side)) / 2;
    let y0 = (image_height.saturating_sub(side)) / 2;
    if x0 < border || y0 < border || x0 + side + border > image_width || y0 + side + border > image_height {
        return Err(Error::Parameter(format!(
            "core square of side {side} overlaps the {border}-pixel border ring in a {image_width}x{image_height} image"
        )));
    }
    let mut labels = vec![CellLabel::Unlabeled; image_width * image_height];
    for y in 0..image_height {
        for x in 0..image_width {
            if x < border || y < border || x >= image_width - border || y >= image_height - border {
                labels[y * image_width + x] = CellLabel::Background;
            } else if x >= x0 && x < x0 + side && y >= y0 && y < y0 + side {
                labels[y * image_width + x] = CellLabel::Foreground;
            }
        }
    }
    SeedMask::new(image_width, image_height, labels)
}

/// Layer counting: `counts[p]` is the number of thresholds `t` with
/// `intensity[p] < t`. Dark pixels (stem, calyx, defects) score high.
pub fn multi_threshold(image: &GrayImage, thresholds: [u8; 3]) -> Result<LayerImage> {
    if !(thresholds[0] < thresholds[1] && thresholds[1] < thresholds[2]) {
        return Err(Error::Parameter(format!(
            "thresholds must be strictly ascending, got {thresholds:?}"
        )));
    }
    if thresholds[0] == 0 {
        return Err(Error::Parameter("thresholds must be at least 1".into()));
    }
    let counts = image
        .data()
        .iter()
        .map(|&v| thresholds.iter().filter(|&&t| v < t).count() as u8)
        .collect();
    Ok(LayerImage {
        width: image.width(),
        height: image.height(),
        counts,
    })
}

/// Marker image: pixels dark under at least `min_layers` thresholds.
pub fn marker_from_layers(layers: &LayerImage, min_layers: u8) -> Result<BinaryMask> {
    if !(1..=3).contains(&min_layers) {
        return Err(Error::Parameter(format!(
            "min_layers must lie in 1..=3, got {min_layers}"
        )));
    }
    let bits = layers.counts.iter().map(|&c| c >= min_layers).collect();
    BinaryMask::new(layers.width, layers.height, bits)
}

/// Region growth from the marker into 8-neighbors that are either marker
/// pixels themselves or sit on a strong gradient. Runs to fixpoint; the
/// result always contains the marker.
pub fn gradient_refine(
    marker: &BinaryMask,
    gradient: &GrayImage,
    grad_threshold: u8,
) -> Result<BinaryMask> {
    if marker.width() != gradient.width() || marker.height() != gradient.height() {
        return Err(Error::Parameter(format!(
            "marker {}x{} and gradient {}x{} dimensions differ",
            marker.width(),
            marker.height(),
            gradient.width(),
            gradient.height()
        )));
    }
    let (w, h) = (marker.width(), marker.height());
    let admissible = |x: usize, y: usize| marker.get(x, y) || gradient.get(x, y) >= grad_threshold;
    let mut result = BinaryMask::empty(w, h);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if marker.get(x, y) && !result.get(x, y) {
                result.set(x, y, true);
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if !result.get(nx, ny) && admissible(nx, ny) {
                    result.set(nx, ny, true);
                    stack.push((nx, ny));
                }
            }
        }
    }
    Ok(result)
}

/// Final detection: candidates must lie on the fruit, then component
/// labelling with the area filter.
pub fn detect_candidates(
    fruit: &BinaryMask,
    refined: &BinaryMask,
    min_area: usize,
) -> Result<Vec<CandidateObject>> {
    let on_fruit = refined.intersect(fruit)?;
    connected_components(&on_fruit, min_area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_seed_counts_match_geometry() {
        let seeds = auto_seed(100, 100, 2, 0.2).unwrap();
        let bg = seeds.labels().iter().filter(|&&l| l == CellLabel::Background).count();
        let fg = seeds.labels().iter().filter(|&&l| l == CellLabel::Foreground).count();
        assert_eq!(bg, 100 * 100 - 96 * 96); // 784
        assert_eq!(fg, 20 * 20);
    }

    #[test]
    fn auto_seed_degenerate_geometry() {
        assert!(auto_seed(10, 10, 5, 0.2).is_err());
    }

    #[test]
    fn multi_threshold_direct_comparison() {
        let img = GrayImage::new(4, 1, vec![20, 40, 60, 200]).unwrap();
        let layers = multi_threshold(&img, [30, 50, 65]).unwrap();
        assert_eq!(layers.counts(), &[3, 2, 1, 0]);
    }

    #[test]
    fn multi_threshold_bright_image_is_zero() {
        let img = GrayImage::filled(8, 8, 255);
        let layers = multi_threshold(&img, [30, 50, 65]).unwrap();
        assert!(layers.counts().iter().all(|&c| c == 0));
    }

    #[test]
    fn multi_threshold_matches_triple_binarize_sum() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(17);
        let data: Vec<u8> = (0..100).map(|_| rng.below(256) as u8).collect();
        let img = GrayImage::new(10, 10, data).unwrap();
        let thresholds = [30u8, 50, 65];
        let layers = multi_threshold(&img, thresholds).unwrap();
        for (i, &v) in img.data().iter().enumerate() {
            let oracle: u8 = thresholds.iter().map(|&t| u8::from(v < t)).sum();
            assert_eq!(layers.counts()[i], oracle);
        }
    }

    #[test]
    fn multi_threshold_rejects_unsorted() {
        let img = GrayImage::filled(2, 2, 0);
        assert!(multi_threshold(&img, [50, 30, 65]).is_err());
        assert!(multi_threshold(&img, [30, 30, 65]).is_err());
    }

    #[test]
    fn multi_threshold_counts_antitone_in_intensity() {
        let img = GrayImage::new(3, 1, vec![10, 50, 90]).unwrap();
        let layers = multi_threshold(&img, [30, 60, 100]).unwrap();
        assert!(layers.counts()[0] >= layers.counts()[1]);
        assert!(layers.counts()[1] >= layers.counts()[2]);
    }

    #[test]
    fn marker_respects_min_layers() {
        let img = GrayImage::new(4, 1, vec![20, 40, 60, 200]).unwrap();
        let layers = multi_threshold(&img, [30, 50, 65]).unwrap();
        let m2 = marker_from_layers(&layers, 2).unwrap();
        assert_eq!(m2.bits(), &[true, true, false, false]);
        // monotone: loosening min_layers only grows the marker
        let m1 = marker_from_layers(&layers, 1).unwrap();
        let m3 = marker_from_layers(&layers, 3).unwrap();
        for i in 0..4 {
            assert!(m1.bits()[i] >= m2.bits()[i]);
            assert!(m2.bits()[i] >= m3.bits()[i]);
        }
        // extremes match single binarizations
        for (i, &v) in img.data().iter().enumerate() {
            assert_eq!(m1.bits()[i], v < 65);
            assert_eq!(m3.bits()[i], v < 30);
        }
    }

    #[test]
    fn marker_rejects_bad_min_layers() {
        let img = GrayImage::filled(2, 2, 0);
        let layers = multi_threshold(&img, [30, 50, 65]).unwrap();
        assert!(marker_from_layers(&layers, 0).is_err());
        assert!(marker_from_layers(&layers, 4).is_err());
    }

    #[test]
    fn refine_without_gradient_is_marker() {
        let mut marker = BinaryMask::empty(5, 5);
        marker.set(2, 2, true);
        let grad = GrayImage::filled(5, 5, 0);
        let refined = gradient_refine(&marker, &grad, 40).unwrap();
        assert_eq!(refined, marker);
    }

    #[test]
    fn refine_grows_into_gradient_ring() {
        // marker pixel inside a ring of strong gradient
        let mut marker = BinaryMask::empty(7, 7);
        marker.set(3, 3, true);
        let mut grad = GrayImage::filled(7, 7, 0);
        for y in 2..=4 {
            for x in 2..=4 {
                grad.set(x, y, 100);
            }
        }
        let refined = gradient_refine(&marker, &grad, 40).unwrap();
        // flood-fill oracle over the admissible set
        let mut expect = BinaryMask::empty(7, 7);
        for y in 2..=4 {
            for x in 2..=4 {
                expect.set(x, y, true);
            }
        }
        assert_eq!(refined, expect);
        // fixpoint: refining again with the result as marker changes nothing
        let again = gradient_refine(&refined, &grad, 40).unwrap();
        assert_eq!(again, refined);
    }

    #[test]
    fn refine_empty_marker_is_empty() {
        let marker = BinaryMask::empty(4, 4);
        let grad = GrayImage::filled(4, 4, 200);
        let refined = gradient_refine(&marker, &grad, 40).unwrap();
        assert_eq!(refined.count_true(), 0);
    }

    #[test]
    fn refine_contains_marker() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(31);
        let bits: Vec<bool> = (0..64).map(|_| rng.next_f64() < 0.2).collect();
        let marker = BinaryMask::new(8, 8, bits).unwrap();
        let gdata: Vec<u8> = (0..64).map(|_| rng.below(256) as u8).collect();
        let grad = GrayImage::new(8, 8, gdata).unwrap();
        let refined = gradient_refine(&marker, &grad, 128).unwrap();
        for i in 0..64 {
            assert!(!marker.bits()[i] || refined.bits()[i]);
        }
    }

    #[test]
    fn candidates_outside_fruit_are_dropped() {
        let mut fruit = BinaryMask::empty(8, 8);
        for y in 0..4 {
            for x in 0..4 {
                fruit.set(x, y, true);
            }
        }
        let mut refined = BinaryMask::empty(8, 8);
        refined.set(6, 6, true);
        refined.set(6, 7, true);
        assert!(detect_candidates(&fruit, &refined, 1).unwrap().is_empty());
    }

    #[test]
    fn candidates_are_disjoint_and_on_fruit() {
        let mut fruit = BinaryMask::empty(10, 10);
        for y in 0..10 {
            for x in 0..10 {
                fruit.set(x, y, true);
            }
        }
        let mut refined = BinaryMask::empty(10, 10);
        for y in 1..3 {
            for x in 1..4 {
                refined.set(x, y, true);
            }
        }
        refined.set(7, 7, true);
        let cs = detect_candidates(&fruit, &refined, 1).unwrap();
        assert_eq!(cs.len(), 2);
        let total: usize = cs.iter().map(|c| c.area).sum();
        assert_eq!(total, 7);
        // min_area above the smaller spot keeps only the big one
        let cs = detect_candidates(&fruit, &refined, 2).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].area, 6);
    }
}

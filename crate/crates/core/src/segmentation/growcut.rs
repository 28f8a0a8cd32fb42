//! Grow-cut cellular automaton over the Von Neumann neighborhood.
//!
//! Each cell carries a label and a strength in [0, 1]; seeds start at 1.0.
//! A neighbor q attacks p with g(|C_p - C_q|) * strength(q), where
//! g(x) = 1 - x / max_norm, and conquers p when the attack strictly exceeds
//! p's strength. Updates are synchronous (every cell reads the previous
//! pass), so runs are deterministic. A cell's strength never decreases and a
//! pass with no change is a fixpoint, which bounds the iteration.
//!
//! Only cells adjacent to cells changed in the previous pass can change, so
//! each pass scans the active frontier instead of the whole image.

use super::{CellLabel, SeedMask};
use crate::error::{Error, Result};
use crate::imaging::{BinaryMask, ColorImage, GrayImage};

/// Pixel features the automaton can measure distances on.
pub trait CellFeatures {
    fn dims(&self) -> (usize, usize);
    /// Feature distance between two pixels, normalized to [0, 1].
    fn distance_norm(&self, a: usize, b: usize) -> f64;
}

impl CellFeatures for GrayImage {
    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    #[inline]
    fn distance_norm(&self, a: usize, b: usize) -> f64 {
        (self.data()[a] as f64 - self.data()[b] as f64).abs() / 255.0
    }
}

impl CellFeatures for ColorImage {
    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    #[inline]
    fn distance_norm(&self, a: usize, b: usize) -> f64 {
        const MAX_NORM: f64 = 441.672_955_930_063_7; // 255 * sqrt(3)
        let pa = &self.data()[3 * a..3 * a + 3];
        let pb = &self.data()[3 * b..3 * b + 3];
        let dr = pa[0] as f64 - pb[0] as f64;
        let dg = pa[1] as f64 - pb[1] as f64;
        let db = pa[2] as f64 - pb[2] as f64;
        (dr * dr + dg * dg + db * db).sqrt() / MAX_NORM
    }
}

/// Result of a grow-cut run: the foreground mask plus convergence data.
#[derive(Debug, Clone)]
pub struct GrowCutOutcome {
    pub mask: BinaryMask,
    /// Full passes executed, including the final no-change pass.
    pub passes: usize,
    /// False when `max_iters` elapsed before a fixpoint.
    pub converged: bool,
}

/// Runs the automaton until a pass changes nothing or `max_iters` passes
/// elapse. Cells still unlabeled at the end count as background.
pub fn grow_cut<I: CellFeatures>(
    image: &I,
    seeds: &SeedMask,
    max_iters: usize,
) -> Result<GrowCutOutcome> {
    let (w, h) = image.dims();
    if seeds.width() != w || seeds.height() != h {
        return Err(Error::Parameter(format!(
            "seed mask {}x{} does not match image {w}x{h}",
            seeds.width(),
            seeds.height()
        )));
    }
    let n = w * h;
    let mut labels: Vec<CellLabel> = seeds.labels().to_vec();
    let mut strengths: Vec<f64> = labels
        .iter()
        .map(|&l| if l == CellLabel::Unlabeled { 0.0 } else { 1.0 })
        .collect();

    // Frontier bookkeeping: a cell is examined next pass iff a Von Neumann
    // neighbor changed this pass.
    let mut active: Vec<u32> = (0..n as u32).collect();
    let mut next_active_flags = vec![false; n];
    let mut pending: Vec<(u32, CellLabel, f64)> = Vec::new();

    let neighbor = |idx: usize, dir: usize| -> Option<usize> {
        let x = idx % w;
        let y = idx / w;
        match dir {
            0 if y > 0 => Some(idx - w),
            1 if x > 0 => Some(idx - 1),
            2 if x + 1 < w => Some(idx + 1),
            3 if y + 1 < h => Some(idx + w),
            _ => None,
        }
    };

    let mut passes = 0;
    let mut converged = false;
    while passes < max_iters {
        passes += 1;
        pending.clear();
        for &idx in &active {
            let p = idx as usize;
            let mut best_strength = strengths[p];
            let mut best_label = labels[p];
            let mut changed = false;
            for dir in 0..4 {
                let Some(q) = neighbor(p, dir) else { continue };
                if labels[q] == CellLabel::Unlabeled {
                    continue;
                }
                let attack = (1.0 - image.distance_norm(p, q)) * strengths[q];
                if attack > best_strength {
                    best_strength = attack;
                    best_label = labels[q];
                    changed = true;
                }
            }
            if changed {
                pending.push((idx, best_label, best_strength));
            }
        }
        if pending.is_empty() {
            converged = true;
            break;
        }
        active.clear();
        for &(idx, label, strength) in &pending {
            let p = idx as usize;
            labels[p] = label;
            strengths[p] = strength;
            for dir in 0..4 {
                if let Some(q) = neighbor(p, dir) {
                    if !next_active_flags[q] {
                        next_active_flags[q] = true;
                        active.push(q as u32);
                    }
                }
            }
            if !next_active_flags[p] {
                next_active_flags[p] = true;
                active.push(idx);
            }
        }
        active.sort_unstable();
        for &idx in &active {
            next_active_flags[idx as usize] = false;
        }
    }

    let bits = labels.iter().map(|&l| l == CellLabel::Foreground).collect();
    Ok(GrowCutOutcome {
        mask: BinaryMask::new(w, h, bits)?,
        passes,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::auto_seed;

    #[test]
    fn fully_seeded_image_is_a_fixpoint() {
        let img = GrayImage::filled(4, 4, 10);
        let labels: Vec<CellLabel> = (0..16)
            .map(|i| {
                if i % 2 == 0 {
                    CellLabel::Foreground
                } else {
                    CellLabel::Background
                }
            })
            .collect();
        let seeds = SeedMask::new(4, 4, labels.clone()).unwrap();
        let out = grow_cut(&img, &seeds, 100).unwrap();
        assert!(out.converged);
        assert_eq!(out.passes, 1);
        for (i, &l) in labels.iter().enumerate() {
            assert_eq!(out.mask.bits()[i], l == CellLabel::Foreground);
        }
    }

    #[test]
    fn seeds_never_relabel() {
        // dark disk on bright background with deliberately WRONG core seeds
        // still cannot flip a strength-1.0 seed
        let mut img = GrayImage::filled(32, 32, 200);
        for y in 10..22 {
            for x in 10..22 {
                img.set(x, y, 20);
            }
        }
        let seeds = auto_seed(32, 32, 2, 0.25).unwrap();
        let out = grow_cut(&img, &seeds, 64).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                match seeds.get(x, y) {
                    CellLabel::Foreground => assert!(out.mask.get(x, y)),
                    CellLabel::Background => assert!(!out.mask.get(x, y)),
                    CellLabel::Unlabeled => {}
                }
            }
        }
    }

    #[test]
    fn uniform_image_is_an_l1_wavefront_race() {
        // one foreground seed at the center, background ring; g = 1
        // everywhere, so cells strictly nearer (L1) to the center than to
        // the ring become foreground
        let side = 21usize;
        let img = GrayImage::filled(side, side, 128);
        let mut labels = vec![CellLabel::Unlabeled; side * side];
        for y in 0..side {
            for x in 0..side {
                if x == 0 || y == 0 || x == side - 1 || y == side - 1 {
                    labels[y * side + x] = CellLabel::Background;
                }
            }
        }
        let c = side / 2;
        labels[c * side + c] = CellLabel::Foreground;
        let seeds = SeedMask::new(side, side, labels).unwrap();
        let out = grow_cut(&img, &seeds, 2 * side).unwrap();
        assert!(out.converged);
        for y in 0..side {
            for x in 0..side {
                let d_fg = (x as isize - c as isize).unsigned_abs()
                    + (y as isize - c as isize).unsigned_abs();
                let d_bg = [x, y, side - 1 - x, side - 1 - y].into_iter().min().unwrap();
                if d_fg < d_bg {
                    assert!(out.mask.get(x, y), "({x},{y}) nearer to fg seed");
                } else if d_bg < d_fg {
                    assert!(!out.mask.get(x, y), "({x},{y}) nearer to bg ring");
                }
            }
        }
    }

    #[test]
    fn color_distance_is_normalized() {
        let img = ColorImage::new(2, 1, vec![0, 0, 0, 255, 255, 255]).unwrap();
        assert!((img.distance_norm(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(img.distance_norm(0, 0), 0.0);
    }

    #[test]
    fn strengths_bounded_and_convergence_within_dims() {
        let mut img = GrayImage::filled(48, 40, 30);
        for y in 8..32 {
            for x in 10..38 {
                img.set(x, y, 190);
            }
        }
        let seeds = auto_seed(48, 40, 2, 0.25).unwrap();
        let out = grow_cut(&img, &seeds, 48 + 40).unwrap();
        assert!(out.converged, "should settle within width+height passes");
        assert!(out.passes <= 88);
    }

    #[test]
    fn rejects_mismatched_seed_dimensions() {
        let img = GrayImage::filled(8, 8, 0);
        let seeds = auto_seed(10, 10, 1, 0.3).unwrap();
        assert!(grow_cut(&img, &seeds, 10).is_err());
    }
}

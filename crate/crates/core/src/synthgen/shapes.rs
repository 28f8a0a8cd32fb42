//! Candidate shape families and fractal test masks.
//!
//! The three classes are separable by design, each along a different
//! descriptor axis: stems are elongated capsules (projection anisotropy),
//! calyxes are rings or near-closed ring sectors (a hole and strong contour
//! harmonics), defects are compact superellipse blobs. Shapes are defined as
//! implicit membership tests in continuous coordinates and rasterized at
//! pixel centers, so scaling and rotating a spec really transforms the
//! geometry rather than the raster.

use super::SynthSpec;
use crate::classify::ClassLabel;
use crate::error::{Error, Result};
use crate::imaging::BinaryMask;
use crate::rng::SplitMix64;

/// Sierpinski carpet of the given depth: a 3^depth square with the middle
/// ninth removed recursively; exactly 8^depth object pixels.
pub fn gen_sierpinski(depth: u32) -> Result<BinaryMask> {
    if !(1..=6).contains(&depth) {
        return Err(Error::Parameter(format!(
            "carpet depth must lie in 1..=6, got {depth}"
        )));
    }
    let side = 3usize.pow(depth);
    let mut bits = vec![true; side * side];
    for y in 0..side {
        for x in 0..side {
            let (mut xx, mut yy) = (x, y);
            for _ in 0..depth {
                if xx % 3 == 1 && yy % 3 == 1 {
                    bits[y * side + x] = false;
                    break;
                }
                xx /= 3;
                yy /= 3;
            }
        }
    }
    BinaryMask::new(side, side, bits)
}

/// Base linear sizes (at scale 1.0) for the three families.
const STEM_RADIUS: f64 = 5.0;
const STEM_HALF_LENGTH: f64 = 20.0;
const CALYX_OUTER_RADIUS: f64 = 24.0;
const DEFECT_RADIUS: f64 = 12.0;

/// Rasterizes the shape described by `spec`, cropped to its bounding box.
pub fn gen_candidate_shape(spec: &SynthSpec) -> Result<BinaryMask> {
    let mask = rasterize(spec)?;
    if mask.count_true() < 20 {
        return Err(Error::Degenerate(format!(
            "spec produced only {} pixels (scale {} too small)",
            mask.count_true(),
            spec.scale
        )));
    }
    Ok(mask)
}

fn rasterize(spec: &SynthSpec) -> Result<BinaryMask> {
    let mut rng = SplitMix64::new(spec.rng_seed);
    let theta = spec.rotation_deg.to_radians();
    let (sin_t, cos_t) = theta.sin_cos();

    // Per-shape randomness, drawn identically regardless of rasterization.
    let lobes = (3 + rng.below(5)) as f64; // 3..=7 jitter lobes
    let phase = rng.range_f64(0.0, std::f64::consts::TAU);
    let ring_full = rng.next_f64() < 0.6;
    let span_deg = if ring_full { 360.0 } else { rng.range_f64(240.0, 330.0) };
    let exponent = rng.range_f64(1.5, 2.5);
    let axis_ratio = rng.range_f64(0.75, 1.0);

    let s = spec.scale;
    let jitter = spec.jitter;
    let reach = match spec.class {
        ClassLabel::Stem => (STEM_HALF_LENGTH + STEM_RADIUS) * s,
        ClassLabel::Calyx => CALYX_OUTER_RADIUS * s,
        ClassLabel::Defect => DEFECT_RADIUS * s,
    } * (1.0 + jitter)
        + 2.0;
    let half = reach.ceil() as isize + 1;
    let side = (2 * half + 1) as usize;
    let center = half as f64;

    let inside = |px: f64, py: f64| -> bool {
        // rotate the query point back into the shape frame
        let dx = px - center;
        let dy = py - center;
        let u = cos_t * dx + sin_t * dy;
        let v = -sin_t * dx + cos_t * dy;
        match spec.class {
            ClassLabel::Stem => {
                let a = STEM_HALF_LENGTH * s;
                let r = STEM_RADIUS * s;
                let uc = u.clamp(-a, a);
                let ang = (v).atan2(u - uc);
                let rj = r * (1.0 + jitter * (lobes * ang + phase).sin());
                (u - uc).powi(2) + v * v <= rj * rj
            }
            ClassLabel::Calyx => {
                let outer = CALYX_OUTER_RADIUS * s;
                let rr = (u * u + v * v).sqrt();
                let ang = v.atan2(u);
                let rj = 1.0 + jitter * (lobes * ang + phase).sin();
                let ro = outer * rj;
                let ri = 0.5 * outer * rj;
                if rr < ri || rr > ro {
                    return false;
                }
                if span_deg >= 360.0 {
                    true
                } else {
                    let half_span = span_deg.to_radians() / 2.0;
                    ang.abs() <= half_span
                }
            }
            ClassLabel::Defect => {
                let a = DEFECT_RADIUS * s;
                let b = a * axis_ratio;
                let ang = v.atan2(u);
                let rj = 1.0 + jitter * (lobes * ang + phase).sin();
                (u / (a * rj)).abs().powf(exponent) + (v / (b * rj)).abs().powf(exponent) <= 1.0
            }
        }
    };

    let mut bits = vec![false; side * side];
    let mut min_x = side;
    let mut max_x = 0usize;
    let mut min_y = side;
    let mut max_y = 0usize;
    for y in 0..side {
        for x in 0..side {
            if inside(x as f64, y as f64) {
                bits[y * side + x] = true;
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
            }
        }
    }
    if min_x > max_x {
        return Err(Error::Degenerate("spec rasterized to an empty mask".into()));
    }
    let (w, h) = (max_x - min_x + 1, max_y - min_y + 1);
    let mut cropped = BinaryMask::empty(w, h);
    for y in 0..h {
        for x in 0..w {
            if bits[(y + min_y) * side + (x + min_x)] {
                cropped.set(x, y, true);
            }
        }
    }
    Ok(cropped)
}

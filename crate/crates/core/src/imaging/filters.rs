//! Pixel filters: RGB-to-luma conversion, median smoothing and the Sobel
//! gradient magnitude. Borders are handled by edge replication throughout,
//! which avoids manufacturing dark rims that the threshold stage would then
//! pick up as candidates.

use super::{ColorImage, GrayImage};
use crate::error::{Error, Result};

/// Rec.601 luma: round(0.299 R + 0.587 G + 0.114 B).
pub fn to_grayscale(image: &ColorImage) -> GrayImage {
    let data = image
        .data()
        .chunks_exact(3)
        .map(|p| {
            let luma = 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
            luma.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(image.width(), image.height(), data).expect("same dims")
}

/// Median over a (2 radius + 1)^2 replicated-border window.
pub fn median_filter(image: &GrayImage, radius: usize) -> Result<GrayImage> {
    if radius == 0 {
        return Err(Error::Parameter("median radius must be at least 1".into()));
    }
    let side = 2 * radius + 1;
    if side > image.width() && side > image.height() {
        return Err(Error::Parameter(format!(
            "median window {side}x{side} exceeds both image dimensions {}x{}",
            image.width(),
            image.height()
        )));
    }
    let (w, h) = (image.width(), image.height());
    let mut out = vec![0u8; w * h];
    let mut window = vec![0u8; side * side];
    for y in 0..h {
        for x in 0..w {
            let mut n = 0;
            for dy in -(radius as isize)..=radius as isize {
                for dx in -(radius as isize)..=radius as isize {
                    window[n] = image.get_clamped(x as isize + dx, y as isize + dy);
                    n += 1;
                }
            }
            window.sort_unstable();
            out[y * w + x] = window[window.len() / 2];
        }
    }
    GrayImage::new(w, h, out)
}

/// Clamped gradient magnitude min(255, round(sqrt(Gx^2 + Gy^2))) from the
/// standard 3x3 Sobel kernels.
pub fn sobel_magnitude(image: &GrayImage) -> Result<GrayImage> {
    if image.width() < 3 || image.height() < 3 {
        return Err(Error::Parameter(format!(
            "sobel needs at least a 3x3 image, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    let (w, h) = (image.width(), image.height());
    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let p = |dx: isize, dy: isize| image.get_clamped(x as isize + dx, y as isize + dy) as f64;
            let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let mag = (gx * gx + gy * gy).sqrt().round();
            out[y * w + x] = mag.min(255.0) as u8;
        }
    }
    GrayImage::new(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn luma_endpoints() {
        let c = ColorImage::new(3, 1, vec![255, 255, 255, 0, 0, 0, 255, 0, 0]).unwrap();
        let g = to_grayscale(&c);
        // round(0.299 * 255) = 76, checked by hand
        assert_eq!(g.data(), &[255, 0, 76]);
    }

    #[test]
    fn median_of_constant_is_identity() {
        let img = GrayImage::filled(6, 4, 99);
        assert_eq!(median_filter(&img, 1).unwrap(), img);
    }

    #[test]
    fn median_removes_single_outlier() {
        let mut img = GrayImage::filled(3, 3, 0);
        img.set(1, 1, 255);
        let out = median_filter(&img, 1).unwrap();
        assert_eq!(out.get(1, 1), 0);
    }

    #[test]
    fn median_matches_window_sort_oracle() {
        let mut rng = SplitMix64::new(11);
        let data: Vec<u8> = (0..25).map(|_| rng.below(256) as u8).collect();
        let img = GrayImage::new(5, 5, data).unwrap();
        let out = median_filter(&img, 1).unwrap();
        for y in 0..5isize {
            for x in 0..5isize {
                let mut win = Vec::new();
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        win.push(img.get_clamped(x + dx, y + dy));
                    }
                }
                win.sort_unstable();
                assert_eq!(out.get(x as usize, y as usize), win[4], "at ({x},{y})");
            }
        }
    }

    #[test]
    fn median_window_too_large() {
        let img = GrayImage::filled(4, 4, 0);
        assert!(median_filter(&img, 2).is_err());
        // ok when one dimension still fits
        let tall = GrayImage::filled(3, 9, 0);
        assert!(median_filter(&tall, 2).is_ok());
    }

    #[test]
    fn sobel_of_constant_is_zero() {
        let img = GrayImage::filled(5, 5, 120);
        assert!(sobel_magnitude(&img).unwrap().data().iter().all(|&v| v == 0));
    }

    #[test]
    fn sobel_step_edge_saturates() {
        // columns 0..2 black, 3..5 white; the response at the transition
        // is 4 * 255, clamped to 255
        let mut img = GrayImage::filled(6, 5, 0);
        for y in 0..5 {
            for x in 3..6 {
                img.set(x, y, 255);
            }
        }
        let out = sobel_magnitude(&img).unwrap();
        for y in 0..5 {
            assert_eq!(out.get(2, y), 255);
            assert_eq!(out.get(3, y), 255);
            assert_eq!(out.get(0, y), 0);
        }
    }

    #[test]
    fn sobel_matches_direct_convolution() {
        let mut rng = SplitMix64::new(23);
        let data: Vec<u8> = (0..49).map(|_| rng.below(256) as u8).collect();
        let img = GrayImage::new(7, 7, data).unwrap();
        let out = sobel_magnitude(&img).unwrap();
        let kx = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
        let ky = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
        for y in 0..7isize {
            for x in 0..7isize {
                let mut gx = 0.0;
                let mut gy = 0.0;
                for j in 0..3 {
                    for i in 0..3 {
                        let v = img.get_clamped(x + i as isize - 1, y + j as isize - 1) as f64;
                        gx += kx[j][i] * v;
                        gy += ky[j][i] * v;
                    }
                }
                let expect = (gx * gx + gy * gy).sqrt().round().min(255.0) as u8;
                assert_eq!(out.get(x as usize, y as usize), expect);
            }
        }
    }

    #[test]
    fn sobel_rejects_tiny_images() {
        let img = GrayImage::filled(2, 5, 0);
        assert!(sobel_magnitude(&img).is_err());
    }

    #[test]
    fn median_idempotent_on_two_level_regions() {
        // a 10x10 block well above the window size: second pass is a no-op
        let mut img = GrayImage::filled(20, 20, 0);
        for y in 5..15 {
            for x in 5..15 {
                img.set(x, y, 255);
            }
        }
        let once = median_filter(&img, 1).unwrap();
        let twice = median_filter(&once, 1).unwrap();
        assert_eq!(once, twice);
    }
}

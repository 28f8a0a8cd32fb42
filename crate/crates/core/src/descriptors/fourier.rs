//! Fourier boundary descriptor.
//!
//! The boundary chain becomes a complex sequence s(k) = x(k) + i y(k); the
//! forward transform a(u) = (1/N) sum s(k) exp(-j 2 pi u k / N) and its
//! inverse are computed directly. The descriptor resamples the chain to a
//! fixed number of points by uniform arc length, takes coefficient
//! magnitudes (rotation and start invariance), drops the DC term
//! (translation) and divides by the AC spectral energy (scale).
//!
//! Chains are shifted to their bounding-box origin (exact integer
//! arithmetic) and rotated to a canonical start vertex before any floating
//! point work, so translated or start-shifted copies of a shape produce
//! bit-identical descriptors. Chain points sit on pixel centers half a pixel
//! inside the true region edge; each point is therefore pushed 0.5 px along
//! the outward normal before resampling, which keeps thin structures
//! comparable across scales.

use num_complex::Complex64;

use super::{BlockKind, FeatureBlock};
use crate::error::{Error, Result};
use crate::imaging::BoundaryChain;

/// Chain order as a complex sequence s(k) = x_k + i y_k.
pub fn boundary_to_complex(chain: &BoundaryChain) -> Result<Vec<Complex64>> {
    if chain.len() < 4 {
        return Err(Error::Degenerate(format!(
            "boundary chain of length {} is too short for Fourier analysis (need 4)",
            chain.len()
        )));
    }
    Ok(chain
        .points
        .iter()
        .map(|&(x, y)| Complex64::new(x as f64, y as f64))
        .collect())
}

/// Forward DFT with the 1/N normalization; a(0) is the point centroid.
pub fn fourier_coefficients(s: &[Complex64]) -> Vec<Complex64> {
    let n = s.len();
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|u| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &sk) in s.iter().enumerate() {
                let phase = -std::f64::consts::TAU * (u as f64) * (k as f64) / n as f64;
                acc += sk * Complex64::from_polar(1.0, phase);
            }
            acc * scale
        })
        .collect()
}

/// Inverse transform keeping only the `keep` lowest frequencies: DC first,
/// then +1, -1, +2, -2, ... until `keep` coefficients are retained.
pub fn reconstruct_boundary(a: &[Complex64], keep: usize) -> Result<Vec<Complex64>> {
    let n = a.len();
    if keep == 0 || keep > n {
        return Err(Error::Parameter(format!(
            "keep must lie in 1..={n}, got {keep}"
        )));
    }
    let mut retained = vec![false; n];
    let mut taken = 0;
    let mut freq = 0usize;
    'outer: loop {
        for idx in [freq, n - freq] {
            let idx = idx % n;
            if !retained[idx] {
                retained[idx] = true;
                taken += 1;
                if taken == keep {
                    break 'outer;
                }
            }
        }
        freq += 1;
    }
    Ok((0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (u, &au) in a.iter().enumerate() {
                if retained[u] {
                    let phase = std::f64::consts::TAU * (u as f64) * (k as f64) / n as f64;
                    acc += au * Complex64::from_polar(1.0, phase);
                }
            }
            acc
        })
        .collect())
}

/// Normalized magnitude descriptor: `k` values for frequencies u = 2..k+1 of
/// the `n0`-point arc-length resampled contour.
pub fn fourier_descriptor(chain: &BoundaryChain, n0: usize, k: usize) -> Result<FeatureBlock> {
    if n0 < 8 {
        return Err(Error::Parameter(format!(
            "resample count must be at least 8, got {n0}"
        )));
    }
    if k + 2 > n0 {
        return Err(Error::Parameter(format!(
            "descriptor count {k} does not fit below the resample count {n0}"
        )));
    }
    if chain.len() < 4 {
        return Err(Error::Degenerate(format!(
            "boundary chain of length {} is too short for a Fourier descriptor",
            chain.len()
        )));
    }

    let canonical = canonicalize(chain);
    let offset = offset_outward(&canonical, 0.5);
    let resampled = resample_closed(&offset, n0);
    let coeffs = fourier_coefficients(&resampled);

    let energy: f64 = coeffs[1..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if energy < 1e-9 {
        return Err(Error::Degenerate(
            "boundary spectrum has no AC energy; contour collapses to a point".into(),
        ));
    }
    let values = (2..2 + k).map(|u| coeffs[u].norm() / energy).collect();
    Ok(FeatureBlock {
        kind: BlockKind::Fourier,
        values,
    })
}

/// Integer canonical form: translate to the bounding-box origin and start at
/// the lexicographically smallest (y, x) vertex. Both steps are exact, which
/// makes translation and start-shift invariance of the descriptor exact.
fn canonicalize(chain: &BoundaryChain) -> Vec<(i64, i64)> {
    let min_x = chain.points.iter().map(|p| p.0).min().unwrap();
    let min_y = chain.points.iter().map(|p| p.1).min().unwrap();
    let shifted: Vec<(i64, i64)> = chain
        .points
        .iter()
        .map(|&(x, y)| (x - min_x, y - min_y))
        .collect();
    let start = shifted
        .iter()
        .enumerate()
        .min_by_key(|(_, &(x, y))| (y, x))
        .map(|(i, _)| i)
        .unwrap();
    let mut out = Vec::with_capacity(shifted.len());
    out.extend_from_slice(&shifted[start..]);
    out.extend_from_slice(&shifted[..start]);
    out
}

/// Pushes each point half a pixel along the outward normal, estimated from
/// the neighbor difference. Counterclockwise chains in (x, y) have the
/// outward normal at (ty, -tx) for tangent (tx, ty).
fn offset_outward(points: &[(i64, i64)], amount: f64) -> Vec<(f64, f64)> {
    let n = points.len();
    (0..n)
        .map(|k| {
            let (px, py) = points[k];
            let (mx, my) = points[(k + n - 1) % n];
            let (qx, qy) = points[(k + 1) % n];
            let tx = (qx - mx) as f64;
            let ty = (qy - my) as f64;
            let len = (tx * tx + ty * ty).sqrt();
            if len < 1e-12 {
                (px as f64, py as f64)
            } else {
                (px as f64 + amount * ty / len, py as f64 - amount * tx / len)
            }
        })
        .collect()
}

/// Uniform arc-length resampling of the closed polygon through `points`.
fn resample_closed(points: &[(f64, f64)], n0: usize) -> Vec<Complex64> {
    let n = points.len();
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    for k in 0..n {
        let (x0, y0) = points[k];
        let (x1, y1) = points[(k + 1) % n];
        let seg = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
        cumulative.push(cumulative[k] + seg);
    }
    let total = *cumulative.last().unwrap();
    if total <= 0.0 {
        // all points coincide
        let (x, y) = points[0];
        return vec![Complex64::new(x, y); n0];
    }
    let mut out = Vec::with_capacity(n0);
    let mut seg_idx = 0usize;
    for i in 0..n0 {
        let target = total * i as f64 / n0 as f64;
        while seg_idx + 1 < n && cumulative[seg_idx + 1] <= target {
            seg_idx += 1;
        }
        let seg_len = cumulative[seg_idx + 1] - cumulative[seg_idx];
        let f = if seg_len > 0.0 {
            (target - cumulative[seg_idx]) / seg_len
        } else {
            0.0
        };
        let (x0, y0) = points[seg_idx];
        let (x1, y1) = points[(seg_idx + 1) % n];
        out.push(Complex64::new(x0 + f * (x1 - x0), y0 + f * (y1 - y0)));
    }
    out
}

//! Radon projections of candidate masks.
//!
//! The transform is a discrete shift-and-sum: every object pixel, taken in
//! center-offset coordinates, drops its unit mass into the nearest rho bin
//! of each angle column. Binning conserves mass exactly, so each column sums
//! to the object area.
//!
//! The descriptor turns columns into scale- and rotation-robust profiles:
//! columns are lightly smoothed, re-binned over a window of +-3 sigma around
//! their center of mass (sigma shared across angles so elongation stays
//! visible), normalized by total mass, mirror-canonicalized by the sign of
//! the center-of-mass offset, and ordered by how off-center and how spiky
//! they are. Ordering plus mirroring is what absorbs rotations by whole
//! angle steps, including the one column that wraps past 180 degrees and
//! comes back reversed.

use super::{BlockKind, FeatureBlock};
use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

/// Sinogram of a candidate mask: one column of rho bins per angle.
#[derive(Debug, Clone)]
pub struct RadonMatrix {
    pub angles: Vec<f64>,
    /// Signed rho offsets, symmetric about 0.
    pub rho_offsets: Vec<i64>,
    /// `values[a][r]` is the mass in rho bin `r` at angle `a`.
    pub values: Vec<Vec<f64>>,
}

impl RadonMatrix {
    pub fn column(&self, angle_index: usize) -> &[f64] {
        &self.values[angle_index]
    }
}

/// Shift-and-sum projection at the given angles (degrees in [0, 180)).
pub fn radon_transform(mask: &BinaryMask, angles_deg: &[f64]) -> Result<RadonMatrix> {
    if mask.count_true() == 0 {
        return Err(Error::EmptyRegion("cannot project an empty mask".into()));
    }
    if angles_deg.is_empty() {
        return Err(Error::Parameter("need at least one projection angle".into()));
    }
    for &a in angles_deg {
        if !(0.0..180.0).contains(&a) {
            return Err(Error::Parameter(format!(
                "projection angles must lie in [0, 180), got {a}"
            )));
        }
    }
    let (w, h) = (mask.width(), mask.height());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let rho_max = ((w as f64).hypot(h as f64) / 2.0).ceil() as i64;
    let bins = (2 * rho_max + 1) as usize;

    let mut values = vec![vec![0.0f64; bins]; angles_deg.len()];
    for (ai, &deg) in angles_deg.iter().enumerate() {
        let theta = deg.to_radians();
        let (sin_t, cos_t) = theta.sin_cos();
        let col = &mut values[ai];
        for y in 0..h {
            for x in 0..w {
                if mask.get(x, y) {
                    let rho = (x as f64 - cx) * cos_t + (y as f64 - cy) * sin_t;
                    let bin = (rho.round() as i64 + rho_max) as usize;
                    col[bin] += 1.0;
                }
            }
        }
    }
    Ok(RadonMatrix {
        angles: angles_deg.to_vec(),
        rho_offsets: (-rho_max..=rho_max).collect(),
        values,
    })
}

/// Profile descriptor: `bins` mass fractions per angle, `180 / angle_step`
/// angles, concatenated after mirror canonicalization and saliency ordering.
pub fn radon_descriptor(mask: &BinaryMask, angle_step: usize, bins: usize) -> Result<FeatureBlock> {
    if angle_step == 0 || 180 % angle_step != 0 {
        return Err(Error::Parameter(format!(
            "angle step must divide 180, got {angle_step}"
        )));
    }
    if bins < 4 {
        return Err(Error::Parameter(format!(
            "need at least 4 profile bins, got {bins}"
        )));
    }
    let angles: Vec<f64> = (0..180 / angle_step)
        .map(|i| (i * angle_step) as f64)
        .collect();
    let matrix = radon_transform(mask, &angles)?;
    let area = mask.count_true() as f64;
    let center = (matrix.values[0].len() as f64 - 1.0) / 2.0;

    struct Profile {
        values: Vec<f64>,
        com_offset_abs: f64,
        variance: f64,
    }

    // First pass: smoothed columns and their first two moments.
    let smoothed: Vec<Vec<f64>> = matrix.values.iter().map(|c| smooth(c)).collect();
    let moments: Vec<(f64, f64)> = smoothed.iter().map(|c| column_moments(c)).collect();
    let max_sigma = moments.iter().map(|m| m.1).fold(0.0f64, f64::max);
    if max_sigma <= 0.0 {
        return Err(Error::Degenerate(
            "all projections collapse to a single bin".into(),
        ));
    }
    let half_width = 3.0 * max_sigma;

    let mut profiles: Vec<Profile> = smoothed
        .iter()
        .zip(&moments)
        .map(|(col, &(com, _))| {
            let mut vals = rebin_mass(col, com - half_width, com + half_width, bins);
            for v in &mut vals {
                *v /= area;
            }
            if com > center {
                vals.reverse();
            }
            let mean = vals.iter().sum::<f64>() / bins as f64;
            let variance = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / bins as f64;
            Profile {
                values: vals,
                com_offset_abs: (com - center).abs(),
                variance,
            }
        })
        .collect();

    // Saliency order: most off-center first (locks orientation for shapes
    // with an asymmetric feature), then spikiest, then stable by angle.
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    order.sort_by(|&i, &j| {
        profiles[j]
            .com_offset_abs
            .partial_cmp(&profiles[i].com_offset_abs)
            .unwrap()
            .then(
                profiles[j]
                    .variance
                    .partial_cmp(&profiles[i].variance)
                    .unwrap(),
            )
            .then(i.cmp(&j))
    });

    let mut values = Vec::with_capacity(bins * profiles.len());
    for &i in &order {
        values.append(&mut profiles[i].values);
    }
    Ok(FeatureBlock {
        kind: BlockKind::Radon,
        values,
    })
}

/// Mass-preserving 3-tap smoothing; end bins keep the mass that would fall
/// off the column.
fn smooth(col: &[f64]) -> Vec<f64> {
    let n = col.len();
    if n < 3 {
        return col.to_vec();
    }
    let mut out = vec![0.0; n];
    out[0] = 0.75 * col[0] + 0.25 * col[1];
    out[n - 1] = 0.75 * col[n - 1] + 0.25 * col[n - 2];
    for i in 1..n - 1 {
        out[i] = 0.25 * col[i - 1] + 0.5 * col[i] + 0.25 * col[i + 1];
    }
    out
}

/// Center of mass and standard deviation of a non-negative column.
fn column_moments(col: &[f64]) -> (f64, f64) {
    let total: f64 = col.iter().sum();
    let com = col
        .iter()
        .enumerate()
        .map(|(i, &v)| i as f64 * v)
        .sum::<f64>()
        / total;
    let var = col
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as f64 - com) * (i as f64 - com) * v)
        .sum::<f64>()
        / total;
    (com, var.sqrt())
}

/// Splits the mass of `col` into `bins` equal sub-intervals of [lo, hi],
/// interpolating linearly inside rho bins (bin i covers [i-0.5, i+0.5)).
fn rebin_mass(col: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let n = col.len();
    let mut cumulative = Vec::with_capacity(n + 1);
    cumulative.push(0.0);
    for &v in col {
        cumulative.push(cumulative.last().unwrap() + v);
    }
    let mass_below = |t: f64| -> f64 {
        let u = t + 0.5;
        if u <= 0.0 {
            0.0
        } else if u >= n as f64 {
            cumulative[n]
        } else {
            let i = u.floor() as usize;
            cumulative[i] + (u - i as f64) * (cumulative[i + 1] - cumulative[i])
        }
    };
    let width = hi - lo;
    (0..bins)
        .map(|k| {
            let a = lo + width * k as f64 / bins as f64;
            let b = lo + width * (k + 1) as f64 / bins as f64;
            mass_below(b) - mass_below(a)
        })
        .collect()
}

//! Multifractal spectrum by box counting.
//!
//! For each box size the mask is padded to a multiple of the box edge and
//! per-box masses are collected. Probabilities p_i = m_i / M feed the
//! q-order normalized measures mu_i = p_i^q / sum p_j^q, and the two sums
//! A(q, e) = sum mu_i ln p_i and F(q, e) = sum mu_i ln mu_i. The Holder
//! exponent alpha(q) and spectrum value f(q) are the least-squares slopes of
//! A and F against ln e across the configured box sizes. With a single box
//! size the raw sums are returned instead of slopes (there is no scaling
//! behavior to regress on); that mode exists for comparison runs only.

use super::{BlockKind, FeatureBlock};
use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

/// Configuration for the multifractal block.
#[derive(Debug, Clone)]
pub struct MultifractalConfig {
    /// Moment orders; the default grid is -1.0..=1.0 in steps of 0.1.
    pub q_values: Vec<f64>,
    /// Box edge lengths, strictly ascending, each at least 2.
    pub box_sizes: Vec<usize>,
    /// Floor applied to probabilities before exponentiation, guarding the
    /// negative-q moments.
    pub min_probability_floor: f64,
}

impl Default for MultifractalConfig {
    fn default() -> Self {
        Self {
            q_values: default_q_grid(),
            box_sizes: vec![2, 4, 8, 16, 32],
            min_probability_floor: 1e-12,
        }
    }
}

/// 21 moment orders from -1.0 to +1.0 in steps of 0.1.
pub fn default_q_grid() -> Vec<f64> {
    (0..21).map(|i| -1.0 + 0.1 * i as f64).collect()
}

impl MultifractalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_values.is_empty() {
            return Err(Error::Parameter("q grid must not be empty".into()));
        }
        if self.box_sizes.is_empty() {
            return Err(Error::Parameter("box size list must not be empty".into()));
        }
        for pair in self.box_sizes.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::Parameter(format!(
                    "box sizes must be strictly ascending, got {:?}",
                    self.box_sizes
                )));
            }
        }
        if self.box_sizes[0] < 2 {
            return Err(Error::Parameter("box sizes must be at least 2".into()));
        }
        if self.min_probability_floor <= 0.0 {
            return Err(Error::Parameter("probability floor must be positive".into()));
        }
        Ok(())
    }
}

/// Box covering statistics at one box size.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    /// Boxes covering the padded image, occupied or not.
    pub total_boxes: usize,
    /// Boxes containing at least one object pixel.
    pub occupied_boxes: usize,
    /// Object-pixel count per occupied box, box row-major.
    pub masses: Vec<u32>,
}

impl BoxStats {
    pub fn total_mass(&self) -> u64 {
        self.masses.iter().map(|&m| m as u64).sum()
    }
}

/// Partitions the mask (zero-padded up to a multiple of `epsilon` in each
/// dimension) into epsilon-by-epsilon boxes and tallies per-box masses.
pub fn box_partition_stats(mask: &BinaryMask, epsilon: usize) -> Result<BoxStats> {
    if epsilon < 2 {
        return Err(Error::Parameter(format!(
            "box edge must be at least 2, got {epsilon}"
        )));
    }
    if mask.count_true() == 0 {
        return Err(Error::EmptyRegion("box counting needs a non-empty mask".into()));
    }
    let boxes_x = mask.width().div_ceil(epsilon);
    let boxes_y = mask.height().div_ceil(epsilon);
    let mut masses = Vec::new();
    for by in 0..boxes_y {
        for bx in 0..boxes_x {
            let mut m = 0u32;
            for y in by * epsilon..((by + 1) * epsilon).min(mask.height()) {
                for x in bx * epsilon..((bx + 1) * epsilon).min(mask.width()) {
                    if mask.get(x, y) {
                        m += 1;
                    }
                }
            }
            if m > 0 {
                masses.push(m);
            }
        }
    }
    Ok(BoxStats {
        total_boxes: boxes_x * boxes_y,
        occupied_boxes: masses.len(),
        masses,
    })
}

/// Computes the multifractal block: [f(q_1)..f(q_K), alpha(q_1)..alpha(q_K)],
/// length 2K. Natural logarithms throughout.
pub fn multifractal_descriptor(
    mask: &BinaryMask,
    config: &MultifractalConfig,
) -> Result<FeatureBlock> {
    config.validate()?;
    let k = config.q_values.len();

    let largest = *config.box_sizes.last().unwrap();
    let per_eps: Vec<BoxStats> = config
        .box_sizes
        .iter()
        .map(|&e| box_partition_stats(mask, e))
        .collect::<Result<_>>()?;
    if per_eps.last().unwrap().occupied_boxes < 2 {
        return Err(Error::Degenerate(format!(
            "fewer than 2 occupied boxes at box size {largest}; the slope fit would be meaningless"
        )));
    }

    // A[qi][ei], F[qi][ei]
    let mut a_sums = vec![vec![0.0f64; config.box_sizes.len()]; k];
    let mut f_sums = vec![vec![0.0f64; config.box_sizes.len()]; k];
    for (ei, stats) in per_eps.iter().enumerate() {
        let total = stats.total_mass() as f64;
        let log_p: Vec<f64> = stats
            .masses
            .iter()
            .map(|&m| (m as f64 / total).max(config.min_probability_floor).ln())
            .collect();
        for (qi, &q) in config.q_values.iter().enumerate() {
            // p^q computed in log space for stability
            let pow_q: Vec<f64> = log_p.iter().map(|&lp| (q * lp).exp()).collect();
            let denom: f64 = pow_q.iter().sum();
            if !denom.is_finite() || denom <= 0.0 {
                return Err(Error::Numerical(format!(
                    "moment normalization is {denom} at q={q}, eps={}",
                    config.box_sizes[ei]
                )));
            }
            let mut a = 0.0;
            let mut f = 0.0;
            for (i, &lp) in log_p.iter().enumerate() {
                let mu = pow_q[i] / denom;
                if mu > 0.0 {
                    a += mu * lp;
                    f += mu * mu.ln();
                }
            }
            if !a.is_finite() || !f.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite moment sum at q={q}, eps={}",
                    config.box_sizes[ei]
                )));
            }
            a_sums[qi][ei] = a;
            f_sums[qi][ei] = f;
        }
    }

    let mut values = Vec::with_capacity(2 * k);
    if config.box_sizes.len() == 1 {
        // literal single-scale sums, no regression
        for qi in 0..k {
            values.push(f_sums[qi][0]);
        }
        for qi in 0..k {
            values.push(a_sums[qi][0]);
        }
    } else {
        let log_eps: Vec<f64> = config.box_sizes.iter().map(|&e| (e as f64).ln()).collect();
        for qi in 0..k {
            values.push(least_squares_slope(&log_eps, &f_sums[qi]));
        }
        for qi in 0..k {
            values.push(least_squares_slope(&log_eps, &a_sums[qi]));
        }
    }
    Ok(FeatureBlock {
        kind: BlockKind::Multifractal,
        values,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

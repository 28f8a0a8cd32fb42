//! k-nearest-neighbor classification with the fused per-block distance.

use super::ClassLabel;
use crate::descriptors::{fused_distance_unchecked, FeatureVector};
use crate::error::{Error, Result};

/// Stored (already normalized) training set plus k.
#[derive(Debug, Clone)]
pub struct KnnModel {
    pub k: usize,
    pub points: Vec<FeatureVector>,
    pub labels: Vec<ClassLabel>,
}

impl KnnModel {
    /// Votes among the k nearest neighbors. Neighbor rank ties break by
    /// training index; vote ties break by the smaller summed distance, then
    /// by label order.
    pub fn predict(&self, query: &FeatureVector) -> Result<ClassLabel> {
        if self.points.is_empty() {
            return Err(Error::Parameter("kNN model has no training points".into()));
        }
        let mut scored: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (fused_distance_unchecked(p, query), i))
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let k = self.k.min(scored.len());

        let mut votes = [0usize; 3];
        let mut summed = [0.0f64; 3];
        for &(d, i) in &scored[..k] {
            let c = self.labels[i].index();
            votes[c] += 1;
            summed[c] += d;
        }
        let top = *votes.iter().max().unwrap();
        let mut winner = None;
        for label in ClassLabel::ALL {
            let c = label.index();
            if votes[c] == top {
                winner = match winner {
                    None => Some(label),
                    Some(best) if summed[c] < summed[best.index()] => Some(label),
                    other => other,
                };
            }
        }
        Ok(winner.unwrap())
    }
}

//! Per-feature z-scoring fitted on training data only. The per-block
//! Euclidean terms of the fused distance are only comparable after this.

use super::Dataset;
use crate::descriptors::FeatureVector;
use crate::error::{Error, Result};

const STD_FLOOR: f64 = 1e-9;

/// Per-feature mean and standard deviation (population), std floored so
/// constant features pass through as zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub shape: (usize, usize, usize),
}

pub fn fit_normalizer(train: &Dataset) -> Result<Normalizer> {
    let shape = train
        .shape()
        .ok_or_else(|| Error::Parameter("cannot fit a normalizer on an empty dataset".into()))?;
    let dim = shape.0 + shape.1 + shape.2;
    let n = train.len() as f64;
    let mut mean = vec![0.0; dim];
    for s in &train.samples {
        for (m, v) in mean.iter_mut().zip(s.features.flat()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = vec![0.0; dim];
    for s in &train.samples {
        for (i, v) in s.features.flat().into_iter().enumerate() {
            let d = v - mean[i];
            var[i] += d * d;
        }
    }
    let std = var
        .into_iter()
        .map(|v| (v / n).sqrt().max(STD_FLOOR))
        .collect();
    Ok(Normalizer { mean, std, shape })
}

impl Normalizer {
    pub fn apply(&self, v: &FeatureVector) -> Result<FeatureVector> {
        if v.shape() != self.shape {
            return Err(Error::Parameter(format!(
                "vector shape {:?} does not match normalizer shape {:?}",
                v.shape(),
                self.shape
            )));
        }
        let flat: Vec<f64> = v
            .flat()
            .into_iter()
            .enumerate()
            .map(|(i, x)| (x - self.mean[i]) / self.std[i])
            .collect();
        FeatureVector::from_flat(&flat, self.shape, v.label)
    }

    pub fn apply_dataset(&self, dataset: &Dataset) -> Result<Dataset> {
        let samples = dataset
            .samples
            .iter()
            .map(|s| {
                Ok(super::Sample {
                    features: self.apply(&s.features)?,
                    label: s.label,
                    apple_id: s.apple_id,
                    view_id: s.view_id,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{ClassLabel, Sample};
    use crate::descriptors::FeatureVector;

    fn dataset_from_rows(rows: &[Vec<f64>]) -> Dataset {
        let dim = rows[0].len();
        let shape = (dim, 0, 0);
        let samples = rows
            .iter()
            .enumerate()
            .map(|(i, row)| Sample {
                features: FeatureVector::from_flat(row, shape, None).unwrap(),
                label: ClassLabel::Stem,
                apple_id: i as u32,
                view_id: 0,
            })
            .collect();
        Dataset::new(samples).unwrap()
    }

    #[test]
    fn constant_feature_becomes_zero() {
        let ds = dataset_from_rows(&[vec![5.0, 1.0], vec![5.0, 3.0]]);
        let norm = fit_normalizer(&ds).unwrap();
        let out = norm.apply(&ds.samples[0].features).unwrap();
        assert_eq!(out.flat()[0], 0.0);
    }

    #[test]
    fn two_point_zscore() {
        let ds = dataset_from_rows(&[vec![0.0], vec![2.0]]);
        let norm = fit_normalizer(&ds).unwrap();
        let a = norm.apply(&ds.samples[0].features).unwrap().flat()[0];
        let b = norm.apply(&ds.samples[1].features).unwrap().flat()[0];
        assert!((a + 1.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn training_set_is_centered_and_scaled() {
        let ds = dataset_from_rows(&[
            vec![1.0, 10.0],
            vec![2.0, 20.0],
            vec![3.0, 15.0],
            vec![4.0, 5.0],
        ]);
        let norm = fit_normalizer(&ds).unwrap();
        let normalized = norm.apply_dataset(&ds).unwrap();
        let n = normalized.len() as f64;
        for col in 0..2 {
            let mean: f64 = normalized
                .samples
                .iter()
                .map(|s| s.features.flat()[col])
                .sum::<f64>()
                / n;
            let var: f64 = normalized
                .samples
                .iter()
                .map(|s| s.features.flat()[col].powi(2))
                .sum::<f64>()
                / n;
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn train_only_statistics_differ_from_pooled() {
        let train = dataset_from_rows(&[vec![0.0], vec![2.0]]);
        let mut pooled_rows = vec![vec![0.0], vec![2.0], vec![100.0]];
        let pooled = dataset_from_rows(&pooled_rows.drain(..).collect::<Vec<_>>());
        let n_train = fit_normalizer(&train).unwrap();
        let n_pooled = fit_normalizer(&pooled).unwrap();
        assert_ne!(n_train, n_pooled, "leaking test rows changes the transform");
    }
}

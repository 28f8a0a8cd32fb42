//! Linear discriminant classifier: per-class means, pooled covariance with a
//! ridge floor, largest linear discriminant score wins.

use nalgebra::{DMatrix, DVector};

use super::ClassLabel;
use crate::error::{Error, Result};

/// Discriminant weights per class: score_c(x) = w_c . x + b_c.
#[derive(Debug, Clone)]
pub struct LdcModel {
    pub classes: Vec<ClassLabel>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

impl LdcModel {
    pub fn train(rows: &[Vec<f64>], labels: &[ClassLabel]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parameter("LDC needs training rows".into()));
        }
        let dim = rows[0].len();
        let mut classes: Vec<ClassLabel> = Vec::new();
        for label in ClassLabel::ALL {
            if labels.contains(&label) {
                classes.push(label);
            }
        }
        if classes.len() < 2 {
            return Err(Error::Parameter("LDC needs at least two classes".into()));
        }

        let mut means: Vec<DVector<f64>> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for &class in &classes {
            let mut mean = DVector::zeros(dim);
            let mut count = 0usize;
            for (row, &label) in rows.iter().zip(labels) {
                if label == class {
                    mean += DVector::from_column_slice(row);
                    count += 1;
                }
            }
            mean /= count as f64;
            means.push(mean);
            counts.push(count);
        }

        // pooled within-class covariance, 1 / (n - k) normalization
        let mut cov = DMatrix::zeros(dim, dim);
        for (row, &label) in rows.iter().zip(labels) {
            let ci = classes.iter().position(|&c| c == label).unwrap();
            let centered = DVector::from_column_slice(row) - &means[ci];
            cov += &centered * centered.transpose();
        }
        cov /= (n - classes.len()) as f64;
        let ridge = 1e-6 * cov.trace() / dim as f64;
        for i in 0..dim {
            cov[(i, i)] += ridge.max(1e-12);
        }

        let chol = cov.clone().cholesky().ok_or_else(|| {
            Error::Numerical("pooled covariance is not positive definite after ridge".into())
        })?;

        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (ci, mean) in means.iter().enumerate() {
            let w = chol.solve(mean);
            let prior = counts[ci] as f64 / n as f64;
            let b = -0.5 * mean.dot(&w) + prior.ln();
            weights.push(w.iter().copied().collect());
            biases.push(b);
        }
        Ok(LdcModel {
            classes,
            weights,
            biases,
        })
    }

    pub fn predict(&self, x: &[f64]) -> ClassLabel {
        let mut best = (f64::NEG_INFINITY, self.classes[0]);
        for (ci, &class) in self.classes.iter().enumerate() {
            let score: f64 = self.weights[ci]
                .iter()
                .zip(x)
                .map(|(w, v)| w * v)
                .sum::<f64>()
                + self.biases[ci];
            if score > best.0 {
                best = (score, class);
            }
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_gaussian_blobs() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut rng = crate::rng::SplitMix64::new(8);
        let centers = [(-4.0, 0.0), (4.0, 0.0), (0.0, 6.0)];
        for (ci, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..30 {
                rows.push(vec![cx + rng.gaussian(), cy + rng.gaussian()]);
                labels.push(ClassLabel::ALL[ci]);
            }
        }
        let model = LdcModel::train(&rows, &labels).unwrap();
        let correct = rows
            .iter()
            .zip(&labels)
            .filter(|(r, &l)| model.predict(r) == l)
            .count();
        assert!(correct as f64 / rows.len() as f64 > 0.95);
    }

    #[test]
    fn tolerates_constant_features() {
        // a zero-variance feature would sink a plain inverse; the ridge keeps
        // the solve well-posed
        let rows = vec![
            vec![0.0, 7.0],
            vec![0.1, 7.0],
            vec![5.0, 7.0],
            vec![5.1, 7.0],
        ];
        let labels = vec![
            ClassLabel::Stem,
            ClassLabel::Stem,
            ClassLabel::Calyx,
            ClassLabel::Calyx,
        ];
        let model = LdcModel::train(&rows, &labels).unwrap();
        assert_eq!(model.predict(&[0.05, 7.0]), ClassLabel::Stem);
        assert_eq!(model.predict(&[5.05, 7.0]), ClassLabel::Calyx);
    }

    #[test]
    fn needs_two_classes() {
        let rows = vec![vec![1.0], vec![2.0]];
        let labels = vec![ClassLabel::Stem, ClassLabel::Stem];
        assert!(LdcModel::train(&rows, &labels).is_err());
    }
}

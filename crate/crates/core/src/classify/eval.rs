//! Evaluation reports (per-class TPR and FPR counts, confusion matrix) and
//! the descriptor-fusion comparison table.

use super::{predict, train, ClassLabel, Dataset, ModelKind, Sample, TrainParams, TrainedModel};
use crate::descriptors::{BlockKind, FeatureBlock, FeatureVector};
use crate::error::{Error, Result};

/// Confusion counts over the three classes; rows are true labels, columns
/// predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub confusion: [[usize; 3]; 3],
    pub total: usize,
}

impl EvalReport {
    pub fn class_count(&self, label: ClassLabel) -> usize {
        self.confusion[label.index()].iter().sum()
    }

    /// Correctly recognized samples of the class.
    pub fn tpr_count(&self, label: ClassLabel) -> usize {
        self.confusion[label.index()][label.index()]
    }

    pub fn tpr_rate(&self, label: ClassLabel) -> f64 {
        let n = self.class_count(label);
        if n == 0 {
            0.0
        } else {
            self.tpr_count(label) as f64 / n as f64
        }
    }

    /// Samples of other classes predicted as this class (a count, matching
    /// the reporting convention of the evaluation table).
    pub fn fpr_count(&self, label: ClassLabel) -> usize {
        let c = label.index();
        (0..3)
            .filter(|&r| r != c)
            .map(|r| self.confusion[r][c])
            .sum()
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let correct: usize = (0..3).map(|i| self.confusion[i][i]).sum();
        correct as f64 / self.total as f64
    }

    /// "49 (98%)" style cell for one class.
    pub fn tpr_cell(&self, label: ClassLabel) -> String {
        format!(
            "{:02} ({}%)",
            self.tpr_count(label),
            (100.0 * self.tpr_rate(label)).round() as u32
        )
    }

    /// Human-readable report: one TPR/FPR row per class, the confusion
    /// matrix and the overall accuracy.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("class            TPR        FPR\n");
        for label in ClassLabel::ALL {
            out.push_str(&format!(
                "{:<8} (n={:>3}) {:>10} {:>4}\n",
                label.to_string(),
                self.class_count(label),
                self.tpr_cell(label),
                format!("{:02}", self.fpr_count(label)),
            ));
        }
        out.push_str("\nconfusion matrix (rows = true, columns = predicted)\n");
        out.push_str("          stem calyx defect\n");
        for label in ClassLabel::ALL {
            out.push_str(&format!(
                "{:<8} {:>5} {:>5} {:>6}\n",
                label.to_string(),
                self.confusion[label.index()][0],
                self.confusion[label.index()][1],
                self.confusion[label.index()][2],
            ));
        }
        out.push_str(&format!("\noverall accuracy {:.2}%\n", 100.0 * self.accuracy()));
        out
    }

    /// Machine-readable copy of the same numbers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,count,tpr_count,tpr_rate,fpr_count\n");
        for label in ClassLabel::ALL {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                label,
                self.class_count(label),
                self.tpr_count(label),
                self.tpr_rate(label),
                self.fpr_count(label),
            ));
        }
        out.push_str(&format!("overall,{},,{},\n", self.total, self.accuracy()));
        out
    }
}

/// Runs the model over `test` and tallies the confusion matrix.
pub fn evaluate(model: &TrainedModel, test: &Dataset) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Parameter("test set is empty".into()));
    }
    let mut confusion = [[0usize; 3]; 3];
    for s in &test.samples {
        let predicted = predict(model, &s.features)?;
        confusion[s.label.index()][predicted.index()] += 1;
    }
    Ok(EvalReport {
        confusion,
        total: test.len(),
    })
}

/// The descriptor subsets of the fusion comparison, in presentation order.
pub const FUSION_SUBSETS: [(&str, [bool; 3]); 3] = [
    ("MD", [true, false, false]),
    ("MD+RD", [true, false, true]),
    ("MD+RD+FD", [true, true, true]),
];

/// Accuracy per classifier kind per descriptor subset.
#[derive(Debug, Clone)]
pub struct FusionTable {
    pub subset_names: Vec<&'static str>,
    pub rows: Vec<(ModelKind, Vec<f64>)>,
}

impl FusionTable {
    pub fn accuracy(&self, kind: ModelKind, subset_name: &str) -> Option<f64> {
        let col = self.subset_names.iter().position(|&n| n == subset_name)?;
        self.rows
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, accs)| accs[col])
    }

    pub fn render_text(&self) -> String {
        let mut out = String::from("classifier ");
        for name in &self.subset_names {
            out.push_str(&format!("{name:>10}"));
        }
        out.push('\n');
        for (kind, accs) in &self.rows {
            out.push_str(&format!("{:<10}", kind.to_string()));
            for a in accs {
                out.push_str(&format!("{:>10.2}", 100.0 * a));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("classifier");
        for name in &self.subset_names {
            out.push_str(&format!(",{name}"));
        }
        out.push('\n');
        for (kind, accs) in &self.rows {
            out.push_str(&kind.to_string());
            for a in accs {
                out.push_str(&format!(",{a}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Keeps only the selected blocks of a vector (masked blocks become empty).
fn project_vector(v: &FeatureVector, subset: [bool; 3]) -> FeatureVector {
    let blocks = [
        FeatureBlock {
            kind: BlockKind::Multifractal,
            values: if subset[0] { v.blocks[0].values.clone() } else { Vec::new() },
        },
        FeatureBlock {
            kind: BlockKind::Fourier,
            values: if subset[1] { v.blocks[1].values.clone() } else { Vec::new() },
        },
        FeatureBlock {
            kind: BlockKind::Radon,
            values: if subset[2] { v.blocks[2].values.clone() } else { Vec::new() },
        },
    ];
    FeatureVector::new(blocks, v.label).expect("projection preserves order")
}

/// Restricts a whole dataset to a block subset.
pub fn project_dataset(dataset: &Dataset, subset: [bool; 3]) -> Result<Dataset> {
    Dataset::new(
        dataset
            .samples
            .iter()
            .map(|s| Sample {
                features: project_vector(&s.features, subset),
                label: s.label,
                apple_id: s.apple_id,
                view_id: s.view_id,
            })
            .collect(),
    )
}

/// Trains and evaluates every classifier kind on every descriptor subset.
/// Masking happens before normalization, so each subset gets its own
/// normalizer fitted on the surviving features.
pub fn compare_fusions(
    train_set: &Dataset,
    test_set: &Dataset,
    kinds: &[ModelKind],
    params: &TrainParams,
) -> Result<FusionTable> {
    if train_set.shape() != test_set.shape() {
        return Err(Error::Parameter(
            "train and test sets have different feature shapes".into(),
        ));
    }
    let subset_names: Vec<&'static str> = FUSION_SUBSETS.iter().map(|(n, _)| *n).collect();
    let mut rows = Vec::new();
    for &kind in kinds {
        let mut accs = Vec::new();
        for &(_, subset) in &FUSION_SUBSETS {
            let train_sub = project_dataset(train_set, subset)?;
            let test_sub = project_dataset(test_set, subset)?;
            let model = train(kind, &train_sub, params)?;
            accs.push(evaluate(&model, &test_sub)?.accuracy());
        }
        rows.push((kind, accs));
    }
    Ok(FusionTable { subset_names, rows })
}

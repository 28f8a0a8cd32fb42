//! The trained-model umbrella: training dispatch, prediction, and the
//! self-describing text format models are stored in.
//!
//! Floats are serialized with Rust's shortest-round-trip formatting, so a
//! saved and reloaded model walks the same decision path bit for bit.

use std::fmt;
use std::path::Path;

use super::knn::KnnModel;
use super::ldc::LdcModel;
use super::svm::{BinarySvm, SvmParams};
use super::{ClassLabel, Dataset, Normalizer};
use crate::classify::fit_normalizer;
use crate::descriptors::FeatureVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Knn,
    Svm,
    Ldc,
}

impl ModelKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "knn" => Ok(ModelKind::Knn),
            "svm" => Ok(ModelKind::Svm),
            "ldc" => Ok(ModelKind::Ldc),
            other => Err(Error::Parameter(format!(
                "unknown classifier kind {other:?} (expected knn, svm or ldc)"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Knn => "knn",
            ModelKind::Svm => "svm",
            ModelKind::Ldc => "ldc",
        })
    }
}

/// Hyperparameters for all classifier kinds.
#[derive(Debug, Clone, Copy)]
pub struct TrainParams {
    pub knn_k: usize,
    pub svm: SvmParams,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            knn_k: 4,
            svm: SvmParams::default(),
        }
    }
}

/// One-vs-one SVM bank: one binary machine per class pair, +1 meaning the
/// first class of the pair.
#[derive(Debug, Clone)]
pub struct SvmMulticlass {
    pub pairs: Vec<(ClassLabel, ClassLabel, BinarySvm)>,
}

impl SvmMulticlass {
    /// Majority vote; ties break by the summed signed decision values, then
    /// by label order.
    pub fn predict(&self, x: &[f64]) -> ClassLabel {
        let mut votes = [0usize; 3];
        let mut scores = [0.0f64; 3];
        for (a, b, svm) in &self.pairs {
            let f = svm.decision(x);
            if f > 0.0 {
                votes[a.index()] += 1;
            } else {
                votes[b.index()] += 1;
            }
            scores[a.index()] += f;
            scores[b.index()] -= f;
        }
        let top = *votes.iter().max().unwrap();
        let mut winner = None;
        for label in ClassLabel::ALL {
            let c = label.index();
            if votes[c] == top {
                winner = match winner {
                    None => Some(label),
                    Some(best) if scores[c] > scores[best.index()] => Some(label),
                    other => other,
                };
            }
        }
        winner.unwrap()
    }
}

#[derive(Debug, Clone)]
pub enum ModelParams {
    Knn(KnnModel),
    Svm(SvmMulticlass),
    Ldc(LdcModel),
}

/// A classifier plus the feature normalizer it was trained with.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub normalizer: Normalizer,
    pub params: ModelParams,
}

/// Fits the normalizer on `train`, then trains the requested classifier on
/// the normalized features.
pub fn train(kind: ModelKind, train: &Dataset, params: &TrainParams) -> Result<TrainedModel> {
    if train.is_empty() {
        return Err(Error::Parameter("training set is empty".into()));
    }
    let classes_present: Vec<ClassLabel> = ClassLabel::ALL
        .into_iter()
        .filter(|c| train.samples.iter().any(|s| s.label == *c))
        .collect();
    if classes_present.len() < 2 {
        return Err(Error::Parameter(
            "training set must contain at least two classes".into(),
        ));
    }
    let normalizer = fit_normalizer(train)?;
    let normalized = normalizer.apply_dataset(train)?;

    let params_out = match kind {
        ModelKind::Knn => {
            if params.knn_k == 0 || params.knn_k > normalized.len() {
                return Err(Error::Parameter(format!(
                    "k must lie in 1..={}, got {}",
                    normalized.len(),
                    params.knn_k
                )));
            }
            ModelParams::Knn(KnnModel {
                k: params.knn_k,
                points: normalized.samples.iter().map(|s| s.features.clone()).collect(),
                labels: normalized.samples.iter().map(|s| s.label).collect(),
            })
        }
        ModelKind::Svm => {
            let mut pairs = Vec::new();
            for i in 0..classes_present.len() {
                for j in (i + 1)..classes_present.len() {
                    let (a, b) = (classes_present[i], classes_present[j]);
                    let mut points = Vec::new();
                    let mut labels = Vec::new();
                    for s in &normalized.samples {
                        if s.label == a {
                            points.push(s.features.flat());
                            labels.push(1.0);
                        } else if s.label == b {
                            points.push(s.features.flat());
                            labels.push(-1.0);
                        }
                    }
                    let svm = BinarySvm::train(points, labels, &params.svm).map_err(|e| {
                        Error::Training(format!("subproblem {a} vs {b}: {e}"))
                    })?;
                    pairs.push((a, b, svm));
                }
            }
            ModelParams::Svm(SvmMulticlass { pairs })
        }
        ModelKind::Ldc => {
            let rows: Vec<Vec<f64>> = normalized.samples.iter().map(|s| s.features.flat()).collect();
            let labels: Vec<ClassLabel> = normalized.samples.iter().map(|s| s.label).collect();
            ModelParams::Ldc(LdcModel::train(&rows, &labels)?)
        }
    };
    Ok(TrainedModel {
        kind,
        normalizer,
        params: params_out,
    })
}

/// Classifies one raw (unnormalized) feature vector.
pub fn predict(model: &TrainedModel, v: &FeatureVector) -> Result<ClassLabel> {
    let normalized = model.normalizer.apply(v)?;
    Ok(match &model.params {
        ModelParams::Knn(m) => m.predict(&normalized)?,
        ModelParams::Svm(m) => m.predict(&normalized.flat()),
        ModelParams::Ldc(m) => m.predict(&normalized.flat()),
    })
}

pub fn save_model<P: AsRef<Path>>(model: &TrainedModel, path: P) -> Result<()> {
    let mut out = String::new();
    out.push_str("fruitvision-model v1\n");
    out.push_str(&format!("kind {}\n", model.kind));
    let (m, f, r) = model.normalizer.shape;
    out.push_str(&format!("shape {m} {f} {r}\n"));
    out.push_str(&format!("mean {}\n", join_floats(&model.normalizer.mean)));
    out.push_str(&format!("std {}\n", join_floats(&model.normalizer.std)));
    match &model.params {
        ModelParams::Knn(knn) => {
            out.push_str(&format!("knn k {}\n", knn.k));
            out.push_str(&format!("points {}\n", knn.points.len()));
            for (p, label) in knn.points.iter().zip(&knn.labels) {
                out.push_str(&format!("{} {}\n", label, join_floats(&p.flat())));
            }
        }
        ModelParams::Svm(multi) => {
            out.push_str(&format!("svm pairs {}\n", multi.pairs.len()));
            for (a, b, svm) in &multi.pairs {
                let sv: Vec<usize> = (0..svm.points.len())
                    .filter(|&i| svm.alphas[i] > 0.0)
                    .collect();
                out.push_str(&format!(
                    "pair {a} {b} degree {} c {} bias {} nsv {}\n",
                    svm.degree,
                    svm.c,
                    svm.bias,
                    sv.len()
                ));
                for &i in &sv {
                    let coef = svm.alphas[i] * svm.labels[i];
                    out.push_str(&format!("{} {}\n", coef, join_floats(&svm.points[i])));
                }
            }
        }
        ModelParams::Ldc(ldc) => {
            out.push_str(&format!("ldc classes {}\n", ldc.classes.len()));
            for (ci, &class) in ldc.classes.iter().enumerate() {
                out.push_str(&format!(
                    "class {class} bias {} weights {}\n",
                    ldc.biases[ci],
                    join_floats(&ldc.weights[ci])
                ));
            }
        }
    }
    std::fs::write(path.as_ref(), out)?;
    Ok(())
}

pub fn load_model<P: AsRef<Path>>(path: P) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines();
    let version = lines
        .next()
        .ok_or_else(|| Error::Format("model file: empty".into()))?;
    if version != "fruitvision-model v1" {
        return Err(Error::Format(format!(
            "model file: unknown version line {version:?}"
        )));
    }
    let kind_line = expect_line(&mut lines, "kind")?;
    let kind = ModelKind::parse(kind_line.trim_start_matches("kind "))?;
    let shape_line = expect_line(&mut lines, "shape")?;
    let dims: Vec<usize> = shape_line
        .trim_start_matches("shape ")
        .split(' ')
        .map(|t| t.parse().map_err(|_| Error::Format("model file: bad shape".into())))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::Format("model file: shape needs three lengths".into()));
    }
    let shape = (dims[0], dims[1], dims[2]);
    let mean = parse_floats(expect_line(&mut lines, "mean")?.trim_start_matches("mean "))?;
    let std = parse_floats(expect_line(&mut lines, "std")?.trim_start_matches("std "))?;
    let dim = shape.0 + shape.1 + shape.2;
    if mean.len() != dim || std.len() != dim {
        return Err(Error::Format("model file: normalizer length mismatch".into()));
    }
    let normalizer = Normalizer { mean, std, shape };

    let params = match kind {
        ModelKind::Knn => {
            let k_line = expect_line(&mut lines, "knn k")?;
            let k: usize = k_line
                .trim_start_matches("knn k ")
                .parse()
                .map_err(|_| Error::Format("model file: bad k".into()))?;
            let count_line = expect_line(&mut lines, "points")?;
            let count: usize = count_line
                .trim_start_matches("points ")
                .parse()
                .map_err(|_| Error::Format("model file: bad point count".into()))?;
            let mut points = Vec::with_capacity(count);
            let mut labels = Vec::with_capacity(count);
            for _ in 0..count {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::Format("model file: truncated knn points".into()))?;
                let (label_text, rest) = line
                    .split_once(' ')
                    .ok_or_else(|| Error::Format("model file: bad knn row".into()))?;
                labels.push(ClassLabel::parse(label_text)?);
                let flat = parse_floats(rest)?;
                points.push(FeatureVector::from_flat(&flat, shape, None)?);
            }
            ModelParams::Knn(KnnModel { k, points, labels })
        }
        ModelKind::Svm => {
            let pairs_line = expect_line(&mut lines, "svm pairs")?;
            let n_pairs: usize = pairs_line
                .trim_start_matches("svm pairs ")
                .parse()
                .map_err(|_| Error::Format("model file: bad pair count".into()))?;
            let mut pairs = Vec::with_capacity(n_pairs);
            for _ in 0..n_pairs {
                let header = lines
                    .next()
                    .ok_or_else(|| Error::Format("model file: truncated svm pair".into()))?;
                let tokens: Vec<&str> = header.split(' ').collect();
                if tokens.len() != 11 || tokens[0] != "pair" {
                    return Err(Error::Format(format!("model file: bad pair header {header:?}")));
                }
                let a = ClassLabel::parse(tokens[1])?;
                let b = ClassLabel::parse(tokens[2])?;
                let degree: u32 = tokens[4]
                    .parse()
                    .map_err(|_| Error::Format("model file: bad degree".into()))?;
                let c: f64 = tokens[6]
                    .parse()
                    .map_err(|_| Error::Format("model file: bad C".into()))?;
                let bias: f64 = tokens[8]
                    .parse()
                    .map_err(|_| Error::Format("model file: bad bias".into()))?;
                let nsv: usize = tokens[10]
                    .parse()
                    .map_err(|_| Error::Format("model file: bad sv count".into()))?;
                let mut points = Vec::with_capacity(nsv);
                let mut labels = Vec::with_capacity(nsv);
                let mut alphas = Vec::with_capacity(nsv);
                for _ in 0..nsv {
                    let line = lines
                        .next()
                        .ok_or_else(|| Error::Format("model file: truncated svm rows".into()))?;
                    let values = parse_floats(line)?;
                    let coef = values[0];
                    labels.push(if coef >= 0.0 { 1.0 } else { -1.0 });
                    alphas.push(coef.abs());
                    points.push(values[1..].to_vec());
                }
                pairs.push((
                    a,
                    b,
                    BinarySvm {
                        points,
                        labels,
                        alphas,
                        bias,
                        degree,
                        c,
                    },
                ));
            }
            ModelParams::Svm(SvmMulticlass { pairs })
        }
        ModelKind::Ldc => {
            let classes_line = expect_line(&mut lines, "ldc classes")?;
            let n_classes: usize = classes_line
                .trim_start_matches("ldc classes ")
                .parse()
                .map_err(|_| Error::Format("model file: bad class count".into()))?;
            let mut classes = Vec::with_capacity(n_classes);
            let mut weights = Vec::with_capacity(n_classes);
            let mut biases = Vec::with_capacity(n_classes);
            for _ in 0..n_classes {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::Format("model file: truncated ldc rows".into()))?;
                let tokens: Vec<&str> = line.splitn(6, ' ').collect();
                if tokens.len() != 6 || tokens[0] != "class" || tokens[2] != "bias" {
                    return Err(Error::Format(format!("model file: bad ldc row {line:?}")));
                }
                classes.push(ClassLabel::parse(tokens[1])?);
                biases.push(
                    tokens[3]
                        .parse()
                        .map_err(|_| Error::Format("model file: bad ldc bias".into()))?,
                );
                weights.push(parse_floats(tokens[5])?);
            }
            ModelParams::Ldc(LdcModel {
                classes,
                weights,
                biases,
            })
        }
    };
    Ok(TrainedModel {
        kind,
        normalizer,
        params,
    })
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_floats(text: &str) -> Result<Vec<f64>> {
    text.split(' ')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Format(format!("model file: bad float {t:?}")))
        })
        .collect()
}

fn expect_line<'a>(lines: &mut std::str::Lines<'a>, prefix: &str) -> Result<&'a str> {
    let line = lines
        .next()
        .ok_or_else(|| Error::Format(format!("model file: missing {prefix} line")))?;
    if !line.starts_with(prefix) {
        return Err(Error::Format(format!(
            "model file: expected {prefix} line, got {line:?}"
        )));
    }
    Ok(line)
}

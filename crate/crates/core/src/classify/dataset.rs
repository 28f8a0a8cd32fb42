//! Labeled samples grouped by physical apple, and the drop-one-out split.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use crate::descriptors::FeatureVector;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// The three candidate classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Stem,
    Calyx,
    Defect,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] = [ClassLabel::Stem, ClassLabel::Calyx, ClassLabel::Defect];

    pub fn index(self) -> usize {
        match self {
            ClassLabel::Stem => 0,
            ClassLabel::Calyx => 1,
            ClassLabel::Defect => 2,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "stem" => Ok(ClassLabel::Stem),
            "calyx" => Ok(ClassLabel::Calyx),
            "defect" => Ok(ClassLabel::Defect),
            other => Err(Error::Format(format!("unknown class label {other:?}"))),
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassLabel::Stem => "stem",
            ClassLabel::Calyx => "calyx",
            ClassLabel::Defect => "defect",
        };
        f.write_str(s)
    }
}

/// One labeled feature vector with its provenance.
#[derive(Debug, Clone)]
pub struct Sample {
    pub features: FeatureVector,
    pub label: ClassLabel,
    pub apple_id: u32,
    pub view_id: u32,
}

/// A collection of samples sharing one feature shape.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if let Some(first) = samples.first() {
            let shape = first.features.shape();
            for (i, s) in samples.iter().enumerate() {
                if s.features.shape() != shape {
                    return Err(Error::Parameter(format!(
                        "sample {i} has shape {:?}, expected {shape:?}",
                        s.features.shape()
                    )));
                }
            }
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn shape(&self) -> Option<(usize, usize, usize)> {
        self.samples.first().map(|s| s.features.shape())
    }

    pub fn apple_ids(&self) -> BTreeSet<u32> {
        self.samples.iter().map(|s| s.apple_id).collect()
    }

    /// Flat CSV: `apple_id,view_id,label,<features...>` per row, features in
    /// canonical block order. The header records the block shape.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let shape = self
            .shape()
            .ok_or_else(|| Error::Parameter("cannot write an empty dataset".into()))?;
        let mut out = String::new();
        out.push_str("apple_id,view_id,label");
        for (tag, len) in [("m", shape.0), ("f", shape.1), ("r", shape.2)] {
            for i in 1..=len {
                out.push_str(&format!(",{tag}_{i}"));
            }
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{},{},{}", s.apple_id, s.view_id, s.label));
            for v in s.features.flat() {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        std::fs::write(path.as_ref(), out)?;
        Ok(())
    }

    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("features csv: empty file".into()))?;
        let columns: Vec<&str> = header.split(',').collect();
        if columns.len() < 4 || columns[0] != "apple_id" {
            return Err(Error::Format(
                "features csv: header must start with apple_id,view_id,label".into(),
            ));
        }
        let m = columns.iter().filter(|c| c.starts_with("m_")).count();
        let f = columns.iter().filter(|c| c.starts_with("f_")).count();
        let r = columns.iter().filter(|c| c.starts_with("r_")).count();
        if 3 + m + f + r != columns.len() {
            return Err(Error::Format(
                "features csv: unrecognized feature columns in header".into(),
            ));
        }
        let mut samples = Vec::new();
        for (ln, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() {
                return Err(Error::Format(format!(
                    "features csv line {}: {} fields, expected {}",
                    ln + 2,
                    fields.len(),
                    columns.len()
                )));
            }
            let apple_id: u32 = fields[0]
                .parse()
                .map_err(|_| Error::Format(format!("features csv line {}: bad apple_id", ln + 2)))?;
            let view_id: u32 = fields[1]
                .parse()
                .map_err(|_| Error::Format(format!("features csv line {}: bad view_id", ln + 2)))?;
            let label = ClassLabel::parse(fields[2])?;
            let values: Vec<f64> = fields[3..]
                .iter()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        Error::Format(format!("features csv line {}: bad value {t:?}", ln + 2))
                    })
                })
                .collect::<Result<_>>()?;
            let features = FeatureVector::from_flat(&values, (m, f, r), Some(label))?;
            samples.push(Sample {
                features,
                label,
                apple_id,
                view_id,
            });
        }
        Dataset::new(samples)
    }
}

/// Splits whole apples into train and test with the seeded generator. Apples
/// are grouped by their class signature (the multiset of labels they carry)
/// and shuffled within each group, which keeps per-class proportions within
/// one apple of the target fraction.
pub fn split_drop_one_out(
    dataset: &Dataset,
    train_fraction: f64,
    rng_seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Parameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    // each class needs at least two apples, otherwise one side is empty
    let mut apples_per_class: BTreeMap<ClassLabel, BTreeSet<u32>> = BTreeMap::new();
    for s in &dataset.samples {
        apples_per_class.entry(s.label).or_default().insert(s.apple_id);
    }
    for (label, apples) in &apples_per_class {
        if apples.len() < 2 {
            return Err(Error::Parameter(format!(
                "class {label} appears in only {} apple(s); need at least 2 to split",
                apples.len()
            )));
        }
    }

    // group apples by their label signature
    let mut signature: BTreeMap<u32, Vec<ClassLabel>> = BTreeMap::new();
    for s in &dataset.samples {
        signature.entry(s.apple_id).or_default().push(s.label);
    }
    let mut groups: BTreeMap<Vec<ClassLabel>, Vec<u32>> = BTreeMap::new();
    for (apple, mut labels) in signature {
        labels.sort();
        groups.entry(labels).or_default().push(apple);
    }

    let mut rng = SplitMix64::new(rng_seed);
    let mut train_apples: BTreeSet<u32> = BTreeSet::new();
    for (_, mut apples) in groups {
        apples.sort_unstable();
        rng.shuffle(&mut apples);
        // singleton signature groups cannot be split; they train
        let n_train = if apples.len() == 1 {
            1
        } else {
            let ideal = (apples.len() as f64 * train_fraction).round() as usize;
            ideal.clamp(1, apples.len() - 1)
        };
        train_apples.extend(&apples[..n_train]);
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for s in &dataset.samples {
        if train_apples.contains(&s.apple_id) {
            train.push(s.clone());
        } else {
            test.push(s.clone());
        }
    }
    Ok((Dataset::new(train)?, Dataset::new(test)?))
}

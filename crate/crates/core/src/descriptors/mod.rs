//! Shape descriptors of candidate regions and their fusion.
//!
//! Each candidate yields three blocks: the multifractal spectrum of its mask,
//! the Fourier magnitudes of its boundary, and the Radon projection profiles
//! of its mask. Vectors are compared with the fused distance: the sum of the
//! per-block Euclidean distances.

mod fourier;
mod multifractal;
mod radon;

pub use fourier::{
    boundary_to_complex, fourier_coefficients, fourier_descriptor, reconstruct_boundary,
};
pub use multifractal::{
    box_partition_stats, default_q_grid, multifractal_descriptor, BoxStats, MultifractalConfig,
};
pub use radon::{radon_descriptor, radon_transform, RadonMatrix};

use crate::classify::ClassLabel;
use crate::error::{Error, Result};
use crate::imaging::CandidateObject;

/// Which descriptor a block came from; blocks always appear in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Multifractal,
    Fourier,
    Radon,
}

impl BlockKind {
    pub const ALL: [BlockKind; 3] = [BlockKind::Multifractal, BlockKind::Fourier, BlockKind::Radon];

    pub fn tag(self) -> &'static str {
        match self {
            BlockKind::Multifractal => "multifractal",
            BlockKind::Fourier => "fourier",
            BlockKind::Radon => "radon",
        }
    }
}

/// One descriptor's worth of features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    pub kind: BlockKind,
    pub values: Vec<f64>,
}

/// Fused feature vector: the three blocks in canonical order plus an
/// optional class label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub blocks: [FeatureBlock; 3],
    pub label: Option<ClassLabel>,
}

impl FeatureVector {
    pub fn new(blocks: [FeatureBlock; 3], label: Option<ClassLabel>) -> Result<Self> {
        for (block, kind) in blocks.iter().zip(BlockKind::ALL) {
            if block.kind != kind {
                return Err(Error::Parameter(format!(
                    "feature blocks out of order: expected {}, got {}",
                    kind.tag(),
                    block.kind.tag()
                )));
            }
            if block.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!(
                    "{} block contains a non-finite value",
                    kind.tag()
                )));
            }
        }
        Ok(Self { blocks, label })
    }

    /// Block lengths (multifractal, fourier, radon).
    pub fn shape(&self) -> (usize, usize, usize) {
        (
            self.blocks[0].values.len(),
            self.blocks[1].values.len(),
            self.blocks[2].values.len(),
        )
    }

    pub fn total_len(&self) -> usize {
        self.blocks.iter().map(|b| b.values.len()).sum()
    }

    /// All features flattened in canonical block order.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_len());
        for block in &self.blocks {
            out.extend_from_slice(&block.values);
        }
        out
    }

    /// Rebuilds a vector from a flat slice with the given block shape.
    pub fn from_flat(
        flat: &[f64],
        shape: (usize, usize, usize),
        label: Option<ClassLabel>,
    ) -> Result<Self> {
        if flat.len() != shape.0 + shape.1 + shape.2 {
            return Err(Error::Parameter(format!(
                "flat vector of length {} does not match block shape {:?}",
                flat.len(),
                shape
            )));
        }
        let (m, rest) = flat.split_at(shape.0);
        let (f, r) = rest.split_at(shape.1);
        FeatureVector::new(
            [
                FeatureBlock {
                    kind: BlockKind::Multifractal,
                    values: m.to_vec(),
                },
                FeatureBlock {
                    kind: BlockKind::Fourier,
                    values: f.to_vec(),
                },
                FeatureBlock {
                    kind: BlockKind::Radon,
                    values: r.to_vec(),
                },
            ],
            label,
        )
    }
}

/// Settings for all three descriptor blocks.
#[derive(Debug, Clone)]
pub struct DescriptorConfig {
    pub multifractal: MultifractalConfig,
    /// Arc-length resample count for the Fourier block.
    pub fourier_points: usize,
    /// Fourier magnitudes kept (frequencies 2..=k+1).
    pub fourier_k: usize,
    /// Radon projection angle step in degrees.
    pub radon_step: usize,
    /// Profile bins per Radon angle.
    pub radon_bins: usize,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        Self {
            multifractal: MultifractalConfig::default(),
            fourier_points: 256,
            fourier_k: 64,
            radon_step: 30,
            radon_bins: 16,
        }
    }
}

impl DescriptorConfig {
    /// Expected feature-vector shape under this configuration.
    pub fn shape(&self) -> (usize, usize, usize) {
        (
            2 * self.multifractal.q_values.len(),
            self.fourier_k,
            self.radon_bins * (180 / self.radon_step),
        )
    }
}

/// Runs all three descriptors on one candidate. Failures are tagged with the
/// block that produced them.
pub fn extract_all(candidate: &CandidateObject, config: &DescriptorConfig) -> Result<FeatureVector> {
    let tag_err = |kind: BlockKind| move |e: Error| tag_block_error(kind, e);

    let mf = multifractal_descriptor(&candidate.mask, &config.multifractal)
        .map_err(tag_err(BlockKind::Multifractal))?;
    let fd = fourier_descriptor(&candidate.boundary, config.fourier_points, config.fourier_k)
        .map_err(tag_err(BlockKind::Fourier))?;
    let rd = radon_descriptor(&candidate.mask, config.radon_step, config.radon_bins)
        .map_err(tag_err(BlockKind::Radon))?;
    FeatureVector::new([mf, fd, rd], None)
}

fn tag_block_error(kind: BlockKind, e: Error) -> Error {
    let tag = kind.tag();
    match e {
        Error::Parameter(m) => Error::Parameter(format!("{tag} descriptor: {m}")),
        Error::EmptyRegion(m) => Error::EmptyRegion(format!("{tag} descriptor: {m}")),
        Error::Degenerate(m) => Error::Degenerate(format!("{tag} descriptor: {m}")),
        Error::Numerical(m) => Error::Numerical(format!("{tag} descriptor: {m}")),
        other => other,
    }
}

/// Fused distance: the sum of per-block Euclidean distances.
pub fn fused_distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Parameter(format!(
            "feature shapes differ: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(fused_distance_unchecked(a, b))
}

pub(crate) fn fused_distance_unchecked(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.blocks
        .iter()
        .zip(&b.blocks)
        .map(|(ba, bb)| {
            ba.values
                .iter()
                .zip(&bb.values)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::connected_components;
    use crate::imaging::BinaryMask;
    use crate::rng::SplitMix64;

    fn disk_candidate(radius: f64, size: usize) -> CandidateObject {
        let mut mask = BinaryMask::empty(size, size);
        let c = (size as f64 - 1.0) / 2.0;
        for y in 0..size {
            for x in 0..size {
                if (x as f64 - c).powi(2) + (y as f64 - c).powi(2) <= radius * radius {
                    mask.set(x, y, true);
                }
            }
        }
        connected_components(&mask, 1).unwrap().remove(0)
    }

    #[test]
    fn default_vector_length_is_202() {
        let cand = disk_candidate(20.0, 64);
        let v = extract_all(&cand, &DescriptorConfig::default()).unwrap();
        assert_eq!(v.shape(), (42, 64, 96));
        assert_eq!(v.total_len(), 202);
    }

    #[test]
    fn extraction_is_deterministic() {
        let cand = disk_candidate(18.0, 56);
        let cfg = DescriptorConfig::default();
        let v1 = extract_all(&cand, &cfg).unwrap();
        let v2 = extract_all(&cand, &cfg).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn one_pixel_candidate_fails_in_fourier_block() {
        let mut mask = BinaryMask::empty(3, 3);
        mask.set(1, 1, true);
        let cand = connected_components(&mask, 1).unwrap().remove(0);
        let err = extract_all(&cand, &DescriptorConfig::default()).unwrap_err();
        // multifractal fails first on a single pixel; shrink its box sizes so
        // the Fourier block is the one that trips
        assert!(err.to_string().contains("multifractal"));
        let mut small = BinaryMask::empty(70, 70);
        for y in 0..70 {
            for x in 0..68 {
                small.set(x, y, (x + y) % 2 == 0 || x < 40);
            }
        }
        // a candidate with a healthy mask but a stubby 3-point chain
        let comp = connected_components(&small, 1).unwrap().remove(0);
        let stub = CandidateObject {
            boundary: crate::imaging::BoundaryChain {
                points: comp.boundary.points[..3].to_vec(),
            },
            ..comp
        };
        let err = extract_all(&stub, &DescriptorConfig::default()).unwrap_err();
        assert!(err.to_string().contains("fourier"), "{err}");
    }

    #[test]
    fn fused_distance_identity_and_blockwise_sum() {
        let cand = disk_candidate(20.0, 64);
        let v = extract_all(&cand, &DescriptorConfig::default()).unwrap();
        assert_eq!(fused_distance(&v, &v).unwrap(), 0.0);

        let mut w = v.clone();
        for x in &mut w.blocks[2].values {
            *x += 0.25;
        }
        // distance differing only in one block equals that block's distance
        let d = fused_distance(&v, &w).unwrap();
        let block_d = (0..96).map(|_| 0.25f64 * 0.25).sum::<f64>().sqrt();
        assert!((d - block_d).abs() < 1e-12);
    }

    #[test]
    fn fused_distance_matches_blockwise_recompute() {
        let mut rng = SplitMix64::new(99);
        let mk = |rng: &mut SplitMix64| {
            let blocks = [
                FeatureBlock {
                    kind: BlockKind::Multifractal,
                    values: (0..5).map(|_| rng.range_f64(-1.0, 1.0)).collect(),
                },
                FeatureBlock {
                    kind: BlockKind::Fourier,
                    values: (0..7).map(|_| rng.range_f64(-1.0, 1.0)).collect(),
                },
                FeatureBlock {
                    kind: BlockKind::Radon,
                    values: (0..3).map(|_| rng.range_f64(-1.0, 1.0)).collect(),
                },
            ];
            FeatureVector::new(blocks, None).unwrap()
        };
        for _ in 0..20 {
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let expect: f64 = (0..3)
                .map(|bi| {
                    a.blocks[bi]
                        .values
                        .iter()
                        .zip(&b.blocks[bi].values)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt()
                })
                .sum();
            assert!((fused_distance(&a, &b).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn fused_distance_shape_mismatch() {
        let cand = disk_candidate(20.0, 64);
        let v = extract_all(&cand, &DescriptorConfig::default()).unwrap();
        let small_cfg = DescriptorConfig {
            fourier_k: 16,
            ..Default::default()
        };
        let w = extract_all(&cand, &small_cfg).unwrap();
        assert!(fused_distance(&v, &w).is_err());
    }

    #[test]
    fn fused_distance_is_a_metric_on_random_triples() {
        let mut rng = SplitMix64::new(7);
        let mk = |rng: &mut SplitMix64| {
            FeatureVector::from_flat(
                &(0..12).map(|_| rng.range_f64(-2.0, 2.0)).collect::<Vec<_>>(),
                (4, 4, 4),
                None,
            )
            .unwrap()
        };
        for _ in 0..50 {
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let c = mk(&mut rng);
            let dab = fused_distance(&a, &b).unwrap();
            let dba = fused_distance(&b, &a).unwrap();
            let dac = fused_distance(&a, &c).unwrap();
            let dcb = fused_distance(&c, &b).unwrap();
            assert!(dab >= 0.0);
            assert_eq!(dab, dba);
            assert!(dab <= dac + dcb + 1e-12, "triangle inequality");
        }
    }
}

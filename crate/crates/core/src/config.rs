//! Pipeline configuration: every tunable with its default, serialized as a
//! flat `key=value` text file. Unknown keys are rejected so typos cannot
//! silently fall back to defaults.

use std::fmt::Write as _;

use crate::classify::{ModelKind, TrainParams};
use crate::classify::SvmParams;
use crate::descriptors::{default_q_grid, DescriptorConfig, MultifractalConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub median_radius: usize,
    pub growcut_border: usize,
    pub growcut_core_fraction: f64,
    /// 0 means automatic: width + height passes.
    pub growcut_max_iters: usize,
    pub thresholds: [u8; 3],
    pub min_layers: u8,
    pub grad_threshold: u8,
    pub min_area: usize,
    pub mf_q_min: f64,
    pub mf_q_max: f64,
    pub mf_q_count: usize,
    pub mf_box_sizes: Vec<usize>,
    pub mf_probability_floor: f64,
    pub fourier_points: usize,
    pub fourier_k: usize,
    pub radon_step: usize,
    pub radon_bins: usize,
    pub classifier: ModelKind,
    pub knn_k: usize,
    pub svm_c: f64,
    pub svm_degree: u32,
    pub svm_tol: f64,
    /// 0 means automatic: 10x the training size.
    pub svm_max_passes: usize,
    pub train_fraction: f64,
    pub rng_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            median_radius: 1,
            growcut_border: 2,
            growcut_core_fraction: 0.25,
            growcut_max_iters: 0,
            thresholds: [30, 50, 65],
            min_layers: 2,
            grad_threshold: 40,
            min_area: 20,
            mf_q_min: -1.0,
            mf_q_max: 1.0,
            mf_q_count: 21,
            mf_box_sizes: vec![2, 4, 8, 16, 32],
            mf_probability_floor: 1e-12,
            fourier_points: 256,
            fourier_k: 64,
            radon_step: 30,
            radon_bins: 16,
            classifier: ModelKind::Svm,
            knn_k: 4,
            svm_c: 1.0,
            svm_degree: 3,
            svm_tol: 1e-3,
            svm_max_passes: 0,
            train_fraction: 0.75,
            rng_seed: 42,
        }
    }
}

impl PipelineConfig {
    pub fn q_values(&self) -> Vec<f64> {
        if self.mf_q_count == 21 && self.mf_q_min == -1.0 && self.mf_q_max == 1.0 {
            return default_q_grid();
        }
        if self.mf_q_count == 1 {
            return vec![self.mf_q_min];
        }
        let step = (self.mf_q_max - self.mf_q_min) / (self.mf_q_count - 1) as f64;
        (0..self.mf_q_count)
            .map(|i| self.mf_q_min + step * i as f64)
            .collect()
    }

    pub fn descriptor_config(&self) -> DescriptorConfig {
        DescriptorConfig {
            multifractal: MultifractalConfig {
                q_values: self.q_values(),
                box_sizes: self.mf_box_sizes.clone(),
                min_probability_floor: self.mf_probability_floor,
            },
            fourier_points: self.fourier_points,
            fourier_k: self.fourier_k,
            radon_step: self.radon_step,
            radon_bins: self.radon_bins,
        }
    }

    pub fn train_params(&self) -> TrainParams {
        TrainParams {
            knn_k: self.knn_k,
            svm: SvmParams {
                c: self.svm_c,
                degree: self.svm_degree,
                tol: self.svm_tol,
                max_passes: self.svm_max_passes,
            },
        }
    }

    pub fn growcut_iters(&self, width: usize, height: usize) -> usize {
        if self.growcut_max_iters == 0 {
            width + height
        } else {
            self.growcut_max_iters
        }
    }

    /// Serializes in a fixed key order, parseable by [`PipelineConfig::parse`].
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").expect("write to string");
        kv("median_radius", self.median_radius.to_string());
        kv("growcut_border", self.growcut_border.to_string());
        kv("growcut_core_fraction", self.growcut_core_fraction.to_string());
        kv("growcut_max_iters", self.growcut_max_iters.to_string());
        kv(
            "thresholds",
            format!("{},{},{}", self.thresholds[0], self.thresholds[1], self.thresholds[2]),
        );
        kv("min_layers", self.min_layers.to_string());
        kv("grad_threshold", self.grad_threshold.to_string());
        kv("min_area", self.min_area.to_string());
        kv("mf_q_min", self.mf_q_min.to_string());
        kv("mf_q_max", self.mf_q_max.to_string());
        kv("mf_q_count", self.mf_q_count.to_string());
        kv(
            "mf_box_sizes",
            self.mf_box_sizes
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("mf_probability_floor", self.mf_probability_floor.to_string());
        kv("fourier_points", self.fourier_points.to_string());
        kv("fourier_k", self.fourier_k.to_string());
        kv("radon_step", self.radon_step.to_string());
        kv("radon_bins", self.radon_bins.to_string());
        kv("classifier", self.classifier.to_string());
        kv("knn_k", self.knn_k.to_string());
        kv("svm_c", self.svm_c.to_string());
        kv("svm_degree", self.svm_degree.to_string());
        kv("svm_tol", self.svm_tol.to_string());
        kv("svm_max_passes", self.svm_max_passes.to_string());
        kv("train_fraction", self.train_fraction.to_string());
        kv("rng_seed", self.rng_seed.to_string());
        out
    }

    /// Parses `key=value` lines; `#` starts a comment. Unknown keys error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Format(format!("config line {}: expected key=value, got {raw:?}", ln + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Format(format!("config line {}: {e}", ln + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one key=value override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse::<T>()
                .map_err(|_| Error::Format(format!("bad value {value:?} for {key}")))
        }
        match key {
            "median_radius" => self.median_radius = num(key, value)?,
            "growcut_border" => self.growcut_border = num(key, value)?,
            "growcut_core_fraction" => self.growcut_core_fraction = num(key, value)?,
            "growcut_max_iters" => self.growcut_max_iters = num(key, value)?,
            "thresholds" => {
                let parts: Vec<u8> = value
                    .split(',')
                    .map(|t| num::<u8>(key, t.trim()))
                    .collect::<Result<_>>()?;
                if parts.len() != 3 {
                    return Err(Error::Format(format!(
                        "thresholds needs exactly 3 comma-separated values, got {value:?}"
                    )));
                }
                self.thresholds = [parts[0], parts[1], parts[2]];
            }
            "min_layers" => self.min_layers = num(key, value)?,
            "grad_threshold" => self.grad_threshold = num(key, value)?,
            "min_area" => self.min_area = num(key, value)?,
            "mf_q_min" => self.mf_q_min = num(key, value)?,
            "mf_q_max" => self.mf_q_max = num(key, value)?,
            "mf_q_count" => self.mf_q_count = num(key, value)?,
            "mf_box_sizes" => {
                self.mf_box_sizes = value
                    .split(',')
                    .map(|t| num::<usize>(key, t.trim()))
                    .collect::<Result<_>>()?;
            }
            "mf_probability_floor" => self.mf_probability_floor = num(key, value)?,
            "fourier_points" => self.fourier_points = num(key, value)?,
            "fourier_k" => self.fourier_k = num(key, value)?,
            "radon_step" => self.radon_step = num(key, value)?,
            "radon_bins" => self.radon_bins = num(key, value)?,
            "classifier" => self.classifier = ModelKind::parse(value)?,
            "knn_k" => self.knn_k = num(key, value)?,
            "svm_c" => self.svm_c = num(key, value)?,
            "svm_degree" => self.svm_degree = num(key, value)?,
            "svm_tol" => self.svm_tol = num(key, value)?,
            "svm_max_passes" => self.svm_max_passes = num(key, value)?,
            "train_fraction" => self.train_fraction = num(key, value)?,
            "rng_seed" => self.rng_seed = num(key, value)?,
            other => {
                return Err(Error::Format(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.mf_q_count == 0 {
            return Err(Error::Parameter("mf_q_count must be at least 1".into()));
        }
        DescriptorConfig::validate_basic(&self.descriptor_config())?;
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Parameter(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

impl DescriptorConfig {
    fn validate_basic(&self) -> Result<()> {
        self.multifractal.validate()?;
        if self.radon_step == 0 || 180 % self.radon_step != 0 {
            return Err(Error::Parameter(format!(
                "radon_step must divide 180, got {}",
                self.radon_step
            )));
        }
        if self.fourier_k + 2 > self.fourier_points {
            return Err(Error::Parameter(format!(
                "fourier_k {} does not fit below fourier_points {}",
                self.fourier_k, self.fourier_points
            )));
        }
        Ok(())
    }
}

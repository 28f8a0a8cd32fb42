//! Seeded synthetic imagery: fractal oracles for the multifractal tests and
//! a labeled three-class corpus of fruit scenes for end-to-end evaluation.
//!
//! Everything here is a pure function of its seed (see [`crate::rng`]), so a
//! corpus can be regenerated byte-for-byte from its manifest.

mod scene;
mod shapes;

pub use scene::{gen_apple_scene, gen_corpus, CorpusManifest, ManifestRow, Scene, SceneTruth};
pub use shapes::{gen_candidate_shape, gen_sierpinski};

use crate::classify::ClassLabel;

/// Everything needed to regenerate one candidate shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub class: ClassLabel,
    /// Linear size multiplier in [0.5, 2.0].
    pub scale: f64,
    /// Orientation in degrees.
    pub rotation_deg: f64,
    /// Boundary roughness and scene noise amplitude, roughly 0..0.15.
    pub jitter: f64,
    pub rng_seed: u64,
}

impl SynthSpec {
    pub fn new(class: ClassLabel, scale: f64, rotation_deg: f64, jitter: f64, rng_seed: u64) -> Self {
        Self {
            class,
            scale,
            rotation_deg,
            jitter,
            rng_seed,
        }
    }
}

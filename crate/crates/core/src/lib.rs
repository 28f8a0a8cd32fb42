//! Machine-vision pipeline for separating fruit stem/calyx regions from true
//! surface defects.
//!
//! The stages mirror the classical recognition chain:
//!
//! 1. [`imaging`] — image containers, PGM/PPM I/O, median filter, Sobel
//!    gradients, component labelling and boundary tracing;
//! 2. [`segmentation`] — grow-cut background subtraction plus
//!    multi-threshold / marker / gradient-refined candidate detection;
//! 3. [`descriptors`] — multifractal spectrum, Fourier boundary coefficients
//!    and Radon projection profiles, fused into one feature vector;
//! 4. [`classify`] — k-NN, polynomial-kernel SVM (SMO) and a linear
//!    discriminant, with apple-level train/test splitting and TPR/FPR
//!    reports;
//! 5. [`synthgen`] — seeded synthetic fruit scenes and fractal oracles used
//!    by the test-suite and the benchmark corpus.
//!
//! [`pipeline`] wires the stages together behind [`config::PipelineConfig`].

pub mod classify;
pub mod config;
pub mod descriptors;
pub mod error;
pub mod imaging;
pub mod pipeline;
pub mod rng;
pub mod segmentation;
pub mod synthgen;

pub use error::{Error, Result};

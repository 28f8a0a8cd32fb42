//! Classifiers over fused shape descriptors: k-NN with the fused distance,
//! one-vs-one polynomial-kernel SVMs trained by SMO, and a pooled-covariance
//! linear discriminant. Splitting is always by apple so no specimen leaks
//! between train and test, and normalization statistics come from the train
//! side only.

mod dataset;
mod eval;
mod knn;
mod ldc;
mod model;
mod normalizer;
mod svm;

pub use dataset::{split_drop_one_out, ClassLabel, Dataset, Sample};
pub use eval::{
    compare_fusions, evaluate, project_dataset, EvalReport, FusionTable, FUSION_SUBSETS,
};
pub use model::{load_model, predict, save_model, train, ModelKind, TrainParams, TrainedModel};
pub use normalizer::{fit_normalizer, Normalizer};
pub use svm::{BinarySvm, SvmParams};

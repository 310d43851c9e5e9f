//! Quality-guided mixture-of-experts score fusion.
//!
//! Scores are z-score (or min-max) normalized per modality, combined by affine
//! experts, and mixed by a gate driven by per-modality quality weights from a
//! sigmoid quality estimator. Training is two-stage: the estimator first, on a
//! pairwise ranking loss, then the experts and gate on the score triplet loss.

mod baseline;
mod error;
pub mod io;
mod loss;
mod model;
mod normalize;
mod quality;
pub mod synthetic;
mod train;

pub use baseline::{baseline_fuse, baseline_fuse_matrix};
pub use error::{FusionError, Result};
pub use loss::score_triplet_loss;
pub use model::{moe_fuse, quality_array, FusionExpert, FusionModel, GateRule};
pub use normalize::{calibration_scores, fit_normalizer, ModalityStats, NormKind, Normalizer};
pub use quality::{
    genuine_margin, head_loss, ranking_accuracy, ranking_loss, train_quality_estimator,
    train_quality_head, QualityEstimator, QualityHead, QualitySample, QualityTrainConfig,
};
pub use train::{
    fusion_objective, quality_samples, train_fusion, train_qme, FusionSample, FusionTrainConfig,
    QmeConfig, TrainLog,
};

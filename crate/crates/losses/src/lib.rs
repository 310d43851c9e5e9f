//! Differentiable training objectives over pairwise similarity scores.
//!
//! Every loss returns its value together with the analytic gradient with
//! respect to its inputs, so callers can run plain gradient descent or check
//! the gradients numerically.

pub mod batch;
mod error;
mod feature;
mod hyper;
mod open_set;
mod partition;
mod sigmoid;
pub mod toy;
mod triplet;

pub use error::{LossError, Result};
pub use feature::{l_div, l_rec, l_smo, FeatureMap, SOBEL_X, SOBEL_Y};
pub use hyper::LossHyperparams;
pub use open_set::{
    detection_thresholds, l_idl, l_open, l_rtm, r_det, r_det_tau, r_id, softrank, OpenSetLoss,
    RDet, ThresholdSet,
};
pub use partition::{
    cosine_backward, cosine_table, partition_batch, BatchPartition, ExemplarRef, ExemplarSplit,
    MatedProbe, ScoreTable,
};
pub use sigmoid::sigmoid;
pub use triplet::{range_triplet_loss, RangedVector, Triplet, TripletLoss};

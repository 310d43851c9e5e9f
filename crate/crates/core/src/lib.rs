//! Shared data model for whole-body biometric matching: per-modality templates,
//! gallery aggregation, probe-vs-gallery score matrices and the on-disk formats
//! used by every other crate in the workspace.

mod error;
pub mod io;
mod modality;
mod score;
mod similarity;
mod subject;
mod template;

pub use error::{CoreError, Result};
pub use modality::{Modality, ModalityDims, PerModality, RangeClass};
pub use score::{build_score_matrix, is_missing, ScoreMatrix, MISSING};
pub use similarity::{cosine_similarity, dot, l2_norm, normalize};
pub use subject::{GalleryEntry, ProbeRecord};
pub use template::{aggregate_gallery, Template};

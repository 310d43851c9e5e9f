//! Biometric evaluation protocols: 1:1 verification (TAR at FAR), 1:N
//! closed-set retrieval (rank-k) and 1:N open-set identification (FNIR at
//! FPIR) over galleries that may contain distractor identities.

mod error;
mod metrics;
mod protocol;
mod report;
pub mod synthetic;

pub use error::{EvalError, Result};
pub use metrics::{
    fnir_at_fpir, mate_rank, rank_k_accuracy, tar_at_far, threshold_at_rate, MatedSearch,
};
pub use protocol::{
    load_protocol, run_protocol, Fuser, ProbeSpec, ProtocolConfig, ProtocolFile, ProtocolInputs,
};
pub use report::{EvalReport, MetricRow, ReportCounts};

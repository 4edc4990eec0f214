//! Split-extended LDPC codes for decode-and-forward relaying.
//!
//! The source sends a codeword of `H1`. The relay decodes it, computes extra
//! parity bits by splitting every check of `H1` into a chain of sub-checks,
//! and forwards those bits. The destination decodes the combined word with
//! the split-extended matrix `H`.
//!
//! Modules, bottom up:
//!
//! - [`gf2`], [`matrix`], [`qc`], [`encode`], [`cycles`], [`degree`]: parity-check
//!   matrices, encoding and graph statistics.
//! - [`split`], [`heuristic`]: the split-extension and the choice of splits.
//! - [`channel`], [`decoder`]: BI-AWGN links and message-passing decoders.
//! - [`ga`], [`de`], [`capacity`]: asymptotic thresholds and capacity limits.
//! - [`sim`]: Monte-Carlo simulation of the relaying protocol.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel;
pub mod cycles;
pub mod de;
pub mod decoder;
pub mod degree;
pub mod encode;
pub mod error;
pub mod ga;
pub mod gf2;
pub mod heuristic;
pub mod matrix;
pub mod qc;
pub mod quad;
pub mod sim;
pub mod split;

pub use capacity::{bi_awgn_capacity, capacity_curve, capacity_function, DistributedRate};
pub use channel::{discrepancy_db, sigma_from_snr_db, snr_db_from_sigma, transmit, LlrVector, RelayChannelParams};
pub use cycles::{enumerate_short_cycles, CycleCounts};
pub use de::{
    converges, de_step, multi_edge_transform, threshold, threshold_curve, DEState, DeOptions, MultiEdgeDistribution,
};
pub use decoder::{decode_bp, decode_scms, DecodeResult, Decoder, DecoderKind};
pub use degree::{degree_distribution_of, DegreeDistribution};
pub use encode::{encode_systematic, Codeword, SystematicEncoder};
pub use error::{Error, Result};
pub use ga::{phi, psi, PhiMode};
pub use heuristic::{cycle_breaking_split_plan, HeuristicOptions};
pub use matrix::SparseBinaryMatrix;
pub use qc::{wimax_base, QcBaseMatrix, WimaxCode};
pub use split::{regular_split_plan, split_extend, SplitExtension, SplitPlan};

//! Link-level simulation and analysis of semi-grant-free uplink NOMA.
//!
//! One grant-based user shares an uplink resource block with a pool of
//! grant-free contenders. A single contender is admitted per block and the
//! base station decodes the pair by successive interference cancellation
//! (SIC), so the admitted user's rate depends on which of the two decoding
//! orders is used and on how the admission rule picks the contender.
//!
//! The crate provides:
//!
//! - [`channel`]: Rayleigh block-fading draws with sorted contender gains and
//!   deterministic, trial-indexed random streams,
//! - [`schemes`]: per-draw admission/rate/outage outcomes for the greedy
//!   (strongest-contender), guarded (weakest-contender) and threshold-adaptive
//!   hybrid SIC schemes, plus the baseline rate expressions,
//! - [`analysis`]: closed-form outage floors, high-SNR bounds and a quadrature
//!   cross-check for each,
//! - [`montecarlo`]: a deterministic parallel estimator producing outage
//!   probabilities with Wilson confidence intervals and mean rate gains over
//!   parameter sweeps,
//! - [`contention`]: a distributed backoff mechanism that realizes the hybrid
//!   admission rule without centralized gain comparisons.

pub mod analysis;
pub mod channel;
pub mod contention;
pub mod montecarlo;
pub mod schemes;

pub use analysis::{AnalysisError, FloorResult, Method};
pub use channel::ChannelDraw;
pub use contention::{ContentionConfig, ContentionOutcome};
pub use montecarlo::{OutageEstimate, SchemeId, SweepRow, SweepSpec};
pub use schemes::{HybridPartition, ParamError, SchemeOutcome, SicOrder, SystemParams};

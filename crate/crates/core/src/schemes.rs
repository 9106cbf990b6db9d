//! Per-realization admission, rate and decoding-order logic.
//!
//! One grant-based primary user (gain `g0`, target rate `r0`) shares the
//! block with `M` grant-free contenders (sorted gains `g[0] <= ... <=
//! g[M-1]`, target rate `rs`). At most one contender is admitted, and the
//! base station decodes the pair by SIC in one of two orders:
//!
//! - **contender first** (CSI-style): the contender is decoded against the
//!   primary's interference, rate `log2(1 + P*g/(1 + P*g0))`, after which the
//!   primary decodes interference-free;
//! - **primary first** (QoS-style): the primary is decoded against the
//!   contender's interference — admissible only while the primary still
//!   meets `r0` — after which the contender decodes interference-free at
//!   `log2(1 + P*g)`.
//!
//! The schemes differ only in which contender they admit and which order
//! they commit to: the greedy rule always takes the strongest contender with
//! the contender-first order, the guarded rule takes the weakest contender
//! with the primary-first order, and the hybrid rule partitions contenders
//! around the threshold `tau` so each one is evaluated under the best order
//! it can support, then admits the rate argmax.
//!
//! All rates are in bits/s/Hz (base-2 logarithms). Every operation is a pure
//! function of its arguments.

use crate::channel::ChannelDraw;
use thiserror::Error;

/// Invalid [`SystemParams`] field.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("transmit SNR must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("contender count must be at least 1")]
    NoUsers,
    #[error("target rate {0} must be positive and finite, got {1}")]
    InvalidRate(&'static str, f64),
}

/// Scenario parameters shared by every scheme.
///
/// `p_linear` is the per-user transmit SNR `P` in linear scale. The OMA
/// baseline transmits at `2P` ([`SystemParams::p_oma`]) because it serves
/// each user in half the resource, which keeps the comparison fair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    p_linear: f64,
    m_users: usize,
    r0: f64,
    rs: f64,
}

impl SystemParams {
    /// Validates and builds a parameter set.
    pub fn new(p_linear: f64, m_users: usize, r0: f64, rs: f64) -> Result<Self, ParamError> {
        if !(p_linear.is_finite() && p_linear > 0.0) {
            return Err(ParamError::InvalidPower(p_linear));
        }
        if m_users < 1 {
            return Err(ParamError::NoUsers);
        }
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(ParamError::InvalidRate("r0", r0));
        }
        if !(rs.is_finite() && rs > 0.0) {
            return Err(ParamError::InvalidRate("rs", rs));
        }
        Ok(Self {
            p_linear,
            m_users,
            r0,
            rs,
        })
    }

    /// Builds a parameter set from a transmit SNR in dB (`P = 10^(dB/10)`).
    pub fn from_snr_db(snr_db: f64, m_users: usize, r0: f64, rs: f64) -> Result<Self, ParamError> {
        Self::new(10f64.powf(snr_db / 10.0), m_users, r0, rs)
    }

    /// NOMA per-user transmit SNR, linear.
    pub fn p(&self) -> f64 {
        self.p_linear
    }

    /// OMA transmit SNR, linear (`2P`).
    pub fn p_oma(&self) -> f64 {
        2.0 * self.p_linear
    }

    /// Number of grant-free contenders `M`.
    pub fn m(&self) -> usize {
        self.m_users
    }

    /// Primary user's target rate, bits/s/Hz.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Contender target rate, bits/s/Hz.
    pub fn rs(&self) -> f64 {
        self.rs
    }
}

/// SIC decoding order committed for an admitted contender.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum SicOrder {
    /// The contender is decoded first, against the primary's interference.
    SecondaryFirst,
    /// The primary is decoded first; the contender then decodes clean.
    PrimaryFirst,
}

/// Result of running one scheme on one channel draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeOutcome {
    /// Index (into the sorted gain slice) of the admitted contender.
    pub admitted: Option<usize>,
    /// Decoding order used, if anyone was admitted.
    pub order: Option<SicOrder>,
    /// Admitted contender's achievable rate, bits/s/Hz (0 if none).
    pub rate: f64,
    /// Whether the admitted rate missed the contender target `rs`.
    pub outage: bool,
    /// Sum-rate gain over the OMA-equivalent baseline: the admitted
    /// contender's achievable rate, not zeroed on outage.
    pub gain: f64,
    /// Whether a contender was admitted at all.
    pub admitted_flag: bool,
}

impl SchemeOutcome {
    fn admitted(user: usize, order: SicOrder, rate: f64, rs: f64) -> Self {
        Self {
            admitted: Some(user),
            order: Some(order),
            rate,
            outage: rate < rs,
            gain: rate,
            admitted_flag: true,
        }
    }

    fn denied(rs: f64) -> Self {
        Self {
            admitted: None,
            order: None,
            rate: 0.0,
            outage: 0.0 < rs,
            gain: 0.0,
            admitted_flag: false,
        }
    }
}

/// Hybrid-scheme split of the contenders around the threshold `tau`.
///
/// Indices refer to the sorted gain slice. `s1` holds the strong contenders
/// (gain strictly above `tau`, decoded before the primary) and `s2` the weak
/// ones (gain at most `tau`, decoded after the primary). A contender exactly
/// at `tau` meets the primary's QoS constraint with equality, so it belongs
/// in `s2` where that constraint is what matters.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridPartition {
    /// Threshold the split was computed against.
    pub tau: f64,
    /// Strong contenders: gain > tau.
    pub s1: Vec<usize>,
    /// Weak contenders: gain <= tau.
    pub s2: Vec<usize>,
}

/// OMA baseline rate: `1/2 * log2(1 + p_oma * gain)`.
///
/// The 1/2 reflects the dedicated half-resource an OMA user occupies.
pub fn oma_rate(p_oma: f64, gain: f64) -> f64 {
    assert!(p_oma > 0.0, "OMA transmit SNR must be positive");
    0.5 * (1.0 + p_oma * gain).log2()
}

/// Power-domain NOMA rate pair `(r_n, r_0)` for one contender at gain `gn`.
///
/// The contender is decoded first against the primary's interference
/// (`r_n`); the primary then decodes interference-free (`r_0`).
pub fn pd_noma_rates(params: &SystemParams, g0: f64, gn: f64) -> (f64, f64) {
    let p = params.p();
    let r_n = (1.0 + p * gn / (1.0 + p * g0)).log2();
    let r_0 = (1.0 + p * g0).log2();
    (r_n, r_0)
}

/// Cognitive-radio style scheduling: admit the strongest contender whose
/// interference still lets the primary meet `r0` when decoded first.
///
/// The admitted contender transmits at the interference-free rate
/// `log2(1 + P*g)` (the primary's signal is removed before it is decoded).
/// If every contender would break the primary's QoS, nobody is admitted and
/// the primary falls back to its dedicated slot.
pub fn cr_noma_schedule(params: &SystemParams, draw: &ChannelDraw) -> SchemeOutcome {
    assert!(draw.num_secondary() >= 1, "need at least one contender");
    let p = params.p();
    let g0 = draw.primary_gain();
    // Primary-first feasibility is monotone: more contender gain means more
    // interference on the primary. Scanning from the strongest down, the
    // first feasible contender is the max-gain feasible one.
    for (n, &g) in draw.secondary_gains().iter().enumerate().rev() {
        let primary_rate = (1.0 + p * g0 / (1.0 + p * g)).log2();
        if primary_rate >= params.r0() {
            let rate = (1.0 + p * g).log2();
            return SchemeOutcome::admitted(n, SicOrder::PrimaryFirst, rate, params.rs());
        }
    }
    SchemeOutcome::denied(params.rs())
}

/// Greedy admission: always take the strongest contender, decoded first.
///
/// Maximizes the contender's rate for the current draw, but the primary's
/// interference appears in the denominator, so the rate saturates at high
/// SNR and an outage floor remains.
pub fn sgf1_outcome(params: &SystemParams, draw: &ChannelDraw) -> SchemeOutcome {
    let g_max = draw
        .strongest_gain()
        .expect("need at least one contender");
    let p = params.p();
    let rate = (1.0 + p * g_max / (1.0 + p * draw.primary_gain())).log2();
    let user = draw.num_secondary() - 1;
    SchemeOutcome::admitted(user, SicOrder::SecondaryFirst, rate, params.rs())
}

/// Guarded admission: consider only the weakest contender, decoded second.
///
/// The weakest contender interferes least with the primary, so the
/// primary-first order is checked against `r0`; on success the contender
/// gets the interference-free rate, otherwise nobody transmits.
pub fn sgf2_outcome(params: &SystemParams, draw: &ChannelDraw) -> SchemeOutcome {
    let g_min = draw.weakest_gain().expect("need at least one contender");
    let p = params.p();
    let primary_rate = (1.0 + p * draw.primary_gain() / (1.0 + p * g_min)).log2();
    if primary_rate >= params.r0() {
        let rate = (1.0 + p * g_min).log2();
        SchemeOutcome::admitted(0, SicOrder::PrimaryFirst, rate, params.rs())
    } else {
        SchemeOutcome::denied(params.rs())
    }
}

/// Gain threshold separating the two decoding orders:
/// `tau = max(0, g0/(2^r0 - 1) - 1/P)`.
///
/// A contender at gain exactly `tau` produces precisely the interference
/// level at which the primary, decoded first, achieves `r0` with equality;
/// weaker contenders leave the primary slack, stronger ones must be decoded
/// first themselves.
pub fn hybrid_threshold(params: &SystemParams, g0: f64) -> f64 {
    let c0 = params.r0().exp2() - 1.0;
    (g0 / c0 - 1.0 / params.p()).max(0.0)
}

/// Splits the contenders of `draw` into strong (`> tau`) and weak (`<= tau`)
/// index sets.
pub fn hybrid_partition(draw: &ChannelDraw, tau: f64) -> HybridPartition {
    assert!(tau >= 0.0, "threshold must be non-negative");
    // Gains are sorted, so the weak set is a prefix.
    let split = draw.secondary_gains().partition_point(|&g| g <= tau);
    HybridPartition {
        tau,
        s1: (split..draw.num_secondary()).collect(),
        s2: (0..split).collect(),
    }
}

/// Per-contender achievable rates under the hybrid rule.
///
/// Strong contenders (gain above the threshold) get the contender-first
/// rate `log2(1 + P*g/(1 + P*g0))`; weak ones get the interference-free
/// rate `log2(1 + P*g)`, which the primary-first order makes available to
/// them. This is the vector the admission rule maximizes over, and it is
/// also what each contender can compute locally from its own CSI for the
/// distributed variant in [`crate::contention`].
pub fn hybrid_rates(params: &SystemParams, draw: &ChannelDraw) -> Vec<f64> {
    let tau = hybrid_threshold(params, draw.primary_gain());
    let p = params.p();
    let denom = 1.0 + p * draw.primary_gain();
    draw.secondary_gains()
        .iter()
        .map(|&g| {
            if g > tau {
                (1.0 + p * g / denom).log2()
            } else {
                (1.0 + p * g).log2()
            }
        })
        .collect()
}

/// Index and value of the largest rate; the lowest index wins ties.
pub fn admit_argmax<I>(rates: I) -> Option<(usize, f64)>
where
    I: IntoIterator<Item = f64>,
{
    let mut best: Option<(usize, f64)> = None;
    for (n, r) in rates.into_iter().enumerate() {
        match best {
            Some((_, b)) if r <= b => {}
            _ => best = Some((n, r)),
        }
    }
    best
}

/// Threshold-adaptive hybrid admission: evaluate every contender under the
/// decoding order its gain supports and admit the rate argmax.
///
/// The winner's order is contender-first when its gain exceeds the
/// threshold, primary-first otherwise. The reported gain is the admitted
/// rate unconditionally (an ergodic-rate convention; outage is tracked
/// separately).
pub fn hybrid_outcome(params: &SystemParams, draw: &ChannelDraw) -> SchemeOutcome {
    assert!(draw.num_secondary() >= 1, "need at least one contender");
    let tau = hybrid_threshold(params, draw.primary_gain());
    let p = params.p();
    let denom = 1.0 + p * draw.primary_gain();
    let best = admit_argmax(draw.secondary_gains().iter().map(|&g| {
        if g > tau {
            (1.0 + p * g / denom).log2()
        } else {
            (1.0 + p * g).log2()
        }
    }));
    match best {
        Some((user, rate)) => {
            let order = if draw.secondary_gains()[user] > tau {
                SicOrder::SecondaryFirst
            } else {
                SicOrder::PrimaryFirst
            };
            SchemeOutcome::admitted(user, order, rate, params.rs())
        }
        None => SchemeOutcome::denied(params.rs()),
    }
}

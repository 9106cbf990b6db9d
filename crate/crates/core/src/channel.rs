//! Rayleigh block-fading channel draws.
//!
//! Every user sees an i.i.d. Rayleigh-faded link to the base station, so the
//! channel *power* gains are unit-mean exponential variates. A draw holds the
//! grant-based (primary) user's gain together with the grant-free contenders'
//! gains sorted ascending; the admission schemes in [`crate::schemes`] are
//! defined in terms of that order.
//!
//! Sampling uses inverse-CDF transformation of `[0, 1)` uniforms. Random
//! streams are derived per trial index from a master seed, which makes every
//! trial reproducible in isolation and lets the Monte-Carlo driver replay any
//! partition of the trial space onto any number of worker threads without
//! changing the numbers it produces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One block-fading realization: the primary user's power gain plus the
/// contenders' power gains in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelDraw {
    primary_gain: f64,
    secondary_gains: Vec<f64>,
}

impl ChannelDraw {
    /// Builds a draw from explicit gains, sorting the contender gains
    /// ascending.
    ///
    /// Panics if any gain is negative or non-finite.
    pub fn new(primary_gain: f64, mut secondary_gains: Vec<f64>) -> Self {
        assert!(
            primary_gain.is_finite() && primary_gain >= 0.0,
            "primary gain must be finite and non-negative, got {primary_gain}"
        );
        for &g in &secondary_gains {
            assert!(
                g.is_finite() && g >= 0.0,
                "secondary gain must be finite and non-negative, got {g}"
            );
        }
        secondary_gains.sort_unstable_by(f64::total_cmp);
        Self {
            primary_gain,
            secondary_gains,
        }
    }

    /// Creates an empty draw to be filled by [`ChannelDraw::resample`].
    pub fn placeholder() -> Self {
        Self {
            primary_gain: 0.0,
            secondary_gains: Vec::new(),
        }
    }

    /// Samples a fresh realization with `m` contenders.
    ///
    /// The primary gain is drawn first, then the `m` contender gains in
    /// index order before sorting; callers that need reproducibility rely on
    /// this consumption order.
    pub fn sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut draw = Self::placeholder();
        draw.resample(m, rng);
        draw
    }

    /// Re-samples this draw in place, reusing the gain buffer.
    ///
    /// Same draw semantics as [`ChannelDraw::sample`]; this exists so the
    /// per-trial hot loop does not allocate.
    pub fn resample<R: Rng + ?Sized>(&mut self, m: usize, rng: &mut R) {
        self.primary_gain = exp_unit(rng);
        self.secondary_gains.clear();
        self.secondary_gains.extend((0..m).map(|_| exp_unit(rng)));
        self.secondary_gains.sort_unstable_by(f64::total_cmp);
    }

    /// The grant-based user's power gain.
    pub fn primary_gain(&self) -> f64 {
        self.primary_gain
    }

    /// Contender power gains, ascending.
    pub fn secondary_gains(&self) -> &[f64] {
        &self.secondary_gains
    }

    /// Number of contenders in this draw.
    pub fn num_secondary(&self) -> usize {
        self.secondary_gains.len()
    }

    /// Weakest contender gain, if any contenders exist.
    pub fn weakest_gain(&self) -> Option<f64> {
        self.secondary_gains.first().copied()
    }

    /// Strongest contender gain, if any contenders exist.
    pub fn strongest_gain(&self) -> Option<f64> {
        self.secondary_gains.last().copied()
    }

    /// Number of contender gains strictly above `threshold`.
    pub fn exceedance_count(&self, threshold: f64) -> usize {
        // Gains are sorted, so the exceedance set is a suffix.
        let below_or_equal = self
            .secondary_gains
            .partition_point(|&g| g <= threshold);
        self.secondary_gains.len() - below_or_equal
    }
}

/// Unit-mean exponential variate by inverse CDF.
///
/// `U = 0` (possible since the uniform is over `[0, 1)`) is remapped to the
/// smallest positive normal so the result stays finite.
fn exp_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -u.max(f64::MIN_POSITIVE).ln()
}

/// Deterministic random stream for one Monte-Carlo trial.
///
/// The 256-bit ChaCha key is expanded from `(master_seed, trial_index)` with
/// a SplitMix64-style finalizer, so for a fixed master seed every trial index
/// maps to its own statistically independent stream. Trials can therefore be
/// evaluated in any order, on any thread, and still consume identical
/// randomness.
pub fn trial_stream(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut state = mix64(master_seed.wrapping_add(0x9E37_79B9_7F4A_7C15))
        ^ mix64(trial_index.wrapping_add(0x6A09_E667_F3BC_C909));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// SplitMix64 finalizer (bijective avalanche mix of a 64-bit word).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

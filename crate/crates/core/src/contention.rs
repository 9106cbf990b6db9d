//! Distributed contention realizing the hybrid admission rule.
//!
//! Instead of the base station comparing every contender's achievable rate
//! centrally, each contender starts a backoff timer inversely proportional
//! to its own rate and transmits a grant request when the timer expires.
//! The best-rate contender fires first, so with an ideal collision-free
//! channel the distributed winner coincides with the centralized rate
//! argmax. A finite sensing window models receivers that cannot separate
//! two near-simultaneous requests; requests closer than the window collide.

use thiserror::Error;

/// Invalid [`ContentionConfig`] field.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum ContentionError {
    #[error("backoff constant must be positive and finite, got {0}")]
    InvalidBackoffConstant(f64),
    #[error("sensing window must be non-negative and finite, got {0}")]
    InvalidSensingWindow(f64),
}

/// Timing parameters of the contention round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContentionConfig {
    backoff_constant: f64,
    sensing_window: f64,
}

impl ContentionConfig {
    /// Validates and builds a configuration.
    pub fn new(backoff_constant: f64, sensing_window: f64) -> Result<Self, ContentionError> {
        if !(backoff_constant.is_finite() && backoff_constant > 0.0) {
            return Err(ContentionError::InvalidBackoffConstant(backoff_constant));
        }
        if !(sensing_window.is_finite() && sensing_window >= 0.0) {
            return Err(ContentionError::InvalidSensingWindow(sensing_window));
        }
        Ok(Self {
            backoff_constant,
            sensing_window,
        })
    }

    /// Proportionality constant `c` in `t = c / rate`, seconds.
    pub fn backoff_constant(&self) -> f64 {
        self.backoff_constant
    }

    /// Minimum separation two requests need to be distinguishable, seconds.
    pub fn sensing_window(&self) -> f64 {
        self.sensing_window
    }
}

/// Result of one contention round.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum ContentionOutcome {
    /// Exactly one contender fired clear of the others.
    Winner(usize),
    /// The two earliest requests were within the sensing window.
    Collision,
    /// Nobody contended.
    Idle,
}

/// Backoff timer per contender: `t_n = c / rate_n`.
///
/// A contender with rate zero gains nothing from admission, so it abstains
/// (infinite backoff) rather than contending at an infinite timer's
/// numerical stand-in.
pub fn backoff_times(rates: &[f64], cfg: &ContentionConfig) -> Vec<f64> {
    rates
        .iter()
        .map(|&r| {
            assert!(
                r.is_finite() && r >= 0.0,
                "rates must be finite and non-negative, got {r}"
            );
            if r > 0.0 {
                cfg.backoff_constant() / r
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// Resolves a contention round from the backoff timers.
///
/// The earliest finite timer wins if the runner-up trails by more than the
/// sensing window; two finite timers within the window collide; no finite
/// timer at all is an idle round. Only the two earliest timers matter for
/// the grant decision, so later ones are never inspected for collisions.
pub fn contention_winner(times: &[f64], cfg: &ContentionConfig) -> ContentionOutcome {
    let mut first: Option<(usize, f64)> = None;
    let mut second: Option<f64> = None;
    for (n, &t) in times.iter().enumerate() {
        assert!(!t.is_nan(), "backoff times must not be NaN");
        if !t.is_finite() {
            continue;
        }
        match first {
            None => first = Some((n, t)),
            Some((_, t1)) if t < t1 => {
                second = Some(t1);
                first = Some((n, t));
            }
            Some(_) => match second {
                None => second = Some(t),
                Some(t2) if t < t2 => second = Some(t),
                Some(_) => {}
            },
        }
    }
    match (first, second) {
        (None, _) => ContentionOutcome::Idle,
        (Some((n, _)), None) => ContentionOutcome::Winner(n),
        (Some((n, t1)), Some(t2)) => {
            if t2 - t1 <= cfg.sensing_window() {
                ContentionOutcome::Collision
            } else {
                ContentionOutcome::Winner(n)
            }
        }
    }
}

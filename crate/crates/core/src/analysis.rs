//! Analytical companions to the Monte-Carlo engine: admission
//! probabilities, high-SNR outage floors and the hybrid scheme's outage
//! upper bound.
//!
//! The floors are the limits the simulated outage curves flatten onto as
//! the transmit SNR grows. Each closed form here was derived by hand, so
//! every one is paired with a numerical-quadrature evaluation of the same
//! expectation; the two must agree before any downstream check is allowed
//! to rely on the closed form.

mod quadrature;

use crate::schemes::SystemParams;
use thiserror::Error;

/// How a [`FloorResult`] value was obtained.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum Method {
    /// Hand-derived closed-form expression.
    ClosedForm,
    /// Adaptive Gauss-Kronrod integration of the defining expectation.
    Quadrature,
}

/// An asymptotic outage floor with its provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloorResult {
    /// Floor probability in [0, 1].
    pub value: f64,
    /// Evaluation route that produced `value`.
    pub method: Method,
}

/// A requested analytical expression does not apply to the parameter set.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("admission closed form requires 0 < r0 < 1 bits/s/Hz, got {0}")]
    PrimaryRateTooHigh(f64),
    #[error("admission closed form assumes the equal-gain case")]
    UnequalGainsUnsupported,
    #[error(
        "outage bound requires (2^rs - 1)(2^r0 - 1) < 1, got {0}; the bound is inapplicable"
    )]
    BoundInapplicable(f64),
}

/// Probability that the cognitive-radio admission constraint holds in the
/// equal-gain case (`g0 = gn = g`, one contender):
/// `exp(-(2^r0 - 1)/(P (2 - 2^r0)))`.
///
/// With the primary's signal and the contender's interference riding the
/// same fade `g`, the admission constraint `log2(1 + P g/(1 + P g)) >= r0`
/// collapses to a single threshold on `g`, hence the requirement `r0 < 1`:
/// at `r0 >= 1` the constraint can never hold and the closed form's
/// denominator changes sign. Only this equal-gain variant has a closed
/// form; passing `g_equal = false` yields an error rather than a silently
/// wrong number.
pub fn cr_admission_prob(params: &SystemParams, g_equal: bool) -> Result<f64, AnalysisError> {
    if !g_equal {
        return Err(AnalysisError::UnequalGainsUnsupported);
    }
    let r0 = params.r0();
    if r0 >= 1.0 {
        return Err(AnalysisError::PrimaryRateTooHigh(r0));
    }
    let c0 = r0.exp2() - 1.0;
    let threshold = c0 / (params.p() * (2.0 - r0.exp2()));
    Ok((-threshold).exp())
}

/// High-SNR outage floor of the greedy (strongest-contender) scheme.
///
/// As `P` grows the admitted rate tends to `log2(1 + gM/g0)` with `gM` the
/// max of `m` unit exponentials, so the floor is
/// `E[P(gM < c g0)] = sum_{k=0..m} C(m,k) (-1)^k / (1 + k c)`, `c = 2^rs - 1`
/// (expand `(1 - e^{-c g0})^m` binomially and integrate over `g0`).
pub fn csi_floor(m: usize, rs: f64) -> FloorResult {
    assert!(m >= 1, "need at least one contender");
    assert!(rs > 0.0, "target rate must be positive");
    let c = rs.exp2() - 1.0;
    let mut value = 0.0;
    let mut binom = 1.0; // C(m, k), updated multiplicatively
    for k in 0..=m {
        let term = binom / (1.0 + k as f64 * c);
        value += if k % 2 == 0 { term } else { -term };
        binom *= (m - k) as f64 / (k + 1) as f64;
    }
    FloorResult {
        value: value.clamp(0.0, 1.0),
        method: Method::ClosedForm,
    }
}

/// [`csi_floor`] evaluated by adaptive quadrature of
/// `int_0^inf e^{-y} (1 - e^{-c y})^m dy` instead of the closed form.
pub fn csi_floor_quadrature(m: usize, rs: f64) -> FloorResult {
    assert!(m >= 1, "need at least one contender");
    assert!(rs > 0.0, "target rate must be positive");
    let c = rs.exp2() - 1.0;
    let value = quadrature::integrate(
        &|y: f64| (-y).exp() * (1.0 - (-c * y).exp()).powi(m as i32),
        0.0,
        40.0,
        1e-9,
    );
    FloorResult {
        value: value.clamp(0.0, 1.0),
        method: Method::Quadrature,
    }
}

/// High-SNR outage floor of the guarded (weakest-contender) scheme.
///
/// At high SNR the admission check `log2(1 + P g0/(1 + P g1)) >= r0`
/// becomes `g0 >= c0 g1` with `g1` the min of `m` unit exponentials
/// (an `Exp(m)` variate), giving the floor `c0/(m + c0)`, `c0 = 2^r0 - 1`.
pub fn qos_floor(m: usize, r0: f64) -> FloorResult {
    assert!(m >= 1, "need at least one contender");
    assert!(r0 > 0.0, "target rate must be positive");
    let c0 = r0.exp2() - 1.0;
    FloorResult {
        value: (c0 / (m as f64 + c0)).clamp(0.0, 1.0),
        method: Method::ClosedForm,
    }
}

/// [`qos_floor`] evaluated by adaptive quadrature of
/// `int_0^inf m e^{-m x} (1 - e^{-c0 x}) dx` instead of the closed form.
pub fn qos_floor_quadrature(m: usize, r0: f64) -> FloorResult {
    assert!(m >= 1, "need at least one contender");
    assert!(r0 > 0.0, "target rate must be positive");
    let c0 = r0.exp2() - 1.0;
    let mf = m as f64;
    let value = quadrature::integrate(
        &|x: f64| mf * (-mf * x).exp() * (1.0 - (-c0 * x).exp()),
        0.0,
        40.0,
        1e-9,
    );
    FloorResult {
        value: value.clamp(0.0, 1.0),
        method: Method::Quadrature,
    }
}

/// High-SNR upper bound on the hybrid scheme's outage probability:
/// `1 - exp(-x)` with `x = 2^rs / (P (1/(2^r0 - 1) - (2^rs - 1)))`.
///
/// Valid only while `(2^rs - 1)(2^r0 - 1) < 1`; outside that region the
/// bounding argument's denominator is non-positive and the expression is
/// meaningless, so it is rejected. The bound vanishes as `P -> inf`, which
/// is the analytical statement that the hybrid scheme has no outage floor.
pub fn hybrid_outage_bound(params: &SystemParams) -> Result<f64, AnalysisError> {
    let c0 = params.r0().exp2() - 1.0;
    let cs = params.rs().exp2() - 1.0;
    let product = c0 * cs;
    if product >= 1.0 {
        return Err(AnalysisError::BoundInapplicable(product));
    }
    let x = params.rs().exp2() / (params.p() * (1.0 / c0 - cs));
    Ok(1.0 - (-x).exp())
}

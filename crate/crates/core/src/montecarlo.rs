//! Deterministic parallel Monte-Carlo estimation of outage probability and
//! mean sum-rate gain.
//!
//! Trials are partitioned into fixed-size chunks that rayon may execute in
//! any order on any number of threads. Each trial derives its own random
//! stream from `(cell seed, trial index)`, chunk partials are collected in
//! chunk order, and the final reduction is sequential with compensated
//! summation — so the result is a pure function of `(scheme, params,
//! trials, seed)` no matter how the work was scheduled.

use crate::channel::{trial_stream, ChannelDraw};
use crate::schemes::{
    cr_noma_schedule, hybrid_outcome, sgf1_outcome, sgf2_outcome, ParamError, SchemeOutcome,
    SystemParams,
};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Trials per work chunk. Fixed (never derived from the worker count) so
/// the chunk decomposition, and with it every partial sum, is identical on
/// every machine and thread configuration.
const TRIALS_PER_CHUNK: u64 = 1 << 14;

/// Identifier of a simulated admission scheme.
#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq)]
pub enum SchemeId {
    /// Cognitive-radio scheduling: strongest contender that keeps the
    /// primary's QoS intact under the primary-first order.
    CrNoma,
    /// Greedy: strongest contender, contender-first order.
    Sgf1,
    /// Guarded: weakest contender, primary-first order.
    Sgf2,
    /// Threshold-adaptive order selection with max-rate admission.
    Hybrid,
}

impl SchemeId {
    /// Every scheme, in canonical order.
    pub const ALL: [SchemeId; 4] = [
        SchemeId::CrNoma,
        SchemeId::Sgf1,
        SchemeId::Sgf2,
        SchemeId::Hybrid,
    ];

    /// Stable lowercase name used on the CLI and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            SchemeId::CrNoma => "crnoma",
            SchemeId::Sgf1 => "sgf1",
            SchemeId::Sgf2 => "sgf2",
            SchemeId::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scheme name that is none of `crnoma`, `sgf1`, `sgf2`, `hybrid`.
#[derive(Clone, Debug, Error, Eq, PartialEq)]
#[error("unknown scheme `{0}`; expected crnoma, sgf1, sgf2 or hybrid")]
pub struct ParseSchemeError(String);

impl FromStr for SchemeId {
    type Err = ParseSchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "crnoma" => Ok(SchemeId::CrNoma),
            "sgf1" => Ok(SchemeId::Sgf1),
            "sgf2" => Ok(SchemeId::Sgf2),
            "hybrid" => Ok(SchemeId::Hybrid),
            other => Err(ParseSchemeError(other.to_string())),
        }
    }
}

/// Runs one scheme on one draw.
pub fn evaluate(scheme: SchemeId, params: &SystemParams, draw: &ChannelDraw) -> SchemeOutcome {
    match scheme {
        SchemeId::CrNoma => cr_noma_schedule(params, draw),
        SchemeId::Sgf1 => sgf1_outcome(params, draw),
        SchemeId::Sgf2 => sgf2_outcome(params, draw),
        SchemeId::Hybrid => hybrid_outcome(params, draw),
    }
}

/// Empirical outage estimate with a 95% Wilson confidence interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageEstimate {
    /// Number of simulated trials.
    pub trials: u64,
    /// Trials that ended in outage.
    pub failures: u64,
    /// Point estimate `failures/trials`.
    pub p_hat: f64,
    /// Lower 95% Wilson bound.
    pub ci_low: f64,
    /// Upper 95% Wilson bound.
    pub ci_high: f64,
    /// Mean per-trial sum-rate gain, bits/s/Hz.
    pub mean_gain: f64,
}

impl OutageEstimate {
    fn from_counts(trials: u64, failures: u64, mean_gain: f64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials, 0.95);
        Self {
            trials,
            failures,
            p_hat: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            mean_gain,
        }
    }
}

/// Wilson score interval for a binomial proportion.
///
/// Chosen over the normal approximation because the outage probabilities
/// probed here sit near zero, where the score interval keeps honest
/// coverage. Zero and full failure counts pin the matching endpoint to
/// exactly 0 or 1.
pub fn wilson_interval(failures: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials >= 1, "need at least one trial");
    assert!(failures <= trials, "failures cannot exceed trials");
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence must be in (0, 1)"
    );
    let n = trials as f64;
    let p = failures as f64 / n;
    let z = probit(0.5 + confidence / 2.0);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if failures == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let high = if failures == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (low, high)
}

/// Inverse standard-normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9 — ample for confidence-interval z-scores).
#[allow(clippy::excessive_precision)] // coefficients as published
fn probit(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probit argument must be in (0, 1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}

/// Per-scheme accumulator: exact failure count plus Kahan-compensated gain
/// sum.
#[derive(Clone, Copy, Debug, Default)]
struct Accum {
    failures: u64,
    gain_sum: f64,
    gain_comp: f64,
}

impl Accum {
    #[inline]
    fn add_gain(&mut self, gain: f64) {
        let y = gain - self.gain_comp;
        let t = self.gain_sum + y;
        self.gain_comp = (t - self.gain_sum) - y;
        self.gain_sum = t;
    }

    fn fold(&mut self, other: &Accum) {
        self.failures += other.failures;
        self.add_gain(other.gain_sum);
        self.add_gain(other.gain_comp);
    }
}

/// Estimates outage and mean gain for several schemes over one shared draw
/// sequence.
///
/// Every scheme sees the identical `trials` channel realizations (the
/// random stream is consumed by the draw alone), which makes per-draw
/// dominance relations between schemes exact in the outputs and removes
/// draw noise from scheme comparisons.
pub fn estimate_many(
    schemes: &[SchemeId],
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Vec<OutageEstimate> {
    assert!(!schemes.is_empty(), "need at least one scheme");
    assert!(trials >= 1, "need at least one trial");
    let n_chunks = trials.div_ceil(TRIALS_PER_CHUNK);

    // Chunk partials in chunk order; rayon may compute them in any order.
    let partials: Vec<Vec<Accum>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * TRIALS_PER_CHUNK;
            let end = (start + TRIALS_PER_CHUNK).min(trials);
            let mut accums = vec![Accum::default(); schemes.len()];
            let mut draw = ChannelDraw::placeholder();
            for trial in start..end {
                let mut rng = trial_stream(seed, trial);
                draw.resample(params.m(), &mut rng);
                for (acc, &scheme) in accums.iter_mut().zip(schemes) {
                    let out = evaluate(scheme, params, &draw);
                    if out.outage {
                        acc.failures += 1;
                    }
                    acc.add_gain(out.gain);
                }
            }
            accums
        })
        .collect();

    // Sequential fold in chunk order keeps the floating-point reduction
    // deterministic.
    let mut totals = vec![Accum::default(); schemes.len()];
    for chunk in &partials {
        for (total, part) in totals.iter_mut().zip(chunk) {
            total.fold(part);
        }
    }
    totals
        .into_iter()
        .map(|acc| OutageEstimate::from_counts(trials, acc.failures, acc.gain_sum / trials as f64))
        .collect()
}

/// Estimates outage and mean gain for a single scheme.
///
/// Identical to the corresponding component of [`estimate_many`] under the
/// same seed: the draws do not depend on which schemes observe them.
pub fn estimate(
    scheme: SchemeId,
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> OutageEstimate {
    estimate_many(&[scheme], params, trials, seed)
        .pop()
        .expect("one scheme in, one estimate out")
}

/// A full sweep configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Transmit SNR grid in dB (`P = 10^(dB/10)` internally).
    pub snr_db_grid: Vec<f64>,
    /// Contender pool sizes to sweep.
    pub m_list: Vec<usize>,
    /// Schemes to evaluate per cell.
    pub schemes: Vec<SchemeId>,
    /// Primary target rate, bits/s/Hz.
    pub r0: f64,
    /// Contender target rate, bits/s/Hz.
    pub rs: f64,
    /// Trials per sweep cell.
    pub trials: u64,
    /// Master seed; all cell seeds derive from it.
    pub seed: u64,
    /// When set (the default), all schemes in a cell share one draw
    /// sequence; when clear, every (cell, scheme) pair gets its own.
    pub shared_draws: bool,
}

/// Invalid [`SweepSpec`].
#[derive(Clone, Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("SNR grid, contender-count list and scheme list must be non-empty")]
    EmptyGrid,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Params(#[from] ParamError),
}

impl SweepSpec {
    /// Checks the spec invariants, including that every (SNR, M) cell forms
    /// a valid parameter set.
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.snr_db_grid.is_empty() || self.m_list.is_empty() || self.schemes.is_empty() {
            return Err(SweepError::EmptyGrid);
        }
        if self.trials < 1 {
            return Err(SweepError::NoTrials);
        }
        for &snr in &self.snr_db_grid {
            for &m in &self.m_list {
                SystemParams::from_snr_db(snr, m, self.r0, self.rs)?;
            }
        }
        Ok(())
    }
}

/// One sweep cell's result for one scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// Transmit SNR of this cell, dB.
    pub snr_db: f64,
    /// Contender pool size of this cell.
    pub m: usize,
    /// Scheme this row belongs to.
    pub scheme: SchemeId,
    /// Estimated outage and mean gain.
    pub estimate: OutageEstimate,
}

/// Deterministic seed for one sweep cell.
///
/// Derived from the master seed and the cell's grid indices. The scheme
/// slot participates only in per-scheme-draw mode; in shared-draw mode all
/// schemes of a cell must receive the same stream, so it is left out.
fn cell_seed(master: u64, snr_idx: usize, m_idx: usize, scheme_slot: Option<usize>) -> u64 {
    let mut s = mix64(master.wrapping_add(0x9E37_79B9_7F4A_7C15));
    s ^= mix64((snr_idx as u64).wrapping_add(0xA076_1D64_78BD_642F));
    s = mix64(s);
    s ^= mix64((m_idx as u64).wrapping_add(0xE703_7ED1_A0B4_28DB));
    s = mix64(s);
    if let Some(slot) = scheme_slot {
        s ^= mix64((slot as u64).wrapping_add(0x8EBC_6AF0_9C88_C6E3));
        s = mix64(s);
    }
    s
}

/// SplitMix64 finalizer, shared with the channel module's stream
/// derivation.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the full sweep, emitting rows in grid order: SNR-major, then
/// contender count, then scheme (the spec's list orders).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let mut rows =
        Vec::with_capacity(spec.snr_db_grid.len() * spec.m_list.len() * spec.schemes.len());
    for (snr_idx, &snr_db) in spec.snr_db_grid.iter().enumerate() {
        for (m_idx, &m) in spec.m_list.iter().enumerate() {
            let params = SystemParams::from_snr_db(snr_db, m, spec.r0, spec.rs)
                .expect("validated above");
            if spec.shared_draws {
                let seed = cell_seed(spec.seed, snr_idx, m_idx, None);
                let estimates = estimate_many(&spec.schemes, &params, spec.trials, seed);
                for (&scheme, estimate) in spec.schemes.iter().zip(estimates) {
                    rows.push(SweepRow {
                        snr_db,
                        m,
                        scheme,
                        estimate,
                    });
                }
            } else {
                for (slot, &scheme) in spec.schemes.iter().enumerate() {
                    let seed = cell_seed(spec.seed, snr_idx, m_idx, Some(slot));
                    let estimate = estimate(scheme, &params, spec.trials, seed);
                    rows.push(SweepRow {
                        snr_db,
                        m,
                        scheme,
                        estimate,
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::qos_floor;

    fn params(p: f64, m: usize) -> SystemParams {
        SystemParams::new(p, m, 0.2, 1.0).unwrap()
    }

    #[test]
    fn scheme_ids_round_trip_through_names() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
            assert_eq!(format!("{id}"), id.name());
        }
        assert!("sgf3".parse::<SchemeId>().is_err());
        assert!("SGF1".parse::<SchemeId>().is_err(), "names are lowercase");
    }

    #[test]
    fn probit_known_values() {
        assert_eq!(probit(0.5), 0.0);
        assert!((probit(0.975) - 1.959963984540054).abs() < 2e-9);
        assert!((probit(0.975) + probit(0.025)).abs() < 1e-9);
        assert!((probit(0.995) - 2.5758293035489004).abs() < 2e-8);
    }

    #[test]
    fn wilson_known_interval() {
        let (lo, hi) = wilson_interval(50, 100, 0.95);
        assert!((lo - 0.4038315303659956).abs() < 1e-8);
        assert!((hi - 0.5961684696340044).abs() < 1e-8);
    }

    #[test]
    fn wilson_endpoints_are_exact() {
        let (lo, hi) = wilson_interval(0, 1000, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(1000, 1000, 0.95);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0 && lo > 0.99);
    }

    #[test]
    fn wilson_brackets_the_point_estimate() {
        for (f, n) in [(0u64, 1u64), (1, 1), (1, 10), (5, 10), (999, 1000), (17, 123)] {
            let (lo, hi) = wilson_interval(f, n, 0.95);
            let p = f as f64 / n as f64;
            assert!((0.0..=1.0).contains(&lo));
            assert!((0.0..=1.0).contains(&hi));
            assert!(lo <= p && p <= hi, "({f},{n}): {lo} <= {p} <= {hi}");
        }
    }

    #[test]
    fn single_trial_estimate_is_well_formed() {
        let est = estimate(SchemeId::Hybrid, &params(10.0, 2), 1, 7);
        assert!(est.p_hat == 0.0 || est.p_hat == 1.0);
        assert!(est.ci_low <= est.p_hat && est.p_hat <= est.ci_high);
        assert_eq!(est.trials, 1);
    }

    #[test]
    fn estimates_are_deterministic() {
        let pr = params(100.0, 2);
        let a = estimate(SchemeId::Hybrid, &pr, 50_000, 3);
        let b = estimate(SchemeId::Hybrid, &pr, 50_000, 3);
        assert_eq!(a, b);
        let c = estimate(SchemeId::Hybrid, &pr, 50_000, 4);
        assert_ne!(a, c, "different seeds should move the estimate");
    }

    #[test]
    fn estimates_are_worker_count_independent() {
        let pr = params(100.0, 4);
        // 50k trials spans several chunks plus a ragged tail.
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_many(&[SchemeId::Sgf1, SchemeId::Hybrid], &pr, 50_000, 11));
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| estimate_many(&[SchemeId::Sgf1, SchemeId::Hybrid], &pr, 50_000, 11));
        assert_eq!(single, quad);
    }

    #[test]
    fn single_scheme_estimate_matches_joint_run() {
        let pr = params(100.0, 2);
        let joint = estimate_many(
            &[SchemeId::Sgf1, SchemeId::Sgf2, SchemeId::Hybrid],
            &pr,
            20_000,
            5,
        );
        assert_eq!(estimate(SchemeId::Sgf1, &pr, 20_000, 5), joint[0]);
        assert_eq!(estimate(SchemeId::Sgf2, &pr, 20_000, 5), joint[1]);
        assert_eq!(estimate(SchemeId::Hybrid, &pr, 20_000, 5), joint[2]);
    }

    #[test]
    fn guarded_outage_approaches_its_floor() {
        // 50 dB, M = 4: the guarded scheme should sit on its asymptotic
        // floor well within 5 standard errors at 1e5 trials.
        let pr = SystemParams::from_snr_db(50.0, 4, 0.2, 1.0).unwrap();
        let est = estimate(SchemeId::Sgf2, &pr, 100_000, 21);
        let floor = qos_floor(4, 0.2).value;
        let se = (floor * (1.0 - floor) / 1e5).sqrt();
        assert!(
            (est.p_hat - floor).abs() < 5.0 * se,
            "estimate {} vs floor {floor} (se {se})",
            est.p_hat
        );
    }

    #[test]
    fn wilson_coverage_on_synthetic_bernoulli() {
        // 1000 estimates of a Bernoulli(0.1) proportion at n = 1e4; the
        // 95% interval must cover the truth at least 93% of the time.
        let n = 10_000u64;
        let mut covered = 0u32;
        for rep in 0..1000u64 {
            let mut failures = 0u64;
            let mut rng = trial_stream(0xC0FFEE ^ rep, 0);
            for _ in 0..n {
                let u: f64 = rand::Rng::random(&mut rng);
                if u < 0.1 {
                    failures += 1;
                }
            }
            let (lo, hi) = wilson_interval(failures, n, 0.95);
            if lo <= 0.1 && 0.1 <= hi {
                covered += 1;
            }
        }
        assert!(covered >= 930, "coverage {covered}/1000 below 93%");
    }

    fn small_spec() -> SweepSpec {
        SweepSpec {
            snr_db_grid: vec![20.0, 30.0],
            m_list: vec![2, 4],
            schemes: vec![SchemeId::Sgf1, SchemeId::Sgf2, SchemeId::Hybrid],
            r0: 0.2,
            rs: 1.0,
            trials: 10_000,
            seed: 99,
            shared_draws: true,
        }
    }

    #[test]
    fn sweep_validation_rejects_bad_specs() {
        let mut spec = small_spec();
        spec.trials = 0;
        assert_eq!(spec.validate(), Err(SweepError::NoTrials));
        let mut spec = small_spec();
        spec.m_list.clear();
        assert_eq!(spec.validate(), Err(SweepError::EmptyGrid));
        let mut spec = small_spec();
        spec.m_list = vec![0];
        assert!(matches!(spec.validate(), Err(SweepError::Params(_))));
        let mut spec = small_spec();
        spec.r0 = -1.0;
        assert!(matches!(spec.validate(), Err(SweepError::Params(_))));
    }

    #[test]
    fn sweep_rows_come_in_grid_order() {
        let spec = small_spec();
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 12);
        let mut expect = Vec::new();
        for &snr in &spec.snr_db_grid {
            for &m in &spec.m_list {
                for &scheme in &spec.schemes {
                    expect.push((snr, m, scheme));
                }
            }
        }
        let got: Vec<_> = rows.iter().map(|r| (r.snr_db, r.m, r.scheme)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn sweep_is_reproducible() {
        let spec = small_spec();
        assert_eq!(run_sweep(&spec).unwrap(), run_sweep(&spec).unwrap());
    }

    #[test]
    fn trivial_sweep_matches_direct_estimate() {
        let spec = SweepSpec {
            snr_db_grid: vec![20.0],
            m_list: vec![2],
            schemes: vec![SchemeId::Hybrid],
            r0: 0.2,
            rs: 1.0,
            trials: 5_000,
            seed: 7,
            shared_draws: true,
        };
        let rows = run_sweep(&spec).unwrap();
        let pr = SystemParams::from_snr_db(20.0, 2, 0.2, 1.0).unwrap();
        let direct = estimate(SchemeId::Hybrid, &pr, 5_000, cell_seed(7, 0, 0, None));
        assert_eq!(rows[0].estimate, direct);
    }

    #[test]
    fn shared_draws_make_dominance_exact() {
        let rows = run_sweep(&small_spec()).unwrap();
        for cell in rows.chunks(3) {
            let (sgf1, sgf2, hybrid) = (&cell[0], &cell[1], &cell[2]);
            assert!(hybrid.estimate.failures <= sgf1.estimate.failures);
            assert!(hybrid.estimate.failures <= sgf2.estimate.failures);
        }
    }

    #[test]
    fn per_scheme_draws_mode_runs() {
        let mut spec = small_spec();
        spec.shared_draws = false;
        spec.trials = 2_000;
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 12);
        for row in rows {
            assert!(row.estimate.ci_low <= row.estimate.p_hat);
            assert!(row.estimate.p_hat <= row.estimate.ci_high);
        }
    }
}

//! Seeded Monte Carlo over the relaying protocol.
//!
//! Every trial reads a fixed-size window of one ChaCha8 keystream: trial `i`
//! of seed `s` always consumes words `[8i, 8i + 8)` of the stream keyed by
//! `s`. Workers seek to the start of their chunk, so the estimate depends only
//! on `(seed, trials)` and never on how trials are split across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytic::relay_snr;
use crate::error::{Error, Result};
use crate::model::Scenario;

/// u32 words of keystream consumed per trial (four u64 draws).
const WORDS_PER_TRIAL: u128 = 8;
const CHUNK_TRIALS: u64 = 1 << 16;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// One block's channel power gains and relay energy state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g_sd: f64,
    pub g_sr: f64,
    pub g_rd: f64,
    /// The relay has at least `P_r T_0` stored at the start of the block.
    pub energy_ok: bool,
}

/// Uniform on (0, 1], never 0 so `-ln` stays finite.
fn open_unit(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on [0, 1).
fn half_open_unit(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws the three unit-mean exponential gains by inversion. `energy_ok` is
/// left `true`; use [`sample_energy`] for the relay state.
pub fn sample_channel<R: RngCore + ?Sized>(rng: &mut R) -> ChannelDraw {
    let mut gain = || -open_unit(rng.next_u64()).ln();
    ChannelDraw {
        g_sd: gain(),
        g_sr: gain(),
        g_rd: gain(),
        energy_ok: true,
    }
}

/// Bernoulli(1 - p_ex). Monotone in `p_ex` for a fixed draw, which is what
/// makes common-random-number comparisons across `p_ex` well ordered.
pub fn sample_energy<R: RngCore + ?Sized>(rng: &mut R, p_ex: f64) -> bool {
    half_open_unit(rng.next_u64()) >= p_ex
}

/// Protocol outcome for one block, `true` meaning outage.
///
/// The direct link is used whenever it supports the target rate. Otherwise the
/// relay retransmits if it has energy, and the block succeeds iff the two-hop
/// SNR reaches the relay threshold. Rates exactly at the threshold succeed.
pub fn trial_outcome(draw: &ChannelDraw, s: &Scenario) -> bool {
    if draw.g_sd * s.snr_s() >= s.direct_threshold() {
        return false;
    }
    if !draw.energy_ok {
        return true;
    }
    relay_snr(draw.g_sr, draw.g_rd, s) < s.relay_threshold()
}

/// Keystream for `seed`, positioned at the first word of trial `index`.
pub fn trial_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(index as u128 * WORDS_PER_TRIAL);
    rng
}

fn next_trial<R: RngCore>(rng: &mut R, p_ex: f64) -> ChannelDraw {
    let mut draw = sample_channel(rng);
    draw.energy_ok = sample_energy(rng, p_ex);
    draw
}

/// The draw used by trial `index` of `seed`. Identical across scenarios, so
/// two scenarios evaluated at the same `(seed, index)` share common random
/// numbers.
pub fn trial_draw(seed: u64, index: u64, p_ex: f64) -> ChannelDraw {
    next_trial(&mut trial_stream(seed, index), p_ex)
}

/// Monte Carlo point estimate with a normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub outages: u64,
    pub trials: u64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub confidence: f64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: u64, seed: u64, confidence: f64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Argument("trials must be at least 1".into()));
        }
        if outages > trials {
            return Err(Error::Argument(format!(
                "{outages} outages out of {trials} trials"
            )));
        }
        let z = z_score(confidence)?;
        let p_hat = outages as f64 / trials as f64;
        let std_err = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        Ok(Self {
            p_hat,
            outages,
            trials,
            std_err,
            ci_lo: (p_hat - z * std_err).max(0.0),
            ci_hi: (p_hat + z * std_err).min(1.0),
            confidence,
            seed,
        })
    }

    /// Two-sided check `|p_hat - p| <= k * sqrt(p (1 - p) / trials)`, with the
    /// standard error taken at the hypothesised `p`. The empirical error is 0
    /// whenever no outage was observed, which would reject any `p > 0`.
    pub fn agrees_with(&self, p: f64, k: f64) -> bool {
        (self.p_hat - p).abs() <= k * std_err_at(p, self.trials)
    }
}

/// Standard error of a Bernoulli fraction with success probability `p`.
pub fn std_err_at(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Trials needed so the estimator's standard error is `relative_se * p`.
///
/// Rare events are expensive: at `p = 1e-6` a 1% relative error takes 1e10
/// trials.
pub fn trials_for_relative_error(p: f64, relative_se: f64) -> Result<u64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            function: "trials_for_relative_error",
            value: p,
        });
    }
    if !(relative_se > 0.0 && relative_se.is_finite()) {
        return Err(Error::NonPositive {
            field: "relative_se",
            value: relative_se,
        });
    }
    Ok(((1.0 - p) / (p * relative_se * relative_se)).ceil() as u64)
}

fn z_score(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::OutOfRange {
            field: "confidence",
            value: confidence,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + 0.5 * confidence))
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    pub confidence: f64,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: 0,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn estimate(&self, s: &Scenario) -> Result<OutageEstimate> {
        if self.trials == 0 {
            return Err(Error::Argument("trials must be at least 1".into()));
        }
        z_score(self.confidence)?;
        let outages = if self.workers == 0 {
            self.count_outages(s)
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .map_err(|e| Error::Argument(format!("cannot start worker pool: {e}")))?
                .install(|| self.count_outages(s))
        };
        OutageEstimate::from_counts(outages, self.trials, self.seed, self.confidence)
    }

    fn count_outages(&self, s: &Scenario) -> u64 {
        let chunks = self.trials.div_ceil(CHUNK_TRIALS);
        (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let start = chunk * CHUNK_TRIALS;
                let end = (start + CHUNK_TRIALS).min(self.trials);
                let mut rng = trial_stream(self.seed, start);
                (start..end)
                    .filter(|_| trial_outcome(&next_trial(&mut rng, s.p_ex()), s))
                    .count() as u64
            })
            .sum()
    }
}

/// Estimates the outage probability with `workers` threads at 95% confidence.
pub fn estimate_outage(
    s: &Scenario,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<OutageEstimate> {
    if workers == 0 {
        return Err(Error::Argument("workers must be at least 1".into()));
    }
    MonteCarlo::new(trials, seed).workers(workers).estimate(s)
}

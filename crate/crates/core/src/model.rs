//! System parameters, the on-off energy model, and the derived per-link SNRs
//! and rate thresholds shared by the analytic and simulation code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bandwidth used throughout the reference experiments, in Hz.
pub const DEFAULT_BANDWIDTH_HZ: f64 = 2.0e6;
/// Minimum acceptable rate used throughout the reference experiments, in bit/s.
pub const DEFAULT_RATE_MIN_BPS: f64 = 2.0e5;

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Raw, user-supplied link budget. Powers and noise are linear watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    /// Source transmit power.
    pub p_s: f64,
    /// Relay transmit power (when the relay has energy).
    pub p_r: f64,
    /// Receiver noise variance.
    pub noise: f64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    /// Minimum acceptable rate in bit/s.
    pub rate_min: f64,
}

impl SystemParams {
    /// Equal source and relay power set from a per-receiver SNR in dB, with
    /// unit noise power.
    pub fn from_snr_db(snr_db: f64, bandwidth: f64, rate_min: f64) -> Self {
        let p = db_to_linear(snr_db);
        Self {
            p_s: p,
            p_r: p,
            noise: 1.0,
            bandwidth,
            rate_min,
        }
    }
}

impl Default for SystemParams {
    /// 20 dB at both receivers, 2 MHz, 200 kbit/s.
    fn default() -> Self {
        Self::from_snr_db(20.0, DEFAULT_BANDWIDTH_HZ, DEFAULT_RATE_MIN_BPS)
    }
}

/// On-off model of the harvested energy at the relay.
///
/// In each block the relay either has at least `P_r * T_0` joules stored and
/// transmits at `P_r`, or is silent with probability `p_ex`. `p_av` and
/// `t_block` describe the underlying harvesting process but are not used by
/// any computation: `p_ex` already summarizes them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyModel {
    /// Energy-exhausted probability.
    pub p_ex: f64,
    /// Average harvested power in watts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_av: Option<f64>,
    /// Signal block length in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_block: Option<f64>,
}

impl EnergyModel {
    pub fn new(p_ex: f64) -> Self {
        Self {
            p_ex,
            p_av: None,
            t_block: None,
        }
    }

    /// A relay on a constant power supply never runs out of energy.
    pub fn constant_supply() -> Self {
        Self::new(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_ex) {
            return Err(Error::OutOfRange {
                field: "p_ex",
                value: self.p_ex,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if let Some(v) = self.p_av {
            positive("p_av", v)?;
        }
        if let Some(v) = self.t_block {
            positive("t_block", v)?;
        }
        Ok(())
    }
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self::new(0.1)
    }
}

fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { field, value })
    }
}

/// A validated parameter bundle with the derived SNRs and rate thresholds.
///
/// `direct_threshold` is the SNR the direct link needs to carry `rate_min`
/// over the full bandwidth; `relay_threshold` is the end-to-end SNR the
/// two-hop link needs, which is larger because each hop only gets half the
/// channel resource. The two satisfy `g2 = g1 * (g1 + 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    params: SystemParams,
    energy: EnergyModel,
    snr_s: f64,
    snr_r: f64,
    g1: f64,
    g2: f64,
}

/// Validates raw inputs and derives the quantities every other module needs.
pub fn validate(params: SystemParams, energy: EnergyModel) -> Result<Scenario> {
    Scenario::new(params, energy)
}

impl Scenario {
    pub fn new(params: SystemParams, energy: EnergyModel) -> Result<Self> {
        positive("p_s", params.p_s)?;
        positive("p_r", params.p_r)?;
        positive("noise", params.noise)?;
        positive("bandwidth", params.bandwidth)?;
        positive("rate_min", params.rate_min)?;
        energy.validate()?;

        let snr_s = params.p_s / params.noise;
        let snr_r = params.p_r / params.noise;
        // 2^(R/W) - 1 without cancellation when R/W is small.
        let spectral = params.rate_min / params.bandwidth * std::f64::consts::LN_2;
        let g1 = spectral.exp_m1();
        let g2 = (2.0 * spectral).exp_m1();
        // snr overflow, or thresholds so large they are not representable
        positive("p_s/noise", snr_s)?;
        positive("p_r/noise", snr_r)?;
        positive("rate_min/bandwidth", g1)?;

        Ok(Self {
            params,
            energy,
            snr_s,
            snr_r,
            g1,
            g2,
        })
    }

    /// Paper-style operating point: `P_s = P_r`, unit noise, reference
    /// bandwidth and rate.
    pub fn at_snr_db(snr_db: f64, p_ex: f64) -> Result<Self> {
        Self::new(
            SystemParams::from_snr_db(snr_db, DEFAULT_BANDWIDTH_HZ, DEFAULT_RATE_MIN_BPS),
            EnergyModel::new(p_ex),
        )
    }

    /// Same link, different energy-exhausted probability.
    pub fn with_p_ex(&self, p_ex: f64) -> Result<Self> {
        let energy = EnergyModel {
            p_ex,
            ..self.energy
        };
        energy.validate()?;
        Ok(Self { energy, ..*self })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn energy(&self) -> &EnergyModel {
        &self.energy
    }

    pub fn p_ex(&self) -> f64 {
        self.energy.p_ex
    }

    /// Transmit SNR of the source, `P_s / noise`.
    pub fn snr_s(&self) -> f64 {
        self.snr_s
    }

    /// Transmit SNR of the relay, `P_r / noise`.
    pub fn snr_r(&self) -> f64 {
        self.snr_r
    }

    /// `2^(R0/W) - 1`.
    pub fn direct_threshold(&self) -> f64 {
        self.g1
    }

    /// `2^(2 R0/W) - 1`.
    pub fn relay_threshold(&self) -> f64 {
        self.g2
    }
}

//! Run configuration: a JSON document with `system`, `energy` and `sweep`
//! sections, merged over built-in defaults and then overridden by flags.

use std::path::Path;

use ehrelay::{EnergyModel, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    SnrSweep,
    PexSweep,
    SinglePoint,
    Diversity,
}

/// Which outage curve the diversity fit runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    /// Exact analytic outage.
    Analytic,
    /// High-SNR closed form.
    ClosedForm,
    /// Monte Carlo estimates.
    Mc,
}

impl CurveSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::ClosedForm => "closed_form",
            Self::Mc => "mc",
        }
    }
}

/// Inclusive `start:stop:step` grid in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct SnrRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl From<[f64; 3]> for SnrRange {
    fn from([start, stop, step]: [f64; 3]) -> Self {
        Self { start, stop, step }
    }
}

impl From<SnrRange> for [f64; 3] {
    fn from(r: SnrRange) -> Self {
        [r.start, r.stop, r.step]
    }
}

impl SnrRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Validation(
                "SNR range bounds must be finite".into(),
            ));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(CliError::Validation(format!(
                "SNR step must be > 0, got {}",
                self.step
            )));
        }
        if self.stop < self.start {
            return Err(CliError::Validation(format!(
                "empty SNR range {}:{}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }

    /// Parses `a:b:step`, or a single value `a` meaning just that point.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CliError::Validation(format!("bad SNR range `{text}`: {e}")))?;
        let range = match parts[..] {
            [a] => Self::new(a, a, 1.0),
            [a, b, step] => Self::new(a, b, step),
            _ => {
                return Err(CliError::Validation(format!(
                    "SNR range `{text}` must be `start:stop:step` or a single value"
                )))
            }
        };
        range.validate()?;
        Ok(range)
    }
}

pub fn parse_pex_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Validation(format!("bad p_ex value `{p}`: {e}")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outputs {
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default)]
    pub svg: bool,
}

fn yes() -> bool {
    true
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            csv: true,
            svg: false,
        }
    }
}

/// The `sweep` section as it appears in a config file; everything optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: Option<Mode>,
    pub snr_db_range: Option<SnrRange>,
    pub pex_values: Option<Vec<f64>>,
    pub fixed_snr_db: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub confidence: Option<f64>,
    pub workers: Option<usize>,
    pub outputs: Option<Outputs>,
    pub source: Option<CurveSource>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: SystemParams,
    #[serde(default)]
    pub energy: EnergyModel,
    #[serde(default)]
    pub sweep: SweepConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub snr_db: Option<SnrRange>,
    pub pex: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub confidence: Option<f64>,
    pub svg: bool,
    pub source: Option<CurveSource>,
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
pub const FIG3_SNR_DB: f64 = 20.0;

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    pub system: SystemParams,
    pub energy: EnergyModel,
    pub snr_db_range: SnrRange,
    pub pex_values: Vec<f64>,
    pub fixed_snr_db: f64,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
    /// 0 means one worker per available core.
    pub workers: usize,
    pub outputs: Outputs,
    pub source: CurveSource,
}

/// `p_ex` grid used by the energy sweep: 0 (constant supply) followed by five
/// points per decade from 1e-4 to 1.
pub fn default_pex_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..=20).map(|k| 10f64.powf(-4.0 + 0.2 * k as f64).min(1.0)))
        .collect()
}

impl SweepSpec {
    /// Built-in defaults for each mode, reproducing the reference figures.
    pub fn defaults(mode: Mode) -> Self {
        let (range, pex) = match mode {
            Mode::SnrSweep => (SnrRange::new(5.0, 40.0, 5.0), vec![1.0, 0.1, 0.01, 0.0]),
            Mode::PexSweep => (
                SnrRange::new(FIG3_SNR_DB, FIG3_SNR_DB, 1.0),
                default_pex_grid(),
            ),
            Mode::SinglePoint => (SnrRange::new(FIG3_SNR_DB, FIG3_SNR_DB, 1.0), vec![0.1]),
            Mode::Diversity => (SnrRange::new(30.0, 50.0, 5.0), vec![0.0, 0.01, 0.1, 1.0]),
        };
        Self {
            mode,
            system: SystemParams::default(),
            energy: EnergyModel::default(),
            snr_db_range: range,
            pex_values: pex,
            fixed_snr_db: FIG3_SNR_DB,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            confidence: ehrelay::simulate::DEFAULT_CONFIDENCE,
            workers: 0,
            outputs: Outputs::default(),
            source: CurveSource::Analytic,
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(mode: Mode, config: &RunConfig, flags: &Overrides) -> Result<Self> {
        if let Some(m) = config.sweep.mode {
            if m != mode {
                return Err(CliError::Validation(format!(
                    "config declares mode {m:?} but the {mode:?} command was run"
                )));
            }
        }
        let mut spec = Self::defaults(mode);
        spec.system = config.system;
        spec.energy = config.energy;
        let sweep = &config.sweep;
        if let Some(r) = sweep.snr_db_range {
            spec.snr_db_range = r;
        }
        if let Some(v) = sweep.fixed_snr_db {
            spec.fixed_snr_db = v;
        }
        if let Some(p) = &sweep.pex_values {
            spec.pex_values = p.clone();
        }
        spec.trials = sweep.trials.unwrap_or(spec.trials);
        spec.seed = sweep.seed.unwrap_or(spec.seed);
        spec.confidence = sweep.confidence.unwrap_or(spec.confidence);
        spec.workers = sweep.workers.unwrap_or(spec.workers);
        spec.outputs = sweep.outputs.unwrap_or(spec.outputs);
        spec.source = sweep.source.unwrap_or(spec.source);

        if let Some(r) = flags.snr_db {
            spec.snr_db_range = r;
            spec.fixed_snr_db = r.start;
        }
        if let Some(p) = &flags.pex {
            spec.pex_values = p.clone();
        }
        if mode == Mode::SinglePoint {
            // a single-point run evaluates the energy section unless told otherwise
            if flags.pex.is_none() && sweep.pex_values.is_none() {
                spec.pex_values = vec![spec.energy.p_ex];
            }
        }
        spec.trials = flags.trials.unwrap_or(spec.trials);
        spec.seed = flags.seed.unwrap_or(spec.seed);
        spec.workers = flags.workers.unwrap_or(spec.workers);
        spec.confidence = flags.confidence.unwrap_or(spec.confidence);
        spec.source = flags.source.unwrap_or(spec.source);
        spec.outputs.svg |= flags.svg;

        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.snr_db_range.validate()?;
        if !self.fixed_snr_db.is_finite() {
            return Err(CliError::Validation("fixed_snr_db must be finite".into()));
        }
        if self.pex_values.is_empty() {
            return Err(CliError::Validation(
                "at least one p_ex value is required".into(),
            ));
        }
        if let Some(p) = self.pex_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(CliError::Validation(format!(
                "p_ex value {p} is outside [0, 1]"
            )));
        }
        if self.trials == 0 {
            return Err(CliError::Validation("trials must be at least 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(CliError::Validation(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        ehrelay::validate(self.system, self.energy)?;
        Ok(())
    }

    /// Link parameters at a given per-receiver SNR. The source power is set to
    /// `noise * 10^(snr/10)`; the relay keeps the configured `p_r / p_s` ratio
    /// (1 by default).
    pub fn system_at(&self, snr_db: f64) -> SystemParams {
        let p_s = self.system.noise * ehrelay::model::db_to_linear(snr_db);
        SystemParams {
            p_s,
            p_r: p_s * (self.system.p_r / self.system.p_s),
            ..self.system
        }
    }

    pub fn monte_carlo(&self) -> ehrelay::MonteCarlo {
        ehrelay::MonteCarlo::new(self.trials, self.seed)
            .workers(self.workers)
            .confidence(self.confidence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_values_inclusive() {
        assert_eq!(SnrRange::new(5.0, 40.0, 5.0).values().len(), 8);
        assert_eq!(SnrRange::new(30.0, 50.0, 2.5).values().len(), 9);
        assert_eq!(SnrRange::new(20.0, 20.0, 1.0).values(), vec![20.0]);
        let v = SnrRange::new(0.0, 1.0, 0.1).values();
        assert_eq!(v.len(), 11);
    }

    #[test]
    fn range_parsing() {
        assert_eq!(
            SnrRange::parse("5:40:5").unwrap(),
            SnrRange::new(5.0, 40.0, 5.0)
        );
        assert_eq!(
            SnrRange::parse("20").unwrap(),
            SnrRange::new(20.0, 20.0, 1.0)
        );
        assert!(SnrRange::parse("5:40").is_err());
        assert!(SnrRange::parse("5:40:0").is_err());
        assert!(SnrRange::parse("40:5:5").is_err());
        assert!(SnrRange::parse("a:b:c").is_err());
    }

    #[test]
    fn pex_grid_shape() {
        let g = default_pex_grid();
        assert_eq!(g.len(), 22);
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 1e-4).abs() < 1e-18);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_file_and_flag_precedence() {
        let cfg = RunConfig::from_json(
            r#"{
                "system": {"p_s": 1.0, "p_r": 2.0, "noise": 0.5, "bandwidth": 1e6, "rate_min": 1e5},
                "energy": {"p_ex": 0.2, "p_av": 0.3},
                "sweep": {"snr_db_range": [0, 10, 5], "trials": 500, "seed": 9,
                          "outputs": {"csv": true, "svg": true}}
            }"#,
        )
        .unwrap();
        let spec = SweepSpec::resolve(Mode::SnrSweep, &cfg, &Overrides::default()).unwrap();
        assert_eq!(spec.trials, 500);
        assert_eq!(spec.seed, 9);
        assert_eq!(spec.snr_db_range.values(), vec![0.0, 5.0, 10.0]);
        assert!(spec.outputs.svg);
        let sys = spec.system_at(10.0);
        assert!((sys.p_s - 5.0).abs() < 1e-12);
        assert!((sys.p_r - 10.0).abs() < 1e-12);

        let flags = Overrides {
            trials: Some(42),
            pex: Some(vec![0.5]),
            ..Default::default()
        };
        let spec = SweepSpec::resolve(Mode::SnrSweep, &cfg, &flags).unwrap();
        assert_eq!(spec.trials, 42);
        assert_eq!(spec.pex_values, vec![0.5]);
    }

    #[test]
    fn single_point_uses_energy_section() {
        let cfg = RunConfig::from_json(r#"{"energy": {"p_ex": 0.3}}"#).unwrap();
        let spec = SweepSpec::resolve(Mode::SinglePoint, &cfg, &Overrides::default()).unwrap();
        assert_eq!(spec.pex_values, vec![0.3]);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"sweep": {"pex_values": [1.5]}}"#,
            r#"{"sweep": {"trials": 0}}"#,
            r#"{"sweep": {"snr_db_range": [10, 0, 1]}}"#,
            r#"{"sweep": {"confidence": 1.0}}"#,
            r#"{"system": {"p_s": -1, "p_r": 1, "noise": 1, "bandwidth": 1, "rate_min": 1}}"#,
            r#"{"energy": {"p_ex": 2}}"#,
            r#"{"sweep": {"mode": "pex_sweep"}}"#,
        ];
        for text in bad {
            let cfg = RunConfig::from_json(text).unwrap();
            let err = SweepSpec::resolve(Mode::SnrSweep, &cfg, &Overrides::default()).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}");
        }
        assert!(RunConfig::from_json(r#"{"sweep": {"bogus": 1}}"#).is_err());
        assert!(RunConfig::from_json("not json").is_err());
    }
}

//! Experiment drivers: SNR sweep, energy-exhaustion sweep, single point, and
//! diversity fits. Each `(SNR, p_ex)` cell gets the analytic values and a
//! Monte Carlo estimate that reuses the same seed, so the MC curves share
//! common random numbers across cells.

use ehrelay::analytic::{
    coop_outage_closed_form_checked, coop_outage_exact, direct_outage_exact, diversity_fit,
    diversity_predicted, DiversityFit,
};
use ehrelay::{EnergyModel, Scenario};

use crate::config::{CurveSource, Mode, SweepSpec};
use crate::error::{CliError, Result};

/// One `(SNR, p_ex)` cell. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub p_ex: f64,
    pub p_direct_exact: f64,
    pub p_coop_exact: f64,
    pub p_coop_closed: f64,
    pub p_mc: f64,
    pub mc_se: f64,
    pub mc_ci_lo: f64,
    pub mc_ci_hi: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub mode: Mode,
    pub rows: Vec<SweepRow>,
    /// Cells where the closed form left `[0, 1]` and was clamped.
    pub clamped: Vec<(f64, f64)>,
    pub references: Option<References>,
}

/// The two limiting systems an energy sweep is bounded by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct References {
    /// Direct transmission only (`p_ex = 1`).
    pub direct: f64,
    /// Relay on a constant power supply (`p_ex = 0`).
    pub constant_power: f64,
}

impl SweepResult {
    /// Rows of one `p_ex` curve, in SNR order.
    pub fn curve(&self, p_ex: f64) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.p_ex == p_ex)
    }

    /// Rows whose MC estimate is more than `k` standard errors (taken at the
    /// exact analytic value) away from it.
    pub fn disagreements(&self, k: f64) -> Vec<SweepRow> {
        self.rows
            .iter()
            .filter(|r| {
                let se = ehrelay::simulate::std_err_at(r.p_coop_exact, r.trials);
                (r.p_mc - r.p_coop_exact).abs() > k * se
            })
            .copied()
            .collect()
    }
}

fn evaluate_cell(spec: &SweepSpec, snr_db: f64, p_ex: f64) -> Result<(SweepRow, bool)> {
    let energy = EnergyModel {
        p_ex,
        ..spec.energy
    };
    let s = Scenario::new(spec.system_at(snr_db), energy)?;
    let closed = coop_outage_closed_form_checked(&s);
    let mc = spec.monte_carlo().estimate(&s)?;
    let row = SweepRow {
        snr_db,
        p_ex,
        p_direct_exact: direct_outage_exact(&s),
        p_coop_exact: coop_outage_exact(&s),
        p_coop_closed: closed.value,
        p_mc: mc.p_hat,
        mc_se: mc.std_err,
        mc_ci_lo: mc.ci_lo,
        mc_ci_hi: mc.ci_hi,
        trials: mc.trials,
        seed: mc.seed,
    };
    Ok((row, closed.clamped))
}

fn run_cells(spec: &SweepSpec, cells: impl IntoIterator<Item = (f64, f64)>) -> Result<SweepResult> {
    let mut rows = Vec::new();
    let mut clamped = Vec::new();
    for (snr_db, p_ex) in cells {
        let (row, was_clamped) = evaluate_cell(spec, snr_db, p_ex)?;
        if was_clamped {
            log::warn!(
                "closed form clamped to [0, 1] at {snr_db} dB, p_ex = {p_ex}: outside its high-SNR regime"
            );
            clamped.push((snr_db, p_ex));
        }
        rows.push(row);
    }
    Ok(SweepResult {
        mode: spec.mode,
        rows,
        clamped,
        references: None,
    })
}

fn expect_mode(spec: &SweepSpec, mode: Mode) -> Result<()> {
    if spec.mode != mode {
        return Err(CliError::Validation(format!(
            "expected a {mode:?} spec, got {:?}",
            spec.mode
        )));
    }
    spec.validate()
}

/// Outage against SNR, one curve per `p_ex`.
pub fn run_snr_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    expect_mode(spec, Mode::SnrSweep)?;
    let snrs = spec.snr_db_range.values();
    let cells = snrs
        .iter()
        .flat_map(|&snr| spec.pex_values.iter().map(move |&p| (snr, p)));
    run_cells(spec, cells)
}

/// Outage against `p_ex` at a fixed SNR. The `p_direct_exact` column and the
/// `p_ex = 0` row are the two reference lines.
pub fn run_pex_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    expect_mode(spec, Mode::PexSweep)?;
    let snr = spec.fixed_snr_db;
    let mut result = run_cells(spec, spec.pex_values.iter().map(|&p| (snr, p)))?;
    let at = |p_ex| {
        Scenario::new(
            spec.system_at(snr),
            EnergyModel {
                p_ex,
                ..spec.energy
            },
        )
    };
    result.references = Some(References {
        direct: direct_outage_exact(&at(1.0)?),
        constant_power: coop_outage_exact(&at(0.0)?),
    });
    Ok(result)
}

pub fn run_single_point(spec: &SweepSpec) -> Result<SweepResult> {
    expect_mode(spec, Mode::SinglePoint)?;
    run_cells(spec, [(spec.snr_db_range.start, spec.pex_values[0])])
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityRow {
    pub p_ex: f64,
    pub source: CurveSource,
    pub predicted: u32,
    pub fit: DiversityFit,
    /// `(snr_db, p_out)` points the fit used.
    pub points: Vec<(f64, f64)>,
}

/// Fits the diversity order over the SNR window for each `p_ex` and pairs it
/// with the predicted order.
pub fn run_diversity(spec: &SweepSpec) -> Result<Vec<DiversityRow>> {
    expect_mode(spec, Mode::Diversity)?;
    let snrs = spec.snr_db_range.values();
    spec.pex_values
        .iter()
        .map(|&p_ex| {
            let energy = EnergyModel { p_ex, ..spec.energy };
            let mut points = Vec::with_capacity(snrs.len());
            for &snr_db in &snrs {
                let s = Scenario::new(spec.system_at(snr_db), energy)?;
                let p = match spec.source {
                    CurveSource::Analytic => coop_outage_exact(&s),
                    CurveSource::ClosedForm => coop_outage_closed_form_checked(&s).value,
                    CurveSource::Mc => {
                        let est = spec.monte_carlo().estimate(&s)?;
                        if est.outages == 0 {
                            let need = ehrelay::simulate::trials_for_relative_error(
                                coop_outage_exact(&s).max(f64::MIN_POSITIVE),
                                0.1,
                            )
                            .unwrap_or(u64::MAX);
                            return Err(CliError::Validation(format!(
                                "no outages observed at {snr_db} dB, p_ex = {p_ex} with {} trials; \
                                 raise --trials (about {need} for 10% relative error) or narrow the SNR window",
                                est.trials
                            )));
                        }
                        est.p_hat
                    }
                };
                points.push((snr_db, p));
            }
            let linear: Vec<_> = points
                .iter()
                .map(|&(db, p)| (ehrelay::model::db_to_linear(db), p))
                .collect();
            let fit = diversity_fit(&linear)?;
            Ok(DiversityRow {
                p_ex,
                source: spec.source,
                predicted: diversity_predicted(&energy),
                fit,
                points,
            })
        })
        .collect()
}

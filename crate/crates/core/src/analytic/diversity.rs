use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::EnergyModel;

/// Least-squares estimate of the diversity order from finite-SNR points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiversityFit {
    /// Negated slope of `log10(p_out)` against `log10(snr)`.
    pub slope: f64,
    /// Intercept of the same regression line.
    pub intercept: f64,
    pub points_used: usize,
    /// RMS residual in decades.
    pub residual_rms: f64,
}

/// Asymptotic diversity order: the relay adds a second order only when it
/// never runs out of energy.
pub fn diversity_predicted(energy: &EnergyModel) -> u32 {
    if energy.p_ex == 0.0 {
        2
    } else {
        1
    }
}

/// Fits `log10(p) = intercept - slope * log10(snr)` over `(snr, p)` pairs with
/// linear `snr > 0` and `0 < p < 1`.
pub fn diversity_fit(points: &[(f64, f64)]) -> Result<DiversityFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(snr, p) in points {
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::Fit(format!("SNR must be positive, got {snr}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Fit(format!(
                "outage probability must lie strictly inside (0, 1), got {p} at SNR {snr}"
            )));
        }
        logs.push((snr.log10(), p.log10()));
    }

    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let (sxx, sxy) = logs.iter().fold((0.0, 0.0), |(sxx, sxy), (x, y)| {
        let dx = x - mean_x;
        (sxx + dx * dx, sxy + dx * (y - mean_y))
    });
    if sxx <= f64::EPSILON * n * mean_x.abs().max(1.0) {
        return Err(Error::Fit(
            "singular design: all SNR values coincide".into(),
        ));
    }
    let fitted = sxy / sxx;
    let intercept = mean_y - fitted * mean_x;
    let sse: f64 = logs
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + fitted * x);
            r * r
        })
        .sum();

    Ok(DiversityFit {
        slope: -fitted,
        intercept,
        points_used: logs.len(),
        residual_rms: (sse / n).sqrt(),
    })
}

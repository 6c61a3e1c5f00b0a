use crate::error::{Error, Result};
use crate::model::Scenario;

use super::bessel::{one_minus_x_k1, x_bessel_k1};

/// Below this Bessel argument the relay CDF is assembled from `1 - x K1(x)`
/// instead of `x K1(x)`, so the high-SNR tail keeps its relative precision.
const RELAY_CDF_SERIES_LIMIT: f64 = 2.0;

/// A probability forced into `[0, 1]`, remembering whether it had to be.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    /// The raw expression left `[0, 1]` (the approximation is outside its regime).
    pub clamped: bool,
}

pub fn clamp_probability(raw: f64) -> Clamped {
    let value = raw.clamp(0.0, 1.0);
    Clamped {
        value,
        clamped: value != raw,
    }
}

/// `P[g_sd * snr_s < g1] = 1 - exp(-g1 / snr_s)`.
pub fn direct_outage_exact(s: &Scenario) -> f64 {
    -(-s.direct_threshold() / s.snr_s()).exp_m1()
}

/// First-order high-SNR form `g1 / snr_s`, clamped to 1.
pub fn direct_outage_approx(s: &Scenario) -> f64 {
    clamp_probability(s.direct_threshold() / s.snr_s()).value
}

/// End-to-end SNR of the two-hop amplify-and-forward link,
/// `x y / (x + y + 1)` with per-hop SNRs `x = g_sr snr_s`, `y = g_rd snr_r`.
///
/// Never exceeds `min(x, y)`, including after rounding.
pub fn relay_snr(g_sr: f64, g_rd: f64, s: &Scenario) -> f64 {
    let x = g_sr * s.snr_s();
    let y = g_rd * s.snr_r();
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    if lo <= 0.0 {
        return 0.0;
    }
    // hi / (lo + hi + 1) <= 1 in floating point, so the product is <= lo.
    lo * (hi / (lo + hi + 1.0))
}

/// CDF of the relay SNR functional for Rayleigh hops:
/// `P[f < z] = 1 - exp(-a) b K1(b)`, `a = (1/snr_s + 1/snr_r) z`,
/// `b = 2 sqrt(z (z + 1) / (snr_s snr_r))`.
pub fn relay_cdf(z: f64, s: &Scenario) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::Domain {
            function: "relay_cdf",
            value: z,
        });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(1.0);
    }
    let a = (1.0 / s.snr_s() + 1.0 / s.snr_r()) * z;
    let b = 2.0 * z.sqrt() * (z + 1.0).sqrt() / (s.snr_s().sqrt() * s.snr_r().sqrt());
    let p = if b <= RELAY_CDF_SERIES_LIMIT {
        // 1 - e^-a (1 - delta) = (1 - e^-a) + e^-a delta
        -(-a).exp_m1() + (-a).exp() * one_minus_x_k1(b)?
    } else {
        1.0 - (-a).exp() * x_bessel_k1(b)?
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Outage of the relay link given the relay has energy: `P[f < g2]`.
pub fn relay_outage_exact(s: &Scenario) -> f64 {
    relay_cdf(s.relay_threshold(), s).expect("relay threshold is positive for a valid scenario")
}

/// High-SNR form `(1/snr_s + 1/snr_r) g2`, clamped to 1.
pub fn relay_outage_approx(s: &Scenario) -> f64 {
    clamp_probability(relay_term(s)).value
}

fn relay_term(s: &Scenario) -> f64 {
    (1.0 / s.snr_s() + 1.0 / s.snr_r()) * s.relay_threshold()
}

/// Overall outage of the protocol: the relay is only tried when the direct
/// link fails, and only helps when it has energy.
///
/// `p_direct * (p_ex + (1 - p_ex) p_relay)`.
pub fn coop_outage_exact(s: &Scenario) -> f64 {
    let p_ex = s.p_ex();
    direct_outage_exact(s) * (p_ex + (1.0 - p_ex) * relay_outage_exact(s))
}

/// High-SNR closed form
/// `(g1/snr_s) [p_ex + (1/snr_s + 1/snr_r) g2 (1 - p_ex)]`.
///
/// With `snr_s = snr_r = rho` this is `g1 p_ex / rho + 2 g1 g2 (1 - p_ex) / rho^2`.
pub fn coop_outage_closed_form(s: &Scenario) -> f64 {
    coop_outage_closed_form_checked(s).value
}

pub fn coop_outage_closed_form_checked(s: &Scenario) -> Clamped {
    let p_ex = s.p_ex();
    let direct = s.direct_threshold() / s.snr_s();
    clamp_probability(direct * (p_ex + relay_term(s) * (1.0 - p_ex)))
}

/// Ratio of the cooperative closed form to the direct-link approximation,
/// `p_ex + (1 - p_ex)(1/snr_s + 1/snr_r) g2`. Tends to `p_ex` at high SNR.
pub fn multiplicative_gain(s: &Scenario) -> f64 {
    let p_ex = s.p_ex();
    p_ex + (1.0 - p_ex) * relay_term(s)
}

//! Closed-form outage analysis: the direct link, the amplify-and-forward relay
//! link, their composition under the on-off energy model, and diversity.

mod bessel;
mod diversity;
mod outage;

pub use bessel::{bessel_k1, one_minus_x_k1, x_bessel_k1};
pub use diversity::{diversity_fit, diversity_predicted, DiversityFit};
pub use outage::{
    clamp_probability, coop_outage_closed_form, coop_outage_closed_form_checked, coop_outage_exact,
    direct_outage_approx, direct_outage_exact, multiplicative_gain, relay_cdf, relay_outage_approx,
    relay_outage_exact, relay_snr, Clamped,
};

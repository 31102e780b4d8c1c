//! Normal-model swaption prices from quoted normal volatilities.

use crate::error::{Error, Result};
use crate::instruments::{Schedule, SwapType};
use crate::stats::{norm_cdf, norm_pdf};

use super::DiscountCurve;

/// Bachelier payer/receiver price
/// `A [zeta (f-K) N(zeta d) + sigma sqrt(T) n(d)]` with `d = (f-K)/(sigma sqrt(T))`.
///
/// Zero total variance gives the intrinsic value `A (zeta (f-K))^+`.
pub fn bachelier_price(
    forward: f64,
    strike: f64,
    normal_vol: f64,
    expiry: f64,
    annuity: f64,
    swap_type: SwapType,
) -> Result<f64> {
    if normal_vol < 0.0 || !normal_vol.is_finite() {
        return Err(Error::Validation(format!("normal vol must be >= 0, got {normal_vol}")));
    }
    if expiry <= 0.0 {
        return Err(Error::Validation(format!("expiry must be > 0, got {expiry}")));
    }
    if annuity <= 0.0 {
        return Err(Error::Validation(format!("annuity must be > 0, got {annuity}")));
    }
    let zeta = swap_type.zeta();
    let moneyness = forward - strike;
    let std_dev = normal_vol * expiry.sqrt();
    if std_dev == 0.0 {
        return Ok(annuity * (zeta * moneyness).max(0.0));
    }
    let d = moneyness / std_dev;
    Ok(annuity * (zeta * moneyness * norm_cdf(zeta * d) + std_dev * norm_pdf(d)))
}

/// Forward par swap rate and annuity `(R_0^N(0), S_0^N(0))` on the market curve.
pub fn market_forward_annuity(curve: &DiscountCurve, schedule: &Schedule) -> Result<(f64, f64)> {
    let dates = schedule.dates();
    let mut annuity = 0.0;
    for (i, &date) in dates.iter().enumerate().skip(1) {
        annuity += schedule.alpha(i) * curve.discount(date)?;
    }
    let forward = (curve.discount(schedule.start())? - curve.discount(schedule.end())?) / annuity;
    Ok((forward, annuity))
}

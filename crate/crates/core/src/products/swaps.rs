use crate::error::{Error, Result};
use crate::instruments::{Schedule, SwapSpec};
use crate::model::ShiftedModel;

fn check_time(schedule: &Schedule, t: f64) -> Result<()> {
    if t > schedule.start() {
        return Err(Error::Domain(format!(
            "valuation time {t} after swap start {}",
            schedule.start()
        )));
    }
    Ok(())
}

/// `zeta (P(t,T_0) - P(t,T_N) - K sum_i alpha_i P(t,T_i))` with shifted bonds.
pub fn swap_value(model: &ShiftedModel, spec: &SwapSpec, (x, y): (f64, f64), t: f64) -> Result<f64> {
    let s = &spec.schedule;
    check_time(s, t)?;
    let fixed = annuity(model, s, (x, y), t)?;
    let float = model.zcb(x, y, t, s.start())? - model.zcb(x, y, t, s.end())?;
    Ok(spec.swap_type.zeta() * (float - spec.strike * fixed))
}

/// Annuity `sum_{i=1}^N alpha_i P(t, T_i)` of the schedule.
pub fn annuity(model: &ShiftedModel, schedule: &Schedule, (x, y): (f64, f64), t: f64) -> Result<f64> {
    check_time(schedule, t)?;
    let mut sum = 0.0;
    for i in 1..=schedule.payments() {
        sum += schedule.alpha(i) * model.zcb(x, y, t, schedule.dates()[i])?;
    }
    Ok(sum)
}

/// Par swap rate `(P(t,T_0) - P(t,T_N)) / annuity`.
pub fn par_rate(model: &ShiftedModel, schedule: &Schedule, (x, y): (f64, f64), t: f64) -> Result<f64> {
    let s = annuity(model, schedule, (x, y), t)?;
    Ok((model.zcb(x, y, t, schedule.start())? - model.zcb(x, y, t, schedule.end())?) / s)
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AffineBonds, ShiftedModel};
use crate::simulation::PathSet;
use crate::stats::{Estimate, KahanSum};
use crate::SwapType;

/// CMS with annual resets `T_0..T_{N-1}`, payments `T_1..T_N` and a
/// `c`-year swap-rate index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmsSpec {
    pub effective: f64,
    pub tenor: usize,
    pub index: usize,
    pub swap_type: SwapType,
}

impl CmsSpec {
    pub fn new(effective: f64, tenor: usize, index: usize, swap_type: SwapType) -> Result<Self> {
        if tenor == 0 || index == 0 {
            return Err(Error::Validation(format!(
                "CMS tenor and index must be at least one year (tenor {tenor}, index {index})"
            )));
        }
        if !(effective >= 0.0) || !effective.is_finite() {
            return Err(Error::Validation(format!("invalid effective date {effective}")));
        }
        Ok(Self {
            effective,
            tenor,
            index,
            swap_type,
        })
    }

    /// Reset dates `T_0..T_{N-1}`.
    pub fn reset_dates(&self) -> Vec<f64> {
        (0..self.tenor).map(|i| self.effective + i as f64).collect()
    }

    /// Last date the discount curve must cover, `T_{N-1} + c`.
    pub fn last_index_date(&self) -> f64 {
        self.effective + (self.tenor - 1 + self.index) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmsResult {
    pub spec: CmsSpec,
    /// Par CMS rate with its Monte Carlo standard error.
    pub rate: Estimate,
    /// `sum_i alpha_i P^M(0, T_{i-1})`, taken from the curve.
    pub denominator: f64,
}

/// Par CMS rate
/// `E[sum_i alpha_i D(T_{i-1}) R_{i-1}^{i-1+c}(T_{i-1})] / sum_i alpha_i P(0, T_{i-1})`.
pub fn cms_par_rate(model: &ShiftedModel, paths: &PathSet, spec: &CmsSpec) -> Result<CmsResult> {
    let spec = CmsSpec::new(spec.effective, spec.tenor, spec.index, spec.swap_type)?;
    let resets = spec.reset_dates();
    let alpha = 1.0;
    let denominator = resets
        .iter()
        .map(|&t| Ok(alpha * model.curve.discount(t)?))
        .collect::<Result<KahanSum>>()?
        .total();

    let mut numerator = vec![0.0; paths.paths()];
    for &reset in &resets {
        let obs = paths.index_of(reset)?;
        let dates: Vec<f64> = (0..=spec.index).map(|j| reset + j as f64).collect();
        let bonds = AffineBonds::new(model, reset, &dates)?;
        let discount = paths.discount(model, obs)?;
        let (xs, ys) = (paths.x(obs), paths.y(obs));
        for (i, acc) in numerator.iter_mut().enumerate() {
            let (x, y) = (xs[i], ys[i]);
            let mut annuity = 0.0;
            for j in 1..=spec.index {
                annuity += bonds.price(j, x, y);
            }
            let rate = (bonds.price(0, x, y) - bonds.price(spec.index, x, y)) / annuity;
            *acc += alpha * discount[i] * rate;
        }
    }
    Ok(CmsResult {
        rate: Estimate::from_samples(&numerator).scaled(1.0 / denominator),
        denominator,
        spec,
    })
}

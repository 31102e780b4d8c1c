use serde::Serialize;

use super::cumulants::{cumulants_from_moments, expansion_coefficients, MAX_ORDER};
use super::hermite::hermite_all;
use super::moments::swap_moments;
use crate::error::{Error, Result};
use crate::instruments::SwapSpec;
use crate::model::ShiftedModel;
use crate::stats::{norm_cdf, norm_pdf};

/// Truncation orders used when none are given.
pub const DEFAULT_ORDERS: [usize; 3] = [3, 5, 7];

/// Expansion prices at each requested truncation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcPrice {
    /// `P(t, T_0)`.
    pub discount: f64,
    /// Swap cumulants `c_1..c_L` under the `T_0`-forward measure.
    pub cumulants: Vec<f64>,
    /// Order-2 (pure Gaussian) price.
    pub base: f64,
    /// `(L, price)` in ascending order of `L`.
    pub prices: Vec<(usize, f64)>,
}

impl GcPrice {
    pub fn at_order(&self, order: usize) -> Option<f64> {
        if order == 2 {
            return Some(self.base);
        }
        self.prices.iter().find(|(l, _)| *l == order).map(|&(_, p)| p)
    }

    /// Price at the highest requested order.
    pub fn highest(&self) -> f64 {
        self.prices.last().map_or(self.base, |&(_, p)| p)
    }
}

fn normalize_orders(orders: &[usize]) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = orders.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&bad) = out.iter().find(|&&l| !(2..=MAX_ORDER).contains(&l)) {
        return Err(Error::Validation(format!(
            "expansion order {bad} outside 2..={MAX_ORDER}"
        )));
    }
    Ok(out)
}

/// Expansion prices from cumulants `c_1..c_L` and the discount factor `P(t, T_0)`.
pub fn gc_price_from_cumulants(discount: f64, cumulants: &[f64], orders: &[usize]) -> Result<GcPrice> {
    let orders = normalize_orders(orders)?;
    let max = orders.last().copied().unwrap_or(2).max(2);
    if cumulants.len() < max {
        return Err(Error::Validation(format!(
            "order {max} needs {max} cumulants, got {}",
            cumulants.len()
        )));
    }
    let c = &cumulants[..max];
    let q = expansion_coefficients(c)?;
    let (c1, c2) = (c[0], c[1]);
    let sd = c2.sqrt();
    let d = c1 / sd;
    let kernel = sd * norm_pdf(d);
    let h = hermite_all(max.saturating_sub(2), d);
    let base = discount * (c1 * norm_cdf(d) + kernel);
    let mut correction = 0.0;
    let mut prices = Vec::new();
    for l in 3..=max {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        correction += sign * q[l] * h[l - 2];
        if orders.contains(&l) {
            prices.push((l, discount * (c1 * norm_cdf(d) + kernel * (1.0 + correction))));
        }
    }
    Ok(GcPrice {
        discount,
        cumulants: c.to_vec(),
        base,
        prices,
    })
}

/// Gram-Charlier swaption price at time `t` and state `(x, y)` for each order
/// in `orders` (values in `2..=7`; 2 is the Gaussian base term).
pub fn gc_price(model: &ShiftedModel, spec: &SwapSpec, t: f64, state: (f64, f64), orders: &[usize]) -> Result<GcPrice> {
    let norm = normalize_orders(orders)?;
    let max = norm.last().copied().unwrap_or(2).max(2);
    let moments = swap_moments(model, spec, t, state, max)?;
    let cumulants = cumulants_from_moments(&moments)?;
    let discount = model.zcb(state.0, state.1, t, spec.schedule.start())?;
    gc_price_from_cumulants(discount, &cumulants, &norm)
}

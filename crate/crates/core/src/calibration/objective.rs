use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::target::CalibrationTarget;
use crate::error::Result;
use crate::gram_charlier::{gc_price, GcPrice};
use crate::market_data::DiscountCurve;
use crate::model::{is_admissible, ModelParams, ShiftedModel, LOWER_BOUNDS};
use crate::stats::KahanSum;

/// Contribution of a term whose model price is unavailable or non-positive.
pub const PENALTY: f64 = 1e6;

/// `(market / model - 1)^2`.
#[inline]
pub fn relative_squared_error(market: f64, model: f64) -> f64 {
    let r = market / model - 1.0;
    r * r
}

/// Fit of one quote: model price and signed relative error `market/model - 1`
/// per order (`None` where the expansion failed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuoteFit {
    pub maturity: f64,
    pub tenor: f64,
    pub strike: f64,
    pub market: f64,
    pub model: Vec<(usize, Option<f64>)>,
    pub relative_error: Vec<(usize, Option<f64>)>,
}

fn price_all(params: &ModelParams, target: &CalibrationTarget, curve: &Arc<DiscountCurve>) -> Vec<Result<GcPrice>> {
    let model = ShiftedModel::new(*params, curve.clone());
    let state = (params.x0, params.y0);
    target
        .specs
        .par_iter()
        .map(|spec| gc_price(&model, spec, 0.0, state, &target.orders))
        .collect()
}

fn term(market: f64, price: Option<f64>) -> f64 {
    match price {
        Some(p) if p > 0.0 && p.is_finite() => {
            let e = relative_squared_error(market, p);
            if e.is_finite() {
                e
            } else {
                PENALTY
            }
        }
        _ => PENALTY,
    }
}

/// Objective at an admissible `Pi`. Terms are summed in quote order, then
/// order of truncation, so the value is reproducible to the last bit.
pub fn objective(params: &ModelParams, target: &CalibrationTarget, curve: &Arc<DiscountCurve>) -> f64 {
    let prices = price_all(params, target, curve);
    let mut sum = KahanSum::new();
    for (quote, price) in target.quotes.iter().zip(&prices) {
        for &l in &target.orders {
            let p = price.as_ref().ok().and_then(|g| g.at_order(l));
            sum.add(term(quote.price, p));
        }
    }
    sum.total()
}

/// Objective on a raw vector: inadmissible vectors score the full penalty
/// for every term.
pub fn objective_raw(pi: &[f64; 8], target: &CalibrationTarget, curve: &Arc<DiscountCurve>) -> f64 {
    match ModelParams::new(*pi) {
        Ok(p) => objective(&p, target, curve),
        Err(_) => PENALTY * (target.quotes.len() * target.orders.len()) as f64,
    }
}

pub fn evaluate_quotes(params: &ModelParams, target: &CalibrationTarget, curve: &Arc<DiscountCurve>) -> Vec<QuoteFit> {
    let prices = price_all(params, target, curve);
    target
        .quotes
        .iter()
        .zip(prices)
        .map(|(q, price)| {
            let model: Vec<(usize, Option<f64>)> = target
                .orders
                .iter()
                .map(|&l| (l, price.as_ref().ok().and_then(|g| g.at_order(l))))
                .collect();
            let relative_error = model
                .iter()
                .map(|&(l, p)| (l, p.filter(|v| *v > 0.0).map(|v| q.price / v - 1.0)))
                .collect();
            QuoteFit {
                maturity: q.maturity,
                tenor: q.tenor,
                strike: q.strike,
                market: q.price,
                model,
                relative_error,
            }
        })
        .collect()
}

/// Repairs a raw vector into the admissible polytope: clip to the bounds,
/// then move each `(phi_1, phi_2)` pair onto the nearest feasible face.
///
/// - x: `phi_2 <= phi_1 <= 2 phi_2`; `phi_1 < phi_2` lowers `phi_2` to `phi_1`,
///   `phi_1 > 2 phi_2` projects orthogonally onto `phi_1 = 2 phi_2`.
/// - y: `phi_1 <= phi_2`; `phi_1 > phi_2` lowers `phi_1` to `phi_2`.
pub fn project_admissible(raw: &[f64; 8]) -> [f64; 8] {
    let mut pi = *raw;
    for (p, &lo) in pi.iter_mut().zip(&LOWER_BOUNDS) {
        if !p.is_finite() || *p < lo {
            *p = lo;
        }
    }
    if is_admissible(&pi) {
        return pi;
    }
    let (p1, p2) = (pi[0], pi[1]);
    if p1 < p2 {
        pi[1] = p1;
    } else if p1 > 2.0 * p2 {
        let s = (p1 - 2.0 * p2) / 5.0;
        pi[0] = p1 - s;
        pi[1] = p2 + 2.0 * s;
        // land exactly on the face
        pi[0] = pi[0].min(2.0 * pi[1]);
    }
    if pi[3] > pi[4] {
        pi[3] = pi[4];
    }
    pi
}

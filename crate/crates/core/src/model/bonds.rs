use std::sync::Arc;

use super::factor::FactorPhi;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::market_data::DiscountCurve;

/// `(A_z(t,T), B_z(t,T))` of the factor with coefficients `phi`.
pub fn bond_ab(phi: &FactorPhi, t: f64, maturity: f64) -> (f64, f64) {
    phi.bond_ab(maturity - t)
}

/// Non-shifted bond `P^-(t,T) = A_x e^{-B_x x} A_y e^{B_y y}`.
pub fn zcb_cirminus(params: &ModelParams, x: f64, y: f64, t: f64, maturity: f64) -> f64 {
    let tau = maturity - t;
    let (la_x, b_x) = params.x.bond_log_ab(tau);
    let (la_y, b_y) = params.y.bond_log_ab(tau);
    (la_x - b_x * x + la_y + b_y * y).exp()
}

/// Instantaneous forward rate `f(0,t)` of the non-shifted model.
pub fn forward_rate_model(params: &ModelParams, t: f64) -> f64 {
    let (ax, bx) = params.x.forward_parts(t);
    let (ay, by) = params.y.forward_parts(t);
    ax + bx * params.x0 + ay - by * params.y0
}

/// Model parameters together with the market curve they are shifted onto.
#[derive(Debug, Clone)]
pub struct ShiftedModel {
    pub params: ModelParams,
    pub curve: Arc<DiscountCurve>,
}

impl ShiftedModel {
    pub fn new(params: ModelParams, curve: Arc<DiscountCurve>) -> Self {
        Self { params, curve }
    }

    /// `P^-(0,T)` at the initial state `(x0, y0)`.
    pub fn cir_initial(&self, maturity: f64) -> f64 {
        zcb_cirminus(&self.params, self.params.x0, self.params.y0, 0.0, maturity)
    }

    /// `P^M(0,T) / P^-(0,T)`, the deterministic correction per maturity.
    pub fn market_to_model(&self, maturity: f64) -> Result<f64> {
        Ok(self.curve.discount(maturity)? / self.cir_initial(maturity))
    }

    /// `exp(-int_t^T psi) = [P^M(0,T)/P^M(0,t)] [P^-(0,t)/P^-(0,T)]`.
    pub fn shift_factor(&self, t: f64, maturity: f64) -> Result<f64> {
        Ok(self.market_to_model(maturity)? / self.market_to_model(t)?)
    }

    /// Shifted bond `P(t,T)` at state `(x, y)`.
    pub fn zcb(&self, x: f64, y: f64, t: f64, maturity: f64) -> Result<f64> {
        if maturity < t {
            return Err(Error::Domain(format!("bond maturity {maturity} before t = {t}")));
        }
        Ok(self.shift_factor(t, maturity)? * zcb_cirminus(&self.params, x, y, t, maturity))
    }
}

/// Same as [`ShiftedModel::zcb`].
pub fn zcb_shifted(model: &ShiftedModel, x: f64, y: f64, t: f64, maturity: f64) -> Result<f64> {
    model.zcb(x, y, t, maturity)
}

/// Shifted bonds `P(t, T_j)` for one fixed `t` and a set of maturities,
/// precomputed as `exp(c_j - B_x,j x + B_y,j y)` so Monte Carlo loops avoid
/// curve lookups per path.
#[derive(Debug, Clone)]
pub struct AffineBonds {
    log_c: Vec<f64>,
    bx: Vec<f64>,
    by: Vec<f64>,
}

impl AffineBonds {
    pub fn new(model: &ShiftedModel, t: f64, maturities: &[f64]) -> Result<Self> {
        let mut out = AffineBonds {
            log_c: Vec::with_capacity(maturities.len()),
            bx: Vec::with_capacity(maturities.len()),
            by: Vec::with_capacity(maturities.len()),
        };
        for &m in maturities {
            if m < t {
                return Err(Error::Domain(format!("bond maturity {m} before t = {t}")));
            }
            let (lax, bx) = model.params.x.bond_log_ab(m - t);
            let (lay, by) = model.params.y.bond_log_ab(m - t);
            out.log_c.push(model.shift_factor(t, m)?.ln() + lax + lay);
            out.bx.push(bx);
            out.by.push(by);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.log_c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_c.is_empty()
    }

    #[inline]
    pub fn price(&self, j: usize, x: f64, y: f64) -> f64 {
        (self.log_c[j] - self.bx[j] * x + self.by[j] * y).exp()
    }
}

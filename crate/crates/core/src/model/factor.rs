//! One CIR factor: the `(k, theta, sigma)` view and the `phi` triple used by
//! every closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `x` enters the short rate with `+`, `y` with `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    X,
    Y,
}

impl Factor {
    /// `+1` for `x`, `-1` for `y`; also the sign of `2 sigma^2` inside `phi_1`.
    pub fn sign(self) -> f64 {
        match self {
            Factor::X => 1.0,
            Factor::Y => -1.0,
        }
    }
}

/// CIR dynamics `dz = k (theta - z) dt + sigma sqrt(z) dW`, `z(0) = z0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorParams {
    pub k: f64,
    pub theta: f64,
    pub sigma: f64,
    pub z0: f64,
    pub factor: Factor,
}

impl FactorParams {
    pub fn new(factor: Factor, k: f64, theta: f64, sigma: f64, z0: f64) -> Self {
        Self {
            k,
            theta,
            sigma,
            z0,
            factor,
        }
    }

    pub fn feller(&self) -> bool {
        2.0 * self.k * self.theta >= self.sigma * self.sigma
    }

    /// `E[z(t)] = theta + (z0 - theta) e^{-k t}`.
    pub fn mean(&self, t: f64) -> f64 {
        self.theta + (self.z0 - self.theta) * (-self.k * t).exp()
    }

    /// `phi_1 = sqrt(k^2 +- 2 sigma^2)`, `phi_2 = (k + phi_1)/2`, `phi_3 = 2 k theta / sigma^2`.
    pub fn to_phi(&self) -> Result<FactorPhi> {
        let (k, theta, sigma) = (self.k, self.theta, self.sigma);
        if k < 0.0 || theta < 0.0 || sigma < 0.0 || self.z0 < 0.0 {
            return Err(Error::Domain(format!(
                "{:?}-factor parameters must be >= 0",
                self.factor
            )));
        }
        let radicand = k * k + self.factor.sign() * 2.0 * sigma * sigma;
        if radicand < 0.0 {
            return Err(Error::Domain(format!(
                "k_y^2 < 2 sigma_y^2 ({k}^2 < 2 * {sigma}^2): phi_1 would be imaginary"
            )));
        }
        if sigma == 0.0 {
            return Err(Error::Domain("sigma = 0 makes phi_3 infinite".into()));
        }
        let phi1 = radicand.sqrt();
        Ok(FactorPhi {
            phi1,
            phi2: 0.5 * (k + phi1),
            phi3: 2.0 * k * theta / (sigma * sigma),
        })
    }
}

/// Closed-form coefficients of one factor's Riccati system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorPhi {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl FactorPhi {
    /// Inverse map back to `(k, theta, sigma)`; fails on the `phi_1 = 2 phi_2`
    /// face where `k = 0` and `theta` is undefined.
    pub fn to_params(&self, factor: Factor, z0: f64) -> Result<FactorParams> {
        let FactorPhi { phi1, phi2, phi3 } = *self;
        let k = 2.0 * phi2 - phi1;
        let denom = phi1 - 2.0 * phi2;
        if denom == 0.0 {
            return Err(Error::Singularity(format!(
                "{factor:?}-factor: phi_1 = 2 phi_2 gives k = 0 and an undefined theta"
            )));
        }
        // sigma^2 = +-2 phi_2 (phi_1 - phi_2); clamp rounding noise on the boundary face
        let sigma_sq = (factor.sign() * 2.0 * (phi2 * phi1 - phi2 * phi2)).max(0.0);
        let theta = -factor.sign() * phi2 * phi3 * (phi1 - phi2) / denom;
        Ok(FactorParams {
            k,
            theta,
            sigma: sigma_sq.sqrt(),
            z0,
            factor,
        })
    }

    /// `(A(t,T), B(t,T))` at `tau = T - t`.
    pub fn bond_ab(&self, tau: f64) -> (f64, f64) {
        let (log_a, b) = self.bond_log_ab(tau);
        (log_a.exp(), b)
    }

    /// `(ln A, B)`, evaluated through `u = exp(-phi_1 tau)` so long horizons
    /// never form `exp(phi_1 tau)`.
    pub fn bond_log_ab(&self, tau: f64) -> (f64, f64) {
        let FactorPhi { phi1, phi2, phi3 } = *self;
        if phi1 == 0.0 {
            let den = 1.0 + phi2 * tau;
            return (phi3 * (phi2 * tau - den.ln()), tau / den);
        }
        let u = (-phi1 * tau).exp();
        let one_minus_u = -(-phi1 * tau).exp_m1();
        let den = phi1 * u + phi2 * one_minus_u;
        let b = one_minus_u / den;
        let log_a = phi3 * ((phi2 - phi1) * tau - (den / phi1).ln());
        (log_a, b)
    }

    /// Riccati solution with terminal values `(M, N)(T_0) = (a, b)` at
    /// `tau = T_0 - t`. Returns `(ln M, N)`.
    pub fn riccati_terminal_log(&self, a: f64, b: f64, tau: f64) -> Result<(f64, f64)> {
        if a <= 0.0 {
            return Err(Error::Domain(format!("terminal a_z must be > 0, got {a}")));
        }
        self.riccati_terminal_from_log(a.ln(), b, tau)
    }

    /// As [`FactorPhi::riccati_terminal_log`] with the terminal given as `ln a`.
    pub fn riccati_terminal_from_log(&self, log_a: f64, b: f64, tau: f64) -> Result<(f64, f64)> {
        let FactorPhi { phi1, phi2, phi3 } = *self;
        let g = 1.0 + b * (phi1 - phi2);
        if phi1 == 0.0 {
            let den = 1.0 + phi2 * tau * g;
            if den <= 0.0 {
                return Err(singular(den));
            }
            return Ok((log_a + phi3 * (phi2 * tau - den.ln()), (b + tau * g) / den));
        }
        let u = (-phi1 * tau).exp();
        let one_minus_u = -(-phi1 * tau).exp_m1();
        // D e^{-phi_1 tau} with D = phi_1 + phi_2 (e^{phi_1 tau} - 1) g
        let den = phi1 * u + phi2 * one_minus_u * g;
        if den <= 0.0 || !den.is_finite() {
            return Err(singular(den));
        }
        let n = (b * phi1 * u + one_minus_u * g) / den;
        let log_m = log_a + phi3 * ((phi2 - phi1) * tau - (den / phi1).ln());
        Ok((log_m, n))
    }

    pub fn riccati_terminal(&self, a: f64, b: f64, tau: f64) -> Result<(f64, f64)> {
        let (log_m, n) = self.riccati_terminal_log(a, b, tau)?;
        Ok((log_m.exp(), n))
    }

    /// `(-d_T A / A, d_T B)` at `tau = T - t`, the pieces of the instantaneous forward rate.
    pub fn forward_parts(&self, tau: f64) -> (f64, f64) {
        let FactorPhi { phi1, phi2, phi3 } = *self;
        let (_, b) = self.bond_log_ab(tau);
        let dlog_a = phi2 * phi3 * (phi1 - phi2) * b;
        let db = if phi1 == 0.0 {
            1.0 / ((1.0 + phi2 * tau) * (1.0 + phi2 * tau))
        } else {
            let u = (-phi1 * tau).exp();
            let den = phi1 * u + phi2 * (-(-phi1 * tau).exp_m1());
            phi1 * phi1 * u / (den * den)
        };
        (dlog_a, db)
    }
}

fn singular(den: f64) -> Error {
    Error::Singularity(format!(
        "Riccati denominator phi_1 + phi_2 (e^(phi_1 tau) - 1)(1 + b (phi_1 - phi_2)) is {den}"
    ))
}

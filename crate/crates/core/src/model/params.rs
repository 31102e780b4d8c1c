use serde::{Deserialize, Serialize};

use super::factor::{Factor, FactorParams, FactorPhi};
use crate::error::{Error, Result};

/// Slack allowed on the admissibility inequalities for round-off.
pub const ADMISSIBLE_TOL: f64 = 1e-12;

/// Linear inequalities `A Pi <= 0` on `Pi = (phi1x, phi2x, phi3x, phi1y, phi2y, phi3y, x0, y0)`:
/// `sigma_x^2 >= 0`, `sigma_y^2 >= 0`, `k_x >= 0`, `k_y >= 0`.
pub const CONSTRAINT_MATRIX: [[f64; 8]; 4] = [
    [-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0],
    [1.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0, -2.0, 0.0, 0.0, 0.0],
];

/// Lower bounds: every component `>= 0`, `phi3x, phi3y >= 1` (Feller).
pub const LOWER_BOUNDS: [f64; 8] = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0];

/// Names of the eight components, in order.
pub const PARAM_NAMES: [&str; 8] = ["phi1x", "phi2x", "phi3x", "phi1y", "phi2y", "phi3y", "x0", "y0"];

/// Checks `Pi` against the admissible polytope; returns the first violation.
pub fn admissibility_violation(pi: &[f64; 8], tol: f64) -> Option<String> {
    for (i, (&v, &lo)) in pi.iter().zip(&LOWER_BOUNDS).enumerate() {
        if !v.is_finite() {
            return Some(format!("{} is not finite", PARAM_NAMES[i]));
        }
        if v < lo - tol {
            return Some(format!("{} = {v} below its bound {lo}", PARAM_NAMES[i]));
        }
    }
    for (row, label) in CONSTRAINT_MATRIX.iter().zip([
        "phi1x >= phi2x",
        "phi2y >= phi1y",
        "2 phi2x >= phi1x",
        "2 phi2y >= phi1y",
    ]) {
        let lhs: f64 = row.iter().zip(pi).map(|(a, p)| a * p).sum();
        if lhs > tol {
            return Some(format!("constraint {label} violated by {lhs}"));
        }
    }
    None
}

pub fn is_admissible(pi: &[f64; 8]) -> bool {
    admissibility_violation(pi, ADMISSIBLE_TOL).is_none()
}

/// The calibrated parameter vector `Pi`. Construction enforces the admissible
/// set used for calibration (including Feller, `phi_3 >= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 8]", into = "[f64; 8]")]
pub struct ModelParams {
    pub x: FactorPhi,
    pub y: FactorPhi,
    pub x0: f64,
    pub y0: f64,
}

impl ModelParams {
    pub fn new(pi: [f64; 8]) -> Result<Self> {
        if let Some(why) = admissibility_violation(&pi, ADMISSIBLE_TOL) {
            return Err(Error::Validation(format!("inadmissible parameters: {why}")));
        }
        Ok(Self::from_array_unchecked(pi))
    }

    pub(crate) fn from_array_unchecked(pi: [f64; 8]) -> Self {
        Self {
            x: FactorPhi {
                phi1: pi[0],
                phi2: pi[1],
                phi3: pi[2],
            },
            y: FactorPhi {
                phi1: pi[3],
                phi2: pi[4],
                phi3: pi[5],
            },
            x0: pi[6],
            y0: pi[7],
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.x.phi1,
            self.x.phi2,
            self.x.phi3,
            self.y.phi1,
            self.y.phi2,
            self.y.phi3,
            self.x0,
            self.y0,
        ]
    }

    pub fn factor_params(&self) -> Result<(FactorParams, FactorParams)> {
        ksigma_from_phi(self)
    }
}

impl TryFrom<[f64; 8]> for ModelParams {
    type Error = Error;

    fn try_from(pi: [f64; 8]) -> Result<Self> {
        ModelParams::new(pi)
    }
}

impl From<ModelParams> for [f64; 8] {
    fn from(p: ModelParams) -> Self {
        p.to_array()
    }
}

/// `(k, theta, sigma)` of both factors to `Pi`.
pub fn phi_from_ksigma(x: &FactorParams, y: &FactorParams) -> Result<ModelParams> {
    if x.factor != Factor::X || y.factor != Factor::Y {
        return Err(Error::Validation("expected an x-factor and a y-factor".into()));
    }
    let px = x.to_phi()?;
    let py = y.to_phi()?;
    ModelParams::new([px.phi1, px.phi2, px.phi3, py.phi1, py.phi2, py.phi3, x.z0, y.z0])
}

/// `Pi` back to `(k, theta, sigma)`: `k = 2 phi_2 - phi_1`,
/// `sigma = sqrt(+-2 (phi_2 phi_1 - phi_2^2))`, `theta = -+phi_2 phi_3 (phi_1 - phi_2)/(phi_1 - 2 phi_2)`.
pub fn ksigma_from_phi(params: &ModelParams) -> Result<(FactorParams, FactorParams)> {
    Ok((
        params.x.to_params(Factor::X, params.x0)?,
        params.y.to_params(Factor::Y, params.y0)?,
    ))
}

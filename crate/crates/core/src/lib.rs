//! Pricing and calibration engine for the deterministic-shift-extended
//! difference-of-two-CIR short-rate model
//!
//! ```text
//! r(t) = x(t) - y(t) + psi(t),   dz = k_z (theta_z - z) dt + sigma_z sqrt(z) dW_z
//! ```
//!
//! The shift `psi` is never materialized: every price goes through the ratio
//! `P(t,T) = P^M(0,T)/P^M(0,t) * P^-(0,t)/P^-(0,T) * P^-(t,T)` so the market
//! curve is reproduced exactly at `t = 0`.
//!
//! Layout:
//! - [`market_data`]: zero curve (natural cubic spline on continuously compounded
//!   rates), swaption surface, Bachelier conversion.
//! - [`model`]: parameter maps, Riccati closed forms, bond prices, forward rates.
//! - [`gram_charlier`]: Hermite polynomials, moments and cumulants, multi-index
//!   enumeration, bond and swap moments, the truncated expansion.
//! - [`calibration`]: relative-error objective over the admissible polytope,
//!   projected Nelder-Mead with multi-start.
//! - [`simulation`]: truncated Euler paths and Monte Carlo European swaptions.
//! - [`products`]: swaps, CMS par rates, LSMC Bermudan swaptions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod gram_charlier;
pub mod instruments;
pub mod market_data;
pub mod model;
pub mod products;
pub mod simulation;
pub mod stats;

#[cfg(test)]
pub(crate) mod testkit;

pub use error::{Error, Result};
pub use instruments::{Schedule, SwapSpec, SwapType};
pub use market_data::{DiscountCurve, SwaptionQuote, SwaptionSurface};
pub use model::{FactorParams, ModelParams, ShiftedModel};

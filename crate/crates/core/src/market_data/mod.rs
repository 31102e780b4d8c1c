//! Market inputs: the bootstrapped zero curve, the swaption surface, and the
//! Bachelier conversion from normal vols to prices.

mod bachelier;
mod curve;
mod spline;
mod surface;

pub use bachelier::{bachelier_price, market_forward_annuity};
pub use curve::{CurvePoint, DiscountCurve, DISCOUNT_CONSISTENCY_TOL};
pub use spline::NaturalCubicSpline;
pub use surface::{SwaptionQuote, SwaptionSurface};

//! Market zero-coupon curve `P^M(0, .)`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spline::NaturalCubicSpline;
use crate::error::{Error, Result};

/// Largest accepted gap between the stored discount and `exp(-r T)` when loading.
pub const DISCOUNT_CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "maturity_years")]
    pub maturity: f64,
    pub zero_rate: f64,
    pub discount: f64,
}

impl CurvePoint {
    /// Point whose discount is derived from the continuously compounded rate.
    pub fn from_rate(maturity: f64, zero_rate: f64) -> Self {
        Self {
            maturity,
            zero_rate,
            discount: (-zero_rate * maturity).exp(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    points: Vec<CurvePoint>,
}

/// Bootstrapped zero curve with a natural cubic spline on the continuously
/// compounded zero rate. Immutable after construction.
///
/// Below the first knot the first rate is held flat (`P(0,0) = 1` regardless);
/// beyond the last knot every query fails.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountCurve {
    points: Vec<CurvePoint>,
    spline: NaturalCubicSpline,
}

impl DiscountCurve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("curve has no points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.maturity.is_finite() && p.zero_rate.is_finite() && p.discount.is_finite()) {
                return Err(Error::Validation(format!("curve point {i} is not finite")));
            }
            if p.maturity < 0.0 {
                return Err(Error::Validation(format!("curve point {i} has negative maturity")));
            }
            if p.discount <= 0.0 {
                return Err(Error::Validation(format!("curve point {i} has discount <= 0")));
            }
            let implied = (-p.zero_rate * p.maturity).exp();
            if (implied - p.discount).abs() > DISCOUNT_CONSISTENCY_TOL {
                return Err(Error::Validation(format!(
                    "curve point {i} (T = {}): discount {} inconsistent with exp(-{} * T) = {implied}",
                    p.maturity, p.discount, p.zero_rate
                )));
            }
        }
        if points.windows(2).any(|w| w[1].maturity <= w[0].maturity) {
            return Err(Error::Validation("curve maturities must be strictly increasing".into()));
        }
        let spline = NaturalCubicSpline::new(
            points.iter().map(|p| p.maturity).collect(),
            points.iter().map(|p| p.zero_rate).collect(),
        )?;
        Ok(Self { points, spline })
    }

    pub fn from_rates(maturities: &[f64], rates: &[f64]) -> Result<Self> {
        if maturities.len() != rates.len() {
            return Err(Error::Validation("maturities and rates differ in length".into()));
        }
        Self::new(
            maturities
                .iter()
                .zip(rates)
                .map(|(&m, &r)| CurvePoint::from_rate(m, r))
                .collect(),
        )
    }

    /// Loads CSV (`maturity_years,zero_rate,discount`) or, for a `.json`
    /// extension, `{"points": [{"maturity_years": .., "zero_rate": .., "discount": ..}]}`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if is_json(path) {
            Self::from_json_str(&text)
        } else {
            Self::from_csv_str(&text)
        }
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        let expected = ["maturity_years", "zero_rate", "discount"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {}", expected.join(",")),
            });
        }
        let mut points = Vec::new();
        for record in reader.deserialize::<CurvePoint>() {
            let point = record.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                message: e.to_string(),
            })?;
            points.push(point);
        }
        Self::new(points)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: CurveJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        Self::new(parsed.points)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("maturity_years,zero_rate,discount\n");
        for p in &self.points {
            // `{}` on f64 prints the shortest representation that round-trips.
            out.push_str(&format!("{},{},{}\n", p.maturity, p.zero_rate, p.discount));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&CurveJson {
            points: self.points.clone(),
        })
        .expect("curve points serialize")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = if is_json(path) {
            self.to_json_string()
        } else {
            self.to_csv_string()
        };
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn last_maturity(&self) -> f64 {
        self.points.last().unwrap().maturity
    }

    /// Interpolated continuously compounded zero rate `R(t)`.
    pub fn zero_rate(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        let first = self.points[0].maturity;
        if t <= first {
            return Ok(self.points[0].zero_rate);
        }
        Ok(self.spline.eval(t))
    }

    /// `P^M(0,t) = exp(-R(t) t)`; returns the stored discount at knots.
    pub fn discount(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        if t == 0.0 {
            return Ok(1.0);
        }
        if let Ok(i) = self.points.binary_search_by(|p| p.maturity.partial_cmp(&t).unwrap()) {
            return Ok(self.points[i].discount);
        }
        Ok((-self.zero_rate(t)? * t).exp())
    }

    fn check_range(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("curve queried at invalid time {t}")));
        }
        let last = self.last_maturity();
        if t > last {
            return Err(Error::Extrapolation { t, last });
        }
        Ok(())
    }
}

pub(crate) fn is_json(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

//! Swaption quotes on a maturity x tenor grid, one surface per swap type.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bachelier::{bachelier_price, market_forward_annuity};
use super::curve::is_json;
use super::DiscountCurve;
use crate::error::{Error, Result};
use crate::instruments::{Schedule, SwapSpec, SwapType};

const BPS: f64 = 1e-4;
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaptionQuote {
    /// Expiry `T_0` in years.
    pub maturity: f64,
    /// `T_N - T_0` in years, annual payments.
    pub tenor: f64,
    pub strike: f64,
    /// Decimal normal vol (the files carry bps).
    pub normal_vol: f64,
    /// Price per unit notional.
    pub price: f64,
    pub swap_type: SwapType,
}

impl SwaptionQuote {
    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::annual(self.maturity, whole_years(self.tenor)?)
    }

    pub fn swap_spec(&self) -> Result<SwapSpec> {
        Ok(SwapSpec::new(self.schedule()?, self.strike, self.swap_type))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.maturity > 0.0
            && self.tenor > 0.0
            && self.normal_vol >= 0.0
            && self.price >= 0.0
            && self.strike.is_finite()
            && self.price.is_finite();
        if !ok {
            return Err(Error::Validation(format!(
                "invalid swaption quote {}y x {}y (maturity, tenor > 0; vol, price >= 0)",
                self.maturity, self.tenor
            )));
        }
        whole_years(self.tenor).map(|_| ())
    }
}

pub(crate) fn whole_years(tenor: f64) -> Result<usize> {
    let rounded = tenor.round();
    if (tenor - rounded).abs() > GRID_TOL || rounded < 1.0 {
        return Err(Error::Validation(format!(
            "tenor {tenor} is not a positive whole number of years (annual payments)"
        )));
    }
    Ok(rounded as usize)
}

#[derive(Debug, Deserialize, Serialize)]
struct SurfaceRow {
    maturity_years: f64,
    tenor_years: f64,
    strike: f64,
    normal_vol_bps: f64,
    price: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
struct SurfaceJson {
    #[serde(default)]
    swap_type: Option<SwapType>,
    quotes: Vec<SurfaceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwaptionSurface {
    swap_type: SwapType,
    quotes: Vec<SwaptionQuote>,
}

impl SwaptionSurface {
    pub fn new(swap_type: SwapType, mut quotes: Vec<SwaptionQuote>) -> Result<Self> {
        for q in &quotes {
            q.validate()?;
            if q.swap_type != swap_type {
                return Err(Error::Validation("all quotes of a surface must share zeta".into()));
            }
        }
        quotes.sort_by(|a, b| a.maturity.total_cmp(&b.maturity).then(a.tenor.total_cmp(&b.tenor)));
        for w in quotes.windows(2) {
            if (w[0].maturity - w[1].maturity).abs() < GRID_TOL && (w[0].tenor - w[1].tenor).abs() < GRID_TOL {
                return Err(Error::Validation(format!(
                    "duplicate quote {}y x {}y",
                    w[0].maturity, w[0].tenor
                )));
            }
        }
        Ok(Self { swap_type, quotes })
    }

    /// Loads the surface CSV (`maturity_years,tenor_years,strike,normal_vol_bps,price`)
    /// or its JSON form. Empty prices are filled from the vols with the Bachelier
    /// formula on `curve`, which is then required.
    pub fn load(path: impl AsRef<Path>, swap_type: SwapType, curve: Option<&DiscountCurve>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if is_json(path) {
            Self::from_json_str(&text, swap_type, curve)
        } else {
            Self::from_csv_str(&text, swap_type, curve)
        }
    }

    pub fn from_csv_str(text: &str, swap_type: SwapType, curve: Option<&DiscountCurve>) -> Result<Self> {
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
        let expected = ["maturity_years", "tenor_years", "strike", "normal_vol_bps", "price"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {}", expected.join(",")),
            });
        }
        let mut rows = Vec::new();
        for record in reader.deserialize::<SurfaceRow>() {
            rows.push(record.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                message: e.to_string(),
            })?);
        }
        Self::from_rows(rows, swap_type, curve)
    }

    pub fn from_json_str(text: &str, swap_type: SwapType, curve: Option<&DiscountCurve>) -> Result<Self> {
        let parsed: SurfaceJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        if parsed.swap_type.is_some_and(|t| t != swap_type) {
            return Err(Error::Validation(
                "surface file swap type differs from requested".into(),
            ));
        }
        Self::from_rows(parsed.quotes, swap_type, curve)
    }

    fn from_rows(rows: Vec<SurfaceRow>, swap_type: SwapType, curve: Option<&DiscountCurve>) -> Result<Self> {
        let mut quotes = Vec::with_capacity(rows.len());
        for row in rows {
            let normal_vol = row.normal_vol_bps * BPS;
            let price = match row.price {
                Some(p) => p,
                None => {
                    let curve = curve
                        .ok_or_else(|| Error::Validation("surface has empty prices and no curve was given".into()))?;
                    let schedule = Schedule::annual(row.maturity_years, whole_years(row.tenor_years)?)?;
                    let (forward, annuity) = market_forward_annuity(curve, &schedule)?;
                    bachelier_price(forward, row.strike, normal_vol, row.maturity_years, annuity, swap_type)?
                }
            };
            quotes.push(SwaptionQuote {
                maturity: row.maturity_years,
                tenor: row.tenor_years,
                strike: row.strike,
                normal_vol,
                price,
                swap_type,
            });
        }
        Self::new(swap_type, quotes)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("maturity_years,tenor_years,strike,normal_vol_bps,price\n");
        for q in &self.quotes {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                q.maturity,
                q.tenor,
                q.strike,
                q.normal_vol / BPS,
                q.price
            ));
        }
        out
    }

    pub fn swap_type(&self) -> SwapType {
        self.swap_type
    }

    pub fn quotes(&self) -> &[SwaptionQuote] {
        &self.quotes
    }

    pub fn get(&self, maturity: f64, tenor: f64) -> Option<&SwaptionQuote> {
        self.quotes
            .iter()
            .find(|q| (q.maturity - maturity).abs() < GRID_TOL && (q.tenor - tenor).abs() < GRID_TOL)
    }

    pub fn maturities(&self) -> Vec<f64> {
        dedup_sorted(self.quotes.iter().map(|q| q.maturity).collect())
    }

    pub fn tenors(&self) -> Vec<f64> {
        dedup_sorted(self.quotes.iter().map(|q| q.tenor).collect())
    }

    /// Quotes with the given tenor and maturity in `[min_maturity, max_maturity]`.
    pub fn column(&self, tenor: f64, min_maturity: f64, max_maturity: f64) -> Vec<SwaptionQuote> {
        self.quotes
            .iter()
            .filter(|q| {
                (q.tenor - tenor).abs() < GRID_TOL
                    && q.maturity >= min_maturity - GRID_TOL
                    && q.maturity <= max_maturity + GRID_TOL
            })
            .cloned()
            .collect()
    }

    /// Quotes whose underlying swap ends at `end = T_0 + tenor` (co-terminal diagonal).
    pub fn diagonal(&self, end: f64, min_maturity: f64, max_maturity: f64) -> Vec<SwaptionQuote> {
        self.quotes
            .iter()
            .filter(|q| {
                (q.maturity + q.tenor - end).abs() < GRID_TOL
                    && q.maturity >= min_maturity - GRID_TOL
                    && q.maturity <= max_maturity + GRID_TOL
            })
            .cloned()
            .collect()
    }
}

fn dedup_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < GRID_TOL);
    v
}

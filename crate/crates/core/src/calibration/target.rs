use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram_charlier::{DEFAULT_ORDERS, MAX_ORDER};
use crate::instruments::SwapSpec;
use crate::market_data::{SwaptionQuote, SwaptionSurface};
use crate::SwapType;

/// Which slice of the surface to fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TargetSelector {
    /// Fixed tenor, varying maturity.
    Column { tenor: f64 },
    /// Fixed swap end `T_0 + tenor`.
    Diagonal { end: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetConfig {
    pub selector: TargetSelector,
    #[serde(default = "default_min_maturity")]
    pub min_maturity: f64,
    #[serde(default = "default_max_maturity")]
    pub max_maturity: f64,
    /// Leave out the largest maturity of the selection.
    #[serde(default)]
    pub drop_last_maturity: bool,
}

fn default_min_maturity() -> f64 {
    5.0
}

fn default_max_maturity() -> f64 {
    15.0
}

impl TargetConfig {
    pub fn column(tenor: f64) -> Self {
        Self {
            selector: TargetSelector::Column { tenor },
            min_maturity: default_min_maturity(),
            max_maturity: default_max_maturity(),
            drop_last_maturity: false,
        }
    }
}

/// Quotes to fit together with the truncation orders of the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTarget {
    pub quotes: Vec<SwaptionQuote>,
    pub specs: Vec<SwapSpec>,
    pub orders: Vec<usize>,
    pub swap_type: SwapType,
}

impl CalibrationTarget {
    pub fn new(quotes: Vec<SwaptionQuote>, orders: &[usize]) -> Result<Self> {
        let first = quotes
            .first()
            .ok_or_else(|| Error::Validation("calibration target selects no quotes".into()))?;
        let swap_type = first.swap_type;
        let mut orders = if orders.is_empty() {
            DEFAULT_ORDERS.to_vec()
        } else {
            orders.to_vec()
        };
        orders.sort_unstable();
        orders.dedup();
        if let Some(bad) = orders.iter().find(|&&l| !(3..=MAX_ORDER).contains(&l)) {
            return Err(Error::Validation(format!(
                "calibration orders must lie in 3..={MAX_ORDER}, got {bad}"
            )));
        }
        let mut specs = Vec::with_capacity(quotes.len());
        for q in &quotes {
            q.validate()?;
            if !(q.price > 0.0) {
                return Err(Error::Validation(format!(
                    "quote {}x{} has non-positive market price {}",
                    q.maturity, q.tenor, q.price
                )));
            }
            if q.swap_type != swap_type {
                return Err(Error::Validation(
                    "calibration target mixes payer and receiver quotes".into(),
                ));
            }
            specs.push(q.swap_spec()?);
        }
        Ok(Self {
            quotes,
            specs,
            orders,
            swap_type,
        })
    }

    pub fn from_surface(surface: &SwaptionSurface, config: &TargetConfig, orders: &[usize]) -> Result<Self> {
        let (lo, hi) = (config.min_maturity, config.max_maturity);
        let mut quotes = match config.selector {
            TargetSelector::Column { tenor } => surface.column(tenor, lo, hi),
            TargetSelector::Diagonal { end } => surface.diagonal(end, lo, hi),
        };
        if config.drop_last_maturity {
            if let Some(last) = quotes.iter().map(|q| q.maturity).max_by(f64::total_cmp) {
                quotes.retain(|q| q.maturity < last);
            }
        }
        Self::new(quotes, orders)
    }
}

//! Resettlement schedules and swap descriptions shared by every pricer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payer (`zeta = +1`) or receiver (`zeta = -1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwapType {
    Payer,
    Receiver,
}

impl SwapType {
    pub fn zeta(self) -> f64 {
        match self {
            SwapType::Payer => 1.0,
            SwapType::Receiver => -1.0,
        }
    }

    pub fn from_zeta(zeta: i32) -> Result<Self> {
        match zeta {
            1 => Ok(SwapType::Payer),
            -1 => Ok(SwapType::Receiver),
            other => Err(Error::Validation(format!("zeta must be +1 or -1, got {other}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SwapType::Payer => SwapType::Receiver,
            SwapType::Receiver => SwapType::Payer,
        }
    }
}

impl std::fmt::Display for SwapType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SwapType::Payer => f.write_str("payer"),
            SwapType::Receiver => f.write_str("receiver"),
        }
    }
}

impl std::str::FromStr for SwapType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "payer" | "p" | "1" | "+1" => Ok(SwapType::Payer),
            "receiver" | "r" | "-1" => Ok(SwapType::Receiver),
            other => Err(Error::Validation(format!("unknown swap type '{other}'"))),
        }
    }
}

/// Dates `T_0 < T_1 < ... < T_N` with accruals `alpha_i = T_i - T_{i-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    dates: Vec<f64>,
}

impl Schedule {
    pub fn new(dates: Vec<f64>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::Validation(
                "a schedule needs T_0 and at least one payment date".into(),
            ));
        }
        if dates.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Validation("schedule dates must be finite and >= 0".into()));
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("schedule dates must be strictly increasing".into()));
        }
        Ok(Self { dates })
    }

    /// Annual schedule `start, start+1, ..., start+tenor`.
    pub fn annual(start: f64, tenor: usize) -> Result<Self> {
        if tenor == 0 {
            return Err(Error::Validation("tenor must be at least one year".into()));
        }
        Self::new((0..=tenor).map(|i| start + i as f64).collect())
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    pub fn start(&self) -> f64 {
        self.dates[0]
    }

    pub fn end(&self) -> f64 {
        *self.dates.last().unwrap()
    }

    /// Number of payment dates `N`.
    pub fn payments(&self) -> usize {
        self.dates.len() - 1
    }

    /// `alpha_i` for `i = 1..=N`; `alpha(0)` is meaningless and returns 0.
    pub fn alpha(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.dates[i] - self.dates[i - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapSpec {
    pub schedule: Schedule,
    pub strike: f64,
    pub swap_type: SwapType,
}

impl SwapSpec {
    pub fn new(schedule: Schedule, strike: f64, swap_type: SwapType) -> Self {
        Self {
            schedule,
            strike,
            swap_type,
        }
    }

    /// Weights `a_i` with `Swap = sum_i a_i P(t, T_i)`:
    /// `a_0 = zeta`, `a_i = -zeta K alpha_i`, `a_N = -zeta (1 + K alpha_N)`.
    pub fn coefficients(&self) -> Vec<f64> {
        let zeta = self.swap_type.zeta();
        let n = self.schedule.payments();
        (0..=n)
            .map(|i| {
                if i == 0 {
                    zeta
                } else if i == n {
                    -zeta * (1.0 + self.strike * self.schedule.alpha(i))
                } else {
                    -zeta * self.strike * self.schedule.alpha(i)
                }
            })
            .collect()
    }
}

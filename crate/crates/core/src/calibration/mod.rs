//! Calibration of `Pi` to swaption quotes.
//!
//! The objective is the sum over truncation orders and quotes of
//! `(market / GC_L - 1)^2`, minimised over the admissible polytope by a
//! projected Nelder-Mead search started from several points.

mod nelder_mead;
mod objective;
mod target;

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadOutcome};
pub use objective::{
    evaluate_quotes, objective, objective_raw, project_admissible, relative_squared_error, QuoteFit, PENALTY,
};
pub use target::{CalibrationTarget, TargetConfig, TargetSelector};

use crate::error::{Error, Result};
use crate::market_data::DiscountCurve;
use crate::model::{admissibility_violation, ModelParams, ADMISSIBLE_TOL};
use crate::SwapType;

/// Hand-made starting point `I_1`.
pub const I1: [f64; 8] = [0.1, 0.095, 0.3, 0.095, 0.1, 0.3, 0.01, 0.01];

/// `I_2 = I_1 / 2`.
pub const I2: [f64; 8] = [0.05, 0.0475, 0.15, 0.0475, 0.05, 0.15, 0.005, 0.005];

/// Objective values closer than this count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartPoint {
    I1,
    I2,
    Custom([f64; 8]),
}

impl StartPoint {
    pub fn vector(&self) -> [f64; 8] {
        match self {
            StartPoint::I1 => I1,
            StartPoint::I2 => I2,
            StartPoint::Custom(v) => *v,
        }
    }

    pub fn label(&self) -> String {
        match self {
            StartPoint::I1 => "I1".into(),
            StartPoint::I2 => "I2".into(),
            StartPoint::Custom(_) => "custom".into(),
        }
    }
}

impl std::str::FromStr for StartPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i1" => Ok(StartPoint::I1),
            "i2" => Ok(StartPoint::I2),
            _ => {
                let v: Vec<f64> = s
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Validation(format!("start point {s:?}: {e}")))?;
                let arr: [f64; 8] = v
                    .try_into()
                    .map_err(|_| Error::Validation(format!("start point {s:?} needs 8 values")))?;
                Ok(StartPoint::Custom(arr))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationOptions {
    pub starts: Vec<StartPoint>,
    /// Extra starts drawn by log-normal perturbation of the first start.
    pub random_starts: usize,
    pub seed: u64,
    pub optimizer: NelderMeadOptions,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            starts: vec![StartPoint::I1],
            random_starts: 0,
            seed: 0,
            optimizer: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartSummary {
    pub label: String,
    pub initial: [f64; 8],
    pub objective: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub params: ModelParams,
    pub objective: f64,
    pub converged: bool,
    /// Start that produced the winner.
    pub start: String,
    pub iterations: usize,
    /// Objective evaluations summed over all starts.
    pub evaluations: usize,
    pub swap_type: SwapType,
    pub orders: Vec<usize>,
    pub quotes: Vec<QuoteFit>,
    pub starts: Vec<StartSummary>,
    /// Not serialised, so repeated runs produce identical files.
    #[serde(skip)]
    pub wall_time: Duration,
}

fn perturbed_starts(base: &[f64; 8], count: usize, seed: u64) -> Vec<(String, [f64; 8])> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut v = *base;
            for p in v.iter_mut() {
                let u: f64 = rng.random_range(-1.0..1.0);
                *p *= (0.5 * u).exp();
            }
            (format!("perturbed-{i}"), project_admissible(&v))
        })
        .collect()
}

/// Multi-start projected Nelder-Mead. The winner has the lowest objective;
/// ties within `1e-12` go to the smallest `||Pi||_2`.
pub fn calibrate(
    target: &CalibrationTarget,
    curve: &Arc<DiscountCurve>,
    options: &CalibrationOptions,
) -> Result<CalibrationResult> {
    let clock = Instant::now();
    if options.starts.is_empty() && options.random_starts == 0 {
        return Err(Error::Validation("calibration needs at least one start".into()));
    }
    let mut starts: Vec<(String, [f64; 8])> = options.starts.iter().map(|s| (s.label(), s.vector())).collect();
    let base = options.starts.first().map_or(I1, StartPoint::vector);
    starts.extend(perturbed_starts(&base, options.random_starts, options.seed));
    for (label, v) in &starts {
        if v.iter().any(|p| !p.is_finite()) {
            return Err(Error::Validation(format!("start {label} has non-finite entries")));
        }
    }

    let f = |pi: &[f64; 8]| objective_raw(pi, target, curve);
    let runs: Vec<NelderMeadOutcome> = starts
        .par_iter()
        .map(|(_, x0)| nelder_mead(&f, project_admissible(x0), project_admissible, &options.optimizer))
        .collect();

    let norm = |v: &[f64; 8]| v.iter().map(|p| p * p).sum::<f64>().sqrt();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate().skip(1) {
        let cur = &runs[best];
        let better = run.value < cur.value - TIE_TOL
            || ((run.value - cur.value).abs() <= TIE_TOL && norm(&run.x) < norm(&cur.x));
        if better {
            best = i;
        }
    }
    let winner = &runs[best];
    if let Some(v) = admissibility_violation(&winner.x, ADMISSIBLE_TOL) {
        return Err(Error::Validation(format!(
            "optimizer returned an inadmissible point: {v}"
        )));
    }
    let params = ModelParams::new(winner.x)?;
    let summaries = starts
        .iter()
        .zip(&runs)
        .map(|((label, initial), run)| StartSummary {
            label: label.clone(),
            initial: *initial,
            objective: run.value,
            evaluations: run.evaluations,
            iterations: run.iterations,
            converged: run.converged,
        })
        .collect();
    let quotes = evaluate_quotes(&params, target, curve);
    let wall_time = clock.elapsed();
    log::info!(
        "calibration finished: objective {:.6e} from {} after {} evaluations in {:.2?}",
        winner.value,
        starts[best].0,
        runs.iter().map(|r| r.evaluations).sum::<usize>(),
        wall_time
    );
    Ok(CalibrationResult {
        params,
        objective: winner.value,
        converged: winner.converged,
        start: starts[best].0.clone(),
        iterations: winner.iterations,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        swap_type: target.swap_type,
        orders: target.orders.clone(),
        quotes,
        starts: summaries,
        wall_time,
    })
}

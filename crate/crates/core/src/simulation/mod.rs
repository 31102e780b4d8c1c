//! Truncated Euler simulation of the two CIR factors with pathwise discounting.
//!
//! ```text
//! z_{i+1} = z_i + k (theta - z_i) dt + sigma sqrt(max(z_i, 0)) sqrt(dt) xi
//! ```
//!
//! Negative states stay in the drift; only the diffusion is truncated. The
//! discount `exp(-int (x - y) ds)` is accumulated with the trapezoid rule and
//! the shift enters through the curve ratio `P^M(0,T)/P^-(0,T)` at readout.
//!
//! Path `i` draws from ChaCha8 with stream `i` of the configured seed, so a
//! path is a pure function of `(seed, i)` and the result does not depend on
//! the rayon pool size.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instruments::SwapSpec;
use crate::model::{AffineBonds, FactorParams, ShiftedModel};
use crate::stats::{norm_inv, Estimate};

/// Relative tolerance for matching a time onto the grid.
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    /// Number of paths `M`.
    pub paths: usize,
    /// Grid steps per year, `1 / dt`.
    pub steps_per_year: u32,
    /// Simulation horizon in years; must be a whole number of steps.
    pub horizon: f64,
    pub seed: u64,
    /// Times at which states and discounts are kept. Empty keeps every
    /// whole year up to the horizon. Always includes 0 and the horizon.
    pub observe: Vec<f64>,
    /// Keep every grid point (debug scale only: `M x K` per factor).
    pub record_all: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            paths: 10_000,
            steps_per_year: 256,
            horizon: 1.0,
            seed: 0,
            observe: Vec::new(),
            record_all: false,
        }
    }
}

impl SimulationConfig {
    pub fn new(paths: usize, steps_per_year: u32, horizon: f64, seed: u64) -> Self {
        Self {
            paths,
            steps_per_year,
            horizon,
            seed,
            ..Self::default()
        }
    }

    pub fn with_observations(mut self, times: impl IntoIterator<Item = f64>) -> Self {
        self.observe.extend(times);
        self
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.steps_per_year as f64
    }

    /// Step index of `t`, if `t` lies on the grid.
    pub fn grid_index(&self, t: f64) -> Option<usize> {
        let steps = t * self.steps_per_year as f64;
        let rounded = steps.round();
        ((steps - rounded).abs() <= GRID_TOL * steps.abs().max(1.0) && rounded >= 0.0).then_some(rounded as usize)
    }

    fn validate(&self) -> Result<usize> {
        if self.paths == 0 {
            return Err(Error::Validation("need at least one path".into()));
        }
        if self.steps_per_year == 0 {
            return Err(Error::Validation("steps per year must be positive".into()));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::Validation(format!("invalid horizon {}", self.horizon)));
        }
        self.grid_index(self.horizon).ok_or_else(|| {
            Error::Validation(format!(
                "horizon {} is not a whole number of steps of 1/{}",
                self.horizon, self.steps_per_year
            ))
        })
    }

    /// Sorted, de-duplicated grid indices to record.
    fn observation_steps(&self, total: usize) -> Result<Vec<usize>> {
        if self.record_all {
            return Ok((0..=total).collect());
        }
        let mut steps = vec![0, total];
        if self.observe.is_empty() {
            let years = (self.horizon.floor() as usize).min(total);
            steps.extend((1..=years).filter_map(|y| self.grid_index(y as f64)));
        }
        for &t in &self.observe {
            let idx = self.grid_index(t).ok_or(Error::OffGrid { t })?;
            if idx > total {
                return Err(Error::Horizon {
                    horizon: self.horizon,
                    required: t,
                });
            }
            steps.push(idx);
        }
        steps.sort_unstable();
        steps.dedup();
        Ok(steps)
    }
}

/// Recorded factor states and non-shifted discounts, stored time-major:
/// `x[j][i]` is path `i` at the `j`-th observed time.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    config: SimulationConfig,
    times: Vec<f64>,
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    discount: Vec<Vec<f64>>,
}

impl PathSet {
    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn paths(&self) -> usize {
        self.config.paths
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.config.horizon
    }

    /// Index into [`PathSet::times`] for `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        if t > self.config.horizon * (1.0 + GRID_TOL) {
            return Err(Error::Horizon {
                horizon: self.config.horizon,
                required: t,
            });
        }
        let step = self.config.grid_index(t).ok_or(Error::OffGrid { t })?;
        self.times
            .iter()
            .position(|&s| self.config.grid_index(s) == Some(step))
            .ok_or(Error::OffGrid { t })
    }

    pub fn x(&self, obs: usize) -> &[f64] {
        &self.x[obs]
    }

    pub fn y(&self, obs: usize) -> &[f64] {
        &self.y[obs]
    }

    /// `exp(-int_0^t (x - y) ds)` per path, without the shift.
    pub fn discount_minus(&self, obs: usize) -> &[f64] {
        &self.discount[obs]
    }

    /// Shifted pathwise discount `exp(-int_0^t r ds)` per path.
    pub fn discount(&self, model: &ShiftedModel, obs: usize) -> Result<Vec<f64>> {
        let shift = model.shift_factor(0.0, self.times[obs])?;
        Ok(self.discount[obs].iter().map(|d| d * shift).collect())
    }

    /// Writes `x.csv`, `y.csv` and `discount.csv` (one row per path, one
    /// column per observed time) into `dir`.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, data) in [("x.csv", &self.x), ("y.csv", &self.y), ("discount.csv", &self.discount)] {
            let path = dir.join(name);
            let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = std::io::BufWriter::new(file);
            let header: Vec<String> = self.times.iter().map(|t| format!("t={t}")).collect();
            writeln!(w, "path,{}", header.join(",")).map_err(|e| Error::io(&path, e))?;
            for i in 0..self.config.paths {
                let row: Vec<String> = data.iter().map(|col| format!("{:e}", col[i])).collect();
                writeln!(w, "{i},{}", row.join(",")).map_err(|e| Error::io(&path, e))?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Standard normal from an open-interval uniform via the inverse CDF.
#[inline]
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let bits = rng.random::<u64>() >> 11;
    norm_inv((bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64))
}

/// Simulates the factors of `model`.
pub fn simulate(model: &ShiftedModel, config: &SimulationConfig) -> Result<PathSet> {
    let (x, y) = model.params.factor_params()?;
    simulate_factors(&x, &y, config)
}

/// Simulates two factors given directly by `(k, theta, sigma, z0)`; allows
/// `sigma = 0`, which has no `phi` representation.
pub fn simulate_factors(x: &FactorParams, y: &FactorParams, config: &SimulationConfig) -> Result<PathSet> {
    let total = config.validate()?;
    let steps = config.observation_steps(total)?;
    let dt = config.dt();
    let sqrt_dt = dt.sqrt();
    let n_obs = steps.len();

    let simulate_path = |path: usize| -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(path as u64);
        let mut out = Vec::with_capacity(3 * n_obs);
        let (mut xs, mut ys, mut integral) = (x.z0, y.z0, 0.0_f64);
        let mut next = 0;
        for step in 0..=total {
            if next < n_obs && steps[next] == step {
                out.extend([xs, ys, (-integral).exp()]);
                next += 1;
            }
            if step == total {
                break;
            }
            let (zx, zy) = (normal(&mut rng), normal(&mut rng));
            let xn = xs + x.k * (x.theta - xs) * dt + x.sigma * xs.max(0.0).sqrt() * sqrt_dt * zx;
            let yn = ys + y.k * (y.theta - ys) * dt + y.sigma * ys.max(0.0).sqrt() * sqrt_dt * zy;
            integral += 0.5 * dt * ((xs - ys) + (xn - yn));
            xs = xn;
            ys = yn;
        }
        out
    };

    let rows: Vec<Vec<f64>> = (0..config.paths).into_par_iter().map(simulate_path).collect();
    let mut xo = vec![Vec::with_capacity(config.paths); n_obs];
    let mut yo = vec![Vec::with_capacity(config.paths); n_obs];
    let mut dob = vec![Vec::with_capacity(config.paths); n_obs];
    for row in &rows {
        for j in 0..n_obs {
            xo[j].push(row[3 * j]);
            yo[j].push(row[3 * j + 1]);
            dob[j].push(row[3 * j + 2]);
        }
    }
    Ok(PathSet {
        config: config.clone(),
        times: steps.iter().map(|&s| s as f64 * dt).collect(),
        x: xo,
        y: yo,
        discount: dob,
    })
}

/// Monte Carlo zero-coupon bond `P(0, T)`; `T` must be an observed time.
pub fn mc_zcb(paths: &PathSet, model: &ShiftedModel, maturity: f64) -> Result<Estimate> {
    let obs = paths.index_of(maturity)?;
    Ok(Estimate::from_samples(&paths.discount(model, obs)?))
}

/// Par rate and annuity `(R, S)` of a swap from precomputed bonds over its
/// dates `T_0..T_N` at state `(x, y)`.
#[inline]
pub(crate) fn par_and_annuity(bonds: &AffineBonds, alphas: &[f64], x: f64, y: f64) -> (f64, f64) {
    let n = bonds.len() - 1;
    let mut annuity = 0.0;
    for (j, alpha) in alphas.iter().enumerate() {
        annuity += alpha * bonds.price(j + 1, x, y);
    }
    let rate = (bonds.price(0, x, y) - bonds.price(n, x, y)) / annuity;
    (rate, annuity)
}

/// Accruals `alpha_1..alpha_N` of a swap.
pub(crate) fn accruals(spec: &SwapSpec) -> Vec<f64> {
    (1..=spec.schedule.payments()).map(|i| spec.schedule.alpha(i)).collect()
}

/// Per-path discounted payoffs `D(T_0) (zeta (R - K))^+ S` of a European swaption.
pub fn swaption_samples(paths: &PathSet, model: &ShiftedModel, spec: &SwapSpec) -> Result<Vec<f64>> {
    let t0 = spec.schedule.start();
    let obs = paths.index_of(t0)?;
    let bonds = AffineBonds::new(model, t0, spec.schedule.dates())?;
    let alphas = accruals(spec);
    let zeta = spec.swap_type.zeta();
    let discount = paths.discount(model, obs)?;
    Ok((0..paths.paths())
        .map(|i| {
            let (rate, annuity) = par_and_annuity(&bonds, &alphas, paths.x(obs)[i], paths.y(obs)[i]);
            discount[i] * (annuity * (zeta * (rate - spec.strike)).max(0.0))
        })
        .collect())
}

/// Monte Carlo European swaption price with standard error.
pub fn mc_swaption(paths: &PathSet, model: &ShiftedModel, spec: &SwapSpec) -> Result<Estimate> {
    Ok(Estimate::from_samples(&swaption_samples(paths, model, spec)?))
}

use rayon::prelude::*;

use super::cumulants::MAX_ORDER;
use super::multiindex::{multiindex_count, MultiIndex, FACTORIAL};
use crate::error::{Error, Result};
use crate::instruments::{Schedule, SwapSpec};
use crate::model::{FactorPhi, ModelParams, ShiftedModel};
use crate::stats::KahanSum;

/// Problems with more multi-indices than this are summed on the rayon pool.
const PARALLEL_THRESHOLD: u64 = 4096;

/// `(M_z(t,T_0), N_z(t,T_0))` for terminal values `(a, b)` at `T_0`.
pub fn riccati_terminal(phi: &FactorPhi, a: f64, b: f64, t: f64, t0: f64) -> Result<(f64, f64)> {
    if t > t0 {
        return Err(Error::Domain(format!("t = {t} after T_0 = {t0}")));
    }
    phi.riccati_terminal(a, b, t0 - t)
}

/// Weights `a_i P^M(0,T_i) / P^-(0,T_i)`, the swap coefficients moved onto
/// the non-shifted bonds.
pub fn swap_coefficients(model: &ShiftedModel, spec: &SwapSpec) -> Result<Vec<f64>> {
    spec.coefficients()
        .into_iter()
        .zip(spec.schedule.dates())
        .map(|(a, &date)| Ok(a * model.market_to_model(date)?))
        .collect()
}

/// Per payment date: `ln A_z(T_0,T_j)`, `B_z(T_0,T_j)` and the swap weight.
#[derive(Debug, Clone, Copy)]
struct Slot {
    log_ax: f64,
    bx: f64,
    log_ay: f64,
    by: f64,
    coef: f64,
}

#[derive(Debug, Clone, Copy)]
struct Acc {
    log_ax: f64,
    bx: f64,
    log_ay: f64,
    by: f64,
    coef: f64,
    denom: u64,
}

impl Acc {
    const EMPTY: Acc = Acc {
        log_ax: 0.0,
        bx: 0.0,
        log_ay: 0.0,
        by: 0.0,
        coef: 1.0,
        denom: 1,
    };

    fn with(mut self, slot: &Slot, k: usize) -> Acc {
        if k > 0 {
            let kf = k as f64;
            self.log_ax += kf * slot.log_ax;
            self.bx += kf * slot.bx;
            self.log_ay += kf * slot.log_ay;
            self.by += kf * slot.by;
            self.coef *= slot.coef.powi(k as i32);
            self.denom *= FACTORIAL[k];
        }
        self
    }
}

/// Everything a leaf evaluation needs besides the accumulated terminals.
struct Context<'a> {
    params: &'a ModelParams,
    x: f64,
    y: f64,
    tau: f64,
    log_p0: f64,
    slots: Vec<Slot>,
}

impl Context<'_> {
    fn new<'a>(
        params: &'a ModelParams,
        schedule: &Schedule,
        coefs: &[f64],
        (x, y): (f64, f64),
        t: f64,
    ) -> Result<Context<'a>> {
        let t0 = schedule.start();
        if t > t0 {
            return Err(Error::Domain(format!("t = {t} after T_0 = {t0}")));
        }
        let slots = schedule
            .dates()
            .iter()
            .zip(coefs)
            .map(|(&date, &coef)| {
                let (log_ax, bx) = params.x.bond_log_ab(date - t0);
                let (log_ay, by) = params.y.bond_log_ab(date - t0);
                Slot {
                    log_ax,
                    bx,
                    log_ay,
                    by,
                    coef,
                }
            })
            .collect();
        let tau = t0 - t;
        let (lax, bx) = params.x.bond_log_ab(tau);
        let (lay, by) = params.y.bond_log_ab(tau);
        Ok(Context {
            params,
            x,
            y,
            tau,
            log_p0: lax - bx * x + lay + by * y,
            slots,
        })
    }

    /// `E^{T_0}[prod_j P^-(T_0,T_j)^{k_j} | x, y]` for the accumulated terminals.
    fn bond_moment(&self, acc: &Acc) -> Result<f64> {
        let (lmx, nx) = self.params.x.riccati_terminal_from_log(acc.log_ax, acc.bx, self.tau)?;
        let (lmy, ny) = self.params.y.riccati_terminal_from_log(acc.log_ay, acc.by, self.tau)?;
        Ok((lmx - nx * self.x + lmy + ny * self.y - self.log_p0).exp())
    }

    fn dfs(&self, slot: usize, remaining: usize, acc: Acc, m: usize, sum: &mut KahanSum) -> Result<()> {
        let last = self.slots.len() - 1;
        if slot == last {
            let acc = acc.with(&self.slots[last], remaining);
            let multiplicity = (FACTORIAL[m] / acc.denom) as f64;
            sum.add(multiplicity * acc.coef * self.bond_moment(&acc)?);
            return Ok(());
        }
        for k in (0..=remaining).rev() {
            self.dfs(slot + 1, remaining - k, acc.with(&self.slots[slot], k), m, sum)?;
        }
        Ok(())
    }

    /// `sum_k m!/prod k_j! prod coef_j^{k_j} E^{T_0}[prod P^-(T_0,T_j)^{k_j}]`.
    ///
    /// The enumeration is split on the first two exponents; each branch is
    /// summed on its own and the branch totals are added in a fixed order,
    /// so the result does not depend on the thread count.
    fn multinomial_sum(&self, m: usize) -> Result<f64> {
        let prefix_len = (self.slots.len() - 1).min(2);
        // (partial accumulator, exponents already placed)
        let mut branches = Vec::new();
        for k0 in (0..=m).rev() {
            let acc = Acc::EMPTY.with(&self.slots[0], k0);
            if prefix_len == 1 {
                branches.push((acc, k0));
            } else {
                for k1 in (0..=m - k0).rev() {
                    branches.push((acc.with(&self.slots[1], k1), k0 + k1));
                }
            }
        }
        let run = |&(acc, placed): &(Acc, usize)| -> Result<f64> {
            let mut sum = KahanSum::new();
            self.dfs(prefix_len, m - placed, acc, m, &mut sum)?;
            Ok(sum.total())
        };
        let totals: Vec<f64> = if multiindex_count(m, self.slots.len() - 1) > PARALLEL_THRESHOLD {
            branches.par_iter().map(run).collect::<Result<_>>()?
        } else {
            branches.iter().map(run).collect::<Result<_>>()?
        };
        Ok(totals.into_iter().collect::<KahanSum>().total())
    }
}

/// Bond moment `E^{Q^{T_0}}[prod_j P^-(T_0,T_j)^{k_j} | F_t]` at state `(x, y)`.
pub fn bond_moment(
    model: &ShiftedModel,
    index: &MultiIndex,
    state: (f64, f64),
    t: f64,
    schedule: &Schedule,
) -> Result<f64> {
    if index.k.len() != schedule.dates().len() {
        return Err(Error::Validation(format!(
            "multi-index has {} slots, schedule has {} dates",
            index.k.len(),
            schedule.dates().len()
        )));
    }
    let ones = vec![1.0; index.k.len()];
    let ctx = Context::new(&model.params, schedule, &ones, state, t)?;
    let acc = index
        .k
        .iter()
        .zip(&ctx.slots)
        .fold(Acc::EMPTY, |acc, (&k, slot)| acc.with(slot, k as usize));
    ctx.bond_moment(&acc)
}

/// Swap moments `M^1..M^L` under the `T_0`-forward measure at state `(x, y)`.
pub fn swap_moments(
    model: &ShiftedModel,
    spec: &SwapSpec,
    t: f64,
    state: (f64, f64),
    max_order: usize,
) -> Result<Vec<f64>> {
    if max_order == 0 || max_order > MAX_ORDER {
        return Err(Error::Validation(format!(
            "moment order must be in 1..={MAX_ORDER}, got {max_order}"
        )));
    }
    let coefs = swap_coefficients(model, spec)?;
    let ctx = Context::new(&model.params, &spec.schedule, &coefs, state, t)?;
    let scale = 1.0 / model.market_to_model(spec.schedule.start())?;
    (1..=max_order)
        .map(|m| Ok(scale.powi(m as i32) * ctx.multinomial_sum(m)?))
        .collect()
}

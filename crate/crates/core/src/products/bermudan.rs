use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AffineBonds, ShiftedModel};
use crate::simulation::{par_and_annuity, PathSet};
use crate::stats::{Estimate, KahanSum};
use crate::SwapType;

/// Exercise payoff used for Bermudans: `S (zeta (K - R))^+`. With this sign
/// `zeta = +1` pays off when rates fall (a market receiver) and `zeta = -1`
/// is the market payer.
pub const PAYOFF_CONVENTION: &str =
    "exercise value S*(zeta*(K-R))^+; zeta=+1 (\"payer\" label) is a market receiver, zeta=-1 a market payer";

/// `T_N`-no-call-`T_0` Bermudan with annual exercise dates `T_0..T_{N-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BermudanSpec {
    pub first_exercise: f64,
    pub tenor: usize,
    pub strike: f64,
    pub swap_type: SwapType,
}

impl BermudanSpec {
    pub fn new(first_exercise: f64, tenor: usize, strike: f64, swap_type: SwapType) -> Result<Self> {
        if tenor == 0 {
            return Err(Error::Validation("Bermudan tenor must be at least one year".into()));
        }
        if !(first_exercise >= 0.0) || !first_exercise.is_finite() || !strike.is_finite() {
            return Err(Error::Validation(format!(
                "invalid Bermudan: first exercise {first_exercise}, strike {strike}"
            )));
        }
        Ok(Self {
            first_exercise,
            tenor,
            strike,
            swap_type,
        })
    }

    /// Payment grid `T_0..T_N`.
    pub fn dates(&self) -> Vec<f64> {
        (0..=self.tenor).map(|i| self.first_exercise + i as f64).collect()
    }

    /// Exercise dates `T_0..T_{N-1}`.
    pub fn exercise_dates(&self) -> Vec<f64> {
        let mut d = self.dates();
        d.pop();
        d
    }
}

/// Polynomial basis `(1, z, ..., z^d)` in the standardised par rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionBasis {
    pub degree: usize,
}

impl RegressionBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Validation("regression degree must be at least 1".into()));
        }
        Ok(Self { degree })
    }

    pub fn eval(&self, z: f64) -> impl Iterator<Item = f64> {
        let mut p = 1.0;
        (0..=self.degree).map(move |_| {
            let v = p;
            p *= z;
            v
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LsmcOptions {
    pub basis: RegressionBasis,
    /// Regress on every path instead of in-the-money paths only.
    pub regress_all: bool,
}

impl Default for LsmcOptions {
    fn default() -> Self {
        Self {
            basis: RegressionBasis { degree: 3 },
            regress_all: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BermudanResult {
    pub spec: BermudanSpec,
    pub price: Estimate,
    pub options: LsmcOptions,
    /// Exercise dates where the normal equations were singular and the
    /// minimum-norm pseudo-inverse solution was used.
    pub rank_deficient_dates: Vec<f64>,
    pub convention: &'static str,
}

/// Least-squares fit of `y` on the basis; returns fitted values and whether
/// the pseudo-inverse fallback was needed.
fn regress(basis: &RegressionBasis, z: &[f64], y: &[f64]) -> (Vec<f64>, bool) {
    let p = basis.degree + 1;
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut row = vec![0.0; p];
    for (&zi, &yi) in z.iter().zip(y) {
        for (r, v) in row.iter_mut().zip(basis.eval(zi)) {
            *r = v;
        }
        for a in 0..p {
            rhs[a] += row[a] * yi;
            for b in 0..p {
                gram[(a, b)] += row[a] * row[b];
            }
        }
    }
    let svd = gram.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let eps = 1e-12 * max_sv.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let deficient = rank < p;
    let coef = if deficient {
        svd.solve(&rhs, eps).unwrap_or_else(|_| DVector::zeros(p))
    } else {
        gram.cholesky()
            .map(|c| c.solve(&rhs))
            .unwrap_or_else(|| svd.solve(&rhs, eps).unwrap_or_else(|_| DVector::zeros(p)))
    };
    let fitted = z
        .iter()
        .map(|&zi| basis.eval(zi).zip(coef.iter()).map(|(b, c)| b * c).sum())
        .collect();
    (fitted, deficient)
}

/// Bermudan price by least-squares Monte Carlo backward induction.
///
/// At each exercise date the continuation value is regressed on the chosen
/// paths and the value becomes `max(exercise, continuation)`; paths outside
/// the regression set carry their realised discounted value.
pub fn lsmc_bermudan(
    model: &ShiftedModel,
    paths: &PathSet,
    spec: &BermudanSpec,
    options: &LsmcOptions,
) -> Result<BermudanResult> {
    let spec = BermudanSpec::new(spec.first_exercise, spec.tenor, spec.strike, spec.swap_type)?;
    let basis = RegressionBasis::new(options.basis.degree)?;
    let dates = spec.dates();
    let n = spec.tenor;
    let m = paths.paths();
    let zeta = spec.swap_type.zeta();

    // per exercise date: shifted discounts, exercise values, par rates
    let mut discount = Vec::with_capacity(n);
    let mut exercise = Vec::with_capacity(n);
    let mut rates = Vec::with_capacity(n);
    for i in 0..n {
        let obs = paths.index_of(dates[i])?;
        let bonds = AffineBonds::new(model, dates[i], &dates[i..])?;
        let alphas: Vec<f64> = dates[i + 1..].iter().zip(&dates[i..]).map(|(b, a)| b - a).collect();
        let (xs, ys) = (paths.x(obs), paths.y(obs));
        let mut ex = Vec::with_capacity(m);
        let mut rr = Vec::with_capacity(m);
        for p in 0..m {
            let (rate, annuity) = par_and_annuity(&bonds, &alphas, xs[p], ys[p]);
            ex.push(annuity * (zeta * (spec.strike - rate)).max(0.0));
            rr.push(rate);
        }
        discount.push(paths.discount(model, obs)?);
        exercise.push(ex);
        rates.push(rr);
    }

    let mut value = exercise[n - 1].clone();
    let mut rank_deficient_dates = Vec::new();
    for i in (0..n - 1).rev() {
        let realised: Vec<f64> = (0..m)
            .map(|p| value[p] * (discount[i + 1][p] / discount[i][p]))
            .collect();
        let chosen: Vec<usize> = (0..m)
            .filter(|&p| options.regress_all || exercise[i][p] > 0.0)
            .collect();
        value = realised.clone();
        if !chosen.is_empty() {
            let r: Vec<f64> = chosen.iter().map(|&p| rates[i][p]).collect();
            let mean = r.iter().copied().collect::<KahanSum>().total() / r.len() as f64;
            let var = r.iter().map(|v| (v - mean).powi(2)).collect::<KahanSum>().total() / r.len() as f64;
            let sd = var.sqrt();
            let z: Vec<f64> = r
                .iter()
                .map(|v| {
                    if sd > 0.0 && sd.is_finite() {
                        (v - mean) / sd
                    } else {
                        0.0
                    }
                })
                .collect();
            let y: Vec<f64> = chosen.iter().map(|&p| realised[p]).collect();
            let (fitted, deficient) = regress(&basis, &z, &y);
            if deficient {
                rank_deficient_dates.push(dates[i]);
            }
            for (k, &p) in chosen.iter().enumerate() {
                value[p] = exercise[i][p].max(fitted[k]);
            }
        }
        for p in 0..m {
            assert!(
                value[p] >= exercise[i][p],
                "backward induction value below exercise value"
            );
        }
    }
    let samples: Vec<f64> = (0..m).map(|p| discount[0][p] * value[p]).collect();
    Ok(BermudanResult {
        spec,
        price: Estimate::from_samples(&samples),
        options: LsmcOptions {
            basis,
            regress_all: options.regress_all,
        },
        rank_deficient_dates,
        convention: PAYOFF_CONVENTION,
    })
}

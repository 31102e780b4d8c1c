//! Test-only oracles, independent of the production code paths.

use crate::model::{Factor, FactorParams};

/// Gauss-Hermite nodes and weights for `int f(x) exp(-x^2) dx`, found by Newton
/// iteration on the physicists' Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `E[f(Z)]` for a standard normal `Z` by `n`-point Gauss-Hermite quadrature.
pub fn normal_expectation(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_hermite(n);
    let sqrt2 = std::f64::consts::SQRT_2;
    x.iter().zip(&w).map(|(xi, wi)| wi * f(sqrt2 * xi)).sum::<f64>() / std::f64::consts::PI.sqrt()
}

/// Residuals of the constant-coefficient Riccati system
/// (`lambda = -k`, `eta = k theta`, `gamma = sigma^2`, `delta = 0`) for a candidate
/// `t -> (ln A(t), B(t))`, with central differences of step `h` in `t`.
///
/// x: `-1 + k B - d_t B + sigma^2 B^2 / 2 = 0`, `-k theta B + d_t ln A = 0`
/// y: `1 - k B + d_t B + sigma^2 B^2 / 2 = 0`, `k theta B + d_t ln A = 0`
pub fn riccati_residuals(p: &FactorParams, f: impl Fn(f64) -> (f64, f64), t: f64, h: f64) -> (f64, f64) {
    let (la_p, b_p) = f(t + h);
    let (la_m, b_m) = f(t - h);
    let (_, b) = f(t);
    let db = (b_p - b_m) / (2.0 * h);
    let dla = (la_p - la_m) / (2.0 * h);
    let (k, kt, s2) = (p.k, p.k * p.theta, p.sigma * p.sigma);
    match p.factor {
        Factor::X => (-1.0 + k * b - db + 0.5 * s2 * b * b, -kt * b + dla),
        Factor::Y => (1.0 - k * b + db + 0.5 * s2 * b * b, kt * b + dla),
    }
}

/// Deterministic stream of admissible factor parameters (Feller holds, and
/// `k_y^2 >= 2 sigma_y^2` for the y-factor).
pub fn random_factor(rng: &mut impl rand::Rng, factor: Factor) -> FactorParams {
    let k = rng.random_range(0.02..1.2);
    let sigma_cap = match factor {
        Factor::X => 0.3,
        Factor::Y => (k / std::f64::consts::SQRT_2 * 0.999).min(0.3),
    };
    let sigma = rng.random_range(0.005..sigma_cap);
    let theta_min = sigma * sigma / (2.0 * k);
    let theta = theta_min * rng.random_range(1.0..4.0) + rng.random_range(0.0..0.03);
    let z0 = rng.random_range(0.0..0.05);
    FactorParams::new(factor, k, theta, sigma, z0)
}

pub const TABLE2_TENOR5: [f64; 8] = [0.109, 0.0846, 1.99, 0.584, 0.597, 1.26, 0.00017, 0.0021];
pub const TABLE2_TENOR1: [f64; 8] = [0.082, 0.0477, 1.05, 0.155, 0.165, 1.33, 0.000126, 0.000128];

/// Small EUR-like curve with negative short rates.
pub fn eur_curve() -> std::sync::Arc<crate::market_data::DiscountCurve> {
    std::sync::Arc::new(
        crate::market_data::DiscountCurve::from_rates(
            &[0.25, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0],
            &[
                -0.0039, -0.0031, -0.0028, -0.0024, -0.0013, 0.0001, 0.0018, 0.0036, 0.0043, 0.004,
            ],
        )
        .unwrap(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_reproduces_gaussian_moments() {
        assert!((normal_expectation(64, |_| 1.0) - 1.0).abs() < 1e-13);
        assert!((normal_expectation(64, |z| z * z) - 1.0).abs() < 1e-12);
        assert!((normal_expectation(64, |z| z.powi(4)) - 3.0).abs() < 1e-11);
        assert!((normal_expectation(64, |z| z.powi(6)) - 15.0).abs() < 1e-10);
    }
}

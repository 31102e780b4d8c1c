use crate::error::{Error, Result};

/// Highest moment / cumulant / expansion order supported.
pub const MAX_ORDER: usize = 7;

/// Cumulants `c_1..c_L` from raw moments `mu_1..mu_L` (`mu[0]` is `mu_1`).
pub fn cumulants_from_moments(mu: &[f64]) -> Result<Vec<f64>> {
    if mu.len() > MAX_ORDER {
        return Err(Error::Validation(format!(
            "at most {MAX_ORDER} moments supported, got {}",
            mu.len()
        )));
    }
    let m = |i: usize| mu[i - 1];
    let mut c = Vec::with_capacity(mu.len());
    let len = mu.len();
    if len >= 1 {
        c.push(m(1));
    }
    if len >= 2 {
        c.push(m(2) - m(1).powi(2));
    }
    if len >= 3 {
        c.push(2.0 * m(1).powi(3) - 3.0 * m(2) * m(1) + m(3));
    }
    if len >= 4 {
        c.push(-6.0 * m(1).powi(4) + 12.0 * m(2) * m(1).powi(2) - 4.0 * m(3) * m(1) - 3.0 * m(2).powi(2) + m(4));
    }
    if len >= 5 {
        c.push(
            24.0 * m(1).powi(5) - 60.0 * m(2) * m(1).powi(3) + 20.0 * m(3) * m(1).powi(2) + 30.0 * m(2).powi(2) * m(1)
                - 5.0 * m(4) * m(1)
                - 10.0 * m(2) * m(3)
                + m(5),
        );
    }
    if len >= 6 {
        c.push(
            -120.0 * m(1).powi(6) + 360.0 * m(2) * m(1).powi(4)
                - 120.0 * m(3) * m(1).powi(3)
                - 270.0 * m(2).powi(2) * m(1).powi(2)
                + 30.0 * m(4) * m(1).powi(2)
                + 120.0 * m(2) * m(3) * m(1)
                - 6.0 * m(5) * m(1)
                + 30.0 * m(2).powi(3)
                - 10.0 * m(3).powi(2)
                - 15.0 * m(2) * m(4)
                + m(6),
        );
    }
    if len >= 7 {
        c.push(
            720.0 * m(1).powi(7) - 2520.0 * m(2) * m(1).powi(5)
                + 840.0 * m(3) * m(1).powi(4)
                + 2520.0 * m(2).powi(2) * m(1).powi(3)
                - 210.0 * m(4) * m(1).powi(3)
                - 1260.0 * m(2) * m(3) * m(1).powi(2)
                + 42.0 * m(5) * m(1).powi(2)
                - 630.0 * m(2).powi(3) * m(1)
                + 140.0 * m(3).powi(2) * m(1)
                + 210.0 * m(2) * m(4) * m(1)
                - 7.0 * m(6) * m(1)
                + 210.0 * m(2).powi(2) * m(3)
                - 35.0 * m(3) * m(4)
                - 21.0 * m(2) * m(5)
                + m(7),
        );
    }
    Ok(c)
}

/// Expansion coefficients `q_0..q_L` from cumulants `c_1..c_L` (`c[0]` is `c_1`):
/// `q_0 = 1`, `q_1 = q_2 = 0` and for `n >= 3` the sum over compositions
/// `k_1 + ... + k_m = n` with parts `>= 3` of `prod c_{k_i} / (m! prod k_i!) c_2^{-n/2}`.
pub fn expansion_coefficients(c: &[f64]) -> Result<Vec<f64>> {
    if c.len() < 2 {
        return Err(Error::Validation("expansion needs at least c_1 and c_2".into()));
    }
    if c.len() > MAX_ORDER {
        return Err(Error::Validation(format!("expansion order above {MAX_ORDER}")));
    }
    let c2 = c[1];
    if !(c2 > 0.0) {
        return Err(Error::ExpansionUndefined { c2 });
    }
    let max = c.len();
    // standardised cumulants c_k / c_2^{k/2}
    let kappa: Vec<f64> = (0..=max)
        .map(|k| if k < 3 { 0.0 } else { c[k - 1] / c2.powf(k as f64 / 2.0) })
        .collect();
    let mut q = vec![0.0; max + 1];
    q[0] = 1.0;
    for (n, qn) in q.iter_mut().enumerate().skip(3) {
        let mut sum = 0.0;
        compositions(n, &mut Vec::new(), &mut |parts| {
            let m = parts.len();
            let mut term = 1.0 / factorial(m);
            for &k in parts {
                term *= kappa[k] / factorial(k);
            }
            sum += term;
        });
        *qn = sum;
    }
    Ok(q)
}

fn compositions(remaining: usize, parts: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if remaining == 0 {
        visit(parts);
        return;
    }
    for k in 3..=remaining {
        parts.push(k);
        compositions(remaining - k, parts, visit);
        parts.pop();
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

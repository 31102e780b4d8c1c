use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::testkit::{eur_curve, random_factor, riccati_residuals, TABLE2_TENOR1, TABLE2_TENOR5};

#[test]
fn small_sigma_limit_of_phi() {
    let x = FactorParams::new(Factor::X, 0.3, 0.04, 1e-7, 0.01);
    let y = FactorParams::new(Factor::Y, 0.5, 0.02, 1e-7, 0.01);
    let p = phi_from_ksigma(&x, &y).unwrap();
    assert!((p.x.phi1 - 0.3).abs() < 1e-12 && (p.x.phi2 - 0.3).abs() < 1e-12);
    assert!((p.y.phi1 - 0.5).abs() < 1e-12 && (p.y.phi2 - 0.5).abs() < 1e-12);
}

#[test]
fn table2_tenor5_round_trips() {
    let p = ModelParams::new(TABLE2_TENOR5).unwrap();
    let (x, y) = ksigma_from_phi(&p).unwrap();
    let back = phi_from_ksigma(&x, &y).unwrap().to_array();
    for (a, b) in back.iter().zip(&TABLE2_TENOR5) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn table2_tenor1_gives_feller_parameters() {
    let (x, y) = ModelParams::new(TABLE2_TENOR1).unwrap().factor_params().unwrap();
    for f in [x, y] {
        assert!(f.k > 0.0 && f.theta > 0.0 && f.sigma > 0.0, "{f:?}");
        assert!(f.feller());
    }
    assert!(y.k * y.k >= 2.0 * y.sigma * y.sigma);
}

#[test]
fn equal_phi1_phi2_gives_zero_sigma() {
    let mut pi = TABLE2_TENOR5;
    pi[1] = pi[0];
    let (x, _) = ModelParams::new(pi).unwrap().factor_params().unwrap();
    assert_eq!(x.sigma, 0.0);
}

#[test]
fn k_zero_face_is_a_singularity() {
    let mut pi = TABLE2_TENOR5;
    pi[0] = 2.0 * pi[1];
    let p = ModelParams::new(pi).unwrap();
    assert!(matches!(p.factor_params(), Err(crate::Error::Singularity(_))));
}

#[test]
fn imaginary_phi1_y_is_a_domain_error() {
    let x = FactorParams::new(Factor::X, 0.3, 0.04, 0.05, 0.01);
    let y = FactorParams::new(Factor::Y, 0.1, 0.5, 0.08, 0.01);
    assert!(matches!(phi_from_ksigma(&x, &y), Err(crate::Error::Domain(_))));
}

#[test]
fn inadmissible_vectors_are_rejected() {
    // printed tenor-10 column has phi1y > phi2y
    let tenor10 = [0.118, 0.092, 2.0, 0.00741, 0.00151, 1.73, 0.00151, 0.0988];
    assert!(ModelParams::new(tenor10).is_err());
    let mut low_feller = TABLE2_TENOR5;
    low_feller[2] = 0.9;
    assert!(ModelParams::new(low_feller).is_err());
    let mut negative = TABLE2_TENOR5;
    negative[6] = -1e-6;
    assert!(ModelParams::new(negative).is_err());
}

#[test]
fn serde_goes_through_validation() {
    let p = ModelParams::new(TABLE2_TENOR5).unwrap();
    let json = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<ModelParams>(&json).unwrap(), p);
    assert!(serde_json::from_str::<ModelParams>("[0.1,0.2,1,0.1,0.1,1,0,0]").is_err());
}

#[test]
fn bond_terminal_conditions() {
    let p = ModelParams::new(TABLE2_TENOR5).unwrap();
    assert_eq!(bond_ab(&p.x, 3.0, 3.0), (1.0, 0.0));
    assert_eq!(bond_ab(&p.y, 3.0, 3.0), (1.0, 0.0));
    assert_eq!(zcb_cirminus(&p, 0.02, 0.01, 4.0, 4.0), 1.0);
}

#[test]
fn bond_with_zero_state_is_product_of_a() {
    let p = ModelParams::new(TABLE2_TENOR5).unwrap();
    let (ax, _) = bond_ab(&p.x, 1.0, 8.0);
    let (ay, _) = bond_ab(&p.y, 1.0, 8.0);
    assert!((zcb_cirminus(&p, 0.0, 0.0, 1.0, 8.0) - ax * ay).abs() < 1e-15);
}

#[test]
fn long_horizon_b_tends_to_inverse_phi2() {
    let p = ModelParams::new(TABLE2_TENOR5).unwrap();
    let (_, bx) = bond_ab(&p.x, 0.0, 200.0);
    let (_, by) = bond_ab(&p.y, 0.0, 200.0);
    assert!((bx - 1.0 / p.x.phi2).abs() < 1e-6);
    assert!((by - 1.0 / p.y.phi2).abs() < 1e-6);
    // very long horizons stay finite
    let (a, b) = bond_ab(&p.x, 0.0, 5000.0);
    assert!(a.is_finite() && b.is_finite());
}

#[test]
fn bond_coefficients_solve_the_riccati_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        for factor in [Factor::X, Factor::Y] {
            let fp = random_factor(&mut rng, factor);
            let phi = fp.to_phi().unwrap();
            let maturity = 12.0;
            for t in [0.5, 3.0, 9.0, 11.9] {
                let (r1, r2) = riccati_residuals(&fp, |s| phi.bond_log_ab(maturity - s), t, 1e-5);
                assert!(r1.abs() < 1e-6 && r2.abs() < 1e-6, "{fp:?} t={t}: {r1} {r2}");
            }
        }
    }
}

#[test]
fn positivity_of_bonds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let curve = eur_curve();
    for _ in 0..200 {
        let x = random_factor(&mut rng, Factor::X);
        let y = random_factor(&mut rng, Factor::Y);
        let Ok(p) = phi_from_ksigma(&x, &y) else { continue };
        let m = ShiftedModel::new(p, curve.clone());
        for (t, big_t) in [(0.0, 1.0), (2.0, 10.0), (5.0, 30.0)] {
            assert!(zcb_cirminus(&p, 0.03, 0.02, t, big_t) > 0.0);
            assert!(m.zcb(0.03, 0.02, t, big_t).unwrap() > 0.0);
        }
    }
}

#[test]
fn shifted_bond_fits_curve_and_terminal() {
    let curve = eur_curve();
    let m = ShiftedModel::new(ModelParams::new(TABLE2_TENOR5).unwrap(), curve.clone());
    for p in curve.points() {
        let v = m.zcb(m.params.x0, m.params.y0, 0.0, p.maturity).unwrap();
        assert!((v - p.discount).abs() < 1e-15);
    }
    assert!((m.zcb(0.01, 0.02, 7.0, 7.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(m.zcb(0.0, 0.0, 7.0, 31.0).is_err());
}

#[test]
fn shifted_bond_decreases_on_positive_rate_segment() {
    let curve = eur_curve();
    let p = ModelParams::new(TABLE2_TENOR5).unwrap();
    let (x, y) = p.factor_params().unwrap();
    let m = ShiftedModel::new(p, curve);
    let t = 8.0;
    let mut prev = 1.0;
    let mut big_t = t + 0.25;
    while big_t <= 20.0 {
        let v = m.zcb(x.theta, y.theta, t, big_t).unwrap();
        assert!(v > 0.0 && v < prev, "T = {big_t}: {v} >= {prev}");
        prev = v;
        big_t += 0.25;
    }
}

#[test]
fn shift_factor_is_ratio_of_shifted_and_plain_bonds() {
    let curve = eur_curve();
    let m = ShiftedModel::new(ModelParams::new(TABLE2_TENOR1).unwrap(), curve);
    for (t, big_t) in [(0.0, 3.0), (1.5, 4.0), (6.0, 29.0)] {
        let ratio = m.zcb(0.02, 0.01, t, big_t).unwrap() / zcb_cirminus(&m.params, 0.02, 0.01, t, big_t);
        assert!((ratio - m.shift_factor(t, big_t).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn forward_rate_at_zero_is_short_rate() {
    let p = ModelParams::new(TABLE2_TENOR5).unwrap();
    assert!((forward_rate_model(&p, 0.0) - (p.x0 - p.y0)).abs() < 1e-16);
    for phi in [p.x, p.y] {
        let (_, db) = phi.forward_parts(0.0);
        assert!((db - 1.0).abs() < 1e-15);
    }
}

#[test]
fn forward_rate_matches_log_bond_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let x = random_factor(&mut rng, Factor::X);
        let y = random_factor(&mut rng, Factor::Y);
        let p = phi_from_ksigma(&x, &y).unwrap();
        for t in [0.3, 2.0, 7.5, 25.0] {
            let h = 1e-5;
            let fd = -((zcb_cirminus(&p, p.x0, p.y0, 0.0, t + h)).ln()
                - (zcb_cirminus(&p, p.x0, p.y0, 0.0, t - h)).ln())
                / (2.0 * h);
            assert!((forward_rate_model(&p, t) - fd).abs() < 1e-6);
        }
    }
}

/// Random point on the chosen face of the polytope (that constraint active).
fn point_on_face(rng: &mut impl rand::Rng, face: usize) -> [f64; 8] {
    let mut pi = [0.0; 8];
    let phi1x: f64 = rng.random_range(0.01..1.0);
    let phi2x = match face {
        0 => phi1x,
        2 => phi1x / 2.0,
        _ => rng.random_range(phi1x / 2.0..phi1x),
    };
    let phi1y: f64 = rng.random_range(0.01..1.0);
    let phi2y = match face {
        1 => phi1y,
        _ => rng.random_range(phi1y..2.0 * phi1y),
    };
    pi[0] = phi1x;
    pi[1] = phi2x;
    pi[2] = if face == 4 { 1.0 } else { rng.random_range(1.0..5.0) };
    pi[3] = phi1y;
    pi[4] = phi2y;
    pi[5] = if face == 4 { 1.0 } else { rng.random_range(1.0..5.0) };
    pi[6] = rng.random_range(0.0..0.05);
    pi[7] = rng.random_range(0.0..0.05);
    pi
}

#[test]
fn constraint_faces_keep_parameters_real_and_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for face in 0..5 {
        for _ in 0..1000 {
            let pi = point_on_face(&mut rng, face);
            let p = ModelParams::new(pi).unwrap();
            for (phi, factor) in [(p.x, Factor::X), (p.y, Factor::Y)] {
                let k = 2.0 * phi.phi2 - phi.phi1;
                let sigma_sq = factor.sign() * 2.0 * (phi.phi2 * phi.phi1 - phi.phi2 * phi.phi2);
                assert!(k >= -1e-12 && sigma_sq >= -1e-12, "face {face}: {pi:?}");
                if let Ok(fp) = phi.to_params(factor, 0.0) {
                    assert!(fp.theta >= -1e-12, "face {face}: {pi:?}");
                }
            }
        }
    }
}

fn admissible_factor(factor: Factor) -> impl Strategy<Value = FactorParams> {
    (0.02f64..1.5, 0.005f64..0.4, 1.0f64..5.0, 0.0f64..0.05).prop_filter_map(
        "k_y^2 >= 2 sigma_y^2",
        move |(k, sigma, feller_mult, z0)| {
            if factor == Factor::Y && k * k < 2.0 * sigma * sigma {
                return None;
            }
            let theta = feller_mult * sigma * sigma / (2.0 * k);
            Some(FactorParams::new(factor, k, theta, sigma, z0))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ksigma_phi_round_trip(x in admissible_factor(Factor::X), y in admissible_factor(Factor::Y)) {
        let p = phi_from_ksigma(&x, &y).unwrap();
        let (bx, by) = ksigma_from_phi(&p).unwrap();
        for (a, b) in [(x, bx), (y, by)] {
            prop_assert!((a.k - b.k).abs() < 1e-10 * a.k.max(1.0));
            prop_assert!((a.sigma - b.sigma).abs() < 1e-10);
            prop_assert!((a.theta - b.theta).abs() < 1e-10 * a.theta.max(1.0));
            prop_assert_eq!(a.z0, b.z0);
        }
        let again = phi_from_ksigma(&bx, &by).unwrap().to_array();
        for (u, v) in again.iter().zip(p.to_array().iter()) {
            prop_assert!((u - v).abs() < 1e-10 * v.abs().max(1.0));
        }
    }
}

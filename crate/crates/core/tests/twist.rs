mod common;

use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;
use twistlab::complexfn::gamma;
use twistlab::selberg::{hurwitz_zeta, sine_expansion, zeta};
use twistlab::twist::*;
use twistlab::Error;

/// sum (-1)^n n^{-s}
fn alternating(s: C64) -> C64 {
    (((1.0 - s) * 2f64.ln()).exp() - 1.0) * zeta(s).unwrap()
}

/// sum e(-n/q) n^{-s} = q^{-s} sum_r e(-r/q) zeta(s, r/q)
fn rational_twist(s: C64, q: u32) -> C64 {
    let qf = q as f64;
    let mut acc = c(0.0, 0.0);
    for r in 1..=q {
        acc += C64::from_polar(1.0, -2.0 * PI * r as f64 / qf) * hurwitz_zeta(s, r as f64 / qf).unwrap();
    }
    acc * (-s * qf.ln()).exp()
}

/// conj F_0(s, alpha) of zeta for n_alpha < 1: each frequency gives a Hurwitz zeta.
fn zeta_companion_0(s: C64, n_alpha: f64) -> C64 {
    let sine = sine_expansion(&cat("zeta")).unwrap();
    let n = sine.n as i64;
    let mut acc = c(0.0, 0.0);
    for j in -n..=n {
        let a = sine.a(j);
        if a.norm() == 0.0 {
            continue;
        }
        let w = sine.omega(j);
        let shift = C64::from_polar(1.0, PI * (0.5 - w)).re;
        acc += a * (c(0.0, PI * w) * (1.0 - s)).exp() * hurwitz_zeta(s, 1.0 + shift * n_alpha).unwrap();
    }
    acc
}


#[test]
fn twist_series_examples() {
    let z = cat("zeta");
    let v = twist_series(&z, c(3.0, 0.0), 1.0, 200_000).unwrap();
    assert!((v.value - zeta(c(3.0, 0.0)).unwrap()).norm() < 1e-10);
    assert!(v.tail_bound < 1e-9);

    let s = c(2.5, 0.0);
    let v = twist_series(&z, s, 0.5, 100_000).unwrap();
    assert!((v.value - alternating(s)).norm() < 1e-10);

    // brute-force double sum over a b <= N
    let big_n = 20_000usize;
    let mut brute = c(0.0, 0.0);
    for a in 1..=big_n {
        for b in 1..=big_n / a {
            let n = (a * b) as f64;
            brute += C64::from_polar(n.powi(-3), -2.0 * PI * 2.0 * n.sqrt());
        }
    }
    let v = twist_series(&cat("zeta-squared"), c(3.0, 0.0), 2.0, big_n).unwrap();
    assert!((v.value - brute).norm() < 1e-12, "{} vs {}", v.value, brute);
}

#[test]
fn twist_series_refuses_divergent_region() {
    assert!(matches!(
        twist_series(&cat("zeta"), c(1.0, 3.0), 0.5, 1000),
        Err(Error::NonConvergence(_))
    ));
    assert!(matches!(twist_series(&cat("zeta"), c(2.0, 0.0), 0.0, 10), Err(Error::Domain(_))));
    // finite support converges everywhere
    assert!(twist_series(&cat("halfint-model"), c(-2.0, 1.0), 1.0, 10_000).is_ok());
}

#[test]
fn smoothed_twist_converges_to_series() {
    let z = cat("zeta");
    let s = c(3.0, 1.0);
    let target = twist_series(&z, s, 0.3, 1_000_000).unwrap().value;
    let mut last = f64::INFINITY;
    for x in [32.0, 64.0, 128.0, 256.0] {
        let h = smoothed_horizon(&z, s, x, 1e-15);
        let diff = (smoothed_twist(&z, s, 0.3, x, h).unwrap().value - target).norm();
        assert!(diff < last, "X = {x}: {diff:e} after {last:e}");
        last = diff;
    }
}

#[test]
fn smoothed_twist_is_stable_in_the_horizon() {
    let z = cat("zeta");
    let s = c(-0.5, 0.0);
    let h = smoothed_horizon(&z, s, 50.0, 1e-15);
    let a = smoothed_twist(&z, s, 0.3, 50.0, h).unwrap();
    let b = smoothed_twist(&z, s, 0.3, 50.0, 2 * h).unwrap();
    assert!(a.value.norm().is_finite());
    assert!(a.tail_bound.is_finite() && a.tail_bound < 1e-10);
    assert!((a.value - b.value).norm() < 1e-10);
    assert!(matches!(
        smoothed_twist(&z, s, 0.3, 50.0, 100),
        Err(Error::NonConvergence(_))
    ));
    assert!(matches!(smoothed_twist(&z, s, 0.3, 1.0, h), Err(Error::Domain(_))));
}

#[test]
fn smoothed_twist_grows_like_the_leading_residue_term() {
    // alpha = 1 lies in Spec(zeta): F_X ~ d rho_0 Gamma(d(s_0 - s)) X^{d(s_0 - s)}
    let z = cat("zeta");
    let s = c(-0.5, 0.0);
    let mut ratios = Vec::new();
    for x in [64.0, 256.0, 1024.0] {
        let h = smoothed_horizon(&z, s, x, 1e-15);
        let fx = smoothed_twist(&z, s, 1.0, x, h).unwrap().value;
        let lead = gamma(1.0 - s).unwrap() * ((1.0 - s) * f64::ln(x)).exp();
        ratios.push((fx / lead - 1.0).norm());
    }
    assert!(ratios[2] < ratios[1] && ratios[1] < ratios[0]);
    assert!(ratios[2] < 1e-4);
}

#[test]
fn spectrum_examples() {
    let z = cat("zeta");
    let p = spectrum_membership(&z, 3.0).unwrap();
    assert!(p.member);
    assert_eq!(p.n_alpha, 3.0);
    assert_eq!(p.index(), Some(3));
    let p = spectrum_membership(&z, 0.5).unwrap();
    assert!(!p.member);
    assert!((p.n_alpha - 0.5).abs() < 1e-15);
    let p = spectrum_membership(&cat("zeta-squared"), 2.0 * 5f64.sqrt()).unwrap();
    assert!(p.member);
    assert_eq!(p.n_alpha, 5.0);
    // n_alpha integral but a(n_alpha) = 0: chi_4(2) = 0
    let chi = cat("dirichlet-4-odd");
    let inv = twistlab::selberg::invariants(&chi);
    let p = spectrum_membership(&chi, 2.0 / inv.q).unwrap();
    assert_eq!(p.index(), Some(2));
    assert!(!p.member);
    assert!(matches!(spectrum_membership(&z, -1.0), Err(Error::Domain(_))));
}

#[test]
fn theorem3_examples() {
    let z = cat("zeta");
    let p = theorem3_residue(&z, 1.0, 0).unwrap();
    assert!((p.residue - 1.0).norm() < 1e-8);
    assert_eq!(p.location, c(1.0, 0.0));
    assert!(p.in_spectrum);
    // zeta is strict with h = 0, so d_1 = d_2 = 0
    for l in 1..4 {
        assert_eq!(theorem3_residue(&z, 1.0, l).unwrap().residue, c(0.0, 0.0));
    }
    let p = theorem3_residue(&z, 0.5, 0).unwrap();
    assert!(!p.in_spectrum);
    assert_eq!(p.residue, c(0.0, 0.0));
    // F(s, 3) = zeta(s) as well
    assert!((theorem3_residue(&z, 3.0, 0).unwrap().residue - 1.0).norm() < 1e-8);
}

#[test]
fn pole_locations_follow_theta() {
    let desc = cat("theta-shift-demo");
    let inv = twistlab::selberg::invariants(&desc);
    for l in 0..5 {
        let p = theorem3_residue(&desc, 1.0, l).unwrap();
        assert_eq!(p.location, c(s_ell(inv.d, l), -inv.theta));
    }
}

#[test]
fn pole_set_does_not_depend_on_alpha() {
    for (name, alphas) in [("zeta", [1.0, 2.0]), ("zeta-squared", [2.0, 4.0]), ("zeta-times-dirichlet", [0.0, 0.0])] {
        let desc = cat(name);
        let d = desc.degree();
        let q = twistlab::selberg::invariants(&desc).q;
        let alphas = if alphas[0] == 0.0 {
            // alpha with n_alpha in {1, 5}
            [1.0, 5.0].map(|m: f64| d * (m / q).powf(1.0 / d))
        } else {
            alphas
        };
        for l in 0..=6 {
            let a = theorem3_residue(&desc, alphas[0], l).unwrap();
            let b = theorem3_residue(&desc, alphas[1], l).unwrap();
            assert!(a.in_spectrum && b.in_spectrum, "{name}");
            assert_eq!(a.residue.norm() > 1e-12, b.residue.norm() > 1e-12, "{name} l = {l}");
        }
    }
}

#[test]
fn residual_r_examples() {
    assert_eq!(residual_r(&cat("dirichlet-4-odd"), c(0.3, 2.0), 0.7).unwrap(), c(0.0, 0.0));
    let z = cat("zeta");
    for (s, alpha) in [(c(0.3, 2.0), 0.5), (c(-1.5, 7.0), 1.0), (c(2.2, -3.0), 0.25)] {
        let zz = c((2.0 * PI * alpha).ln(), PI / 2.0);
        let expect = (-s * zz).exp() * gamma(s).unwrap();
        let got = residual_r(&z, s, alpha).unwrap();
        assert!((got - expect).norm() < 1e-12 * expect.norm().max(1.0));
    }
    assert!(matches!(residual_r(&z, c(-2.0, 0.0), 0.5), Err(Error::Pole(_))));
}

#[test]
fn residual_r_matches_circle_contour() {
    // (1/2 pi i) contour integral of F(s + w/d) Gamma(w) z^{-w} around w = d(1 - s) gives R(1 - s)
    let desc = cat("zeta-squared");
    let d = 2.0;
    for (s, alpha) in [(c(0.3, 2.0), 2.0), (c(-0.7, 5.0), 0.6)] {
        let zz = c((2.0 * PI * alpha).ln(), PI / 2.0);
        let center = (1.0 - s) * d;
        let n = 512;
        let radius = 0.25;
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            let w = center + e * radius;
            let f = zeta(s + w / d).unwrap().powu(2);
            acc += f * gamma(w).unwrap() * (-w * zz).exp() * e * radius;
        }
        let oracle = acc / n as f64;
        let got = residual_r(&desc, 1.0 - s, alpha).unwrap();
        assert!((got - oracle).norm() < 1e-6 * oracle.norm().max(1.0), "{got} vs {oracle}");
    }
}

#[test]
fn f_bar_examples() {
    for (name, alpha) in [("zeta", 0.5), ("zeta", 1.0), ("zeta-squared", 2.0), ("zeta-squared", 3.0)] {
        let desc = cat(name);
        for s in [c(2.0, 0.0), c(2.0, 6.0)] {
            let a = f_bar_ell_direct(&desc, s, alpha, 0).unwrap();
            let b = f_bar_ell_stratified(&desc, s, alpha, 0, 6).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0), "{name} {alpha} {s}");
        }
    }
    let z = cat("zeta");
    let s = c(0.5, 0.0);
    let a = f_bar_ell(&z, s, 0.5, 0, 3).unwrap();
    let b = f_bar_ell(&z, s, 0.5, 0, 5).unwrap();
    assert!((a - b).norm() < 1e-8);
    assert!(matches!(
        f_bar_ell_stratified(&z, c(-3.0, 0.0), 0.5, 0, 3),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn zeta_companion_matches_hurwitz_values() {
    let z = cat("zeta");
    for s in [c(2.5, 3.0), c(1.2, -8.0), c(0.5, 0.0), c(0.3, 12.0), c(-1.5, 4.0), c(-2.0, 0.0)] {
        let expect = zeta_companion_0(s, 0.5);
        let got = f_bar_ell(&z, s, 0.5, 0, 6).unwrap();
        assert!((got - expect).norm() < 1e-9 * expect.norm().max(1.0), "{s}: {got} vs {expect}");
    }
}

#[test]
fn continue_twist_examples() {
    let z = cat("zeta");
    let s = c(-1.5, 0.0);
    let r = continue_twist(&z, s, 0.5, &default_ladder(1.0), None).unwrap();
    assert!((r.value - alternating(s)).norm() < 1e-4);
    assert!(r.subtracted.is_empty());
    let s = c(-0.5, 0.0);
    let r = continue_twist(&z, s, 1.0, &default_ladder(1.0), None).unwrap();
    assert!((r.value - zeta(s).unwrap()).norm() < 1e-4);
    assert_eq!(r.subtracted, vec![0]);
    assert!(matches!(
        continue_twist(&z, s, 1.0, &[64.0, 32.0, 128.0], None),
        Err(Error::Domain(_))
    ));
}

#[test]
fn continue_twist_matches_oracles_on_a_grid() {
    let z = cat("zeta");
    let oracle = |s: C64, alpha: f64| match alpha {
        a if a == 0.5 => alternating(s),
        a if a == 1.0 => zeta(s).unwrap(),
        _ => rational_twist(s, 3),
    };
    for alpha in [0.5, 1.0 / 3.0, 1.0] {
        for i in 0..20 {
            let sigma = -2.0 + 1.8 * (i % 5) as f64 / 4.0;
            let t = -20.0 + 40.0 * (i / 5) as f64 / 3.0 + 0.37;
            let s = c(sigma, t);
            let r = continue_twist(&z, s, alpha, &default_ladder(1.0), None).unwrap();
            let err = (r.value - oracle(s, alpha)).norm();
            assert!(err < 1e-3, "alpha = {alpha}, s = {s}: {err:e}");
        }
    }
}

#[test]
fn fit_residues_examples() {
    let z = cat("zeta");
    let fit = fit_residues(&z, c(-0.7, 0.0), 1.0, &default_ladder(1.0)).unwrap();
    assert_eq!(fit.ells, vec![0, 1]);
    assert!((fit.residues[0] - 1.0).norm() < 1e-3);
    let fit = fit_residues(&z, c(-0.7, 0.0), 0.5, &default_ladder(1.0)).unwrap();
    assert!(fit.residues.iter().all(|r| r.norm() < 1e-3));

    let z2 = cat("zeta-squared");
    let ladder = default_ladder(2.0);
    for alpha in [2.0, 4.0] {
        let fit = fit_residues(&z2, c(-0.3, 0.0), alpha, &ladder).unwrap();
        let expect = theorem3_residue(&z2, alpha, 0).unwrap().residue;
        assert!((fit.residues[0] - expect).norm() < 1e-3 * expect.norm(), "alpha = {alpha}");
    }
    assert!(matches!(
        fit_residues(&z, c(0.2, 0.0), 1.0, &default_ladder(1.0)),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        fit_residues(&z, c(-0.7, 0.0), 1.0, &[32.0, 64.0]),
        Err(Error::IllConditioned(_))
    ));
}

#[test]
fn h_k_vanishes_for_strict_descriptor() {
    let h = h_k_eval(&cat("halfint-model"), c(-1.0, 5.0), 1.0, 0).unwrap();
    assert!(h.norm() <= 1e-7, "{h}");
}

#[test]
fn h_k_decays_for_zeta_squared() {
    let z2 = cat("zeta-squared");
    let k0 = k_zero(2.0);
    let a = h_k_detailed(&z2, c(-0.6, 20.0), 1.0, k0).unwrap();
    let b = h_k_detailed(&z2, c(-0.6, 40.0), 1.0, k0).unwrap();
    assert!(b.value.norm() < a.value.norm());
    assert_eq!(a.e_k_sum, c(0.0, 0.0));
    assert!(matches!(
        h_k_eval(&z2, c(-0.6, 20.0), 1.0, k0 + 1),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(h_k_eval(&z2, c(0.2, 20.0), 1.0, 1), Err(Error::Precondition(_))));
}

#[test]
fn h_k_below_k0_agrees_across_contours() {
    // k = 1 < k_0 = 2: residues at w = -nu plus the line left of them, versus a line at c > 0
    let z2 = cat("zeta-squared");
    let s = c(-0.1, 8.0);
    let h = h_k_detailed(&z2, s, 2.0, 1).unwrap();
    assert!(h.e_k_sum.norm() > 0.0);
    let (line, err) = h_k_on_line(&z2, s, 2.0, 1, 0.1).unwrap();
    let tol = 10.0 * (h.error + err) + 1e-9;
    assert!((h.value - line).norm() < tol, "{} vs {line}", h.value);
}

#[test]
fn verify_fe_examples() {
    let z = cat("zeta");
    let r = verify_fe(&z, c(-1.0, 10.0), 0.5, 1, &FEConfig::default()).unwrap();
    let s = c(-1.0, 10.0);
    let closed = (alternating(s) - r.rhs_sum - r.residual_term - r.h_k_quadrature).norm();
    assert!(closed <= 1e-3 && r.residual <= 1e-3 && r.within_budget());

    let s = c(-0.8, 8.0);
    let r = verify_fe(&z, s, 1.0, 1, &FEConfig::default()).unwrap();
    let closed = (zeta(s).unwrap() - r.rhs_sum - r.residual_term - r.h_k_quadrature).norm();
    assert!(closed <= 1e-3 && r.residual <= 1e-3 && r.within_budget());

    let r = verify_fe(&cat("zeta-squared"), c(-0.6, 12.0), 2.0, k_zero(2.0), &FEConfig::default()).unwrap();
    assert!(r.within_budget(), "{r:?}");
    assert_eq!(r.csv_row().split(',').count(), FEReport::CSV_HEADER.split(',').count());
}

#[test]
fn fe_is_stable_under_stratum_shift() {
    // zeta has d_l = 0 for l >= 1, so strata 1 and 2 share the half-plane sigma < 0
    let z = cat("zeta");
    let s = c(-0.5, 12.0);
    let a = verify_fe(&z, s, 0.5, 1, &FEConfig::default()).unwrap();
    let b = verify_fe(&z, s, 0.5, 2, &FEConfig::default()).unwrap();
    let diff = (a.rhs_sum + a.h_k_quadrature - b.rhs_sum - b.h_k_quadrature).norm();
    assert!(diff < a.error_budget.min(b.error_budget));
}

#[test]
fn residue_identity_examples() {
    let dev = residue_identity_check(&cat("zeta"), 0.5, 2).unwrap();
    assert!(dev[0] <= 1e-6);
    assert!(dev[1] <= 1e-5 && dev[2] <= 1e-5, "{dev:?}");
    // zeta(s, 1) = zeta(s) has its pole on the nu = 0 point
    assert!(matches!(residue_identity_check(&cat("zeta"), 1.0, 2), Err(Error::Precondition(_))));
    let dev = residue_identity_check(&cat("zeta"), 0.7, 2).unwrap();
    assert!(dev.iter().all(|v| *v <= 1e-5), "{dev:?}");
    for name in ["zeta-squared", "dirichlet-4-odd", "halfint-model"] {
        assert!(
            matches!(residue_identity_check(&cat(name), 0.5, 2), Err(Error::Precondition(_))),
            "{name}"
        );
    }
}

#[test]
fn growth_probe_examples() {
    let z = cat("zeta");
    // log-spaced over a wide range so that oscillation averages out of the slope
    let grid: Vec<f64> = (0..24).map(|i| 10.0 * 40f64.powf(i as f64 / 23.0)).collect();
    let rep = growth_probe(&z, 0.5, 0, 1.5, &grid).unwrap();
    assert!(rep.fitted_exponent <= 0.1 && rep.bound_holds, "{}", rep.fitted_exponent);
    assert!(rep.nonvanishing);
    let rep = growth_probe(&z, 0.5, 0, 0.5, &grid).unwrap();
    assert!(rep.fitted_exponent.is_finite() && rep.fitted_exponent < 2.0);
    for p in &rep.samples {
        assert!(p.normalized <= 10.0 * p.t.abs().powi(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_points_are_recognised(m in 1u32..60) {
        for name in ["zeta", "zeta-squared"] {
            let desc = cat(name);
            let d = desc.degree();
            let q = twistlab::selberg::invariants(&desc).q;
            let alpha = d * (m as f64 / q).powf(1.0 / d);
            let p = spectrum_membership(&desc, alpha).unwrap();
            prop_assert!(p.member);
            prop_assert_eq!(p.index(), Some(m as usize));
        }
    }

    #[test]
    fn companion_routes_agree(sigma in 1.3f64..3.0, t in -12.0f64..12.0, alpha in 0.1f64..0.95) {
        let z = cat("zeta");
        let s = c(sigma, t);
        let a = f_bar_ell_direct(&z, s, alpha, 0).unwrap();
        let b = f_bar_ell_stratified(&z, s, alpha, 0, 7).unwrap();
        prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        let exact = zeta_companion_0(s, alpha);
        prop_assert!((a - exact).norm() < 1e-9 * exact.norm().max(1.0));
    }

    #[test]
    fn continuation_reproduces_zeta(sigma in -2.0f64..-0.2, t in -20.0f64..20.0) {
        let z = cat("zeta");
        let s = c(sigma, t);
        let r = continue_twist(&z, s, 1.0, &default_ladder(1.0), None).unwrap();
        prop_assert!((r.value - zeta(s).unwrap()).norm() < 1e-3);
    }

    #[test]
    fn residues_vanish_off_spectrum(alpha in 0.05f64..10.0, l in 0usize..6) {
        let z = cat("zeta-squared");
        let p = theorem3_residue(&z, alpha, l).unwrap();
        if !p.in_spectrum {
            prop_assert_eq!(p.residue, c(0.0, 0.0));
        }
    }
}

mod common;

use common::{profile_10_2, q_oracle};
use num_complex::Complex64;
use proptest::prelude::*;
use sbh::indicial::{roots_for, sphere_eigenvalue};
use sbh::linearized::{
    byparts_identity_check, hardy_chain_check, injectivity_scan, mode_coefficients, mode_solve, panel_rule,
    quadratic_certificates, sample_for_hardy, translation_mode_residual, Bump, Jet, ModeData, ModePotential,
    Seed, Verdict,
};
use sbh::params::params_unchecked;
use sbh::validate_params;

#[test]
fn reference_coefficients() {
    let c0 = mode_coefficients(10, 0);
    assert_eq!((c0.a1, c0.a2, c0.a3, c0.a4), (18.0, 63.0, 63.0, 0.0));
    let c1 = mode_coefficients(10, 1);
    assert_eq!((c1.a1, c1.a2, c1.a3, c1.a4), (18.0, 45.0, 189.0, 189.0));
}

#[test]
fn falling_polynomial_matches_oracle() {
    for n in [5i64, 9, 10, 13] {
        for j in [0u32, 1, 2, 7] {
            let c = mode_coefficients(n, j);
            let l = sphere_eigenvalue(j, n);
            for g in [-7.5, -2.0, 0.0, 1.25, 4.0] {
                let z = Complex64::new(g, 0.3 * g);
                let want = q_oracle(n as f64, l, z);
                assert!((c.falling_poly(z) - want).norm() <= 1e-9 * (1.0 + want.norm()), "N={n} j={j} g={g}");
            }
        }
    }
}

#[test]
fn potential_limits() {
    let prof = profile_10_2();
    let ap = prof.params.a_p;
    let m = prof.len();
    assert!((prof.potential_node(m - 1) - ap).abs() <= 1e-3 * ap);
    assert!(prof.potential_node(0).abs() <= 1e-3 * ap);
    let mode = ModeData::from_profile(&prof, 0);
    assert_eq!(mode.limit_potential(true), ap);
    assert_eq!(mode.limit_potential(false), 0.0);
    // far side: V decreases towards 0 while ū is still small
    let half: Vec<usize> = (0..m).take_while(|&i| prof.states[i][0] < 0.5 * prof.params.c_p).collect();
    for w in half.windows(2) {
        let (ra, rb) = ((-prof.t(w[0])).exp(), (-prof.t(w[1])).exp());
        assert!(ra > rb);
        assert!(prof.potential_node(w[0]) <= prof.potential_node(w[1]) + 1e-12 * ap);
    }
}

fn monomial_error(mode: &ModeData, g: Complex64, at_zero: bool, span: (f64, f64)) -> f64 {
    let seed = if at_zero { Seed::AtZero(g) } else { Seed::AtInfinity(g) };
    let s = mode_solve(mode, seed, span).unwrap();
    let t0 = s.tau[0];
    let w0 = s.w[0];
    let mut worst = 0.0f64;
    for ((t, w), ls) in s.tau.iter().zip(&s.w).zip(&s.log_scale) {
        let want = w0 * (g * (t - t0)).exp();
        let got = w * ls.exp();
        worst = worst.max((got - want).norm() / want.norm());
    }
    worst
}

#[test]
fn zero_potential_reproduces_monomials() {
    for j in [0u32, 1, 3] {
        let mode = ModeData::new(10, j, ModePotential::Zero);
        let roots = roots_for(10, mode.lambda_j, 0.0);
        for &g in &roots {
            for at_zero in [true, false] {
                let e = monomial_error(&mode, g, at_zero, (1.0, 1.2));
                assert!(e <= 1e-8, "j={j} g={g} zero={at_zero}: {e}");
            }
        }
        // the dominant branch in each direction survives a long span
        let top = roots.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re)).unwrap();
        let bottom = roots.iter().copied().min_by(|a, b| a.re.total_cmp(&b.re)).unwrap();
        assert!(monomial_error(&mode, top, true, (1.0, 100.0)) <= 1e-8);
        assert!(monomial_error(&mode, bottom, false, (1.0, 100.0)) <= 1e-8);
    }
}

#[test]
fn seed_must_be_a_root() {
    let mode = ModeData::new(10, 0, ModePotential::Zero);
    assert!(mode_solve(&mode, Seed::AtZero(Complex64::new(0.7, 0.0)), (1.0, 2.0)).is_err());
    assert!(mode_solve(&mode, Seed::AtZero(Complex64::new(0.0, 0.0)), (2.0, 1.0)).is_err());
}

#[test]
fn radial_mode_grows_at_infinity() {
    let prof = profile_10_2();
    let mode = ModeData::from_profile(&prof, 0);
    let roots = roots_for(10, 0.0, prof.params.a_p);
    let g = roots.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re)).unwrap();
    let ra = prof.r_min() * (4.0 * prof.dt).exp();
    let rb = prof.r_max() * (-4.0 * prof.dt).exp();
    let s = mode_solve(&mode, Seed::AtZero(g), (ra, rb)).unwrap();
    assert!(s.far_exponent >= 1.95, "{}", s.far_exponent);
}

#[test]
fn translation_mode_solves_j1() {
    let prof = profile_10_2();
    let m = prof.len();
    let worst = (2..m - 2).step_by(7).map(|i| translation_mode_residual(&prof, i)).fold(0.0, f64::max);
    assert!(worst <= 1e-7, "{worst}");
}

#[test]
fn injectivity_scan_reference() {
    let prof = profile_10_2();
    let mu = -2.5;
    let rep = injectivity_scan(&prof, 0..=1, mu, false).unwrap();
    assert_eq!(rep.modes[0].verdict, Verdict::Pass);
    assert_eq!(rep.modes[1].verdict, Verdict::NotCertified);
    assert!(!rep.modes[1].note.is_empty());
    let cert = injectivity_scan(&prof, 11..=11, mu, false).unwrap();
    assert_eq!(cert.modes[0].verdict, Verdict::Pass);
    assert_eq!(cert.modes[0].route, "certificate");
    assert!(cert.modes[0].min_span_exponent.is_none());
    let both = injectivity_scan(&prof, 11..=11, mu, true).unwrap();
    assert_eq!(both.modes[0].verdict, Verdict::Pass);
    assert!(both.modes[0].min_span_exponent.unwrap() > 0.0);
    assert!(both.no_failures() && rep.no_failures());
}

#[test]
fn certificate_constants() {
    let pr = validate_params(10, 2.0).unwrap();
    let (c, cb) = quadratic_certificates(&pr, 11);
    assert_eq!(c, -45314.0);
    assert!(cb < 1.0);
    for n in 9..=14i64 {
        let nf = n as f64;
        let pr = params_unchecked(n, 1.5);
        let (c0, _) = quadratic_certificates(&pr, 0);
        assert_eq!(c0, nf.powi(3) * (nf + 4.0) / 16.0);
        for j in (n as u32 + 1)..=(4 * n as u32) {
            let (_, cb) = quadratic_certificates(&pr, j);
            assert!(cb < 1.0, "N={n} j={j}: {cb}");
        }
    }
}

fn bump(a: f64, b: f64) -> impl Fn(f64) -> Jet {
    let bp = Bump { a, b, m: 6 };
    move |x| bp.jet(x)
}

/// `w = r^m g(log r)` with `g` a bump on `[-l, l]` in the log variable.
fn log_bump_samples(n: i64, l: f64) -> Vec<(f64, f64, f64, f64, f64)> {
    let m = (4.0 - n as f64) / 2.0;
    let g = Bump { a: -l, b: l, m: 6 };
    panel_rule(-l, l, 64, 10)
        .into_iter()
        .map(|(s, wt)| {
            let r = s.exp();
            let d = g.jet(s);
            let w = r.powf(m) * d[0];
            let w1 = r.powf(m - 1.0) * (m * d[0] + d[1]);
            let w2 = r.powf(m - 2.0) * (m * (m - 1.0) * d[0] + (2.0 * m - 1.0) * d[1] + d[2]);
            (r, wt * r, w, w1, w2)
        })
        .collect()
}

#[test]
fn hardy_chain_on_bumps_and_near_extremals() {
    for n in [9i64, 10, 12] {
        let f = bump(1.0, 2.0);
        let h = hardy_chain_check(n, &sample_for_hardy(&f, &panel_rule(1.0, 2.0, 32, 10)));
        assert!(h.holds && h.slack1 > 0.0 && h.slack2 > 0.0);
        let ratio = |l: f64| {
            let h = hardy_chain_check(n, &log_bump_samples(n, l));
            assert!(h.holds);
            h.i0 / (4.0 / ((n - 4) as f64).powi(2) * h.i1)
        };
        let (r4, r16) = (ratio(4.0), ratio(16.0));
        assert!(r16 > r4 && r16 > 0.95 && r16 <= 1.0, "N={n}: {r4} {r16}");
    }
    let zero = hardy_chain_check(10, &sample_for_hardy(&|_| [0.0; 5], &panel_rule(1.0, 2.0, 4, 8)));
    assert!(zero.holds && zero.i0 == 0.0 && zero.slack1 == 0.0 && zero.slack2 == 0.0);
}

#[test]
fn byparts_identity() {
    for j in [0u32, 1, 4] {
        let f = bump(0.5, 3.0);
        assert!(byparts_identity_check(10, j, &f, 0.5, 3.0) <= 1e-6, "j={j}");
    }
    let sq = |r: f64| -> Jet { [r * r, 2.0 * r, 2.0, 0.0, 0.0] };
    assert!(byparts_identity_check(10, 0, &sq, 0.5, 2.0) <= 1e-8);
    assert!(byparts_identity_check(11, 3, &sq, 0.5, 2.0) <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hardy_holds_on_random_bumps(n in 5i64..=14, a in 0.05f64..5.0, w in 0.05f64..5.0, m in 3i32..9) {
        let bp = Bump { a, b: a + w, m };
        let f = move |x: f64| bp.jet(x);
        let h = hardy_chain_check(n, &sample_for_hardy(&f, &panel_rule(a, a + w, 32, 10)));
        prop_assert!(h.holds, "{h:?}");
    }

    #[test]
    fn byparts_on_random_bumps(n in 5i64..=14, j in 0u32..6, a in 0.2f64..3.0, w in 0.2f64..3.0) {
        let bp = Bump { a, b: a + w, m: 6 };
        let f = move |x: f64| bp.jet(x);
        prop_assert!(byparts_identity_check(n, j, &f, a, a + w) <= 1e-6);
    }
}

mod common;

use common::{profile_10_2, rel};
use sbh::delaunay::{
    dissipation_check, energy, kelvin_transform, monotonicity_report, normalize_small_tail, normalize_small_tail_to,
    ode_residual, radial_residual, read_profile, scale_to_beta, solve_singular, write_profile,
};
use sbh::validate_params;
use std::io::BufReader;

#[test]
fn converges_to_c_p_with_bound() {
    let prof = profile_10_2();
    let c = prof.params.c_p;
    let end = prof.states.last().unwrap();
    assert!((end[0] - 192.0).abs() <= 1e-4 * c);
    assert!(prof.states.first().unwrap()[0].abs() < 1e-4 * c);
    assert!(prof.states.iter().skip(1).all(|y| y[0] > 0.0));
    assert!(prof.sup_bound_ratio() <= 1.0 + 1e-6);
    let pm = prof.params.p - 1.0;
    let sup = prof.states.iter().map(|y| y[0].powf(pm)).fold(0.0, f64::max);
    assert!(sup <= 1.5 * 192.0 * (1.0 + 1e-6));
}

#[test]
fn ode_and_radial_residuals() {
    let prof = profile_10_2();
    assert!(ode_residual(&prof) <= 1e-7);
    for r in [1e-6, 1e-3, 0.1, 1.0, 10.0, 100.0] {
        assert!(radial_residual(&prof, r).unwrap() < 1e-6, "r={r}");
    }
}

#[test]
fn slow_rate_equals_characteristic_root() {
    let pr = validate_params(10, 2.0).unwrap();
    assert_eq!(pr.mu_slow(), 2.0);
    let prof = profile_10_2();
    // the far tail of ū grows like e^{μ_s t}
    let (i, j) = (10, 60);
    let slope = (prof.states[j][0].ln() - prof.states[i][0].ln()) / (prof.t(j) - prof.t(i));
    assert!((slope - 2.0).abs() < 1e-3, "{slope}");
}

#[test]
fn monotonicity_and_rates() {
    let prof = profile_10_2();
    let rep = monotonicity_report(&prof);
    assert!(rep.all_ok(), "{rep:?}");
    let far = rep.rates.iter().find(|r| r.name == "far u").unwrap();
    assert!((far.fitted + 6.0).abs() <= 0.05);
    let near = rep.rates.iter().find(|r| r.name == "near u").unwrap();
    assert!((near.fitted + 4.0).abs() <= 0.05);
}

#[test]
fn energy_limits_and_dissipation() {
    let prof = profile_10_2();
    let c = &prof.coeffs;
    let cp = prof.params.c_p;
    assert!(energy(&prof, prof.t_start).unwrap().abs() < 1e-6);
    let e_end = energy(&prof, prof.t_end()).unwrap();
    let e_eq = cp.powf(3.0) / 3.0 - c.k0 * cp * cp / 2.0;
    assert!(rel(e_end, e_eq) < 1e-6, "{e_end} vs {e_eq}");
    let d = dissipation_check(&prof).unwrap();
    assert!(d.max_rel_error <= 1e-8, "{}", d.max_rel_error);
    assert!(!d.critical_energies.is_empty());
    assert!(d.critical_energies.iter().all(|(_, e)| *e <= 0.0));
    assert!(d.h_nonincreasing);
}

#[test]
fn translation_equivariance() {
    let prof = profile_10_2();
    let moved = scale_to_beta(&prof, 3.0).unwrap();
    let direct = solve_singular(&prof.params, 3.0, 1e-6).unwrap();
    let lo = moved.r_min().max(direct.r_min()).ln();
    let hi = moved.r_max().min(direct.r_max()).ln();
    for i in 1..50 {
        let r = (lo + (hi - lo) * i as f64 / 50.0).exp();
        assert!(rel(moved.u(r).unwrap(), direct.u(r).unwrap()) <= 1e-6, "r={r}");
    }
    let same = scale_to_beta(&prof, prof.beta).unwrap();
    assert_eq!(same, *prof);
    // τ = log(β'/β)/μ_s
    let tau = (moved.t_start - prof.t_start).abs();
    assert!((tau - 3f64.ln() / 2.0).abs() < 1e-12);
}

#[test]
fn dilation_scales_far_coefficient() {
    let prof = profile_10_2();
    let eps = 0.5;
    let d = prof.dilated(eps);
    assert!(rel(d.beta, prof.beta * eps.powf(2.0)) < 1e-14);
    let r = 3.0;
    let lhs = d.u(r).unwrap();
    let rhs = eps.powf(-4.0) * prof.u(r / eps).unwrap();
    assert!(rel(lhs, rhs) < 1e-12);
}

#[test]
fn small_tail_normalization() {
    let prof = profile_10_2();
    let big = normalize_small_tail(&prof, 1.5 * prof.params.k_const).unwrap();
    assert_eq!(big.t_start, prof.t_start);
    let n = normalize_small_tail_to(&prof, 0.01, Some(1e6)).unwrap();
    assert!(n.r_max() >= 1e6);
    let pm = n.params.p - 1.0;
    for i in 0..=120 {
        let r = 10f64.powf(6.0 * i as f64 / 120.0);
        let v = r.powi(4) * n.u(r).unwrap().powf(pm);
        assert!(v <= 0.01 * (1.0 + 1e-9), "r={r} v={v}");
    }
    let a1 = normalize_small_tail(&prof, 0.01).unwrap();
    let a2 = normalize_small_tail(&prof, 0.02).unwrap();
    // larger bound, smaller applied dilation
    assert!(a2.t_start - prof.t_start <= a1.t_start - prof.t_start + 1e-12);
}

#[test]
fn kelvin_transform_properties() {
    let prof = profile_10_2();
    let k = kelvin_transform(&prof);
    assert_eq!(k.decay_exponent(), -2.0);
    let v0 = k.value(k.rho_min() * 10.0).unwrap();
    assert!(rel(v0, prof.beta) < 1e-3, "{v0}");
    let rho = k.rho_max() / 10.0;
    let tail = k.value(rho).unwrap() * rho.powf(2.0);
    assert!(rel(tail, prof.params.c_p) < 1e-3);
    for (a, b) in [(0.5, 1.5), (2.0, 4.0), (10.0, 30.0)] {
        assert!(k.weak_residual(a, b).unwrap() < 1e-6, "[{a}, {b}]");
    }
}

#[test]
fn export_round_trip() {
    let prof = profile_10_2();
    let mut buf = Vec::new();
    write_profile(&prof, &mut buf).unwrap();
    let back = read_profile(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back.states, prof.states);
    assert_eq!(back.t_start, prof.t_start);
    assert_eq!(back.dt, prof.dt);
    assert_eq!(back.beta, prof.beta);
    assert!(read_profile(BufReader::new(&b"nonsense\n"[..])).is_err());
}

#[test]
fn invalid_inputs() {
    let pr = validate_params(10, 2.0).unwrap();
    assert!(solve_singular(&pr, -1.0, 1e-6).is_err());
    assert!(solve_singular(&pr, 1.0, 0.0).is_err());
    let prof = profile_10_2();
    assert!(scale_to_beta(&prof, 0.0).is_err());
    assert!(normalize_small_tail(&prof, 0.0).is_err());
    assert!(prof.u(prof.r_max() * 2.0).is_err());
}

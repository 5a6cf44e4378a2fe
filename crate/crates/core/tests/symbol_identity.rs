use num_complex::Complex64;
use proptest::prelude::*;
use sbh::symbol::{complex_log_gamma, critical_line_indicial, symbol_indicial_identity, theta, theta_hyperbolic, SymbolQuery};
use sbh::Error;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// For integer `γ` the gamma ratio telescopes into a finite product.
fn theta_oracle(n: i64, gamma: u32, j: u32, xi: f64) -> f64 {
    let h = n as f64 / 2.0 - 1.0;
    let s = 0.5 * (h * h + (j as f64) * (j as f64 + n as f64 - 2.0)).sqrt();
    let g = gamma as f64;
    let mut prod = 1.0;
    for k in 0..gamma {
        let z = c(0.5 - 0.5 * g + s + k as f64, 0.5 * xi);
        prod *= z.norm_sqr();
    }
    4f64.powf(g) * prod
}

#[test]
fn log_gamma_special_values() {
    assert!(complex_log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
    let half = complex_log_gamma(c(0.5, 0.0)).unwrap();
    assert!((half.re - PI.sqrt().ln()).abs() < 1e-14);
    let mut fact = 1.0f64;
    for n in 1..20 {
        let v = complex_log_gamma(c(n as f64 + 1.0, 0.0)).unwrap();
        fact *= n as f64;
        assert!((v.re - fact.ln()).abs() <= 1e-13 * fact.ln().max(1.0), "n={n}");
    }
    for k in 0..5 {
        assert!(matches!(complex_log_gamma(c(-(k as f64), 0.0)), Err(Error::Pole(_))));
    }
    assert!(complex_log_gamma(c(f64::NAN, 0.0)).is_err());
}

#[test]
fn log_gamma_modulus_identities() {
    for y in [0.1, 0.7, 2.0, 5.0, 11.0] {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        let a = complex_log_gamma(c(0.5, y)).unwrap().re * 2.0;
        assert!((a - (PI / (PI * y).cosh()).ln()).abs() < 1e-12, "y={y}");
        // |Γ(iy)|² = π / (y sinh(πy))
        let b = complex_log_gamma(c(0.0, y)).unwrap().re * 2.0;
        assert!((b - (PI / (y * (PI * y).sinh())).ln()).abs() < 1e-12, "y={y}");
    }
}

#[test]
fn log_gamma_recurrence() {
    for z in [c(3.0, 4.0), c(-2.5, 0.3), c(0.1, -7.0), c(20.0, 1.0)] {
        let lhs = complex_log_gamma(z + 1.0).unwrap();
        let rhs = z.ln() + complex_log_gamma(z).unwrap();
        let d = lhs - rhs;
        // equality modulo 2πi
        let k = (d.im / (2.0 * PI)).round();
        assert!(d.re.abs() < 1e-12 && (d.im - 2.0 * PI * k).abs() < 1e-12, "z={z}");
    }
    // conjugate symmetry
    let z = c(1.3, 2.2);
    let a = complex_log_gamma(z).unwrap();
    let b = complex_log_gamma(z.conj()).unwrap();
    assert!((a - b.conj()).norm() < 1e-13);
}

#[test]
fn theta_reference_values() {
    let q = |j, xi| SymbolQuery { n: 10, gamma: 2.0, j, xi };
    assert!((theta(&q(0, 0.0)).unwrap() - 225.0).abs() < 1e-9);
    assert!((theta(&q(0, 1.0)).unwrap() - 260.0).abs() < 1e-9);
    for xi in [0.0, 1.0, 2.0, 5.0] {
        let want = ((6.0f64).powi(2) + 4.0 * xi * xi) * (100.0 + 4.0 * xi * xi) / 16.0;
        let got = theta(&q(0, xi)).unwrap();
        assert!((got - want).abs() <= 1e-10 * want, "xi={xi}: {got} vs {want}");
    }
}

#[test]
fn theta_matches_product_oracle() {
    for n in [3i64, 6, 10, 13] {
        for gamma in [1u32, 2] {
            if gamma as f64 >= n as f64 / 2.0 {
                continue;
            }
            for j in [0u32, 1, 4, 9] {
                for xi in [0.0, 0.3, 2.5, 8.0] {
                    let got = theta(&SymbolQuery { n, gamma: gamma as f64, j, xi }).unwrap();
                    let want = theta_oracle(n, gamma, j, xi);
                    assert!((got - want).abs() <= 1e-10 * want, "N={n} g={gamma} j={j} xi={xi}");
                }
            }
        }
    }
}

#[test]
fn theta_structure() {
    for gamma in [1.0, 1.5, 2.0] {
        for j in 0..6u32 {
            let mut last = 0.0;
            for xi in [0.0, 0.5, 1.0, 3.0, 10.0] {
                let q = SymbolQuery { n: 10, gamma, j, xi };
                let v = theta(&q).unwrap();
                let m = theta(&SymbolQuery { xi: -xi, ..q }).unwrap();
                assert!(v > 0.0 && (v - m).abs() <= 1e-13 * v);
                assert!(v >= last);
                last = v;
                assert_eq!(v.to_bits(), theta_hyperbolic(&q).unwrap().to_bits());
            }
        }
        let by_j: Vec<f64> =
            (0..8).map(|j| theta(&SymbolQuery { n: 10, gamma, j, xi: 1.0 }).unwrap()).collect();
        assert!(by_j.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn invalid_queries() {
    assert!(theta(&SymbolQuery { n: 10, gamma: 5.0, j: 0, xi: 0.0 }).is_err());
    assert!(theta(&SymbolQuery { n: 10, gamma: 0.0, j: 0, xi: 0.0 }).is_err());
    assert!(theta(&SymbolQuery { n: 10, gamma: 2.0, j: 0, xi: f64::INFINITY }).is_err());
    assert!(theta(&SymbolQuery { n: 1, gamma: 0.2, j: 0, xi: 0.0 }).is_err());
}

#[test]
fn critical_line_polynomial_is_real() {
    for j in 0..6 {
        for xi in [0.0, 0.7, 4.0] {
            let q = critical_line_indicial(10, j, xi);
            assert!(q.im.abs() <= 1e-12 * (1.0 + q.re.abs()));
            assert!(q.re > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symbol_equals_indicial_on_critical_line(n in 5i64..=16, j in 0u32..=12, xi in 0.0f64..10.0) {
        prop_assert!(symbol_indicial_identity(n, j, xi).unwrap() <= 1e-10);
    }
}

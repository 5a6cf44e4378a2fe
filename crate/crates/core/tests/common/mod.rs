#![allow(dead_code)]

use sbh::delaunay::{solve_singular, RadialProfile};
use sbh::validate_params;
use std::sync::{Arc, OnceLock};

/// The (10, 2) profile with β = 1, solved once per test binary.
pub fn profile_10_2() -> Arc<RadialProfile> {
    static P: OnceLock<Arc<RadialProfile>> = OnceLock::new();
    P.get_or_init(|| {
        let pr = validate_params(10, 2.0).unwrap();
        Arc::new(solve_singular(&pr, 1.0, 1e-6).unwrap())
    })
    .clone()
}

/// Coefficients of `∏ (μ - m_i)` from the highest power down, leading one dropped.
pub fn expand_monic(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &m in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, v) in c.iter().enumerate() {
            next[i] += v;
            next[i + 1] -= m * v;
        }
        c = next;
    }
    c[1..].to_vec()
}

/// `Δ²(r^γ φ_j) / r^{γ-4}` with `Δ(r^g φ_j) = [g(g+N-2) - λ_j] r^{g-2} φ_j`.
pub fn q_oracle(n: f64, lambda: f64, g: num_complex::Complex64) -> num_complex::Complex64 {
    let first = g * (g + n - 2.0) - lambda;
    let h = g - 2.0;
    let second = h * (h + n - 2.0) - lambda;
    first * second
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

//! Fourier symbol of the conformal operator of order `2γ` on the cylinder
//! `ℝ × S^{N-1}`, mode by mode.

use crate::error::{Error, Result};
use crate::indicial::{indicial_poly, sphere_eigenvalue};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolQuery {
    #[serde(rename = "N")]
    pub n: i64,
    pub gamma: f64,
    pub j: u32,
    pub xi: f64,
}

impl SymbolQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::DimensionTooSmall(self.n));
        }
        let half = self.n as f64 / 2.0;
        if !(self.gamma > 0.0 && self.gamma < half) {
            return Err(Error::InvalidArgument(format!("gamma {} outside (0, {half})", self.gamma)));
        }
        if !self.xi.is_finite() {
            return Err(Error::InvalidArgument("xi must be finite".into()));
        }
        Ok(())
    }
}

// B_{2k} / (2k (2k-1)) for k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// `log Γ(z)`, analytic off the negative real axis, with `log Γ(z+1) = log z + log Γ(z)`.
pub fn complex_log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("log Gamma at {}", z.re)));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pw = inv;
    for c in STIRLING {
        series += pw * c;
        pw *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift)
}

fn nu_j(n: i64, j: u32) -> f64 {
    let h = n as f64 / 2.0 - 1.0;
    (h * h + sphere_eigenvalue(j, n)).sqrt()
}

fn theta_impl(q: &SymbolQuery) -> Result<f64> {
    q.validate()?;
    let s = 0.5 * nu_j(q.n, q.j);
    let im = 0.5 * q.xi;
    let z1 = Complex64::new(0.5 + 0.5 * q.gamma + s, im);
    let z2 = Complex64::new(0.5 - 0.5 * q.gamma + s, im);
    let l1 = complex_log_gamma(z1)?;
    let l2 = complex_log_gamma(z2)?;
    Ok((2.0 * q.gamma * 2f64.ln() + 2.0 * l1.re - 2.0 * l2.re).exp())
}

/// `Θ_γ^j(ξ)` for the cylinder frequency `ξ`.
pub fn theta(q: &SymbolQuery) -> Result<f64> {
    theta_impl(q)
}

/// The same symbol read as a Fourier-Helgason multiplier on hyperbolic space.
pub fn theta_hyperbolic(q: &SymbolQuery) -> Result<f64> {
    theta_impl(q)
}

/// `Q_j((4-N)/2 + iξ)` for the bilaplacian without potential.
pub fn critical_line_indicial(n: i64, j: u32, xi: f64) -> Complex64 {
    let g = Complex64::new((4.0 - n as f64) / 2.0, xi);
    indicial_poly(n, sphere_eigenvalue(j, n), g)
}

/// `|Θ_2^j(ξ) - Q_j((4-N)/2 + iξ)| / (1 + |Q_j|)`.
pub fn symbol_indicial_identity(n: i64, j: u32, xi: f64) -> Result<f64> {
    let th = theta(&SymbolQuery { n, gamma: 2.0, j, xi })?;
    let q = critical_line_indicial(n, j, xi);
    Ok((Complex64::new(th, 0.0) - q).norm() / (1.0 + q.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        assert!(complex_log_gamma(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        let h = complex_log_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((h.re - 0.5 * PI.ln()).abs() < 1e-14 && h.im.abs() < 1e-15);
        assert!(matches!(complex_log_gamma(Complex64::new(-3.0, 0.0)), Err(Error::Pole(_))));
        // Γ(6) = 120
        let g6 = complex_log_gamma(Complex64::new(6.0, 0.0)).unwrap();
        assert!((g6.re - 120f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn theta_reference() {
        let q = SymbolQuery { n: 10, gamma: 2.0, j: 0, xi: 0.0 };
        assert!((theta(&q).unwrap() - 225.0).abs() < 1e-10);
        assert!(theta(&SymbolQuery { gamma: 5.0, ..q }).is_err());
    }
}

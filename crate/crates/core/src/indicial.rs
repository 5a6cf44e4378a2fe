//! Indicial roots of the linearized operator at the singular point and at infinity.

use crate::error::{Error, Result};
use crate::params::{emden_coeffs, EmdenCoeffs, Params};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which limiting potential enters the indicial polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    /// `A = A_p`, the limit of `p r^4 u^{p-1}` at the singularity.
    AtZero,
    /// `A = 0`, the limit at infinity.
    AtInfinity,
    Value(f64),
}

impl Potential {
    pub fn value(&self, params: &Params) -> f64 {
        match *self {
            Potential::AtZero => params.a_p,
            Potential::AtInfinity => 0.0,
            Potential::Value(a) => a,
        }
    }
}

/// Roots in the order `[++, +-, -+, --]`.
pub type Roots = [Complex64; 4];

pub const BRANCH_LABELS: [&str; 4] = ["++", "+-", "-+", "--"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicialData {
    pub j: u32,
    pub lambda_j: f64,
    pub roots_at_zero: Roots,
    pub roots_at_infinity: Roots,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightWindow {
    pub nu_lo: f64,
    pub nu_hi: f64,
    pub mu_lo: f64,
    pub nu: f64,
    pub mu: f64,
}

pub fn sphere_eigenvalue(j: u32, n: i64) -> f64 {
    let jf = j as f64;
    jf * (jf + n as f64 - 2.0)
}

/// `Q_j(γ)`: the indicial polynomial of `Δ²` on `r^γ φ_j`.
pub fn indicial_poly(n: i64, lambda: f64, g: Complex64) -> Complex64 {
    let nf = n as f64;
    let f1 = g * (g - 1.0) + (nf - 1.0) * g - lambda;
    let f2 = (g - 2.0) * (g - 3.0) + (nf - 1.0) * (g - 2.0) - lambda;
    f1 * f2
}

/// Closed-form roots of `Q_j(γ) = A`.
pub fn roots_for(n: i64, lambda: f64, a: f64) -> Roots {
    let nf = n as f64;
    let base = (nf - 2.0).powi(2) + 4.0 + 4.0 * lambda;
    let inner = Complex64::new((nf - 2.0).powi(2) + 4.0 * lambda + a, 0.0).sqrt();
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (idx, (s1, s2)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].iter().enumerate() {
        let outer = (Complex64::new(base, 0.0) + 4.0 * s2 * inner).sqrt();
        out[idx] = 0.5 * (Complex64::new(4.0 - nf, 0.0) + s1 * outer);
    }
    out
}

pub fn indicial_roots(params: &Params, j: u32) -> IndicialData {
    let lambda = sphere_eigenvalue(j, params.n);
    IndicialData {
        j,
        lambda_j: lambda,
        roots_at_zero: roots_for(params.n, lambda, params.a_p),
        roots_at_infinity: roots_for(params.n, lambda, 0.0),
    }
}

pub fn roots_with(params: &Params, j: u32, potential: Potential) -> Roots {
    roots_for(params.n, sphere_eigenvalue(j, params.n), potential.value(params))
}

/// `|Q_j(γ) - A| / (1 + |γ|^4)`, the scaled residual used throughout.
pub fn root_residual(n: i64, lambda: f64, a: f64, g: Complex64) -> f64 {
    (indicial_poly(n, lambda, g) - a).norm() / (1.0 + g.norm().powi(4))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub j: u32,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    #[serde(rename = "N")]
    pub n: i64,
    pub p: f64,
    pub j_max: u32,
    pub clauses: Vec<Clause>,
}

impl OrderingReport {
    pub fn all_hold(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&Clause> {
        self.clauses.iter().filter(|c| !c.holds).collect()
    }
}

pub fn verify_ordering(params: &Params, j_max: u32) -> OrderingReport {
    let nf = params.nf();
    let ell = -params.a();
    let mut clauses = Vec::new();
    let mut push = |name: &str, j: u32, holds: bool| {
        clauses.push(Clause { name: name.to_string(), j, holds })
    };
    let r0 = indicial_roots(params, 0).roots_at_zero;
    let (pp, pm, mp, mm) = (r0[0], r0[1], r0[2], r0[3]);
    let real_tol = 1e-12;
    push("gamma0_-+ real", 0, mp.im.abs() <= real_tol);
    push("gamma0_++ real", 0, pp.im.abs() <= real_tol);
    push("gamma0_-+ < 4-N", 0, mp.re < 4.0 - nf);
    push("4-N < -4/(p-1)", 0, 4.0 - nf < ell);
    push("-4/(p-1) < Re gamma0_--", 0, ell < mm.re);
    push("Re gamma0_-- <= (4-N)/2", 0, mm.re <= (4.0 - nf) / 2.0 + real_tol);
    push("(4-N)/2 <= Re gamma0_+-", 0, (4.0 - nf) / 2.0 <= pm.re + real_tol);
    push("Re gamma0_+- < 0", 0, pm.re < 0.0);
    push("2 < gamma0_++", 0, 2.0 < pp.re);
    for j in 1..=j_max {
        let d = indicial_roots(params, j);
        let z = d.roots_at_zero;
        let inf = d.roots_at_infinity;
        push("gamma_j_-+ < -4/(p-1)", j, z[2].re < ell && z[2].im.abs() <= real_tol);
        push("gamma_j_-- < -4/(p-1)", j, z[3].re < ell && z[3].im.abs() <= real_tol);
        push("Re gamma0_+- < gamma_j_++", j, pm.re < z[0].re && z[0].im.abs() <= real_tol);
        push("Re gamma0_+- < gamma_j_+-", j, pm.re < z[1].re && z[1].im.abs() <= real_tol);
        push("tilde gamma_j_++ >= 1", j, inf[0].re >= 1.0 - real_tol);
        push("tilde gamma_j_+- >= 1", j, inf[1].re >= 1.0 - real_tol);
        push("tilde gamma_j_-+ < 4-N", j, inf[2].re < 4.0 - nf);
        push("tilde gamma_j_-- < 4-N", j, inf[3].re < 4.0 - nf);
    }
    OrderingReport { n: params.n, p: params.p, j_max, clauses }
}

pub fn weight_window(params: &Params) -> Result<WeightWindow> {
    let nf = params.nf();
    let r0 = indicial_roots(params, 0).roots_at_zero;
    let nu_lo = -params.a();
    let nu_hi = r0[3].re;
    let mu_lo = r0[1].re;
    if nu_lo >= nu_hi {
        return Err(Error::Degenerate(format!(
            "empty weight window: nu_lo = {nu_lo} >= nu_hi = {nu_hi}"
        )));
    }
    let nu = 0.5 * (nu_lo + nu_hi);
    let mu = 4.0 - nf - nu;
    if mu <= mu_lo {
        return Err(Error::Degenerate(format!(
            "midpoint rule gives mu = {mu} <= mu_lo = {mu_lo}"
        )));
    }
    Ok(WeightWindow { nu_lo, nu_hi, mu_lo, nu, mu })
}

/// Roots of `μ⁴ + K3 μ³ + K2 μ² + K1 μ + K0`, sorted by real part, descending.
pub fn characteristic_roots(c: &EmdenCoeffs) -> Roots {
    let coef = [c.k0, c.k1, c.k2, c.k3];
    let mut comp = DMatrix::<f64>::zeros(4, 4);
    for i in 1..4 {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..4 {
        comp[(i, 3)] = -coef[i];
    }
    let ev = comp.complex_eigenvalues();
    let poly = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(1.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for k in (0..4).rev() {
            d = d * z + v;
            v = v * z + coef[k];
        }
        (v, d)
    };
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (o, z0) in out.iter_mut().zip(ev.iter()) {
        let mut z = *z0;
        for _ in 0..3 {
            let (v, d) = poly(z);
            if d.norm() == 0.0 {
                break;
            }
            z -= v / d;
        }
        *o = z;
    }
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    out
}

/// Largest distance between the characteristic roots and `-(γ + 4/(p-1))`, `γ ∈ {0, 2, 2-N, 4-N}`.
pub fn characteristic_correspondence(params: &Params) -> f64 {
    let c = emden_coeffs(params);
    let roots = characteristic_roots(&c);
    let nf = params.nf();
    let mut expected: Vec<f64> = [0.0, 2.0, 2.0 - nf, 4.0 - nf].iter().map(|g| -(g + params.a())).collect();
    expected.sort_by(|a, b| b.total_cmp(a));
    roots
        .iter()
        .zip(&expected)
        .map(|(z, e)| (z - e).norm() / (1.0 + e.abs()))
        .fold(0.0, f64::max)
}

use super::grid::RadialGrid;
use super::sphere_area;
use serde::{Deserialize, Serialize};

/// Nonlinearity `f(x, t) = λ|x|^α (1+t)^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FSpec {
    pub lambda: f64,
    pub p: f64,
    pub alpha_w: f64,
}

impl FSpec {
    pub fn f(&self, r: f64, t: f64) -> f64 {
        self.lambda * r.powf(self.alpha_w) * (1.0 + t.abs()).powf(self.p)
    }

    /// `F(x, t) = ∫_0^t f(x, s) ds`.
    pub fn primitive(&self, r: f64, t: f64) -> f64 {
        self.lambda * r.powf(self.alpha_w) * ((1.0 + t).powf(self.p + 1.0) - 1.0) / (self.p + 1.0)
    }
}

/// `Δu` at the nodes and at `r = 1` for the clamped solution of `Δ²u = g`.
pub fn laplacian_from_source(grid: &RadialGrid, g: &[f64]) -> (Vec<f64>, f64) {
    let nf = grid.dim();
    let weighted: Vec<f64> = grid.nodes.iter().zip(g).map(|(r, v)| r.powf(nf - 1.0) * v).collect();
    let mass = grid.cumulative(&weighted);
    let dw: Vec<f64> = grid.nodes.iter().zip(&mass).map(|(r, m)| r.powf(1.0 - nf) * m).collect();
    // u'(1) = 0 forces Δu(1) = ∫_0^1 t^N (Δu)'(t) dt
    let w1 = grid.total(&grid.nodes.iter().zip(&mass).map(|(r, m)| r * m).collect::<Vec<_>>());
    let cum = grid.cumulative(&dw);
    let tot = grid.total(&dw);
    (cum.iter().map(|c| w1 - (tot - c)).collect(), w1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Relative defect of the Pohozaev identity for a clamped solution of `Δ²u = f(x, u)`.
pub fn pohozaev_residual(grid: &RadialGrid, u: &[f64], f: &FSpec) -> PohozaevReport {
    let nf = grid.dim();
    let g: Vec<f64> = grid.nodes.iter().zip(u).map(|(r, v)| f.f(*r, *v)).collect();
    let (w, w1) = laplacian_from_source(grid, &g);
    let big_f: Vec<f64> = grid.nodes.iter().zip(u).map(|(r, v)| f.primitive(*r, *v)).collect();
    let a = (1.0 + f.alpha_w / nf) * grid.integrate(&big_f, 0.0);
    let b = (nf - 4.0) / (2.0 * nf) * grid.integrate(&w.iter().map(|x| x * x).collect::<Vec<_>>(), 0.0);
    let lhs = a - b;
    let rhs = w1 * w1 / (2.0 * nf);
    let scale = a.abs() + b.abs() + rhs.abs();
    let residual = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    PohozaevReport { lhs, rhs, residual }
}

/// `(∫ |u|^{2(N-β)/(N-4)} |x|^{-β})^{(N-4)/(N-β)} / ∫ (Δu)²`; `0/0` reads as 0.
pub fn hardy_sobolev_check(grid: &RadialGrid, u: &[f64], beta_hs: f64) -> f64 {
    let nf = grid.dim();
    let q = 2.0 * (nf - beta_hs) / (nf - 4.0);
    let s = sphere_area(grid.spec.n);
    let lhs_int = s * grid.integrate(&u.iter().map(|v| v.abs().powf(q)).collect::<Vec<_>>(), -beta_hs);
    let lap = grid.laplacian(u);
    let rhs = s * grid.integrate(&lap.iter().map(|x| x * x).collect::<Vec<_>>(), 0.0);
    if rhs == 0.0 && lhs_int == 0.0 {
        return 0.0;
    }
    lhs_int.powf((nf - 4.0) / (nf - beta_hs)) / rhs
}

//! Radial solver for `Δ²u = λ|y|^α (1+u)^p` on the unit ball with clamped
//! boundary conditions `u = ∂u/∂ν = 0`.
//!
//! The Green function is Boggio's closed form, averaged over spheres so that
//! a radial `f` maps to `u(r) = ∫_0^1 K(r,s) f(s) s^{N-1} ds`.

mod cache;
mod diag;
mod grid;
mod solve;

pub use cache::{load_or_build, read_kernel, write_kernel};
pub use diag::{hardy_sobolev_check, laplacian_from_source, pohozaev_residual, FSpec, PohozaevReport};
pub use grid::{GridSpec, RadialGrid};
pub use solve::{
    blowup_family, blowup_rescale, largest_convergent_lambda, picard_minimal, solve_with_amplitude, t_apply, AmplitudeSolution,
    BlowupMember, BlowupReport, PicardResult,
};

use crate::error::Result;
use crate::quad::{adaptive, gauss_on};
use rayon::prelude::*;

/// `|S^{m-1}|`, the area of the unit sphere in `ℝ^m`.
pub fn sphere_area(m: i64) -> f64 {
    use std::f64::consts::PI;
    match m {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 2.0) * sphere_area(m - 2),
    }
}

/// Boggio's Green function of `Δ²` on `B_1` with clamped conditions, for
/// `|x| = r`, `|y| = s`, `x·y = r s c`.
pub fn boggio_green(n: i64, r: f64, s: f64, c: f64) -> f64 {
    green_versine(n, r, s, 1.0 - c)
}

/// Same with `v = 1 - cos` supplied directly, which keeps `|x-y|` accurate for nearby points.
fn green_versine(n: i64, r: f64, s: f64, v: f64) -> f64 {
    let nf = n as f64;
    let d2 = (r - s) * (r - s) + 2.0 * r * s * v;
    let xy2 = (1.0 - r * s) * (1.0 - r * s) + 2.0 * r * s * v;
    let kn = 1.0 / (4.0 * sphere_area(n));
    kn * (xy2.powf(0.5 * (4.0 - nf)) / (4.0 - nf) - xy2.powf(0.5 * (2.0 - nf)) * d2 / (2.0 - nf)
        + d2.powf(0.5 * (4.0 - nf)) * (1.0 / (nf - 4.0) - 1.0 / (nf - 2.0)))
}

/// Spherical average `K(r, s) = ∫_{S^{N-1}} G(r e, s θ) dθ`.
pub fn ring_kernel(n: i64, r: f64, s: f64) -> Result<f64> {
    if r == 0.0 || s == 0.0 {
        return Ok(sphere_area(n) * green_versine(n, r, s, 0.0));
    }
    let e = n as f64 - 2.0;
    let f = |phi: f64| {
        let h = (0.5 * phi).sin();
        green_versine(n, r, s, 2.0 * h * h) * phi.sin().powf(e)
    };
    let pi = std::f64::consts::PI;
    // the integrand peaks at angles of order |r - s| / max(r, s)
    let split = (8.0 * (r - s).abs() / r.max(s)).clamp(1e-6, pi);
    let mut total = adaptive(f, 0.0, split, 1e-17, 1e-11)?;
    if split < pi {
        total += adaptive(f, split, pi, 1e-17, 1e-11)?;
    }
    Ok(sphere_area(n - 1) * total)
}

/// Discretized Green operator on a [`RadialGrid`].
///
/// `plain` maps nodal `f` to `u` with measure `s^{N-1} ds`, `weighted` with
/// `s^{N-1+α} ds`; the `origin_*` rows evaluate `u(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallKernel {
    pub grid: RadialGrid,
    pub plain: Vec<f64>,
    pub weighted: Vec<f64>,
    pub origin_plain: Vec<f64>,
    pub origin_weighted: Vec<f64>,
}

impl BallKernel {
    pub fn build(spec: GridSpec) -> Result<Self> {
        let grid = RadialGrid::new(spec)?;
        let n = grid.len();
        let q = spec.order;
        let nf = grid.dim();
        let (ep, ew) = (nf - 1.0, nf - 1.0 + spec.alpha_w);
        let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let r = grid.nodes[i];
                let own = i / q;
                let mut rp = vec![0.0; n];
                let mut rw = vec![0.0; n];
                for j in 0..n {
                    if j / q == own {
                        continue;
                    }
                    let s = grid.nodes[j];
                    let k = ring_kernel(spec.n, r, s)? * grid.weights[j];
                    rp[j] = k * s.powf(ep);
                    rw[j] = k * s.powf(ew);
                }
                // split the target's panel at r and interpolate f
                for (a, b) in [(grid.edges[own], r), (r, grid.edges[own + 1])] {
                    for (s, w) in gauss_on(q, a, b) {
                        let k = ring_kernel(spec.n, r, s)? * w;
                        let lag = grid.panel_lagrange(own, s);
                        for (m, l) in lag.iter().enumerate() {
                            rp[own * q + m] += k * s.powf(ep) * l;
                            rw[own * q + m] += k * s.powf(ew) * l;
                        }
                    }
                }
                Ok((rp, rw))
            })
            .collect();
        let mut plain = Vec::with_capacity(n * n);
        let mut weighted = Vec::with_capacity(n * n);
        for row in rows {
            let (a, b) = row?;
            plain.extend(a);
            weighted.extend(b);
        }
        let mut origin_plain = vec![0.0; n];
        let mut origin_weighted = vec![0.0; n];
        for j in 0..n {
            let s = grid.nodes[j];
            let k = ring_kernel(spec.n, 0.0, s)? * grid.weights[j];
            origin_plain[j] = k * s.powf(ep);
            origin_weighted[j] = k * s.powf(ew);
        }
        Ok(BallKernel { grid, plain, weighted, origin_plain, origin_weighted })
    }

    pub fn spec(&self) -> GridSpec {
        self.grid.spec
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub(crate) fn matvec(&self, m: &[f64], f: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|i| m[i * n..(i + 1) * n].iter().zip(f).map(|(a, b)| a * b).sum()).collect()
    }

    /// Nodal `u` solving `Δ²u = f`, `u = u' = 0` at `r = 1`.
    pub fn green_apply(&self, f: &[f64]) -> Vec<f64> {
        self.matvec(&self.plain, f)
    }

    /// As [`Self::green_apply`] for the source `|y|^α f`.
    pub fn green_apply_weighted(&self, f: &[f64]) -> Vec<f64> {
        self.matvec(&self.weighted, f)
    }

    pub fn value_at_origin(&self, f: &[f64], weighted: bool) -> f64 {
        let row = if weighted { &self.origin_weighted } else { &self.origin_plain };
        row.iter().zip(f).map(|(a, b)| a * b).sum()
    }
}

/// `(1-r²)² / (8N(N+2))`, the clamped solution for `f ≡ 1`.
pub fn clamped_unit_source(n: i64, r: f64) -> f64 {
    let nf = n as f64;
    (1.0 - r * r).powi(2) / (8.0 * nf * (nf + 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn green_symmetric_and_clamped() {
        let g1 = boggio_green(8, 0.3, 0.6, 0.2);
        let g2 = boggio_green(8, 0.6, 0.3, 0.2);
        assert!((g1 - g2).abs() < 1e-15 * g1.abs().max(1.0));
        assert!(boggio_green(8, 1.0, 0.4, 0.3).abs() < 1e-14);
        assert!(g1 > 0.0);
    }
}

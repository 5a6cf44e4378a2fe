//! Singular radial solutions in Emden-Fowler variables.
//!
//! With `s = e^{-t}` the profile is stored as `ū(t) = s^{4/(p-1)} u(s)`, which turns
//! `Δ²u = u^p` into the autonomous system
//! `ū'''' + K3 ū''' + K2 ū'' + K1 ū' + K0 ū = ū^p`.
//! The orbit leaves the origin as `t → -∞` (far field of `u`) and settles on
//! `c_p` as `t → +∞` (the singularity).

mod io;
mod report;
mod shoot;

pub use io::{read_profile, write_profile};
pub use report::{
    dissipation_check, energy, energy_h, kelvin_transform, monotonicity_report, ode_residual,
    radial_residual, DissipationCheck, KelvinProfile, MonotonicityReport, RateFit,
};
pub use shoot::{far_field_mismatch, solve_raw, solve_singular, solve_with, ShotClass, ShotOutcome, SolveOptions, SolveStats};

use crate::error::{Error, Result};
use crate::params::{emden_coeffs, EmdenCoeffs, Params};

pub type State = [f64; 4];

#[inline]
pub(crate) fn rhs(k: &EmdenCoeffs, p: f64, y: &State) -> State {
    let up = if y[0] > 0.0 { y[0].powf(p) } else { 0.0 };
    [
        y[1],
        y[2],
        y[3],
        up - k.k3 * y[3] - k.k2 * y[2] - k.k1 * y[1] - k.k0 * y[0],
    ]
}

#[inline]
pub(crate) fn rk4_step(k: &EmdenCoeffs, p: f64, y: &State, h: f64) -> State {
    let k1 = rhs(k, p, y);
    let y2 = add(y, &k1, 0.5 * h);
    let k2 = rhs(k, p, &y2);
    let y3 = add(y, &k2, 0.5 * h);
    let k3 = rhs(k, p, &y3);
    let y4 = add(y, &k3, h);
    let k4 = rhs(k, p, &y4);
    let mut out = *y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn add(y: &State, d: &State, h: f64) -> State {
    [y[0] + h * d[0], y[1] + h * d[1], y[2] + h * d[2], y[3] + h * d[3]]
}

/// Radial derivatives `f, f', ..., f^{(order)}` of `f(r) = r^m w(log r)` where
/// `w^{(k)}(log r) = sign^k d[k]`.
pub fn radial_derivs(m: f64, sign: f64, d: &[f64], r: f64, order: usize) -> Vec<f64> {
    let mut c = vec![0.0; order + 1];
    c[0] = 1.0;
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = 0.0;
        let mut sk = 1.0;
        for (k, ck) in c.iter().enumerate().take(n + 1) {
            acc += ck * sk * d[k];
            sk *= sign;
        }
        out.push(r.powf(m - n as f64) * acc);
        if n < order {
            let e = m - n as f64;
            let mut next = vec![0.0; order + 1];
            for k in 0..=n {
                next[k] += e * c[k];
                next[k + 1] += c[k];
            }
            c = next;
        }
    }
    out
}

/// Radial values `u, u', u'', u''', u''''` and the Laplacian family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialJet {
    pub r: f64,
    pub d: [f64; 6],
    pub n: f64,
}

impl RadialJet {
    pub fn value(&self) -> f64 {
        self.d[0]
    }
    pub fn laplacian(&self) -> f64 {
        self.d[2] + (self.n - 1.0) / self.r * self.d[1]
    }
    pub fn laplacian_prime(&self) -> f64 {
        let (n, r) = (self.n, self.r);
        self.d[3] + (n - 1.0) / r * self.d[2] - (n - 1.0) / (r * r) * self.d[1]
    }
    pub fn bilaplacian(&self) -> f64 {
        let (n, r) = (self.n, self.r);
        let c = (n - 1.0) * (n - 3.0);
        self.d[4] + 2.0 * (n - 1.0) / r * self.d[3] + c / (r * r) * self.d[2]
            - c / (r * r * r) * self.d[1]
    }
}

/// A sampled connecting orbit on a uniform grid in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub params: Params,
    pub coeffs: EmdenCoeffs,
    pub t_start: f64,
    pub dt: f64,
    pub states: Vec<State>,
    pub beta: f64,
    pub options: SolveOptions,
    pub stats: SolveStats,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.states.len() - 1)
    }

    pub fn t_grid(&self) -> Vec<f64> {
        (0..self.states.len()).map(|i| self.t(i)).collect()
    }

    /// Largest radius represented, `e^{-t_start}`.
    pub fn r_max(&self) -> f64 {
        (-self.t_start).exp()
    }

    pub fn r_min(&self) -> f64 {
        (-self.t_end()).exp()
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let slack = 1e-9 * self.dt;
        if !(t >= self.t_start - slack && t <= self.t_end() + slack) {
            return Err(Error::OutOfGrid { t, lo: self.t_start, hi: self.t_end() });
        }
        Ok(())
    }

    /// Dense state: one RK4 step from the nearest node.
    pub fn state_at(&self, t: f64) -> Result<State> {
        self.check_t(t)?;
        let x = (t - self.t_start) / self.dt;
        let i = (x.round().max(0.0) as usize).min(self.states.len() - 1);
        let h = t - self.t(i);
        if h == 0.0 {
            return Ok(self.states[i]);
        }
        Ok(rk4_step(&self.coeffs, self.params.p, &self.states[i], h))
    }

    /// `ū, ū', ..., ū^{(5)}` with the higher derivatives taken from the ODE.
    pub fn jet_from_state(&self, y: &State) -> [f64; 6] {
        let k = &self.coeffs;
        let p = self.params.p;
        let u = y[0].max(0.0);
        let d4 = u.powf(p) - k.k3 * y[3] - k.k2 * y[2] - k.k1 * y[1] - k.k0 * y[0];
        let d5 = p * u.powf(p - 1.0) * y[1] - k.k3 * d4 - k.k2 * y[3] - k.k1 * y[2] - k.k0 * y[1];
        [y[0], y[1], y[2], y[3], d4, d5]
    }

    pub fn jet_at(&self, t: f64) -> Result<[f64; 6]> {
        Ok(self.jet_from_state(&self.state_at(t)?))
    }

    /// Radial jet of `u` at radius `s`.
    pub fn u_jet(&self, s: f64) -> Result<RadialJet> {
        let d = self.jet_at(-s.ln())?;
        let v = radial_derivs(-self.params.a(), -1.0, &d, s, 5);
        Ok(RadialJet { r: s, d: [v[0], v[1], v[2], v[3], v[4], v[5]], n: self.params.nf() })
    }

    pub fn u(&self, s: f64) -> Result<f64> {
        Ok(self.u_jet(s)?.d[0])
    }

    pub fn u_prime(&self, s: f64) -> Result<f64> {
        Ok(self.u_jet(s)?.d[1])
    }

    pub fn laplacian(&self, s: f64) -> Result<f64> {
        Ok(self.u_jet(s)?.laplacian())
    }

    pub fn laplacian_prime(&self, s: f64) -> Result<f64> {
        Ok(self.u_jet(s)?.laplacian_prime())
    }

    /// `V_p = p r^4 u^{p-1}` at the node `i`, in terms of `ū`.
    pub fn potential_node(&self, i: usize) -> f64 {
        self.params.p * self.states[i][0].max(0.0).powf(self.params.p - 1.0)
    }

    pub fn potential_at(&self, s: f64) -> Result<f64> {
        let y = self.state_at(-s.ln())?;
        Ok(self.params.p * y[0].max(0.0).powf(self.params.p - 1.0))
    }

    /// Time translation `ū(t) ↦ ū(t - τ)`: dilation of `u` by `e^{-τ}`.
    pub fn shifted(&self, tau: f64) -> RadialProfile {
        let mut out = self.clone();
        out.t_start += tau;
        out.beta = self.beta * (-self.params.mu_slow() * tau).exp();
        out
    }

    /// Dilation `u_ε(x) = ε^{-4/(p-1)} u(x/ε)`.
    pub fn dilated(&self, eps: f64) -> RadialProfile {
        self.shifted(-eps.ln())
    }

    pub fn distance_to_equilibrium(&self, y: &State) -> f64 {
        let c = self.params.c_p;
        ((y[0] - c).abs()).max(y[1].abs()).max(y[2].abs()).max(y[3].abs()) / c
    }

    pub fn sup_bound_ratio(&self) -> f64 {
        let pm = self.params.p - 1.0;
        let sup = self.states.iter().map(|y| y[0].max(0.0).powf(pm)).fold(0.0, f64::max);
        sup / ((self.params.p + 1.0) / 2.0 * self.params.k_const)
    }
}

/// Same orbit, slow amplitude `beta_new`.
pub fn scale_to_beta(profile: &RadialProfile, beta_new: f64) -> Result<RadialProfile> {
    if !(beta_new > 0.0 && beta_new.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta_new}")));
    }
    if beta_new == profile.beta {
        return Ok(profile.clone());
    }
    let tau = -(beta_new / profile.beta).ln() / profile.params.mu_slow();
    let mut out = profile.shifted(tau);
    out.beta = beta_new;
    Ok(out)
}

/// Dilates so that `sup_{r ≥ 1} r^4 u^{p-1} ≤ alpha_norm`, re-solving for range when needed.
pub fn normalize_small_tail(profile: &RadialProfile, alpha_norm: f64) -> Result<RadialProfile> {
    normalize_small_tail_to(profile, alpha_norm, None)
}

/// As [`normalize_small_tail`], also guaranteeing coverage of `r ∈ [1, r_check]`.
pub fn normalize_small_tail_to(
    profile: &RadialProfile,
    alpha_norm: f64,
    r_check: Option<f64>,
) -> Result<RadialProfile> {
    if !(alpha_norm > 0.0) {
        return Err(Error::InvalidArgument("alpha_norm must be positive".into()));
    }
    let pm = profile.params.p - 1.0;
    let g = |y: &State| y[0].max(0.0).powf(pm);
    // first node (from the far end) where r^4 u^{p-1} exceeds alpha_norm
    let first = profile.states.iter().position(|y| g(y) > alpha_norm);
    let t_alpha = match first {
        None => f64::INFINITY,
        Some(0) => {
            return Err(Error::Degenerate("profile starts above the requested tail bound".into()))
        }
        Some(i) => {
            let (mut lo, mut hi) = (profile.t(i - 1), profile.t(i));
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(&profile.state_at(mid)?) > alpha_norm {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo
        }
    };
    // ρ_α = e^{-t_α}; dilation δ = min(1, 1/ρ_α) moves ρ_α to 1
    let delta = t_alpha.exp().min(1.0);
    let mut out = profile.dilated(delta);
    if let Some(rc) = r_check {
        if out.r_max() < rc {
            let beta = out.beta;
            let mut opts = profile.options.clone();
            opts.r_far = Some(rc * 1.5);
            opts.r_near = Some(out.r_min());
            out = solve_with(&out.params, beta, opts)?;
        }
    }
    Ok(out)
}

pub fn coeffs_for(params: &Params) -> EmdenCoeffs {
    emden_coeffs(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_derivs_power() {
        // f(r) = r^m e^{c log r} = r^{m+c}
        let (m, c, r): (f64, f64, f64) = (-2.5, 1.5, 1.7);
        let d: Vec<f64> = (0..6).map(|k| c.powi(k) * (c * r.ln()).exp()).collect();
        let v = radial_derivs(m, 1.0, &d, r, 4);
        let e = m + c;
        let mut expect = r.powf(e);
        for (n, vn) in v.iter().enumerate() {
            assert!((vn - expect).abs() < 1e-12 * expect.abs().max(1.0), "n={n}");
            expect *= (e - n as f64) / r;
        }
    }
}

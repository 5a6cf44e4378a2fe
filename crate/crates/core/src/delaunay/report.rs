use super::{radial_derivs, RadialJet, RadialProfile, State};
use crate::error::Result;
use crate::quad::{gauss_on, linear_fit};
use serde::{Deserialize, Serialize};

/// `E = ū^{p+1}/(p+1) - K0 ū²/2 - K2 ū'²/2 + ū''²/2`.
pub fn energy_of(profile: &RadialProfile, y: &State) -> f64 {
    let p = profile.params.p;
    let k = &profile.coeffs;
    y[0].max(0.0).powf(p + 1.0) / (p + 1.0) - 0.5 * k.k0 * y[0] * y[0] - 0.5 * k.k2 * y[1] * y[1]
        + 0.5 * y[2] * y[2]
}

pub fn energy(profile: &RadialProfile, t: f64) -> Result<f64> {
    Ok(energy_of(profile, &profile.state_at(t)?))
}

/// `H = E - ū'''ū' - K3 ū''ū'`, which satisfies `H' = K1 ū'² - K3 ū''²`.
pub fn energy_h_of(profile: &RadialProfile, y: &State) -> f64 {
    energy_of(profile, y) - y[3] * y[1] - profile.coeffs.k3 * y[2] * y[1]
}

pub fn energy_h(profile: &RadialProfile, t: f64) -> Result<f64> {
    Ok(energy_h_of(profile, &profile.state_at(t)?))
}

fn dissipation(profile: &RadialProfile, y: &State) -> f64 {
    profile.coeffs.k1 * y[1] * y[1] - profile.coeffs.k3 * y[2] * y[2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationCheck {
    /// `max |H(t_i) - H(t_0) - ∫ D| / max |H|` over the grid.
    pub max_rel_error: f64,
    /// `E` at the critical points of `ū`, all of which must be nonpositive.
    pub critical_energies: Vec<(f64, f64)>,
    pub h_nonincreasing: bool,
}

pub fn dissipation_check(profile: &RadialProfile) -> Result<DissipationCheck> {
    let n = profile.len();
    let dt = profile.dt;
    let h: Vec<f64> = profile.states.iter().map(|y| energy_h_of(profile, y)).collect();
    let scale = h.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    let mut crit = Vec::new();
    let mut mono = true;
    for i in 0..n - 1 {
        let tm = profile.t(i) + 0.5 * dt;
        let ym = profile.state_at(tm)?;
        acc += dt / 6.0
            * (dissipation(profile, &profile.states[i])
                + 4.0 * dissipation(profile, &ym)
                + dissipation(profile, &profile.states[i + 1]));
        worst = worst.max((h[i + 1] - h[0] - acc).abs() / scale);
        if h[i + 1] > h[i] + 1e-9 * scale {
            mono = false;
        }
        let (a, b) = (profile.states[i][1], profile.states[i + 1][1]);
        if a > 0.0 && b <= 0.0 || a < 0.0 && b >= 0.0 {
            // locate ū' = 0 by linear interpolation then evaluate densely
            let t = profile.t(i) + dt * a / (a - b);
            crit.push((t, energy(profile, t)?));
        }
    }
    Ok(DissipationCheck { max_rel_error: worst, critical_energies: crit, h_nonincreasing: mono })
}

/// `max |ū'''' + K3ū''' + K2ū'' + K1ū' + K0ū - ū^p| / (1 + ū^p)` with `ū''''`
/// from fourth-order differences of the stored `ū'''`.
pub fn ode_residual(profile: &RadialProfile) -> f64 {
    let s = &profile.states;
    let k = &profile.coeffs;
    let p = profile.params.p;
    let h = profile.dt;
    let mut worst = 0.0f64;
    for i in 2..s.len().saturating_sub(2) {
        let d4 = (-s[i + 2][3] + 8.0 * s[i + 1][3] - 8.0 * s[i - 1][3] + s[i - 2][3]) / (12.0 * h);
        let y = &s[i];
        let up = y[0].max(0.0).powf(p);
        let r = d4 + k.k3 * y[3] + k.k2 * y[2] + k.k1 * y[1] + k.k0 * y[0] - up;
        worst = worst.max(r.abs() / (1.0 + up));
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub name: String,
    pub nominal: f64,
    pub fitted: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub nodes_checked: usize,
    pub u_prime_violations: usize,
    pub laplacian_violations: usize,
    pub laplacian_prime_violations: usize,
    pub rates: Vec<RateFit>,
}

impl MonotonicityReport {
    pub fn all_ok(&self) -> bool {
        self.u_prime_violations == 0
            && self.laplacian_violations == 0
            && self.laplacian_prime_violations == 0
            && self.rates.iter().all(|r| r.ok)
    }
}

fn jet_at_node(profile: &RadialProfile, i: usize) -> RadialJet {
    let d = profile.jet_from_state(&profile.states[i]);
    let r = (-profile.t(i)).exp();
    let v = radial_derivs(-profile.params.a(), -1.0, &d, r, 5);
    RadialJet { r, d: [v[0], v[1], v[2], v[3], v[4], v[5]], n: profile.params.nf() }
}

pub fn monotonicity_report(profile: &RadialProfile) -> MonotonicityReport {
    let n = profile.len();
    let mut rep = MonotonicityReport {
        nodes_checked: 0,
        u_prime_violations: 0,
        laplacian_violations: 0,
        laplacian_prime_violations: 0,
        rates: Vec::new(),
    };
    for i in 1..n - 1 {
        let j = jet_at_node(profile, i);
        rep.nodes_checked += 1;
        if !(j.d[1] < 0.0) {
            rep.u_prime_violations += 1;
        }
        if !(j.laplacian() < 0.0) {
            rep.laplacian_violations += 1;
        }
        if !(j.laplacian_prime() > 0.0) {
            rep.laplacian_prime_violations += 1;
        }
    }
    let nf = profile.params.nf();
    let a = profile.params.a();
    let window = ((1.0 / profile.dt) as usize).min(n / 4).max(8);
    let mut fit = |name: &str, idx: Vec<usize>, nominal: f64, pick: &dyn Fn(&RadialJet) -> f64| {
        let xs: Vec<f64> = idx.iter().map(|&i| -profile.t(i)).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| pick(&jet_at_node(profile, i)).abs().ln()).collect();
        let fitted = linear_fit(&xs, &ys).0;
        rep.rates.push(RateFit {
            name: name.to_string(),
            nominal,
            fitted,
            ok: (fitted - nominal).abs() <= 0.05,
        });
    };
    let far: Vec<usize> = (1..window).collect();
    let near: Vec<usize> = (n - window..n - 1).collect();
    fit("far u", far.clone(), 4.0 - nf, &|j| j.d[0]);
    fit("far u'", far.clone(), 3.0 - nf, &|j| j.d[1]);
    fit("far Lu", far.clone(), 2.0 - nf, &|j| j.laplacian());
    fit("far Lu'", far, 1.0 - nf, &|j| j.laplacian_prime());
    fit("near u", near.clone(), -a, &|j| j.d[0]);
    fit("near u'", near.clone(), -a - 1.0, &|j| j.d[1]);
    fit("near Lu", near.clone(), -a - 2.0, &|j| j.laplacian());
    fit("near Lu'", near, -a - 3.0, &|j| j.laplacian_prime());
    rep
}

/// Residual of the radial first-order system for `(u, u', Δu, (Δu)')` at `r`,
/// using fourth-order differences of the r-view accessors.
pub fn radial_residual(profile: &RadialProfile, r: f64) -> Result<f64> {
    let nf = profile.params.nf();
    let p = profile.params.p;
    let h = 1e-3 * r;
    let vals = |x: f64| -> Result<[f64; 4]> {
        let j = profile.u_jet(x)?;
        Ok([j.d[0], j.d[1], j.laplacian(), j.laplacian_prime()])
    };
    let (m2, m1, p1, p2) = (vals(r - 2.0 * h)?, vals(r - h)?, vals(r + h)?, vals(r + 2.0 * h)?);
    let c = vals(r)?;
    let d: Vec<f64> = (0..4).map(|k| (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h)).collect();
    let expect = [
        c[1],
        c[2] - (nf - 1.0) / r * c[1],
        c[3],
        c[0].max(0.0).powf(p) - (nf - 1.0) / r * c[3],
    ];
    let mut worst = 0.0f64;
    for k in 0..4 {
        let scale = d[k].abs().max(expect[k].abs()).max(1e-300);
        worst = worst.max((d[k] - expect[k]).abs() / scale);
    }
    Ok(worst)
}

/// `ũ(ρ) = ρ^{4-N} u(1/ρ)`, which solves `Δ²ũ = ρ^α ũ^p` and is bounded at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct KelvinProfile {
    pub profile: RadialProfile,
    /// `ũ(ρ) = ρ^{exponent} ū(log ρ)`.
    pub exponent: f64,
}

pub fn kelvin_transform(profile: &RadialProfile) -> KelvinProfile {
    KelvinProfile { profile: profile.clone(), exponent: -profile.params.mu_slow() }
}

impl KelvinProfile {
    pub fn rho_min(&self) -> f64 {
        self.profile.t_start.exp()
    }

    pub fn rho_max(&self) -> f64 {
        self.profile.t_end().exp()
    }

    /// `ũ(0⁺)`, the far-field coefficient of `u`.
    pub fn value_at_origin(&self) -> f64 {
        self.profile.beta
    }

    /// Exponent of the decay at infinity, `-(4+α)/(p-1)`.
    pub fn decay_exponent(&self) -> f64 {
        self.exponent
    }

    pub fn jet(&self, rho: f64) -> Result<RadialJet> {
        let d = self.profile.jet_at(rho.ln())?;
        let v = radial_derivs(self.exponent, 1.0, &d, rho, 5);
        Ok(RadialJet { r: rho, d: [v[0], v[1], v[2], v[3], v[4], v[5]], n: self.profile.params.nf() })
    }

    pub fn value(&self, rho: f64) -> Result<f64> {
        Ok(self.jet(rho)?.d[0])
    }

    /// Relative weak residual `∫ΔũΔφ ρ^{N-1} - ∫ρ^α ũ^p φ ρ^{N-1}` against the bump
    /// `φ = (ρ-a)^4 (b-ρ)^4` on `[a, b]`.
    pub fn weak_residual(&self, a: f64, b: f64) -> Result<f64> {
        let nf = self.profile.params.nf();
        let p = self.profile.params.p;
        let al = self.profile.params.alpha_w;
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut mag = 0.0;
        let panels = 16;
        for k in 0..panels {
            let lo = a + (b - a) * k as f64 / panels as f64;
            let hi = a + (b - a) * (k + 1) as f64 / panels as f64;
            for (x, w) in gauss_on(12, lo, hi) {
                let (u, v) = (x - a, b - x);
                let phi = u.powi(4) * v.powi(4);
                let d1 = 4.0 * u.powi(3) * v.powi(4) - 4.0 * u.powi(4) * v.powi(3);
                let d2 = 12.0 * u * u * v.powi(4) - 32.0 * u.powi(3) * v.powi(3) + 12.0 * u.powi(4) * v * v;
                let lphi = d2 + (nf - 1.0) / x * d1;
                let j = self.jet(x)?;
                let meas = w * x.powf(nf - 1.0);
                lhs += j.laplacian() * lphi * meas;
                let f = x.powf(al) * j.d[0].max(0.0).powf(p) * phi * meas;
                rhs += f;
                mag += f.abs();
            }
        }
        Ok((lhs - rhs).abs() / mag.max(1e-300))
    }
}

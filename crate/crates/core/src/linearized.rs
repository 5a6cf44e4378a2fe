//! Mode decomposition of the linearized operator `Δ² - p u^{p-1}` around a
//! singular profile.
//!
//! In `τ = log r`, `r^4` times the mode operator is the constant-coefficient
//! polynomial `Q_j(D)` minus the potential `V_p(e^τ) = p r^4 u^{p-1}`.

use crate::delaunay::RadialProfile;
use crate::error::{Error, Result};
use crate::indicial::{indicial_poly, roots_for, sphere_eigenvalue};
use crate::params::Params;
use crate::quad::{gauss_on, linear_fit};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

pub fn mode_coefficients(n: i64, j: u32) -> ModeCoeffs {
    let nf = n as f64;
    let l = sphere_eigenvalue(j, n);
    ModeCoeffs {
        a1: 2.0 * (nf - 1.0),
        a2: nf * nf - 4.0 * nf + 3.0 - 2.0 * l,
        a3: (nf - 3.0) * (nf - 1.0 + 2.0 * l),
        a4: 2.0 * (nf - 4.0) * l + l * l,
    }
}

impl ModeCoeffs {
    /// Monic coefficients `[b0, b1, b2, b3]` of `r^4 L` acting on `e^{γτ}`.
    pub fn monic(&self) -> [f64; 4] {
        [
            self.a4,
            -6.0 + 2.0 * self.a1 - self.a2 - self.a3,
            11.0 - 3.0 * self.a1 + self.a2,
            -6.0 + self.a1,
        ]
    }

    /// `γ(γ-1)(γ-2)(γ-3) + a1 γ(γ-1)(γ-2) + a2 γ(γ-1) - a3 γ + a4`.
    pub fn falling_poly(&self, g: Complex64) -> Complex64 {
        let f1 = g;
        let f2 = f1 * (g - 1.0);
        let f3 = f2 * (g - 2.0);
        let f4 = f3 * (g - 3.0);
        f4 + self.a1 * f3 + self.a2 * f2 - self.a3 * f1 + self.a4
    }
}

#[derive(Debug, Clone)]
pub enum ModePotential {
    Profile(Arc<RadialProfile>),
    Zero,
    Constant(f64),
}

#[derive(Debug, Clone)]
pub struct ModeData {
    pub n: i64,
    pub j: u32,
    pub lambda_j: f64,
    pub coeffs: ModeCoeffs,
    pub potential: ModePotential,
}

impl ModeData {
    pub fn new(n: i64, j: u32, potential: ModePotential) -> Self {
        ModeData { n, j, lambda_j: sphere_eigenvalue(j, n), coeffs: mode_coefficients(n, j), potential }
    }

    pub fn from_profile(profile: &Arc<RadialProfile>, j: u32) -> Self {
        Self::new(profile.params.n, j, ModePotential::Profile(profile.clone()))
    }

    /// Limit of the potential at the origin (`at_zero = true`) or at infinity.
    pub fn limit_potential(&self, at_zero: bool) -> f64 {
        match &self.potential {
            ModePotential::Profile(p) => {
                if at_zero {
                    p.params.a_p
                } else {
                    0.0
                }
            }
            ModePotential::Zero => 0.0,
            ModePotential::Constant(a) => *a,
        }
    }

    fn q_shift(&self, z: Complex64, a: f64) -> Complex64 {
        indicial_poly(self.n, self.lambda_j, z) - a
    }

    /// `r^4` times the mode operator applied to the jet `w, w', ..., w''''` at `r`.
    pub fn apply(&self, r: f64, w: &[f64; 5], v: f64) -> (f64, f64) {
        let c = &self.coeffs;
        let terms = [
            r.powi(4) * w[4],
            c.a1 * r.powi(3) * w[3],
            c.a2 * r * r * w[2],
            -c.a3 * r * w[1],
            (c.a4 - v) * w[0],
        ];
        let sum: f64 = terms.iter().sum();
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        (sum, scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Seed {
    AtZero(Complex64),
    AtInfinity(Complex64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    pub j: u32,
    pub seed: Seed,
    /// `log r` at the samples, in integration order.
    pub tau: Vec<f64>,
    /// Normalized samples; the true value is `w * exp(log_scale)`.
    pub w: Vec<Complex64>,
    pub log_scale: Vec<f64>,
    /// `d log|w| / d log r` fitted at the end of the integration.
    pub far_exponent: f64,
    /// `|w1/w0|` of the series correction at the seed.
    pub seed_correction: f64,
}

impl ModeSolution {
    pub fn r(&self) -> Vec<f64> {
        self.tau.iter().map(|t| t.exp()).collect()
    }

    /// `log |w|` at every sample.
    pub fn log_abs(&self) -> Vec<f64> {
        self.w.iter().zip(&self.log_scale).map(|(w, s)| w.norm().ln() + s).collect()
    }
}

type CState = [Complex64; 4];

/// Samples of the potential along an integration path in `τ`.
struct Path {
    tau0: f64,
    h: f64,
    steps: usize,
    /// potential at half-step `k`, `τ = τ0 + k h/2`
    v: Vec<f64>,
    /// derivative of the potential in `τ` at the seed
    dv0: f64,
}

fn build_path(mode: &ModeData, tau_from: f64, tau_to: f64) -> Result<Path> {
    match &mode.potential {
        ModePotential::Profile(prof) => {
            // τ = -t; step two profile nodes so that half-steps land on nodes
            let idx = |tau: f64| ((-tau - prof.t_start) / prof.dt).round();
            let ia = idx(tau_from);
            let ib = idx(tau_to);
            let last = (prof.len() - 1) as f64;
            if ia < 0.0 || ib < 0.0 || ia > last || ib > last {
                return Err(Error::InvalidArgument(format!(
                    "interval exp([{tau_from}, {tau_to}]) outside the profile range [{:e}, {:e}]",
                    prof.r_min(),
                    prof.r_max()
                )));
            }
            let (ia, ib) = (ia as i64, ib as i64);
            let dir: i64 = if ib < ia { -1 } else { 1 };
            let steps = ((ib - ia).abs() / 2) as usize;
            let v = (0..=2 * steps).map(|k| prof.potential_node((ia + dir * k as i64) as usize)).collect();
            let y = prof.states[ia as usize];
            let p = prof.params.p;
            let dvdt = p * (p - 1.0) * y[0].max(1e-300).powf(p - 2.0) * y[1];
            Ok(Path { tau0: -prof.t(ia as usize), h: -(dir as f64) * 2.0 * prof.dt, steps, v, dv0: -dvdt })
        }
        _ => {
            let a = mode.limit_potential(true);
            let gmax = roots_for(mode.n, mode.lambda_j, a).iter().fold(1.0f64, |m, g| m.max(g.norm()));
            let hmax = (0.05 / gmax).min(5e-4);
            let steps = ((tau_to - tau_from).abs() / hmax).ceil().max(1.0) as usize;
            let h = (tau_to - tau_from) / steps as f64;
            Ok(Path { tau0: tau_from, h, steps, v: vec![a; 2 * steps + 1], dv0: 0.0 })
        }
    }
}

#[inline]
fn lin_rhs(b: &[f64; 4], v: f64, y: &CState) -> CState {
    [y[1], y[2], y[3], -(b[3] * y[3] + b[2] * y[2] + b[1] * y[1] + (b[0] - v) * y[0])]
}

#[inline]
fn lin_step(b: &[f64; 4], v0: f64, vm: f64, v1: f64, y: &CState, h: f64) -> CState {
    let ax = |y: &CState, d: &CState, s: f64| -> CState {
        [y[0] + d[0] * s, y[1] + d[1] * s, y[2] + d[2] * s, y[3] + d[3] * s]
    };
    let k1 = lin_rhs(b, v0, y);
    let k2 = lin_rhs(b, vm, &ax(y, &k1, 0.5 * h));
    let k3 = lin_rhs(b, vm, &ax(y, &k2, 0.5 * h));
    let k4 = lin_rhs(b, v1, &ax(y, &k3, h));
    let mut out = *y;
    for i in 0..4 {
        out[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

fn cnorm(y: &CState) -> f64 {
    y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Seed state `(w, Dw, D²w, D³w)` at the start of `path` with the first series correction.
fn seed_state(mode: &ModeData, g: Complex64, at_zero: bool, path: &Path) -> (CState, f64) {
    let mut y: CState = [Complex64::new(1.0, 0.0), g, g * g, g * g * g];
    let ModePotential::Profile(prof) = &mode.potential else {
        return (y, 0.0);
    };
    let a_lim = mode.limit_potential(at_zero);
    let dv = path.v[0] - a_lim;
    let mut terms: Vec<(Complex64, Complex64)> = Vec::new();
    if at_zero {
        let r0 = roots_for(prof.params.n, 0.0, prof.params.a_p);
        let a = prof.params.a();
        // decay rates of ū - c_p in τ = -t
        let kappa = r0[1] + a;
        if kappa.im.abs() > 1e-12 {
            let x = dv;
            let yv = (kappa.re * x - path.dv0) / kappa.im;
            let e = Complex64::new(x, yv);
            terms.push((kappa, 0.5 * e));
            terms.push((kappa.conj(), 0.5 * e.conj()));
        } else {
            let k = (r0[1] + a).re.min((r0[0] + a).re);
            terms.push((Complex64::new(k, 0.0), Complex64::new(dv, 0.0)));
        }
    } else {
        let k = -(prof.params.p - 1.0) * prof.params.mu_slow();
        terms.push((Complex64::new(k, 0.0), Complex64::new(dv, 0.0)));
    }
    let mut corr = Complex64::new(0.0, 0.0);
    for (kappa, e) in terms {
        let z = g + kappa;
        let denom = mode.q_shift(z, a_lim);
        let c = e / denom;
        corr += c;
        let mut zk = Complex64::new(1.0, 0.0);
        for item in y.iter_mut() {
            *item += c * zk;
            zk *= z;
        }
    }
    (y, corr.norm())
}

fn check_root(mode: &ModeData, g: Complex64, at_zero: bool) -> Result<()> {
    let a = mode.limit_potential(at_zero);
    let res = mode.q_shift(g, a).norm() / (1.0 + g.norm().powi(4));
    if res > 1e-8 {
        return Err(Error::NotARoot(format!("{g}"), res));
    }
    Ok(())
}

fn tail_slope(tau: &[f64], logw: &[f64]) -> f64 {
    let n = tau.len();
    let span = (tau[n - 1] - tau[0]).abs();
    let win = (0.1 * span).min(1.0);
    let start = (0..n).find(|&i| (tau[n - 1] - tau[i]).abs() <= win).unwrap_or(0).min(n.saturating_sub(3));
    linear_fit(&tau[start..], &logw[start..]).0
}

/// Integrates the mode equation from an asymptotic seed across `interval = (r_a, r_b)`.
pub fn mode_solve(mode: &ModeData, seed: Seed, interval: (f64, f64)) -> Result<ModeSolution> {
    let (ra, rb) = interval;
    if !(ra > 0.0 && rb > ra) {
        return Err(Error::InvalidArgument(format!("bad interval ({ra}, {rb})")));
    }
    let (g, at_zero) = match seed {
        Seed::AtZero(g) => (g, true),
        Seed::AtInfinity(g) => (g, false),
    };
    check_root(mode, g, at_zero)?;
    let (from, to) = if at_zero { (ra.ln(), rb.ln()) } else { (rb.ln(), ra.ln()) };
    let path = build_path(mode, from, to)?;
    let (mut y, corr) = seed_state(mode, g, at_zero, &path);
    let b = mode.coeffs.monic();
    let mut tau = Vec::with_capacity(path.steps + 1);
    let mut w = Vec::with_capacity(path.steps + 1);
    let mut ls = Vec::with_capacity(path.steps + 1);
    let mut log_scale = 0.0;
    tau.push(path.tau0);
    w.push(y[0]);
    ls.push(0.0);
    for k in 0..path.steps {
        y = lin_step(&b, path.v[2 * k], path.v[2 * k + 1], path.v[2 * k + 2], &y, path.h);
        let nrm = cnorm(&y);
        let t_here = path.tau0 + (k + 1) as f64 * path.h;
        if !nrm.is_finite() {
            return Err(Error::Overflow(-t_here));
        }
        if nrm > 1e100 || nrm < 1e-100 {
            for z in y.iter_mut() {
                *z /= nrm;
            }
            log_scale += nrm.ln();
        }
        tau.push(t_here);
        w.push(y[0]);
        ls.push(log_scale);
    }
    let logw: Vec<f64> = w.iter().zip(&ls).map(|(z, s)| z.norm().ln() + s).collect();
    let far = tail_slope(&tau, &logw);
    Ok(ModeSolution { j: mode.j, seed, tau, w, log_scale: ls, far_exponent: far, seed_correction: corr })
}

/// Integrates several seeds together with continuous orthonormalization and
/// returns the growth exponents of the nested spans over the final window.
fn span_exponents(mode: &ModeData, roots: &[Complex64], tau_from: f64, tau_to: f64) -> Result<Vec<f64>> {
    let path = build_path(mode, tau_from, tau_to)?;
    let b = mode.coeffs.monic();
    let m = roots.len();
    let mut cols: Vec<CState> = roots.iter().map(|&g| seed_state(mode, g, true, &path).0).collect();
    let mut logr = vec![0.0f64; m];
    let mut hist: Vec<(f64, Vec<f64>)> = Vec::new();
    let orth = |cols: &mut Vec<CState>, logr: &mut Vec<f64>| {
        for i in 0..cols.len() {
            for k in 0..i {
                let proj: Complex64 = (0..4).map(|c| cols[k][c].conj() * cols[i][c]).sum();
                let ck = cols[k];
                for c in 0..4 {
                    cols[i][c] -= proj * ck[c];
                }
            }
            let nrm = cnorm(&cols[i]);
            for c in 0..4 {
                cols[i][c] /= nrm;
            }
            logr[i] += nrm.ln();
        }
    };
    orth(&mut cols, &mut logr);
    hist.push((path.tau0, logr.clone()));
    for k in 0..path.steps {
        for col in cols.iter_mut() {
            *col = lin_step(&b, path.v[2 * k], path.v[2 * k + 1], path.v[2 * k + 2], col, path.h);
        }
        if (k + 1) % 8 == 0 || k + 1 == path.steps {
            orth(&mut cols, &mut logr);
            hist.push((path.tau0 + (k + 1) as f64 * path.h, logr.clone()));
        }
        if cols.iter().any(|c| !cnorm(c).is_finite()) {
            return Err(Error::Overflow(-(path.tau0 + (k + 1) as f64 * path.h)));
        }
    }
    let taus: Vec<f64> = hist.iter().map(|h| h.0).collect();
    Ok((0..m)
        .map(|i| {
            let ys: Vec<f64> = hist.iter().map(|h| h.1[i]).collect();
            tail_slope(&taus, &ys)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    NotCertified,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeVerdict {
    pub j: u32,
    pub verdict: Verdict,
    pub route: String,
    pub admissible: Vec<Complex64>,
    /// Far-field exponent of each admissible branch integrated alone.
    pub branch_exponents: Vec<f64>,
    /// Growth exponent of the least-growing admissible combination.
    pub min_span_exponent: Option<f64>,
    pub c_bar: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    #[serde(rename = "N")]
    pub n: i64,
    pub p: f64,
    pub mu: f64,
    pub modes: Vec<ModeVerdict>,
}

impl InjectivityReport {
    pub fn no_failures(&self) -> bool {
        self.modes.iter().all(|m| m.verdict != Verdict::Fail)
    }
}

/// Per-mode corroboration of injectivity on the weight `r^μ` at the origin.
///
/// Modes `j ≥ N+1` with `C̄ < 1` pass by certificate; `integrate_certified`
/// also runs the integration route for them.
pub fn injectivity_scan(
    profile: &Arc<RadialProfile>,
    j_range: std::ops::RangeInclusive<u32>,
    mu: f64,
    integrate_certified: bool,
) -> Result<InjectivityReport> {
    let params = profile.params;
    let nf = params.nf();
    let tau_from = profile.r_min().ln() + 2.0 * profile.dt;
    let tau_to = profile.r_max().ln() - 2.0 * profile.dt;
    let js: Vec<u32> = j_range.collect();
    let modes: Vec<Result<ModeVerdict>> = js
        .par_iter()
        .map(|&j| {
            let mode = ModeData::from_profile(profile, j);
            let (_, c_bar) = quadratic_certificates(&params, j);
            let roots = roots_for(params.n, mode.lambda_j, params.a_p);
            let admissible: Vec<Complex64> = roots.iter().copied().filter(|g| g.re > mu).collect();
            let certified = j as f64 >= nf + 1.0 && c_bar < 1.0;
            let run = !certified || integrate_certified;
            let (branch, span) = if run && !admissible.is_empty() {
                let mut be = Vec::new();
                for &g in &admissible {
                    be.push(mode_solve(&mode, Seed::AtZero(g), (tau_from.exp(), tau_to.exp()))?.far_exponent);
                }
                let se = span_exponents(&mode, &admissible, tau_from, tau_to)?;
                (be, se.last().copied())
            } else {
                (Vec::new(), None)
            };
            let grows = span.map(|e| e > 0.0);
            let (verdict, route, note) = if certified {
                let agree = grows.unwrap_or(true);
                (
                    if agree { Verdict::Pass } else { Verdict::Fail },
                    "certificate".to_string(),
                    format!("C_bar = {c_bar:.6e} < 1"),
                )
            } else if j == 0 {
                (
                    if grows == Some(true) { Verdict::Pass } else { Verdict::Fail },
                    "integration".to_string(),
                    String::new(),
                )
            } else {
                let note = if j == 1 {
                    "translation mode u' ~ r^(-4/(p-1)-1) at 0 and r^(3-N) at infinity; comparison argument only"
                } else {
                    "no finite certificate for 1 <= j <= N"
                };
                (Verdict::NotCertified, "integration".to_string(), note.to_string())
            };
            Ok(ModeVerdict {
                j,
                verdict,
                route,
                admissible,
                branch_exponents: branch,
                min_span_exponent: span,
                c_bar,
                note,
            })
        })
        .collect();
    Ok(InjectivityReport { n: params.n, p: params.p, mu, modes: modes.into_iter().collect::<Result<_>>()? })
}

/// `(C(N,j), C̄(N,j))` of the quadratic-form estimate.
pub fn quadratic_certificates(params: &Params, j: u32) -> (f64, f64) {
    let nf = params.nf();
    let l = sphere_eigenvalue(j, params.n);
    let c = nf.powi(3) * (nf + 4.0) / 16.0 - 2.0 * (nf - 4.0) * l - l * l;
    let cb = (4.0 * c / (nf - 4.0).powi(2) - (nf - 1.0 + 2.0 * l)) * 4.0 / (nf - 2.0).powi(2);
    (c, cb)
}

/// Residual of the j = 1 mode equation for `w = u'` at node `i` of the profile.
pub fn translation_mode_residual(profile: &RadialProfile, i: usize) -> f64 {
    let mode = ModeData::new(profile.params.n, 1, ModePotential::Zero);
    let t = profile.t(i);
    let r = (-t).exp();
    let d = profile.jet_from_state(&profile.states[i]);
    let v = crate::delaunay::radial_derivs(-profile.params.a(), -1.0, &d, r, 5);
    let w = [v[1], v[2], v[3], v[4], v[5]];
    let (res, scale) = mode.apply(r, &w, profile.potential_node(i));
    res.abs() / scale.max(1e-300)
}

/// A jet `w, w', w'', w''', w''''` of a test function.
pub type Jet = [f64; 5];

/// `(x-a)^m (b-x)^m` on `[a, b]`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
    pub m: i32,
}

impl Bump {
    pub fn jet(&self, x: f64) -> Jet {
        if x <= self.a || x >= self.b {
            return [0.0; 5];
        }
        // Leibniz on f = u^m, g = v^m with u = x-a, v = b-x
        let (u, v) = (x - self.a, self.b - x);
        let m = self.m;
        let pd = |y: f64, k: i32, sign: f64| -> f64 {
            if k > m {
                return 0.0;
            }
            let mut c = 1.0;
            for i in 0..k {
                c *= (m - i) as f64;
            }
            c * y.powi(m - k) * sign.powi(k)
        };
        let binom = [[1.0, 0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0, 0.0], [
            1.0, 3.0, 3.0, 1.0, 0.0,
        ], [1.0, 4.0, 6.0, 4.0, 1.0]];
        let mut out = [0.0; 5];
        for (n, o) in out.iter_mut().enumerate() {
            for k in 0..=n {
                *o += binom[n][k] * pd(u, k as i32, 1.0) * pd(v, (n - k) as i32, -1.0);
            }
        }
        out
    }
}

/// Gauss-Legendre panels on `[a, b]`.
pub fn panel_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let lo = a + (b - a) * k as f64 / panels as f64;
        let hi = a + (b - a) * (k + 1) as f64 / panels as f64;
        out.extend(gauss_on(order, lo, hi));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyResiduals {
    /// `∫ r^{N-5} w²`
    pub i0: f64,
    /// `∫ r^{N-3} w'²`
    pub i1: f64,
    /// `∫ r^{N-1} w''²`
    pub i2: f64,
    /// `4/(N-4)² i1 - i0`
    pub slack1: f64,
    /// `4/(N-2)² i2 - i1`
    pub slack2: f64,
    pub holds: bool,
}

/// Both Hardy inequalities for `w` sampled on the quadrature `rule` as `(r, weight, w, w', w'')`.
pub fn hardy_chain_check(n: i64, samples: &[(f64, f64, f64, f64, f64)]) -> HardyResiduals {
    let nf = n as f64;
    let (mut i0, mut i1, mut i2) = (0.0, 0.0, 0.0);
    for &(r, wt, w, w1, w2) in samples {
        i0 += wt * r.powf(nf - 5.0) * w * w;
        i1 += wt * r.powf(nf - 3.0) * w1 * w1;
        i2 += wt * r.powf(nf - 1.0) * w2 * w2;
    }
    let slack1 = 4.0 / (nf - 4.0).powi(2) * i1 - i0;
    let slack2 = 4.0 / (nf - 2.0).powi(2) * i2 - i1;
    let tol = 1e-12 * (i0 + i1 + i2);
    HardyResiduals { i0, i1, i2, slack1, slack2, holds: slack1 >= -tol && slack2 >= -tol }
}

/// Samples a jet function on a panel rule in the layout used by [`hardy_chain_check`].
pub fn sample_for_hardy(f: &dyn Fn(f64) -> Jet, rule: &[(f64, f64)]) -> Vec<(f64, f64, f64, f64, f64)> {
    rule.iter()
        .map(|&(x, w)| {
            let j = f(x);
            (x, w, j[0], j[1], j[2])
        })
        .collect()
}

/// Relative defect of the integration-by-parts identity for the mode operator on `[a, b]`.
pub fn byparts_identity_check(n: i64, j: u32, w: &dyn Fn(f64) -> Jet, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    let c = mode_coefficients(n, j);
    let l = sphere_eigenvalue(j, n);
    let cc = nf - 1.0 + 2.0 * l;
    let rule = panel_rule(a, b, 64, 10);
    let (mut lhs, mut rhs, mut mag) = (0.0, 0.0, 0.0);
    for &(r, wt) in &rule {
        let f = w(r);
        let op = f[4] + c.a1 / r * f[3] + c.a2 / (r * r) * f[2] - c.a3 / r.powi(3) * f[1] + c.a4 / r.powi(4) * f[0];
        let left = r.powf(nf - 1.0) * f[0] * op;
        let right = cc * r.powf(nf - 3.0) * f[1] * f[1]
            + r.powf(nf - 1.0) * f[2] * f[2]
            + c.a4 * r.powf(nf - 5.0) * f[0] * f[0];
        lhs += wt * left;
        rhs += wt * right;
        mag += wt * (left.abs() + right.abs());
    }
    let boundary = |r: f64| {
        let f = w(r);
        r.powf(nf - 1.0) * f[0] * f[3] - r.powf(nf - 1.0) * f[1] * f[2] + (nf - 1.0) * r.powf(nf - 2.0) * f[0] * f[2]
            - cc * r.powf(nf - 3.0) * f[0] * f[1]
    };
    let bt = boundary(b) - boundary(a);
    mag += bt.abs();
    (lhs - rhs - bt).abs() / mag.max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_coefficients() {
        let c0 = mode_coefficients(10, 0);
        assert_eq!((c0.a1, c0.a2, c0.a3, c0.a4), (18.0, 63.0, 63.0, 0.0));
        let c1 = mode_coefficients(10, 1);
        assert_eq!((c1.a1, c1.a2, c1.a3, c1.a4), (18.0, 45.0, 189.0, 189.0));
    }

    #[test]
    fn monic_matches_falling() {
        let c = mode_coefficients(9, 3);
        let b = c.monic();
        for g in [-2.0, 0.5, 3.0] {
            let z = Complex64::new(g, 0.0);
            let m = z.powi(4) + b[3] * z.powi(3) + b[2] * z * z + b[1] * z + b[0];
            assert!((m - c.falling_poly(z)).norm() < 1e-9);
        }
    }

    #[test]
    fn bump_derivatives() {
        let bump = Bump { a: 1.0, b: 2.0, m: 6 };
        let h = 1e-4;
        let x = 1.37;
        for k in 0..4 {
            let fd = (bump.jet(x + h)[k] - bump.jet(x - h)[k]) / (2.0 * h);
            assert!((fd - bump.jet(x)[k + 1]).abs() < 1e-5 * (1.0 + fd.abs()));
        }
    }
}

use super::{rk4_step, RadialProfile, State};
use crate::error::{Error, Result};
use crate::indicial::roots_for;
use crate::params::{emden_coeffs, EmdenCoeffs, Params};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Slow-mode amplitude of the seed, relative to `c_p`.
    pub seed_rel: f64,
    pub dt: f64,
    /// Dwell distance to `(c_p, 0, 0, 0)`, relative to `c_p`.
    pub eta_rel: f64,
    pub max_bisections: usize,
    pub max_stages: usize,
    /// Bracket trajectories are trusted while they agree to this, relative to the state size.
    pub junction_sep: f64,
    /// Requested coverage in `r` after scaling to the target `beta`.
    pub r_far: Option<f64>,
    pub r_near: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed_rel: 1e-6,
            dt: 1e-3,
            eta_rel: 1e-8,
            max_bisections: 200,
            max_stages: 400,
            junction_sep: 1e-11,
            r_far: None,
            r_near: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub stages: usize,
    pub bisections: usize,
    pub seed_amplitude: f64,
    pub final_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShotClass {
    Overshoot,
    Undershoot,
    Converged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotOutcome {
    pub classification: ShotClass,
    pub terminal_time: f64,
    pub terminal_state: State,
}

struct Shooter {
    k: EmdenCoeffs,
    p: f64,
    dt: f64,
    b_max: f64,
    horizon: f64,
}

impl Shooter {
    fn shoot(&self, t0: f64, y0: State) -> ShotOutcome {
        let mut y = y0;
        let mut t = t0;
        let steps = (self.horizon / self.dt) as usize;
        for _ in 0..steps {
            y = rk4_step(&self.k, self.p, &y, self.dt);
            t += self.dt;
            if !(y[0] <= self.b_max) {
                return ShotOutcome { classification: ShotClass::Overshoot, terminal_time: t, terminal_state: y };
            }
            if y[0] < 0.0 {
                return ShotOutcome { classification: ShotClass::Undershoot, terminal_time: t, terminal_state: y };
            }
        }
        ShotOutcome { classification: ShotClass::Converged, terminal_time: t, terminal_state: y }
    }
}

fn dist(y: &State, c: f64) -> f64 {
    ((y[0] - c).abs()).max(y[1].abs()).max(y[2].abs()).max(y[3].abs()) / c
}

fn vandermonde(mu: f64) -> State {
    [1.0, mu, mu * mu, mu * mu * mu]
}

fn normalized(v: State) -> State {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    [v[0] / n, v[1] / n, v[2] / n, v[3] / n]
}

fn axpy(base: &State, s: f64, d: &State) -> State {
    [base[0] + s * d[0], base[1] + s * d[1], base[2] + s * d[2], base[3] + s * d[3]]
}

/// Orbit in raw coordinates (`t = 0` at the seed, slow amplitude `seed`).
pub struct RawOrbit {
    pub states: Vec<State>,
    pub amplitude: f64,
    pub stats: SolveStats,
}

/// Rates of the linearization at `c_p`: (unstable, slowest stable real part).
fn equilibrium_rates(params: &Params) -> (f64, f64) {
    let roots = roots_for(params.n, 0.0, params.a_p);
    let a = params.a();
    let mut unstable = f64::NAN;
    let mut slow = f64::NEG_INFINITY;
    for g in roots.iter() {
        let m = -(g + a);
        if m.re > 0.0 {
            unstable = m.re;
        } else if m.re > slow {
            slow = m.re;
        }
    }
    (unstable, slow)
}

/// Shoots from the origin to `c_p` with slow amplitude `amplitude` at `t = 0`.
pub fn solve_raw(params: &Params, amplitude: f64, t_end_min: f64, opts: &SolveOptions) -> Result<RawOrbit> {
    let k = emden_coeffs(params);
    let p = params.p;
    let a = params.a();
    let (mu_s, mu_f) = (params.mu_slow(), params.mu_fast());
    let (mu_u, slow) = equilibrium_rates(params);
    let dwell = 5.0 / slow.abs();
    let sh = Shooter {
        k,
        p,
        dt: opts.dt,
        b_max: params.b_max(),
        horizon: 400.0,
    };

    // seed on the unstable manifold with the second-order correction
    let h = amplitude;
    let x = p * mu_s;
    let q = (x - mu_s) * (x + a) * (x + 2.0 + a);
    let c2 = h.powf(p) / q;
    let mut base: State = [0.0, c2, c2 * (x + mu_f), c2 * (x * x + x * mu_f + mu_f * mu_f)];
    let vs = vandermonde(mu_s);
    for i in 0..4 {
        base[i] += h * vs[i];
    }
    let mut dir = normalized(vandermonde(mu_f));
    let mut scale = h;
    let d_unstable = normalized(vandermonde(mu_u));

    let mut states: Vec<State> = vec![base];
    let mut t_base = 0.0f64;
    let mut stats = SolveStats { seed_amplitude: h, ..Default::default() };
    let dwell_steps = (dwell / opts.dt).ceil() as usize;

    loop {
        if stats.stages >= opts.max_stages {
            return Err(Error::NoConvergence(format!(
                "{} stages without reaching the dwell criterion (distance {:e})",
                stats.stages,
                dist(states.last().unwrap(), params.c_p)
            )));
        }
        stats.stages += 1;
        let over = |s: f64| sh.shoot(t_base, axpy(&base, s, &dir)).classification == ShotClass::Overshoot;
        let zero_over = over(0.0);
        let sign = if zero_over { -1.0 } else { 1.0 };
        let mut prev = 0.0;
        let mut found = None;
        for e in (0..=18).rev() {
            let s = sign * scale * 10f64.powi(-e);
            if over(s) != zero_over {
                found = Some(s);
                break;
            }
            prev = s;
        }
        let flip = found.ok_or_else(|| {
            Error::Bracket(format!("no sign change of the shot class within ±{scale:e} at stage {}", stats.stages))
        })?;
        let (mut lo, mut hi) = if zero_over { (flip, prev) } else { (prev, flip) };
        // lo undershoots (or stalls), hi overshoots
        let mut iters = 0;
        while iters < opts.max_bisections {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if over(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            iters += 1;
        }
        stats.bisections += iters;

        // follow both bracket members while they agree
        let mut ylo = axpy(&base, lo, &dir);
        let mut yhi = axpy(&base, hi, &dir);
        let mut seg: Vec<State> = Vec::new();
        let max_steps = (400.0 / opts.dt) as usize;
        for _ in 0..max_steps {
            ylo = rk4_step(&k, p, &ylo, opts.dt);
            yhi = rk4_step(&k, p, &yhi, opts.dt);
            let sep = (0..4).map(|i| (ylo[i] - yhi[i]).abs()).fold(0.0, f64::max);
            let size = ylo.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if sep > opts.junction_sep * size || ylo[0] < 0.0 || yhi[0] > sh.b_max {
                break;
            }
            seg.push(ylo);
        }
        if seg.is_empty() {
            return Err(Error::NoConvergence(format!("stage {} made no progress", stats.stages)));
        }
        // replace the stage's starting node by the perturbed one
        *states.last_mut().unwrap() = axpy(&base, lo, &dir);
        states.extend_from_slice(&seg);
        t_base += seg.len() as f64 * opts.dt;
        base = *states.last().unwrap();
        dir = d_unstable;
        scale = params.c_p;

        let n = states.len();
        let tail_ok = n > dwell_steps
            && states[n - 1 - dwell_steps..].iter().all(|y| dist(y, params.c_p) <= opts.eta_rel);
        if tail_ok && t_base >= t_end_min {
            stats.final_distance = dist(states.last().unwrap(), params.c_p);
            return Ok(RawOrbit { states, amplitude: h, stats });
        }
    }
}

/// Singular solution with far-field coefficient `beta`.
///
/// `tol` bounds the relative mismatch of both asymptotic fits; the seed amplitude
/// is reduced until the fast mode is below `tol` at the far end.
pub fn solve_singular(params: &Params, beta: f64, tol: f64) -> Result<RadialProfile> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let mut opts = SolveOptions { eta_rel: (0.5 * tol).min(1e-8), ..Default::default() };
    let c = params.c_p;
    for _ in 0..6 {
        let prof = solve_with(params, beta, opts.clone())?;
        let near = prof.states.last().unwrap()[0];
        if (near - c).abs() > tol * c {
            return Err(Error::NoConvergence(format!("near-field value {near} not within {tol:e} of c_p")));
        }
        let far = far_field_mismatch(&prof);
        if far <= tol {
            return Ok(prof);
        }
        opts.seed_rel *= (0.5 * tol / far).min(0.5);
    }
    Err(Error::NoConvergence(format!("far-field coefficient not within {tol:e} of beta")))
}

/// `|r^{N-4}u(r) - β| / β` at the largest represented radius.
pub fn far_field_mismatch(profile: &RadialProfile) -> f64 {
    let y0 = profile.states[0][0];
    let v = (-profile.params.mu_slow() * profile.t_start).exp() * y0;
    (v - profile.beta).abs() / profile.beta
}

pub fn solve_with(params: &Params, beta: f64, opts: SolveOptions) -> Result<RadialProfile> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let mu_s = params.mu_slow();
    let mut h = opts.seed_rel * params.c_p;
    // the raw orbit starts at t = 0; after scaling the grid moves by log(h/beta)/mu_s
    if let Some(rf) = opts.r_far {
        h = h.min(beta * rf.powf(-mu_s));
    }
    let tau = (h / beta).ln() / mu_s;
    let t_end_min = opts.r_near.map_or(f64::NEG_INFINITY, |rn| -rn.ln() - tau);
    let raw = solve_raw(params, h, t_end_min, &opts)?;
    Ok(RadialProfile {
        params: *params,
        coeffs: emden_coeffs(params),
        t_start: tau,
        dt: opts.dt,
        states: raw.states,
        beta,
        options: opts,
        stats: raw.stats,
    })
}

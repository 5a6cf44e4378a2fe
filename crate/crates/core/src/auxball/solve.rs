use super::BallKernel;
use crate::error::{Error, Result};
use crate::quad::linear_fit;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// `λ ∫ G(x,y)|y|^α (1+|u(y)|)^p dy` at the nodes.
pub fn t_apply(kernel: &BallKernel, u: &[f64], lambda: f64, p: f64) -> Vec<f64> {
    let src: Vec<f64> = u.iter().map(|v| (1.0 + v.abs()).powf(p)).collect();
    kernel.green_apply_weighted(&src).into_iter().map(|v| lambda * v).collect()
}

fn t_origin(kernel: &BallKernel, u: &[f64], lambda: f64, p: f64) -> f64 {
    let src: Vec<f64> = u.iter().map(|v| (1.0 + v.abs()).powf(p)).collect();
    lambda * kernel.value_at_origin(&src, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardResult {
    pub u: Vec<f64>,
    pub u0: f64,
    pub iterations: usize,
    pub converged: bool,
    /// every iterate dominated the previous one pointwise
    pub monotone: bool,
    /// `sup |u - T(u)|` of the returned iterate
    pub residual: f64,
}

const DIVERGENCE_CAP: f64 = 1e8;

/// Iterates `u ↦ T(u)` from zero; diverging iterates mean `λ` is beyond the minimal branch.
pub fn picard_minimal(kernel: &BallKernel, lambda: f64, p: f64, tol: f64, max_iter: usize) -> Result<PicardResult> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")));
    }
    let mut u = vec![0.0; kernel.len()];
    let mut monotone = true;
    for it in 1..=max_iter {
        let next = t_apply(kernel, &u, lambda, p);
        let mut inc = 0.0f64;
        for (a, b) in next.iter().zip(&u) {
            if *a < *b - 1e-13 * b.abs() {
                monotone = false;
            }
            inc = inc.max((a - b).abs());
        }
        let sup = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(sup < DIVERGENCE_CAP) {
            return Err(Error::LambdaTooLarge(format!("iterates exceed {DIVERGENCE_CAP:e} at step {it} for lambda {lambda}")));
        }
        u = next;
        if inc <= tol {
            let res = t_apply(kernel, &u, lambda, p).iter().zip(&u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let u0 = t_origin(kernel, &u, lambda, p);
            return Ok(PicardResult { u, u0, iterations: it, converged: true, monotone, residual: res });
        }
    }
    let res = t_apply(kernel, &u, lambda, p).iter().zip(&u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let u0 = t_origin(kernel, &u, lambda, p);
    Ok(PicardResult { u, u0, iterations: max_iter, converged: false, monotone, residual: res })
}

/// Largest `λ` with a convergent Picard iteration, bracketed by doubling from `lambda0` and then bisected.
///
/// An empirical edge of the minimal branch on this grid, not a certified extremal value.
pub fn largest_convergent_lambda(kernel: &BallKernel, p: f64, lambda0: f64, steps: usize) -> Result<(f64, f64)> {
    if !(lambda0 > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda0 must be positive, got {lambda0}")));
    }
    let ok = |l: f64| matches!(picard_minimal(kernel, l, p, 1e-10, 2000), Ok(r) if r.converged);
    let (mut lo, mut hi) = (0.0, lambda0);
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence("no Picard breakdown below 1e12".into()));
        }
    }
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSolution {
    pub lambda: f64,
    pub u0: f64,
    pub u: Vec<f64>,
    pub newton_iterations: usize,
    pub residual: f64,
}

fn amplitude_residual(kernel: &BallKernel, u: &[f64], lambda: f64, p: f64, a: f64) -> (Vec<f64>, f64) {
    let tu = t_apply(kernel, u, lambda, p);
    let mut r: Vec<f64> = u.iter().zip(&tu).map(|(x, y)| x - y).collect();
    r.push(t_origin(kernel, u, lambda, p) - a);
    let m = r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / a.max(1.0);
    (r, m)
}

/// Solves for `(u, λ)` with `u(0) = a` by Newton's method, from `guess` or from the small-amplitude limit.
pub fn solve_with_amplitude(
    kernel: &BallKernel,
    p: f64,
    a: f64,
    guess: Option<(&[f64], f64)>,
) -> Result<AmplitudeSolution> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("amplitude must be positive, got {a}")));
    }
    let n = kernel.len();
    let (mut u, mut lambda) = match guess {
        Some((u, l)) => (u.to_vec(), l),
        None => {
            let ones = vec![1.0; n];
            let l = a / kernel.value_at_origin(&ones, true);
            (kernel.green_apply_weighted(&ones).into_iter().map(|v| l * v).collect(), l)
        }
    };
    let (mut res, mut rn) = amplitude_residual(kernel, &u, lambda, p, a);
    for it in 0..60 {
        if rn < 1e-12 {
            return Ok(AmplitudeSolution { lambda, u0: a, u, newton_iterations: it, residual: rn });
        }
        let src: Vec<f64> = u.iter().map(|v| (1.0 + v.abs()).powf(p)).collect();
        let dsrc: Vec<f64> = u.iter().map(|v| p * (1.0 + v.abs()).powf(p - 1.0) * v.signum()).collect();
        let w = &kernel.weighted;
        let o = &kernel.origin_weighted;
        let mut jac = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..n {
            let row = &w[i * n..(i + 1) * n];
            for j in 0..n {
                jac[(i, j)] = -lambda * row[j] * dsrc[j];
            }
            jac[(i, i)] += 1.0;
            jac[(i, n)] = -row.iter().zip(&src).map(|(a, b)| a * b).sum::<f64>();
        }
        for j in 0..n {
            jac[(n, j)] = lambda * o[j] * dsrc[j];
        }
        jac[(n, n)] = o.iter().zip(&src).map(|(a, b)| a * b).sum::<f64>();
        let rhs = DVector::from_vec(res.iter().map(|v| -v).collect());
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NoConvergence("singular Newton matrix".into()))?;
        let mut damp = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().enumerate().map(|(i, v)| v + damp * step[i]).collect();
            let tl = lambda + damp * step[n];
            let (tr, tn) = amplitude_residual(kernel, &trial, tl, p, a);
            if tn < rn || damp < 1e-4 {
                u = trial;
                lambda = tl;
                res = tr;
                rn = tn;
                break;
            }
            damp *= 0.5;
        }
    }
    Err(Error::NoConvergence(format!("Newton for amplitude {a} stalled at residual {rn:e}")))
}

/// Amplitude continuation through the requested `u(0)` values (sorted ascending).
pub fn blowup_family(kernel: &BallKernel, p: f64, amplitudes: &[f64]) -> Result<Vec<AmplitudeSolution>> {
    let mut targets = amplitudes.to_vec();
    targets.sort_by(|a, b| a.total_cmp(b));
    let mut out = Vec::new();
    let mut cur = solve_with_amplitude(kernel, p, targets[0].min(1e-2), None)?;
    for &t in &targets {
        while cur.u0 < t {
            let next = (cur.u0 * 1.25).min(t);
            let s = next / cur.u0;
            let guess: Vec<f64> = cur.u.iter().map(|v| v * s).collect();
            cur = solve_with_amplitude(kernel, p, next, Some((&guess, cur.lambda)))?;
        }
        if cur.u0 > t {
            cur = solve_with_amplitude(kernel, p, t, None)?;
        }
        out.push(cur.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupMember {
    pub lambda: f64,
    pub u0: f64,
    /// `r_k^{4+α} λ u(0)^{p-1} = 1`
    pub r_k: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub tail_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub members: Vec<BlowupMember>,
    pub expected_exponent: f64,
    /// fit window in the rescaled variable for the last member
    pub window: (f64, f64),
}

impl BlowupReport {
    pub fn last_exponent(&self) -> f64 {
        self.members.last().map_or(f64::NAN, |m| m.tail_exponent)
    }
}

/// Rescales `v_k(x) = u_k(r_k x)/u_k(0)` and fits the tail `v ~ x^{-(4+α)/(p-1)}`.
///
/// The fit uses nodes with `x ≥ x_lo` and `r ≤ r_hi`.
pub fn blowup_rescale(
    kernel: &BallKernel,
    p: f64,
    family: &[AmplitudeSolution],
    x_lo: f64,
    r_hi: f64,
) -> Result<BlowupReport> {
    if family.len() < 2 {
        return Err(Error::DegenerateFit(format!("family of {} members", family.len())));
    }
    let alpha = kernel.spec().alpha_w;
    let grid = &kernel.grid;
    let mut members = Vec::new();
    let mut window = (x_lo, x_lo);
    for sol in family {
        let r_k = (sol.lambda * sol.u0.powf(p - 1.0)).powf(-1.0 / (4.0 + alpha));
        let x: Vec<f64> = grid.nodes.iter().map(|r| r / r_k).collect();
        let v: Vec<f64> = sol.u.iter().map(|u| u / sol.u0).collect();
        let (mut lx, mut lv) = (Vec::new(), Vec::new());
        for ((xi, vi), r) in x.iter().zip(&v).zip(&grid.nodes) {
            if *xi >= x_lo && *r <= r_hi && *vi > 0.0 {
                lx.push(xi.ln());
                lv.push(vi.ln());
            }
        }
        let slope = if lx.len() >= 3 { linear_fit(&lx, &lv).0 } else { f64::NAN };
        window = (x_lo, r_hi / r_k);
        members.push(BlowupMember { lambda: sol.lambda, u0: sol.u0, r_k, x, v, tail_exponent: slope });
    }
    if members.last().unwrap().tail_exponent.is_nan() {
        return Err(Error::DegenerateFit("tail window holds fewer than three nodes".into()));
    }
    Ok(BlowupReport { members, expected_exponent: -(4.0 + alpha) / (p - 1.0), window })
}

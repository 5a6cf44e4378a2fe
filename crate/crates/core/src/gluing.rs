//! Cut-off superpositions of dilated singular profiles and their equation error
//! `f = Δ²ū - ū^p`, measured in dyadic weighted norms.

use crate::delaunay::{normalize_small_tail_to, RadialProfile};
use crate::error::{Error, Result};
use crate::quad::linear_fit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::Arc;

/// `S(x) = x^5 (126 - 420x + 540x² - 315x³ + 70x⁴)` and its first five derivatives, clamped to `[0, 1]`.
pub fn smoothstep_jet(x: f64) -> [f64; 6] {
    if x <= 0.0 {
        return [0.0; 6];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    }
    // coefficients of x^5..x^9
    let c = [126.0, -420.0, 540.0, -315.0, 70.0];
    let mut out = [0.0; 6];
    for (d, o) in out.iter_mut().enumerate() {
        for (i, ci) in c.iter().enumerate() {
            let e = 5 + i;
            if e < d {
                continue;
            }
            let mut f = 1.0;
            for k in 0..d {
                f *= (e - k) as f64;
            }
            *o += ci * f * x.powi((e - d) as i32);
        }
    }
    out
}

/// `χ_R(ρ) = 1 - S(ρ/R - 1)`: one on `B_R`, zero outside `B_{2R}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub radius: f64,
}

impl Cutoff {
    /// `χ, χ', ..., χ^{(5)}` in the radial variable.
    pub fn jet(&self, rho: f64) -> [f64; 6] {
        let s = smoothstep_jet(rho / self.radius - 1.0);
        let mut out = [0.0; 6];
        out[0] = 1.0 - s[0];
        let mut rk = 1.0;
        for k in 1..6 {
            rk *= self.radius;
            out[k] = -s[k] / rk;
        }
        out
    }

    /// Sampled `sup |χ^{(k)}|` for `k = 0..4`.
    pub fn derivative_bounds(&self) -> [f64; 5] {
        let mut b = [0.0f64; 5];
        for i in 0..=4000 {
            let j = self.jet(self.radius * (1.0 + i as f64 / 4000.0));
            for k in 0..5 {
                b[k] = b[k].max(j[k].abs());
            }
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GlueMode {
    Points { centers: Vec<Vec<f64>>, eps: Vec<f64> },
    /// `ℝ^N × ℝ^k`, singular along `{x = 0}`, cut off in `y`.
    FlatEdge { k: usize, eps: f64 },
}

#[derive(Debug, Clone)]
pub struct GlueConfig {
    pub mode: GlueMode,
    pub cutoff: Cutoff,
    pub profile: Arc<RadialProfile>,
    pub gamma_w: f64,
}

impl GlueConfig {
    /// Checks the geometry and weight window, extending the profile if the cutoff region is not covered.
    pub fn new(mode: GlueMode, cutoff: Cutoff, profile: Arc<RadialProfile>, gamma_w: f64) -> Result<Self> {
        let mut cfg = GlueConfig { mode, cutoff, profile, gamma_w };
        cfg.validate()?;
        let need = cfg.cutoff.radius * cfg.reach() / cfg.eps_min();
        if cfg.profile.r_max() < need {
            let p = normalize_small_tail_to(&cfg.profile, f64::INFINITY, Some(need))?;
            cfg.profile = Arc::new(p);
        }
        Ok(cfg)
    }

    pub fn n(&self) -> usize {
        self.profile.params.n as usize
    }

    pub fn dim(&self) -> usize {
        match &self.mode {
            GlueMode::Points { .. } => self.n(),
            GlueMode::FlatEdge { k, .. } => self.n() + k,
        }
    }

    /// Largest profile argument needed, in units of `R/ε`; flat mode samples `|x|` up to `3R√N`.
    fn reach(&self) -> f64 {
        match self.mode {
            GlueMode::Points { .. } => 2.0,
            GlueMode::FlatEdge { .. } => 3.0 * (self.n() as f64).sqrt() * 1.05,
        }
    }

    fn eps_min(&self) -> f64 {
        match &self.mode {
            GlueMode::Points { eps, .. } => eps.iter().copied().fold(f64::INFINITY, f64::min),
            GlueMode::FlatEdge { eps, .. } => *eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params = &self.profile.params;
        let nf = params.nf();
        let r = self.cutoff.radius;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument("cutoff radius must be positive".into()));
        }
        match &self.mode {
            GlueMode::Points { centers, eps } => {
                if centers.is_empty() || centers.len() != eps.len() {
                    return Err(Error::InvalidArgument("need one dilation per center".into()));
                }
                if centers.iter().any(|c| c.len() != self.n()) {
                    return Err(Error::InvalidArgument(format!("centers must lie in R^{}", self.n())));
                }
                if eps.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
                    return Err(Error::InvalidArgument("dilations must lie in (0, 1]".into()));
                }
                for i in 0..centers.len() {
                    for j in 0..i {
                        if dist(&centers[i], &centers[j]) < 4.0 * r {
                            return Err(Error::InvalidArgument(format!("cutoff balls of centers {j} and {i} overlap")));
                        }
                    }
                }
                if !(self.gamma_w > 4.0 - nf && self.gamma_w < 0.0) {
                    return Err(Error::InvalidArgument(format!("gamma_w {} outside (4-N, 0)", self.gamma_w)));
                }
            }
            GlueMode::FlatEdge { k, eps } => {
                if *k == 0 {
                    return Err(Error::InvalidArgument("edge dimension must be positive".into()));
                }
                if !(*eps > 0.0 && *eps <= 1.0) {
                    return Err(Error::InvalidArgument("dilation must lie in (0, 1]".into()));
                }
                let p = params.p;
                let (lo, hi) = (-4.0 / (p - 1.0), (p - 5.0) / (p - 1.0));
                if !(self.gamma_w > lo && self.gamma_w < hi) {
                    return Err(Error::InvalidArgument(format!("gamma_w {} outside ({lo}, {hi})", self.gamma_w)));
                }
            }
        }
        Ok(())
    }

    /// Same configuration with every dilation set to `eps`.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        let mode = match &self.mode {
            GlueMode::Points { centers, eps: e } => GlueMode::Points { centers: centers.clone(), eps: vec![eps; e.len()] },
            GlueMode::FlatEdge { k, .. } => GlueMode::FlatEdge { k: *k, eps },
        };
        GlueConfig::new(mode, self.cutoff, self.profile.clone(), self.gamma_w)
    }

    /// Nominal decay rate of the error norm in `ε`.
    pub fn nominal_rate(&self) -> f64 {
        let params = &self.profile.params;
        let p = params.p;
        match self.mode {
            GlueMode::Points { .. } => params.nf() - 4.0 * p / (p - 1.0),
            GlueMode::FlatEdge { .. } => (p - 5.0) / (p - 1.0) - self.gamma_w,
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `[Δg, (Δg)', Δ²g, (Δ²g)']` of a radial `g` in `ℝ^d` from `g, ..., g^{(5)}`.
fn radial_ops(g: &[f64; 6], d: f64, rho: f64) -> [f64; 4] {
    let m = d - 1.0;
    let c = m * (d - 3.0);
    let (r1, r2, r3, r4) = (1.0 / rho, 1.0 / (rho * rho), 1.0 / rho.powi(3), 1.0 / rho.powi(4));
    [
        g[2] + m * r1 * g[1],
        g[3] + m * r1 * g[2] - m * r2 * g[1],
        g[4] + 2.0 * m * r1 * g[3] + c * r2 * g[2] - c * r3 * g[1],
        g[5] + 2.0 * m * r1 * g[4] + (c - 2.0 * m) * r2 * g[3] - 3.0 * c * r3 * g[2] + 3.0 * c * r4 * g[1],
    ]
}

fn leibniz(a: &[f64; 6], b: &[f64; 6]) -> [f64; 6] {
    const BIN: [[f64; 6]; 6] = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, 3.0, 3.0, 1.0, 0.0, 0.0],
        [1.0, 4.0, 6.0, 4.0, 1.0, 0.0],
        [1.0, 5.0, 10.0, 10.0, 5.0, 1.0],
    ];
    let mut out = [0.0; 6];
    for n in 0..6 {
        for k in 0..=n {
            out[n] += BIN[n][k] * a[k] * b[n - k];
        }
    }
    out
}

/// Pointwise data of the approximate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldValue {
    pub u: f64,
    pub grad: Vec<f64>,
    pub lap: f64,
    pub grad_lap: Vec<f64>,
    pub bilap: f64,
    /// `Δ²ū - ū^p`
    pub f: f64,
    pub grad_f: Vec<f64>,
}

/// Evaluator for `ū_ε̄` and its error.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub config: GlueConfig,
}

pub fn approx_solution(config: &GlueConfig) -> ApproxSolution {
    ApproxSolution { config: config.clone() }
}

impl ApproxSolution {
    /// `U_ε(ρ) = ε^{-4/(p-1)} u(ρ/ε)` with five radial derivatives.
    fn dilated_jet(&self, eps: f64, rho: f64) -> Result<[f64; 6]> {
        let prof = &self.config.profile;
        let j = prof.u_jet(rho / eps)?;
        let a = prof.params.a();
        let mut out = [0.0; 6];
        let mut scale = eps.powf(-a);
        for k in 0..6 {
            out[k] = scale * j.d[k];
            scale /= eps;
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> Result<FieldValue> {
        let cfg = &self.config;
        let dim = cfg.dim();
        if x.len() != dim {
            return Err(Error::InvalidArgument(format!("point must lie in R^{dim}")));
        }
        let p = cfg.profile.params.p;
        let nf = cfg.profile.params.nf();
        let mut v = FieldValue {
            u: 0.0,
            grad: vec![0.0; dim],
            lap: 0.0,
            grad_lap: vec![0.0; dim],
            bilap: 0.0,
            f: 0.0,
            grad_f: vec![0.0; dim],
        };
        let mut grad_bilap = vec![0.0; dim];
        match &cfg.mode {
            GlueMode::Points { centers, eps } => {
                for (c, &e) in centers.iter().zip(eps) {
                    let rho = dist(x, c);
                    if rho >= 2.0 * cfg.cutoff.radius {
                        continue;
                    }
                    if rho == 0.0 {
                        return Err(Error::InvalidArgument("evaluation on the singular set".into()));
                    }
                    let g = leibniz(&cfg.cutoff.jet(rho), &self.dilated_jet(e, rho)?);
                    let ops = radial_ops(&g, nf, rho);
                    v.u += g[0];
                    v.lap += ops[0];
                    v.bilap += ops[2];
                    for i in 0..dim {
                        let xh = (x[i] - c[i]) / rho;
                        v.grad[i] += g[1] * xh;
                        v.grad_lap[i] += ops[1] * xh;
                        grad_bilap[i] += ops[3] * xh;
                    }
                }
            }
            GlueMode::FlatEdge { k, eps } => {
                let n = cfg.n();
                let rho = x[..n].iter().map(|t| t * t).sum::<f64>().sqrt();
                let ry = x[n..].iter().map(|t| t * t).sum::<f64>().sqrt();
                if ry >= 2.0 * cfg.cutoff.radius {
                    return Ok(v);
                }
                if rho == 0.0 {
                    return Err(Error::InvalidArgument("evaluation on the singular set".into()));
                }
                let uj = self.dilated_jet(*eps, rho)?;
                let ux = radial_ops(&uj, nf, rho);
                let chi = cfg.cutoff.jet(ry);
                // χ is constant near y = 0, so its operators vanish there
                let cy = if ry <= cfg.cutoff.radius { [0.0; 4] } else { radial_ops(&chi, *k as f64, ry) };
                v.u = uj[0] * chi[0];
                v.lap = ux[0] * chi[0] + uj[0] * cy[0];
                v.bilap = ux[2] * chi[0] + 2.0 * ux[0] * cy[0] + uj[0] * cy[2];
                let gx_u = uj[1] * chi[0];
                let gx_lap = ux[1] * chi[0] + uj[1] * cy[0];
                let gx_bil = ux[3] * chi[0] + 2.0 * ux[1] * cy[0] + uj[1] * cy[2];
                let gy_u = uj[0] * chi[1];
                let gy_lap = ux[0] * chi[1] + uj[0] * cy[1];
                let gy_bil = ux[2] * chi[1] + 2.0 * ux[0] * cy[1] + uj[0] * cy[3];
                for i in 0..n {
                    let xh = x[i] / rho;
                    v.grad[i] = gx_u * xh;
                    v.grad_lap[i] = gx_lap * xh;
                    grad_bilap[i] = gx_bil * xh;
                }
                if ry > 0.0 {
                    for i in n..dim {
                        let yh = x[i] / ry;
                        v.grad[i] = gy_u * yh;
                        v.grad_lap[i] = gy_lap * yh;
                        grad_bilap[i] = gy_bil * yh;
                    }
                }
            }
        }
        let up = v.u.max(0.0);
        v.f = v.bilap - up.powf(p);
        let dp = if up > 0.0 { p * up.powf(p - 1.0) } else { 0.0 };
        for i in 0..dim {
            v.grad_f[i] = grad_bilap[i] - dp * v.grad[i];
        }
        Ok(v)
    }
}

/// The error field `f_ε̄` of a configuration.
pub fn error_field(config: &GlueConfig) -> ErrorField {
    ErrorField { approx: approx_solution(config) }
}

#[derive(Debug, Clone)]
pub struct ErrorField {
    pub approx: ApproxSolution,
}

/// A scalar field with optional gradient, sampled by [`weighted_norm`].
pub trait Field: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Option<Vec<f64>>>;
}

impl Field for ErrorField {
    fn dim(&self) -> usize {
        self.approx.config.dim()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.approx.eval(x)?.f)
    }
    fn gradient(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(Some(self.approx.eval(x)?.grad_f))
    }
}

/// `|x - c|^γ` around a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerField {
    pub center: Vec<f64>,
    pub gamma: f64,
}

impl Field for PowerField {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(dist(x, &self.center).powf(self.gamma))
    }
    fn gradient(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        let r = dist(x, &self.center);
        let c = self.gamma * r.powf(self.gamma - 2.0);
        Ok(Some(x.iter().zip(&self.center).map(|(a, b)| c * (a - b)).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SingularSet {
    Points(Vec<Vec<f64>>),
    /// `{x ∈ ℝ^n : x_1 = … = x_codim = 0}`
    Subspace { codim: usize },
}

/// Sampling plan for [`weighted_norm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub singular: SingularSet,
    pub sigma: f64,
    /// shells `s = σ 2^{-m}`, `m = 0..shells`
    pub shells: usize,
    pub samples_per_shell: usize,
    pub holder_pairs: usize,
    /// the domain is the cube `[-extent, extent]^n`
    pub extent: f64,
    pub outer_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellRecord {
    pub m: usize,
    pub s: f64,
    pub sup: Vec<f64>,
    pub holder: f64,
    pub seminorm: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub nu: f64,
    pub k: usize,
    pub alpha_h: f64,
    pub shells: Vec<ShellRecord>,
    pub outer: f64,
    pub total: f64,
    pub samples: usize,
    pub seed: u64,
}

impl NormReport {
    /// Key-value table, one `key value` pair per line.
    pub fn write_kv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "nu {:e}", self.nu)?;
        writeln!(w, "k {}", self.k)?;
        writeln!(w, "alpha_h {:e}", self.alpha_h)?;
        writeln!(w, "samples {}", self.samples)?;
        writeln!(w, "seed {}", self.seed)?;
        writeln!(w, "outer {:e}", self.outer)?;
        writeln!(w, "total {:e}", self.total)?;
        for s in &self.shells {
            writeln!(w, "shell.{}.s {:e}", s.m, s.s)?;
            writeln!(w, "shell.{}.seminorm {:e}", s.m, s.seminorm)?;
            writeln!(w, "shell.{}.weighted {:e}", s.m, s.weighted)?;
        }
        Ok(())
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|t| t / n).collect();
        }
    }
}

fn distance_to(set: &SingularSet, x: &[f64]) -> f64 {
    match set {
        SingularSet::Points(ps) => ps.iter().map(|c| dist(x, c)).fold(f64::INFINITY, f64::min),
        SingularSet::Subspace { codim } => x[..*codim].iter().map(|t| t * t).sum::<f64>().sqrt(),
    }
}

/// A point at distance `d` from the singular set.
fn point_at(set: &SingularSet, dim: usize, d: f64, extent: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match set {
        SingularSet::Points(ps) => {
            let c = &ps[rng.gen_range(0..ps.len())];
            let u = unit_vector(rng, dim);
            c.iter().zip(&u).map(|(a, b)| a + d * b).collect()
        }
        SingularSet::Subspace { codim } => {
            let u = unit_vector(rng, *codim);
            let mut x: Vec<f64> = u.iter().map(|t| d * t).collect();
            x.extend((*codim..dim).map(|_| rng.gen_range(-extent..extent)));
            x
        }
    }
}

struct Samples {
    jets: Vec<(Vec<f64>, f64, Option<Vec<f64>>)>,
}

fn sample_jets(w: &dyn Field, pts: Vec<Vec<f64>>, k: usize) -> Result<Samples> {
    let jets: Vec<Result<(Vec<f64>, f64, Option<Vec<f64>>)>> = pts
        .into_par_iter()
        .map(|x| {
            let v = w.value(&x)?;
            let g = if k >= 1 { w.gradient(&x)? } else { None };
            Ok((x, v, g))
        })
        .collect();
    Ok(Samples { jets: jets.into_iter().collect::<Result<_>>()? })
}

fn seminorm_parts(s: &Samples, k: usize, alpha_h: f64, pairs: &[(usize, usize)]) -> Result<(Vec<f64>, f64)> {
    let mut sup = vec![0.0f64; k + 1];
    for (_, v, g) in &s.jets {
        sup[0] = sup[0].max(v.abs());
        if k >= 1 {
            let g = g.as_ref().ok_or_else(|| Error::InvalidArgument("field has no gradient".into()))?;
            sup[1] = sup[1].max(g.iter().map(|t| t * t).sum::<f64>().sqrt());
        }
    }
    let mut holder = 0.0f64;
    if alpha_h > 0.0 {
        for &(i, j) in pairs {
            let (xa, va, ga) = &s.jets[i];
            let (xb, vb, gb) = &s.jets[j];
            let d = dist(xa, xb);
            if d == 0.0 {
                continue;
            }
            let diff = if k == 0 {
                (va - vb).abs()
            } else {
                let (ga, gb) = (ga.as_ref().unwrap(), gb.as_ref().unwrap());
                ga.iter().zip(gb).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            };
            holder = holder.max(diff / d.powf(alpha_h));
        }
    }
    Ok((sup, holder))
}

/// Sampled weighted Hölder norm `‖w‖_{C^{k,α}_ν}`; every reported value is a lower bound.
pub fn weighted_norm(w: &dyn Field, nu: f64, k: usize, alpha_h: f64, domain: &DomainSpec) -> Result<NormReport> {
    if k > 1 {
        return Err(Error::InvalidArgument("only k = 0 and k = 1 are sampled".into()));
    }
    if !(0.0..1.0).contains(&alpha_h) {
        return Err(Error::InvalidArgument("Hölder exponent must lie in [0, 1)".into()));
    }
    let dim = w.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
    let mut shells = Vec::new();
    let mut total_samples = 0;
    let pair_plan = |rng: &mut ChaCha8Rng, n: usize| -> Vec<(usize, usize)> {
        (0..domain.holder_pairs).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    for m in 0..=domain.shells {
        let s = domain.sigma * 0.5f64.powi(m as i32);
        let mut pts = Vec::with_capacity(domain.samples_per_shell + 2);
        for i in 0..domain.samples_per_shell.max(2) {
            let d = match i {
                0 => 0.5 * s,
                1 => s,
                _ => rng.gen_range(0.5 * s..s),
            };
            pts.push(point_at(&domain.singular, dim, d, domain.extent, &mut rng));
        }
        let n = pts.len();
        total_samples += n;
        let pairs = pair_plan(&mut rng, n);
        let smp = sample_jets(w, pts, k)?;
        let (sup, holder) = seminorm_parts(&smp, k, alpha_h, &pairs)?;
        let mut semi = 0.0;
        for (j, v) in sup.iter().enumerate() {
            semi += s.powi(j as i32) * v;
        }
        semi += s.powf(k as f64 + alpha_h) * holder;
        shells.push(ShellRecord { m, s, sup, holder, seminorm: semi, weighted: s.powf(-nu) * semi });
    }
    // outer region: distance at least σ/2 inside the cube, on its own stream
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
    rng.set_stream(1);
    let mut outer_pts = Vec::new();
    let mut tries = 0;
    while outer_pts.len() < domain.outer_samples && tries < 100 * domain.outer_samples.max(1) {
        tries += 1;
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-domain.extent..domain.extent)).collect();
        if distance_to(&domain.singular, &x) >= 0.5 * domain.sigma {
            outer_pts.push(x);
        }
    }
    let n_out = outer_pts.len();
    total_samples += n_out;
    let outer = if n_out == 0 {
        0.0
    } else {
        let pairs = pair_plan(&mut rng, n_out);
        let smp = sample_jets(w, outer_pts, k)?;
        let (sup, holder) = seminorm_parts(&smp, k, alpha_h, &pairs)?;
        sup.iter().sum::<f64>() + holder
    };
    let sup_w = shells.iter().map(|s| s.weighted).fold(0.0f64, f64::max);
    Ok(NormReport { nu, k, alpha_h, shells, outer, total: outer + sup_w, samples: total_samples, seed: domain.seed })
}

/// Default sampling plan around the singular set of a configuration.
pub fn default_domain(config: &GlueConfig, shells: usize, samples: usize, seed: u64) -> DomainSpec {
    let r = config.cutoff.radius;
    let singular = match &config.mode {
        GlueMode::Points { centers, .. } => SingularSet::Points(centers.clone()),
        GlueMode::FlatEdge { .. } => SingularSet::Subspace { codim: config.n() },
    };
    let extent = match &config.mode {
        GlueMode::Points { centers, .. } => {
            centers.iter().flat_map(|c| c.iter().map(|t| t.abs())).fold(0.0f64, f64::max) + 3.0 * r
        }
        GlueMode::FlatEdge { .. } => 3.0 * r,
    };
    DomainSpec {
        singular,
        sigma: 4.0 * r,
        shells,
        samples_per_shell: samples,
        holder_pairs: 0,
        extent,
        outer_samples: samples,
        seed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub eps: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub nominal: f64,
}

/// Fits `log ‖f_ε‖_{C^{0}_{γ-4}}` against `log ε`.
pub fn decay_fit(template: &GlueConfig, eps_list: &[f64], domain: &DomainSpec) -> Result<DecayFit> {
    if eps_list.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} dilation values", eps_list.len())));
    }
    let mut sorted = eps_list.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit("repeated dilation values".into()));
    }
    if sorted[0] <= 0.0 {
        return Err(Error::DegenerateFit("nonpositive dilation".into()));
    }
    // extend the profile once, for the smallest dilation
    let base = template.with_eps(sorted[0])?;
    let mut norms = Vec::new();
    for &e in eps_list {
        let cfg = base.with_eps(e)?;
        let rep = weighted_norm(&error_field(&cfg), template.gamma_w - 4.0, 0, 0.0, domain)?;
        norms.push(rep.total);
    }
    if norms.iter().any(|n| !(*n > 0.0 && n.is_finite())) {
        return Err(Error::DegenerateFit("nonpositive or non-finite norm".into()));
    }
    let lx: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let (slope, intercept) = linear_fit(&lx, &ly);
    Ok(DecayFit { eps: eps_list.to_vec(), norms, slope, intercept, nominal: template.nominal_rate() })
}

/// `Q(v) = -(ū+v)^p + ū^p + p ū^{p-1} v`, with `|ū+v|^p` when `ū + v < 0`.
pub fn remainder_q(ubar: f64, v: f64, p: f64) -> f64 {
    -(ubar + v).abs().powf(p) + ubar.powf(p) + p * ubar.powf(p - 1.0) * v
}

pub fn remainder_q_many(samples: &[(f64, f64)], p: f64) -> Vec<f64> {
    samples.iter().map(|&(u, v)| remainder_q(u, v, p)).collect()
}

/// Columnar export: coordinates, `ū`, `f`, shell index (`-1` outside every shell).
pub fn write_error_samples<W: Write>(
    config: &GlueConfig,
    domain: &DomainSpec,
    points: &[Vec<f64>],
    mut w: W,
) -> Result<()> {
    let approx = approx_solution(config);
    let dim = config.dim();
    let cols: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    writeln!(w, "{} ubar f shell", cols.join(" "))?;
    for x in points {
        let v = approx.eval(x)?;
        let d = distance_to(&domain.singular, x);
        let shell = (0..=domain.shells)
            .find(|&m| {
                let s = domain.sigma * 0.5f64.powi(m as i32);
                d <= s && d >= 0.5 * s
            })
            .map_or(-1, |m| m as i64);
        let coords: Vec<String> = x.iter().map(|t| format!("{t:e}")).collect();
        writeln!(w, "{} {:e} {:e} {shell}", coords.join(" "), v.u, v.f)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_endpoints() {
        let a = smoothstep_jet(1e-12);
        let b = smoothstep_jet(1.0 - 1e-12);
        for k in 0..5 {
            assert!(a[k].abs() < 1e-7);
            if k > 0 {
                assert!(b[k].abs() < 1e-6, "k={k} {}", b[k]);
            }
        }
        assert!((b[0] - 1.0).abs() < 1e-9);
        assert!((smoothstep_jet(0.5)[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn remainder_quadratic() {
        assert_eq!(remainder_q(3.0, 0.0, 2.0), 0.0);
        assert!((remainder_q(3.0, 0.7, 2.0) + 0.49).abs() < 1e-12);
    }
}

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, gauss_on};
use serde::{Deserialize, Serialize};

/// Grid description; two kernels built from equal specs are identical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "N")]
    pub n: i64,
    pub alpha_w: f64,
    pub panels: usize,
    pub order: usize,
    pub grading: f64,
}

impl GridSpec {
    pub fn new(n: i64, alpha_w: f64, panels: usize, order: usize) -> Self {
        GridSpec { n, alpha_w, panels, order, grading: 2.0 }
    }

    pub fn refined(&self) -> Self {
        GridSpec { panels: 2 * self.panels, ..*self }
    }
}

/// Panels `[(k/M)^σ, ((k+1)/M)^σ]` with `q` Gauss nodes each.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub spec: GridSpec,
    pub edges: Vec<f64>,
    pub nodes: Vec<f64>,
    /// plain `dr` weights
    pub weights: Vec<f64>,
    pub(crate) ref_nodes: Vec<f64>,
    pub(crate) bary: Vec<f64>,
    /// `∫_{-1}^{x_i} L_k`
    pub(crate) cum_ref: Vec<Vec<f64>>,
    /// `L_k'(x_i)`
    pub(crate) diff_ref: Vec<Vec<f64>>,
}

pub(crate) fn lagrange_at(xs: &[f64], bary: &[f64], x: f64) -> Vec<f64> {
    if let Some(k) = xs.iter().position(|&xk| xk == x) {
        let mut out = vec![0.0; xs.len()];
        out[k] = 1.0;
        return out;
    }
    let terms: Vec<f64> = xs.iter().zip(bary).map(|(xk, bk)| bk / (x - xk)).collect();
    let s: f64 = terms.iter().sum();
    terms.iter().map(|t| t / s).collect()
}

impl RadialGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        if spec.n < 5 {
            return Err(Error::DimensionTooSmall(spec.n));
        }
        if spec.panels < 2 || spec.order < 2 {
            return Err(Error::InvalidArgument("grid needs at least two panels of order two".into()));
        }
        if !(spec.alpha_w > -4.0 && spec.alpha_w <= 0.0) {
            return Err(Error::InvalidArgument(format!("alpha_w {} outside (-4, 0]", spec.alpha_w)));
        }
        let m = spec.panels as f64;
        let edges: Vec<f64> = (0..=spec.panels).map(|k| (k as f64 / m).powf(spec.grading)).collect();
        let (xs, ws) = gauss_legendre(spec.order);
        let q = spec.order;
        let mut nodes = Vec::with_capacity(spec.panels * q);
        let mut weights = Vec::with_capacity(spec.panels * q);
        for k in 0..spec.panels {
            let (a, b) = (edges[k], edges[k + 1]);
            for i in 0..q {
                nodes.push(0.5 * (a + b) + 0.5 * (b - a) * xs[i]);
                weights.push(0.5 * (b - a) * ws[i]);
            }
        }
        let bary: Vec<f64> = (0..q)
            .map(|k| 1.0 / (0..q).filter(|&i| i != k).map(|i| xs[k] - xs[i]).product::<f64>())
            .collect();
        let cum_ref = (0..q)
            .map(|i| {
                let mut row = vec![0.0; q];
                for (x, w) in gauss_on(q, -1.0, xs[i]) {
                    for (r, l) in row.iter_mut().zip(lagrange_at(&xs, &bary, x)) {
                        *r += w * l;
                    }
                }
                row
            })
            .collect();
        let diff_ref = (0..q)
            .map(|i| {
                let mut row = vec![0.0; q];
                let mut diag = 0.0;
                for k in 0..q {
                    if k != i {
                        row[k] = bary[k] / bary[i] / (xs[i] - xs[k]);
                        diag -= row[k];
                    }
                }
                row[i] = diag;
                row
            })
            .collect();
        Ok(RadialGrid { spec, edges, nodes, weights, ref_nodes: xs, bary, cum_ref, diff_ref })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> f64 {
        self.spec.n as f64
    }

    /// `∫_0^1 g(r) r^{N-1+extra} dr`.
    pub fn integrate(&self, g: &[f64], extra: f64) -> f64 {
        let e = self.dim() - 1.0 + extra;
        self.nodes.iter().zip(&self.weights).zip(g).map(|((r, w), v)| w * r.powf(e) * v).sum()
    }

    /// `∫_0^{r_i} g` at every node.
    pub fn cumulative(&self, g: &[f64]) -> Vec<f64> {
        let q = self.spec.order;
        let mut out = vec![0.0; self.len()];
        let mut base = 0.0;
        for k in 0..self.spec.panels {
            let half = 0.5 * (self.edges[k + 1] - self.edges[k]);
            let seg = &g[k * q..(k + 1) * q];
            for i in 0..q {
                let s: f64 = self.cum_ref[i].iter().zip(seg).map(|(c, v)| c * v).sum();
                out[k * q + i] = base + half * s;
            }
            base += seg.iter().zip(&self.weights[k * q..(k + 1) * q]).map(|(v, w)| v * w).sum::<f64>();
        }
        out
    }

    /// `∫_0^1 g`.
    pub fn total(&self, g: &[f64]) -> f64 {
        g.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Panel-wise polynomial derivative.
    pub fn derivative(&self, g: &[f64]) -> Vec<f64> {
        let q = self.spec.order;
        let mut out = vec![0.0; self.len()];
        for k in 0..self.spec.panels {
            let scale = 2.0 / (self.edges[k + 1] - self.edges[k]);
            let seg = &g[k * q..(k + 1) * q];
            for i in 0..q {
                out[k * q + i] = scale * self.diff_ref[i].iter().zip(seg).map(|(d, v)| d * v).sum::<f64>();
            }
        }
        out
    }

    /// `u'' + (N-1)/r u'` by panel-wise differentiation.
    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let d1 = self.derivative(u);
        let d2 = self.derivative(&d1);
        self.nodes.iter().zip(d1.iter().zip(&d2)).map(|(r, (a, b))| b + (self.dim() - 1.0) / r * a).collect()
    }

    pub fn panel_of(&self, r: f64) -> usize {
        let k = self.edges.partition_point(|&e| e <= r);
        k.saturating_sub(1).min(self.spec.panels - 1)
    }

    /// Polynomial interpolation of nodal values at `r ∈ [0, 1]`.
    pub fn interpolate(&self, g: &[f64], r: f64) -> f64 {
        let k = self.panel_of(r);
        let (a, b) = (self.edges[k], self.edges[k + 1]);
        let x = (2.0 * r - a - b) / (b - a);
        let q = self.spec.order;
        lagrange_at(&self.ref_nodes, &self.bary, x).iter().zip(&g[k * q..(k + 1) * q]).map(|(l, v)| l * v).sum()
    }

    pub(crate) fn panel_lagrange(&self, k: usize, r: f64) -> Vec<f64> {
        let (a, b) = (self.edges[k], self.edges[k + 1]);
        lagrange_at(&self.ref_nodes, &self.bary, (2.0 * r - a - b) / (b - a))
    }
}

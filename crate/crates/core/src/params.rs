//! Problem parameters and the closed-form constants attached to them.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A validated instance `(N, p)` with every derived constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "N")]
    pub n: i64,
    pub p: f64,
    pub alpha_w: f64,
    pub c_p: f64,
    pub k_const: f64,
    #[serde(rename = "A_p")]
    pub a_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmdenCoeffs {
    #[serde(rename = "K0")]
    pub k0: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "K3")]
    pub k3: f64,
}

impl EmdenCoeffs {
    pub fn as_array(&self) -> [f64; 4] {
        [self.k0, self.k1, self.k2, self.k3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialExponents {
    #[serde(rename = "N")]
    pub n: i64,
    pub serrin: f64,
    pub sobolev: f64,
    /// `(N+2)/(N-6)`, absent for `N <= 6`.
    pub p0: Option<f64>,
    pub p1_plus: f64,
    pub p1_minus: f64,
    /// Zero of `K1` at the Sobolev exponent.
    pub k1_zero: f64,
    pub p2_plus: f64,
    pub p2_minus: f64,
}

pub fn serrin(n: i64) -> f64 {
    let nf = n as f64;
    nf / (nf - 4.0)
}

pub fn sobolev(n: i64) -> f64 {
    let nf = n as f64;
    (nf + 4.0) / (nf - 4.0)
}

/// `k(p, N)`; the limit of `r^4 u^{p-1}` at the singularity.
pub fn k_of(n: i64, p: f64) -> f64 {
    let nf = n as f64;
    let q = p - 1.0;
    8.0 * (p + 1.0) / q.powi(4)
        * (nf * nf * q * q + 8.0 * p * (p + 1.0) + nf * (2.0 + 4.0 * p - 6.0 * p * p))
}

pub fn alpha_of(n: i64, p: f64) -> f64 {
    let nf = n as f64;
    (nf - 4.0) * p - (nf + 4.0)
}

pub fn validate_params(n: i64, p: f64) -> Result<Params> {
    if n < 5 {
        return Err(Error::DimensionTooSmall(n));
    }
    if !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p = {p} is not finite")));
    }
    let lo = serrin(n);
    let hi = sobolev(n);
    if p <= lo {
        return Err(Error::BelowSerrin { p, bound: lo });
    }
    if p >= hi {
        return Err(Error::AboveSobolev { p, bound: hi });
    }
    Ok(params_unchecked(n, p))
}

/// Populates the constants without checking the exponent window.
pub fn params_unchecked(n: i64, p: f64) -> Params {
    let k = k_of(n, p);
    Params {
        n,
        p,
        alpha_w: alpha_of(n, p),
        c_p: k.powf(1.0 / (p - 1.0)),
        k_const: k,
        a_p: p * k,
    }
}

impl Params {
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `4/(p-1)`, the singular exponent.
    pub fn a(&self) -> f64 {
        4.0 / (self.p - 1.0)
    }

    /// Slow unstable rate at the origin of the Emden-Fowler system.
    pub fn mu_slow(&self) -> f64 {
        self.nf() - 4.0 - self.a()
    }

    pub fn mu_fast(&self) -> f64 {
        self.nf() - 2.0 - self.a()
    }

    /// Overshoot threshold used by the shooting classifier.
    pub fn b_max(&self) -> f64 {
        2.0 * ((self.p + 1.0) * self.k_const / 2.0).powf(1.0 / (self.p - 1.0))
    }
}

/// `K1` in its expanded polynomial form, used as a transcription cross-check.
pub fn k1_expanded(n: i64, p: f64) -> f64 {
    let nf = n as f64;
    let q = p - 1.0;
    -2.0 / q.powi(3)
        * ((6.0 * nf - nf * nf - 8.0) * p.powi(3)
            + (22.0 * nf - nf * nf - 56.0) * p * p
            + (5.0 * nf * nf - 14.0 * nf - 56.0) * p
            - 3.0 * nf * nf
            - 8.0
            - 14.0 * nf)
}

pub fn k3_expanded(n: i64, p: f64) -> f64 {
    let nf = n as f64;
    2.0 / (p - 1.0) * (nf + 4.0 - p * (nf - 4.0))
}

/// Coefficients of `u'''' + K3 u''' + K2 u'' + K1 u' + K0 u = u^p`.
pub fn emden_coeffs(params: &Params) -> EmdenCoeffs {
    let nf = params.nf();
    let p = params.p;
    let q = p - 1.0;
    let al = params.alpha_w;
    let b = 4.0 + al;
    let m = nf * nf - 10.0 * nf + 20.0;

    let k0 = b / q.powi(4)
        * (2.0 * (nf - 2.0) * (nf - 4.0) * q.powi(3) + b * m * q * q
            - 2.0 * b * b * (nf - 4.0) * q
            + b.powi(3));
    let k1 = -2.0 / q.powi(3)
        * ((nf - 2.0) * (nf - 4.0) * q.powi(3) + b * m * q * q
            - 3.0 * (al * al + 8.0 * al + 16.0) * (nf - 4.0) * q
            + 2.0 * al * (al * al + 12.0 * al + 48.0)
            + 128.0);
    let k2 = 1.0 / (q * q)
        * (m * q * q - 6.0 * b * (nf - 4.0) * q + 6.0 * al * (al + 8.0) + 96.0);
    let k3 = 2.0 / q * ((nf - 4.0) * q - 2.0 * b);

    // K0 cancels near the Serrin exponent; compare on the scale of its factors
    let a = 4.0 / q;
    let scale: f64 = [0.0, 2.0, 2.0 - nf, 4.0 - nf].iter().map(|g: &f64| g.abs() + a).product();
    debug_assert!(
        (k0 - params.k_const).abs() <= 1e-12 * scale.max(1.0),
        "K0 disagrees with k(p,N)"
    );
    EmdenCoeffs { k0, k1, k2, k3 }
}

pub fn special_exponents(n: i64) -> SpecialExponents {
    let nf = n as f64;
    let s1 = (nf * nf + 4.0).sqrt();
    let s2 = (nf * nf - 4.0 * nf + 8.0).sqrt();
    SpecialExponents {
        n,
        serrin: serrin(n),
        sobolev: sobolev(n),
        p0: if n > 6 { Some((nf + 2.0) / (nf - 6.0)) } else { None },
        p1_plus: (nf + 4.0 + 2.0 * s1) / (3.0 * nf - 8.0),
        p1_minus: (nf + 4.0 - 2.0 * s1) / (3.0 * nf - 8.0),
        k1_zero: sobolev(n),
        p2_plus: (6.0 - nf + 2.0 * s2) / (nf - 2.0),
        p2_minus: (6.0 - nf - 2.0 * s2) / (nf - 2.0),
    }
}

/// An evenly spaced grid of `count` exponents strictly inside the window.
pub fn p_grid(n: i64, count: usize) -> Vec<f64> {
    let lo = serrin(n);
    let hi = sobolev(n);
    (1..=count)
        .map(|i| lo + (hi - lo) * i as f64 / (count + 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point() {
        let pr = validate_params(10, 2.0).unwrap();
        assert_eq!(pr.k_const, 192.0);
        assert_eq!(pr.a_p, 384.0);
        assert_eq!(pr.alpha_w, -2.0);
        assert!((pr.c_p - 192.0).abs() < 1e-12);
        let k = emden_coeffs(&pr);
        assert_eq!(k.as_array(), [192.0, -64.0, -28.0, 4.0]);
    }

    #[test]
    fn endpoints_rejected() {
        assert!(matches!(validate_params(10, 10.0 / 6.0), Err(Error::BelowSerrin { .. })));
        assert!(matches!(validate_params(8, 3.0), Err(Error::AboveSobolev { .. })));
        assert!(matches!(validate_params(4, 3.0), Err(Error::DimensionTooSmall(4))));
        assert_eq!(k_of(8, 3.0), 64.0);
    }

    #[test]
    fn expanded_forms_agree() {
        for n in 5..=14 {
            for p in p_grid(n, 17) {
                let pr = validate_params(n, p).unwrap();
                let k = emden_coeffs(&pr);
                assert!((k.k1 - k1_expanded(n, p)).abs() <= 1e-9 * k.k1.abs().max(1.0));
                assert!((k.k3 - k3_expanded(n, p)).abs() <= 1e-12 * k.k3.abs().max(1.0));
            }
        }
    }

    #[test]
    fn special_values() {
        let s = special_exponents(10);
        assert!((s.p2_plus - (-4.0 + 2.0 * 68f64.sqrt()) / 8.0).abs() < 1e-14);
        assert!(s.p2_minus < 0.0 && 0.0 < s.p2_plus && s.p2_plus < s.serrin);
        assert!(special_exponents(6).p0.is_none());
        assert!(special_exponents(5).p0.is_none());
    }
}

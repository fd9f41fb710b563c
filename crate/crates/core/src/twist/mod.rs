//! The standard twist F(s, alpha) = sum a(n) n^{-s} e(-alpha n^{1/d}).
//!
//! Dirichlet sums, the smoothed twist and its extrapolation, companion functions,
//! residues at s*_l, the residual function R and the error function H_k.

mod companion;
mod continuation;
mod error_fn;
mod series;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexfn::gamma::{gamma, gamma_derivative};
use crate::error::{Error, Result};
use crate::selberg::{
    conj_series_value, entire_product_check, invariants, LFunctionDescriptor, SineExpansion,
};
use crate::structural::structural_cached;

pub use companion::{
    auto_strata, f_bar_ell, f_bar_ell_direct, f_bar_ell_stratified, growth_probe, GrowthReport, GrowthSample,
};
pub use continuation::{
    continue_twist, default_ladder, fit_residues, ContinuationResult, ResidueFit,
};
pub use error_fn::{
    h_k_detailed, h_k_eval, h_k_on_line, residue_identity_check, verify_fe, FEConfig, FEReport,
    HkValue,
};
pub use series::{smoothed_horizon, smoothed_twist, twist_series, SeriesValue};

type C64 = Complex64;

/// Relative tolerance for n_alpha to count as an integer.
pub const SPECTRUM_TOL: f64 = 1e-9;
/// |d_l| at or below this counts as a vanishing structural coefficient.
pub const ZERO_COEFF: f64 = 1e-10;

/// Parameters of a twist evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistQuery {
    pub s: C64,
    pub alpha: f64,
    pub horizon: usize,
    #[serde(rename = "X_ladder")]
    pub x_ladder: Vec<f64>,
    pub k: usize,
}

impl TwistQuery {
    pub fn new(s: C64, alpha: f64, horizon: usize, x_ladder: Vec<f64>, k: usize) -> Result<Self> {
        let q = TwistQuery {
            s,
            alpha,
            horizon,
            x_ladder,
            k,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_ladder(&self.x_ladder)
    }

    /// z_X(alpha) = 1/X + 2 pi i alpha.
    pub fn z_x(&self, x: f64) -> C64 {
        C64::new(1.0 / x, 2.0 * PI * self.alpha)
    }
}

/// A potential pole s*_l of F(s, alpha) with its residue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleData {
    pub ell: usize,
    pub location: C64,
    pub residue: C64,
    pub in_spectrum: bool,
    pub n_alpha: f64,
}

/// Spectrum membership of alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub alpha: f64,
    pub member: bool,
    /// q d^{-d} alpha^d, snapped to the nearest integer when within tolerance.
    pub n_alpha: f64,
}

impl SpectrumPoint {
    /// The integer n_alpha, when there is one.
    pub fn index(&self) -> Option<usize> {
        if self.n_alpha >= 1.0 && self.n_alpha.fract() == 0.0 {
            Some(self.n_alpha as usize)
        } else {
            None
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    Ok(())
}

pub(crate) fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.iter().any(|&x| !(x > 1.0 && x.is_finite())) {
        return Err(Error::Domain("every smoothing parameter X must exceed 1".into()));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("X ladder must be strictly increasing".into()));
    }
    Ok(())
}

/// s_l = (d+1)/(2d) - l/d.
pub fn s_ell(d: f64, ell: usize) -> f64 {
    (d + 1.0) / (2.0 * d) - ell as f64 / d
}

/// k_0 = min{k >= 1 : s_k <= 0}.
pub fn k_zero(d: f64) -> usize {
    let mut k = 1;
    while s_ell(d, k) > 0.0 {
        k += 1;
    }
    k
}

/// n_alpha = q d^{-d} alpha^d and whether alpha lies in Spec(F).
pub fn spectrum_membership(desc: &LFunctionDescriptor, alpha: f64) -> Result<SpectrumPoint> {
    check_alpha(alpha)?;
    let inv = invariants(desc);
    let d = inv.d;
    let raw = inv.q * d.powf(-d) * alpha.powf(d);
    let m = raw.round();
    let n_alpha = if m >= 1.0 && (raw - m).abs() <= SPECTRUM_TOL * raw.max(1.0) {
        m
    } else {
        raw
    };
    let mut p = SpectrumPoint {
        alpha,
        member: false,
        n_alpha,
    };
    if let Some(n) = p.index() {
        p.member = desc.coefficients.coefficient(n)?.norm() > 1e-14;
    }
    Ok(p)
}

/// Residue of F(s, alpha) at s*_l.
pub fn theorem3_residue(desc: &LFunctionDescriptor, alpha: f64, ell: usize) -> Result<PoleData> {
    let sp = spectrum_membership(desc, alpha)?;
    let inv = invariants(desc);
    let d = inv.d;
    let location = C64::new(s_ell(d, ell), -inv.theta);
    let mut pole = PoleData {
        ell,
        location,
        residue: C64::new(0.0, 0.0),
        in_spectrum: sp.member,
        n_alpha: sp.n_alpha,
    };
    if !sp.member {
        return Ok(pole);
    }
    let dl = structural_cached(desc, ell)?.d(ell);
    if dl.norm() <= ZERO_COEFF {
        return Ok(pole);
    }
    let n = sp.n_alpha;
    let a = desc.coefficients.coefficient(n as usize)?.conj();
    let base = inv.q.ln() / d - (2.0 * PI * d).ln();
    let log = C64::new(-0.5 * (2.0 * PI).ln(), inv.root.arg())
        + C64::new(0.0, -PI / 2.0) * (inv.xi + location * d)
        + (d / 2.0 - location * d) * base
        - (1.0 - location) * n.ln();
    pole.residue = dl / d * a * log.exp();
    Ok(pole)
}

/// Residual function R(s, alpha) carrying the polar part of F at s = 1.
pub fn residual_r(desc: &LFunctionDescriptor, s: C64, alpha: f64) -> Result<C64> {
    check_alpha(alpha)?;
    let m_f = desc.polar.m_f;
    if m_f == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let d = desc.degree();
    let ds = s * d;
    let lz = C64::new((2.0 * PI * alpha).ln(), PI / 2.0);
    let pole = |e: Error| match e {
        Error::Pole(_) => Error::Pole(format!(
            "R(s, alpha) at s = {s}: Gamma(d s) is singular at d s = {ds}"
        )),
        other => other,
    };
    let mut derivs = Vec::with_capacity(m_f);
    for j in 0..m_f {
        derivs.push(if j == 0 {
            gamma(ds).map_err(pole)?
        } else {
            gamma_derivative(ds, j).map_err(pole)?
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for m in 1..=m_f {
        let mut inner = C64::new(0.0, 0.0);
        let mut power = C64::new(1.0, 0.0);
        let mut h_fact = 1.0;
        for h in 0..m {
            if h > 0 {
                power *= -lz;
                h_fact *= h as f64;
            }
            let rest = m - 1 - h;
            inner += power * derivs[rest] / (h_fact * factorial(rest));
        }
        acc += inner * desc.polar.gamma_m(m) * d.powi(m as i32);
    }
    Ok(acc * (-ds * lz).exp())
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// S_F(y) conj F(1 - conj y), bridging the pole of F at 1 through F/h_F.
pub(crate) fn sine_times_dual(
    desc: &LFunctionDescriptor,
    sine: &SineExpansion,
    y: C64,
) -> Result<C64> {
    if desc.polar.m_f > 0 && y.norm() < 1e-6 && desc.coefficients.has_oracle() {
        return entire_product_check(desc, y);
    }
    Ok(sine.eval(y) * conj_series_value(&desc.coefficients, 1.0 - y)?)
}

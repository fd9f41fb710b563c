//! The error function H_k, functional-equation verification and the residue identity.
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::companion::{f_bar_ell_direct_with_error, f_bar_ell_with_error, auto_strata};
use super::continuation::{continue_twist, default_ladder};
use super::{check_alpha, factorial, ZERO_COEFF, k_zero, residual_r, s_ell, sine_times_dual, spectrum_membership};
use crate::compat::detect_strict;
use crate::complexfn::gamma::{gamma, log_gamma};
use crate::complexfn::quad::{line_integral, LineContour};
use crate::error::{Error, Result};
use crate::selberg::{
    conj_series_value, invariants, shift_to_zero_theta, sine_expansion, LFunctionDescriptor,
    SineExpansion,
};
use crate::structural::{e_m_with, log_prefactor, structural_cached};

type C64 = Complex64;

/// Inverse-factorial terms integrated in closed form beyond the stratum.
const CLOSED_TERMS: usize = 6;
const QUAD_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HkValue {
    pub value: C64,
    pub error: f64,
    /// Abscissa u_k of the integration line.
    pub abscissa: f64,
    pub delta: f64,
    /// Line integral (closed-form terms plus the quadrature of the remainder).
    pub line: C64,
    /// Residues at w = -nu collected when k < k_0.
    pub e_k_sum: C64,
}

struct Context<'a> {
    g: &'a LFunctionDescriptor,
    sine: SineExpansion,
    d: f64,
    d_ell: Vec<C64>,
    n_alpha: f64,
    /// log(2 pi i alpha), principal branch.
    log_z: C64,
    alpha: f64,
}

impl<'a> Context<'a> {
    fn new(g: &'a LFunctionDescriptor, alpha: f64, order: usize) -> Result<Self> {
        let d = g.degree();
        Ok(Context {
            g,
            sine: sine_expansion(g)?,
            d,
            d_ell: structural_cached(g, order)?.d_ell.clone(),
            n_alpha: spectrum_membership(g, alpha)?.n_alpha,
            log_z: C64::new((2.0 * PI * alpha).ln(), PI / 2.0),
            alpha,
        })
    }

    fn p(&self, x: C64) -> C64 {
        log_prefactor(self.g, x)
    }
}

fn pole_context(what: &str, e: Error) -> Error {
    match e {
        Error::Pole(m) => Error::Pole(format!("{what}: {m}")),
        other => other,
    }
}

/// Line integral of the H_k integrand on Re w = c for a theta = 0 descriptor.
fn line_value(ctx: &Context, s: C64, k: usize, c: f64) -> Result<(C64, f64)> {
    let d = ctx.d;
    let big_k = k + CLOSED_TERMS;
    let z0 = (C64::new(s_ell(d, 0), 0.0) - s) * d;
    let ps = ctx.p(s);
    let mut closed = C64::new(0.0, 0.0);
    let mut closed_err = 0.0;
    let mut scale: f64 = 0.0;
    for l in k + 1..=big_k {
        let dl = ctx.d_ell[l];
        if dl.norm() == 0.0 {
            continue;
        }
        let xi = (C64::new(s_ell(d, l), 0.0) - s) * d;
        let gx = gamma(xi).map_err(|e| pole_context("closed-form term", e))?;
        let (fb, fb_err) = f_bar_ell_direct_with_error(ctx.g, 1.0 - s, ctx.alpha, l)?;
        let lead = ps.exp() * dl * gx;
        let mut term = lead * fb;
        closed_err += lead.norm() * fb_err;
        // poles of Gamma(xi - w) left of the line
        let mut m = 0usize;
        while xi.re + (m as f64) < c {
            let e = xi + m as f64;
            let y = C64::new(s_ell(d, l) + m as f64 / d, 0.0);
            let log = C64::new(0.0, -PI / 2.0) * e - e / d * ctx.n_alpha.ln();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let st = sine_times_dual(ctx.g, &ctx.sine, y)?;
            term -= ps.exp() * dl * gamma(e)? * log.exp() * st * (sign / factorial(m));
            m += 1;
        }
        // poles of Gamma(w) right of the line when c < 0
        let mut nu = 0usize;
        while -(nu as f64) > c {
            let x = s - nu as f64 / d;
            let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
            let log = ctx.p(x) + ctx.log_z * nu as f64;
            let st = sine_times_dual(ctx.g, &ctx.sine, x)?;
            term -= log.exp() * dl * gamma(xi + nu as f64)? * st * (sign / factorial(nu));
            nu += 1;
        }
        scale = scale.max(term.norm());
        closed += term;
    }

    let d_ell = &ctx.d_ell[..=big_k];
    let integrand = |w: C64| -> Result<C64> {
        let x = s + w / d;
        let z = z0 - w;
        let (ls, sv) = ctx.sine.eval_scaled(x);
        let ek = e_m_with(ctx.g, d_ell, z)?;
        let ex = ctx.p(x) + log_gamma(z)? + log_gamma(w)? - w * ctx.log_z + ls;
        let fb = conj_series_value(&ctx.g.coefficients, 1.0 - x)?;
        Ok(ex.exp() * ek * sv * fb)
    };
    let t = s.im;
    let tol = QUAD_REL_TOL * scale.max(ps.exp().norm()).max(1.0);
    let contour = LineContour::new(c, 0.5 * d * t.abs() + 16.0, tol).centered(-0.5 * d * t);
    let quad = line_integral(integrand, &contour)?;
    Ok((closed + quad.value, closed_err + quad.error))
}

fn nonzero(ctx: &Context, l: usize) -> bool {
    ctx.d_ell[l].norm() > ZERO_COEFF
}

/// Checks the stratum and returns delta.
fn strip_delta(ctx: &Context, sigma: f64, k: usize) -> Result<f64> {
    let d = ctx.d;
    let top = k + CLOSED_TERMS;
    for l in 0..=top {
        if !nonzero(ctx, l) {
            continue;
        }
        let sl = s_ell(d, l);
        let inside = if l <= k { sl > sigma } else { sl < sigma };
        if !inside {
            return Err(Error::Precondition(format!(
                "strip violation: sigma = {sigma} is not in (s_{}, s_{k}) = ({}, {}) away from poles with d_l != 0 (s_{l} = {sl})",
                k + 1,
                s_ell(d, k + 1),
                s_ell(d, k)
            )));
        }
    }
    let dist = (0..=top)
        .filter(|&l| nonzero(ctx, l))
        .map(|l| (s_ell(d, l) - sigma).abs())
        .fold(f64::INFINITY, f64::min);
    let big_d = d * dist;
    let mut delta = 0.1f64.min(big_d / 4.0).min(big_d / (2.0 * d));
    // keep Re(1 - s - w/d) > 1 on the line
    delta = delta.min(-d * sigma / 2.0);
    if k < k_zero(d) {
        delta = delta.min((s_ell(d, k) - sigma) / 2.0);
    }
    Ok(delta)
}

/// H_k(s, alpha) with its quadrature error.
pub fn h_k_detailed(desc: &LFunctionDescriptor, s: C64, alpha: f64, k: usize) -> Result<HkValue> {
    check_alpha(alpha)?;
    let theta = invariants(desc).theta;
    let g = shift_to_zero_theta(desc);
    let s = s + C64::new(0.0, theta);
    if s.re >= 0.0 {
        return Err(Error::Precondition(format!(
            "H_k is evaluated for Re s < 0, got {}",
            s.re
        )));
    }
    let ctx = Context::new(&g, alpha, k + CLOSED_TERMS)?;
    let d = ctx.d;
    let delta = strip_delta(&ctx, s.re, k)?;
    let k0 = k_zero(d);
    let c = if k < k0 { d * (delta - s_ell(d, k)) } else { delta };
    let (line, error) = line_value(&ctx, s, k, c)?;
    let mut e_k_sum = C64::new(0.0, 0.0);
    if k < k0 {
        let z0 = (C64::new(s_ell(d, 0), 0.0) - s) * d;
        let mut nu = 0usize;
        while (nu as f64) < d * s_ell(d, k) {
            let x = s - nu as f64 / d;
            let z = z0 + nu as f64;
            let tilde = (ctx.p(x) + log_gamma(z)?).exp() * e_m_with(&g, &ctx.d_ell[..=k], z)?;
            let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
            let st = sine_times_dual(&g, &ctx.sine, x)?;
            e_k_sum += st * tilde * (ctx.log_z * nu as f64).exp() * (sign / factorial(nu));
            nu += 1;
        }
    }
    Ok(HkValue {
        value: line + e_k_sum,
        error,
        abscissa: c,
        delta,
        line,
        e_k_sum,
    })
}

pub fn h_k_eval(desc: &LFunctionDescriptor, s: C64, alpha: f64, k: usize) -> Result<C64> {
    Ok(h_k_detailed(desc, s, alpha, k)?.value)
}

/// The H_k line integral on an arbitrary abscissa c (no residue terms added).
///
/// For k < k_0 and a small c > 0 this equals H_k by the residue theorem.
pub fn h_k_on_line(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    k: usize,
    c: f64,
) -> Result<(C64, f64)> {
    check_alpha(alpha)?;
    let theta = invariants(desc).theta;
    let g = shift_to_zero_theta(desc);
    let s = s + C64::new(0.0, theta);
    let ctx = Context::new(&g, alpha, k + CLOSED_TERMS)?;
    if s.re + c / ctx.d >= 0.0 {
        return Err(Error::Precondition(format!(
            "line Re w = {c} leaves the half-plane Re(s + w/d) < 0"
        )));
    }
    line_value(&ctx, s, k, c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FEConfig {
    #[serde(rename = "X_ladder")]
    pub x_ladder: Option<Vec<f64>>,
    pub horizon: Option<usize>,
}

impl Default for FEConfig {
    fn default() -> Self {
        FEConfig {
            x_ladder: None,
            horizon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FEReport {
    pub s: C64,
    pub alpha: f64,
    pub k: usize,
    pub lhs: C64,
    pub rhs_sum: C64,
    pub residual_term: C64,
    #[serde(rename = "H_k_quadrature")]
    pub h_k_quadrature: C64,
    pub residual: f64,
    pub error_budget: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    #[serde(rename = "H_k_error")]
    pub h_k_error: f64,
}

impl FEReport {
    pub const CSV_HEADER: &'static str = "sigma,t,alpha,k,|lhs|,|rhs|,|H_k|,residual,budget";

    pub fn csv_row(&self) -> String {
        let rhs = self.rhs_sum + self.residual_term + self.h_k_quadrature;
        format!(
            "{},{},{},{},{:.12e},{:.12e},{:.12e},{:.6e},{:.6e}",
            self.s.re,
            self.s.im,
            self.alpha,
            self.k,
            self.lhs.norm(),
            rhs.norm(),
            self.h_k_quadrature.norm(),
            self.residual,
            self.error_budget
        )
    }

    pub fn within_budget(&self) -> bool {
        self.residual <= self.error_budget
    }
}

/// The dual-side sum (omega_F/sqrt(2 pi)) A^{d(1/2-s)} sum_{l<=k} d_l Gamma(d(s_l - s)) conj F_l(1-s).
fn rhs_sum(ctx: &Context, s: C64, k: usize) -> Result<(C64, f64)> {
    let d = ctx.d;
    let ps = ctx.p(s).exp();
    let mut acc = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for l in 0..=k {
        let dl = ctx.d_ell[l];
        if dl.norm() == 0.0 {
            continue;
        }
        let gx = gamma((C64::new(s_ell(d, l), 0.0) - s) * d)
            .map_err(|e| pole_context("dual-side Gamma factor", e))?;
        let (fb, fe) = f_bar_ell_direct_with_error(ctx.g, 1.0 - s, ctx.alpha, l)?;
        let lead = ps * dl * gx;
        acc += lead * fb;
        err += lead.norm() * fe;
    }
    Ok((acc, err))
}

/// Both sides of the functional equation for F(s, alpha) at stratum k.
pub fn verify_fe(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    k: usize,
    config: &FEConfig,
) -> Result<FEReport> {
    check_alpha(alpha)?;
    let theta = invariants(desc).theta;
    let g = shift_to_zero_theta(desc);
    let sg = s + C64::new(0.0, theta);
    let d = g.degree();
    let ladder = config.x_ladder.clone().unwrap_or_else(|| default_ladder(d));
    let h = h_k_detailed(desc, s, alpha, k)?;
    let ctx = Context::new(&g, alpha, k + CLOSED_TERMS)?;
    let lhs = continue_twist(desc, s, alpha, &ladder, config.horizon)?;
    let (rhs, rhs_error) = rhs_sum(&ctx, sg, k)?;
    let residual_term = residual_r(desc, 1.0 - s, alpha)?;
    let residual = (lhs.value - rhs - residual_term - h.value).norm();
    let floor = 1e-12 * (lhs.value.norm() + rhs.norm() + residual_term.norm() + h.value.norm());
    Ok(FEReport {
        s,
        alpha,
        k,
        lhs: lhs.value,
        rhs_sum: rhs,
        residual_term,
        h_k_quadrature: h.value,
        residual,
        error_budget: lhs.error + rhs_error + h.error + floor,
        lhs_error: lhs.error,
        rhs_error,
        h_k_error: h.error,
    })
}

/// Deviations from zero of the residue identity of strict descriptors, nu = 0..=nu_max.
///
/// Cancelling the residues at s = 1 + nu/d of the strict functional equation gives
/// P(1 + nu/d) sum_l (d_l/d) nu! (-1)^{e_l} / (nu + e_l)! conj F_l(-nu/d) + (2 pi i alpha)^nu rho_F = 0.
pub fn residue_identity_check(
    desc: &LFunctionDescriptor,
    alpha: f64,
    nu_max: usize,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let report = detect_strict(desc)?;
    if !report.is_strict {
        return Err(Error::Precondition(format!(
            "residue identity needs a strict functional equation: {}",
            report.failure_reason.unwrap_or_else(|| "not strict".into())
        )));
    }
    if desc.polar.m_f != 1 {
        return Err(Error::Precondition(format!(
            "residue identity needs a simple pole of F(s) at s = 1 (m_F = 1), got m_F = {}",
            desc.polar.m_f
        )));
    }
    let inv = invariants(desc);
    let d = inv.d;
    if (d - d.round()).abs() > 1e-12 || (d.round() as i64) % 2 == 0 {
        return Err(Error::Precondition(format!(
            "residue identity needs an odd integer degree, got d = {d}"
        )));
    }
    // for d = 1 the pole s*_0 = 1 of F(s, alpha), alpha in the spectrum, sits on the nu = 0 point
    if (d - 1.0).abs() < 1e-12 && spectrum_membership(desc, alpha)?.member {
        return Err(Error::Precondition(format!(
            "residue identity needs F(s, alpha) regular at s = 1; alpha = {alpha} is in the spectrum and s*_0 = 1"
        )));
    }
    let h = report.h.unwrap_or(0).max(0) as usize;
    let d_ell = structural_cached(desc, h)?.d_ell.clone();
    let rho_f = desc.polar.gamma_m(1);
    let base = inv.q.ln() / d - (2.0 * PI * d).ln();
    let lead = C64::new(-0.5 * (2.0 * PI).ln(), inv.root.arg());
    let log_z = C64::new((2.0 * PI * alpha).ln(), PI / 2.0);
    let e0 = ((d - 1.0) / 2.0).round() as usize;
    let mut out = Vec::with_capacity(nu_max + 1);
    for nu in 0..=nu_max {
        let s = C64::new(-(nu as f64) / d, 0.0);
        let r = auto_strata(d, s.re);
        let mut acc = C64::new(0.0, 0.0);
        for (l, dl) in d_ell.iter().enumerate() {
            let e = e0 + l;
            let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
            let (fb, _) = f_bar_ell_with_error(desc, s, alpha, l, r)?;
            acc += dl / d * fb * (sign * factorial(nu) / factorial(nu + e));
        }
        let pref = (lead + (-d / 2.0 - nu as f64) * base).exp();
        let dev = pref * acc + (log_z * nu as f64).exp() * rho_f;
        out.push(dev.norm());
    }
    Ok(out)
}

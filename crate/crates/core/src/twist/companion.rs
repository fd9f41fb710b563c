//! Companion functions conj F_l(s, alpha): direct series, stratified continuation, growth.
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::series::{chunked_sum, divisor_tail};
use super::{check_alpha, s_ell, sine_times_dual, spectrum_membership};
use crate::complexfn::gamma::{binom_remainder, gen_binomial, upper_log};
use crate::error::{Error, Result};
use crate::selberg::{invariants, sine_expansion, CoeffTable, LFunctionDescriptor, SineExpansion};

type C64 = Complex64;

/// Terms summed explicitly by the direct series before its tail is stratified.
const DIRECT_TERMS: usize = 1024;
/// Largest index summed in the remainder of a stratification.
const REMAINDER_CAP: usize = 2_000_000;
const TARGET_REL: f64 = 1e-14;
const ACCEPT_REL: f64 = 1e-8;
/// Rounding loss allowed when deepening the strata of the direct series.
const STRATA_REL: f64 = 1e-11;
const EXTRA_STRATA: usize = 10;

struct Setup {
    d: f64,
    rho: C64,
    n_alpha: f64,
    flat: Option<usize>,
    /// a_j e^{i pi d omega_j (1 - s)} and e^{i pi (1/2 - omega_j)}, j = -N..N.
    phases: Vec<(C64, C64, bool)>,
    scale: f64,
    sine: SineExpansion,
}

fn setup(desc: &LFunctionDescriptor, s: C64, alpha: f64, ell: usize) -> Result<Setup> {
    check_alpha(alpha)?;
    let inv = invariants(desc);
    let d = inv.d;
    let sine = sine_expansion(desc)?;
    let sp = spectrum_membership(desc, alpha)?;
    let s_star = C64::new(s_ell(d, ell), -inv.theta);
    let rho = (1.0 - s - s_star) * d;
    let n = sine.n as i64;
    let mut phases = Vec::with_capacity(sine.coefficients.len());
    let mut scale: f64 = 0.0;
    for j in -n..=n {
        let w = sine.omega(j);
        let p = sine.a(j) * (C64::new(0.0, PI * d * w) * (1.0 - s)).exp();
        scale = scale.max(p.norm());
        let rot = C64::from_polar(1.0, PI * (0.5 - w));
        phases.push((p, rot, j == -n));
    }
    Ok(Setup {
        d,
        rho,
        n_alpha: sp.n_alpha,
        flat: sp.index(),
        phases,
        scale: scale.max(f64::MIN_POSITIVE),
        sine,
    })
}

/// The n-th term conj a(n) n^{-s} sum_j a_j e^{i pi d omega_j (1-s)} (1 + z_{n,j})^rho.
fn direct_term(st: &Setup, s: C64, a: C64, n: usize) -> Result<C64> {
    let nf = n as f64;
    let base = a * (-s * nf.ln()).exp();
    let r = (st.n_alpha / nf).powf(1.0 / st.d);
    let mut acc = C64::new(0.0, 0.0);
    for &(p, rot, last) in &st.phases {
        if p.norm() == 0.0 || (last && st.flat == Some(n)) {
            continue;
        }
        let w = C64::new(1.0, 0.0) + rot * r;
        acc += p * (st.rho * upper_log(w)?).exp();
    }
    Ok(base * acc)
}

/// Q_R(z, rho) summed from its series when that converges quickly.
fn binom_tail(z: C64, rho: C64, big_r: usize) -> Result<C64> {
    if z.norm() * rho.norm().max(1.0) > 0.75 {
        return binom_remainder(z, rho, big_r);
    }
    let mut c = gen_binomial(rho, big_r + 1);
    let mut zp = z.powu(big_r as u32 + 1);
    let mut acc = C64::new(0.0, 0.0);
    let mut r = big_r + 1;
    loop {
        let term = c * zp;
        acc += term;
        if term.norm() <= 1e-18 * acc.norm() || term.norm() == 0.0 || r > big_r + 400 {
            break;
        }
        c = c * (rho - r as f64) / (r + 1) as f64;
        zp *= z;
        r += 1;
    }
    Ok(acc)
}

/// Smallest split with |rho z| <= 1/2 beyond it.
fn split_index(st: &Setup) -> usize {
    let m = 2.0 * st.rho.norm().max(1.0);
    (st.n_alpha * m.powf(st.d)).ceil().max(st.n_alpha.floor() + 1.0) as usize
}

/// Remainder cutoff for strata r <= big_r and the tail bound left beyond it.
fn remainder_horizon(
    desc: &LFunctionDescriptor,
    st: &Setup,
    s: C64,
    big_r: usize,
    split: usize,
) -> (usize, f64) {
    let d = st.d;
    let rank = desc.coefficients.divisor_rank().max(1);
    // remainder terms behave like |C(rho, R+1)| n_alpha^{(R+1)/d} n^{-Re s-(R+1)/d}
    let lead = gen_binomial(st.rho, big_r + 1).norm() * st.n_alpha.powf((big_r + 1) as f64 / d);
    let tail_at = |h: f64| 2.0 * st.scale * lead * divisor_tail(rank, s.re + (big_r + 1) as f64 / d, h);
    let mut horizon = (split as f64 * 4.0).max(64.0);
    while tail_at(horizon) > TARGET_REL * st.scale && horizon < REMAINDER_CAP as f64 {
        horizon = (horizon * 1.5).min(REMAINDER_CAP as f64);
    }
    (horizon as usize, tail_at(horizon))
}

/// Rounding error of the strata for r <= big_r, which subtract partial sums from full values.
fn strata_rounding(st: &Setup, mass: f64, big_r: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..=big_r {
        let c = gen_binomial(st.rho, r).norm() * st.n_alpha.powf(r as f64 / st.d);
        worst = worst.max(c);
    }
    4.0 * f64::EPSILON * st.scale * mass * worst
}

/// Strata depth for the direct series: the cheapest depth from the base one upward whose
/// strata lose at most `STRATA_REL` of the scale to rounding.
fn direct_strata(desc: &LFunctionDescriptor, st: &Setup, s: C64, split: usize) -> usize {
    let base = auto_strata(st.d, s.re);
    // |a(n)| n^{-sigma} summed up to the split, bounded through zeta(sigma)^rank
    let rank = desc.coefficients.divisor_rank().max(1) as i32;
    let zs = crate::selberg::zeta(C64::new(s.re, 0.0)).map(|z| z.re).unwrap_or(f64::INFINITY);
    let mass = desc.coefficients.sup_abs() * zs.powi(rank);
    let cost = |r: usize| {
        let (h, _) = remainder_horizon(desc, st, s, r, split);
        (h - split.min(h)) as f64 * 4.0 + (split * (r + 1)) as f64
    };
    let mut best = base;
    let mut best_cost = cost(base);
    for r in base + 1..=base + EXTRA_STRATA {
        if strata_rounding(st, mass, r) > STRATA_REL * st.scale {
            break;
        }
        let c = cost(r);
        if c < best_cost {
            best = r;
            best_cost = c;
        }
    }
    best
}

fn coeffs(desc: &LFunctionDescriptor, n: usize) -> Result<CoeffTable> {
    desc.coefficients.table(n.max(1))
}

/// Exact value for finitely supported coefficients.
fn finite_value(desc: &LFunctionDescriptor, st: &Setup, s: C64, support: usize) -> Result<C64> {
    let t = coeffs(desc, support)?;
    let mut acc = C64::new(0.0, 0.0);
    for n in 1..=support {
        let a = t.get(n).conj();
        if a.norm() != 0.0 {
            acc += direct_term(st, s, a, n)?;
        }
    }
    Ok(acc)
}

/// Stratified evaluation with explicit terms up to `split` and strata r <= big_r.
///
/// Returns the value and an estimate of the remainder truncation and strata rounding errors.
fn stratified_core(
    desc: &LFunctionDescriptor,
    st: &Setup,
    s: C64,
    big_r: usize,
    split: usize,
) -> Result<(C64, f64)> {
    let d = st.d;
    let e = s.re + (big_r + 1) as f64 / d - 1.0;
    if e <= 0.0 {
        return Err(Error::Precondition(format!(
            "insufficient strata: Re s = {} needs R_strata > {}",
            s.re,
            d * (1.0 - s.re) - 1.0
        )));
    }
    let (horizon, trunc) = remainder_horizon(desc, st, s, big_r, split);
    if trunc > ACCEPT_REL * st.scale {
        return Err(Error::NonConvergence(format!(
            "stratified remainder converges too slowly at Re s = {} with R_strata = {big_r}: tail {trunc:.2e} after {horizon} terms",
            s.re
        )));
    }
    let t = coeffs(desc, horizon)?;

    let mut direct = C64::new(0.0, 0.0);
    for n in 1..=split {
        let a = t.get(n).conj();
        if a.norm() != 0.0 {
            direct += direct_term(st, s, a, n)?;
        }
    }

    let mut strata = C64::new(0.0, 0.0);
    let mut rounding = 0.0;
    let mut ipow = C64::new(1.0, 0.0);
    for r in 0..=big_r {
        let x = s + r as f64 / d;
        let y = 1.0 - x;
        let mut partial = C64::new(0.0, 0.0);
        for n in 1..=split {
            let a = t.get(n).conj();
            if a.norm() != 0.0 {
                partial += a * (-x * (n as f64).ln()).exp();
            }
        }
        let full = sine_times_dual(desc, &st.sine, y)?;
        let head = st.sine.eval(y) * partial;
        let coef = gen_binomial(st.rho, r) * st.n_alpha.powf(r as f64 / d);
        strata += coef * ipow * (full - head);
        rounding += 4.0 * f64::EPSILON * coef.norm() * (full.norm() + head.norm());
        ipow *= C64::new(0.0, 1.0);
    }

    let failure = std::sync::Mutex::new(None);
    let (rest, _) = chunked_sum(split + 1, horizon, |n| {
        let a = t.get(n).conj();
        if a.norm() == 0.0 {
            return (C64::new(0.0, 0.0), 0.0);
        }
        let nf = n as f64;
        let base = a * (-s * nf.ln()).exp();
        let r = (st.n_alpha / nf).powf(1.0 / d);
        let mut acc = C64::new(0.0, 0.0);
        for &(p, rot, _) in &st.phases {
            if p.norm() == 0.0 {
                continue;
            }
            match binom_tail(rot * r, st.rho, big_r) {
                Ok(q) => acc += p * q,
                Err(e) => {
                    *failure.lock().expect("lock") = Some(e);
                }
            }
        }
        (base * acc, 0.0)
    });
    if let Some(e) = failure.into_inner().expect("lock") {
        return Err(e);
    }
    Ok((direct + strata + rest, trunc + rounding))
}

/// Stratification depth making the remainder decay like n^{-3} at Re s = sigma.
pub fn auto_strata(d: f64, sigma: f64) -> usize {
    ((d * (4.0 - sigma)).ceil() as i64 - 1).max(0) as usize
}

/// conj F_l(s, alpha): direct series for Re s > 1, stratified continuation otherwise.
pub fn f_bar_ell(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    ell: usize,
    r_strata: usize,
) -> Result<C64> {
    Ok(f_bar_ell_with_error(desc, s, alpha, ell, r_strata)?.0)
}

pub(crate) fn f_bar_ell_with_error(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    ell: usize,
    r_strata: usize,
) -> Result<(C64, f64)> {
    if s.re > 1.0 {
        return f_bar_ell_direct_with_error(desc, s, alpha, ell);
    }
    stratified(desc, s, alpha, ell, r_strata)
}

/// Direct series: the first terms explicitly, the rest through a tail stratification.
pub fn f_bar_ell_direct(desc: &LFunctionDescriptor, s: C64, alpha: f64, ell: usize) -> Result<C64> {
    Ok(f_bar_ell_direct_with_error(desc, s, alpha, ell)?.0)
}

pub(crate) fn f_bar_ell_direct_with_error(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    ell: usize,
) -> Result<(C64, f64)> {
    let st = setup(desc, s, alpha, ell)?;
    if let Some(sup) = desc.coefficients.support() {
        return Ok((finite_value(desc, &st, s, sup)?, 0.0));
    }
    if s.re <= 1.0 {
        return Err(Error::Domain(format!(
            "direct series needs Re s > 1, got {}",
            s.re
        )));
    }
    let split = split_index(&st).max(DIRECT_TERMS);
    let r = direct_strata(desc, &st, s, split);
    stratified_core(desc, &st, s, r, split)
}

/// Stratified continuation split just beyond n_alpha, valid for Re s > 1 - (R+1)/d.
pub fn f_bar_ell_stratified(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    ell: usize,
    r_strata: usize,
) -> Result<C64> {
    Ok(stratified(desc, s, alpha, ell, r_strata)?.0)
}

fn stratified(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    ell: usize,
    r_strata: usize,
) -> Result<(C64, f64)> {
    let st = setup(desc, s, alpha, ell)?;
    if let Some(sup) = desc.coefficients.support() {
        return Ok((finite_value(desc, &st, s, sup)?, 0.0));
    }
    let split = split_index(&st);
    stratified_core(desc, &st, s, r_strata, split)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub t: f64,
    pub value: C64,
    /// |conj F_l(sigma + it)| e^{-(pi/2) d |t|}
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub alpha: f64,
    pub ell: usize,
    pub sigma: f64,
    pub samples: Vec<GrowthSample>,
    /// Least-squares slope of log(normalized) against log|t| over |t| >= 1.
    pub fitted_exponent: f64,
    /// For sigma > 1 the exponent must not exceed 0.1; always true otherwise.
    pub bound_holds: bool,
    pub nonvanishing: bool,
}

/// Samples of |conj F_l(sigma + it, alpha)| normalized by e^{(pi/2) d |t|}.
pub fn growth_probe(
    desc: &LFunctionDescriptor,
    alpha: f64,
    ell: usize,
    sigma: f64,
    t_grid: &[f64],
) -> Result<GrowthReport> {
    let d = desc.degree();
    let r = auto_strata(d, sigma);
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let value = f_bar_ell(desc, C64::new(sigma, t), alpha, ell, r)?;
        samples.push(GrowthSample {
            t,
            value,
            normalized: value.norm() * (-0.5 * PI * d * t.abs()).exp(),
        });
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|p| p.t.abs() >= 1.0 && p.normalized > 0.0)
        .map(|p| (p.t.abs().ln(), p.normalized.ln()))
        .collect();
    let fitted_exponent = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let nonvanishing = samples.iter().any(|p| p.value.norm() > 1e-12);
    Ok(GrowthReport {
        alpha,
        ell,
        sigma,
        bound_holds: sigma <= 1.0 || fitted_exponent <= 0.1,
        samples,
        fitted_exponent,
        nonvanishing,
    })
}

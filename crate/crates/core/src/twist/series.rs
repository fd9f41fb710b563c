//! Truncated twist series and the smoothed twist F_X(s, alpha).
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_alpha;
use crate::complexfn::gamma::log_gamma;
use crate::error::{Error, Result};
use crate::selberg::{CoeffTable, LFunctionDescriptor};

type C64 = Complex64;

const CHUNK: usize = 1 << 15;
/// Tail of the smoothed sum allowed relative to the summed absolute mass.
const SMOOTH_REL_TOL: f64 = 1e-15;

/// A truncated Dirichlet-type sum with an estimate of what was cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: C64,
    pub tail_bound: f64,
    pub terms: usize,
    /// Sum of the absolute values of the included terms.
    pub mass: f64,
}

/// Sum of f(n) over lo..=hi in fixed chunks, reduced in a fixed order.
pub(crate) fn chunked_sum<F>(lo: usize, hi: usize, f: F) -> (C64, f64)
where
    F: Fn(usize) -> (C64, f64) + Sync,
{
    if hi < lo {
        return (C64::new(0.0, 0.0), 0.0);
    }
    let chunks = (hi - lo) / CHUNK + 1;
    let parts: Vec<(C64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = lo + c * CHUNK;
            let b = (a + CHUNK - 1).min(hi);
            let mut acc = C64::new(0.0, 0.0);
            let mut mass = 0.0;
            for n in a..=b {
                let (v, m) = f(n);
                acc += v;
                mass += m;
            }
            (acc, mass)
        })
        .collect();
    parts
        .into_iter()
        .fold((C64::new(0.0, 0.0), 0.0), |(a, m), (b, mb)| (a + b, m + mb))
}

/// Rough bound for sum_{n > N} tau_r(n) n^{-sigma}, sigma > 1.
pub(crate) fn divisor_tail(rank: usize, sigma: f64, n: f64) -> f64 {
    let e = sigma - 1.0;
    let log = (n.ln() + 1.0 / e).max(1.0);
    n.powf(-e) / e * log.powi(rank.saturating_sub(1) as i32)
}

fn table(desc: &LFunctionDescriptor, horizon: usize) -> Result<(CoeffTable, usize)> {
    let limit = match desc.coefficients.support() {
        Some(s) => horizon.min(s),
        None => horizon,
    };
    Ok((desc.coefficients.table(limit.max(1))?, limit))
}

/// sum_{n <= horizon} a(n) n^{-s} e(-alpha n^{1/d}).
pub fn twist_series(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    horizon: usize,
) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    let finite = desc.coefficients.support();
    if finite.is_none() && s.re <= 1.0 {
        return Err(Error::NonConvergence(format!(
            "twist series diverges at Re s = {} <= 1; use the continuation",
            s.re
        )));
    }
    let d = desc.degree();
    let (t, limit) = table(desc, horizon)?;
    let (value, mass) = chunked_sum(1, limit, |n| {
        let a = t.get(n);
        if a.norm() == 0.0 {
            return (C64::new(0.0, 0.0), 0.0);
        }
        let nf = n as f64;
        let phase = (alpha * nf.powf(1.0 / d)).fract();
        let e = -s * nf.ln() + C64::new(0.0, -2.0 * PI * phase);
        let v = a * e.exp();
        (v, v.norm())
    });
    let tail_bound = match finite {
        Some(sup) if horizon >= sup => 0.0,
        _ => {
            desc.coefficients.sup_abs()
                * divisor_tail(desc.coefficients.divisor_rank().max(1), s.re, limit as f64)
        }
    };
    Ok(SeriesValue {
        value,
        tail_bound,
        terms: limit,
        mass,
    })
}

/// Bound for d X^a int_{u0}^inf u^{a-1} e^{-u} du, the smoothed tail beyond n = (X u0)^d.
fn smoothed_tail(d: f64, x: f64, sigma: f64, u0: f64, rank: usize) -> f64 {
    let a = d * (1.0 - sigma);
    let excess = (a - 1.0).max(0.0);
    if u0 <= 2.0 * excess + 1.0 {
        return f64::INFINITY;
    }
    let n = (x * u0).powf(d);
    let log = (n.ln() + 1.0).max(1.0).powi(rank.saturating_sub(1) as i32);
    d * x.powf(a) * (u0.powf(a - 1.0) * (-u0).exp()) / (1.0 - excess / u0) * log
}

/// Expected absolute mass d X^a Gamma(a) of the smoothed sum for a = d(1 - sigma) > 0.
fn mass_scale(d: f64, x: f64, sigma: f64) -> f64 {
    let a = d * (1.0 - sigma);
    if a <= 0.5 {
        return 1.0;
    }
    let lg = log_gamma(C64::new(a, 0.0)).map(|v| v.re).unwrap_or(0.0);
    (d * x.powf(a) * lg.exp()).max(1.0)
}

/// Horizon after which the smoothed tail falls below `rel_tol` times the expected mass.
pub fn smoothed_horizon(desc: &LFunctionDescriptor, s: C64, x: f64, rel_tol: f64) -> usize {
    let d = desc.degree();
    let rank = desc.coefficients.divisor_rank().max(1);
    let target = rel_tol * mass_scale(d, x, s.re) * desc.coefficients.sup_abs().max(1e-300).recip();
    let a = d * (1.0 - s.re);
    let mut u0 = (2.0 * (a - 1.0).max(0.0) + 1.5).max(2.0);
    while smoothed_tail(d, x, s.re, u0, rank) > target && u0 < 1e4 {
        u0 *= 1.02;
    }
    let n = (x * u0).powf(d).ceil();
    let n = n.min(usize::MAX as f64 / 2.0) as usize;
    match desc.coefficients.support() {
        Some(sup) => n.min(sup),
        None => n,
    }
}

/// F_X(s, alpha) = sum a(n) n^{-s} exp(-n^{1/d} z_X(alpha)), z_X = 1/X + 2 pi i alpha.
pub fn smoothed_twist(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    x: f64,
    horizon: usize,
) -> Result<SeriesValue> {
    check_alpha(alpha)?;
    if !(x > 1.0) {
        return Err(Error::Domain(format!("smoothing parameter X = {x} must exceed 1")));
    }
    let d = desc.degree();
    let (t, limit) = table(desc, horizon)?;
    let inv_x = 1.0 / x;
    let (value, mass) = chunked_sum(1, limit, |n| {
        let a = t.get(n);
        if a.norm() == 0.0 {
            return (C64::new(0.0, 0.0), 0.0);
        }
        let nf = n as f64;
        let root = nf.powf(1.0 / d);
        let phase = (alpha * root).fract();
        let e = -s * nf.ln() + C64::new(-root * inv_x, -2.0 * PI * phase);
        let v = a * e.exp();
        (v, v.norm())
    });
    let tail_bound = match desc.coefficients.support() {
        Some(sup) if horizon >= sup => 0.0,
        _ => {
            let u0 = (limit as f64).powf(1.0 / d) * inv_x;
            desc.coefficients.sup_abs()
                * smoothed_tail(
                    d,
                    x,
                    s.re,
                    u0,
                    desc.coefficients.divisor_rank().max(1),
                )
        }
    };
    if tail_bound > SMOOTH_REL_TOL * mass.max(1.0) * 1e3 {
        return Err(Error::NonConvergence(format!(
            "horizon {limit} too small for X = {x}: smoothed tail estimate {tail_bound:.3e}, need about {} terms",
            smoothed_horizon(desc, s, x, SMOOTH_REL_TOL)
        )));
    }
    Ok(SeriesValue {
        value,
        tail_bound,
        terms: limit,
        mass,
    })
}

//! Continuation of F(s, alpha) by extrapolating the smoothed twist in X, and residue fits.
use num_complex::Complex64;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::series::{smoothed_horizon, smoothed_twist};
use super::{check_alpha, check_ladder, s_ell, spectrum_membership, theorem3_residue};
use crate::complexfn::gamma::gamma;
use crate::error::{Error, Result};
use crate::selberg::{invariants, shift_to_zero_theta, LFunctionDescriptor};

type C64 = Complex64;

const HORIZON_REL_TOL: f64 = 1e-15;
/// Poles beyond those to the right of sigma whose contributions are subtracted.
const EXTRA_POLES: usize = 8;
const MAX_POLES: usize = 30;

/// Default X ladder: 32..512 in doublings for degree 1; seven points from 8 to 64 in ratio sqrt 2 otherwise.
pub fn default_ladder(d: f64) -> Vec<f64> {
    if d <= 1.0 {
        vec![32.0, 64.0, 128.0, 256.0, 512.0]
    } else {
        (0..7).map(|i| 8.0 * 2f64.powf(i as f64 / 2.0)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationResult {
    pub value: C64,
    /// Extrapolation spread.
    pub error: f64,
    /// Leading decay exponent of the remainder as fitted from the ladder.
    pub fitted_exponent: f64,
    /// Exponent used by the Richardson table.
    pub exponent: f64,
    #[serde(rename = "X_ladder")]
    pub x_ladder: Vec<f64>,
    /// F_X minus the subtracted residue terms, per ladder point.
    pub corrected: Vec<C64>,
    pub horizons: Vec<usize>,
    /// Indices l whose terms kappa_l were subtracted.
    pub subtracted: Vec<usize>,
}

/// kappa_l(X) = d rho_l Gamma(d(s*_l - s)) X^{d(s*_l - s)} for every significant l.
fn residue_terms(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
) -> Result<Vec<(usize, C64, C64)>> {
    let d = desc.degree();
    let sp = spectrum_membership(desc, alpha)?;
    if !sp.member {
        return Ok(Vec::new());
    }
    let right = (0..MAX_POLES).take_while(|&l| s_ell(d, l) > s.re).count();
    let top = (right + EXTRA_POLES).min(MAX_POLES);
    let mut out = Vec::new();
    for l in 0..=top {
        let pole = theorem3_residue(desc, alpha, l)?;
        if pole.residue.norm() == 0.0 {
            continue;
        }
        let e = (pole.location - s) * d;
        match gamma(e) {
            Ok(g) => out.push((l, pole.residue * g * d, e)),
            // double pole with a Gamma(w) pole: no clean power of X to remove
            Err(Error::Pole(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

/// Exponent p with |V0 - V1| / |V1 - V2| = (X0^-p - X1^-p) / (X1^-p - X2^-p).
fn fit_exponent(x: [f64; 3], v: [C64; 3]) -> Option<f64> {
    let a = (v[0] - v[1]).norm();
    let b = (v[1] - v[2]).norm();
    if !(a > 0.0 && b > 0.0) {
        return None;
    }
    let target = a / b;
    let ratio = |p: f64| (x[0].powf(-p) - x[1].powf(-p)) / (x[1].powf(-p) - x[2].powf(-p));
    let (mut lo, mut hi) = (0.05, 30.0);
    if target <= ratio(lo) || target >= ratio(hi) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Extrapolation table for V(X) = F + c_0 X^-p + c_1 X^-(p+1) + ...
///
/// Entry (i, j) fits F and j correction terms to the points i-j..=i exactly.
fn richardson(x: &[f64], v: &[C64], p: f64) -> Vec<Vec<C64>> {
    let n = v.len();
    let mut t: Vec<Vec<C64>> = vec![Vec::new(); n];
    for i in 0..n {
        t[i].push(v[i]);
        for j in 1..=i {
            let pts = i - j..=i;
            let x0 = x[i - j];
            let m = DMatrix::<C64>::from_fn(j + 1, j + 1, |r, c| {
                let xr = x[i - j + r];
                if c == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new((xr / x0).powf(-(p + (c - 1) as f64)), 0.0)
                }
            });
            let rhs = DVector::<C64>::from_iterator(j + 1, pts.map(|k| v[k]));
            let next = m.lu().solve(&rhs).map(|sol| sol[0]).unwrap_or(t[i][j - 1]);
            t[i].push(next);
        }
    }
    t
}

/// F(s, alpha) from F_X(s, alpha) minus residue terms, extrapolated in X.
///
/// `horizon` overrides the automatic per-X cutoff when given.
pub fn continue_twist(
    desc: &LFunctionDescriptor,
    s: C64,
    alpha: f64,
    x_ladder: &[f64],
    horizon: Option<usize>,
) -> Result<ContinuationResult> {
    check_alpha(alpha)?;
    check_ladder(x_ladder)?;
    if x_ladder.len() < 3 {
        return Err(Error::Domain("X ladder needs at least three points".into()));
    }
    let theta = invariants(desc).theta;
    let g = shift_to_zero_theta(desc);
    let s = s + C64::new(0.0, theta);
    let kappa = residue_terms(&g, s, alpha)?;
    let mut corrected = Vec::with_capacity(x_ladder.len());
    let mut horizons = Vec::with_capacity(x_ladder.len());
    let mut scale: f64 = 0.0;
    for &x in x_ladder {
        let h = horizon.unwrap_or_else(|| smoothed_horizon(&g, s, x, HORIZON_REL_TOL));
        let fx = smoothed_twist(&g, s, alpha, x, h)?;
        let mut v = fx.value;
        for &(_, c, e) in &kappa {
            v -= c * (e * x.ln()).exp();
        }
        scale = scale.max(fx.mass * 1e-16);
        corrected.push(v);
        horizons.push(fx.terms);
    }
    let n = corrected.len();
    let fitted = fit_exponent(
        [x_ladder[n - 3], x_ladder[n - 2], x_ladder[n - 1]],
        [corrected[n - 3], corrected[n - 2], corrected[n - 1]],
    );
    let fitted_exponent = fitted.unwrap_or(1.0);
    let nearest = fitted_exponent.round();
    let exponent = if nearest >= 1.0 && (fitted_exponent - nearest).abs() < 0.3 {
        nearest
    } else {
        fitted_exponent
    };
    // successive corrected values must contract
    let diffs: Vec<f64> = corrected.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let floor = 1e3 * scale;
    if diffs.len() >= 2 {
        let last = diffs[diffs.len() - 1];
        let prev = diffs[diffs.len() - 2];
        if last > floor && last >= prev {
            return Err(Error::NonConvergence(format!(
                "X ladder does not contract at s = {s}: successive differences {prev:.3e}, {last:.3e}"
            )));
        }
    }
    let t = richardson(x_ladder, &corrected, exponent);
    let best = t[n - 1][n - 1];
    let error = (best - t[n - 1][n - 2]).norm().max((best - t[n - 2][n - 2]).norm()) + floor;
    Ok(ContinuationResult {
        value: best,
        error,
        fitted_exponent,
        exponent,
        x_ladder: x_ladder.to_vec(),
        corrected,
        horizons,
        subtracted: kappa.iter().map(|k| k.0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueFit {
    pub ells: Vec<usize>,
    pub residues: Vec<C64>,
    /// Fitted constant term, an estimate of F(s_probe, alpha).
    pub constant: C64,
    pub condition: f64,
    pub residual: f64,
}

/// Residues rho_l(alpha) fitted from smoothed twists against X^{d(s_l - s)} and a constant.
pub fn fit_residues(
    desc: &LFunctionDescriptor,
    s_probe: C64,
    alpha: f64,
    x_ladder: &[f64],
) -> Result<ResidueFit> {
    check_alpha(alpha)?;
    check_ladder(x_ladder)?;
    if s_probe.re >= 0.0 {
        return Err(Error::Precondition(format!(
            "residue fit needs Re s_probe < 0, got {}",
            s_probe.re
        )));
    }
    let inv = invariants(desc);
    let d = inv.d;
    let g = shift_to_zero_theta(desc);
    let s = s_probe + C64::new(0.0, inv.theta);
    let ells: Vec<usize> = (0..MAX_POLES).take_while(|&l| s_ell(d, l) > s.re).collect();
    let cols = ells.len() + 1;
    if x_ladder.len() < cols + 1 {
        return Err(Error::IllConditioned(format!(
            "{} ladder points cannot determine {cols} coefficients with a residual check",
            x_ladder.len()
        )));
    }
    let exps: Vec<C64> = ells
        .iter()
        .map(|&l| (C64::new(s_ell(d, l), 0.0) - s) * d)
        .collect();
    let mut values = Vec::with_capacity(x_ladder.len());
    for &x in x_ladder {
        let h = smoothed_horizon(&g, s, x, HORIZON_REL_TOL);
        values.push(smoothed_twist(&g, s, alpha, x, h)?.value);
    }
    let m = x_ladder.len();
    let x_top = *x_ladder.last().expect("ladder");
    // column scaling by the basis value at the largest X
    let col_scale: Vec<C64> = exps
        .iter()
        .map(|e| (e * x_top.ln()).exp())
        .chain(std::iter::once(C64::new(1.0, 0.0)))
        .collect();
    let mut a = DMatrix::<f64>::zeros(2 * m, 2 * cols);
    let mut b = DVector::<f64>::zeros(2 * m);
    for (i, &x) in x_ladder.iter().enumerate() {
        b[2 * i] = values[i].re;
        b[2 * i + 1] = values[i].im;
        for c in 0..cols {
            let basis = if c < ells.len() {
                (exps[c] * x.ln()).exp()
            } else {
                C64::new(1.0, 0.0)
            } / col_scale[c];
            a[(2 * i, 2 * c)] = basis.re;
            a[(2 * i, 2 * c + 1)] = -basis.im;
            a[(2 * i + 1, 2 * c)] = basis.im;
            a[(2 * i + 1, 2 * c + 1)] = basis.re;
        }
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(Error::IllConditioned(format!(
            "residue fit basis has condition number {condition:.3e}"
        )));
    }
    let sol = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::IllConditioned(format!("residue fit failed: {e}")))?;
    let residual = (&a * &sol - &b).norm();
    let coef: Vec<C64> = (0..cols)
        .map(|c| C64::new(sol[2 * c], sol[2 * c + 1]) / col_scale[c])
        .collect();
    let mut residues = Vec::with_capacity(ells.len());
    for (c, e) in exps.iter().enumerate() {
        let gm = gamma(*e)
            .map_err(|_| Error::IllConditioned(format!("Gamma({e}) is singular at the probe")))?;
        residues.push(coef[c] / (gm * d));
    }
    Ok(ResidueFit {
        ells,
        residues,
        constant: coef[cols - 1],
        condition,
        residual,
    })
}

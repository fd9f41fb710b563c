//! Structural coefficients d_l of the inverse-factorial expansion of h_F.
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexfn::gamma::{bernoulli_poly, log_gamma, stirling_remainder};
use crate::complexfn::series::{series_exp, to_inverse_factorial, SeriesKind, TruncatedSeries};
use crate::error::{Error, Result};
use crate::selberg::{invariants, shift_to_zero_theta, LFunctionDescriptor};

type C64 = Complex64;

const THETA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralExpansion {
    #[serde(rename = "M")]
    pub m: usize,
    pub d_ell: Vec<C64>,
    pub beta: f64,
    pub stirling_cprime: TruncatedSeries,
    pub exp_cdouble: TruncatedSeries,
    pub alpha_beta_pairs: Vec<(C64, C64)>,
}

impl StructuralExpansion {
    pub fn d(&self, ell: usize) -> C64 {
        self.d_ell.get(ell).copied().unwrap_or(C64::new(0.0, 0.0))
    }
}

/// (alpha_j, beta_j) with alpha_j = lambda_j (d-1)/(2d) + conj(mu_j), beta_j = 1 - lambda_j (d+1)/(2d) - mu_j.
pub fn alpha_beta_pairs(desc: &LFunctionDescriptor) -> Vec<(C64, C64)> {
    let d = desc.degree();
    desc.gamma_factors
        .iter()
        .map(|g| {
            (
                g.mu.conj() + g.lambda * (d - 1.0) / (2.0 * d),
                1.0 - g.mu - g.lambda * (d + 1.0) / (2.0 * d),
            )
        })
        .collect()
}

fn require_zero_theta(desc: &LFunctionDescriptor) -> Result<()> {
    let theta = invariants(desc).theta;
    if theta.abs() > THETA_TOL {
        return Err(Error::Precondition(format!(
            "theta_F = {theta} != 0; shift the descriptor with shift_to_zero_theta first"
        )));
    }
    Ok(())
}

/// Inverse-power coefficients c'_1..c'_M of log Sigma(z).
pub fn stirling_coeffs(desc: &LFunctionDescriptor, m: usize) -> Result<TruncatedSeries> {
    require_zero_theta(desc)?;
    let d = desc.degree();
    let pairs = alpha_beta_pairs(desc);
    let mut c = Vec::with_capacity(m);
    for n in 1..=m {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let denom = (n * (n + 1)) as f64;
        let mut acc = C64::new(0.0, 0.0);
        for (g, &(a, b)) in desc.gamma_factors.iter().zip(&pairs) {
            let scale = (d / g.lambda).powi(n as i32);
            acc += (bernoulli_poly(n + 1, a) + bernoulli_poly(n + 1, b)) * (sign * scale / denom);
        }
        acc -= bernoulli_poly(n + 1, C64::new(0.0, 0.0)) * (sign / denom);
        c.push(acc);
    }
    Ok(TruncatedSeries::new(SeriesKind::InversePower, c))
}

fn expansion_cache() -> &'static Mutex<HashMap<(String, usize), Arc<StructuralExpansion>>> {
    static CACHE: OnceLock<Mutex<HashMap<(String, usize), Arc<StructuralExpansion>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// d_0..d_M, including the factor d^{i d theta_F} for theta_F != 0.
pub fn structural_coefficients(desc: &LFunctionDescriptor, m: usize) -> Result<StructuralExpansion> {
    Ok((*structural_cached(desc, m)?).clone())
}

pub(crate) fn structural_cached(
    desc: &LFunctionDescriptor,
    m: usize,
) -> Result<Arc<StructuralExpansion>> {
    let key = (
        serde_json::to_string(&(&desc.omega, desc.q_factor, &desc.gamma_factors))
            .expect("descriptor serializes"),
        m,
    );
    if let Some(e) = expansion_cache().lock().expect("cache lock").get(&key) {
        return Ok(e.clone());
    }
    let inv = invariants(desc);
    let g = shift_to_zero_theta(desc);
    let cprime = stirling_coeffs(&g, m)?;
    let cdouble = series_exp(&cprime)?;
    let fact = to_inverse_factorial(&cdouble)?;
    let twist = theta_factor(inv.d, inv.theta);
    let mut d_ell = Vec::with_capacity(m + 1);
    d_ell.push(twist);
    d_ell.extend(fact.coefficients.iter().map(|c| c * twist));
    let e = Arc::new(StructuralExpansion {
        m,
        d_ell,
        beta: inv.beta,
        stirling_cprime: cprime,
        exp_cdouble: cdouble,
        alpha_beta_pairs: alpha_beta_pairs(&g),
    });
    expansion_cache()
        .lock()
        .expect("cache lock")
        .insert(key, e.clone());
    Ok(e)
}

/// d^{i d theta}.
pub fn theta_factor(d: f64, theta: f64) -> C64 {
    C64::from_polar(1.0, d * theta * d.ln())
}

/// log of (omega_F/sqrt(2 pi)) (q^{1/d}/(2 pi d))^{d(1/2 - x)}.
pub fn log_prefactor(desc: &LFunctionDescriptor, x: C64) -> C64 {
    let inv = invariants(desc);
    let d = inv.d;
    let base = inv.q.ln() / d - (2.0 * PI * d).ln();
    C64::new(-0.5 * (2.0 * PI).ln(), inv.root.arg()) + (0.5 - x) * (d * base)
}

/// log Sigma(z) for a theta = 0 descriptor, from Stirling remainders of each factor.
///
/// Defined off the closed negative real axis; the result is fixed modulo 2 pi i.
pub fn log_sigma(desc: &LFunctionDescriptor, z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Domain(format!("Sigma(z) is not defined at z = {z}")));
    }
    let d = desc.degree();
    let pairs = alpha_beta_pairs(desc);
    let mut acc = -stirling_remainder(C64::new(0.0, 0.0), z)?;
    for (g, &(a, b)) in desc.gamma_factors.iter().zip(&pairs) {
        let x = z * (g.lambda / d);
        for shift in [a, b] {
            acc += stirling_remainder(shift, x).map_err(|_| {
                Error::Pole(format!(
                    "Sigma(z) at z = {z}: Gamma({shift} + {} z) is singular",
                    g.lambda / d
                ))
            })?;
        }
    }
    Ok(acc)
}

/// Sum_{l<=M} d_l / ((z-1)...(z-l)).
pub fn inverse_factorial_sum(d_ell: &[C64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut basis = C64::new(1.0, 0.0);
    for (l, dl) in d_ell.iter().enumerate() {
        if l > 0 {
            basis /= z - l as f64;
        }
        acc += dl * basis;
    }
    acc
}

/// E_M(z) = Sigma(z) - sum_{l<=M} d_l/((z-1)...(z-l)), scaled by d^{i d theta} when theta != 0.
pub fn e_m_eval(desc: &LFunctionDescriptor, z: C64, m: usize) -> Result<C64> {
    if z.re <= 0.0 {
        return Err(Error::Domain(format!("E_M(z) needs Re z > 0, got z = {z}")));
    }
    for l in 1..=m {
        if (z - l as f64).norm() < 1e-12 {
            return Err(Error::Pole(format!("E_{m}(z) has a pole at z = {l}")));
        }
    }
    let inv = invariants(desc);
    let g = shift_to_zero_theta(desc);
    let e = structural_cached(desc, m)?;
    let twist = theta_factor(inv.d, inv.theta);
    let sigma = log_sigma(&g, z)?.exp();
    Ok(sigma * twist - inverse_factorial_sum(&e.d_ell, z))
}

/// E_M(z) for callers that already hold a theta = 0 descriptor and its coefficients.
pub(crate) fn e_m_with(g: &LFunctionDescriptor, d_ell: &[C64], z: C64) -> Result<C64> {
    Ok(log_sigma(g, z)?.exp() - inverse_factorial_sum(d_ell, z))
}

const RAY_POINTS: usize = 24;
const RAY_EXTRA: usize = 8;
const RAY_RADIUS: f64 = 30.0;
const RAY_HALF_ANGLE: f64 = 0.7 * PI;

fn fit_nodes() -> Vec<C64> {
    (0..RAY_POINTS)
        .map(|i| {
            let t = -RAY_HALF_ANGLE + 2.0 * RAY_HALF_ANGLE * i as f64 / (RAY_POINTS - 1) as f64;
            C64::from_polar(RAY_RADIUS, t)
        })
        .collect()
}

/// Least-squares fit of exact Sigma(z) samples against the inverse-factorial basis.
///
/// Samples lie on the arc |z| = 30, |arg z| <= 0.7 pi, where the truncated
/// expansion is accurate to rounding level and the basis is well conditioned.
pub fn ray_fit_coefficients(desc: &LFunctionDescriptor, m: usize) -> Result<Vec<C64>> {
    ray_fit_with(desc, m, RAY_EXTRA)
}

/// Ray fit with `extra` basis terms beyond order M absorbing the truncation.
pub fn ray_fit_with(desc: &LFunctionDescriptor, m: usize, extra: usize) -> Result<Vec<C64>> {
    let inv = invariants(desc);
    let g = shift_to_zero_theta(desc);
    let cols = m + 1 + extra;
    let zs = fit_nodes();
    let r0 = RAY_RADIUS;
    // real formulation of the complex least-squares problem
    let mut a = DMatrix::<f64>::zeros(2 * RAY_POINTS, 2 * cols);
    let mut rhs = DVector::<f64>::zeros(2 * RAY_POINTS);
    // column scaling by r0^l keeps the basis entries comparable
    let scale: Vec<f64> = (0..cols).map(|l| r0.powi(l as i32)).collect();
    for (i, &z) in zs.iter().enumerate() {
        let sigma = log_sigma(&g, z)?.exp();
        rhs[2 * i] = sigma.re;
        rhs[2 * i + 1] = sigma.im;
        let mut basis = C64::new(1.0, 0.0);
        for l in 0..cols {
            if l > 0 {
                basis /= z - l as f64;
            }
            let b = basis * scale[l];
            a[(2 * i, 2 * l)] = b.re;
            a[(2 * i, 2 * l + 1)] = -b.im;
            a[(2 * i + 1, 2 * l)] = b.im;
            a[(2 * i + 1, 2 * l + 1)] = b.re;
        }
    }
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::IllConditioned(format!("ray fit SVD failed: {e}")))?;
    let resid = (&a * &x - &rhs).norm() / (RAY_POINTS as f64).sqrt();
    if resid > 1e-6 {
        return Err(Error::IllConditioned(format!(
            "ray fit residual {resid:.3e} exceeds 1e-6"
        )));
    }
    let twist = theta_factor(inv.d, inv.theta);
    Ok((0..=m)
        .map(|l| C64::new(x[2 * l], x[2 * l + 1]) * scale[l] * twist)
        .collect())
}

/// (omega_F/sqrt(2 pi)) (q^{1/d}/(2 pi d))^{d(1/2-s)} sum_{l<=M} d_l Gamma(d(s*_l - s)).
pub fn h_f_asymptotic(desc: &LFunctionDescriptor, s: C64, m: usize) -> Result<C64> {
    Ok(log_h_f_asymptotic(desc, s, m)?.exp())
}

/// Logarithm of the truncated expansion, usable where h_F itself under- or overflows.
pub fn log_h_f_asymptotic(desc: &LFunctionDescriptor, s: C64, m: usize) -> Result<C64> {
    let inv = invariants(desc);
    let d = inv.d;
    let z = (d + 1.0) / 2.0 - d * (s + C64::new(0.0, inv.theta));
    if z.re <= 0.0 {
        return Err(Error::Domain(format!(
            "h_F expansion needs Re d(s_0 - s) > 0, got {}",
            z.re
        )));
    }
    let e = structural_cached(desc, m)?;
    let gamma_err = |l: usize| Error::Pole(format!("Gamma(d(s*_{l} - s)) is singular at s = {s}"));
    let lg0 = log_gamma(z).map_err(|_| gamma_err(0))?;
    let mut acc = C64::new(0.0, 0.0);
    for (l, dl) in e.d_ell.iter().enumerate() {
        if dl.norm() == 0.0 {
            continue;
        }
        let lg = log_gamma(z - l as f64).map_err(|_| gamma_err(l))?;
        acc += dl * (lg - lg0).exp();
    }
    if acc.norm() == 0.0 {
        return Err(Error::Domain(format!("truncated expansion vanishes at s = {s}")));
    }
    Ok(log_prefactor(desc, s) + lg0 + acc.ln())
}

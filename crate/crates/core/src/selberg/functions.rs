use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::descriptor::{GammaFactorTerm, LFunctionDescriptor};
use super::oracle::{conj_series_value, oracle_value};
use super::provider::CoefficientProvider;
use crate::complexfn::gamma::log_gamma;
use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub d: f64,
    pub q: f64,
    pub xi: C64,
    pub eta: f64,
    pub theta: f64,
    pub root: C64,
    /// prod lambda_j^{2 lambda_j}
    pub beta: f64,
}

pub fn invariants(desc: &LFunctionDescriptor) -> Invariants {
    let d = desc.degree();
    let beta: f64 = desc
        .gamma_factors
        .iter()
        .map(|g| g.lambda.powf(2.0 * g.lambda))
        .product();
    let q = (2.0 * PI).powf(d) * desc.q_factor * desc.q_factor * beta;
    let xi: C64 = desc
        .gamma_factors
        .iter()
        .map(|g| (g.mu - 0.5) * 2.0)
        .sum();
    let phase: f64 = desc
        .gamma_factors
        .iter()
        .map(|g| -2.0 * g.mu.im * g.lambda.ln())
        .sum();
    Invariants {
        d,
        q,
        xi,
        eta: xi.re,
        theta: xi.im / d,
        root: desc.omega * C64::from_polar(1.0, phase),
        beta,
    }
}

/// S_F(s) = sum_j a_j e^{i pi d omega_j s}, j = -N..N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineExpansion {
    #[serde(rename = "N")]
    pub n: usize,
    pub degree: f64,
    pub frequencies: Vec<f64>,
    pub coefficients: Vec<C64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl SineExpansion {
    /// a_j for j in -N..=N.
    pub fn a(&self, j: i64) -> C64 {
        self.coefficients[(j + self.n as i64) as usize]
    }

    pub fn omega(&self, j: i64) -> f64 {
        self.frequencies[(j + self.n as i64) as usize]
    }

    /// (L, v) with S_F(s) = e^L v and |v| of moderate size.
    pub fn eval_scaled(&self, s: C64) -> (f64, C64) {
        let scale = 0.5 * PI * self.degree * s.im.abs();
        let mut acc = C64::new(0.0, 0.0);
        for (w, a) in self.frequencies.iter().zip(&self.coefficients) {
            if a.norm() == 0.0 {
                continue;
            }
            let e = C64::new(0.0, PI * self.degree * w) * s - scale;
            acc += a * e.exp();
        }
        (scale, acc)
    }

    pub fn eval(&self, s: C64) -> C64 {
        let (l, v) = self.eval_scaled(s);
        v * l.exp()
    }
}

/// Expand 2^r prod sin(pi(lambda_j s + mu_j)) into exponentials.
pub fn sine_expansion(desc: &LFunctionDescriptor) -> Result<SineExpansion> {
    let d = desc.degree();
    let tol = 1e-12 * d;
    // (sum of +-lambda, coefficient, sum of |contributions|)
    let mut terms: Vec<(f64, C64, f64)> = vec![(0.0, C64::new(1.0, 0.0), 1.0)];
    for g in &desc.gamma_factors {
        let up = C64::new(0.0, -1.0) * (C64::new(0.0, PI) * g.mu).exp();
        let down = C64::new(0.0, 1.0) * (C64::new(0.0, -PI) * g.mu).exp();
        let mut next: Vec<(f64, C64, f64)> = Vec::with_capacity(terms.len() * 2);
        for &(f, c, m) in &terms {
            for (df, k) in [(g.lambda, up), (-g.lambda, down)] {
                let nf = f + df;
                let nc = c * k;
                let nm = m * k.norm();
                match next.iter_mut().find(|t| (t.0 - nf).abs() <= tol) {
                    Some(t) => {
                        t.1 += nc;
                        t.2 += nm;
                    }
                    None => next.push((nf, nc, nm)),
                }
            }
        }
        terms = next;
    }
    let mut diagnostics = Vec::new();
    for t in terms.iter_mut() {
        if t.1.norm() <= 1e-12 * t.2 {
            t.1 = C64::new(0.0, 0.0);
        }
    }
    let mut kept: Vec<(f64, C64)> = terms
        .iter()
        .filter(|t| t.1.norm() != 0.0)
        .map(|t| (t.0 / d, t.1))
        .collect();
    // restore symmetry of the frequency set, keeping cancelled partners as zero slots
    let present: Vec<f64> = kept.iter().map(|t| t.0).collect();
    for w in present {
        if !kept.iter().any(|t| (t.0 + w).abs() <= 1e-12) {
            diagnostics.push(format!(
                "sine coefficient at frequency {} cancels while its partner {} does not",
                -w, w
            ));
            kept.push((-w, C64::new(0.0, 0.0)));
        }
    }
    if !kept.iter().any(|t| t.0.abs() <= 1e-12) {
        kept.push((0.0, C64::new(0.0, 0.0)));
    }
    kept.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite frequencies"));
    let n = (kept.len() - 1) / 2;
    let frequencies: Vec<f64> = kept.iter().map(|t| t.0).collect();
    let coefficients: Vec<C64> = kept.iter().map(|t| t.1).collect();
    if (frequencies[0] + 0.5).abs() > 1e-12 || (frequencies[2 * n] - 0.5).abs() > 1e-12 {
        return Err(Error::Internal(format!(
            "sine expansion of '{}' has extreme frequencies {} and {} instead of -1/2 and 1/2",
            desc.name,
            frequencies[0],
            frequencies[2 * n]
        )));
    }
    for j in 1..=n {
        for jj in [n - j, n + j] {
            if coefficients[jj].norm() == 0.0 {
                diagnostics.push(format!(
                    "sine coefficient a_{} vanishes (expected nonzero for j != 0)",
                    jj as i64 - n as i64
                ));
            }
        }
    }
    Ok(SineExpansion {
        n,
        degree: d,
        frequencies,
        coefficients,
        diagnostics,
    })
}

/// log h_F(s) = log[(omega/(2pi)^r) Q^{1-2s} prod Gamma(lambda(1-s)+conj mu) Gamma(1-lambda s-mu)].
pub fn log_h_f(desc: &LFunctionDescriptor, s: C64) -> Result<C64> {
    let r = desc.gamma_factors.len() as f64;
    let mut acc = C64::new(0.0, desc.omega.arg()) - r * (2.0 * PI).ln()
        + (1.0 - 2.0 * s) * desc.q_factor.ln();
    for (j, GammaFactorTerm { lambda, mu }) in desc.gamma_factors.iter().enumerate() {
        let a = (1.0 - s) * *lambda + mu.conj();
        let b = 1.0 - s * *lambda - mu;
        acc += log_gamma(a).map_err(|_| {
            Error::Pole(format!(
                "h_F pole at s = {s}: factor Gamma(lambda_{0}(1 - s) + conj(mu_{0})) with lambda_{0} = {lambda}, mu_{0} = {mu}",
                j + 1
            ))
        })?;
        acc += log_gamma(b).map_err(|_| {
            Error::Pole(format!(
                "h_F pole at s = {s}: factor Gamma(1 - lambda_{0} s - mu_{0}) with lambda_{0} = {lambda}, mu_{0} = {mu}",
                j + 1
            ))
        })?;
    }
    Ok(acc)
}

pub fn h_f_eval(desc: &LFunctionDescriptor, s: C64) -> Result<C64> {
    Ok(log_h_f(desc, s)?.exp())
}

/// 1/h_F(s), which vanishes where a Gamma factor of h_F has a pole.
pub fn inv_h_f(desc: &LFunctionDescriptor, s: C64) -> Result<C64> {
    match log_h_f(desc, s) {
        Ok(l) => Ok((-l).exp()),
        Err(Error::Pole(_)) => Ok(C64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// h_F(s) S_F(s), combined in log space.
pub fn h_s_product(desc: &LFunctionDescriptor, sine: &SineExpansion, s: C64) -> Result<C64> {
    let (l, v) = sine.eval_scaled(s);
    Ok((log_h_f(desc, s)? + l).exp() * v)
}

/// |F(s) - h_F(s) S_F(s) conj F(1 - conj s)| from the continuation oracle.
pub fn fe_selfcheck(desc: &LFunctionDescriptor, s: C64) -> Result<f64> {
    if !desc.coefficients.has_oracle() {
        return Err(Error::NoOracle(desc.coefficients.kind_name().into()));
    }
    let sine = sine_expansion(desc)?;
    let lhs = oracle_value(&desc.coefficients, s)?;
    let rhs = h_s_product(desc, &sine, s)? * conj_series_value(&desc.coefficients, 1.0 - s)?;
    Ok((lhs - rhs).norm())
}

/// S_F(s) conj F(1 - conj s), via F(s)/h_F(s) where the direct product is 0 times infinity.
pub fn entire_product_check(desc: &LFunctionDescriptor, s: C64) -> Result<C64> {
    if !desc.coefficients.has_oracle() {
        return Err(Error::NoOracle(desc.coefficients.kind_name().into()));
    }
    let sine = sine_expansion(desc)?;
    let sv = sine.eval(s);
    match conj_series_value(&desc.coefficients, 1.0 - s) {
        Ok(fb) if sv.norm() > 1e-13 => Ok(sv * fb),
        _ => {
            let f = oracle_value(&desc.coefficients, s)?;
            Ok(f * inv_h_f(desc, s)?)
        }
    }
}

/// The descriptor G(s) = F(s + i theta_F), which has theta_G = 0.
pub fn shift_to_zero_theta(desc: &LFunctionDescriptor) -> LFunctionDescriptor {
    let theta = invariants(desc).theta;
    if theta == 0.0 {
        return desc.clone();
    }
    let gamma_factors = desc
        .gamma_factors
        .iter()
        .map(|g| GammaFactorTerm::new(g.lambda, g.mu - C64::new(0.0, theta * g.lambda)))
        .collect();
    let coefficients = match &desc.coefficients {
        CoefficientProvider::Shifted { theta: t0, base } if (t0 + theta).abs() < 1e-15 => {
            (**base).clone()
        }
        CoefficientProvider::Shifted { theta: t0, base } => CoefficientProvider::Shifted {
            theta: t0 + theta,
            base: base.clone(),
        },
        other => CoefficientProvider::Shifted {
            theta,
            base: Box::new(other.clone()),
        },
    };
    LFunctionDescriptor {
        name: format!("{}-shifted", desc.name),
        omega: desc.omega * C64::from_polar(1.0, 2.0 * theta * desc.q_factor.ln()),
        q_factor: desc.q_factor,
        gamma_factors,
        polar: desc.polar.clone(),
        coefficients,
    }
}

//! Compatible systems, the N_0 algorithm and detection of strict gamma-factor shapes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selberg::{invariants, GammaFactorTerm, LFunctionDescriptor};

type C64 = Complex64;

/// Largest denominator accepted when recognizing lambda ratios.
pub const DENOMINATOR_CAP: i64 = 64;
/// Tolerance for recognizing integers and rationals in floating-point data.
pub const INTEGER_TOL: f64 = 1e-9;
const THETA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibleSystem {
    #[serde(rename = "N")]
    pub n_big: usize,
    pub n: Vec<i64>,
}

impl CompatibleSystem {
    pub fn new(n: Vec<i64>) -> Result<Self> {
        if n.is_empty() {
            return Err(Error::Validation("compatible system needs N >= 1".into()));
        }
        if let Some(bad) = n.iter().find(|&&x| x < 0) {
            return Err(Error::Validation(format!("n_j = {bad} is negative")));
        }
        Ok(CompatibleSystem { n_big: n.len(), n })
    }

    fn modulus(&self) -> i64 {
        2 * self.n_big as i64
    }

    /// The 2N integers n_j and 2N + 1 - n_j, in that order.
    pub fn union(&self) -> Vec<i64> {
        let m = self.modulus();
        self.n.iter().copied().chain(self.n.iter().map(|&x| m + 1 - x)).collect()
    }
}

/// Conditions (a) n_i != n_j and (b) n_i != 1 - n_j modulo 2N.
pub fn is_compatible(sys: &CompatibleSystem) -> bool {
    let m = sys.modulus();
    let n = &sys.n;
    for i in 0..n.len() {
        for j in 0..n.len() {
            if i != j && (n[i] - n[j]).rem_euclid(m) == 0 {
                return false;
            }
            if (n[i] + n[j] - 1).rem_euclid(m) == 0 {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct N0Decomposition {
    pub n_0: i64,
    /// nu_j for j = 0..2N-1.
    pub nu: Vec<i64>,
    #[serde(rename = "N_0")]
    pub n0_total: i64,
    /// The set U in increasing order.
    pub union: Vec<i64>,
}

/// Decomposition U = {n_0 + j + 2N nu_j} with minimal sum of nu_j.
///
/// Any admissible n_0 is at most min(U), and summing U gives n_0 + N_0 = 1,
/// so n_0 = min(U) is the unique minimizer.
pub fn compute_n0(sys: &CompatibleSystem) -> Result<N0Decomposition> {
    if !is_compatible(sys) {
        return Err(Error::Incompatible(format!(
            "n = {:?} violates the congruence conditions modulo {}",
            sys.n,
            sys.modulus()
        )));
    }
    let m = sys.modulus();
    let mut u = sys.union();
    u.sort_unstable();
    let n_0 = u[0];
    let mut nu = vec![-1i64; m as usize];
    for &e in &u {
        let j = (e - n_0).rem_euclid(m);
        let slot = &mut nu[j as usize];
        if *slot >= 0 {
            return Err(Error::Internal(format!("residue {j} hit twice in {u:?}")));
        }
        *slot = (e - n_0 - j) / m;
    }
    let n0_total = nu.iter().sum();
    Ok(N0Decomposition {
        n_0,
        nu,
        n0_total,
        union: u,
    })
}

/// Best rational approximation p/q with q <= cap, accepted when within tol.
pub fn rationalize(x: f64, cap: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let ai = a as i64;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > cap {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol * x.abs().max(1.0) {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Rewrite every factor with lambda_j = d/(2 target_N) using the Gauss multiplication formula.
///
/// A factor Gamma(k lambda s + mu) becomes prod_i Gamma(lambda s + (mu + i)/k), with Q
/// multiplied by k^{lambda_j} and omega by k^{-2i Im mu}.
pub fn gamma_multiply_normalize(desc: &LFunctionDescriptor, target_n: usize) -> Result<LFunctionDescriptor> {
    if target_n == 0 {
        return Err(Error::Validation("target N must be at least 1".into()));
    }
    let d = desc.degree();
    let lam = d / (2.0 * target_n as f64);
    let mut factors = Vec::new();
    let mut q = desc.q_factor;
    let mut omega = desc.omega;
    for (j, g) in desc.gamma_factors.iter().enumerate() {
        let ratio = g.lambda / lam;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > INTEGER_TOL * ratio.max(1.0) {
            return Err(Error::Validation(format!(
                "lambda_{} = {} is not an integer multiple of d/(2N) = {lam}",
                j + 1,
                g.lambda
            )));
        }
        let ki = k as usize;
        for i in 0..ki {
            factors.push(GammaFactorTerm::new(lam, (g.mu + i as f64) / k));
        }
        if ki > 1 {
            q *= k.powf(g.lambda);
            omega *= C64::from_polar(1.0, -2.0 * g.mu.im * k.ln());
        }
    }
    LFunctionDescriptor::new(
        desc.name.clone(),
        omega,
        q,
        factors,
        desc.polar.clone(),
        desc.coefficients.clone(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictFEReport {
    pub is_strict: bool,
    pub h: Option<i64>,
    #[serde(rename = "N")]
    pub n_big: usize,
    pub n_j: Vec<i64>,
    pub n_0: Option<i64>,
    pub nu_j: Vec<i64>,
    #[serde(rename = "N_0")]
    pub n0_total: Option<i64>,
    /// The set U of the decomposition, when the system is compatible.
    pub union: Vec<i64>,
    pub failure_reason: Option<String>,
    /// Consistency warnings from the strict-case constraints on the polar part.
    pub diagnostics: Vec<String>,
}

impl StrictFEReport {
    fn failed(n_big: usize, n_j: Vec<i64>, reason: String) -> Self {
        StrictFEReport {
            is_strict: false,
            h: None,
            n_big,
            n_j,
            n_0: None,
            nu_j: Vec::new(),
            n0_total: None,
            union: Vec::new(),
            failure_reason: Some(reason),
            diagnostics: Vec::new(),
        }
    }

    /// Human-readable trace of the decomposition.
    pub fn trace(&self) -> String {
        let yes = if self.is_strict { "yes" } else { "no" };
        let mut out = format!("strict: {yes}");
        if let (Some(h), Some(n0), Some(nn)) = (self.h, self.n_0, self.n0_total) {
            out.push_str(&format!(", h={h}, n_0={n0}, N_0={nn}"));
        }
        out.push('\n');
        out.push_str(&format!("N = {}, n_j = {:?}\n", self.n_big, self.n_j));
        if !self.union.is_empty() {
            out.push_str(&format!("U = {:?}\nnu_j = {:?}\n", self.union, self.nu_j));
        }
        if let Some(r) = &self.failure_reason {
            out.push_str(&format!("reason: {r}\n"));
        }
        for d in &self.diagnostics {
            out.push_str(&format!("warning: {d}\n"));
        }
        out
    }
}

/// Smallest N with every lambda_j an integer multiple of d/(2N).
pub fn minimal_n(desc: &LFunctionDescriptor) -> Result<usize> {
    let d = desc.degree();
    let mut n = 1i64;
    for (j, g) in desc.gamma_factors.iter().enumerate() {
        let x = 2.0 * g.lambda / d;
        let (p, q) = rationalize(x, DENOMINATOR_CAP, INTEGER_TOL).ok_or_else(|| {
            Error::Validation(format!(
                "lambda_{} / (d/2) = {x} has no rational form with denominator <= {DENOMINATOR_CAP}",
                j + 1
            ))
        })?;
        let q = q / gcd(p, q);
        n = n / gcd(n, q) * q;
    }
    Ok(n as usize)
}

/// Decide whether the gamma factor has the strict shape and compute h = N_0.
pub fn detect_strict(desc: &LFunctionDescriptor) -> Result<StrictFEReport> {
    let theta = invariants(desc).theta;
    if theta.abs() > THETA_TOL {
        return Err(Error::Precondition(format!(
            "theta_F = {theta} != 0; apply shift_to_zero_theta before testing strictness"
        )));
    }
    let n_big = match minimal_n(desc) {
        Ok(n) => n,
        Err(e) => return Ok(StrictFEReport::failed(0, Vec::new(), e.to_string())),
    };
    let norm = gamma_multiply_normalize(desc, n_big)?;
    let d = norm.degree();
    let n_min = ((d + 1.0) / 2.0 - INTEGER_TOL).ceil() as i64;
    let mut n_j = Vec::new();
    for (j, g) in norm.gamma_factors.iter().enumerate() {
        if g.mu.im.abs() > INTEGER_TOL {
            return Ok(StrictFEReport::failed(
                n_big,
                n_j,
                format!("mu_{} = {} is not real", j + 1, g.mu),
            ));
        }
        let x = (4.0 * n_big as f64 * g.mu.re + d + 1.0) / 2.0;
        let k = x.round();
        if (x - k).abs() > INTEGER_TOL {
            return Ok(StrictFEReport::failed(
                n_big,
                n_j,
                format!("n_{} = (4N mu + d + 1)/2 = {x} is not an integer", j + 1),
            ));
        }
        let k = k as i64;
        if k < n_min {
            return Ok(StrictFEReport::failed(
                n_big,
                n_j,
                format!("n_{} = {k} is below (d+1)/2", j + 1),
            ));
        }
        n_j.push(k);
    }
    let sys = CompatibleSystem::new(n_j.clone())?;
    let dec = match compute_n0(&sys) {
        Ok(dec) => dec,
        Err(e) => return Ok(StrictFEReport::failed(n_big, n_j, e.to_string())),
    };
    let mut diagnostics = Vec::new();
    if desc.polar.m_f > 0 {
        if desc.polar.m_f > 1 {
            diagnostics.push(format!(
                "strict shape with a pole at s = 1 forces m_F = 1, descriptor has m_F = {}",
                desc.polar.m_f
            ));
        }
        if ((d - 1.0) / 2.0 - ((d - 1.0) / 2.0).round()).abs() > INTEGER_TOL {
            diagnostics.push(format!(
                "strict shape with a pole at s = 1 forces odd degree, descriptor has d = {d}"
            ));
        }
    }
    Ok(StrictFEReport {
        is_strict: true,
        h: Some(dec.n0_total),
        n_big,
        n_j,
        n_0: Some(dec.n_0),
        nu_j: dec.nu,
        n0_total: Some(dec.n0_total),
        union: dec.union,
        failure_reason: None,
        diagnostics,
    })
}
